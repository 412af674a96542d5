import pytest

from slasim import FLAT_RATE, PER_TRAFFIC, Ledger, SlaContract, SlaTerms


def make_terms(**overrides) -> SlaTerms:
    kwargs = dict(
        payment_mode=PER_TRAFFIC,
        agreed_throughput={1: 1000, 5: 500},
        price_per_kb={1: 2, 5: 1},
        penalty_rate=(5, 1),
        strike_limit=3,
    )
    kwargs.update(overrides)
    return SlaTerms(**kwargs)


def make_flat_terms(rate: int = 500, **overrides) -> SlaTerms:
    kwargs = dict(
        payment_mode=FLAT_RATE,
        agreed_throughput={1: 800},
        flat_rate_per_period=rate,
        penalty_rate=(1, 3),
        strike_limit=3,
    )
    kwargs.update(overrides)
    return SlaTerms(**kwargs)


@pytest.fixture
def ledger():
    return Ledger()


@pytest.fixture
def world(ledger):
    """Ledger with a funded contract and one registered provider."""
    owner = ledger.create_account(1_000_000, "mno")
    contract = SlaContract(ledger, owner)
    scp = ledger.create_account(0, "scp-1")
    contract.register_scp(owner, scp, make_terms())
    contract.deposit(owner, 500_000)
    return ledger, contract, owner, scp
