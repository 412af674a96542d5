"""Built-in verification suites: strike-rule oracle, conservation fuzz,
and reconstruction of contract state purely from the event log.

These are the independent cross-checks behind the ``verify`` CLI command and
the acceptance tests.  The strike oracle deliberately knows nothing about the
contract implementation: it is a plain counter over breach/clean period
sequences.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .contract import PER_TRAFFIC, SlaContract, SlaTerms
from .errors import ContractError
from .ledger import EventKind, EventRecord, Ledger


# --- 3-strike oracle ---------------------------------------------------------

def strike_oracle_removal_period(seq: Sequence[bool], limit: int = 3) -> Optional[int]:
    """Brute-force counter: limit consecutive breach periods, reset on clean."""
    strikes = 0
    for period, breached in enumerate(seq):
        if breached:
            strikes += 1
            if strikes >= limit:
                return period
        else:
            strikes = 0
    return None


def contract_removal_period(seq: Sequence[bool], limit: int = 3) -> Optional[int]:
    """Removal period reported by a real contract run over the same sequence."""
    ledger = Ledger()
    owner = ledger.create_account(10_000, "mno")
    contract = SlaContract(ledger, owner)
    terms = SlaTerms(
        payment_mode=PER_TRAFFIC,
        agreed_throughput={1: 100},
        price_per_kb={1: 0},
        penalty_rate=(1, 1),
        strike_limit=limit,
    )
    scp = ledger.create_account(0, "scp")
    contract.register_scp(owner, scp, terms)
    contract.deposit(owner, 10_000)
    for breached in seq:
        if breached and contract.registry[scp].active:
            contract.throughput_breach(owner, scp, 1, 10)
        if not contract.registry[scp].active:
            removed = ledger.query_events(kind=EventKind.SCP_REMOVED, subject=scp)
            return removed[0].period
        contract.close_period(owner)
    return None


def check_strike_equivalence(max_len: int, limit: int = 3) -> Optional[dict]:
    """Compare contract vs oracle over every sequence up to max_len.

    Returns None when all agree, else the first counterexample.
    """
    for length in range(max_len + 1):
        for bits in product([False, True], repeat=length):
            expected = strike_oracle_removal_period(bits, limit)
            actual = contract_removal_period(bits, limit)
            if expected != actual:
                return {
                    "sequence": list(bits),
                    "oracle": expected,
                    "contract": actual,
                }
    return None


# --- event-log reconstruction ------------------------------------------------

@dataclass
class ReconstructedScp:
    credit: int = 0
    consecutive_strikes: int = 0
    active: bool = True
    breached_this_period: bool = False
    earned: int = 0
    penalized: int = 0
    withdrawn: int = 0


def reconstruct_from_events(events: List[EventRecord]) -> Dict[str, ReconstructedScp]:
    """Rebuild every provider's credit/strike trajectory from events alone."""
    state: Dict[str, ReconstructedScp] = {}
    for event in events:
        scp = event.subject
        if event.kind is EventKind.SCP_REGISTERED:
            state[scp] = ReconstructedScp()
        elif event.kind is EventKind.INSUFFICIENT_THROUGHPUT:
            rec = state[scp]
            debit = event.payload_value("debit")
            rec.credit -= debit
            rec.penalized += debit
            if not rec.breached_this_period:
                rec.breached_this_period = True
                rec.consecutive_strikes += 1
        elif event.kind is EventKind.SCP_REMOVED:
            state[scp].active = False
        elif event.kind is EventKind.PERIODIC_PAYOUT:
            rec = state[scp]
            payout = event.payload_value("payout")
            rec.credit += payout
            rec.earned += payout
            if not rec.breached_this_period:
                rec.consecutive_strikes = 0
            rec.breached_this_period = False
        elif event.kind is EventKind.WITHDRAWAL:
            rec = state[scp]
            amount = event.payload_value("amount")
            rec.credit -= amount
            rec.withdrawn += amount
    return state


def registry_matches_events(contract: SlaContract) -> Optional[str]:
    """None if the live registry equals the event-log reconstruction."""
    rebuilt = reconstruct_from_events(contract.ledger.events)
    for addr, record in contract.registry.items():
        rec = rebuilt.get(addr)
        if rec is None:
            return f"{addr!r} registered but absent from events"
        if (rec.credit, rec.consecutive_strikes, rec.active) != (
            record.credit,
            record.consecutive_strikes,
            record.active,
        ):
            return (
                f"{addr!r}: events say credit={rec.credit} strikes="
                f"{rec.consecutive_strikes} active={rec.active}, registry says "
                f"credit={record.credit} strikes={record.consecutive_strikes} "
                f"active={record.active}"
            )
    return None


# --- conservation fuzz -------------------------------------------------------

def _conservation_holds(contract: SlaContract) -> bool:
    return (
        contract.total_deposits
        == contract.escrow + contract.total_withdrawn + contract.total_recovered
    )


def conservation_fuzz(num_ops: int, seed: int = 0) -> Optional[dict]:
    """Random valid operations; checks exact conservation after every step.

    The last ~1% of the budget disables the contract and exercises
    withdraw/recover in the disabled state.  Returns None on success, else a
    description of the first violation.
    """
    rng = random.Random(seed)
    ledger = Ledger()
    owner = ledger.create_account(10**12, "mno")
    contract = SlaContract(ledger, owner)
    terms = SlaTerms(
        payment_mode=PER_TRAFFIC,
        agreed_throughput={1: 1_000, 2: 500},
        price_per_kb={1: 2, 2: 3},
        penalty_rate=(rng.randrange(1, 7), rng.randrange(1, 4)),
        strike_limit=3,
    )
    scps = [ledger.create_account(0, f"scp-{i}") for i in range(6)]
    for scp in scps:
        contract.register_scp(owner, scp, terms)
    contract.deposit(owner, 10**9)

    initial_total = ledger.total_balance()
    disable_at = max(num_ops - num_ops // 100 - 1, 1)
    ops_done = 0
    step = 0
    while ops_done < num_ops:
        step += 1
        if ops_done == disable_at and not contract.disabled:
            action = "disable"
        elif contract.disabled:
            action = rng.choice(["withdraw", "recover"])
        else:
            action = rng.choice(
                ["deposit", "traffic", "traffic", "breach", "close", "withdraw", "register"]
            )
        try:
            if action == "deposit":
                contract.deposit(owner, rng.randrange(0, 10_000))
            elif action == "traffic":
                contract.record_traffic(
                    owner, rng.choice(scps), rng.choice([1, 2]), rng.randrange(0, 2_000)
                )
            elif action == "breach":
                contract.throughput_breach(
                    owner, rng.choice(scps), rng.choice([1, 2]), rng.randrange(1, 800)
                )
            elif action == "close":
                contract.close_period(owner)
            elif action == "withdraw":
                contract.withdraw(rng.choice(scps))
            elif action == "register":
                contract.register_scp(owner, rng.choice(scps), terms)
            elif action == "disable":
                contract.failsafe_disable(owner)
            elif action == "recover":
                contract.recover_escrow(owner)
        except ContractError:
            # removed SCPs, empty credits etc.; the attempt must not move funds
            pass
        ops_done += 1
        if not _conservation_holds(contract):
            return {
                "step": step,
                "action": action,
                "deposits": contract.total_deposits,
                "escrow": contract.escrow,
                "withdrawn": contract.total_withdrawn,
                "recovered": contract.total_recovered,
            }
        if ledger.total_balance() != initial_total:
            return {"step": step, "action": action, "error": "ledger total changed"}
        if any(balance < 0 for balance in ledger.balances.values()):
            return {"step": step, "action": action, "error": "negative balance"}
    return None
