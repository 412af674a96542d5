"""Monitoring simulator: trace generation, breach detection, scenario driving."""

import pytest

from conftest import make_terms
from slasim import (
    DegradationWindow,
    EventKind,
    ScenarioConfig,
    ScpScenario,
    SlaContract,
    TrafficModel,
    detect_breaches,
    drive,
    generate_trace,
)
from slasim.cli import setup_run
from slasim.errors import UnknownQci
from slasim.verify import reconstruct_from_events


def scenario(num_periods=10, variability=(0, 1), degradations=(), nominal=1000,
             agreed=800, seed=7, escrow=1_000_000, price=2):
    terms = make_terms(
        agreed_throughput={1: agreed}, price_per_kb={1: price}, penalty_rate=(1, 1)
    )
    traffic = {1: TrafficModel(nominal_kb=nominal, variability=variability,
                               degradations=list(degradations))}
    return ScenarioConfig(
        seed=seed,
        num_periods=num_periods,
        escrow_deposit=escrow,
        scps=[ScpScenario(label="scp-1", terms=terms, traffic=traffic)],
    )


class TestGenerateTrace:
    def test_zero_variability_hits_nominal(self):
        trace = generate_trace(scenario())
        for period in range(10):
            assert trace.measured(period, "scp-1", 1) == 1000

    def test_zero_multiplier_annihilates(self):
        config = scenario(degradations=[DegradationWindow(3, 5, (0, 1))])
        trace = generate_trace(config)
        for period in range(10):
            expected = 0 if 3 <= period <= 5 else 1000
            assert trace.measured(period, "scp-1", 1) == expected

    def test_multipliers_compose_with_floor(self):
        config = scenario(
            degradations=[DegradationWindow(0, 9, (1, 2)), DegradationWindow(0, 9, (2, 3))]
        )
        trace = generate_trace(config)
        # 1000 -> 500 -> 333
        assert trace.measured(0, "scp-1", 1) == 333

    def test_same_seed_identical(self):
        a = generate_trace(scenario(variability=(1, 4)))
        b = generate_trace(scenario(variability=(1, 4)))
        assert a.periods == b.periods

    def test_different_seed_differs(self):
        a = generate_trace(scenario(variability=(1, 4), seed=1, num_periods=50))
        b = generate_trace(scenario(variability=(1, 4), seed=2, num_periods=50))
        assert a.periods != b.periods

    def test_draws_stay_in_bounds(self):
        trace = generate_trace(scenario(variability=(1, 4), num_periods=200))
        lo, hi = 750, 1250
        values = [trace.measured(p, "scp-1", 1) for p in range(200)]
        assert all(lo <= v <= hi for v in values)
        assert len(set(values)) > 1


class TestDetectBreaches:
    def test_exact_measure_is_not_a_breach(self):
        terms = {"scp-1": make_terms(agreed_throughput={1: 1000}, price_per_kb={1: 2})}
        assert detect_breaches([("scp-1", 1, 1000)], terms) == []

    def test_deficit_is_the_difference(self):
        terms = {"scp-1": make_terms(agreed_throughput={1: 1000}, price_per_kb={1: 2})}
        assert detect_breaches([("scp-1", 1, 400)], terms) == [("scp-1", 1, 600)]

    def test_mixed_slice_deterministic_order(self):
        # 3 SCPs x 2 QCIs, shortfalls only at (b, 1) and (a, 5); by hand:
        terms = {
            label: make_terms(agreed_throughput={1: 1000, 5: 500}, price_per_kb={1: 1, 5: 1})
            for label in ("a", "b", "c")
        }
        period_slice = [
            ("a", 1, 1000), ("a", 5, 100),
            ("b", 1, 900), ("b", 5, 500),
            ("c", 1, 1200), ("c", 5, 600),
        ]
        assert detect_breaches(period_slice, terms) == [("a", 5, 400), ("b", 1, 100)]

    def test_unknown_qci(self):
        terms = {"scp-1": make_terms(agreed_throughput={1: 1000}, price_per_kb={1: 2})}
        with pytest.raises(UnknownQci):
            detect_breaches([("scp-1", 9, 100)], terms)


class TestDrive:
    def test_closed_form_payout(self):
        # no degradation, zero variability, measured 1000 >= agreed 800:
        # withdrawn = price * nominal * periods = 2 * 1000 * 10
        config = scenario()
        ledger, contract = setup_run(config)
        report = drive(ledger, contract, config)
        row = report.rows["scp-1"]
        assert row.withdrawn == 2 * 1000 * 10
        assert row.penalized == 0
        assert row.removal_period is None

    def test_full_outage_removes_at_third_period(self):
        config = scenario(degradations=[DegradationWindow(2, 7, (0, 1))], agreed=800)
        ledger, contract = setup_run(config)
        report = drive(ledger, contract, config)
        row = report.rows["scp-1"]
        assert row.removal_period == 4  # breaches in periods 2, 3, 4
        assert contract.get_scp_status("scp-1")[0] is False
        # removal happens before the period-4 close, so the last payout is period 3
        payouts = ledger.query_events(kind=EventKind.PERIODIC_PAYOUT, subject="scp-1")
        assert max(e.period for e in payouts) == 3

    def test_zero_period_scenario(self):
        config = scenario(num_periods=0)
        ledger, contract = setup_run(config)
        report = drive(ledger, contract, config)
        row = report.rows["scp-1"]
        assert (row.earned, row.penalized, row.withdrawn) == (0, 0, 0)
        assert contract.total_deposits == contract.escrow

    def test_report_matches_event_log(self):
        config = scenario(variability=(1, 4), agreed=1000, num_periods=30,
                          degradations=[DegradationWindow(10, 11, (1, 2))])
        ledger, contract = setup_run(config)
        report = drive(ledger, contract, config)
        rebuilt = reconstruct_from_events(ledger.events)["scp-1"]
        row = report.rows["scp-1"]
        assert rebuilt.earned == row.earned
        assert rebuilt.penalized == row.penalized
        assert rebuilt.withdrawn == row.withdrawn
        assert rebuilt.credit == row.final_credit

    def test_breach_event_count_matches_detection(self):
        config = scenario(variability=(1, 4), agreed=1000, num_periods=20)
        trace = generate_trace(config)
        terms = {"scp-1": config.scps[0].terms}
        expected = 0
        removed_at = None
        strikes = 0
        for period in range(20):
            breaches = detect_breaches(trace.period_slice(period), terms)
            if removed_at is None:
                expected += len(breaches)
                if breaches:
                    strikes += 1
                    if strikes == 3:
                        removed_at = period
                else:
                    strikes = 0
        ledger, contract = setup_run(config)
        drive(ledger, contract, config)
        fired = ledger.query_events(kind=EventKind.INSUFFICIENT_THROUGHPUT)
        assert len(fired) == expected

    def test_run_twice_identical_reports(self):
        config = scenario(variability=(1, 3), agreed=950, num_periods=25)
        results = []
        for _ in range(2):
            ledger, contract = setup_run(config)
            results.append(drive(ledger, contract, config).to_dict())
        assert results[0] == results[1]
