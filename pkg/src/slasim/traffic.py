"""Traffic/QoS monitoring simulator: plays the MNO's measurement role.

Generates per-period, per-provider, per-QCI served traffic and measured
average throughput from a scenario, detects throughput breaches against the
agreed levels, and drives the contract through record/breach/close cycles.

The measurement window equals one accounting period, so served kb and the
measured average throughput coincide.  For each stream the per-period value
is drawn uniformly from [nominal*(1-v), nominal*(1+v)] (bounds floor-rounded)
using the SplitMix64 scheme in :mod:`slasim.rng`, then every degradation
window covering the period multiplies it (floor-rounded) by its rational
multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .config import ScenarioConfig
from .contract import SlaContract, SlaTerms
from .errors import UnknownQci
from .ledger import Ledger
from .report import RunReport, ScpRow
from .rng import splitmix64, stream_key

# (label, qci, kb_served) with kb_served == measured average throughput
StreamSample = Tuple[str, int, int]


@dataclass
class TrafficTrace:
    """Deterministic per-period measurements, fixed by (config, seed)."""

    seed: int
    num_periods: int
    periods: List[List[StreamSample]] = field(default_factory=list)

    def period_slice(self, period: int) -> List[StreamSample]:
        return self.periods[period]

    def measured(self, period: int, label: str, qci: int) -> int:
        for slabel, sqci, value in self.periods[period]:
            if slabel == label and sqci == qci:
                return value
        raise KeyError((period, label, qci))


def generate_trace(config: ScenarioConfig) -> TrafficTrace:
    config.validate()
    streams = []
    for scp_index, scp in enumerate(config.scps):
        for qci in sorted(scp.traffic):
            model = scp.traffic[qci]
            vnum, vden = model.variability
            lo = model.nominal_kb * (vden - vnum) // vden
            hi = model.nominal_kb * (vden + vnum) // vden
            key = stream_key(config.seed, scp_index, qci)
            streams.append((scp.label, qci, key, lo, hi, model.degradations))
    trace = TrafficTrace(seed=config.seed, num_periods=config.num_periods)
    for period in range(config.num_periods):
        slice_ = []
        for label, qci, key, lo, hi, windows in streams:
            if lo == hi:
                value = lo
            else:
                value = lo + splitmix64(key ^ period) % (hi - lo + 1)
            for window in windows:
                if window.start <= period <= window.end:
                    mnum, mden = window.multiplier
                    value = value * mnum // mden
            slice_.append((label, qci, value))
        slice_.sort(key=lambda s: (s[0], s[1]))
        trace.periods.append(slice_)
    return trace


def detect_breaches(
    period_slice: List[StreamSample], terms_by_label: Dict[str, SlaTerms]
) -> List[Tuple[str, int, int]]:
    """Breach entries (label, qci, deficit) for every measured < agreed.

    Strict inequality: meeting the agreed average exactly is not a breach.
    Output is ordered by (label, qci) for determinism.
    """
    breaches = []
    for label, qci, measured in period_slice:
        terms = terms_by_label[label]
        if qci not in terms.agreed_throughput:
            raise UnknownQci(f"QCI {qci} is not part of {label!r}'s agreement")
        agreed = terms.agreed_throughput[qci]
        if measured < agreed:
            breaches.append((label, qci, agreed - measured))
    breaches.sort(key=lambda b: (b[0], b[1]))
    return breaches


def drive(
    ledger: Ledger,
    contract: SlaContract,
    config: ScenarioConfig,
    trace: Optional[TrafficTrace] = None,
) -> RunReport:
    """Run the full scenario against an already funded, registered contract.

    Expects every scenario SCP registered under its label as its ledger
    address and the owner's deposit already made.  After the last period,
    every provider with positive credit withdraws.  Propagates contract
    errors (notably InsufficientEscrowForAccrual) to the caller.
    """
    if trace is None:
        trace = generate_trace(config)
    owner = contract.owner
    terms_by_label = {scp.label: scp.terms for scp in config.scps}
    rows = {scp.label: ScpRow(label=scp.label) for scp in config.scps}

    for period in range(config.num_periods):
        period_slice = trace.period_slice(period)
        for label, qci, kb in period_slice:
            if contract.registry[label].active:
                contract.record_traffic(owner, label, qci, kb)
        for label, qci, deficit in detect_breaches(period_slice, terms_by_label):
            record = contract.registry[label]
            if not record.active:
                continue
            before = record.credit
            contract.throughput_breach(owner, label, qci, deficit)
            rows[label].penalized += before - record.credit
            if not record.active:
                rows[label].removal_period = period
        credits_before = {label: contract.registry[label].credit for label in rows}
        contract.close_period(owner)
        for label, row in rows.items():
            record = contract.registry[label]
            row.earned += record.credit - credits_before[label]
            row.strikes_timeline.append(record.consecutive_strikes)

    for label in sorted(rows):
        if contract.registry[label].credit > 0:
            rows[label].withdrawn += contract.withdraw(label)
        rows[label].final_credit = contract.registry[label].credit

    report = RunReport(
        seed=config.seed,
        config_echo=config.to_dict(),
        rows=rows,
        total_deposits=contract.total_deposits,
        escrow_remaining=contract.escrow,
        total_withdrawn=contract.total_withdrawn,
        total_recovered=contract.total_recovered,
        num_events=len(ledger.events),
        digest=ledger.state_digest(),
    )
    report.validate()
    return report
