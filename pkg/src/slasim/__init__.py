"""Deterministic simulator of SLA smart contracts for small-cell RAN sharing."""

from .contract import FLAT_RATE, PER_TRAFFIC, ScpRecord, SlaContract, SlaTerms
from .config import (
    DegradationWindow,
    QciProfile,
    ScenarioConfig,
    ScpScenario,
    TrafficModel,
    load_config,
)
from .ledger import EventKind, EventRecord, Ledger
from .report import RunReport, ScpRow
from .traffic import TrafficTrace, detect_breaches, drive, generate_trace

__version__ = "0.1.0"

__all__ = [
    "DegradationWindow",
    "EventKind",
    "EventRecord",
    "FLAT_RATE",
    "Ledger",
    "PER_TRAFFIC",
    "QciProfile",
    "RunReport",
    "ScenarioConfig",
    "ScpRecord",
    "ScpRow",
    "ScpScenario",
    "SlaContract",
    "SlaTerms",
    "TrafficModel",
    "TrafficTrace",
    "detect_breaches",
    "drive",
    "generate_trace",
    "load_config",
]
