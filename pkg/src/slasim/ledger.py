"""Minimal simulated ledger: accounts, event log, period clock, replayable tx log.

The ledger is the execution substrate for the SLA contract.  It keeps integer
account balances (never negative, never fractional), an append-only indexed
event log, and a monotone period counter.  Every public mutating operation is
recorded in a transaction log so a run can be exported and replayed
byte-for-byte; the canonical state digest makes replay determinism checkable
as plain string equality.

Not thread-safe; one ledger instance belongs to one scenario run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .errors import DuplicateAddress, InsufficientFunds, UnknownAddress

TXLOG_FORMAT = "slasim-txlog"
TXLOG_VERSION = 1


class EventKind(str, Enum):
    PERIODIC_PAYOUT = "PeriodicPayout"
    INSUFFICIENT_THROUGHPUT = "InsufficientThroughput"
    SCP_REGISTERED = "ScpRegistered"
    SCP_REMOVED = "ScpRemoved"
    CONTRACT_DISABLED = "ContractDisabled"
    WITHDRAWAL = "Withdrawal"
    DEPOSIT = "Deposit"
    ESCROW_RECOVERED = "EscrowRecovered"


@dataclass(frozen=True)
class EventRecord:
    """One immutable, indexed log entry.  Payload is ordered (name, value) pairs."""

    index: int
    period: int
    kind: EventKind
    subject: str
    qci: Optional[int] = None
    payload: Tuple[Tuple[str, int], ...] = ()

    def payload_value(self, name: str) -> int:
        for key, value in self.payload:
            if key == name:
                return value
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "period": self.period,
            "kind": self.kind.value,
            "subject": self.subject,
            "qci": self.qci,
            "payload": [[name, value] for name, value in self.payload],
        }


def _check_amount(amount: int) -> None:
    if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
        raise ValueError(f"amounts are non-negative integers, got {amount!r}")


class Ledger:
    """Accounts, events and the period clock for one simulation run."""

    def __init__(self) -> None:
        self.balances: Dict[str, int] = {}
        self.events: List[EventRecord] = []
        self.current_period: int = 0
        self.txlog: List[dict] = []
        # contracts attach themselves so the digest covers their state too
        self.contracts: Dict[str, object] = {}
        self._anon_counter = 0

    # --- accounts ---------------------------------------------------------

    def create_account(self, initial_balance: int = 0, label: Optional[str] = None) -> str:
        address = self._new_account(initial_balance, label)
        self._log("create_account", label=address, balance=initial_balance)
        return address

    def _new_account(self, initial_balance: int, label: Optional[str]) -> str:
        _check_amount(initial_balance)
        if label is None:
            label = f"acct-{self._anon_counter}"
            self._anon_counter += 1
        if label in self.balances:
            raise DuplicateAddress(f"address {label!r} already exists")
        self.balances[label] = initial_balance
        return label

    def balance(self, address: str) -> int:
        try:
            return self.balances[address]
        except KeyError:
            raise UnknownAddress(f"unknown address {address!r}") from None

    def transfer(self, src: str, dst: str, amount: int) -> None:
        self._transfer(src, dst, amount)
        self._log("transfer", src=src, dst=dst, amount=amount)

    def _transfer(self, src: str, dst: str, amount: int) -> None:
        _check_amount(amount)
        if src not in self.balances:
            raise UnknownAddress(f"unknown address {src!r}")
        if dst not in self.balances:
            raise UnknownAddress(f"unknown address {dst!r}")
        if self.balances[src] < amount:
            raise InsufficientFunds(
                f"{src!r} holds {self.balances[src]}, cannot send {amount}"
            )
        self.balances[src] -= amount
        self.balances[dst] += amount

    def total_balance(self) -> int:
        return sum(self.balances.values())

    # --- events -----------------------------------------------------------

    def append_event(
        self,
        kind: EventKind,
        subject: str,
        qci: Optional[int] = None,
        payload: Tuple[Tuple[str, int], ...] = (),
    ) -> int:
        index = self._append_event(kind, subject, qci, payload)
        self._log(
            "append_event",
            kind=kind.value,
            subject=subject,
            qci=qci,
            payload=[[name, value] for name, value in payload],
        )
        return index

    def _append_event(
        self,
        kind: EventKind,
        subject: str,
        qci: Optional[int] = None,
        payload: Tuple[Tuple[str, int], ...] = (),
    ) -> int:
        record = EventRecord(
            index=len(self.events),
            period=self.current_period,
            kind=kind,
            subject=subject,
            qci=qci,
            payload=tuple(payload),
        )
        self.events.append(record)
        return record.index

    def query_events(
        self,
        kind: Optional[EventKind] = None,
        subject: Optional[str] = None,
        period_range: Optional[Tuple[int, int]] = None,
    ) -> List[EventRecord]:
        """Filtered view of the log, ascending index order, filters ANDed.

        ``period_range`` bounds are inclusive on both ends.
        """
        out = []
        for record in self.events:
            if kind is not None and record.kind is not kind:
                continue
            if subject is not None and record.subject != subject:
                continue
            if period_range is not None:
                first, last = period_range
                if not (first <= record.period <= last):
                    continue
            out.append(record)
        return out

    # --- period clock -----------------------------------------------------

    def advance_period(self) -> int:
        self._advance_period()
        self._log("advance_period")
        return self.current_period

    def _advance_period(self) -> int:
        self.current_period += 1
        return self.current_period

    # --- transaction log and digest ----------------------------------------

    def _log(self, op: str, **fields: object) -> None:
        entry = {"op": op}
        entry.update(fields)
        self.txlog.append(entry)

    def attach_contract(self, contract) -> None:
        if contract.id in self.contracts:
            raise DuplicateAddress(f"contract id {contract.id!r} already attached")
        self.contracts[contract.id] = contract

    def canonical_state(self) -> dict:
        """Deterministic, fully sorted representation of the whole world state."""
        return {
            "accounts": {addr: self.balances[addr] for addr in sorted(self.balances)},
            "period": self.current_period,
            "events": [record.to_dict() for record in self.events],
            "contracts": {
                cid: self.contracts[cid].canonical_state()
                for cid in sorted(self.contracts)
            },
        }

    def state_digest(self) -> str:
        blob = json.dumps(
            self.canonical_state(), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def export_txlog(self, path, digest: Optional[str] = None) -> str:
        """Write the tx log as JSON lines; header carries the final digest.

        ``digest`` lets callers reuse an already computed digest of the
        current state instead of recomputing it.
        """
        if digest is None:
            digest = self.state_digest()
        header = {
            "format": TXLOG_FORMAT,
            "version": TXLOG_VERSION,
            "digest": digest,
            "entries": len(self.txlog),
        }
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            fh.writelines(
                json.dumps(entry, sort_keys=True) + "\n" for entry in self.txlog
            )
        return digest
