"""Append-only proof-of-consent log.

One JSON object per line. Each record carries the SHA-256 of the
previous record's serialized line (the genesis record carries 64
zeros), so any mutation or deletion breaks the chain from that point
on. Appends are fsync'd before returning.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import DataPolicyError

GENESIS_HASH = "0" * 64

SOURCES = ("auto", "user", "negotiated")
OUTCOMES = ("granted", "partial", "denied", "pending")


class ConsentLogError(DataPolicyError):
    pass


@dataclass(frozen=True)
class ConsentRecord:
    ts: str  # ISO-8601 UTC
    origin: str
    cookie_names: tuple[str, ...]
    request_digest: str
    outcome: str
    source: str  # auto | user | negotiated
    prev_hash: str
    agreement_digest: str | None = None
    agreement_turtle: str | None = None  # canonical N-Triples text

    def to_line(self) -> str:
        # key order is part of the hashed byte stream, keep it fixed
        payload = {
            "ts": self.ts,
            "origin": self.origin,
            "cookieNames": list(self.cookie_names),
            "requestDigest": self.request_digest,
            "outcome": self.outcome,
            "source": self.source,
            "prevHash": self.prev_hash,
        }
        if self.agreement_digest is not None:
            payload["agreementDigest"] = self.agreement_digest
        if self.agreement_turtle is not None:
            payload["agreementTurtle"] = self.agreement_turtle
        return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)

    @classmethod
    def from_line(cls, line: str) -> "ConsentRecord":
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConsentLogError(f"unparseable log line: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConsentLogError("log line is not a JSON object")
        # enum fields are validated on read too: a forged tail record has
        # no successor to contradict its hash, but it still has to spell
        # a real outcome and source
        if raw.get("outcome") not in OUTCOMES:
            raise ConsentLogError(f"unknown record outcome: {raw.get('outcome')!r}")
        if raw.get("source") not in SOURCES:
            raise ConsentLogError(f"unknown record source: {raw.get('source')!r}")
        try:
            return cls(
                ts=raw["ts"],
                origin=raw["origin"],
                cookie_names=tuple(raw["cookieNames"]),
                request_digest=raw["requestDigest"],
                outcome=raw["outcome"],
                source=raw["source"],
                prev_hash=raw["prevHash"],
                agreement_digest=raw.get("agreementDigest"),
                agreement_turtle=raw.get("agreementTurtle"),
            )
        except KeyError as exc:
            raise ConsentLogError(f"log line missing field {exc}") from exc


def line_hash(line: str) -> str:
    return hashlib.sha256(line.encode("utf-8")).hexdigest()


class ConsentLog:
    """Serialized appender over a JSONL file."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._tail = GENESIS_HASH
        if self.path.exists():
            for line in self.path.read_text("utf-8").splitlines():
                if line.strip():
                    self._tail = line_hash(line)

    @property
    def tail_hash(self) -> str:
        with self._lock:
            return self._tail

    def append(self, record: ConsentRecord) -> None:
        if record.source not in SOURCES:
            raise ConsentLogError(f"unknown record source: {record.source!r}")
        with self._lock:
            if record.prev_hash != self._tail:
                raise ConsentLogError(
                    f"chain mismatch: record carries prevHash {record.prev_hash}, "
                    f"tail is {self._tail}")
            line = record.to_line()
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._tail = line_hash(line)

    def records(self) -> list[ConsentRecord]:
        if not self.path.exists():
            return []
        return [ConsentRecord.from_line(line)
                for line in self.path.read_text("utf-8").splitlines()
                if line.strip()]


@dataclass(frozen=True)
class ChainReport:
    ok: bool
    length: int
    first_bad_index: int | None = None
    detail: str | None = None


def verify_chain(path: str | os.PathLike) -> ChainReport:
    """Re-hash the file front to back; reports the first record whose
    prevHash does not match (or that fails to parse)."""
    p = Path(path)
    if not p.exists():
        return ChainReport(ok=True, length=0)
    expected = GENESIS_HASH
    count = 0
    for index, line in enumerate(p.read_text("utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            record = ConsentRecord.from_line(line)
        except ConsentLogError as exc:
            return ChainReport(False, count, first_bad_index=index, detail=str(exc))
        if record.prev_hash != expected:
            return ChainReport(
                False, count, first_bad_index=index,
                detail=f"prevHash {record.prev_hash} != expected {expected}")
        expected = line_hash(line)
        count += 1
    return ChainReport(ok=True, length=count)
