"""Ingestion of the quasismooth terminal classification snapshot.

The classification of quasismooth terminal Fano 4-fold hypersurface
families (11,617 weight systems) seeds the heuristic searches and is the
primary validation gate of the oracle: every row must classify as
terminal and quasismooth.  The snapshot travels as a CSV with header
a1..a6, one family per row; its SHA-256 is recorded whenever it is read.
"""

from __future__ import annotations

import csv
import hashlib
import os
import urllib.request
from dataclasses import dataclass, field

from fanosearch.lattice import Weights, in_cone
from fanosearch.oracle import FanoOracle, Verdict

GRDB_EXPECTED_ROWS = 11_617


@dataclass
class Snapshot:
    path: str
    weights: list[Weights]
    sha256: str

    def __len__(self) -> int:
        return len(self.weights)


@dataclass
class VerifyReport:
    total: int = 0
    counts: dict[str, int] = field(default_factory=dict)
    mismatches: list[tuple[Weights, str]] = field(default_factory=list)

    @property
    def all_quasismooth_terminal(self) -> bool:
        return self.total > 0 and self.counts.get(Verdict.TERMINAL_QUASISMOOTH.value, 0) == self.total


def load_snapshot(
    path: str | os.PathLike,
    expected_rows: int | None = GRDB_EXPECTED_ROWS,
    strict_rows: bool = False,
) -> Snapshot:
    """Read a weight-system CSV (header a1..a6, or a1..aN generally).

    Malformed rows fail with their line number.  A row count different
    from expected_rows warns on stderr, or raises when strict_rows is set.
    """
    path = os.fspath(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.strip():
        raise ValueError(f"{path}: empty snapshot file")
    digest = hashlib.sha256(data).hexdigest()
    weights: list[Weights] = []
    reader = csv.reader(data.decode("utf-8").splitlines())
    header = next(reader)
    if not header or not header[0].lstrip().startswith("a"):
        raise ValueError(f"{path}:1: expected a weight header like a1,...,a6")
    width = len(header)
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise ValueError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
        try:
            w = tuple(int(c) for c in row)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-integer weight: {exc}") from None
        if not in_cone(w):
            raise ValueError(f"{path}:{lineno}: {w} is not a canonical weight vector")
        weights.append(w)
    if expected_rows is not None and len(weights) != expected_rows:
        msg = f"{path}: snapshot has {len(weights)} rows, expected {expected_rows}"
        if strict_rows:
            raise ValueError(msg)
        import sys

        print(f"warning: {msg}", file=sys.stderr)
    return Snapshot(path=path, weights=weights, sha256=digest)


def verify_snapshot(
    snapshot: Snapshot | list[Weights],
    oracle: FanoOracle | None = None,
    mismatch_limit: int = 50,
) -> VerifyReport:
    """Classify every row; the gate passes when all are terminal quasismooth."""
    weights = snapshot.weights if isinstance(snapshot, Snapshot) else snapshot
    oracle = oracle or FanoOracle()
    report = VerifyReport()
    for w in weights:
        verdict = oracle.verdict(w)
        report.total += 1
        report.counts[verdict.value] = report.counts.get(verdict.value, 0) + 1
        if verdict != Verdict.TERMINAL_QUASISMOOTH and len(report.mismatches) < mismatch_limit:
            report.mismatches.append((w, verdict.value))
    return report


def write_snapshot(path: str | os.PathLike, weights: list[Weights]) -> str:
    """Write a weight-system CSV; returns its SHA-256."""
    path = os.fspath(path)
    if not weights:
        raise ValueError("no weight systems to write")
    width = len(weights[0])
    lines = [",".join(f"a{i+1}" for i in range(width))]
    lines += [",".join(str(a) for a in w) for w in weights]
    data = ("\n".join(lines) + "\n").encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(data)
    return hashlib.sha256(data).hexdigest()


def fetch_snapshot(url: str, out_path: str | os.PathLike, timeout: float = 60.0) -> Snapshot:
    """Download a snapshot CSV and validate its shape (requires network)."""
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        data = resp.read()
    with open(out_path, "wb") as fh:
        fh.write(data)
    return load_snapshot(out_path)
