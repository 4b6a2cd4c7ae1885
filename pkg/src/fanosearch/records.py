"""Search record persistence.

Results are streamed as JSONL: one run-metadata object on the first line
(under the single key "meta"), then one record per line with a fixed key
order so identical runs produce byte-identical payloads:

    {"weights": [...], "degree": int, "verdict": str, "step": int,
     "priority": float, "run_id": str, "engine": str}
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from fanosearch.lattice import Weights


@dataclass(frozen=True)
class SearchRecord:
    weights: Weights
    degree: int
    verdict: str
    step: int
    priority: float
    run_id: str
    engine: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "weights": list(self.weights),
                "degree": self.degree,
                "verdict": self.verdict,
                "step": self.step,
                "priority": self.priority,
                "run_id": self.run_id,
                "engine": self.engine,
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "SearchRecord":
        obj = json.loads(line)
        return cls(
            weights=tuple(obj["weights"]),
            degree=obj["degree"],
            verdict=obj["verdict"],
            step=obj["step"],
            priority=obj["priority"],
            run_id=obj["run_id"],
            engine=obj["engine"],
        )


class RecordWriter:
    """Incremental JSONL writer; each line is flushed as it is written."""

    def __init__(self, path: str | os.PathLike, meta: dict | None = None):
        self.path = os.fspath(path)
        self._fh: IO[str] = open(self.path, "w", encoding="utf-8")
        if meta is not None:
            self._fh.write(json.dumps({"meta": meta}, separators=(",", ":")) + "\n")
            self._fh.flush()

    def write(self, record: SearchRecord) -> None:
        self._fh.write(record.to_json() + "\n")
        self._fh.flush()

    def write_obj(self, obj: dict) -> None:
        self._fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "RecordWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_records(path: str | os.PathLike) -> tuple[dict, list[SearchRecord]]:
    """Read a records JSONL file; returns (meta, records)."""
    meta: dict = {}
    records: list[SearchRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "meta" in obj and "weights" not in obj:
                meta = obj["meta"]
            else:
                records.append(SearchRecord.from_json(line))
    return meta, records


def iter_record_lines(path: str | os.PathLike) -> Iterator[str]:
    """Record lines only (meta stripped), for byte-level comparisons."""
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line and not line.startswith('{"meta"'):
                yield line


def write_records(path: str | os.PathLike, meta: dict, records: Iterable[SearchRecord]) -> None:
    with RecordWriter(path, meta) as writer:
        for rec in records:
            writer.write(rec)
