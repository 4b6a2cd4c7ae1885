"""Exhaustive sweep and fixed-heuristic best-first search.

Both engines are generic over the reward oracle: anything with a
``verdict(weights) -> Verdict`` method works, which the tests use to drive
them with synthetic reward landscapes.

The fixed search expands the forced seed points first (each expansion
consumes a step), then repeatedly pops the highest-priority queued point.
A freshly seen neighbour gets priority 1 if it is a reward point and half
its parent's priority otherwise; every point enters the queue at most
once, and priorities are never retro-updated.  Ties pop in insertion
order, which makes the constant-priority variant an exact breadth-first
sweep.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Protocol

from fanosearch.lattice import Weights, in_cone, neighbors
from fanosearch.oracle import Verdict
from fanosearch.records import SearchRecord


class RewardOracle(Protocol):
    def verdict(self, weights: Weights) -> Verdict: ...


class PriorityQueue:
    """Max-heap of (point, priority) with FIFO tie-breaking."""

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, Weights]] = []
        self._counter = 0

    def push(self, point: Weights, priority: float) -> None:
        heapq.heappush(self._heap, (-priority, self._counter, point))
        self._counter += 1

    def pop(self) -> tuple[Weights, float]:
        neg, _, point = heapq.heappop(self._heap)
        return point, -neg

    def __len__(self) -> int:
        return len(self._heap)


@dataclass
class EngineResult:
    records: list[SearchRecord]
    steps: int
    queue_exhausted: bool = False
    points_scanned: int = 0
    found_by_verdict: dict[str, int] = field(default_factory=dict)


def fixed_priority(parent_priority: float, is_reward: bool) -> float:
    """Priority of a fresh neighbour: 1 for rewards, else half the parent's."""
    if is_reward:
        return 1.0
    return parent_priority / 2.0


def run_fixed(
    oracle: RewardOracle,
    seeds: list[Weights],
    s_max: int,
    *,
    priority_const: float | None = None,
    fano_index: int = 1,
    run_id: str = "fixed",
    on_record: Callable[[SearchRecord], None] | None = None,
    on_expand: Callable[[Weights, int], None] | None = None,
    stop_at: Weights | None = None,
) -> EngineResult:
    """Best-first search with the halving heuristic (or a constant override).

    Seeds are treated as reward points with priority 1 and expanded first,
    in order; each expansion counts toward the step budget.  Every reward
    point discovered (first generated as a neighbour) is emitted with its
    discovery step and queue priority.  Deterministic: two runs over the
    same inputs produce identical record lists.
    """
    if not seeds:
        raise ValueError("at least one seed point is required")
    seen_verdicts: dict[Weights, Verdict] = {}

    def verdict_of(w: Weights) -> Verdict:
        v = seen_verdicts.get(w)
        if v is None:
            v = oracle.verdict(w)
            seen_verdicts[w] = v
        return v

    enqueued: set[Weights] = set()
    ordered_seeds: list[Weights] = []
    for s in seeds:
        s = tuple(s)
        if s not in enqueued:
            if not in_cone(s):
                raise ValueError(f"seed {s} is not in the cone")
            enqueued.add(s)
            ordered_seeds.append(s)

    queue = PriorityQueue()
    records: list[SearchRecord] = []
    step = 0
    exhausted = False
    seed_pos = 0
    found: dict[str, int] = {}

    while step < s_max:
        if seed_pos < len(ordered_seeds):
            p = ordered_seeds[seed_pos]
            v_p = 1.0
            seed_pos += 1
        elif len(queue):
            p, v_p = queue.pop()
        else:
            exhausted = True
            break
        step += 1
        if on_expand is not None:
            on_expand(p, step)
        for n in neighbors(p):
            if n in enqueued:
                continue
            verdict = verdict_of(n)
            pr = (
                priority_const
                if priority_const is not None
                else fixed_priority(v_p, verdict.is_reward)
            )
            enqueued.add(n)
            queue.push(n, pr)
            if verdict.is_reward:
                rec = SearchRecord(
                    weights=n,
                    degree=sum(n) - fano_index,
                    verdict=verdict.value,
                    step=step,
                    priority=pr,
                    run_id=run_id,
                    engine="fixed",
                )
                records.append(rec)
                found[verdict.value] = found.get(verdict.value, 0) + 1
                if on_record is not None:
                    on_record(rec)
                if stop_at is not None and n == stop_at:
                    return EngineResult(records, step, exhausted, len(seen_verdicts), found)

    return EngineResult(records, step, exhausted, len(seen_verdicts), found)


def cone_points(m: int, max_sum: int, leading: int | None = None) -> Iterator[Weights]:
    """Canonical cone points with coordinate sum <= max_sum, in lex order.

    With `leading` only the points with a_1 = leading are produced, which
    partitions the enumeration for parallel runs.
    """

    def rec(prefix: list[int], lo: int, rem: int) -> Iterator[Weights]:
        if len(prefix) == m:
            yield tuple(prefix)
            return
        slots = m - len(prefix)
        for v in range(lo, rem // slots + 1):
            yield from rec(prefix + [v], v, rem - v)

    if leading is None:
        yield from rec([], 1, max_sum)
    else:
        if leading * m <= max_sum:
            yield from rec([leading], leading, max_sum - leading)


def run_exhaustive(
    oracle: RewardOracle,
    d_max: int,
    dimension: int,
    *,
    fano_index: int = 1,
    leading: int | None = None,
    run_id: str = "exhaustive",
    on_record: Callable[[SearchRecord], None] | None = None,
) -> EngineResult:
    """Classify every cone point of degree <= d_max, in lexicographic order.

    dimension is the hypersurface dimension n; the vectors have n + 2
    coordinates and degree sum(a) - fano_index.  Emits one record per
    terminal point, step = the enumeration index of the point.
    """
    m = dimension + 2
    records: list[SearchRecord] = []
    found: dict[str, int] = {}
    idx = 0
    for w in cone_points(m, d_max + fano_index, leading):
        idx += 1
        verdict = oracle.verdict(w)
        if verdict.is_reward:
            rec = SearchRecord(
                weights=w,
                degree=sum(w) - fano_index,
                verdict=verdict.value,
                step=idx,
                priority=0.0,
                run_id=run_id,
                engine="exhaustive",
            )
            records.append(rec)
            found[verdict.value] = found.get(verdict.value, 0) + 1
            if on_record is not None:
                on_record(rec)
    return EngineResult(records, idx, False, idx, found)


def merge_partitions(parts: Iterable[EngineResult]) -> EngineResult:
    """Merge leading-weight partitions back into the serial enumeration.

    Partitions must be supplied in ascending leading-weight order; local
    step indices are offset by the points scanned in earlier partitions so
    the merged result equals the serial run record for record.
    """
    records: list[SearchRecord] = []
    offset = 0
    steps = 0
    found: dict[str, int] = {}
    for part in parts:
        for rec in part.records:
            records.append(
                SearchRecord(
                    weights=rec.weights,
                    degree=rec.degree,
                    verdict=rec.verdict,
                    step=rec.step + offset,
                    priority=rec.priority,
                    run_id=rec.run_id,
                    engine=rec.engine,
                )
            )
        offset += part.points_scanned
        steps += part.steps
        for k, v in part.found_by_verdict.items():
            found[k] = found.get(k, 0) + v
    return EngineResult(records, steps, False, offset, found)
