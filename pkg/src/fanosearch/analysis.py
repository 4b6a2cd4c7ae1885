"""Reachability analysis of search results.

For a point p found by one engine but not the other, the L1 distance D to
the nearest point q of the other engine's found set bounds how many steps
a constant-priority best-first search needs to reach p from q: it must
have expanded every cone point within distance D-2 of q (lower bound) and
will have found p after expanding all points within D-1 (upper bound).
The closed-form approximation of the lower bound counts the half-space
ball instead, which is exact when the coordinates of q are large and
spread out.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from fanosearch.lattice import Weights, count_ball_cone, count_ball_halfspace, l1_distance


@dataclass(frozen=True)
class ReachabilityReport:
    point: Weights
    nearest: Weights
    distance: int
    s_lower: int
    s_upper: int
    p_lower: float
    closest_assumption_holds: bool

    def to_dict(self) -> dict:
        return {
            "weights": list(self.point),
            "nearest": list(self.nearest),
            "distance": self.distance,
            "s_lower": self.s_lower,
            "s_upper": self.s_upper,
            "p_lower": self.p_lower,
            "closest_assumption_holds": self.closest_assumption_holds,
        }


def nearest_distances(
    a_points: Sequence[Weights], b_points: Sequence[Weights], method: str = "scan"
) -> list[tuple[Weights, Weights, int]]:
    """For each p in A, the nearest point of B \\ {p} and its L1 distance.

    method "scan" is a vectorised linear scan; "index" prunes a
    sum-sorted copy of B using |p-q|_1 >= |sum(p) - sum(q)|.  Both are
    exact and must agree.
    """
    if method == "scan":
        return _nearest_scan(a_points, b_points)
    if method == "index":
        return _nearest_index(a_points, b_points)
    raise ValueError(f"unknown method {method!r}")


def _nearest_scan(a_points, b_points) -> list[tuple[Weights, Weights, int]]:
    b_list = [tuple(q) for q in b_points]
    if not b_list:
        raise ValueError("B must be non-empty")
    b_arr = np.asarray(b_list, dtype=np.int64)
    out = []
    for p in a_points:
        p = tuple(p)
        dists = np.abs(b_arr - np.asarray(p, dtype=np.int64)).sum(axis=1)
        order = np.argsort(dists, kind="stable")
        best = None
        for idx in order[:2]:
            if b_list[idx] != p:
                best = (b_list[idx], int(dists[idx]))
                break
        if best is None:
            raise ValueError("B contains only the query point")
        out.append((p, best[0], best[1]))
    return out


def _nearest_index(a_points, b_points) -> list[tuple[Weights, Weights, int]]:
    b_list = sorted((sum(q), tuple(q)) for q in b_points)
    if not b_list:
        raise ValueError("B must be non-empty")
    sums = [s for s, _ in b_list]
    out = []
    for p in a_points:
        p = tuple(p)
        sp = sum(p)
        pos = bisect.bisect_left(sums, sp)
        best_q, best_d = None, None
        lo, hi = pos - 1, pos
        while lo >= 0 or hi < len(b_list):
            lo_gap = sp - sums[lo] if lo >= 0 else None
            hi_gap = sums[hi] - sp if hi < len(b_list) else None
            if best_d is not None:
                if (lo_gap is None or lo_gap >= best_d) and (hi_gap is None or hi_gap >= best_d):
                    break
            if hi_gap is None or (lo_gap is not None and lo_gap <= hi_gap):
                s, q = b_list[lo]
                lo -= 1
            else:
                s, q = b_list[hi]
                hi += 1
            if q == p:
                continue
            d = l1_distance(p, q)
            if best_d is None or d < best_d or (d == best_d and q < best_q):
                best_q, best_d = q, d
        if best_q is None:
            raise ValueError("B contains only the query point")
        out.append((p, best_q, best_d))
    return out


def step_bounds(p: Weights, q: Weights, distance: int) -> tuple[int, int]:
    """Steps needed by a constant-priority search from q to reach p.

    Lower bound: all cone points within distance-2 of q, plus one.  Upper
    bound: all cone points within distance-1.  distance < 2 degenerates to
    (1, 1): adjacent points are found on the first expansion.
    """
    if distance < 2:
        return (1, 1)
    s_lower = count_ball_cone(q, distance - 2) + 1
    s_upper = count_ball_cone(q, distance - 1)
    return (s_lower, s_upper)


def s_lower_approx(distance: int, dim: int) -> int:
    """Half-space approximation of the lower bound: |B(0, D-2) & {x_1 >= 0}| + 1."""
    if distance < 2:
        return 1
    return count_ball_halfspace(dim, distance - 2) + 1


def prob_lower_bound(s: int, s_lower: int, s_upper: int) -> float:
    """Probability that p is found within s steps, linear between the bounds."""
    if not s_lower <= s <= s_upper:
        raise ValueError(f"s={s} outside [{s_lower}, {s_upper}]")
    return (s - (s_lower - 1)) / (s_upper - (s_lower - 1))


def set_partition(
    found_fixed: Iterable[Weights], found_dynamic: Iterable[Weights]
) -> tuple[set[Weights], set[Weights], set[Weights]]:
    """(F only, D only, F intersect D) on canonical weight tuples."""
    f = {tuple(w) for w in found_fixed}
    d = {tuple(w) for w in found_dynamic}
    return (f - d, d - f, f & d)


def build_reports(
    a_points: Sequence[Weights],
    b_points: Sequence[Weights],
    *,
    method: str = "scan",
    with_exact_bounds: bool = True,
    max_bound_distance: int = 25,
) -> list[ReachabilityReport]:
    """Full reachability reports for every point of A against B.

    The exact ball counts grow quickly with the distance, so bounds are
    only computed up to max_bound_distance; beyond that the report carries
    the half-space approximation as the lower bound and s_upper = lower.
    """
    pairs = nearest_distances(a_points, b_points, method=method)
    all_pts = [tuple(w) for w in a_points] + [tuple(w) for w in b_points]
    reports = []
    for p, q, dist in pairs:
        if with_exact_bounds and dist <= max_bound_distance:
            s_lo, s_hi = step_bounds(p, q, dist)
        else:
            # exact ball counts are too slow here; report the half-space
            # approximation and collapse the interval
            s_lo = s_lower_approx(dist, len(p))
            s_hi = s_lo
        closest = all(
            l1_distance(q, x) >= dist for x in all_pts if x != q and x != p
        )
        reports.append(
            ReachabilityReport(
                point=p,
                nearest=q,
                distance=dist,
                s_lower=s_lo,
                s_upper=s_hi,
                p_lower=prob_lower_bound(s_lo, s_lo, s_hi) if s_hi >= s_lo else 1.0,
                closest_assumption_holds=closest,
            )
        )
    return reports


def distance_histogram(reports: Iterable[ReachabilityReport]) -> dict[int, int]:
    hist: dict[int, int] = {}
    for rep in reports:
        hist[rep.distance] = hist.get(rep.distance, 0) + 1
    return dict(sorted(hist.items()))
