"""Geometry of the search space.

The search space is the canonical cone of weight vectors

    C = {(a_1, ..., a_m) in Z^m : 1 <= a_1 <= a_2 <= ... <= a_m},

explored by unit steps under the L1 norm.  This module provides the cone
membership test, the step neighbourhood, L1 distances and exact counts of
L1 balls intersected with the cone (used by the reachability bounds) and
with the half-space {x_1 >= 0} (used by their closed-form approximation).

All functions are pure and operate on plain tuples of ints.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

Weights = tuple[int, ...]


def in_cone(p: Weights) -> bool:
    """True iff p is a canonical weight vector: 1 <= p[0] <= ... <= p[-1]."""
    if not p or p[0] < 1:
        return False
    return all(p[i] <= p[i + 1] for i in range(len(p) - 1))


def neighbors(p: Weights) -> list[Weights]:
    """Cone points at L1 distance exactly 1 from p.

    Of the 2m candidate points differing by +-1 in a single coordinate,
    only those satisfying the cone inequalities are kept.  The order is
    fixed: coordinate index ascending, the -1 move before the +1 move.
    """
    m = len(p)
    out: list[Weights] = []
    for i in range(m):
        for delta in (-1, 1):
            v = p[i] + delta
            if v < 1:
                continue
            if i > 0 and v < p[i - 1]:
                continue
            if i < m - 1 and v > p[i + 1]:
                continue
            out.append(p[:i] + (v,) + p[i + 1 :])
    return out


def l1_distance(p: Weights, q: Weights) -> int:
    """Sum of coordinate-wise absolute differences."""
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    return sum(abs(a - b) for a, b in zip(p, q))


def count_ball_cone(center: Weights, radius: int) -> int:
    """Exact number of cone points q with l1_distance(center, q) <= radius.

    Counts by dynamic programming over coordinates: state (index, value of
    the previous coordinate, L1 budget already spent).  Equivalent to direct
    enumeration of the ball, but polynomial in the radius.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    m = len(center)

    @lru_cache(maxsize=None)
    def rec(i: int, prev: int, budget: int) -> int:
        if i == m:
            return 1
        c = center[i]
        lo = max(1, prev, c - budget)
        hi = c + budget
        total = 0
        for v in range(lo, hi + 1):
            total += rec(i + 1, v, budget - abs(v - c))
        return total

    try:
        return rec(0, 1, radius)
    finally:
        rec.cache_clear()


def full_ball_count(dim: int, radius: int) -> int:
    """Number of x in Z^dim with sum |x_i| <= radius (closed form)."""
    if dim < 0 or radius < 0:
        raise ValueError("dim and radius must be >= 0")
    return sum((1 << j) * comb(dim, j) * comb(radius, j) for j in range(min(dim, radius) + 1))


def count_ball_halfspace(dim: int, radius: int) -> int:
    """Number of x in Z^dim with sum |x_i| <= radius and x_1 >= 0.

    Splitting on the sign of x_1 gives the closed form
    (N(dim, radius) + N(dim - 1, radius)) / 2 where N is the full-ball
    count: points with x_1 != 0 pair up under x_1 -> -x_1 and the x_1 = 0
    slice is a full (dim-1)-ball.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return (full_ball_count(dim, radius) + full_ball_count(dim - 1, radius)) // 2
