"""Weighted-monomial combinatorics.

Everything the terminality oracle needs to know about monomials of a given
weighted degree: existence, capped counting, full enumeration, and the
minimum local weight of a general member's local equation.

Existence questions are answered through *reachability bitsets*: for a set
of weights (coins) the Python int ``R`` has bit t set iff t is a
non-negative integer combination of those coins.  Bitsets for all subsets
of the weight vector are built incrementally and shared across the
well-formedness, quasismoothness and stratum analyses of one vector.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

Weights = tuple[int, ...]

# Above this many k-values x degree cells the min-weight DP switches from
# plain Python to the numpy batch implementation.
_NUMPY_DP_CELLS = 60_000

_INF = float("inf")


def saturate(bits: int, coin: int, limit: int) -> int:
    """Close a sum-bitset under repeated addition of one coin, capped at limit."""
    mask = (1 << (limit + 1)) - 1
    shift = coin
    while shift <= limit:
        bits |= (bits << shift) & mask
        shift <<= 1
    return bits


class ReachTable:
    """Reachable weighted degrees, per subset of the weight vector.

    reach(mask) returns the bitset of degrees t <= limit expressible as
    sums of the weights selected by mask.  Tables are built lazily from
    smaller subsets; one table is meant to live for the analysis of a
    single weight vector.
    """

    def __init__(self, weights: Weights, limit: int):
        self.weights = weights
        self.limit = limit
        self._cache: dict[int, int] = {0: 1}

    def reach(self, mask: int) -> int:
        bits = self._cache.get(mask)
        if bits is None:
            low = mask & (-mask)
            bits = saturate(self.reach(mask ^ low), self.weights[low.bit_length() - 1], self.limit)
            self._cache[mask] = bits
        return bits

    def contains(self, mask: int, t: int) -> bool:
        return 0 <= t <= self.limit and (self.reach(mask) >> t) & 1 == 1

    def count_capped(self, mask: int, t: int, cap: int) -> int:
        """Number of exponent vectors on `mask` of weighted degree t, counted up to cap.

        Depth-first over the selected coordinates with exact bitset pruning,
        so the work is proportional to the number of solutions found (or cap).
        """
        if t < 0 or t > self.limit:
            return 0
        idxs = [i for i in range(len(self.weights)) if (mask >> i) & 1]
        found = 0

        def rec(pos: int, rem: int) -> None:
            nonlocal found
            if found >= cap:
                return
            if pos == len(idxs) - 1:
                # last coordinate must absorb the remainder exactly
                if rem % self.weights[idxs[pos]] == 0:
                    found += 1
                return
            rest_mask = 0
            for j in idxs[pos + 1 :]:
                rest_mask |= 1 << j
            a = self.weights[idxs[pos]]
            rest = self.reach(rest_mask)
            for e in range(rem // a + 1):
                r2 = rem - e * a
                if (rest >> r2) & 1:
                    rec(pos + 1, r2)
                if found >= cap:
                    return

        if idxs:
            rec(0, t)
        elif t == 0:
            found = 1
        return found


def monomial_exists(
    weights: Weights, d: int, support: frozenset[int] | set[int], tag_variable: int | None = None
) -> bool:
    """Is there a monomial of weighted degree d with exponents in `support`?

    With tag_variable j the monomial is x_j times a monomial on the support
    (the shape used by the quasismoothness and stratum tests).
    """
    if not support:
        raise ValueError("support must be non-empty")
    t = d - (weights[tag_variable] if tag_variable is not None else 0)
    if t < 0:
        return False
    table = ReachTable(weights, t)
    mask = 0
    for i in support:
        mask |= 1 << i
    return table.contains(mask, t)


def enumerate_monomials(weights: Weights, d: int, cap: int = 100_000) -> list[tuple[int, ...]]:
    """All exponent vectors m >= 0 with sum m_i * weights[i] == d.

    Output is in ascending lexicographic order of the exponent vector.
    Raises ValueError when more than cap monomials exist.
    """
    m = len(weights)
    table = ReachTable(weights, d) if d >= 0 else None
    out: list[tuple[int, ...]] = []

    def rec(pos: int, rem: int, prefix: tuple[int, ...]) -> None:
        if pos == m - 1:
            if rem % weights[pos] == 0:
                out.append(prefix + (rem // weights[pos],))
                if len(out) > cap:
                    raise ValueError(f"monomial count exceeds cap={cap}")
            return
        rest_mask = ((1 << m) - 1) & ~((1 << (pos + 1)) - 1)
        rest = table.reach(rest_mask)
        for e in range(rem // weights[pos] + 1):
            r2 = rem - e * weights[pos]
            if (rest >> r2) & 1:
                rec(pos + 1, r2, prefix + (e,))

    if d >= 0:
        rec(0, d, ())
    return out


def count_upper_bound(coin_weights: list[int], d: int) -> int:
    """Cheap overestimate of the number of exponent vectors of degree <= d."""
    bound = 1
    for a in coin_weights:
        bound *= 1 + d // a
        if bound > 1 << 62:
            return 1 << 62
    return bound


def enumerate_transverse_exponents(
    table: ReachTable,
    stratum_mask: int,
    transverse: list[int],
    d: int,
    cap: int,
    minimal_only: bool = False,
) -> list[tuple[int, ...]]:
    """Exponent vectors on the transverse coordinates of a stratum's local equation.

    A vector qualifies when its weighted degree can be completed to d by
    the stratum variables alone.  Depth-first with exact reachability
    pruning, so the work is proportional to the number of solutions.
    Raises ValueError beyond cap solutions.

    minimal_only keeps only vectors nu such that no nu - e_j qualifies.
    Every Pareto-minimal vector survives, so minimising any non-negative
    linear cost over the filtered set equals the minimum over the full set.
    """
    weights = table.weights
    rows: list[tuple[int, ...]] = []
    t = len(transverse)
    rest_masks = []
    acc = stratum_mask
    for pos in range(t - 1, -1, -1):
        rest_masks.append(acc)
        acc |= 1 << transverse[pos]
    rest_masks.reverse()  # rest_masks[pos] = stratum + transverse after pos
    stratum_bits = table.reach(stratum_mask)
    limit = table.limit

    def rec(pos: int, rem: int, prefix: tuple[int, ...]) -> None:
        if pos == t:
            if (stratum_bits >> rem) & 1:
                if minimal_only:
                    for j, e in enumerate(prefix):
                        if e:
                            rem_j = rem + weights[transverse[j]]
                            if rem_j <= limit and (stratum_bits >> rem_j) & 1:
                                return
                rows.append(prefix)
                if len(rows) > cap:
                    raise ValueError(f"local monomial count exceeds cap={cap}")
            return
        a = weights[transverse[pos]]
        rest = table.reach(rest_masks[pos])
        for e in range(rem // a + 1):
            r2 = rem - e * a
            if (rest >> r2) & 1:
                rec(pos + 1, r2, prefix + (e,))

    rec(0, d, ())
    return rows


def min_cost_single(coins: list[tuple[int, int]], d: int, r: int, k: int) -> float:
    """Min-cost exact-change for one multiplier k (cost of coin = (k*b) mod r)."""
    inf = _INF
    g = [inf] * (d + 1)
    g[0] = 0.0
    items = [(a, (k * b) % r) for a, b in coins]
    for s in range(1, d + 1):
        best = inf
        for a, c in items:
            if a <= s:
                v = g[s - a] + c
                if v < best:
                    best = v
        g[s] = best
    return g[d]


def min_cost_table(coins: list[tuple[int, int]], d: int, r: int) -> list[list[float]]:
    """Min-cost exact-change table for all multipliers k = 1..r-1 at once.

    coins is a list of (weight, residue) pairs; for multiplier k a coin
    costs (k * residue) mod r.  Entry [k-1][s] is the minimal total cost of
    writing s as a sum of coins, inf when impossible.  Used as
    min-cost[k-1][d] = r * (minimal local weight of the stratum's local
    equation under the k-th character).
    """
    kk = r - 1
    if kk <= 0:
        return []
    if kk * (d + 1) >= _NUMPY_DP_CELLS:
        return _min_cost_numpy(coins, d, r)
    rows: list[list[float]] = []
    for k in range(1, r):
        g = [_INF] * (d + 1)
        g[0] = 0.0
        for s in range(1, d + 1):
            best = _INF
            for a, b in coins:
                if a <= s:
                    c = g[s - a] + (k * b) % r
                    if c < best:
                        best = c
            g[s] = best
        rows.append(g)
    return rows


def _min_cost_numpy(coins: list[tuple[int, int]], d: int, r: int) -> list[list[float]]:
    ks = np.arange(1, r, dtype=np.int64)
    big = np.int64(1) << 60
    g = np.full((r - 1, d + 1), big, dtype=np.int64)
    g[:, 0] = 0
    costs = [(a, (ks * b) % r) for a, b in coins]
    for s in range(1, d + 1):
        acc = None
        for a, c in costs:
            if a > s:
                continue
            cand = g[:, s - a] + c
            acc = cand if acc is None else np.minimum(acc, cand)
        if acc is not None:
            g[:, s] = acc
    out = g.astype(float)
    out[out >= float(big)] = _INF
    return out.tolist()


def local_min_weight(
    r: int,
    residues: list[int],
    weights: Weights,
    d: int,
    patch_index: int,
    k: int = 1,
    stratum: frozenset[int] | set[int] | None = None,
) -> Fraction:
    """Minimal local weight (1/r) * sum m_i * ((k*b_i) mod r) of the local equation.

    The minimum runs over exponent vectors m >= 0 supported off the stratum
    with sum m_i a_i congruent to d modulo the patch weights and total
    weighted degree at most d (the stratum variables, the patch included,
    enter as zero-cost coins that absorb the remaining degree).  Computed by
    exact dynamic programming over degrees; raises ValueError when the local
    equation is empty (degenerate family).
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    if not 1 <= k <= r - 1:
        raise ValueError("k must be in 1..r-1")
    strat = set(stratum) if stratum is not None else {patch_index}
    if patch_index not in strat:
        raise ValueError("patch_index must belong to the stratum")
    transverse = [i for i in range(len(weights)) if i not in strat]
    if len(residues) != len(transverse):
        raise ValueError("residues must match the transverse coordinates")
    coins = [(weights[i], 0) for i in strat]
    coins += [(weights[i], b % r) for i, b in zip(transverse, residues)]
    table = min_cost_table(coins, d, r)
    cost = table[k - 1][d]
    if cost == _INF:
        raise ValueError("no local monomials: degenerate family")
    return Fraction(int(cost), r)
