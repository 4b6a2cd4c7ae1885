"""Terminality oracle for weighted hypersurface families.

Given a weight vector (a_1, ..., a_m) and a Fano index i, the oracle
decides whether the general hypersurface of degree d = sum(a) - i in the
weighted projective space P(a_1, ..., a_m) is a well-formed family whose
general member has at worst terminal singularities, and whether that
member is quasismooth.

The decision walks the toric strata of the ambient space.  A stratum is
cut out by a subset I of the coordinates with r = gcd(a_i : i in I) > 1;
along its open part the general member is either missed entirely, smooth
with a transverse cyclic quotient structure (tested with the
Reid--Shepherd-Barron--Tai inequality), or itself singular inside the
quotient (tested with Mori's criterion evaluated on the local equation).
All arithmetic is exact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from math import gcd

import numpy as np

from fanosearch.lattice import Weights, in_cone
from fanosearch.monomials import (
    ReachTable,
    count_upper_bound,
    enumerate_monomials,
    enumerate_transverse_exponents,
    min_cost_single,
    min_cost_table,
)

# Use numpy for the RST sweep once the group order makes Python loops slow.
_RST_NUMPY_MIN_R = 64
# Build the explicit local-monomial list for diagnostics only below this bound.
_DIAG_ENUM_BOUND = 4096


class Verdict(Enum):
    NOT_WELL_FORMED = "not_well_formed"
    NON_TERMINAL = "non_terminal"
    TERMINAL_QUASISMOOTH = "terminal_qs"
    TERMINAL_NONQUASISMOOTH = "terminal_nonqs"

    @property
    def is_reward(self) -> bool:
        """Reward points of the search: terminal, quasismooth or not."""
        return self in (Verdict.TERMINAL_QUASISMOOTH, Verdict.TERMINAL_NONQUASISMOOTH)


_VERDICT_FROM_CODE = list(Verdict)
_CODE_FROM_VERDICT = {v: i for i, v in enumerate(_VERDICT_FROM_CODE)}


@dataclass(frozen=True)
class SingularityType:
    """Local data 1/r(b_1, ...) of a quotient or hyperquotient point."""

    r: int
    local_weights: tuple[int, ...]
    kind: str  # "quotient" | "hyperquotient"
    equation_residue: int | None = None
    local_monomials: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("quotient", "hyperquotient"):
            raise ValueError(f"unknown singularity kind {self.kind!r}")
        if self.r > 1 and any(not 0 <= b < self.r for b in self.local_weights):
            raise ValueError("local weights must be residues mod r")


@dataclass(frozen=True)
class StratumReport:
    indices: tuple[int, ...]
    singularity: SingularityType | None
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class Classification:
    weights: Weights
    fano_index: int
    degree: int
    verdict: Verdict
    quasismooth: bool
    diagnostics: tuple[StratumReport, ...] = field(default=())


def degree_of(weights: Weights, fano_index: int = 1) -> int:
    """Degree of the family: sum of the weights minus the Fano index."""
    d = sum(weights) - fano_index
    if d < 1:
        raise ValueError(f"sum(weights)={sum(weights)} <= fano_index={fano_index}: not a candidate")
    return d


def rst_terminal(t: SingularityType) -> bool:
    """Reid--Shepherd-Barron--Tai criterion for a quotient singularity.

    Terminal iff (1/r) * sum_i ((k*b_i) mod r) > 1 for every k = 1..r-1;
    vacuously true for r = 1.
    """
    if t.kind != "quotient":
        raise ValueError("rst_terminal expects a quotient singularity")
    return _rst(t.r, t.local_weights)


def _rst(r: int, residues: tuple[int, ...]) -> bool:
    if r <= 1:
        return True
    if r >= _RST_NUMPY_MIN_R:
        return _rst_numpy(r, residues)
    return _rst_python(r, residues)


def _rst_python(r: int, residues: tuple[int, ...]) -> bool:
    for k in range(1, r):
        s = 0
        for b in residues:
            s += (k * b) % r
        if s <= r:
            return False
    return True


def _rst_numpy(r: int, residues: tuple[int, ...]) -> bool:
    ks = np.arange(1, r, dtype=np.int64)
    total = np.zeros(r - 1, dtype=np.int64)
    for b in residues:
        if b:
            total += (ks * b) % r
    return bool(total.min() > r)


def mori_terminal_approx(t: SingularityType) -> bool:
    """Mori's terminality criterion evaluated on the local equation.

    For every k = 1..r-1 the weight of the quotient action must exceed the
    minimal weight of a monomial of the local equation by more than one:

        (1/r) sum_i ((k*b_i) mod r)  -  min_m (1/r) sum_i m_i*((k*b_i) mod r)  >  1.

    r = 1 is a plain hypersurface point and passes.  The monomial set must
    come from a semi-invariant local equation; an empty set means the
    family is degenerate and is rejected with ValueError.
    """
    if t.kind != "hyperquotient":
        raise ValueError("mori_terminal_approx expects a hyperquotient singularity")
    if t.r <= 1:
        return True
    if not t.local_monomials:
        raise ValueError("empty local equation: degenerate family")
    r = t.r
    bs = t.local_weights
    for k in range(1, r):
        costs = [(k * b) % r for b in bs]
        total = sum(costs)
        low = min(sum(m_i * c for m_i, c in zip(m, costs)) for m in t.local_monomials)
        if total - low <= r:
            return False
    return True


def _ambient_well_formed(weights: Weights) -> bool:
    """gcd of every (m-1)-subset of the weights is 1."""
    m = len(weights)
    prefix = [0] * (m + 1)
    for i, a in enumerate(weights):
        prefix[i + 1] = gcd(prefix[i], a)
    suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = gcd(suffix[i + 1], weights[i])
    return all(gcd(prefix[i], suffix[i + 1]) == 1 for i in range(m))


def _quasismooth(table: ReachTable, weights: Weights, d: int) -> bool:
    """Subset criterion for quasismoothness of the general member.

    Every non-empty coordinate subset I must either support a monomial of
    degree d, or admit |I| monomials of the form x_j * (monomial on I) of
    degree d with pairwise distinct j outside I.
    """
    m = len(weights)
    if d in weights:
        return True  # linear cone
    ones = 0
    for i, a in enumerate(weights):
        if a == 1:
            ones |= 1 << i
    for mask in range(1, 1 << m):
        if mask & ones:
            continue  # a weight-1 coordinate makes every degree reachable
        if table.contains(mask, d):
            continue
        size = mask.bit_count()
        tags = 0
        for j in range(m):
            if (mask >> j) & 1:
                continue
            if table.contains(mask, d - weights[j]):
                tags += 1
                if tags >= size:
                    break
        if tags < size:
            return False
    return True


def _stratum_masks(weights: Weights) -> list[tuple[int, int]]:
    """(mask, gcd) for every non-empty coordinate subset with gcd > 1.

    Subsets touching a weight-1 coordinate have gcd 1 and are skipped by
    enumerating submasks of the non-one coordinates only.
    """
    m = len(weights)
    big = 0
    for i, a in enumerate(weights):
        if a > 1:
            big |= 1 << i
    gcds: dict[int, int] = {0: 0}
    out = []
    sub = big
    masks = []
    while sub:
        masks.append(sub)
        sub = (sub - 1) & big
    for mask in reversed(masks):  # ascending order gives parents before children
        low = mask & (-mask)
        g = gcd(gcds[mask ^ low], weights[low.bit_length() - 1])
        gcds[mask] = g
        if g > 1:
            out.append((mask, g))
    out.sort(key=lambda mg: (mg[0].bit_count(), mg[0]))
    return out


# Route choice for the exact minimum: straight DP table when the state
# space is tiny, enumeration of the local equation when its exponent box
# is small, singles-then-batched DP otherwise.
_MORI_TABLE_CELLS = 4_000
_MORI_ENUM_BOUND = 100_000
_MORI_SINGLE_K = 12


def _mori_stratum(
    weights: Weights,
    d: int,
    mask: int,
    r: int,
    transverse: list[int],
    reach: ReachTable,
    collect: bool,
) -> tuple[bool, SingularityType | None, str]:
    """Mori check at the general point of a stratum where X is not quasismooth.

    The local equation's monomials are the exponent vectors on the
    transverse coordinates whose degree can be completed to d by stratum
    variables; the stratum variables themselves enter the degree bookkeeping
    as zero-cost coins.  All routes are exact; they are tried cheapest
    first: a lower-bound prescan (every monomial cost is >= (k*e) mod r by
    semi-invariance of the local equation), then a minimum computed by DP
    table, local-equation enumeration, or single-k DPs with early exit,
    depending on the problem size.
    """
    bs_list = [weights[j] % r for j in transverse]
    e = d % r
    totals = None
    if r < _RST_NUMPY_MIN_R:
        for k in range(1, r):
            total = 0
            for b in bs_list:
                total += (k * b) % r
            if total - (k * e) % r <= r:
                return False, _diag_type(weights, d, mask, r, transverse, collect), "mori fails"
    else:
        bs = np.asarray(bs_list, dtype=np.int64)
        ks = np.arange(1, r, dtype=np.int64)
        cost_table = (ks[:, None] * bs[None, :]) % r  # (k, transverse)
        totals = cost_table.sum(axis=1)
        if np.any(totals - (ks * e) % r <= r):
            return False, _diag_type(weights, d, mask, r, transverse, collect), "mori fails"

    def total_at(k: int) -> int:
        if totals is not None:
            return int(totals[k - 1])
        return sum((k * b) % r for b in bs_list)

    coins = [(weights[i], 0) for i in range(len(weights)) if (mask >> i) & 1]
    coins += [(weights[j], b) for j, b in zip(transverse, bs_list)]

    ok = True
    if (r - 1) * (d + 1) <= _MORI_TABLE_CELLS:
        table = min_cost_table(coins, d, r)
        for k in range(1, r):
            low = table[k - 1][d]
            if low == float("inf"):
                return False, None, "degenerate: empty local equation"
            if total_at(k) - int(low) <= r:
                ok = False
                break
    elif count_upper_bound([weights[j] for j in transverse], d) <= _MORI_ENUM_BOUND:
        rows = enumerate_transverse_exponents(
            reach, mask, transverse, d, _MORI_ENUM_BOUND, minimal_only=True
        )
        if not rows:
            return False, None, "degenerate: empty local equation"
        if len(rows) * r <= 20_000:
            for k in range(1, r):
                costs = [(k * b) % r for b in bs_list]
                total = sum(costs)
                low = min(sum(m_i * c for m_i, c in zip(mon, costs)) for mon in rows)
                if total - low <= r:
                    ok = False
                    break
        else:
            if totals is None:
                bs = np.asarray(bs_list, dtype=np.int64)
                ks = np.arange(1, r, dtype=np.int64)
                cost_table = (ks[:, None] * bs[None, :]) % r
                totals = cost_table.sum(axis=1)
            v = np.asarray(rows, dtype=np.int64)
            for lo in range(0, r - 1, 256):
                chunk = cost_table[lo : lo + 256]
                min_costs = (v @ chunk.T).min(axis=0)
                if np.any(totals[lo : lo + 256] - min_costs <= r):
                    ok = False
                    break
    else:
        limit = r if (r - 1) * (d + 1) <= 60_000 else min(_MORI_SINGLE_K, r - 1) + 1
        for k in range(1, limit):
            low = min_cost_single(coins, d, r, k)
            if low == float("inf"):
                return False, None, "degenerate: empty local equation"
            if total_at(k) - int(low) <= r:
                ok = False
                break
        if ok and limit < r:
            table = min_cost_table(coins, d, r)
            for k in range(limit, r):
                low = table[k - 1][d]
                if total_at(k) - int(low) <= r:
                    ok = False
                    break
    note = "mori passes" if ok else "mori fails"
    return ok, _diag_type(weights, d, mask, r, transverse, collect), note


def _diag_type(
    weights: Weights, d: int, mask: int, r: int, transverse: list[int], collect: bool
) -> SingularityType | None:
    if not collect:
        return None
    mons: tuple[tuple[int, ...], ...] | None = None
    coin_weights = [weights[i] for i in range(len(weights)) if (mask >> i) & 1]
    coin_weights += [weights[j] for j in transverse]
    if count_upper_bound(coin_weights, d) <= _DIAG_ENUM_BOUND:
        full = enumerate_monomials(tuple(weights), d, cap=_DIAG_ENUM_BOUND)
        mons = tuple(sorted({tuple(mon[j] for j in transverse) for mon in full}))
    return SingularityType(
        r=r,
        local_weights=tuple(weights[j] % r for j in transverse),
        kind="hyperquotient",
        equation_residue=d % r,
        local_monomials=mons,
    )


def _analyze(weights: Weights, fano_index: int, collect: bool) -> Classification:
    m = len(weights)
    dim_x = m - 2
    diags: list[StratumReport] = []
    total = sum(weights)
    if total <= fano_index:
        return Classification(weights, fano_index, 0, Verdict.NOT_WELL_FORMED, False, ())
    d = total - fano_index

    def done(verdict: Verdict, qs: bool = False) -> Classification:
        return Classification(weights, fano_index, d, verdict, qs, tuple(diags))

    if not _ambient_well_formed(weights):
        if collect:
            diags.append(StratumReport((), None, False, "ambient space not well-formed"))
        return done(Verdict.NOT_WELL_FORMED)

    table = ReachTable(weights, d)
    full_mask = (1 << m) - 1
    if not table.contains(full_mask, d):
        if collect:
            diags.append(StratumReport((), None, False, "no monomials of the family degree"))
        return done(Verdict.NOT_WELL_FORMED)

    strata = _stratum_masks(weights)

    # Well-formedness of the family: X must meet the singular locus of the
    # ambient space in codimension >= 2.  A singleton stratum is the
    # coordinate point, on X exactly when no pure power has the family degree.
    for mask, _r in strata:
        size = mask.bit_count()
        dim_xp = size - 2 if table.contains(mask, d) else size - 1
        if dim_xp >= 0 and dim_xp >= dim_x - 1:
            if collect:
                idxs = tuple(i for i in range(m) if (mask >> i) & 1)
                diags.append(
                    StratumReport(idxs, None, False, "meets singular locus in codimension <= 1")
                )
            return done(Verdict.NOT_WELL_FORMED)

    qs = _quasismooth(table, weights, d)

    failed = False
    for mask, r in strata:
        idxs = tuple(i for i in range(m) if (mask >> i) & 1)
        size = len(idxs)
        has_mon = table.contains(mask, d)

        if size >= 2:
            dim_xp = size - 2 if has_mon else size - 1
            if dim_xp >= 0 and dim_xp >= dim_x - 2:
                failed = True
                if collect:
                    diags.append(StratumReport(idxs, None, False, "singular in codimension <= 2"))
                    continue
                break

        if has_mon:
            if size == 1:
                if collect:
                    diags.append(StratumReport(idxs, None, True, "coordinate point off X"))
                continue
            if table.count_capped(mask, d, 2) == 1:
                if collect:
                    diags.append(StratumReport(idxs, None, True, "general X misses open stratum"))
                continue
            transverse = [j for j in range(m) if not (mask >> j) & 1]
            sing = SingularityType(r, tuple(weights[j] % r for j in transverse), "quotient")
            ok = _rst(r, sing.local_weights)
        else:
            tags = [
                j
                for j in range(m)
                if not (mask >> j) & 1 and table.contains(mask, d - weights[j])
            ]
            transverse = [j for j in range(m) if not (mask >> j) & 1]
            if tags:
                reduced = tuple(weights[j] % r for j in transverse if j != tags[0])
                sing = SingularityType(r, reduced, "quotient")
                ok = _rst(r, reduced)
            else:
                ok, sing, note = _mori_stratum(weights, d, mask, r, transverse, table, collect)
                if not ok:
                    failed = True
                if collect:
                    diags.append(StratumReport(idxs, sing, ok, note))
                    continue
                if failed:
                    break
                continue
        if collect:
            diags.append(StratumReport(idxs, sing, ok, "rst" if ok else "rst fails"))
        if not ok:
            failed = True
            if not collect:
                break

    if failed:
        return done(Verdict.NON_TERMINAL, qs)
    return done(
        Verdict.TERMINAL_QUASISMOOTH if qs else Verdict.TERMINAL_NONQUASISMOOTH, qs
    )


def is_well_formed(weights: Weights, d: int | None = None, fano_index: int = 1) -> bool:
    """Well-formedness of the family X_d in P(weights).

    Checks (a) every (m-1)-subset of the weights has gcd 1 and (b) the
    general member meets the singular locus of the ambient space in
    codimension >= 2, stratum by stratum.
    """
    m = len(weights)
    if d is None:
        d = degree_of(weights, fano_index)
    if not _ambient_well_formed(weights):
        return False
    table = ReachTable(weights, d)
    if not table.contains((1 << m) - 1, d):
        return False
    dim_x = m - 2
    for mask, _r in _stratum_masks(weights):
        size = mask.bit_count()
        dim_xp = size - 2 if table.contains(mask, d) else size - 1
        if dim_xp >= 0 and dim_xp >= dim_x - 1:
            return False
    return True


def is_quasismooth(weights: Weights, d: int | None = None, fano_index: int = 1) -> bool:
    """Quasismoothness of the general member (subset criterion)."""
    if d is None:
        d = degree_of(weights, fano_index)
    return _quasismooth(ReachTable(weights, d), weights, d)


def classify(weights: Weights, fano_index: int = 1, diagnostics: bool = True) -> Classification:
    """Full classification of a weight vector with per-stratum diagnostics."""
    weights = tuple(weights)
    if not in_cone(weights):
        raise ValueError(f"{weights} is not a canonical weight vector")
    return _analyze(weights, fano_index, collect=diagnostics)


class FanoOracle:
    """Memoizing verdict oracle, the reward function of the searches.

    Verdicts are cached in a dict keyed by the packed weight vector; the
    cache may optionally be spilled to / warmed from a text file so the
    costly classifications survive across runs.  The evaluation counter
    counts real classifications, not cache hits.  Classification is pure,
    and the cache is a plain dict (atomic reads/inserts under the GIL), so
    concurrent batch classification is safe; a duplicated evaluation on a
    race is harmless.
    """

    def __init__(
        self,
        fano_index: int = 1,
        cache_path: str | os.PathLike | None = None,
        memoize: bool = True,
    ):
        self.fano_index = fano_index
        self.cache_path = os.fspath(cache_path) if cache_path else None
        # memoize=False streams verdicts without retaining them: exhaustive
        # sweeps touch each point once and would otherwise hold tens of
        # millions of cache entries
        self.memoize = memoize or bool(self.cache_path)
        self._cache: dict[int, int] = {}
        self.evaluations = 0
        self.lookups = 0
        if self.cache_path and os.path.exists(self.cache_path):
            self.load_cache(self.cache_path)

    @staticmethod
    def _pack(weights: Weights) -> int:
        key = 0
        for a in weights:
            key = (key << 24) | a
        return key

    def verdict(self, weights: Weights) -> Verdict:
        self.lookups += 1
        key = self._pack(weights)
        code = self._cache.get(key)
        if code is None:
            self.evaluations += 1
            code = _CODE_FROM_VERDICT[_analyze(weights, self.fano_index, collect=False).verdict]
            if self.memoize:
                self._cache[key] = code
        return _VERDICT_FROM_CODE[code]

    def is_reward(self, weights: Weights) -> bool:
        return self.verdict(weights).is_reward

    def classification(self, weights: Weights) -> Classification:
        """Uncached full classification with diagnostics."""
        return classify(weights, self.fano_index, diagnostics=True)

    def __len__(self) -> int:
        return len(self._cache)

    def load_cache(self, path: str | os.PathLike) -> int:
        n = 0
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                *ws, code = line.split(",")
                self._cache[self._pack(tuple(int(w) for w in ws))] = int(code)
                n += 1
        return n

    def save_cache(self, path: str | os.PathLike | None = None) -> int:
        path = os.fspath(path) if path else self.cache_path
        if not path:
            raise ValueError("no cache path configured")
        tmp = f"{path}.tmp"
        n = 0
        with open(tmp, "w", encoding="utf-8") as fh:
            for key, code in self._cache.items():
                ws = []
                k = key
                while k:
                    ws.append(k & 0xFFFFFF)
                    k >>= 24
                fh.write(",".join(str(w) for w in reversed(ws)) + f",{code}\n")
                n += 1
        os.replace(tmp, path)
        return n
