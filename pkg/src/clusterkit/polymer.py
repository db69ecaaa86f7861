"""Hard-core gas of subsets of [N] with cardinality-dependent activities.

The partition function sums, over collections of pairwise disjoint subsets
of [N] of size >= 2, the product of their activities.  Its logarithm expands
over ordered subset tuples weighted by the alternating connected-subgraph
sum of their intersection graph; this module evaluates both sides exactly at
desk scale, checks the summability criterion

    sum_{m=2..N} e^(a m) |zeta_m| C(N-1, m-1) <= e^a - 1,

and computes the finite-N tree-counting factors

    P(s_1..s_n) = N^-(k+1) * sum over rooted trees on [n] and subset tuples
                  with |R_i| = s_i of [tree is a singleton-preimage tree of
                  the intersection graph],  k = sum s_i - n,

together with the finite-N density-series coefficients built from them.
All combinatorial values are exact rationals; activities may be Fractions
(exact results) or floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Mapping, Sequence, Union

from .errors import CapacityError, InputError
from .graphs import LabeledGraph, penrose_trees, ursell_table, vertex_pairs

Number = Union[int, float, Fraction]

XI_BRUTEFORCE_MAX_N = 8
URSELL_MAX_N = 8
URSELL_MAX_ORDER = 4
P_EXACT_MAX_N = 10
P_EXACT_MAX_PARTS = 3
P_EXACT_MAX_TOTAL = 8
CK_FINITE_MAX_K = 3


@dataclass(frozen=True)
class ActivityProfile:
    """Cardinality-dependent activities zeta_m, m = 2..N (sparse, may be negative)."""

    N: int
    zeta: Mapping[int, Number]

    def __post_init__(self):
        if self.N < 1:
            raise InputError("ground-set size must be >= 1")
        z = {int(m): v for m, v in dict(self.zeta).items() if v != 0}
        bad = [m for m in z if m < 2 or m > self.N]
        if bad:
            raise InputError(f"activity indices {bad} outside 2..{self.N}")
        object.__setattr__(self, "zeta", z)

    @classmethod
    def from_mayer(cls, b, N: int, rho: float) -> "ActivityProfile":
        """Activities induced by fugacity-series coefficients at density rho.

        zeta_s = rho^(s-1) * mu_s with mu_s = b_s s!/N^(s-1); equivalently
        zeta_s = b_s s!/V^(s-1) with V = N/rho.
        """
        bm = b.as_dict() if hasattr(b, "as_dict") else dict(b)
        zeta = {}
        for s, val in bm.items():
            if s < 2 or s > N:
                continue
            zeta[s] = rho ** (s - 1) * val * math.factorial(s) / N ** (s - 1)
        return cls(N, zeta)

    def activity(self, m: int) -> Number:
        return self.zeta.get(m, 0)

    def mu(self, s: int, rho: float) -> float:
        """Density-free part of the activity: zeta_s / rho^(s-1)."""
        return float(self.activity(s)) / rho ** (s - 1)

    def c_rho(self, m: int) -> float:
        """Summability weight |zeta_m| C(N-1, m-1)."""
        return abs(float(self.activity(m))) * math.comb(self.N - 1, m - 1)

    def c_rho_map(self) -> Dict[int, float]:
        return {m: self.c_rho(m) for m in sorted(self.zeta)}


# ---------------------------------------------------------------------------
# exact partition function
# ---------------------------------------------------------------------------

def xi_exact(N: int, profile: ActivityProfile, method: str = "recursion") -> Number:
    """Partition function over disjoint subset families (sizes >= 2).

    ``recursion`` conditions on the polymer containing the largest element:
    Xi_j = Xi_{j-1} + sum_m C(j-1, m-1) zeta_m Xi_{j-m}, Xi_0 = Xi_1 = 1.
    ``bruteforce`` enumerates every family explicitly (N <= 8); both agree
    exactly for exact activities.
    """
    if N < 0:
        raise InputError("N must be nonnegative")
    if method == "recursion":
        xi = [1, 1] + [0] * max(0, N - 1)
        for j in range(2, N + 1):
            acc = xi[j - 1]
            for m, z in profile.zeta.items():
                if m <= j:
                    acc = acc + math.comb(j - 1, m - 1) * z * xi[j - m]
            xi[j] = acc
        return xi[N] if N >= 1 else 1
    if method == "bruteforce":
        if N > XI_BRUTEFORCE_MAX_N:
            raise CapacityError(f"brute force capped at N={XI_BRUTEFORCE_MAX_N}")
        zeta = profile.zeta

        def rec(mask: int) -> Number:
            if mask == 0:
                return 1
            low = mask & -mask
            total = rec(mask ^ low)  # lowest element stays unpolymerized
            rest = mask ^ low
            # any subset of the remaining elements joins the lowest element
            sub = rest
            while True:
                size = bin(sub).count("1") + 1
                if size >= 2 and size in zeta:
                    total = total + zeta[size] * rec(rest ^ sub)
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            return total

        return rec((1 << N) - 1)
    raise InputError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# log-expansion by polymer count
# ---------------------------------------------------------------------------

def log_xi_ursell(N: int, profile: ActivityProfile, n_max: int) -> Dict[int, Number]:
    """Order-by-order terms of log Xi over ordered subset tuples.

    Term n is (1/n!) times the sum over ordered n-tuples of subsets (sizes
    >= 2) of the alternating connected-subgraph sum of their intersection
    graph times the activity product; tuples with disconnected intersection
    graph contribute nothing.  Enumerates unordered multisets and multiplies
    by the number of orderings.
    """
    if N > URSELL_MAX_N:
        raise CapacityError(f"log-expansion brute force capped at N={URSELL_MAX_N}")
    if n_max > URSELL_MAX_ORDER:
        raise CapacityError(f"expansion order capped at {URSELL_MAX_ORDER}")
    zeta = profile.zeta
    sizes = sorted(zeta)
    subsets = []  # (bitmask, activity)
    for m in sizes:
        for combo in itertools.combinations(range(N), m):
            mask = 0
            for c in combo:
                mask |= 1 << c
            subsets.append((mask, zeta[m]))
    terms: Dict[int, Number] = {}
    for n in range(1, n_max + 1):
        table = ursell_table(n)
        pairs = vertex_pairs(n)
        total: Number = 0
        for picks in itertools.combinations_with_replacement(range(len(subsets)), n):
            emask = 0
            for idx, (a, b) in enumerate(pairs):
                if subsets[picks[a - 1]][0] & subsets[picks[b - 1]][0]:
                    emask |= 1 << idx
            phi = int(table[emask])
            if phi == 0:
                continue
            prod: Number = 1
            for i in picks:
                prod = prod * subsets[i][1]
            mult = 1
            for _, grp in itertools.groupby(picks):
                mult *= math.factorial(sum(1 for _ in grp))
            total = total + Fraction(phi, mult) * prod
        terms[n] = total
    return terms


# ---------------------------------------------------------------------------
# summability criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FPCheckResult:
    lhs: float
    rhs: float
    holds: bool


def fp_check(profile: ActivityProfile, a: float) -> FPCheckResult:
    """Evaluate sum_m e^(a m) |zeta_m| C(N-1, m-1) against e^a - 1."""
    if a <= 0:
        raise InputError("the weight parameter a must be positive")
    lhs = math.fsum(
        math.exp(a * m) * profile.c_rho(m) for m in profile.zeta
    )
    rhs = math.expm1(a)
    return FPCheckResult(lhs, rhs, lhs <= rhs)


# ---------------------------------------------------------------------------
# finite-N tree-counting factors
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _penrose_membership(n: int, emask: int) -> frozenset:
    """Singleton-preimage trees of the graph on [n] with edge mask ``emask``."""
    g = LabeledGraph.from_mask(n, emask)
    if not g.is_connected():
        return frozenset()
    return penrose_trees(g, root=1)


def _count_tuples(N: int, s: Sequence[int]) -> int:
    """Count (tree, tuple) incidences with fixed first subset, by symmetry."""
    n = len(s)
    first = frozenset(range(1, s[0] + 1))
    rest_choices = [
        [frozenset(c) for c in itertools.combinations(range(1, N + 1), sz)]
        for sz in s[1:]
    ]
    pairs = vertex_pairs(n)
    count = 0
    for rest in itertools.product(*rest_choices):
        subs = (first,) + rest
        emask = 0
        for idx, (a, b) in enumerate(pairs):
            if subs[a - 1] & subs[b - 1]:
                emask |= 1 << idx
        # every singleton-preimage tree is one of the rooted trees on [n],
        # so the indicator sum over all trees is just the member count
        count += len(_penrose_membership(n, emask))
    return count


def p_exact(N: int, s: Sequence[int]) -> Fraction:
    """Exact tree-counting factor P(s_1..s_n) at ground-set size N.

    Averages, over rooted trees on [n] and ordered subset tuples of the
    prescribed sizes, the indicator that the tree survives as a
    singleton-preimage tree of the intersection graph; normalized by
    N^(k+1) with k = sum(s) - n.  Exact rational.
    """
    s = tuple(int(x) for x in s)
    n = len(s)
    if n < 1:
        raise InputError("need at least one part")
    if any(x < 2 for x in s):
        raise InputError("every part must be >= 2")
    if n > P_EXACT_MAX_PARTS or sum(s) > P_EXACT_MAX_TOTAL or N > P_EXACT_MAX_N:
        raise CapacityError(
            f"exact enumeration capped at n<={P_EXACT_MAX_PARTS}, "
            f"sum(s)<={P_EXACT_MAX_TOTAL}, N<={P_EXACT_MAX_N}"
        )
    if max(s) > N:
        raise InputError("a part exceeds the ground-set size")
    k_plus_1 = sum(s) - n + 1
    if n == 1:
        return Fraction(math.comb(N, s[0]), N ** s[0])
    total = math.comb(N, s[0]) * _count_tuples(N, s)
    return Fraction(total, N ** (k_plus_1))


def p_limit(s: Sequence[int]) -> Fraction:
    """Large-N limit of the tree-counting factor.

    (n-2)! C(k-1+n, n-2) / prod (s_i - 1)! for n >= 2 (k = sum s - n); the
    single-part case is 1/s!.
    """
    s = tuple(int(x) for x in s)
    n = len(s)
    if n < 1 or any(x < 2 for x in s):
        raise InputError("parts must all be >= 2")
    if n == 1:
        return Fraction(1, math.factorial(s[0]))
    k = sum(s) - n
    num = math.factorial(n - 2) * math.comb(k - 1 + n, n - 2)
    den = 1
    for x in s:
        den *= math.factorial(x - 1)
    return Fraction(num, den)


def ck_finite_N(N: int, b, k: int) -> Number:
    """Finite-N density-series coefficient from exact tree-counting factors.

    C_k(N) = sum_{n=1..k} (-1)^(n-1) (k+1)/n! *
             sum over ordered (s_1..s_n), s_i >= 2, sum s = k+n of
             prod b_{s_i} s_i!  *  P(s_1..s_n).

    Converges to the multiset-transform coefficient as N grows, with O(1/N)
    residual.  Exact when the b input is rational.
    """
    if k < 1:
        raise InputError("order must be >= 1")
    if k > CK_FINITE_MAX_K:
        raise CapacityError(f"finite-N coefficients capped at k={CK_FINITE_MAX_K}")
    bm = b.as_dict() if hasattr(b, "as_dict") else dict(b)
    missing = [i for i in range(2, k + 2) if i not in bm]
    if missing:
        raise InputError(f"missing fugacity coefficients: {missing}")
    total: Number = 0
    for n in range(1, k + 1):
        coeff = Fraction(k + 1, math.factorial(n))
        inner: Number = 0
        for s in _compositions(k + n, n):
            prod: Number = 1
            for si in s:
                prod = prod * bm[si] * math.factorial(si)
            inner = inner + prod * p_exact(N, s)
        term = coeff * inner if isinstance(inner, Fraction) else float(coeff) * inner
        total = total + (term if n % 2 == 1 else -term)
    return total


def _compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` integers >= 2 summing to ``total``."""
    if parts == 1:
        if total >= 2:
            yield (total,)
        return
    for first in range(2, total - 2 * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
