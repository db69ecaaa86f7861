"""Power-series layer: density-series coefficients from fugacity-series ones.

Two independent routes to the same coefficients are kept deliberately:

* ``virial_from_mayer`` evaluates the closed multiset formula

      C_k = sum_{n=1..k} (-1)^(n-1) (k-1+n)!/k! *
            sum over {m_i >= 0 : sum m_i = n, sum (i-1) m_i = k}
            prod_i (b_i * i)^(m_i) / m_i!

* ``invert_mayer_oracle`` eliminates the fugacity between the pressure
  series sum b_n z^n and the density series sum n b_n z^n by formal power
  series reversion, then reads the density-series coefficients off the
  pressure-vs-density expansion.

Both routes work with exact rationals when the inputs are rational, so the
formal identity between them can be asserted to machine precision or better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import DomainError, InputError
from . import radii as radii_mod

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class MultisetPartition:
    """Multiplicities m_i (i = 2..k+1) with sum m_i = n, sum (i-1) m_i = k."""

    k: int
    n: int
    m: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(self, "m", dict(self.m))
        if any(i < 2 or i > self.k + 1 for i in self.m):
            raise ValueError("part sizes must lie in 2..k+1")
        if any(v < 0 for v in self.m.values()):
            raise ValueError("multiplicities must be nonnegative")
        if sum(self.m.values()) != self.n:
            raise ValueError("multiplicities must sum to n")
        if sum((i - 1) * v for i, v in self.m.items()) != self.k:
            raise ValueError("weighted multiplicities must sum to k")


@dataclass(frozen=True)
class VirialCoefficients:
    """Density-series coefficients keyed by order, with their provenance."""

    values: Mapping[int, Number]
    source: str = "mayer_transform"

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def coeff(self, k: int) -> Number:
        if k not in self.values:
            raise InputError(f"order-{k} coefficient not present")
        return self.values[k]

    def orders(self):
        return sorted(self.values)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated power series: coefficients by order plus an optional tail bound."""

    coefficients: Mapping[int, float]
    order: int
    tail_bound: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", dict(self.coefficients))

    def evaluate(self, x: float) -> float:
        return math.fsum(c * x ** p for p, c in sorted(self.coefficients.items()))


def _coeff_map(b) -> Dict[int, Number]:
    """Accept a plain mapping or anything with .as_dict() (coefficient tables)."""
    if hasattr(b, "as_dict"):
        return dict(b.as_dict())
    return dict(b)


# ---------------------------------------------------------------------------
# multiset partitions
# ---------------------------------------------------------------------------

def enum_partitions(k: int, n: int) -> Iterator[MultisetPartition]:
    """All multiplicity vectors with sum m_i = n and sum (i-1) m_i = k."""
    if not (1 <= n <= k):
        raise InputError("need 1 <= n <= k")

    def rec(i: int, rem_n: int, rem_k: int, acc: Dict[int, int]):
        if i > k + 1:
            if rem_n == 0 and rem_k == 0:
                yield MultisetPartition(k, n, dict(acc))
            return
        cap = min(rem_n, rem_k // (i - 1))
        for m in range(cap + 1):
            if m:
                acc[i] = m
            yield from rec(i + 1, rem_n - m, rem_k - (i - 1) * m, acc)
            if m:
                acc.pop(i)

    yield from rec(2, n, k, {})


# ---------------------------------------------------------------------------
# multiset transform
# ---------------------------------------------------------------------------

def virial_from_mayer(b, k: int) -> Number:
    """Order-k density-series coefficient from fugacity-series coefficients.

    Needs b_2..b_(k+1).  Combinatorial weights are exact rationals; the
    result is a Fraction when every input coefficient is rational.
    """
    if k < 1:
        raise DomainError("order must be >= 1")
    bm = _coeff_map(b)
    missing = [i for i in range(2, k + 2) if i not in bm]
    if missing:
        raise InputError(f"missing fugacity coefficients: {missing}")
    total = Fraction(0)
    exact = all(isinstance(bm[i], (int, Fraction)) for i in range(2, k + 2))
    for n in range(1, k + 1):
        lead = Fraction(math.factorial(k - 1 + n), math.factorial(k))
        for part in enum_partitions(k, n):
            weight = lead
            prod: Number = 1
            for i, mi in part.m.items():
                prod = prod * (bm[i] * i) ** mi
                weight /= math.factorial(mi)
            term = prod * (weight if exact else float(weight))
            total = total + (term if n % 2 == 1 else -term)
    return total if exact else float(total)


# ---------------------------------------------------------------------------
# formal inversion oracle
# ---------------------------------------------------------------------------

def _poly_mul(a: List[Number], b: List[Number], order: int) -> List[Number]:
    out = [0] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > order:
            continue
        top = min(order - i, len(b) - 1)
        for j in range(top + 1):
            if b[j] != 0:
                out[i + j] += ai * b[j]
    return out


def invert_mayer_oracle(b, k_max: int) -> VirialCoefficients:
    """Density-series coefficients by formal reversion of the density series.

    Reverts rho(z) = sum n b_n z^n to z(rho), composes the pressure series
    sum b_n z^n with it, and reads beta_k = -(k+1)/k times the rho^(k+1)
    pressure coefficient.  Exact in rational arithmetic for rational input.
    """
    if k_max < 1:
        raise DomainError("order must be >= 1")
    bm = _coeff_map(b)
    order = k_max + 1
    missing = [i for i in range(1, order + 1) if i not in bm]
    if missing:
        raise InputError(f"missing fugacity coefficients: {missing}")
    if bm[1] != 1:
        raise InputError("the order-1 fugacity coefficient must equal 1")
    exact = all(isinstance(bm[i], (int, Fraction)) for i in range(1, order + 1))
    conv = (lambda x: Fraction(x)) if exact else float

    c = [0] + [conv(n * bm[n]) for n in range(1, order + 1)]  # rho(z) coefficients
    # reversion: z(rho) = sum a_j rho^j with a_1 = 1/c_1 = 1
    a: List[Number] = [0] * (order + 1)
    a[1] = conv(1)
    for j in range(2, order + 1):
        zpow = [0, *a[1:j]] + [0] * (order - j + 1)  # z(rho) truncated below j
        zpow = zpow[: order + 1]
        acc = [0] * (order + 1)
        power = zpow[:]
        for i in range(2, j + 1):
            power = _poly_mul(power, zpow, order) if i > 2 else _poly_mul(zpow, zpow, order)
            if c[i] != 0:
                for t in range(order + 1):
                    acc[t] += c[i] * power[t]
        a[j] = -acc[j]
    # pressure series composed with z(rho)
    p = [0] * (order + 1)
    power = [0] * (order + 1)
    power[0] = conv(1)
    zser = a[:]
    for n in range(1, order + 1):
        power = _poly_mul(power, zser, order)
        if bm[n] != 0:
            for t in range(order + 1):
                p[t] += conv(bm[n]) * power[t]
    if p[1] != (1 if exact else 1.0):
        resid = p[1] - 1
        if abs(float(resid)) > 1e-12:
            raise InputError("internal inversion check failed: pressure not ~ rho")
    values: Dict[int, Number] = {}
    for k in range(1, k_max + 1):
        coeff = p[k + 1]
        if exact:
            values[k] = -Fraction(k + 1, k) * coeff
        else:
            values[k] = -float(k + 1) / k * coeff
    return VirialCoefficients(values, source="inversion_oracle")


# ---------------------------------------------------------------------------
# exact combinatorial identity
# ---------------------------------------------------------------------------

def combi_identity_check(t: Sequence[int], n: int, k: int) -> Tuple[int, int]:
    """Both sides of the bounded-composition binomial identity, exactly.

    lhs: sum over (l_1..l_n) >= 0 with sum l = n-2 and l_i <= t_i of
    prod C(t_i, l_i);  rhs: C(k-1+n, n-2).  Valid input: t_1 >= 1,
    t_i >= 2 for i >= 2, and sum t_i = n+k-1.
    """
    t = tuple(int(x) for x in t)
    if n < 2 or k < 1:
        raise InputError("need n >= 2 and k >= 1")
    if len(t) != n:
        raise InputError(f"tuple length {len(t)} != n = {n}")
    if t[0] < 1 or any(ti < 2 for ti in t[1:]):
        raise InputError("need t_1 >= 1 and t_i >= 2 for i >= 2")
    if sum(t) != n + k - 1:
        raise InputError(f"tuple must sum to n+k-1 = {n + k - 1}, got {sum(t)}")

    target = n - 2
    lhs = 0

    def rec(i: int, rem: int, prod: int):
        nonlocal lhs
        if i == n:
            if rem == 0:
                lhs += prod
            return
        for li in range(min(rem, t[i]) + 1):
            rec(i + 1, rem - li, prod * math.comb(t[i], li))

    rec(0, target, 1)
    rhs = math.comb(k - 1 + n, n - 2)
    return lhs, rhs


# ---------------------------------------------------------------------------
# free-energy series assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FreeEnergyEstimate:
    """Partial free-energy series with a geometric tail majorant.

    ``certified`` is False when the density exceeds the certified radius (or
    the geometric ratio reaches one); the tail bound is then meaningless and
    set to NaN rather than invented.
    """

    value: float
    tail_bound: float
    certified: bool
    k_max: int
    rho_star: float
    series: PowerSeries = field(repr=False, default=None)


def _teo2_term(k: int, rho: float, beta: float, B: float, cbeta: float,
               a_star: float) -> float:
    bound = radii_mod.ck_bound(k, beta, B, cbeta, a_star).ours
    return bound / (k + 1) * abs(rho) ** (k + 1)


def free_energy_series(
    rho: float,
    coeffs,
    k_max: int,
    beta: float,
    B: float,
    cbeta: float,
) -> FreeEnergyEstimate:
    """Partial sum of sum_k C_k/(k+1) rho^(k+1) with a certified tail bound.

    The tail majorant uses the uniform coefficient bound at the computed
    maximizer a*: successive bound terms shrink at least geometrically with
    ratio |rho| * e^(1+a*) * e^(2 beta B) * C(beta), which is below one for
    |rho| inside the certified radius.
    """
    cm = coeffs.values if isinstance(coeffs, VirialCoefficients) else dict(coeffs)
    missing = [k for k in range(1, k_max + 1) if k not in cm]
    if missing:
        raise InputError(f"missing density-series coefficients: {missing}")
    value = math.fsum(float(cm[k]) / (k + 1) * rho ** (k + 1) for k in range(1, k_max + 1))
    rstar = radii_mod.rho_star(beta, B, cbeta)
    u = math.exp(2.0 * beta * B)
    _, a_star = radii_mod.F_of_u(u)
    ratio = abs(rho) * math.exp(1.0 + a_star) * u * cbeta
    certified = abs(rho) <= rstar and ratio < 1.0
    if rho == 0.0:
        tail = 0.0
        certified = True
    elif certified:
        head = _teo2_term(k_max + 1, rho, beta, B, cbeta, a_star)
        tail = head / (1.0 - ratio)
    else:
        tail = math.nan
    series = PowerSeries(
        {k + 1: float(cm[k]) / (k + 1) for k in range(1, k_max + 1)},
        order=k_max + 1,
        tail_bound=None if not certified else tail,
    )
    return FreeEnergyEstimate(value, tail, certified, k_max, rstar, series)


_EXACT_LOGFACT_MAX = 10 ** 6


def log_factorial(N: int) -> float:
    """ln N! by exact summation up to 1e6, Stirling with corrections beyond."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    if N <= _EXACT_LOGFACT_MAX:
        return math.fsum(math.log(k) for k in range(2, N + 1))
    x = float(N)
    return (
        x * math.log(x) - x + 0.5 * math.log(2.0 * math.pi * x)
        + 1.0 / (12.0 * x) - 1.0 / (360.0 * x ** 3)
    )


def assemble_free_energy(beta: float, rho: Optional[float], N: int, V: float,
                         Q: float) -> float:
    """Finite-volume free energy per volume: -(1/beta)[(1/V) ln(V^N/N!) + Q]."""
    if beta <= 0:
        raise DomainError("beta must be positive")
    if N < 1 or V <= 0:
        raise DomainError("need N >= 1 and V > 0")
    if rho is not None and abs(rho - N / V) > 1e-9 * max(1.0, N / V):
        raise InputError(f"inconsistent density: rho={rho} but N/V={N / V}")
    ideal = (N * math.log(V) - log_factorial(N)) / V
    return -(ideal + Q) / beta
