"""Radial pair potentials, bond functions, and the interaction volume C(beta).

A potential carries a declared stability constant B (the constant in the
lower bound U >= -B*N on configuration energies).  B is a *declared* field:
purely repulsive potentials get B = 0 automatically, while a square well
needs an explicit value because the optimal constant depends on packing
geometry (a safe d-dimensional choice is half the well depth times the
number of well-range neighbors a close packing allows, e.g. B = epsilon in
d = 1 where at most two rods sit inside each other's well).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

import numpy as np

from .errors import ConfigError, DivergenceError, DomainError
from .quadrature import integrate_1d, sphere_surface

KINDS = ("hard_rod", "hard_sphere", "square_well", "custom_tabulated")


@dataclass(frozen=True)
class PairPotential:
    """A radial pair interaction with core diameter ``sigma``.

    kind:
      hard_rod          infinite core in d = 1, zero beyond sigma
      hard_sphere       infinite core in d >= 1, zero beyond sigma
      square_well       infinite core, depth -epsilon on (sigma, lambda_w*sigma)
      custom_tabulated  linear interpolation of (r, V) samples inside a finite
                        cutoff radius, zero beyond
    """

    kind: str
    sigma: float
    dimension: int
    epsilon: float = 0.0
    lambda_w: float = 0.0
    B: Optional[float] = None
    table: Tuple[Tuple[float, float], ...] = ()
    cutoff: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown potential kind {self.kind!r}; want one of {KINDS}")
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")
        if self.dimension < 1:
            raise ConfigError("dimension must be a positive integer")
        if self.kind == "hard_rod" and self.dimension != 1:
            raise ConfigError("hard_rod is one-dimensional; use hard_sphere for d > 1")
        if self.kind == "square_well":
            if self.lambda_w <= 1.0:
                raise ConfigError("square_well needs well width ratio lambda_w > 1")
            if self.epsilon < 0:
                raise ConfigError("square_well well depth epsilon must be >= 0")
            if self.B is None:
                raise ConfigError(
                    "square_well needs an explicit stability constant B "
                    "(e.g. half the maximal well-neighbor count times epsilon)"
                )
        if self.kind == "custom_tabulated":
            if not self.table:
                raise ConfigError("custom_tabulated needs (r, V) samples")
            rs = [r for r, _ in self.table]
            if any(b <= a for a, b in zip(rs, rs[1:])):
                raise ConfigError("table radii must be strictly increasing")
            if self.cutoff is None:
                raise ConfigError("custom_tabulated needs an explicit finite cutoff radius")
        if self.B is None:
            object.__setattr__(self, "B", 0.0)
        if self.B < 0:
            raise ConfigError("stability constant B must be >= 0")

    # -- shape queries ------------------------------------------------------

    @property
    def range_radius(self) -> float:
        """Radius beyond which the potential (and the bond function) vanishes."""
        if self.kind == "square_well":
            return self.lambda_w * self.sigma
        if self.kind == "custom_tabulated":
            return float(self.cutoff)
        return self.sigma

    def breakpoints(self) -> Tuple[float, ...]:
        """Radii where the bond function jumps or kinks."""
        if self.kind == "square_well":
            return (self.sigma, self.lambda_w * self.sigma)
        if self.kind == "custom_tabulated":
            knots = [r for r, _ in self.table if 0 < r < self.cutoff]
            return tuple(sorted(set(knots) | {self.cutoff}))
        return (self.sigma,)

    @property
    def piecewise_constant_bond(self) -> bool:
        """True when e^(-beta V) - 1 is piecewise constant in r."""
        return self.kind in ("hard_rod", "hard_sphere", "square_well")

    @property
    def is_nonnegative(self) -> bool:
        """True when V >= 0 everywhere (purely repulsive; B = 0 suffices)."""
        if self.kind in ("hard_rod", "hard_sphere"):
            return True
        if self.kind == "square_well":
            return self.epsilon == 0.0
        return all(v >= 0.0 for _, v in self.table)

    def value(self, r: float) -> float:
        """Potential value at separation r (math.inf inside the hard core)."""
        r = abs(r)
        if self.kind in ("hard_rod", "hard_sphere"):
            return math.inf if r < self.sigma else 0.0
        if self.kind == "square_well":
            if r < self.sigma:
                return math.inf
            if r < self.lambda_w * self.sigma:
                return -self.epsilon
            return 0.0
        if r >= self.cutoff:
            return 0.0
        rs = [p[0] for p in self.table]
        vs = [p[1] for p in self.table]
        if r <= rs[0]:
            return vs[0]
        return float(np.interp(r, rs, vs))


@dataclass(frozen=True)
class ThermoState:
    """Inverse temperature plus optional box side and particle count."""

    beta: float
    L: Optional[float] = None
    N: Optional[int] = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ConfigError("beta must be positive")
        if self.L is not None and self.L <= 0:
            raise ConfigError("box side L must be positive")
        if self.N is not None and self.N < 1:
            raise ConfigError("particle count N must be >= 1")

    def density(self, dimension: int = 1) -> float:
        if self.L is None or self.N is None:
            raise ConfigError("density needs both L and N")
        return self.N / self.L ** dimension


# ---------------------------------------------------------------------------
# bond function
# ---------------------------------------------------------------------------

def f_bond(p: PairPotential, beta: float, x) -> float:
    """e^(-beta V(x)) - 1 at separation ``x`` (vector or radius).

    Inside a hard core the value is exactly -1.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    if isinstance(x, (list, tuple, np.ndarray)):
        r = float(np.linalg.norm(np.asarray(x, dtype=float)))
    else:
        r = abs(float(x))
    v = p.value(r)
    if math.isinf(v):
        return -1.0
    return math.expm1(-beta * v)


def f_bond_array(p: PairPotential, beta: float, r: np.ndarray) -> np.ndarray:
    """Vectorized bond function over an array of separations."""
    r = np.abs(np.asarray(r, dtype=float))
    if p.kind in ("hard_rod", "hard_sphere"):
        return np.where(r < p.sigma, -1.0, 0.0)
    if p.kind == "square_well":
        well = math.expm1(beta * p.epsilon)
        out = np.zeros_like(r)
        out[r < p.lambda_w * p.sigma] = well
        out[r < p.sigma] = -1.0
        return out
    rs = np.array([q[0] for q in p.table])
    vs = np.array([q[1] for q in p.table])
    v = np.interp(r, rs, vs, left=vs[0], right=0.0)
    v = np.where(r >= p.cutoff, 0.0, v)
    return np.expm1(-beta * v)


def c_beta(p: PairPotential, beta: float, tol: float = 1e-12) -> Tuple[float, float]:
    """Interaction volume: integral of |e^(-beta V(x)) - 1| over R^d.

    Computed radially as surface(d) * integral of r^(d-1) |f(r)| dr with the
    potential's discontinuity radii as quadrature breakpoints.  Returns the
    value and a mesh-doubling error estimate.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    top = p.range_radius
    if not math.isfinite(top):
        raise DivergenceError("potential support is not finite; C(beta) undefined here")
    d = p.dimension

    def integrand(r):
        return np.abs(f_bond_array(p, beta, r)) * r ** (d - 1)

    val, err = integrate_1d(integrand, 0.0, top, breakpoints=p.breakpoints(), tol=tol)
    s = sphere_surface(d)
    return s * val, s * err


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {"kind", "sigma", "epsilon", "lambda_w", "B", "dimension", "table", "cutoff"}


def potential_from_config(cfg: Mapping) -> PairPotential:
    """Build a potential from a flat config mapping, rejecting unknown keys."""
    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown potential config key(s): {', '.join(unknown)}")
    if "kind" not in cfg:
        raise ConfigError("potential config needs a 'kind'")
    kind = cfg["kind"]
    if kind not in KINDS:
        raise ConfigError(f"unknown potential kind {kind!r}; want one of {KINDS}")
    if "sigma" not in cfg:
        raise ConfigError("potential config needs 'sigma'")
    if kind != "custom_tabulated" and ("table" in cfg or "cutoff" in cfg):
        raise ConfigError("'table'/'cutoff' are only valid for custom_tabulated")
    kwargs = dict(
        kind=kind,
        sigma=float(cfg["sigma"]),
        dimension=int(cfg.get("dimension", 1)),
        epsilon=float(cfg.get("epsilon", 0.0)),
        lambda_w=float(cfg.get("lambda_w", 0.0)),
        B=float(cfg["B"]) if "B" in cfg and cfg["B"] is not None else None,
    )
    if kind == "custom_tabulated":
        kwargs["table"] = tuple((float(r), float(v)) for r, v in cfg["table"])
        kwargs["cutoff"] = float(cfg["cutoff"])
    return PairPotential(**kwargs)
