"""Numerical cluster integrals.

``mayer_bn`` evaluates the order-n fugacity-series coefficient

    b_n = (1/V) (1/n!) integral over n box points of
          sum over connected graphs g on [n] of prod_{(i,j) in g} f(x_i - x_j)

with f the bond function of the potential.  Infinite volume pins x_1 = 0 by
translation invariance; a finite box integrates all n points and divides by
the volume.  ``virial_bk_direct`` does the same over two-connected graphs on
[k+1] vertices, giving the order-k density-series coefficient directly.

Quadrature (d = 1) reduces the integral to ordered-gap coordinates: the
graph sum is permutation symmetric, so the integral equals n! times the
ordered-sector integral, and the sector is parametrized by the n-1
consecutive gaps.  The gap integrand is evaluated either through the
alternating-sum table (pure hard cores) or through the subset convolution
that extracts the connected part of the full Boltzmann product.

Monte Carlo (any d, default d = 3) samples the free points in the ball of
radius (n-1) * range around the pinned particle, with radius-stratified
sampling and fixed per-chunk substreams so results are bit-reproducible for
a given (seed, samples, chunk size).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .errors import CapacityError, ConfigError, DomainError, InputError
from .graphs import enum_graphs, ursell_table, vertex_pairs
from .potentials import PairPotential, f_bond_array
from .quadrature import (
    difference_closure,
    gap_quadrature,
    integrate_1d,
    pair_window_matrix,
    sphere_surface,
)

QUADRATURE_MAX_N = 6
MONTE_CARLO_MAX_N = 5
VIRIAL_QUADRATURE_MAX_K = 3
VIRIAL_MC_MAX_K = 2


@dataclass(frozen=True)
class MayerCoefficients:
    """Table of fugacity-series coefficients b_n with error estimates."""

    values: Mapping[int, Tuple[float, float]]
    beta: float
    volume: Optional[float] = None  # None means infinite volume
    method: str = "quadrature"
    seed: Optional[int] = None

    def __post_init__(self):
        vals = dict(self.values)
        vals.setdefault(1, (1.0, 0.0))
        if abs(vals[1][0] - 1.0) > 1e-15:
            raise InputError("b_1 must equal 1")
        if any(e < 0 for _, e in vals.values()):
            raise InputError("error estimates must be nonnegative")
        object.__setattr__(self, "values", vals)

    def coeff(self, n: int) -> float:
        if n not in self.values:
            raise InputError(f"b_{n} not present in this table")
        return self.values[n][0]

    def error(self, n: int) -> float:
        return self.values[n][1]

    def orders(self):
        return sorted(self.values)

    def as_dict(self) -> Dict[int, float]:
        return {n: v for n, (v, _) in self.values.items()}


@dataclass(frozen=True)
class VirialDirect:
    """Directly integrated density-series coefficients beta_k."""

    values: Mapping[int, Tuple[float, float]]
    beta: float
    method: str = "quadrature"
    seed: Optional[int] = None

    def coeff(self, k: int) -> float:
        if k not in self.values:
            raise InputError(f"beta_{k} not present in this table")
        return self.values[k][0]

    def error(self, k: int) -> float:
        return self.values[k][1]

    def as_dict(self) -> Dict[int, float]:
        return {k: v for k, (v, _) in self.values.items()}


# ---------------------------------------------------------------------------
# graph-sum evaluators over pair-separation arrays
# ---------------------------------------------------------------------------

def connected_weight_sum(fvals: np.ndarray, n: int) -> np.ndarray:
    """Sum over connected spanning graphs on [n] of the bond-value products.

    ``fvals`` has one column per vertex pair in graphs.vertex_pairs(n) order.
    Uses the subset identity: the full product over pairs inside S equals the
    sum over partitions of S of connected parts, so the connected part is
    extracted by peeling the component of the smallest element.
    """
    P = fvals.shape[0]
    pairs = vertex_pairs(n)
    col = {e: k for k, e in enumerate(pairs)}
    full = (1 << n) - 1
    ones = np.ones(P)

    # boltz[S] = product of (1 + f_ij) over pairs inside S
    boltz = {0: ones}
    for s in range(1, full + 1):
        top = s.bit_length()  # highest vertex in S (1-based)
        rest = s & ~(1 << (top - 1))
        acc = boltz[rest]
        r = rest
        while r:
            low = r & -r
            v = low.bit_length()
            r ^= low
            acc = acc * (1.0 + fvals[:, col[(v, top)]])
        boltz[s] = acc

    conn = {}
    for s in range(1, full + 1):
        if s & (s - 1) == 0:
            conn[s] = ones
            continue
        low = s & -s
        total = boltz[s].copy()
        # subtract splits: T is the component of the lowest vertex, T proper
        t = (s - 1) & s
        while True:
            if t & low and t != s:
                total = total - conn[t] * boltz[s ^ t]
            if t == 0:
                break
            t = (t - 1) & s
        conn[s] = total
    return conn[full]


def _two_connected_edge_columns(n: int):
    pairs = vertex_pairs(n)
    col = {e: k for k, e in enumerate(pairs)}
    if n == 2:
        return [[col[(1, 2)]]]
    graphs = []
    for g in enum_graphs(n, "two_connected"):
        graphs.append([col[e] for e in sorted(g.edges)])
    return graphs


@lru_cache(maxsize=None)
def _two_connected_columns_cached(n: int):
    return _two_connected_edge_columns(n)


def graph_list_weight_sum(fvals: np.ndarray, edge_columns) -> np.ndarray:
    """Sum over an explicit graph list of bond-value products."""
    total = np.zeros(fvals.shape[0])
    for cols in edge_columns:
        prod = fvals[:, cols[0]].copy()
        for c in cols[1:]:
            prod *= fvals[:, c]
        total += prod
    return total


def _gap_weight_fn(p: PairPotential, beta: float, n: int, graph_class: str):
    """Integrand over gap vectors for the connected / two-connected sum."""
    hard_core_only = p.kind in ("hard_rod", "hard_sphere")
    use_table = hard_core_only and graph_class == "connected"
    if use_table:
        table = ursell_table(n)
        sigma = p.sigma
        npairs = n * (n - 1) // 2
        bits = (1 << np.arange(npairs, dtype=np.int64))

        def weight(points):
            w = pair_window_matrix(points)
            masks = ((w < sigma) @ bits).astype(np.int64)
            return table[masks].astype(float)

        return weight

    if graph_class == "connected":
        def weight(points):
            w = pair_window_matrix(points)
            return connected_weight_sum(f_bond_array(p, beta, w), n)

        return weight

    cols = _two_connected_columns_cached(n)

    def weight(points):
        w = pair_window_matrix(points)
        return graph_list_weight_sum(f_bond_array(p, beta, w), cols)

    return weight


# ---------------------------------------------------------------------------
# quadrature paths
# ---------------------------------------------------------------------------

def _radial_pair_integral(p: PairPotential, beta: float) -> Tuple[float, float]:
    """integral of f over R^d via the radial reduction."""
    d = p.dimension

    def integrand(r):
        return f_bond_array(p, beta, r) * r ** (d - 1)

    val, err = integrate_1d(integrand, 0.0, p.range_radius, breakpoints=p.breakpoints())
    s = sphere_surface(d)
    return s * val, s * err


def _bn_gap_quadrature(
    p: PairPotential, beta: float, n: int, box: Optional[float]
) -> Tuple[float, float]:
    radii = difference_closure(p.breakpoints(), p.range_radius)
    weight = _gap_weight_fn(p, beta, n, "connected")
    support = p.range_radius
    if box is not None and box <= 0:
        raise DomainError("box side must be positive")
    kwargs = dict(
        weight_fn=weight,
        n_gaps=n - 1,
        radii=radii,
        support=support,
        box_length=box,
        include_box_factor=box is not None,
    )
    fine = gap_quadrature(q_offset=1, **kwargs)
    coarse = gap_quadrature(q_offset=0, **kwargs)
    if box is not None:
        fine /= box
        coarse /= box
    return fine, abs(fine - coarse)


def _bk_gap_quadrature(p: PairPotential, beta: float, k: int) -> Tuple[float, float]:
    n = k + 1
    radii = difference_closure(p.breakpoints(), p.range_radius)
    weight = _gap_weight_fn(p, beta, n, "two_connected")
    kwargs = dict(
        weight_fn=weight,
        n_gaps=n - 1,
        radii=radii,
        support=p.range_radius,
    )
    fine = (k + 1) * gap_quadrature(q_offset=1, **kwargs)
    coarse = (k + 1) * gap_quadrature(q_offset=0, **kwargs)
    return fine, abs(fine - coarse)


# ---------------------------------------------------------------------------
# Monte Carlo path
# ---------------------------------------------------------------------------

def _chunk_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[np.uint64(seed), np.uint64(index)]))


def _stratified_ball(rng: np.random.Generator, m: int, d: int, radius: float) -> np.ndarray:
    """m points roughly uniform in the d-ball, radius-stratified per point."""
    if d == 1:
        dirs = rng.choice([-1.0, 1.0], size=(m, 1))
    else:
        dirs = rng.standard_normal((m, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    strata = rng.permutation(m)
    u = (strata + rng.random(m)) / m
    r = radius * u ** (1.0 / d)
    return dirs * r[:, None]


def _run_chunks(fn, nchunks: int, workers: Optional[int]) -> list:
    """Evaluate fn(0..nchunks-1), optionally on a thread pool.

    Results are collected in chunk order, so the reduction is deterministic
    and independent of the worker count.
    """
    if workers is None or workers <= 1 or nchunks < 2:
        return [fn(c) for c in range(nchunks)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(nchunks)))


def _mc_graph_sum(
    p: PairPotential,
    beta: float,
    n: int,
    graph_class: str,
    seed: Optional[int],
    samples: int,
    chunk: int,
    box: Optional[float] = None,
    workers: Optional[int] = None,
) -> Tuple[float, float]:
    if seed is None:
        raise ConfigError("Monte Carlo needs an explicit seed")
    d = p.dimension
    pairs = vertex_pairs(n)
    cols = _two_connected_columns_cached(n) if graph_class == "two_connected" else None
    nchunks = max(2, math.ceil(samples / chunk))
    radius = (n - 1) * p.range_radius
    ball_vol = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * radius ** d

    def one_chunk(c: int) -> float:
        rng = _chunk_generator(seed, c)
        if box is None:
            pts = [np.zeros((chunk, d))]
            for _ in range(n - 1):
                pts.append(_stratified_ball(rng, chunk, d, radius))
            measure = ball_vol ** (n - 1)
        else:
            pts = [rng.random((chunk, d)) * box for _ in range(n)]
            measure = float(box) ** (d * n)
        seps = np.empty((chunk, len(pairs)))
        for idx, (i, j) in enumerate(pairs):
            seps[:, idx] = np.linalg.norm(pts[i - 1] - pts[j - 1], axis=1)
        fv = f_bond_array(p, beta, seps)
        if graph_class == "connected":
            w = connected_weight_sum(fv, n)
        else:
            w = graph_list_weight_sum(fv, cols)
        return float(w.mean()) * measure

    chunk_means = np.asarray(_run_chunks(one_chunk, nchunks, workers))
    value = float(chunk_means.mean())
    err = float(chunk_means.std(ddof=1) / math.sqrt(nchunks))
    return value, err


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def mayer_bn(
    p: PairPotential,
    beta: float,
    n: int,
    volume: Optional[float] = None,
    method: str = "quadrature",
    *,
    seed: Optional[int] = None,
    samples: int = 400_000,
    chunk: int = 20_000,
    workers: Optional[int] = None,
) -> Tuple[float, float]:
    """Order-n fugacity-series coefficient with an error estimate.

    ``volume=None`` is the infinite-volume coefficient (x_1 pinned at the
    origin); a float is the side of a finite box, integrated verbatim and
    divided by the volume.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    if n == 1:
        return 1.0, 0.0
    if n < 1:
        raise DomainError("order must be >= 1")
    if method == "quadrature":
        if n == 2 and (volume is None or p.dimension > 1):
            if volume is not None:
                raise CapacityError("finite-volume quadrature is one-dimensional only")
            val, err = _radial_pair_integral(p, beta)
            return 0.5 * val, 0.5 * err
        if p.dimension != 1:
            raise CapacityError("n >= 3 quadrature is one-dimensional; use monte_carlo")
        if n > QUADRATURE_MAX_N:
            raise CapacityError(f"quadrature capped at n={QUADRATURE_MAX_N}, got {n}")
        return _bn_gap_quadrature(p, beta, n, volume)
    if method == "monte_carlo":
        if n > MONTE_CARLO_MAX_N:
            raise CapacityError(f"Monte Carlo capped at n={MONTE_CARLO_MAX_N}, got {n}")
        val, err = _mc_graph_sum(
            p, beta, n, "connected", seed, samples, chunk, box=volume,
            workers=workers,
        )
        scale = 1.0 / math.factorial(n)
        if volume is not None:
            scale /= float(volume) ** p.dimension
        return val * scale, err * scale
    raise ConfigError(f"unknown method {method!r}")


def mayer_coefficients(
    p: PairPotential,
    beta: float,
    n_max: int,
    volume: Optional[float] = None,
    method: str = "quadrature",
    **kw,
) -> MayerCoefficients:
    values = {1: (1.0, 0.0)}
    for n in range(2, n_max + 1):
        values[n] = mayer_bn(p, beta, n, volume, method, **kw)
    return MayerCoefficients(values, beta=beta, volume=volume, method=method,
                             seed=kw.get("seed"))


def virial_bk_direct(
    p: PairPotential,
    beta: float,
    k: int,
    method: str = "quadrature",
    *,
    seed: Optional[int] = None,
    samples: int = 400_000,
    chunk: int = 20_000,
    workers: Optional[int] = None,
) -> Tuple[float, float]:
    """Order-k density-series coefficient from the two-connected graph sum.

    k = 1 is the plain pair integral (the single edge on two vertices).
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    if k < 1:
        raise DomainError("order must be >= 1")
    if k == 1:
        return _radial_pair_integral(p, beta)
    if method == "quadrature":
        if p.dimension != 1:
            raise CapacityError("k >= 2 quadrature is one-dimensional; use monte_carlo")
        if k > VIRIAL_QUADRATURE_MAX_K:
            raise CapacityError(f"quadrature capped at k={VIRIAL_QUADRATURE_MAX_K}")
        return _bk_gap_quadrature(p, beta, k)
    if method == "monte_carlo":
        if k > VIRIAL_MC_MAX_K:
            raise CapacityError(f"Monte Carlo capped at k={VIRIAL_MC_MAX_K}")
        val, err = _mc_graph_sum(p, beta, k + 1, "two_connected", seed, samples,
                                 chunk, workers=workers)
        scale = 1.0 / math.factorial(k)
        return val * scale, err * scale
    raise ConfigError(f"unknown method {method!r}")


def penrose_bn_bound(n: int, beta: float, B: float, cbeta: float) -> float:
    """Upper bound e^(2 beta B (n-2)) n^(n-2) C^( n-1) / n! on |b_n|."""
    if n < 2:
        raise DomainError("bound defined for n >= 2")
    if B < 0 or cbeta <= 0:
        raise DomainError("need B >= 0 and C(beta) > 0")
    comb = Fraction(n ** (n - 2), math.factorial(n))
    return math.exp(2.0 * beta * B * (n - 2)) * float(comb) * cbeta ** (n - 1)
