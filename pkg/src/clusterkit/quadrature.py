"""Gauss-Legendre quadrature utilities.

Two engines live here:

* ``integrate_1d``: composite Gauss-Legendre on [a, b] with mandatory
  breakpoints and mesh-doubling error estimates (used for radial integrals).

* ``gap_quadrature``: nested integration over ordered-gap coordinates for
  translation-invariant, permutation-symmetric n-body integrands in one
  dimension.  A configuration 0 = z_1 < z_2 < ... < z_n is parametrized by
  the gaps t_i = z_{i+1} - z_i, and every pair separation is a window sum
  t_i + ... + t_{j-1}.  Integrands that are piecewise polynomial between the
  surfaces {window sum = radius} (hard cores, square wells) are integrated
  essentially exactly: each nesting level places panel boundaries wherever a
  window sum ending at that level can cross a radius, and the radius set is
  closed under differences so that breakpoint crossings at deeper levels are
  panel boundaries too.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import CapacityError

_MERGE_TOL = 1e-11
_MAX_CLOSURE = 64
_MAX_SUM_CUTS = 256
_MAX_NODES = 80_000_000


@lru_cache(maxsize=None)
def gauss_nodes(q: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(q)
    return (x + 1.0) / 2.0, w / 2.0


def sphere_surface(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2 for d=1, 4*pi for d=3)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


# ---------------------------------------------------------------------------
# 1-D composite quadrature with breakpoints
# ---------------------------------------------------------------------------

def _composite(f, panels: Sequence[Tuple[float, float]], q: int) -> float:
    x, w = gauss_nodes(q)
    total = 0.0
    for a, b in panels:
        h = b - a
        if h <= 0.0:
            continue
        total += h * float(np.dot(f(a + h * x), w))
    return total


def _split_panels(panels):
    out = []
    for a, b in panels:
        m = 0.5 * (a + b)
        out.append((a, m))
        out.append((m, b))
    return out


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    q: int = 12,
    tol: float = 1e-13,
    depth: int = 0,
    max_depth: int = 14,
) -> Tuple[float, float]:
    """Integrate ``f`` (vectorized) over [a, b] with panel edges at breakpoints.

    Starts from panels split at the breakpoints, halves every panel ``depth``
    times, then keeps halving globally until the mesh-doubling difference
    drops below ``tol`` relative to the running value.  Returns the finer
    value and the last doubling difference as the error estimate.
    """
    if b <= a:
        return 0.0, 0.0
    cuts = sorted({float(c) for c in breakpoints if a < c < b})
    edges = [a] + cuts + [b]
    panels = list(zip(edges[:-1], edges[1:]))
    for _ in range(depth):
        panels = _split_panels(panels)
    coarse = _composite(f, panels, q)
    level = depth
    while True:
        panels = _split_panels(panels)
        fine = _composite(f, panels, q)
        err = abs(fine - coarse)
        if err <= tol * max(1.0, abs(fine)) or level >= max_depth:
            return fine, err
        coarse = fine
        level += 1


# ---------------------------------------------------------------------------
# radius-set closures
# ---------------------------------------------------------------------------

def _merge(values, tol=_MERGE_TOL):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def difference_closure(radii: Sequence[float], support: Optional[float] = None):
    """Close a positive radius set under pairwise absolute differences.

    Window-sum breakpoints at one nesting level collide where a window equals
    the difference of two radii, so exactness needs the closed set.
    """
    cur = _merge(r for r in radii if r > _MERGE_TOL)
    while True:
        extra = []
        for i, ri in enumerate(cur):
            for rj in cur[i + 1:]:
                d = rj - ri
                if d > _MERGE_TOL and (support is None or d <= support + _MERGE_TOL):
                    extra.append(d)
        merged = _merge(cur + extra)
        if len(merged) == len(cur):
            return merged
        cur = merged
        if len(cur) > _MAX_CLOSURE:
            raise CapacityError(
                "breakpoint radius closure exceeds %d entries; "
                "use Monte Carlo for this potential" % _MAX_CLOSURE
            )


def sum_closure(radii: Sequence[float], terms: int):
    """All sums of up to ``terms`` radii (with repetition), deduplicated."""
    base = _merge(r for r in radii if r > _MERGE_TOL)
    sums = list(base)
    frontier = list(base)
    for _ in range(terms - 1):
        frontier = _merge(s + r for s in frontier for r in base)
        sums = _merge(sums + frontier)
        if len(sums) > _MAX_SUM_CUTS:
            raise CapacityError("radius sum closure exceeds %d entries" % _MAX_SUM_CUTS)
    return sums


# ---------------------------------------------------------------------------
# nested ordered-gap quadrature
# ---------------------------------------------------------------------------

def pair_window_matrix(points: np.ndarray) -> np.ndarray:
    """Window sums for every vertex pair of [m+1] from gap vectors (P, m).

    Column order matches graphs.vertex_pairs(m + 1): for the pair (i, j) the
    window is t_i + ... + t_{j-1}.
    """
    P, m = points.shape
    cs = np.zeros((P, m + 1))
    np.cumsum(points, axis=1, out=cs[:, 1:])
    cols = []
    for i in range(1, m + 2):
        for j in range(i + 1, m + 2):
            cols.append(cs[:, j - 1] - cs[:, i - 1])
    return np.stack(cols, axis=1)


def _q_schedule(n_gaps: int, boxed: bool, q_offset: int):
    """Per-level node counts: exact for piecewise polynomials of the nested
    integrand degree (n_gaps - m, plus one in box mode)."""
    qs = []
    for m in range(1, n_gaps + 1):
        deg = (n_gaps - m) + (1 if boxed else 0)
        qs.append(max(2, (deg + 2) // 2 + q_offset))
    return qs


def _level_breakpoints(ts, radii, box_cuts, upper):
    """Panel edges for the next gap given the prefix gaps ``ts``."""
    suffix = [0.0]
    acc = 0.0
    for t in reversed(ts):
        acc += t
        suffix.append(acc)
    total = acc
    cand = []
    for r in radii:
        for s in suffix:
            v = r - s
            if _MERGE_TOL < v < upper - _MERGE_TOL:
                cand.append(v)
    for c in box_cuts:
        v = c - total
        if _MERGE_TOL < v < upper - _MERGE_TOL:
            cand.append(v)
    return _merge(cand)


def gap_quadrature(
    weight_fn: Callable[[np.ndarray], np.ndarray],
    n_gaps: int,
    radii: Sequence[float],
    support: Optional[float] = None,
    box_length: Optional[float] = None,
    include_box_factor: bool = False,
    q_offset: int = 0,
    prefix_block: int = 20_000,
) -> float:
    """Integrate weight_fn over gap vectors t in [0, U]^n_gaps.

    ``radii`` must already be difference-closed.  ``support`` truncates every
    gap (integrand vanishes beyond); ``box_length`` restricts the total span
    and, with ``include_box_factor``, multiplies the integrand by
    (box_length - sum t), the free-translation measure of the ordered chain
    in a box.  weight_fn receives an array (P, n_gaps) and returns (P,).
    """
    if support is None and box_length is None:
        raise ValueError("need a support radius or a box length")
    if n_gaps == 0:
        base = float(weight_fn(np.zeros((1, 0)))[0])
        return base * (box_length if include_box_factor else 1.0)
    boxed = box_length is not None
    radii = list(radii)
    box_cuts = []
    if boxed:
        top = box_length
        box_cuts = [box_length]
        if radii:
            for s in sum_closure(radii, n_gaps):
                c = box_length - s
                if c > _MERGE_TOL:
                    box_cuts.append(c)
        box_cuts = _merge(box_cuts)
    qs = _q_schedule(n_gaps, include_box_factor, q_offset)

    est = 1.0
    for m, q in enumerate(qs, start=1):
        est *= (len(radii) * m + len(box_cuts) + 1) * q
    if est > _MAX_NODES:
        raise CapacityError(
            f"nested quadrature would need ~{est:.2e} nodes; "
            "reduce the order or use Monte Carlo"
        )

    # rows: (gaps tuple, accumulated weight); expanded level by level
    rows = [(( ), 1.0)]
    for m in range(1, n_gaps):
        xq, wq = gauss_nodes(qs[m - 1])
        new_rows = []
        for ts, wgt in rows:
            upper = support if support is not None else box_length
            if boxed:
                upper = min(upper, box_length - sum(ts))
            if upper <= _MERGE_TOL:
                continue
            edges = [0.0] + _level_breakpoints(ts, radii, box_cuts, upper) + [upper]
            for a, b in zip(edges[:-1], edges[1:]):
                h = b - a
                if h <= _MERGE_TOL:
                    continue
                for xg, wg in zip(xq, wq):
                    new_rows.append((ts + (a + h * xg,), wgt * h * wg))
        rows = new_rows

    # final level: expand in blocks and reduce immediately
    xq, wq = gauss_nodes(qs[-1])
    partials = []
    for start in range(0, len(rows), prefix_block):
        block = rows[start:start + prefix_block]
        pts = []
        wts = []
        for ts, wgt in block:
            upper = support if support is not None else box_length
            if boxed:
                upper = min(upper, box_length - sum(ts))
            if upper <= _MERGE_TOL:
                continue
            edges = [0.0] + _level_breakpoints(ts, radii, box_cuts, upper) + [upper]
            for a, b in zip(edges[:-1], edges[1:]):
                h = b - a
                if h <= _MERGE_TOL:
                    continue
                for xg, wg in zip(xq, wq):
                    pts.append(ts + (a + h * xg,))
                    wts.append(wgt * h * wg)
        if not pts:
            continue
        pmat = np.asarray(pts)
        warr = np.asarray(wts)
        vals = np.asarray(weight_fn(pmat), dtype=float)
        if include_box_factor:
            vals = vals * (box_length - pmat.sum(axis=1))
        partials.append(float(np.dot(vals, warr)))
    return math.fsum(partials)
