import math

import pytest

from clusterkit import tonks
from clusterkit.canonical import (
    CanonicalResult,
    compare_series_direct,
    q_lambda,
    ztilde_direct,
)
from clusterkit.errors import CapacityError, ConfigError, DomainError, JammedError


def test_ztilde_single_particle(rod):
    res = ztilde_direct(rod, 1.0, 5.0, 1)
    assert res.ztilde == 1.0 and res.error == 0.0


def test_ztilde_closed_examples(rod):
    assert ztilde_direct(rod, 1.0, 10.0, 2, "tonks_closed").ztilde == pytest.approx(0.81)
    assert ztilde_direct(rod, 1.0, 10.0, 3, "tonks_closed").ztilde == pytest.approx(0.512)


def test_ztilde_jammed(rod):
    with pytest.raises(JammedError):
        ztilde_direct(rod, 1.0, 2.0, 4, "tonks_closed")
    with pytest.raises(JammedError):
        tonks.ztilde_closed(4, 3.0)


@pytest.mark.parametrize("N,L", [(2, 10.0), (3, 10.0), (4, 8.0)])
def test_ztilde_quadrature_matches_closed(rod, N, L):
    quad = ztilde_direct(rod, 1.0, L, N, "quadrature")
    assert quad.ztilde == pytest.approx(tonks.ztilde_closed(N, L), rel=1e-6)


def test_ztilde_quadrature_square_well(well):
    # N = 2 closed form: (2/L^2) int_0^L (L-t) e^{-beta V(t)} dt
    L, beta = 10.0, 1.0
    e = math.exp(beta * well.epsilon)
    exact = 2.0 / L ** 2 * (
        e * (L * 0.5 - (1.5 ** 2 - 1.0) / 2.0) + (L - 1.5) ** 2 / 2.0
    )
    got = ztilde_direct(well, beta, L, 2, "quadrature")
    assert got.ztilde == pytest.approx(exact, rel=1e-12)


def test_ztilde_monte_carlo(rod):
    res = ztilde_direct(rod, 1.0, 20.0, 8, "monte_carlo", seed=31, samples=200_000)
    closed = tonks.ztilde_closed(8, 20.0)
    assert abs(res.ztilde - closed) < 3.0 * res.error
    again = ztilde_direct(rod, 1.0, 20.0, 8, "monte_carlo", seed=31, samples=200_000)
    assert res.ztilde == again.ztilde
    pooled = ztilde_direct(rod, 1.0, 20.0, 8, "monte_carlo", seed=31,
                           samples=200_000, workers=3)
    assert res.ztilde == pooled.ztilde


def test_ztilde_method_caps(rod, sphere):
    with pytest.raises(CapacityError):
        ztilde_direct(rod, 1.0, 30.0, 5, "quadrature")
    with pytest.raises(CapacityError):
        ztilde_direct(rod, 1.0, 50.0, 13, "monte_carlo", seed=1)
    with pytest.raises(ConfigError):
        ztilde_direct(sphere, 1.0, 5.0, 3, "tonks_closed")
    with pytest.raises(ConfigError):
        ztilde_direct(rod, 1.0, 30.0, 6, "monte_carlo")  # no seed


def test_q_lambda_values(rod):
    res = ztilde_direct(rod, 1.0, 10.0, 2, "tonks_closed")
    assert q_lambda(res) == pytest.approx(math.log(0.81) / 10.0, rel=1e-12)
    big = ztilde_direct(rod, 1.0, 2000.0, 100, "tonks_closed")
    assert q_lambda(big) == pytest.approx(0.05 * math.log(1 - 99 / 2000.0), rel=1e-12)
    assert q_lambda(big) == pytest.approx(-2.5387e-3, abs=1e-6)


def test_q_lambda_domain():
    bad = CanonicalResult(2, 10.0, 1.0, 0.0, 0.0, "exact")
    with pytest.raises(DomainError):
        q_lambda(bad)


def test_compare_series_direct_passes(rod):
    rep = compare_series_direct(rod, 1.0, 2000.0, 100, 8)
    assert rep.certified
    assert rep.passed
    assert rep.gap <= rep.budget
    assert rep.q_series == pytest.approx(tonks.q_infinite_volume(0.05), abs=1e-8)
    d = rep.to_dict()
    assert d["pass"] and d["N"] == 100


def test_compare_gap_shrinks_with_N(rod):
    rho = 0.05
    gaps = [compare_series_direct(rod, 1.0, N / rho, N, 6).gap
            for N in (50, 100, 200)]
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.05)
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=0.05)


def test_compare_low_density_limit(rod):
    # both sides vanish as rho -> 0; N = 2 probes the smallest system
    rep = compare_series_direct(rod, 1.0, 1e6, 2, 4)
    assert abs(rep.q_direct) < 1e-11
    assert abs(rep.q_series) < 1e-11
    # at N >= 3 the finite-size allowance has real margin and the run passes
    rep4 = compare_series_direct(rod, 1.0, 2e6, 4, 4)
    assert rep4.passed
    assert abs(rep4.q_direct) < 1e-11


def test_compare_uncertified_density(rod):
    rep = compare_series_direct(rod, 1.0, 10.0, 5, 4)  # rho = 0.5 >> radius
    assert not rep.certified
    assert not rep.passed  # FAIL is a report outcome, not an exception


def test_compare_square_well(well):
    rep = compare_series_direct(well, 1.0, 400.0, 4, 4)
    assert rep.certified
    assert rep.passed


def test_repulsive_ztilde_invariant(rod):
    for N, L in ((2, 10.0), (3, 12.0), (4, 9.0)):
        res = ztilde_direct(rod, 1.0, L, N, "quadrature")
        assert 0.0 < res.ztilde <= 1.0
        assert q_lambda(res) <= 0.0
