import math

import pytest

from clusterkit import tonks
from clusterkit.errors import DomainError
from clusterkit.radii import (
    F_of_u,
    K_star,
    LP_BOUND_DENOMINATOR,
    REFERENCE_A_ZERO_COUPLING,
    ck_bound,
    g_of_u,
    mayer_radius,
    radius_report,
    rho_star,
)

# frozen from an 40-digit Newton refinement of the two stationary points
F1_EXACT = 0.14476699807000783
A_STAR_EXACT = 0.46227975024132334
W_STAR_EXACT = 0.31492305784540605
K_STAR_EXACT = 6.907651697774449


def test_F_at_one():
    F, a = F_of_u(1.0)
    assert F == pytest.approx(F1_EXACT, abs=1e-11)
    assert a == pytest.approx(A_STAR_EXACT, abs=1e-6)
    # the printed approximations
    assert F == pytest.approx(0.1448, abs=5e-4)
    assert a == pytest.approx(0.4627, abs=1e-3)


def test_F_large_u_limit():
    F, _ = F_of_u(1e6)
    assert F == pytest.approx(1.0 / math.e, abs=1e-2)


def test_F_domain():
    with pytest.raises(DomainError):
        F_of_u(0.5)


def test_g_at_one():
    g, w = g_of_u(1.0)
    assert g == pytest.approx(F1_EXACT, abs=1e-11)
    assert w == pytest.approx(W_STAR_EXACT, abs=1e-6)
    # stationarity of the quoted form: 2 e^-w (1 - w) = 1
    assert 2.0 * math.exp(-w) * (1.0 - w) == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("u", [1.0, 2.0, 5.0, 10.0, 100.0])
def test_g_equals_F(u):
    assert g_of_u(u)[0] == pytest.approx(F_of_u(u)[0], abs=1e-10)


def test_K_star():
    closed, series = K_star(1.0)
    assert closed == pytest.approx(K_STAR_EXACT, abs=1e-8)
    assert closed == pytest.approx(1.0 / F_of_u(1.0)[0], rel=1e-12)
    assert abs(closed - series) < 1e-8
    big, _ = K_star(1e6)
    assert big == pytest.approx(math.e, abs=1e-2)


def test_rho_star_examples():
    assert rho_star(1.0, 0.0, 2.0) == pytest.approx(0.0723835, abs=1e-6)
    assert rho_star(1.0, 0.0, 4.0 * math.pi / 3.0) == pytest.approx(0.0345606, abs=1e-6)
    assert rho_star(1.0, 0.0, 4.0) == pytest.approx(rho_star(1.0, 0.0, 2.0) / 2.0,
                                                    rel=1e-12)


def test_mayer_radius_examples():
    assert mayer_radius(1.0, 0.0, 2.0) == pytest.approx(1.0 / (2.0 * math.e), rel=1e-12)
    assert mayer_radius(1.0, 0.0, 4.0 * math.pi / 3.0) == pytest.approx(0.0878247, abs=1e-6)
    # beta B = 0.5 shrinks the radius by e
    assert mayer_radius(0.5, 1.0, 2.0) == pytest.approx(
        mayer_radius(1.0, 0.0, 2.0) / math.e, rel=1e-12)


def test_ck_bound_k1():
    _, a_star = F_of_u(1.0)
    b = ck_bound(1, 1.0, 0.0, 2.0, a_star)
    assert b.ours == pytest.approx(5.732, abs=2e-2)
    assert b.lp == pytest.approx(4.0 / 0.28952, rel=1e-12)
    assert b.ours >= 2.0  # dominates |beta_1| for hard rods
    assert b.base_lp == pytest.approx(2.0 * 2.0 / 0.28952, rel=1e-12)
    assert b.base_ours == pytest.approx(math.exp(1.0 + a_star) * 2.0, rel=1e-12)


def test_reference_arithmetic():
    assert 1.0 / math.exp(1.0 + REFERENCE_A_ZERO_COUPLING) == pytest.approx(
        0.24026, abs=1e-5)
    assert 1.0 / LP_BOUND_DENOMINATOR == pytest.approx(1.0 / 0.28952, rel=1e-15)
    _, a_star = F_of_u(1.0)
    assert 1.0 / math.exp(1.0 + a_star) == pytest.approx(0.2316, abs=1e-3)
    # computed base still beats the comparison constant at u = 1
    assert math.exp(1.0 + a_star) < 2.0 / 0.28952


def test_bound_dominates_tonks_coefficients():
    _, a_star = F_of_u(1.0)
    for k in range(1, 6):
        assert abs(tonks.beta_k_value(k)) <= ck_bound(k, 1.0, 0.0, 2.0, a_star).ours


def test_monotonicity_grid():
    us = [1.0, 2.0, 5.0, 20.0, 100.0, 1e3, 1e4]
    pairs = [F_of_u(u) for u in us]
    Fs = [p[0] for p in pairs]
    As = [p[1] for p in pairs]
    assert all(b > a for a, b in zip(Fs, Fs[1:]))
    assert all(b < a for a, b in zip(As, As[1:]))


def test_radius_report_structure():
    rep = radius_report(1.0, 0.0, 2.0, k_orders=(1, 2, 3))
    assert rep.u == 1.0
    assert rep.F == pytest.approx(rep.g, abs=1e-10)
    assert rep.k_star_closed * rep.F == pytest.approx(1.0, rel=1e-10)
    assert 0.0 < rep.F < 1.0 / math.e
    assert rep.rho_star == pytest.approx(rep.F / (rep.u * rep.cbeta), rel=1e-12)
    assert rep.a_discrepancy_flagged
    d = rep.to_dict()
    assert len(d["bounds"]) == 3
    assert d["a_reference"] == REFERENCE_A_ZERO_COUPLING
