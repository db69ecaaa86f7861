import math

import numpy as np
import pytest

from clusterkit.errors import ConfigError, DivergenceError
from clusterkit.potentials import (
    PairPotential,
    ThermoState,
    c_beta,
    f_bond,
    f_bond_array,
    potential_from_config,
)


def test_f_bond_hard_rod(rod):
    assert f_bond(rod, 1.0, 0.5) == -1.0
    assert f_bond(rod, 1.0, 2.0) == 0.0
    assert f_bond(rod, 3.7, -0.25) == -1.0  # sign of the separation is irrelevant


def test_f_bond_square_well(well):
    assert f_bond(well, 1.0, 1.2) == pytest.approx(math.e - 1.0, rel=1e-15)
    assert f_bond(well, 1.0, 0.3) == -1.0
    assert f_bond(well, 1.0, 1.6) == 0.0


def test_f_bond_vector_argument(sphere):
    assert f_bond(sphere, 1.0, (0.3, 0.4, 0.0)) == -1.0  # |x| = 0.5 < sigma
    assert f_bond(sphere, 1.0, (1.0, 1.0, 1.0)) == 0.0


def test_f_bond_array_matches_scalar(well):
    rs = np.linspace(0.0, 2.0, 41)
    arr = f_bond_array(well, 1.3, rs)
    for r, v in zip(rs, arr):
        assert v == pytest.approx(f_bond(well, 1.3, float(r)), abs=1e-15)


def test_c_beta_hard_rod(rod):
    val, err = c_beta(rod, 0.7)
    assert val == pytest.approx(2.0, rel=1e-12)
    assert err < 1e-10


def test_c_beta_hard_sphere(sphere):
    val, err = c_beta(sphere, 2.0)
    assert val == pytest.approx(4.0 * math.pi / 3.0, rel=1e-12)


def test_c_beta_square_well(well):
    val, err = c_beta(well, 1.0)
    assert val == pytest.approx(2.0 + (math.e - 1.0), rel=1e-12)


def test_c_beta_monotone_in_beta(well, rod):
    vals = [c_beta(well, b)[0] for b in (0.25, 0.5, 1.0, 2.0)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    rod_vals = [c_beta(rod, b)[0] for b in (0.5, 1.0, 2.0)]
    assert max(rod_vals) - min(rod_vals) < 1e-12


def test_c_beta_tabulated_matches_analytic():
    # V rises linearly from 1 to 0 on [0, 1]: integral of |e^-V - 1| doable
    pot = PairPotential("custom_tabulated", 0.5, 1,
                        table=((0.0, 1.0), (1.0, 0.0)), cutoff=1.0)
    val, err = c_beta(pot, 1.0)
    # |f| = 1 - e^{-(1-r)}; integral over (0,1) is e^{-1}, doubled for d=1
    assert val == pytest.approx(2.0 * math.exp(-1.0), rel=1e-10)
    assert err <= 1e-8


def test_stability_constant_rules():
    assert PairPotential("hard_rod", 1.0, 1).B == 0.0
    with pytest.raises(ConfigError):
        PairPotential("square_well", 1.0, 1, epsilon=1.0, lambda_w=1.5)  # no B
    with pytest.raises(ConfigError):
        PairPotential("square_well", 1.0, 1, epsilon=1.0, lambda_w=0.9, B=1.0)
    with pytest.raises(ConfigError):
        PairPotential("hard_rod", -1.0, 1)
    with pytest.raises(ConfigError):
        PairPotential("hard_rod", 1.0, 3)


def test_tabulated_validation():
    with pytest.raises(ConfigError):
        PairPotential("custom_tabulated", 1.0, 1, table=(), cutoff=2.0)
    with pytest.raises(ConfigError):
        PairPotential("custom_tabulated", 1.0, 1,
                      table=((0.0, 1.0), (0.0, 2.0)), cutoff=2.0)
    with pytest.raises(ConfigError):
        PairPotential("custom_tabulated", 1.0, 1, table=((0.0, 1.0),))


def test_c_beta_divergence_guard():
    pot = PairPotential("custom_tabulated", 1.0, 1,
                        table=((0.0, 1.0), (1.0, 0.5)), cutoff=math.inf)
    with pytest.raises(DivergenceError):
        c_beta(pot, 1.0)


def test_config_loader():
    pot = potential_from_config({"kind": "square_well", "sigma": 1.0,
                                 "epsilon": 0.5, "lambda_w": 2.0, "B": 0.5,
                                 "dimension": 1})
    assert pot.lambda_w == 2.0
    with pytest.raises(ConfigError, match="color"):
        potential_from_config({"kind": "hard_rod", "sigma": 1.0, "color": "red"})
    with pytest.raises(ConfigError):
        potential_from_config({"sigma": 1.0})
    with pytest.raises(ConfigError):
        potential_from_config({"kind": "hard_rod", "sigma": 1.0, "cutoff": 3.0})


def test_thermo_state():
    st = ThermoState(beta=1.0, L=10.0, N=5)
    assert st.density() == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        ThermoState(beta=-1.0)
    with pytest.raises(ConfigError):
        ThermoState(beta=1.0).density()


def test_breakpoints(well, rod):
    assert rod.breakpoints() == (1.0,)
    assert well.breakpoints() == (1.0, 1.5)
    assert well.range_radius == 1.5


def test_is_nonnegative(rod, sphere, well):
    assert rod.is_nonnegative and sphere.is_nonnegative
    assert not well.is_nonnegative
    flat = PairPotential("square_well", 1.0, 1, epsilon=0.0, lambda_w=1.5, B=0.0)
    assert flat.is_nonnegative
