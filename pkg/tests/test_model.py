import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergodic_hjb.grid import Field, make_grid
from ergodic_hjb.model import (MODELS, instantiate_model, linear_model, power_F,
                               uniqueness_sets, validate_assumptions)


def test_zero_cost():
    g = make_grid(16, 4)
    model = instantiate_model("zero-cost", g)
    assert np.all(model.f.values == 0)
    assert uniqueness_sets(model).A_nodes == list(range(16))
    assert model.slope_bound == 1.0


def test_quad_eikonal_vanishes_at_origin():
    g = make_grid(256, 32)
    model = instantiate_model("quad-eikonal", g, g="continuous")
    assert np.all(model.f.values[0] == 0.0)
    assert model.sup_f == pytest.approx(3.0, rel=1e-2)


def test_quad_eikonal_measurable_profile():
    g = make_grid(8, 4)
    f = instantiate_model("quad-eikonal", g, g="measurable").f.values
    np.testing.assert_allclose(f[4], [2, 2, 4, 4])


@pytest.mark.parametrize("m", [0.5, 1.0])
def test_power_m_requires_m_above_one(m):
    with pytest.raises(ValueError, match=r"\(A1\) requires m > 1"):
        instantiate_model("power-m", make_grid(8, 4), m=m)


def test_power_m_upper_limit():
    with pytest.raises(ValueError):
        instantiate_model("power-m", make_grid(8, 4), m=4.5)


def test_unknown_model():
    with pytest.raises(ValueError, match="unknown model"):
        instantiate_model("hamiltonian", make_grid(8, 4))


def test_slope_bound_formula():
    g = make_grid(64, 8)
    model = instantiate_model("power-m", g, m=3.0)
    assert model.slope_bound == pytest.approx(model.sup_f ** (1 / 3) + 1)


def test_quad_eikonal_assumptions_pass():
    report = validate_assumptions(instantiate_model("quad-eikonal", make_grid(256, 32)))
    for key in ("A1", "A2", "A3", "A4"):
        assert report[key]["passed"], key
    assert report["A2"]["A_nodes"] == [0]
    assert report["A5"]["passed"] is None
    assert np.isfinite(report["A5"]["f_x_quotient_max"])


def test_shifted_cost_fails_a2_with_witness():
    model = instantiate_model("quad-eikonal", make_grid(32, 4))
    shifted = dataclasses.replace(model, f=Field(model.grid, model.f.values - 0.1))
    report = validate_assumptions(shifted)
    assert report["A2"]["passed"] is False
    assert report["A2"]["witness"]["node"] == [0, 0]


def test_power_four_is_convex_on_samples():
    report = validate_assumptions(instantiate_model("power-m", make_grid(64, 8), m=4.0))
    assert report["A3"]["passed"] and report["A3"]["witness"] is None


def test_nonconvex_hamiltonian_fails_a3():
    model = instantiate_model("quad-eikonal", make_grid(32, 4))

    def F(x, p, xi):
        return np.abs(p) ** 2 + np.sin(4 * np.abs(p)) ** 2
    report = validate_assumptions(dataclasses.replace(model, F=F))
    assert report["A3"]["passed"] is False
    assert set(report["A3"]["witness"]) == {"x", "p", "q", "xi"}


def test_validation_is_seeded():
    model = instantiate_model("power-m", make_grid(32, 4))
    assert validate_assumptions(model, seed=3) == validate_assumptions(model, seed=3)


def test_uniqueness_sets():
    g = make_grid(256, 8)
    sets = uniqueness_sets(instantiate_model("quad-eikonal", g))
    assert sets.A_nodes == [0]
    assert sets.Z_nodes == [(0, j) for j in range(8)]
    assert uniqueness_sets(instantiate_model("scalar-reduction", g)).A_nodes == [0]


def test_linear_model_has_no_hamiltonian():
    g = make_grid(8, 4)
    model = linear_model(g, np.ones(g.shape))
    assert np.all(model.F(0.3, np.linspace(-5, 5, 11), 0.2) == 0)


@given(st.floats(1.01, 4.0), st.floats(0.01, 20), st.sampled_from([-1.0, 1.0]))
def test_power_derivative_matches_difference_quotient(m, a, sign):
    # away from the kink at 0, where |p|**m is only C^1 for m near 1
    p = sign * a
    F, dF = power_F(m)
    h = 1e-6
    fd = (F(0, p + h, 0) - F(0, p - h, 0)) / (2 * h)
    assert dF(0, p, 0) == pytest.approx(fd, rel=1e-4, abs=1e-4)


@pytest.mark.parametrize("name", MODELS)
def test_catalog_satisfies_structure(name):
    model = instantiate_model(name, make_grid(64, 8))
    assert model.f.values.min() >= 0
    report = validate_assumptions(model, n_samples=200)
    assert all(report[k]["passed"] for k in ("A1", "A2", "A3", "A4"))


@given(st.sampled_from(MODELS), st.integers(4, 64), st.integers(2, 16))
@settings(max_examples=30, deadline=None)
def test_zero_set_nonempty_on_any_grid(name, nx, n_xi):
    assert 0 in uniqueness_sets(instantiate_model(name, make_grid(nx, n_xi))).A_nodes
