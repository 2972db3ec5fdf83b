import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from gcrit.errors import BudgetExhausted, DegeneratePotential, NonFinite
from gcrit.potential import PotentialShape, make_exponential, make_square_well
from gcrit.quadrature import (QuadratureScheme, build_grid, integrate, radial_integral,
                              tail_radius)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_gamma_moments(n):
    assert integrate(lambda r: r ** n * np.exp(-r), 0.0) == pytest.approx(math.factorial(n), rel=1e-12)


@given(a=st.floats(0.1, 5.0), b=st.floats(0.1, 5.0), p=st.floats(0.0, 3.0))
@settings(max_examples=30, deadline=None)
def test_oscillating_moment_closed_form(a, b, p):
    # cos^2 = (1 + Re e^{2ibr}) / 2 turns the integral into two Gamma moments
    f = lambda r: r ** p * np.exp(-a * r) * np.cos(b * r) ** 2
    ref = 0.5 * gamma(p + 1) * (a ** -(p + 1) + ((a - 2j * b) ** -(p + 1)).real)
    assert integrate(f, 0.0, tail_scale=1.0 / a) == pytest.approx(ref, rel=1e-9, abs=1e-13)


def test_split_points_handle_jumps():
    scheme = QuadratureScheme(split_points=(1.0,))
    assert integrate(lambda r: np.where(r < 1.0, 1.0, 0.0), 0.0, 3.0, scheme) == pytest.approx(1.0, abs=1e-14)


def test_budget_and_nonfinite():
    tiny = QuadratureScheme(max_nodes=64)
    with pytest.raises(BudgetExhausted):
        integrate(lambda r: np.sin(200 * r) ** 2, 0.0, 10.0, tiny)
    with pytest.raises(NonFinite):
        integrate(lambda r: np.where(r > 0.5, np.nan, r), 0.0, 1.0)


def test_gcrit_tol_env(monkeypatch):
    monkeypatch.setenv("GCRIT_TOL", "1e-6")
    assert QuadratureScheme.from_env().rel_tolerance == 1e-6
    assert QuadratureScheme.from_env(rel_tolerance=1e-8).rel_tolerance == 1e-8


def test_scheme_validation():
    with pytest.raises(ValueError):
        QuadratureScheme(rel_tolerance=0.0)


def test_tail_radius_and_zero_shape():
    r = tail_radius(make_exponential(), 1.0, 1e-12)
    # int_R^inf r e^-r = (R + 1) e^-R
    assert (r + 1) * math.exp(-r) <= 1e-12
    assert tail_radius(make_square_well(), 1.0, 1e-12) == 1.0
    with pytest.raises(DegeneratePotential):
        PotentialShape(lambda r: 0.0 * np.asarray(r), "zero")


def test_grid_prefix_suffix_exact():
    grid = build_grid(make_exponential())
    r = grid.nodes
    f = np.exp(-r)
    assert np.allclose(grid.prefix(f), 1 - np.exp(-r), atol=1e-13)
    assert np.allclose(grid.suffix(f), np.exp(-r) - np.exp(-grid.cutoff), atol=1e-13)
    assert grid.integral_to(f, 2.0) == pytest.approx(1 - math.exp(-2.0), abs=1e-13)
    assert grid.integral_from(f, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-11)


def test_grid_on_square_well():
    grid = build_grid(make_square_well(), ell=3)
    assert grid.cutoff == 1.0
    assert grid.integrate(grid.nodes ** 3) == pytest.approx(0.25, rel=1e-14)
    assert len(grid) == grid.n_panels * grid.m


def test_radial_integral_stretched():
    from gcrit.potential import reduce_to_s_wave
    # int r W(r) dr = int x v(x) dx / (2l + 1)
    for ell in (1, 3):
        w = reduce_to_s_wave(make_exponential(), ell)
        val = radial_integral(w, lambda r: r * w.evaluate(r))
        assert val == pytest.approx(1.0 / (2 * ell + 1), rel=1e-10)
