import math

import numpy as np
import pytest

from gcrit.classic_bounds import (OptimizerConfig, TrialFunctionSpec, calogero_upper_linear,
                                  calogero_upper_nonlinear, chadan_upper, glaser_lower,
                                  golden_section, rayleigh_upper, scan_optimize,
                                  variational_upper_closed)
from gcrit.errors import NotSquareIntegrable


def test_golden_section_parabola():
    x, fx = golden_section(lambda t: (t - 1.3) ** 2 + 2.0, 0.0, 5.0, 1e-12)
    assert x == pytest.approx(1.3, abs=1e-6)
    assert fx == pytest.approx(2.0, abs=1e-12)


def test_scan_optimize_skips_inadmissible():
    f = lambda t: math.nan if t < 1.0 else (math.log(t) - 1.0) ** 2
    t, val = scan_optimize(f, OptimizerConfig((1e-2, 1e2)))
    assert t == pytest.approx(math.e, rel=1e-5)
    t, val = scan_optimize(lambda t: -abs(t - 3.0), OptimizerConfig((1.0, 10.0)), maximize=True)
    assert val == pytest.approx(0.0, abs=1e-8)


def test_config_validation():
    for bad in [dict(search_interval=(2.0, 1.0)), dict(refine_tolerance=0.0)]:
        with pytest.raises(ValueError):
            OptimizerConfig(**bad)
    with pytest.raises(ValueError):
        TrialFunctionSpec("gaussian")
    with pytest.raises(ValueError):
        TrialFunctionSpec("explicit")


@pytest.mark.parametrize("name,ell,expected,digits", [
    ("exp", 0, 1.4383, 4), ("sw", 0, 2.3593, 4), ("sw", 5, 60.947, 3)])
def test_glaser(shapes, name, ell, expected, digits):
    assert glaser_lower(shapes[name], ell) == pytest.approx(expected, abs=1.5 * 10 ** -digits)


def test_glaser_square_well_closed_form(shapes):
    # for v = 1 on [0, 1] the bound at given p is elementary; check p = 1 and the maximum
    sw = shapes["sw"]
    val = glaser_lower(sw, 0, OptimizerConfig((1.0, 1.0 + 1e-9), grid_points=3))
    # p = 1: C = 1, I = int_0^1 r dr = 1/2
    assert val == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("name,ell,expected,digits", [
    ("exp", 0, 1.6755, 4), ("sw", 0, 2.6667, 4), ("sw", 1, 11.719, 3)])
def test_calogero_linear(shapes, name, ell, expected, digits):
    assert calogero_upper_linear(shapes[name], ell) == pytest.approx(expected, abs=1.5 * 10 ** -digits)


def test_calogero_linear_square_well_exact(shapes):
    # l = 0, R < 1: g(R) = 1 / (R**2/3 + R(1 - R)), smallest at R = 3/4
    assert calogero_upper_linear(shapes["sw"], 0) == pytest.approx(8 / 3, rel=1e-9)


@pytest.mark.parametrize("name,ell,expected,digits", [
    ("exp", 0, 1.5442, 4), ("sw", 0, 4.0000, 4), ("pe", 0, 0.86547, 5)])
def test_calogero_nonlinear(shapes, name, ell, expected, digits):
    assert calogero_upper_nonlinear(shapes[name], ell) == pytest.approx(expected, abs=1.5 * 10 ** -digits)


@pytest.mark.parametrize("name,ell,expected,digits", [
    ("exp", 0, 1.4467, 4), ("sw", 0, 2.4747, 4), ("sw", 4, 50.357, 3)])
def test_variational_closed(shapes, name, ell, expected, digits):
    assert variational_upper_closed(shapes[name], ell) == pytest.approx(expected, abs=1.5 * 10 ** -digits)


@pytest.mark.parametrize("name,ell,family,iters,expected,digits", [
    ("exp", 0, "exp_decay", 0, 1.44676, 5),
    ("sw", 0, "power", 1, 2.4674, 4),
    ("sw", 5, "power", 0, 69.295, 3)])
def test_rayleigh_examples(shapes, name, ell, family, iters, expected, digits):
    trial = TrialFunctionSpec(family, iterations=iters)
    assert rayleigh_upper(shapes[name], ell, trial) == pytest.approx(expected, abs=1.5 * 10 ** -digits)


def test_rayleigh_exponential_exact(shapes):
    # psi = r e^{-q r}, v = e^{-r}: elementary Gamma integrals give 625/432 at q = 3/4
    trial = TrialFunctionSpec("exp_decay", q=0.75)
    assert rayleigh_upper(shapes["exp"], 0, trial) == pytest.approx(625 / 432, rel=1e-11)


def test_chadan(shapes, gc):
    assert chadan_upper(shapes["sw"], 0) == pytest.approx(3.0, rel=1e-13)
    # exponential: t1 = 1, t2 = 1/2
    assert chadan_upper(shapes["exp"], 0) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("name", ["exp", "pe", "sw", "yukawa", "gauss"])
@pytest.mark.parametrize("ell", [0, 2, 5])
def test_bounds_straddle_oracle(shapes, gc, name, ell):
    shape, g = shapes[name], gc(name, ell)
    tol = 1e-6 * g
    assert glaser_lower(shape, ell) <= g + tol
    for upper in (calogero_upper_linear, calogero_upper_nonlinear, variational_upper_closed,
                  chadan_upper):
        assert upper(shape, ell) >= g - tol
    for family in ("power_weighted", "exp_decay", "power"):
        assert rayleigh_upper(shape, ell, TrialFunctionSpec(family)) >= g - tol


@pytest.mark.parametrize("name", ["exp", "pe", "sw", "gauss"])
def test_rayleigh_improves_with_iterations(shapes, name):
    values = [rayleigh_upper(shapes[name], 1, TrialFunctionSpec("power_weighted", iterations=i))
              for i in range(4)]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("name", ["exp", "pe", "sw"])
@pytest.mark.parametrize("ell", [0, 3])
def test_variational_matches_power_weighted_trials(shapes, name, ell):
    closed = variational_upper_closed(shapes[name], ell)
    trial = rayleigh_upper(shapes[name], ell, TrialFunctionSpec("power_weighted"),
                           OptimizerConfig((0.5 + 1e-3, 50.0)))
    assert trial == pytest.approx(closed, rel=1e-7)


def test_general_and_explicit_families(shapes, gc):
    g = gc("pe", 0)
    fixed_q = rayleigh_upper(shapes["pe"], 0, TrialFunctionSpec("general", q=1.0))
    both = rayleigh_upper(shapes["pe"], 0, TrialFunctionSpec("general"), OptimizerConfig((0.1, 10.0), 40))
    assert g <= both <= fixed_q * (1 + 1e-9)
    explicit = TrialFunctionSpec("explicit", builder=lambda r, t: r * np.exp(-t * r))
    free = rayleigh_upper(shapes["pe"], 0, explicit)
    exp_decay = rayleigh_upper(shapes["pe"], 0, TrialFunctionSpec("exp_decay"))
    assert free == pytest.approx(exp_decay, rel=1e-9)
    fixed = TrialFunctionSpec("explicit", builder=lambda r: r * np.exp(-0.5 * r))
    assert rayleigh_upper(shapes["pe"], 0, fixed) >= free


def test_not_square_integrable(shapes):
    with pytest.raises(NotSquareIntegrable):
        rayleigh_upper(shapes["exp"], 0, TrialFunctionSpec("explicit", builder=lambda r: r ** -200.0))
    with pytest.raises(NotSquareIntegrable):
        rayleigh_upper(shapes["exp"], 0, TrialFunctionSpec("explicit", builder=lambda r: 0.0 * r))
