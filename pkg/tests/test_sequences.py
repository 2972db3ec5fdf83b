import numpy as np
import pytest

from gcrit.errors import DegeneratePotential, InconsistentBracket, MonotonicityViolated
from gcrit.potential import PotentialShape
from gcrit.quadrature import DEFAULT_SCHEME
from gcrit.sequences import (_finish, alpha_omega, best_bracket, first_order_bracket,
                             kellogg_sequence, kolomy_sequence, power_sequence, sequence)


def test_kellogg_exponential(shapes):
    seq = kellogg_sequence(shapes["exp"], 0, 4, stop_tol=0.0)
    assert seq.indices == (1, 2, 3, 4)
    assert np.allclose(seq.bounds_on_gc, [1.5323, 1.4480, 1.4459, 1.4458], atol=1.5e-4)
    assert seq.direction == "upper"


def test_kolomy_square_well(shapes):
    seq = kolomy_sequence(shapes["sw"], 4, 1, stop_tol=0.0)
    assert seq.best == pytest.approx(52.1053, abs=1.5e-4)


def test_alpha_omega_square_well_closed_forms(shapes):
    lo, hi = alpha_omega(shapes["sw"], 0, 2, stop_tol=0.0)
    # alpha_0 = int r v = 1/2, alpha_1 = M_2 / M_1 = (5/24) / (1/2)
    assert lo.bound_at(0) == pytest.approx(2.0, rel=1e-13)
    assert lo.bound_at(1) == pytest.approx(2.4, rel=1e-13)
    assert hi.bound_at(1) == pytest.approx(2.5, rel=1e-13)
    br = first_order_bracket(shapes["sw"], 0)
    assert (br.lower, br.upper) == (pytest.approx(2.4), pytest.approx(2.5))
    assert br.width == pytest.approx(0.1)


@pytest.mark.parametrize("name", ["exp", "pe", "sw", "yukawa", "gauss"])
@pytest.mark.parametrize("ell", [1, 3])
def test_identities_for_higher_waves(shapes, name, ell):
    shape = shapes[name]
    lo, hi = alpha_omega(shape, ell, 6, stop_tol=0.0)
    kel = kellogg_sequence(shape, ell, 3, stop_tol=0.0)
    kol = kolomy_sequence(shape, ell, 3, stop_tol=0.0)
    pw = power_sequence(shape, ell, 5, stop_tol=0.0)
    omega = dict(zip(hi.indices, hi.iterates))
    for n in (1, 2, 3):
        assert kol.iterates[n - 1] * omega[2 * n] == pytest.approx(1.0, abs=1e-9)
        assert kel.iterates[n - 1] ** 2 * omega[2 * n - 1] * omega[2 * n] == pytest.approx(1.0, abs=1e-9)
    for n in range(1, 6):
        assert pw.iterates[n - 1] == pytest.approx(omega[n], rel=1e-9)


def test_stopping_rule(shapes):
    seq = kellogg_sequence(shapes["sw"], 0, 12)
    assert seq.converged
    assert len(seq) < 12


def test_custom_start_still_bounds(shapes, gc):
    # any positive start function gives valid upper limits
    seq = kellogg_sequence(shapes["exp"], 0, 5, stop_tol=0.0, start=lambda r: r * np.exp(-r))
    assert min(seq.bounds_on_gc) >= gc("exp", 0) * (1 - 1e-10)


def test_monotonicity_guard():
    with pytest.raises(MonotonicityViolated):
        _finish("kellogg", [1, 2], [2.0, 2.5], False, label="x", ell=0, stop_tol=0.0,
                scheme=DEFAULT_SCHEME)
    with pytest.raises(MonotonicityViolated):
        _finish("alpha", [0, 1], [0.5, 0.6], True, label="x", ell=0, stop_tol=0.0,
                scheme=DEFAULT_SCHEME)


def test_best_bracket(shapes, gc):
    br = best_bracket(shapes["pe"], 0, 6)
    assert br.lower <= gc("pe", 0) <= br.upper
    assert br.width < 1e-4
    with pytest.raises(InconsistentBracket):
        best_bracket(shapes["pe"], 0, 2, extra=[("bogus", 10.0, "lower")])


def test_zero_potential_has_no_bracket():
    with pytest.raises(DegeneratePotential):
        zero = PotentialShape(lambda r: 0.0 * np.asarray(r), "zero")
        best_bracket(zero, 0, 3)


def test_dispatch(shapes):
    assert sequence("omega", shapes["sw"], 0, 2).method == "omega"
    assert sequence("alpha", shapes["sw"], 0, 2).direction == "lower"
    with pytest.raises(ValueError):
        sequence("nope", shapes["sw"], 0, 2)
    with pytest.raises(ValueError):
        power_sequence(shapes["sw"], 0, 0)
