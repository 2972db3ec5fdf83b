"""Reference critical couplings, independent of the integral-operator machinery.

Two routes:

* zero-energy shooting with bisection (:func:`critical_g`), valid for any shape;
* Bessel-zero closed forms for the square well (any ``ell``) and for the
  exponential well (``ell = 0``).

Shooting works with ``y = u / r**(l+1)`` against ``s = log x``, where
``x = r**(1/k)`` and ``k`` is the shape's stretch factor.  The radial
equation becomes::

    y'' + c y' + g Q(s) y = 0,    c = k (2l + 1),    Q = k**2 r**2 v(r)

with ``y -> 1``, ``y' -> 0`` at the origin.  Past the potential
``u = A r**(l+1) + B r**-l`` gives ``A = y + y'/c``; ``A`` changes sign
exactly at the critical coupling.  The equation is stepped with the
12-stage, 8th-order Dormand-Prince scheme on a fixed mesh fitted to the
local oscillation rate.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop853
from scipy.optimize import brentq

from .errors import BracketFailure, StepFailure
from .potential import PotentialShape, as_ell

if os.environ.get("GCRIT_PURE_PYTHON"):
    from ._shoot_py import shoot_kernel
    BACKEND = "numpy"
else:
    try:
        from ._shoot import shoot_kernel
        BACKEND = "cython"
    except ImportError:
        from ._shoot_py import shoot_kernel
        BACKEND = "numpy"

_STAGES = _dop853.N_STAGES
RK_A = np.ascontiguousarray(_dop853.A[:_STAGES, :_STAGES], dtype=float)
RK_B = np.ascontiguousarray(_dop853.B, dtype=float)
# stage abscissae pulled off the step ends so a jump in v sitting on a mesh
# point is always sampled from the side the step lies on
RK_C = np.clip(_dop853.C[:_STAGES], 1e-12, 1.0 - 1e-12)

START_SMALLNESS = 1e-16


@dataclass(frozen=True)
class ShootingConfig:
    """Knobs for :func:`shoot` and :func:`critical_g`.

    ``r_start``/``r_end`` of ``None`` are chosen per shape: the start where
    ``g Q`` is below ``1e-16 c`` (so the free solution is exact to rounding)
    and the end at the support cutoff or the effective range.  ``step_angle``
    bounds the phase advance per step, ``max_step`` the step in ``log x``.
    """
    r_start: float | None = None
    r_end: float | None = None
    step_angle: float = 0.1
    max_step: float = 0.1
    g_lo: float = 0.0
    g_hi: float = 1.0
    g_cap: float = 1e6
    bisect_rtol: float = 1e-10

    def __post_init__(self):
        if self.r_start is not None and not self.r_start > 0:
            raise ValueError("r_start must be positive")
        if self.r_end is not None and self.r_start is not None and self.r_end <= self.r_start:
            raise ValueError("r_end must exceed r_start")
        if not (self.step_angle > 0 and self.max_step > 0 and self.bisect_rtol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 <= self.g_lo < self.g_hi <= self.g_cap:
            raise ValueError("need 0 <= g_lo < g_hi <= g_cap")


DEFAULT_CONFIG = ShootingConfig()


@dataclass(frozen=True)
class ShotResult:
    g: float
    nodes: int
    coefficient: float
    y_end: float
    steps: int

    @property
    def sign(self) -> int:
        return int(np.sign(self.coefficient))

    @property
    def supercritical(self) -> bool:
        return self.nodes > 0 or self.coefficient < 0


class _Mesh:
    """Stage-point values of ``Q`` on a mesh resolving couplings up to ``g_ref``."""

    def __init__(self, shape: PotentialShape, ell: int, g_ref: float,
                 config: ShootingConfig):
        k = shape.stretch
        self.c = k * (2 * ell + 1)
        self._k = k
        self._v = shape.evaluate
        r_end = config.r_end or shape.support_cutoff or shape.effective_range
        x_end = r_end ** (1.0 / k)
        if config.r_start is not None:
            x_start = config.r_start ** (1.0 / k)
        else:
            x_start = self._auto_start(x_end, max(g_ref, 1.0))
        s_lo, s_hi = math.log(x_start), math.log(x_end)
        cuts = sorted({math.log(b ** (1.0 / k)) for b in shape.breakpoints
                       if x_start < b ** (1.0 / k) < x_end})
        knots = [s_lo, *cuts, s_hi]
        mesh = [np.array([s_lo])]
        for a, b in zip(knots[:-1], knots[1:]):
            mesh.append(self._segment(a, b, g_ref, config)[1:])
        s = np.concatenate(mesh)
        self.h = np.ascontiguousarray(np.diff(s))
        stage_s = s[:-1, None] + RK_C[None, :] * self.h[:, None]
        self.Q = np.ascontiguousarray(self.q_of_s(stage_s))
        if not np.all(np.isfinite(self.Q)):
            raise StepFailure("equation coefficient is not finite on the mesh")

    def q_of_s(self, s):
        r = np.exp(self._k * np.asarray(s, dtype=float))
        return self._k ** 2 * r * r * np.asarray(self._v(r), dtype=float)

    def _auto_start(self, x_end, g):
        x = min(1e-2 * x_end, 1e-2)
        with np.errstate(all="ignore"):
            q = float(self.q_of_s(math.log(x)))
            for _ in range(300):
                if g * q < START_SMALLNESS * self.c:
                    return x
                q_next = float(self.q_of_s(math.log(0.1 * x)))
                if not math.isfinite(q_next):
                    # the shape overflows closer in; settle for a looser start
                    if g * q < 1e-10 * self.c:
                        return x
                    break
                x, q = 0.1 * x, q_next
        raise StepFailure("potential too singular at the origin to start the integration")

    def _segment(self, a, b, g, config):
        n_fine = max(16, int(math.ceil((b - a) / 0.01)))
        t = np.linspace(0.0, 1.0, n_fine)
        probe = a + (b - a) * np.clip(t, 1e-9, 1 - 1e-9)
        rate = self.c + np.sqrt(g * np.maximum(self.q_of_s(probe), 0.0))
        rate = np.maximum(rate, np.maximum(np.roll(rate, 1), np.roll(rate, -1)))
        density = np.maximum(rate / config.step_angle, 1.0 / config.max_step)
        fine = a + (b - a) * t
        count = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(fine))])
        steps = max(1, int(math.ceil(count[-1])))
        return np.interp(np.linspace(0.0, count[-1], steps + 1), count, fine)

    def run(self, g: float) -> ShotResult:
        y, dy, nodes, _ = shoot_kernel(self.h, self.Q, float(g), float(self.c), RK_A, RK_B)
        if not (math.isfinite(y) and math.isfinite(dy)):
            raise StepFailure(f"integration broke down at g={g!r}")
        return ShotResult(float(g), int(nodes), y + dy / self.c, y, len(self.h))


def shoot(shape: PotentialShape, ell, g: float,
          config: ShootingConfig = DEFAULT_CONFIG) -> ShotResult:
    """Integrate the zero-energy equation at coupling ``g``."""
    if g < 0:
        raise ValueError("coupling must be non-negative")
    return _Mesh(shape, as_ell(ell), g, config).run(g)


def critical_g(shape: PotentialShape, ell=0, config: ShootingConfig = DEFAULT_CONFIG) -> float:
    """Critical coupling by bisection on the sign of the growing-solution coefficient.

    ``g_hi`` is doubled until the shot is supercritical (up to ``g_cap``);
    bisection then stops at relative bracket width ``bisect_rtol``.
    """
    ell = as_ell(ell)
    lo, hi = config.g_lo, config.g_hi
    if lo > 0 and shoot(shape, ell, lo, config).supercritical:
        raise BracketFailure(f"already supercritical at g_lo={lo!r}")
    while not shoot(shape, ell, hi, config).supercritical:
        lo, hi = hi, 2.0 * hi
        if hi > config.g_cap:
            raise BracketFailure(f"still subcritical at the cap g={config.g_cap:g}")
    mesh = _Mesh(shape, ell, hi, config)
    while hi - lo > config.bisect_rtol * hi:
        mid = 0.5 * (lo + hi)
        if mesh.run(mid).supercritical:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# --- Bessel closed forms ----------------------------------------------------

def bessel_j(nu: float, x: float) -> float:
    """``J_nu(x)`` from its power series.

    Cancellation costs about ``exp(x) * eps`` in absolute accuracy, which is
    harmless for the first zeros used here (``x < 10``).
    """
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    if nu + 1.0 <= 0 and float(nu + 1.0).is_integer():
        raise ValueError("integer negative order not supported")
    if math.gamma(nu + 1.0) < 0:
        term = -term
    terms = [term]
    m = 0
    while True:
        term *= -half * half / ((m + 1) * (m + 1 + nu))
        terms.append(term)
        m += 1
        if abs(term) < 1e-18 * max(1.0, abs(terms[0])) and m > half:
            break
    return math.fsum(terms)


def bessel_first_zero(nu: float, step: float = 0.05) -> float:
    """First positive zero of ``J_nu`` (``nu > -1``): scan for a sign change, then refine."""
    if not nu > -1:
        raise ValueError("order must exceed -1")
    a = step
    fa = bessel_j(nu, a)
    while True:
        b = a + step
        fb = bessel_j(nu, b)
        if fa * fb <= 0:
            return brentq(lambda t: bessel_j(nu, t), a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        a, fa = b, fb


def square_well_closed_form(ell) -> float:
    """Square of the first zero of ``J_{l-1/2}``."""
    return bessel_first_zero(as_ell(ell) - 0.5) ** 2


def exponential_closed_form() -> float:
    """``(j_{0,1} / 2)**2`` for ``v = exp(-r)`` at ``ell = 0``."""
    return (bessel_first_zero(0.0) / 2.0) ** 2
