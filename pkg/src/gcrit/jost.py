"""Taylor coefficients of the zero-energy Jost function and of its reciprocal.

For an S-wave shape ``v``::

    f0(g) = sum_n (-1)^n a_n g^n        1 / f0(g) = sum_n M_n g^n

with ``a_0 = M_0 = 1``.  Since ``f0(g) * (1/f0(g)) = 1`` the coefficients
obey ``sum_p (-1)^p M_{n-p} a_p = 0`` for ``n >= 1``.  The first positive
zero of ``f0`` is the critical coupling, so ``M_n / M_{n+1}`` tends to it.

``a_n`` is an n-fold ordered integral.  It is evaluated level by level::

    T_0 = 1,   T_k(x) = int_x^inf (y - x) v(y) T_{k-1}(y) dy,
    a_n = int_0^inf r v(r) T_{n-1}(r) dr

which costs two running integrals per order.

>>> from gcrit.potential import make_square_well
>>> s = jost_series(make_square_well(), 3)
>>> round(s.a[2] * 24, 10), round(s.M[2] * 24, 10)
(1.0, 5.0)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergentMoment
from .kernel import Operator
from .potential import PotentialShape, as_ell, reduce_to_s_wave
from .quadrature import DEFAULT_SCHEME, QuadratureScheme
from .sequences import s_wave_moments

DEFAULT_M_ORDER = 8
DEFAULT_A_ORDER = 6


@dataclass(frozen=True)
class JostSeries:
    M: tuple[float, ...]
    a: tuple[float, ...]

    @property
    def N(self) -> int:
        return min(len(self.M), len(self.a)) - 1


def _check_order(N) -> int:
    if int(N) < 1:
        raise ValueError("order must be at least 1")
    return int(N)


def reciprocal_coefficients(shape: PotentialShape, N: int = DEFAULT_M_ORDER, ell=0,
                            scheme: QuadratureScheme = DEFAULT_SCHEME) -> np.ndarray:
    """``M_0 .. M_N``; ``M_n`` is the origin slope of the n-th iterate.

    For ``ell > 0`` the shape is reduced to its S-wave equivalent first.
    """
    N = _check_order(N)
    M, _ = s_wave_moments(shape, as_ell(ell), N - 1, scheme)
    if not np.all(np.isfinite(M)) or np.any(M[1:] <= 0):
        raise DivergentMoment("reciprocal coefficients are not finite and positive")
    return M


def jost_coefficients(shape: PotentialShape, N: int = DEFAULT_A_ORDER, ell=0,
                      scheme: QuadratureScheme = DEFAULT_SCHEME) -> np.ndarray:
    """``a_0 .. a_N`` of the zero-energy Jost function.

    Any order is accepted; the cost is linear in ``N``.
    """
    N = _check_order(N)
    op = Operator(reduce_to_s_wave(shape, as_ell(ell)), 0, scheme)
    r, v, grid = op.r, op.v, op.grid
    a = [1.0]
    t = np.ones_like(r)
    for n in range(1, N + 1):
        a.append(grid.integrate(r * v * t))
        if n < N:
            vt = v * t
            t = grid.suffix(r * vt) - r * grid.suffix(vt)
            # rounding in the subtraction can leave tiny negatives past the support
            t = np.maximum(t, 0.0)
    a = np.array(a)
    if not np.all(np.isfinite(a)):
        raise DivergentMoment("Jost coefficients diverge")
    return a


def jost_series(shape: PotentialShape, N: int, ell=0,
                scheme: QuadratureScheme = DEFAULT_SCHEME) -> JostSeries:
    M = reciprocal_coefficients(shape, N, ell, scheme)
    a = jost_coefficients(shape, N, ell, scheme)
    return JostSeries(tuple(map(float, M)), tuple(map(float, a)))


def convolution_residuals(series: JostSeries) -> np.ndarray:
    """``sum_p (-1)^p M_{n-p} a_p`` for ``n = 1 .. N``."""
    M, a = series.M, series.a
    return np.array([sum((-1) ** p * M[n - p] * a[p] for p in range(n + 1))
                     for n in range(1, series.N + 1)])


def verify_convolution(series: JostSeries) -> float:
    """Largest absolute residual of the product identity ``f0 * (1/f0) = 1``."""
    return float(np.max(np.abs(convolution_residuals(series))))


def dalembert_estimate(series: JostSeries | np.ndarray) -> np.ndarray:
    """Ratios ``M_n / M_{n+1}``; increasing lower limits on the critical coupling."""
    M = np.asarray(series.M if isinstance(series, JostSeries) else series, dtype=float)
    if len(M) < 3:
        raise ValueError("need at least M_0 .. M_2")
    return M[:-1] / M[1:]


def is_log_concave(M, rtol: float = 1e-12) -> bool:
    """``M_{n+2} M_n <= M_{n+1}^2`` at every order."""
    M = np.asarray(M, dtype=float)
    lhs, rhs = M[2:] * M[:-2], M[1:-1] ** 2
    return bool(np.all(lhs <= rhs * (1 + rtol)))
