"""Convergent bound sequences for the critical coupling.

Four ladders are built from the same iterates of the zero-energy integral
operator:

========  =======================================  ===========  ==========
method    iterate                                   bound on gc  direction
========  =======================================  ===========  ==========
power     delta_n = c_{n+1} / c_n                   1/delta_n    upper
kellogg   gamma_{n+1} = sqrt(c_{2n} / c_{2n+2})     gamma_n      upper
kolomy    beta_{n+1} = c_{2n+1} / c_{2n+2}          beta_n       upper
alpha     alpha_n = M_{n+1} / M_n                   1/alpha_n    lower
omega     omega_n = L_{n+1} / L_n                   1/omega_n    upper
========  =======================================  ===========  ==========

where ``c_m = <phi|K^m phi>`` with ``phi = r^(l+1) sqrt(v)``, and ``M_n``,
``L_n`` are the origin-slope and large-r limits of the S-wave iterates
``psi_n`` of the reduced shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InconsistentBracket, MonotonicityViolated
from .kernel import Operator
from .potential import PotentialShape, as_ell, reduce_to_s_wave
from .quadrature import DEFAULT_SCHEME, QuadratureScheme

UPPER = "upper"
LOWER = "lower"
STOP_TOL = 1e-8
MONOTONE_SLACK = 100.0      # multiples of the quadrature rel_tolerance

_DIRECTION = {"power": UPPER, "kellogg": UPPER, "kolomy": UPPER,
              "alpha": LOWER, "omega": UPPER}


@dataclass(frozen=True)
class BoundSequence:
    method: str
    indices: tuple[int, ...]
    iterates: tuple[float, ...]
    bounds_on_gc: tuple[float, ...]
    direction: str
    converged: bool = False
    label: str = ""
    ell: int = 0

    @property
    def best(self) -> float:
        return self.bounds_on_gc[-1]

    def bound_at(self, n: int) -> float:
        return self.bounds_on_gc[self.indices.index(n)]

    def __len__(self) -> int:
        return len(self.iterates)


@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float
    sources: tuple[str, str]
    width: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "width", self.upper - self.lower)


def _finish(method, indices, iterates, invert, *, label, ell, stop_tol, scheme):
    """Apply the stopping rule and the monotonicity guard."""
    iterates = [float(x) for x in iterates]
    bounds = [1.0 / x if invert else x for x in iterates]
    direction = _DIRECTION[method]
    slack = MONOTONE_SLACK * scheme.rel_tolerance
    sign = 1.0 if direction == UPPER else -1.0
    keep, converged = len(bounds), False
    for i in range(1, len(bounds)):
        step = sign * (bounds[i] - bounds[i - 1])
        if step > slack * abs(bounds[i]):
            raise MonotonicityViolated(
                f"{method} bound moved the wrong way at n={indices[i]}: "
                f"{bounds[i - 1]!r} -> {bounds[i]!r}")
        if stop_tol and abs(bounds[i] - bounds[i - 1]) < stop_tol * abs(bounds[i]):
            keep, converged = i + 1, True
            break
    return BoundSequence(method, tuple(indices[:keep]), tuple(iterates[:keep]),
                         tuple(bounds[:keep]), direction, converged, label, ell)


class _Ladder:
    """Iterates ``u_n`` of the l-wave operator, grown on demand."""

    def __init__(self, shape, ell, scheme, start=None):
        self.op = Operator(shape, ell, scheme)
        if start is None:
            u0 = self.op.start()
        elif callable(start):
            u0 = np.asarray(start(self.op.r), dtype=float)
        else:
            u0 = np.asarray(start, dtype=float)
        self.u = [u0]

    def __getitem__(self, n: int) -> np.ndarray:
        while len(self.u) <= n:
            self.u.append(self.op.apply(self.u[-1]))
        return self.u[n]

    def moment(self, m: int) -> float:
        """``c_m = <phi|K^m phi>``, split evenly between two iterates."""
        return self.op.inner(self[m // 2], self[m - m // 2])


def _check_n(n_max):
    if int(n_max) < 1:
        raise ValueError("n_max must be at least 1")
    return int(n_max)


def power_sequence(shape: PotentialShape, ell, n_max: int, *,
                   scheme: QuadratureScheme = DEFAULT_SCHEME,
                   stop_tol: float = STOP_TOL, start=None) -> BoundSequence:
    """Upper limits ``1/delta_n`` for ``n = 0 .. n_max``."""
    ell, n_max = as_ell(ell), _check_n(n_max)
    lad = _Ladder(shape, ell, scheme, start)
    c = [lad.moment(m) for m in range(n_max + 2)]
    delta = [c[n + 1] / c[n] for n in range(n_max + 1)]
    return _finish("power", list(range(n_max + 1)), delta, True,
                   label=shape.label, ell=ell, stop_tol=stop_tol, scheme=scheme)


def kellogg_sequence(shape: PotentialShape, ell, n_max: int, *,
                     scheme: QuadratureScheme = DEFAULT_SCHEME,
                     stop_tol: float = STOP_TOL, start=None) -> BoundSequence:
    """Norm-ratio upper limits ``gamma_1 .. gamma_{n_max}``."""
    ell, n_max = as_ell(ell), _check_n(n_max)
    lad = _Ladder(shape, ell, scheme, start)
    norms = [lad.op.inner(lad[n], lad[n]) for n in range(n_max + 1)]
    gamma = [np.sqrt(norms[n] / norms[n + 1]) for n in range(n_max)]
    return _finish("kellogg", list(range(1, n_max + 1)), gamma, False,
                   label=shape.label, ell=ell, stop_tol=stop_tol, scheme=scheme)


def kolomy_sequence(shape: PotentialShape, ell, n_max: int, *,
                    scheme: QuadratureScheme = DEFAULT_SCHEME,
                    stop_tol: float = STOP_TOL, start=None) -> BoundSequence:
    """Quotient upper limits ``beta_1 .. beta_{n_max}``."""
    ell, n_max = as_ell(ell), _check_n(n_max)
    lad = _Ladder(shape, ell, scheme, start)
    beta = [lad.op.inner(lad[n], lad[n + 1]) / lad.op.inner(lad[n + 1], lad[n + 1])
            for n in range(n_max)]
    return _finish("kolomy", list(range(1, n_max + 1)), beta, False,
                   label=shape.label, ell=ell, stop_tol=stop_tol, scheme=scheme)


def s_wave_moments(shape: PotentialShape, ell, n_max: int,
                   scheme: QuadratureScheme = DEFAULT_SCHEME):
    """``M_0 .. M_{n_max+1}`` and ``L_1 .. L_{n_max+1}`` of the reduced shape.

    ``psi_0 = r`` and ``psi_n(r) = int min(r, r') W(r') psi_{n-1}(r') dr'``;
    ``M_n = int W psi_{n-1}`` is the slope of ``psi_n`` at the origin and
    ``L_n = int r W psi_{n-1}`` its limit at infinity.  ``M_0 = 1``.
    """
    ell = as_ell(ell)
    reduced = reduce_to_s_wave(shape, ell)
    op = Operator(reduced, 0, scheme)
    psi = op.r.copy()
    M, L = [1.0], []
    for _ in range(n_max + 1):
        M.append(op.grid.integrate(op.v * psi))
        L.append(op.grid.integrate(op.r * op.v * psi))
        psi = op.apply(psi)
    return np.array(M), np.array(L)


def alpha_omega(shape: PotentialShape, ell, n_max: int, *,
                scheme: QuadratureScheme = DEFAULT_SCHEME,
                stop_tol: float = STOP_TOL) -> tuple[BoundSequence, BoundSequence]:
    """Two-sided ladder: lower limits ``1/alpha_n`` (n = 0 .. n_max) and
    upper limits ``1/omega_n`` (n = 1 .. n_max).

    ``alpha_0 = int r v`` reproduces the Bargmann-Schwinger bound.  For
    ``ell > 0`` the shape is first mapped onto its S-wave equivalent.
    """
    ell, n_max = as_ell(ell), _check_n(n_max)
    M, L = s_wave_moments(shape, ell, n_max, scheme)
    alpha = [M[n + 1] / M[n] for n in range(n_max + 1)]
    omega = [L[n] / L[n - 1] for n in range(1, n_max + 1)]
    kw = dict(label=shape.label, ell=ell, stop_tol=stop_tol, scheme=scheme)
    return (_finish("alpha", list(range(n_max + 1)), alpha, True, **kw),
            _finish("omega", list(range(1, n_max + 1)), omega, True, **kw))


def first_order_bracket(shape: PotentialShape, ell=0,
                        scheme: QuadratureScheme = DEFAULT_SCHEME) -> Bracket:
    """``[1/alpha_1, 1/omega_1]``, the closed-form first step of the ladder."""
    lo, hi = alpha_omega(shape, ell, 1, scheme=scheme, stop_tol=0.0)
    return Bracket(lo.bound_at(1), hi.bound_at(1), ("alpha", "omega"))


def best_bracket(shape: PotentialShape, ell, n_max: int, *,
                 scheme: QuadratureScheme = DEFAULT_SCHEME,
                 stop_tol: float = STOP_TOL,
                 extra: Iterable[tuple[str, float, str]] = ()) -> Bracket:
    """Tightest ``(lower, upper)`` over every sequence plus ``extra`` limits.

    ``extra`` holds ``(label, value, direction)`` triples, e.g. from the
    closed-form bounds.

    Raises
    ------
    InconsistentBracket
        If the best lower limit exceeds the best upper one beyond tolerance.
    """
    ell = as_ell(ell)
    seqs = [power_sequence(shape, ell, n_max, scheme=scheme, stop_tol=stop_tol),
            kellogg_sequence(shape, ell, n_max, scheme=scheme, stop_tol=stop_tol),
            kolomy_sequence(shape, ell, n_max, scheme=scheme, stop_tol=stop_tol),
            *alpha_omega(shape, ell, n_max, scheme=scheme, stop_tol=stop_tol)]
    candidates = [(s.method, s.best, s.direction) for s in seqs] + list(extra)
    lows = [(v, m) for m, v, d in candidates if d == LOWER]
    highs = [(v, m) for m, v, d in candidates if d == UPPER]
    lower, lo_src = max(lows)
    upper, hi_src = min(highs)
    slack = MONOTONE_SLACK * scheme.rel_tolerance * abs(upper)
    if lower > upper + slack:
        raise InconsistentBracket(
            f"lower limit {lower!r} ({lo_src}) exceeds upper limit {upper!r} ({hi_src})")
    return Bracket(min(lower, upper), upper, (lo_src, hi_src))


def sequence(method: str, shape: PotentialShape, ell, n_max: int, **kw) -> BoundSequence:
    """Dispatch by method name; ``alpha``/``omega`` return their half of the pair."""
    if method == "power":
        return power_sequence(shape, ell, n_max, **kw)
    if method == "kellogg":
        return kellogg_sequence(shape, ell, n_max, **kw)
    if method == "kolomy":
        return kolomy_sequence(shape, ell, n_max, **kw)
    if method in ("alpha", "omega"):
        kw.pop("start", None)
        lo, hi = alpha_omega(shape, ell, n_max, **kw)
        return lo if method == "alpha" else hi
    raise ValueError(f"not a sequence method: {method}")


SEQUENCE_METHODS: Sequence[str] = ("power", "kellogg", "kolomy", "alpha", "omega")
StartFunction = Callable[[np.ndarray], np.ndarray]
