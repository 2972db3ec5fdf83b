"""Closed-form and variational limits on the critical coupling.

* :func:`glaser_lower` -- Glaser necessary condition (lower limit)
* :func:`calogero_upper_linear`, :func:`calogero_upper_nonlinear` -- the two
  Calogero sufficient conditions (upper limits)
* :func:`variational_upper_closed` -- fixed-family variational bound
* :func:`rayleigh_upper` -- Rayleigh quotient of an (iterated) trial function
* :func:`chadan_upper` -- trace condition ``Tr K^2 >= Tr K``

Every free parameter is optimised by :func:`scan_optimize`: a logarithmic
scan followed by golden-section refinement around the best scan point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, xlogy

from .errors import DivergentMoment, NoRoot, NotSquareIntegrable
from .kernel import Operator, trace_iterated
from .potential import PotentialShape, as_ell
from .quadrature import DEFAULT_SCHEME, QuadratureScheme

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    search_interval: tuple[float, float] = (1e-2, 1e2)
    grid_points: int = 200
    refine_tolerance: float = 1e-10

    def __post_init__(self):
        lo, hi = self.search_interval
        if not 0 < lo < hi:
            raise ValueError("search interval must be a non-empty positive range")
        if not self.refine_tolerance > 0:
            raise ValueError("refine_tolerance must be positive")


R_CONFIG = OptimizerConfig((1e-2, 1e2))
GLASER_CONFIG = OptimizerConfig((1.0, 50.0))
# closed-form variational family: p > 1/2, scanned as p - 1/2 on a log scale
VARIATIONAL_CONFIG = OptimizerConfig((1e-3, 50.0))


def golden_section(f, lo: float, hi: float, tol: float, max_iter: int = 200):
    """Minimise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def scan_optimize(f: Callable[[float], float], config: OptimizerConfig, *,
                  maximize: bool = False, shift: float = 0.0) -> tuple[float, float]:
    """Optimise ``f`` over ``shift + [lo, hi]`` (log-spaced scan, then golden).

    Non-finite objective values mark inadmissible parameters and are skipped.
    Returns ``(argopt, opt)``.
    """
    sign = -1.0 if maximize else 1.0
    lo, hi = config.search_interval

    def obj(logt):
        val = f(shift + math.exp(logt))
        return sign * val if math.isfinite(val) else math.inf

    grid = np.linspace(math.log(lo), math.log(hi), config.grid_points)
    vals = np.array([obj(t) for t in grid])
    if not np.any(np.isfinite(vals)):
        raise DivergentMoment("objective is not finite anywhere on the scan interval")
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    t, val = golden_section(obj, a, b, config.refine_tolerance)
    if vals[i] < val:
        t, val = grid[i], vals[i]
    return shift + math.exp(t), sign * val


def _op(shape, ell, scheme):
    return Operator(shape, ell, scheme)


def glaser_lower(shape: PotentialShape, ell=0, config: OptimizerConfig = GLASER_CONFIG,
                 scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """Best lower limit from the Glaser necessary condition (max over p >= 1)."""
    ell = as_ell(ell)
    op = _op(shape, ell, scheme)
    k = 2 * ell + 1
    with np.errstate(divide="ignore"):
        log_base = np.log(op.r ** 2 * op.v)
    alive = np.isfinite(log_base)

    def bound(p):
        integrand = np.zeros_like(op.r)
        integrand[alive] = np.exp(p * log_base[alive]) / op.r[alive]
        ip = op.grid.integrate(integrand)
        if not (ip > 0 and math.isfinite(ip)):
            return math.nan
        log_c = (xlogy(p - 1.0, p - 1.0) + gammaln(2 * p) - (2 * p - 1) * math.log(k)
                 - p * math.log(p) - 2 * gammaln(p))
        return math.exp(-(log_c + math.log(ip)) / p)

    return scan_optimize(bound, config, maximize=True)[1]


def calogero_upper_linear(shape: PotentialShape, ell=0, config: OptimizerConfig = R_CONFIG,
                          scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """Min over R of ``(2l+1) / [int_0^R r v (r/R)^k + int_R^inf r v (r/R)^-k]``."""
    ell = as_ell(ell)
    op = _op(shape, ell, scheme)
    k = 2 * ell + 1
    inner = op.r ** (k + 1) * op.v
    outer = op.r ** (1 - k) * op.v

    def bound(R):
        denom = (op.grid.integral_to(inner, R) * R ** -k
                 + op.grid.integral_from(outer, R) * R ** k)
        return k / denom if denom > 0 else math.nan

    return scan_optimize(bound, config)[1]


def _nonlinear_threshold(op: Operator, ell: int, R: float) -> float:
    """Smallest g with ``R int g v / [(r/R)^2l + (r/R)^-2l R^2 g v] dr = 1``."""
    a = (op.r / R) ** (2 * ell)
    b = (op.r / R) ** (-2 * ell) * R ** 2
    v = op.v

    def lhs(log_g):
        gv = math.exp(log_g) * v
        return R * op.grid.integrate(gv / (a + b * gv)) - 1.0

    lo, hi = math.log(1e-8), math.log(1.0)
    while lhs(hi) < 0:
        hi += math.log(4.0)
        if hi > math.log(1e12):
            raise NoRoot(f"no coupling satisfies the condition at R={R:g}")
    if lhs(lo) >= 0:
        return math.exp(lo)
    return math.exp(brentq(lhs, lo, hi, xtol=1e-14, rtol=1e-13))


def calogero_upper_nonlinear(shape: PotentialShape, ell=0, config: OptimizerConfig = R_CONFIG,
                             scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """Min over R of the smallest coupling meeting Calogero's second condition.

    Radii for which no finite coupling qualifies are skipped.
    """
    ell = as_ell(ell)
    op = _op(shape, ell, scheme)

    def bound(R):
        try:
            return _nonlinear_threshold(op, ell, R)
        except NoRoot:
            return math.nan

    return scan_optimize(bound, config)[1]


def _variational_objective(op: Operator, ell: int):
    lam = ell + 0.5
    r, v = op.r, op.v

    def F(q):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = r ** q * v ** ((q + 1) / 2)
        return np.nan_to_num(out, nan=0.0, posinf=np.inf)

    def bound(p):
        num = op.grid.integrate(F(2 * p - 1))
        fp = F(p)
        den = op.grid.integrate(fp * r ** -lam * op.grid.prefix(fp * r ** lam))
        if not (math.isfinite(num) and math.isfinite(den) and den > 0):
            return math.nan
        return lam * num / den

    return bound


def variational_upper_closed(shape: PotentialShape, ell=0,
                             config: OptimizerConfig = VARIATIONAL_CONFIG,
                             scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """Closed-form variational upper limit, minimised over its parameter p > 1/2."""
    ell = as_ell(ell)
    bound = _variational_objective(_op(shape, ell, scheme), ell)
    return scan_optimize(bound, config, shift=0.5)[1]


# --- Rayleigh quotients -----------------------------------------------------

FAMILIES = ("power_weighted", "general", "exp_decay", "power", "explicit")


@dataclass(frozen=True)
class TrialFunctionSpec:
    """Trial function in the weighted space, ``psi = sqrt(v) u``.

    family
        ``power_weighted``: ``[r^(2p-1) v^p]^(1/2)`` (free ``p``);
        ``general``: ``[r^p v^q]^(1/2)`` (``p`` and/or ``q`` free, free ones
        are ``None``); ``exp_decay``: ``r^(l+1) exp(-q r)``;
        ``power``: ``r^p`` on the support of ``v``;
        ``explicit``: ``builder(r, t)`` with one free parameter ``t``, or
        ``builder(r)`` with none.
    iterations
        Number of kernel applications before forming the quotient.
    """
    family: str
    p: float | None = None
    q: float | None = None
    iterations: int = 0
    builder: Callable | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown trial family {self.family!r}")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.family == "explicit" and self.builder is None:
            raise ValueError("explicit trials need a builder")


def _trial_values(spec: TrialFunctionSpec, op: Operator, ell: int, params: dict):
    r, v = op.r, op.v
    fam = spec.family
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam == "power_weighted":
            p = params["p"]
            psi = np.sqrt(r ** (2 * p - 1) * v ** p)
        elif fam == "general":
            psi = np.sqrt(r ** params["p"] * v ** params["q"])
        elif fam == "exp_decay":
            psi = r ** (ell + 1) * np.exp(-params["q"] * r)
        elif fam == "power":
            psi = np.where(v > 0, r ** params["p"], 0.0)
        elif "t" in params:
            psi = np.asarray(spec.builder(r, params["t"]), dtype=float)
        else:
            psi = np.asarray(spec.builder(r), dtype=float)
    return np.where(v > 0, np.nan_to_num(psi, nan=0.0, posinf=np.inf), 0.0)


def rayleigh_quotient(op: Operator, psi: np.ndarray, iterations: int = 0) -> float:
    """``<psi_i|psi_i> / <psi_i|K psi_i>`` with ``psi_i = K^i psi``."""
    if not np.all(np.isfinite(psi)):
        raise NotSquareIntegrable("trial function is not finite on the grid")
    for _ in range(iterations):
        psi = op.apply_weighted(psi)
    with np.errstate(over="ignore"):
        norm = op.grid.integrate(psi * psi)
    if not (norm > 0 and math.isfinite(norm)):
        raise NotSquareIntegrable("trial function has no finite, non-zero norm")
    return norm / op.grid.integrate(psi * op.apply_weighted(psi))


def _free_params(spec: TrialFunctionSpec) -> list[str]:
    if spec.family == "power_weighted":
        return ["p"] if spec.p is None else []
    if spec.family == "general":
        return [k for k in ("p", "q") if getattr(spec, k) is None]
    if spec.family == "exp_decay":
        return ["q"] if spec.q is None else []
    if spec.family == "power":
        return ["p"] if spec.p is None else []
    return ["t"] if spec.p is None and _builder_takes_param(spec.builder) else []


def _builder_takes_param(builder) -> bool:
    import inspect
    try:
        return len(inspect.signature(builder).parameters) >= 2
    except (TypeError, ValueError):
        return False


def rayleigh_upper(shape: PotentialShape, ell, trial: TrialFunctionSpec,
                   config: OptimizerConfig = R_CONFIG,
                   scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """Variational upper limit from a trial family, minimised over free parameters.

    With two free parameters (``general`` family) the minimisation is nested:
    an outer scan over ``p`` of the inner optimum over ``q``.
    """
    ell = as_ell(ell)
    op = _op(shape, ell, scheme)
    fixed = {k: getattr(trial, k) for k in ("p", "q") if getattr(trial, k) is not None}
    if trial.family == "explicit" and trial.p is not None:
        fixed = {"t": trial.p}
    free = _free_params(trial)

    def quotient(params):
        psi = _trial_values(trial, op, ell, params)
        try:
            return rayleigh_quotient(op, psi, trial.iterations)
        except NotSquareIntegrable:
            return math.nan

    if not free:
        value = quotient(fixed)
        if not math.isfinite(value):
            raise NotSquareIntegrable("trial function is not square integrable")
        return value
    if len(free) == 1:
        name = free[0]
        return scan_optimize(lambda t: quotient({**fixed, name: t}), config)[1]
    coarse = OptimizerConfig(config.search_interval, max(20, config.grid_points // 5),
                             config.refine_tolerance)

    def outer(p):
        try:
            return scan_optimize(lambda q: quotient({"p": p, "q": q}), coarse)[1]
        except DivergentMoment:
            return math.nan

    return scan_optimize(outer, coarse)[1]


def chadan_upper(shape: PotentialShape, ell=0,
                 scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """``Tr K / Tr K^2`` at unit coupling: at that strength ``Tr K^2 >= Tr K``."""
    ell = as_ell(ell)
    return trace_iterated(shape, ell, 1, scheme) / trace_iterated(shape, ell, 2, scheme)
