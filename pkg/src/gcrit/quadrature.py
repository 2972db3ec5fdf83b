"""Semi-infinite radial quadrature.

Two independent routes live here:

* :func:`integrate` -- adaptive 15-point Gauss-Kronrod with a global error
  queue; infinite upper limits are folded onto ``[0, 1)``.
* :class:`RadialGrid` -- a fixed composite Gauss-Legendre grid built per
  ``(shape, ell)``.  Each panel carries a spectral integration matrix so that
  running integrals ``int_0^r`` and ``int_r^inf`` are available at every node
  in O(N) time.

Shapes produced by the S-wave reduction are singular at the origin; they
carry a ``stretch`` k meaning they are smooth in ``x = r**(1/k)``.  All panel
construction happens in that variable and is mapped back with the Jacobian
``k x**(k-1)``.
"""
from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .errors import (BudgetExhausted, DegeneratePotential, DivergentMoment,
                     GridCheckFailed, NonFinite)

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_KRONROD_X = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss-7 nodes sit at the odd Kronrod positions (1, 3, 5, 7 from the ends).
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureScheme:
    rel_tolerance: float = 1e-10
    abs_tolerance: float = 1e-14
    max_nodes: int = 200_000
    split_points: tuple[float, ...] = ()
    # grid construction
    tail_fraction: float = 1e-12
    nodes_per_panel: int = 16
    panel_width: float = 0.25

    def __post_init__(self):
        if not self.rel_tolerance > 0 or not self.abs_tolerance > 0:
            raise ValueError("tolerances must be positive")
        if self.max_nodes < 64:
            raise ValueError("max_nodes must be at least 64")

    @classmethod
    def from_env(cls, **overrides) -> "QuadratureScheme":
        """Default scheme, with ``GCRIT_TOL`` overriding ``rel_tolerance``."""
        tol = os.environ.get("GCRIT_TOL")
        if tol is not None and "rel_tolerance" not in overrides:
            overrides["rel_tolerance"] = float(tol)
        return cls(**overrides)


DEFAULT_SCHEME = QuadratureScheme()


def _kronrod_segment(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    y = np.asarray(f(c + h * _KRONROD_X), dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFinite(f"integrand not finite on [{a:g}, {b:g}]")
    k = h * np.dot(_KRONROD_W, y)
    g = h * np.dot(_GAUSS_W, y)
    return k, abs(k - g)


def _adaptive(f, a, b, scheme, budget):
    """Adaptive GK15 on a finite interval. Returns (value, error, nodes)."""
    value, err = _kronrod_segment(f, a, b)
    used = 15
    heap = [(-err, a, b, value, err)]
    total, total_err = value, err
    while total_err > max(scheme.abs_tolerance, scheme.rel_tolerance * abs(total)):
        if used + 30 > budget:
            raise BudgetExhausted(
                f"{used} nodes used, error {total_err:.3g} above tolerance")
        _, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval collapsed to machine resolution; accept what we have
            heapq.heappush(heap, (0.0, lo, hi, v, 0.0))
            total_err -= e
            continue
        v1, e1 = _kronrod_segment(f, lo, mid)
        v2, e2 = _kronrod_segment(f, mid, hi)
        used += 30
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2))
    # re-sum to shed accumulated rounding from the running updates
    return math.fsum(item[3] for item in heap), total_err, used


def integrate(f, a: float, b: float = math.inf,
              scheme: QuadratureScheme = DEFAULT_SCHEME, *,
              tail_scale: float = 1.0) -> float:
    """Integrate a vectorised radial integrand over ``[a, b]``.

    ``b`` may be ``inf``; the tail ``[c, inf)`` beyond the last split point is
    mapped by ``r = c + L t / (1 - t)`` with ``L = tail_scale``, which suits
    integrands decaying exponentially on that length scale.

    Raises
    ------
    BudgetExhausted
        When ``scheme.max_nodes`` evaluations do not reach the tolerance.
    NonFinite
        When the integrand returns ``nan`` or ``inf``.
    """
    if a < 0:
        raise ValueError("lower limit must be non-negative")
    if b <= a:
        return 0.0
    cuts = sorted(p for p in scheme.split_points if a < p < b)
    edges = [a, *cuts]
    if math.isfinite(b):
        edges.append(b)
    pieces = []
    budget = scheme.max_nodes
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _, used = _adaptive(f, lo, hi, scheme, budget)
        budget -= used
        pieces.append(val)
    if not math.isfinite(b):
        c = edges[-1]
        L = tail_scale

        def mapped(t):
            one_minus = 1.0 - t
            return f(c + L * t / one_minus) * (L / one_minus ** 2)

        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            val, _, _ = _adaptive(_finite_or_zero(mapped), 0.0, 1.0, scheme, budget)
        pieces.append(val)
    return math.fsum(pieces)


def _finite_or_zero(f):
    # at t -> 1 the map sends r to ~1e16 where decaying integrands underflow
    # into 0 * inf; such points carry no weight and are set to zero.
    def wrapped(t):
        y = np.asarray(f(t), dtype=float)
        bad = ~np.isfinite(y)
        if np.any(bad & (t < 1.0 - 1e-8)):
            raise NonFinite("integrand not finite in the mapped tail")
        return np.where(bad, 0.0, y)
    return wrapped


def radial_integral(shape, f, a: float = 0.0, b: float = math.inf,
                    scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """``int_a^b f(r) dr`` evaluated in the shape's natural variable.

    For stretched shapes the substitution ``r = x**k`` removes the origin
    singularity before the adaptive rule sees the integrand.
    """
    k = shape.stretch
    breaks = tuple(p ** (1.0 / k) for p in shape.breakpoints)
    if shape.support_cutoff is not None:
        b = min(b, shape.support_cutoff)
    xa, xb = a ** (1.0 / k), (b ** (1.0 / k) if math.isfinite(b) else math.inf)
    sub = QuadratureScheme(scheme.rel_tolerance, scheme.abs_tolerance,
                           scheme.max_nodes, tuple(sorted(set(breaks))))
    if k == 1:
        return integrate(f, xa, xb, sub)

    def g(x):
        with np.errstate(over="ignore", under="ignore"):
            return f(x ** k) * (k * x ** (k - 1))
    return integrate(g, xa, xb, sub)


def tail_radius(shape, power: float, fraction: float,
                scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """Smallest radius beyond which ``int r**power v dr`` holds < ``fraction``."""
    if shape.support_cutoff is not None:
        return shape.support_cutoff

    def moment(r):
        return r ** power * shape.evaluate(r)

    total = radial_integral(shape, moment, 0.0, math.inf, scheme)
    if total == 0.0:
        raise DegeneratePotential(f"{shape.label} vanishes identically")
    if not (math.isfinite(total) and total > 0):
        raise DivergentMoment(f"moment r^{power} of {shape.label} is {total}")
    k = shape.stretch
    x = 1.0
    for _ in range(200):
        if radial_integral(shape, moment, x ** k, math.inf, scheme) <= fraction * total:
            break
        x *= 1.25
    else:
        raise DivergentMoment(f"tail of r^{power} moment of {shape.label} never decays")
    return x ** k


@lru_cache(maxsize=8)
def _panel_rule(m: int):
    """GL nodes/weights on [-1, 1] plus left/right running-integral matrices."""
    x, w = legendre.leggauss(m)
    vander = legendre.legvander(x, m - 1)
    anti = np.empty((m, m))
    for j in range(m):
        coef = np.zeros(m)
        coef[j] = 1.0
        anti[:, j] = legendre.legval(x, legendre.legint(coef, lbnd=-1))
    left = np.linalg.solve(vander.T, anti.T).T
    right = w[None, :] - left
    return x, w, left, right


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Composite Gauss-Legendre grid with running-integral support.

    ``nodes`` and ``weights`` are flat arrays in the radial variable.  The
    panel structure (``n_panels`` panels of ``m`` nodes) is kept so that
    :meth:`prefix` and :meth:`suffix` can integrate within panels spectrally.
    """
    nodes: np.ndarray
    weights: np.ndarray
    cutoff: float
    edges: np.ndarray           # panel edges in the natural variable
    stretch: int
    m: int
    _scale: np.ndarray = field(repr=False)   # half-width * jacobian, (P, m)

    @property
    def n_panels(self) -> int:
        return len(self.edges) - 1

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def _scaled(self, values):
        vals = np.asarray(values, dtype=float)
        if vals.shape != self.nodes.shape:
            raise ValueError("values do not match the grid")
        return vals.reshape(self.n_panels, self.m) * self._scale

    def prefix(self, values) -> np.ndarray:
        """``int_0^{r_i} f dr`` at every node ``r_i``."""
        _, w, left, _ = _panel_rule(self.m)
        g = self._scaled(values)
        totals = g @ w
        before = np.concatenate([[0.0], np.cumsum(totals)[:-1]])
        return (before[:, None] + g @ left.T).ravel()

    def _partial(self, values, radius: float):
        """Panel index, panel integrals, and left part of the cut panel at ``radius``."""
        g = self._scaled(values)
        _, w, _, _ = _panel_rule(self.m)
        totals = g @ w
        x = radius ** (1.0 / self.stretch)
        p = int(np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, self.n_panels - 1))
        a, b = self.edges[p], self.edges[p + 1]
        t = np.clip((2.0 * x - a - b) / (b - a), -1.0, 1.0)
        coef = legendre.legfit(_panel_rule(self.m)[0], g[p], self.m - 1)
        cut = float(legendre.legval(t, legendre.legint(coef, lbnd=-1)))
        return p, totals, cut

    def integral_to(self, values, radius: float) -> float:
        """``int_0^radius f dr`` using the panel's interpolating polynomial."""
        if radius <= 0:
            return 0.0
        if radius >= self.cutoff:
            return self.integrate(values)
        p, totals, cut = self._partial(values, radius)
        return math.fsum(totals[:p]) + cut

    def integral_from(self, values, radius: float) -> float:
        """``int_radius^cutoff f dr``; safe for integrands singular at 0."""
        if radius >= self.cutoff:
            return 0.0
        if radius <= 0:
            return self.integrate(values)
        p, totals, cut = self._partial(values, radius)
        return math.fsum(totals[p + 1:]) + (totals[p] - cut)

    def suffix(self, values) -> np.ndarray:
        """``int_{r_i}^cutoff f dr`` at every node ``r_i``."""
        _, w, _, right = _panel_rule(self.m)
        g = self._scaled(values)
        totals = g @ w
        after = np.concatenate([np.cumsum(totals[::-1])[::-1][1:], [0.0]])
        return (after[:, None] + g @ right.T).ravel()


def _panel_edges(x_end: float, origin_power: float, breaks, scheme: QuadratureScheme):
    # depth of the geometric refinement toward 0, limited so that a shape
    # behaving like x**origin_power near the origin stays inside double range
    decades = 16.0 if origin_power >= -1.0 else min(16.0, 250.0 / -origin_power)
    x_geo = min(0.5, 0.5 * x_end)
    n_geo = int(math.ceil(decades * math.log2(10)))
    geo = x_geo * 0.5 ** np.arange(n_geo, 0, -1)
    n_lin = max(1, int(math.ceil((x_end - x_geo) / scheme.panel_width)))
    lin = np.linspace(x_geo, x_end, n_lin + 1)
    edges = np.concatenate([[0.0], geo, lin, [b for b in breaks if 0 < b < x_end]])
    edges = np.unique(edges)
    return edges


def build_grid(shape, ell: int = 0, scheme: QuadratureScheme = DEFAULT_SCHEME) -> RadialGrid:
    """Grid adapted to ``shape`` for angular momentum ``ell``.

    The grid ends where the ``r**(2 ell + 2) v`` tail drops below
    ``scheme.tail_fraction`` (or at the support cutoff), is refined
    geometrically toward the origin and split at every shape breakpoint.

    Raises
    ------
    DivergentMoment
        If ``int r**(2 ell + 2) v dr`` is not finite.
    GridCheckFailed
        If the grid integral of ``r v`` disagrees with the adaptive one.
    """
    ell = int(ell)
    k = shape.stretch
    power = 2 * ell + 2
    if shape.support_cutoff is not None:
        cutoff = shape.support_cutoff
    else:
        cutoff = max(tail_radius(shape, power, scheme.tail_fraction, scheme),
                     shape.effective_range)
    x_end = cutoff ** (1.0 / k)
    breaks = [b ** (1.0 / k) for b in shape.breakpoints]
    edges = _panel_edges(x_end, k * shape.origin_exponent, breaks, scheme)
    m = scheme.nodes_per_panel
    t, w, _, _ = _panel_rule(m)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    x = mid + half * t[None, :]
    if k == 1:
        r, jac = x, np.ones_like(x)
    else:
        r, jac = x ** k, k * x ** (k - 1)
    scale = half * jac
    grid = RadialGrid(nodes=r.ravel(), weights=(scale * w[None, :]).ravel(),
                      cutoff=cutoff, edges=edges, stretch=k, m=m, _scale=scale)
    _self_check(grid, shape, scheme)
    return grid


def _self_check(grid: RadialGrid, shape, scheme: QuadratureScheme) -> None:
    v = shape.evaluate(grid.nodes)
    if not np.all(np.isfinite(v)):
        raise NonFinite(f"{shape.label} not finite on its grid")
    on_grid = grid.integrate(grid.nodes * v)
    adaptive = radial_integral(shape, lambda r: r * shape.evaluate(r), 0.0, math.inf, scheme)
    if abs(on_grid - adaptive) > 10 * scheme.rel_tolerance * abs(adaptive) + scheme.abs_tolerance:
        raise GridCheckFailed(
            f"grid integral of r v = {on_grid!r} vs adaptive {adaptive!r} for {shape.label}")
