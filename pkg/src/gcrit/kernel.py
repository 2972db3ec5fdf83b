"""Zero-energy Green function and the Birman-Schwinger operator on a grid.

Functions are carried in the *unweighted* form ``u`` (the radial wave
function).  The weighted form used by the symmetric kernel is
``phi = sqrt(v) u``; inner products of weighted functions become
``int v f g dr`` on unweighted ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GridMismatch, NonFinite
from .potential import PotentialShape, as_ell
from .quadrature import DEFAULT_SCHEME, QuadratureScheme, RadialGrid, build_grid

UNWEIGHTED = "u"
WEIGHTED = "phi"


def green_function(ell, r, rp):
    """``(2l+1)^-1 min(r, r')^(l+1) max(r, r')^(-l)``; broadcasts over arrays."""
    ell = as_ell(ell)
    lo = np.minimum(r, rp)
    hi = np.maximum(r, rp)
    return lo ** (ell + 1) * hi ** (-ell) / (2 * ell + 1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: RadialGrid
    values: np.ndarray
    meaning: str = UNWEIGHTED

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.nodes.shape:
            raise GridMismatch("values do not match the grid")
        if not np.all(np.isfinite(vals)):
            raise NonFinite("grid function has non-finite values")
        object.__setattr__(self, "values", vals)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values, self.meaning)

    def __mul__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.grid, scalar * self.values, self.meaning)

    __rmul__ = __mul__


def _same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid is not g.grid:
        raise GridMismatch("grid functions live on different grids")


@lru_cache(maxsize=64)
def grid_for(shape: PotentialShape, ell: int, scheme: QuadratureScheme = DEFAULT_SCHEME) -> RadialGrid:
    """Memoised :func:`build_grid`; one grid per ``(shape, ell, scheme)``."""
    return build_grid(shape, ell, scheme)


class Operator:
    """The map ``u -> int g_l(r, r') v(r') u(r') dr'`` on a fixed grid.

    Precomputes ``v`` and the radial powers once, so each application costs
    two running integrals over the grid.
    """

    def __init__(self, shape: PotentialShape, ell=0,
                 scheme: QuadratureScheme = DEFAULT_SCHEME,
                 grid: RadialGrid | None = None):
        self.shape = shape
        self.ell = as_ell(ell)
        self.scheme = scheme
        self.grid = grid if grid is not None else grid_for(shape, self.ell, scheme)
        r = self.grid.nodes
        self.r = r
        self.v = np.asarray(shape.evaluate(r), dtype=float)
        self._inner_pow = r ** (self.ell + 1)
        self._outer_pow = r ** (-float(self.ell))
        self._norm = 1.0 / (2 * self.ell + 1)

    def function(self, values, meaning: str = UNWEIGHTED) -> GridFunction:
        return GridFunction(self.grid, values, meaning)

    def start(self) -> np.ndarray:
        """``r**(l+1)``, the regular free solution."""
        return self._inner_pow.copy()

    def green(self, f: np.ndarray) -> np.ndarray:
        """``int g_l(r, r') f(r') dr'`` at every node."""
        inner = self.grid.prefix(self._inner_pow * f)
        outer = self.grid.suffix(self._outer_pow * f)
        out = self._norm * (self._outer_pow * inner + self._inner_pow * outer)
        if not np.all(np.isfinite(out)):
            raise NonFinite("operator application overflowed")
        return out

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.green(self.v * u)

    def apply_weighted(self, psi: np.ndarray) -> np.ndarray:
        """Symmetric kernel on weighted functions: ``sqrt(v) G[sqrt(v) psi]``."""
        root = np.sqrt(self.v)
        return root * self.green(root * psi)

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """``int v f g dr`` for unweighted ``f`` and ``g``."""
        return self.grid.integrate(self.v * f * g)


def apply_operator(shape: PotentialShape, ell, u: GridFunction,
                   scheme: QuadratureScheme = DEFAULT_SCHEME) -> GridFunction:
    """One step of the iteration ``u -> int v g_l u``."""
    op = Operator(shape, ell, scheme, grid=u.grid)
    return op.function(op.apply(u.values))


def weighted_inner(shape: PotentialShape, f: GridFunction, g: GridFunction) -> float:
    """``int v f g dr``; symmetric and bilinear."""
    _same_grid(f, g)
    v = shape.evaluate(f.grid.nodes)
    return f.grid.integrate(v * f.values * g.values)


def trace_iterated(shape: PotentialShape, ell, n: int,
                   scheme: QuadratureScheme = DEFAULT_SCHEME) -> float:
    """Trace of the first or second iterated Birman-Schwinger kernel.

    ``n = 1``: ``int K(r, r) dr``; ``n = 2``: ``int int K(r, s)**2 ds dr``.
    Both at unit coupling.
    """
    ell = as_ell(ell)
    op = Operator(shape, ell, scheme)
    k = 2 * ell + 1
    r, v = op.r, op.v
    if n == 1:
        return op.grid.integrate(r * v) / k
    if n == 2:
        # symmetric in (r, s): twice the s < r half
        below = op.grid.prefix(r ** (2 * ell + 2) * v)
        return 2.0 * op.grid.integrate(v * r ** (-2.0 * ell) * below) / k ** 2
    raise ValueError("only traces of order 1 and 2 are supported")
