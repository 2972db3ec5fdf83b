"""Attractive radial shapes ``v(r) >= 0`` for ``V(r) = -g v(r)``.

Lengths are in units of the potential radius (R = 1), so the built-in shapes
carry no parameters.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InputError, NegativeValue, NonMonotonicGrid, UnknownPotential

TAIL_FRACTION = 1e-12


@dataclass(frozen=True)
class AngularMomentum:
    ell: int

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 0:
            raise ValueError(f"ell must be a non-negative integer, got {self.ell!r}")
        object.__setattr__(self, "ell", int(self.ell))

    @property
    def lam(self) -> float:
        return self.ell + 0.5


def as_ell(ell) -> int:
    """Accept an ``int`` or :class:`AngularMomentum` and return the integer."""
    if isinstance(ell, AngularMomentum):
        return ell.ell
    return AngularMomentum(ell).ell


@dataclass(frozen=True, eq=False)
class PotentialShape:
    """Immutable non-negative radial profile.

    Attributes
    ----------
    evaluate : callable
        Vectorised ``r -> v(r)`` for ``r > 0``.
    support_cutoff : float or None
        Radius beyond which ``v`` vanishes identically.
    effective_range : float
        Radius past which the ``r v`` tail is negligible.
    origin_exponent : float
        ``s`` with ``v(r) ~ r**s`` as ``r -> 0``.
    stretch : int
        The shape is smooth in ``x = r**(1/stretch)``; only the S-wave
        reduction produces values other than 1.
    breakpoints : tuple of float
        Radii where ``v`` is not smooth.
    """
    evaluate: Callable[[np.ndarray], np.ndarray]
    label: str
    support_cutoff: float | None = None
    effective_range: float | None = None
    origin_exponent: float = 0.0
    stretch: int = 1
    breakpoints: tuple[float, ...] = ()
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        probe_hi = self.support_cutoff or self.effective_range or 10.0
        probe = np.geomspace(1e-6, probe_hi, 257) if probe_hi > 1e-6 else np.array([probe_hi])
        vals = np.asarray(self.evaluate(probe), dtype=float)
        if np.any(vals < 0):
            bad = probe[np.argmax(vals < 0)]
            raise NegativeValue(f"{self.label}: v({bad:g}) < 0")
        if self.effective_range is None:
            if self.support_cutoff is not None:
                object.__setattr__(self, "effective_range", float(self.support_cutoff))
            else:
                from .quadrature import tail_radius
                rng = tail_radius(self, 1.0, TAIL_FRACTION)
                object.__setattr__(self, "effective_range", rng)
        if self.support_cutoff is not None and self.effective_range < self.support_cutoff:
            raise ValueError("effective_range must not be below support_cutoff")

    def __call__(self, r):
        return self.evaluate(np.asarray(r, dtype=float))


def _square(r):
    return np.where(np.asarray(r) < 1.0, 1.0, 0.0)


def _exponential(r):
    return np.exp(-np.asarray(r, dtype=float))


def _r_exponential(r):
    r = np.asarray(r, dtype=float)
    return r * np.exp(-r)


def make_square_well() -> PotentialShape:
    return PotentialShape(_square, "SW", support_cutoff=1.0, origin_exponent=0.0,
                          breakpoints=(1.0,), meta={"builtin": "sw"})


def make_exponential() -> PotentialShape:
    return PotentialShape(_exponential, "E", origin_exponent=0.0, meta={"builtin": "exp"})


def make_r_exponential() -> PotentialShape:
    return PotentialShape(_r_exponential, "PE", origin_exponent=1.0, meta={"builtin": "pe"})


def from_table(samples: Sequence[tuple[float, float]], label: str = "table") -> PotentialShape:
    """Shape interpolating ``(radius, value)`` samples.

    Uses piecewise-cubic Hermite interpolation with monotone slopes, so the
    interpolant never dips below zero between non-negative nodes.  The shape
    is zero past the last radius and constant below the first.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 4:
        raise InputError("need at least 4 (radius, value) pairs")
    r, v = data[:, 0], data[:, 1]
    if np.any(np.diff(r) <= 0):
        raise NonMonotonicGrid("radii must be strictly increasing")
    if r[0] < 0:
        raise NonMonotonicGrid("radii must be non-negative")
    if np.any(v < 0):
        raise NegativeValue(f"negative sample value {v.min():g}")
    interp = PchipInterpolator(r, v, extrapolate=False)
    r0, r_last, v0 = r[0], r[-1], v[0]

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        out = interp(np.clip(x, r0, r_last))
        out = np.where(x > r_last, 0.0, out)
        return np.maximum(np.nan_to_num(out, nan=v0), 0.0)

    return PotentialShape(evaluate, label, support_cutoff=float(r_last),
                          effective_range=float(r_last), origin_exponent=0.0,
                          breakpoints=tuple(float(x) for x in r if x > 0),
                          meta={"table": data})


def load_table(path: str | Path) -> PotentialShape:
    """Read a two-column (radius, value) text file.

    Columns may be separated by whitespace or commas; ``#`` starts a comment.
    """
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 2 columns, got {len(parts)}")
        rows.append((float(parts[0]), float(parts[1])))
    return from_table(rows, label=Path(path).name)


def reduce_to_s_wave(shape: PotentialShape, ell) -> PotentialShape:
    """Map the ``ell``-wave critical problem onto an equivalent S-wave one.

    ``W(r) = k**-2 v(r**(1/k)) r**(-2(k-1)/k)`` with ``k = 2 ell + 1``.
    """
    ell = as_ell(ell)
    if ell == 0:
        return shape
    k = 2 * ell + 1
    inner = shape.evaluate

    def evaluate(r):
        r = np.asarray(r, dtype=float)
        x = r ** (1.0 / k)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            # two half powers keep the intermediate product inside double range
            half = x ** (1.0 - k)
            out = inner(x) * half / k ** 2 * half
        return out

    cut = None if shape.support_cutoff is None else shape.support_cutoff ** k
    return PotentialShape(
        evaluate, f"W{ell}[{shape.label}]",
        support_cutoff=cut,
        effective_range=shape.effective_range ** k,
        origin_exponent=(shape.origin_exponent - 4 * ell) / k,
        stretch=shape.stretch * k,
        breakpoints=tuple(b ** k for b in shape.breakpoints),
        meta={"parent": shape, "ell": ell},
    )


BUILTINS: dict[str, Callable[[], PotentialShape]] = {
    "sw": make_square_well,
    "exp": make_exponential,
    "pe": make_r_exponential,
}
_ALIASES = {"square_well": "sw", "e": "exp", "exponential": "exp",
            "r_exponential": "pe"}


def resolve_potential(selector: str) -> PotentialShape:
    """Turn a CLI selector (``sw``, ``exp``, ``pe``, ``file:PATH``) into a shape."""
    if selector.startswith("file:"):
        path = selector[5:]
        if not Path(path).is_file():
            raise UnknownPotential(f"no such table file: {path}")
        return load_table(path)
    key = _ALIASES.get(selector.lower(), selector.lower())
    if key not in BUILTINS:
        raise UnknownPotential(
            f"unknown potential {selector!r}; choose from {sorted(BUILTINS)} or file:PATH")
    return BUILTINS[key]()
