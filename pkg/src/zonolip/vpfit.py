"""Optimal vertical-parallelogram fits for scalar operators over an interval.

A vertical parallelogram is the set of points within vertical distance ``mu``
of a line ``L(z) = slope * z + intercept`` over a source interval.  Fitting
finds the band of minimal half-altitude ``mu`` that contains the graph of an
operator (relu, abs, tanh, sigmoid) or the product set
``{(z, x*z) : z in [lz, uz], x in [lx, ux]}``.

The fits are built from the convex upper/lower hulls of the target set.  For
the S-shaped operators the hull tangency points are found by bisection on the
secant-slope residual; the returned half-altitude is inflated by a small
deterministic slack that covers root-finding and floating-point error, so the
band is sound, not just sound-up-to-rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalInvariantError
from .scalarops import sigmoid, sigmoid_deriv, tanh_deriv

#: soundness tolerance used by verification oracles
TOL_SOUND = 1e-9
#: absolute x-tolerance of hull tangency bisection
ROOT_TOL = 1e-12
_BISECT_MAX_ITERS = 200
_EPS = np.finfo(np.float64).eps

_S_SHAPED = {
    "tanh": (np.tanh, tanh_deriv),
    "sigmoid": (sigmoid, sigmoid_deriv),
}


@dataclass(frozen=True)
class VPFit:
    """Band parameters: the line ``slope * z + intercept`` plus half-altitude."""

    slope: float
    intercept: float
    half_altitude: float

    def line(self, z):
        return self.slope * np.asarray(z, dtype=np.float64) + self.intercept


@dataclass(frozen=True)
class MulBounds:
    """Ranges for interval-times-interval multiplication: z in [lz,uz], x in [lx,ux]."""

    lz: float
    uz: float
    lx: float
    ux: float

    def __post_init__(self):
        if not (self.lz <= self.uz and self.lx <= self.ux):
            raise ValueError("multiplication bounds must be ordered")


@dataclass(frozen=True)
class PiecewiseHull:
    """Concave upper hull as alternating secant/function segments.

    ``segments[i]`` spans ``[breakpoints[i], breakpoints[i+1]]`` and is either
    ``("secant", slope, intercept)`` or ``("function", kind)``.
    """

    breakpoints: tuple
    segments: tuple

    def evaluate(self, z):
        z = np.asarray(z, dtype=np.float64)
        out = np.empty_like(z)
        edges = self.breakpoints
        for i, seg in enumerate(self.segments):
            lo, hi = edges[i], edges[i + 1]
            mask = (z >= lo) & (z <= hi) if i == 0 else (z > lo) & (z <= hi)
            if seg[0] == "secant":
                out[mask] = seg[1] * z[mask] + seg[2]
            else:
                out[mask] = _S_SHAPED[seg[1]][0](z[mask])
        return out


def _check_interval(l: float, u: float) -> tuple[float, float]:
    l, u = float(l), float(u)
    if not (math.isfinite(l) and math.isfinite(u)):
        raise ValueError("interval endpoints must be finite")
    if l > u:
        raise ValueError(f"interval is reversed: [{l}, {u}]")
    return l, u


def _slack(slope: float, intercept: float, mu: float, l: float, u: float,
           root_err: float = 0.0) -> float:
    """Deterministic inflation covering rounding and root-finding error."""
    scale = abs(slope) * max(abs(l), abs(u)) + abs(intercept) + mu
    return 16.0 * _EPS * scale + root_err


def vp_fit_relu(l: float, u: float) -> VPFit:
    """Optimal band for relu over [l, u]; exact affine on stable intervals."""
    l, u = _check_interval(l, u)
    if u <= 0.0:
        return VPFit(0.0, 0.0, 0.0)
    if l >= 0.0:
        return VPFit(1.0, 0.0, 0.0)
    slope = u / (u - l)
    mu = -u * l / (2.0 * (u - l))
    mu += _slack(slope, mu, mu, l, u)
    return VPFit(slope, mu, mu)


def vp_fit_abs(l: float, u: float) -> VPFit:
    """Optimal band for |z| over [l, u]."""
    l, u = _check_interval(l, u)
    if l >= 0.0:
        return VPFit(1.0, 0.0, 0.0)
    if u <= 0.0:
        return VPFit(-1.0, 0.0, 0.0)
    slope = (u + l) / (u - l)
    mu = -u * l / (u - l)
    mu += _slack(slope, mu, mu, l, u)
    return VPFit(slope, mu, mu)


def vp_fit_mul(b: MulBounds) -> VPFit:
    """Optimal band for {(z, x*z)} with z in [lz,uz] and x in [lx,ux].

    The hulls are lines in every case, so the center line passes through the
    origin and the intercept is always 0.  The slope is the midpoint of the
    admissible slope range [lx, ux].
    """
    lz, uz, lx, ux = b.lz, b.uz, b.lx, b.ux
    if lx == ux:
        return VPFit(lx, 0.0, 0.0)
    slope = 0.5 * (lx + ux)
    mu = 0.5 * (ux - lx) * max(abs(lz), abs(uz))
    if mu == 0.0:
        return VPFit(slope, 0.0, 0.0)
    mu += _slack(slope, 0.0, mu, lz, uz)
    return VPFit(slope, 0.0, mu)


def _bisect(fn, lo: float, hi: float) -> float:
    """Bisection for a sign change of fn on [lo, hi].

    Runs to adjacent floats (within the 200-iteration cap), which keeps the
    root tighter than the ROOT_TOL slack budgeted into every fit.
    """
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise InternalInvariantError(
            f"bisection bracket [{lo}, {hi}] has no sign change"
        )
    for _ in range(_BISECT_MAX_ITERS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _band_extrema(f, df, slope: float, l: float, u: float) -> tuple[float, float]:
    """Max and min of f(z) - slope*z over [l, u] for an S-shaped f.

    f' is increasing on the convex side (z <= 0) and decreasing on the concave
    side, so f' = slope has at most one root per side; the extrema lie at those
    roots or at the endpoints.
    """
    candidates = [l, u]
    for lo, hi in ((l, min(0.0, u)), (max(0.0, l), u)):
        if lo >= hi:
            continue
        rl, rh = df(lo) - slope, df(hi) - slope
        if rl == 0.0 or rh == 0.0 or (rl > 0.0) != (rh > 0.0):
            candidates.append(_bisect(lambda x: df(x) - slope, lo, hi))
    vals = [f(c) - slope * c for c in candidates]
    return max(vals), min(vals)


def _upper_tangency(f, df, l: float, u: float) -> float | None:
    """Tangency point x of the upper-hull secant launched from (l, f(l)).

    Solves f'(x) = (f(x) - f(l)) / (x - l) on the concave side.  Returns None
    when the secant to u never flattens, i.e. the whole upper hull is the
    endpoint chord.
    """
    def residual(x):
        return df(x) - (f(x) - f(l)) / (x - l)

    if residual(u) >= 0.0:
        return None
    if residual(0.0) <= 0.0:
        # mathematically positive, but rounds to <= 0 when l is a hair below
        # zero; the tangency then degenerates to the inflection point
        return 0.0
    return _bisect(residual, 0.0, u)


def _lower_tangency(f, df, l: float, u: float) -> float | None:
    """Mirror of _upper_tangency: lower-hull secant anchored at (u, f(u))."""
    def residual(x):
        return df(x) - (f(x) - f(u)) / (x - u)

    if residual(l) >= 0.0:
        return None
    if residual(0.0) <= 0.0:
        return 0.0
    return _bisect(residual, l, 0.0)


def vp_fit_sshaped(kind: str, l: float, u: float) -> VPFit:
    """Optimal band for tanh or sigmoid over [l, u].

    Three regimes: convex (u <= 0) and concave (l >= 0) intervals use the
    endpoint secant slope; straddling intervals take the slope from the hull
    tangency secants (the flatter of the two when both exist).  Given the
    slope, the intercept and half-altitude come from the exact extrema of
    f(z) - slope*z, which keeps the band sound even if the tangency root is
    slightly off; the bisection tolerance is added to mu on top.
    """
    if kind not in _S_SHAPED:
        raise ValueError(f"unsupported S-shaped operator: {kind!r}")
    l, u = _check_interval(l, u)
    f, df = _S_SHAPED[kind]

    if l == u:
        slope = float(df(l))
        return VPFit(slope, float(f(l)) - slope * l, 0.0)

    secant = (float(f(u)) - float(f(l))) / (u - l)
    if u <= 0.0 or l >= 0.0:
        slope = secant
    else:
        x_star = _upper_tangency(f, df, l, u)
        x_dag = _lower_tangency(f, df, l, u)
        if x_star is not None and x_dag is not None:
            lam_plus = (float(f(x_star)) - float(f(l))) / (x_star - l)
            lam_minus = (float(f(u)) - float(f(x_dag))) / (u - x_dag)
            # the altitude is piecewise concave; its max sits on the side of
            # the flatter tangency secant, where both hull slopes agree
            slope = min(lam_plus, lam_minus)
        else:
            slope = secant

    top, bot = _band_extrema(f, df, slope, l, u)
    mu = 0.5 * (top - bot)
    intercept = 0.5 * (top + bot)
    mu += _slack(slope, intercept, mu, l, u, root_err=ROOT_TOL)
    return VPFit(slope, intercept, mu)


def vp_fit(kind: str, l: float, u: float) -> VPFit:
    """Dispatch by operator kind (relu, abs, tanh, sigmoid)."""
    if kind == "relu":
        return vp_fit_relu(l, u)
    if kind == "abs":
        return vp_fit_abs(l, u)
    return vp_fit_sshaped(kind, l, u)


def upper_hull_giftwrap(kind: str, l: float, u: float) -> PiecewiseHull:
    """Concave upper hull of {(z, f(z))} for an S-shaped operator.

    Convex stretches produce a single endpoint secant, concave stretches the
    function itself; straddling intervals sweep a secant from the left
    endpoint to its tangency point and follow the function afterwards.
    """
    if kind not in _S_SHAPED:
        raise ValueError(f"unsupported operator for hull construction: {kind!r}")
    l, u = _check_interval(l, u)
    f, df = _S_SHAPED[kind]
    if l >= 0.0:
        return PiecewiseHull((l, u), (("function", kind),))

    def chord():
        slope = (float(f(u)) - float(f(l))) / (u - l) if u > l else float(df(l))
        return PiecewiseHull((l, u), (("secant", slope, float(f(l)) - slope * l),))

    if u <= 0.0:
        return chord()
    x_star = _upper_tangency(f, df, l, u)
    if x_star is None:
        return chord()
    slope = (float(f(x_star)) - float(f(l))) / (x_star - l)
    sec = ("secant", slope, float(f(l)) - slope * l)
    return PiecewiseHull((l, x_star, u), (sec, ("function", kind)))


def _verification_grid(l: float, u: float, grid_n: int) -> np.ndarray:
    grid = np.linspace(l, u, grid_n)
    if l < 0.0 < u:
        # kinked operators peak exactly at 0; make sure the grid sees it
        grid = np.union1d(grid, [0.0])
    return grid


def vp_verify(fit: VPFit, op, l: float | None = None, u: float | None = None,
              grid_n: int = 4097) -> float:
    """Max band violation of a fit on a dense grid; soundness means <= TOL_SOUND.

    ``op`` is an operator kind string, or a MulBounds for multiplication (the
    deviation is affine in the multiplier, so the x-lattice only needs the two
    extreme multipliers).
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    if isinstance(op, MulBounds):
        lo = op.lz if l is None else float(l)
        hi = op.uz if u is None else float(u)
        z = _verification_grid(lo, hi, grid_n)
        dev = np.concatenate([np.abs(x * z - fit.line(z)) for x in (op.lx, op.ux)])
        return float(dev.max() - fit.half_altitude)
    fns = {"relu": lambda z: np.maximum(z, 0.0), "abs": np.abs,
           "tanh": np.tanh, "sigmoid": sigmoid}
    if op not in fns:
        raise ValueError(f"unsupported operator: {op!r}")
    z = _verification_grid(float(l), float(u), grid_n)
    dev = np.abs(fns[op](z) - fit.line(z))
    return float(dev.max() - fit.half_altitude)
