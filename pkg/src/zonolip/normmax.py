"""Maximal l1 norm over a zonotope: box bound, linear-time LP bound, exact.

Maximizing the l1 norm over a zonotope is equivalent to the inf-to-1 matrix
norm (prepend the center as an extra column), so the exact method is
exponential in the degrees of freedom.  The LP relaxation replaces |z_i| on
coordinates whose range straddles zero by the upper hull of the absolute
value, which collapses to a single closed-form linear maximization and runs
in time linear in the number of generator entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sets import Zonotope, zono_interval_hull, zono_linmax

#: below this interval width an unstable coordinate is treated as the point c_i
DEGENERATE_WIDTH = 1e-12

#: enumeration cap for the exact method (2^20 vertices)
DEFAULT_MAX_DOF = 20


@dataclass(frozen=True)
class NormMaxResult:
    value: float
    method: str
    witness: np.ndarray | None = None


def l1max_hyperbox(z: Zonotope) -> NormMaxResult:
    """Upper bound via the tightest containing box: sum of max(|l_i|, |u_i|)."""
    hull = zono_interval_hull(z)
    value = float(np.maximum(np.abs(hull.lower), np.abs(hull.upper)).sum())
    return NormMaxResult(value, "hyperbox")


def l1max_lp(z: Zonotope) -> NormMaxResult:
    """LP relaxation of the l1 maximization, solved in closed form.

    Coordinates are split by the interval hull: definitely nonpositive ones
    contribute -z_i, definitely positive ones +z_i, and straddling ones the
    absolute-value upper hull (u+l)/(u-l) * z_i - 2ul/(u-l).  The resulting
    linear objective is maximized over the zonotope in closed form.
    """
    hull = zono_interval_hull(z)
    lower, upper = hull.lower, hull.upper
    width = upper - lower

    coef = np.empty(z.dim)
    degenerate = width < DEGENERATE_WIDTH
    neg = (upper <= 0.0) & ~degenerate
    pos = (lower > 0.0) & ~degenerate
    straddle = ~(neg | pos | degenerate)

    coef[neg] = -1.0
    coef[pos] = 1.0
    # a near-point coordinate contributes |c_i| exactly, avoiding the 1/width blowup
    coef[degenerate] = np.where(z.center[degenerate] >= 0.0, 1.0, -1.0)
    coef[straddle] = (upper[straddle] + lower[straddle]) / width[straddle]
    constant = float((-2.0 * upper[straddle] * lower[straddle] / width[straddle]).sum())

    lin = zono_linmax(z, coef)
    return NormMaxResult(constant + lin.value, "lp", lin.witness)


def l1max_exact(z: Zonotope, max_dof: int = DEFAULT_MAX_DOF) -> NormMaxResult:
    """Exact maximal l1 norm by enumerating all sign vectors of the generators.

    The maximum is attained at a vertex, i.e. some y in {-1,+1}^m.  Ties
    resolve to the lexicographically smallest witness (with -1 < +1), which
    keeps the result deterministic.  Requires m <= max_dof.
    """
    m = z.dof
    if m > max_dof:
        raise ValueError(f"zonotope has {m} degrees of freedom, exact cap is {max_dof}")
    if m == 0:
        return NormMaxResult(float(np.abs(z.center).sum()), "exact", np.zeros(0))
    best_val = -np.inf
    best_witness = None
    chunk = 1 << 14
    for lo in range(0, 1 << m, chunk):
        ks = np.arange(lo, min(lo + chunk, 1 << m))
        signs = np.where((ks[:, None] >> np.arange(m - 1, -1, -1)) & 1, 1.0, -1.0)
        vals = np.abs(z.center + signs @ z.generators.T).sum(axis=1)
        idx = int(np.argmax(vals))  # first max: lexicographically smallest
        if float(vals[idx]) > best_val:
            best_val = float(vals[idx])
            best_witness = signs[idx]
    return NormMaxResult(best_val, "exact", best_witness)


_METHODS = {
    "hyperbox": l1max_hyperbox,
    "lp": l1max_lp,
    "exact": l1max_exact,
}

#: CLI short names for the methods
METHOD_ALIASES = {"box": "hyperbox", "hyperbox": "hyperbox", "lp": "lp", "exact": "exact"}


def run_l1max(z: Zonotope, method: str, max_dof: int = DEFAULT_MAX_DOF) -> NormMaxResult:
    """Dispatch to the requested l1 maximization method."""
    canonical = METHOD_ALIASES.get(method)
    if canonical is None:
        raise ValueError(f"unknown norm method: {method!r}")
    if canonical == "exact":
        return l1max_exact(z, max_dof)
    return _METHODS[canonical](z)


def matnorm_inf_to_1(M, method: str = "exact", max_dof: int = DEFAULT_MAX_DOF) -> float:
    """inf-to-1 matrix norm via l1 maximization over Z(0, M).

    The zero center realizes the zero column of the reduction, so the value
    equals max over sign vectors v of ||M v||_1 for the exact method, and an
    upper bound for the relaxed methods.
    """
    M = np.asarray(M, dtype=np.float64)
    z = Zonotope(np.zeros(M.shape[0]), M)
    return run_l1max(z, method, max_dof).value
