"""Hyperboxes and zonotopes: the two abstract domains, with closed-form operations.

A hyperbox ``H(c, r)`` is ``{c + r*y : |y|_inf <= 1}`` with ``r >= 0``.  A
zonotope ``Z(c, E)`` is ``{c + E y : |y|_inf <= 1}`` where the columns of the
``d x m`` generator matrix ``E`` are the degrees of freedom.  All values are
immutable after construction and every operation is a pure function, so
instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def _check_dim(actual: int, expected: int, what: str) -> None:
    if actual != expected:
        raise DimensionMismatch(f"{what}: got dimension {actual}, expected {expected}")


@dataclass(frozen=True)
class Hyperbox:
    """Axis-aligned box with center ``center`` and nonnegative ``radius``."""

    center: np.ndarray
    radius: np.ndarray

    def __post_init__(self):
        c = _freeze(np.atleast_1d(self.center))
        r = _freeze(np.atleast_1d(self.radius))
        if c.ndim != 1 or r.ndim != 1:
            raise DimensionMismatch("hyperbox center and radius must be vectors")
        if c.shape != r.shape:
            raise DimensionMismatch(
                f"hyperbox center/radius shape mismatch: {c.shape} vs {r.shape}"
            )
        if r.size and float(r.min()) < 0.0:
            raise ValueError("hyperbox radius must be nonnegative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.radius

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.radius

    @classmethod
    def from_bounds(cls, lower, upper) -> "Hyperbox":
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        return cls((lower + upper) / 2.0, (upper - lower) / 2.0)

    def to_zonotope(self) -> "Zonotope":
        """Exact cast: one axis-aligned generator per coordinate."""
        return Zonotope(self.center, np.diag(self.radius))

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(np.abs(x - self.center) <= self.radius + tol))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n uniform points in the box, one per row."""
        y = rng.uniform(-1.0, 1.0, size=(n, self.dim))
        return self.center + y * self.radius


@dataclass(frozen=True)
class Zonotope:
    """Zonotope in generator representation; ``generators`` is ``d x m``."""

    center: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        c = _freeze(np.atleast_1d(self.center))
        g = np.asarray(self.generators, dtype=np.float64)
        if g.size == 0:
            g = g.reshape(c.shape[0], 0)
        if c.ndim != 1 or g.ndim != 2:
            raise DimensionMismatch("zonotope center must be a vector, generators a matrix")
        if g.shape[0] != c.shape[0]:
            raise DimensionMismatch(
                f"zonotope generators have {g.shape[0]} rows for dimension {c.shape[0]}"
            )
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "generators", _freeze(g))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def dof(self) -> int:
        """Number of generator columns (degrees of freedom); 0 is a point."""
        return self.generators.shape[1]

    @classmethod
    def point(cls, center) -> "Zonotope":
        center = np.atleast_1d(np.asarray(center, dtype=np.float64))
        return cls(center, np.zeros((center.shape[0], 0)))

    def point_at(self, y) -> np.ndarray:
        """Concretize the coefficient vector y (``|y|_inf <= 1`` for membership)."""
        y = np.asarray(y, dtype=np.float64)
        return self.center + self.generators @ y

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        y = rng.uniform(-1.0, 1.0, size=(n, self.dof))
        return self.center + y @ self.generators.T


@dataclass(frozen=True)
class LinMaxResult:
    """Value of a linear maximization plus, for zonotopes, the maximizing signs."""

    value: float
    witness: np.ndarray | None = None


def box_linmax(h: Hyperbox, a) -> float:
    """max of a^T x over the box, in closed form: a^T c + ||a * r||_1."""
    a = np.asarray(a, dtype=np.float64)
    _check_dim(a.shape[0], h.dim, "box_linmax objective")
    return float(a @ h.center + np.abs(a * h.radius).sum())


def zono_linmax(z: Zonotope, a) -> LinMaxResult:
    """max of a^T x over the zonotope: a^T c + ||E^T a||_1.

    The witness is the sign vector attaining the max, with sign(0) := +1 so
    witnesses are deterministic.
    """
    a = np.asarray(a, dtype=np.float64)
    _check_dim(a.shape[0], z.dim, "zono_linmax objective")
    proj = z.generators.T @ a
    witness = np.where(proj >= 0.0, 1.0, -1.0)
    value = float(a @ z.center + np.abs(proj).sum())
    return LinMaxResult(value, witness)


def zono_interval_hull(z: Zonotope) -> Hyperbox:
    """Tightest box containing the zonotope: radius is the row-wise l1 norm of E."""
    return Hyperbox(z.center, np.abs(z.generators).sum(axis=1))


def affine_map_box(W, b, h: Hyperbox) -> Hyperbox:
    """Tightest box containing the affine image: H(Wc + b, |W| r)."""
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dim(W.shape[1], h.dim, "affine_map_box input")
    _check_dim(b.shape[0], W.shape[0], "affine_map_box bias")
    return Hyperbox(W @ h.center + b, np.abs(W) @ h.radius)


def affine_map_zono(W, b, z: Zonotope) -> Zonotope:
    """Exact affine image Z(Wc + b, WE); zonotopes are closed under affine maps."""
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dim(W.shape[1], z.dim, "affine_map_zono input")
    _check_dim(b.shape[0], W.shape[0], "affine_map_zono bias")
    return Zonotope(W @ z.center + b, W @ z.generators)


def minkowski_sum(z1: Zonotope, z2: Zonotope) -> Zonotope:
    """Centers add, generator columns concatenate."""
    _check_dim(z2.dim, z1.dim, "minkowski_sum operand")
    return Zonotope(z1.center + z2.center, np.hstack([z1.generators, z2.generators]))


def hadamard_scale_zono(lam, z: Zonotope) -> Zonotope:
    """Coordinatewise scaling: Z(lam * c, diag(lam) E)."""
    lam = np.asarray(lam, dtype=np.float64)
    _check_dim(lam.shape[0], z.dim, "hadamard_scale_zono factor")
    return Zonotope(lam * z.center, lam[:, None] * z.generators)


def drop_zero_generators(z: Zonotope) -> Zonotope:
    """Explicit cleanup: remove all-zero generator columns."""
    keep = np.abs(z.generators).sum(axis=0) > 0.0
    return Zonotope(z.center, z.generators[:, keep])


def reduce_generators(z: Zonotope, budget: int) -> Zonotope:
    """Sound order reduction to at most ``budget`` columns.

    If the zonotope already fits the budget it is returned unchanged.
    Otherwise the m - budget + d columns of smallest l1 norm (ties broken by
    column index) are replaced by their interval hull, i.e. d axis-aligned
    generators.  The result is a superset of the input.
    """
    if budget < 1:
        raise ValueError("generator budget must be >= 1")
    d, m = z.generators.shape
    if m <= budget:
        return z
    n_collapse = min(m, m - budget + d)
    norms = np.abs(z.generators).sum(axis=0)
    # stable sort keeps index order among equal norms
    order = np.argsort(norms, kind="stable")
    collapse = np.sort(order[:n_collapse])
    keep = np.sort(order[n_collapse:])
    hull_radius = np.abs(z.generators[:, collapse]).sum(axis=1)
    new_gens = np.hstack([z.generators[:, keep], np.diag(hull_radius)])
    return Zonotope(z.center, new_gens)
