"""Set propagation through the forward pass, gradient ranges, and the backward
vector-Jacobian-product pass, with a configurable abstract domain per direction.

The forward pass maps the input region through every layer, recording the
pre-activation set at each nonlinearity so that the derivative range of that
nonlinearity can be boxed.  The backward pass then pushes the dual-norm unit
ball through transposed affine maps and elementwise multiplications with
those derivative boxes.  The resulting set contains every attainable
gradient-vector product, so the maximal l1 norm over it upper-bounds the
local (inf,1) Lipschitz constant.

Using hyperboxes in both directions reproduces the classic interval-analysis
bound; zonotopes keep affine layers exact and are tighter on deep networks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InternalInvariantError
from .netio import Affine, NetworkIR, Nonlin
from .normmax import DEFAULT_MAX_DOF, METHOD_ALIASES, NormMaxResult, run_l1max
from .scalarops import ACTIVATIONS
from .sets import (
    Hyperbox,
    Zonotope,
    affine_map_box,
    affine_map_zono,
    hadamard_scale_zono,
    minkowski_sum,
    reduce_generators,
    zono_interval_hull,
)
from .vpfit import MulBounds, vp_fit, vp_fit_mul

HYPERBOX = "hyperbox"
ZONOTOPE = "zonotope"
_DOMAIN_ALIASES = {"box": HYPERBOX, "hyperbox": HYPERBOX,
                   "zono": ZONOTOPE, "zonotope": ZONOTOPE}
#: default generator budget is this multiple of the layer width
BUDGET_WIDTH_FACTOR = 4


@dataclass(frozen=True)
class DomainChoice:
    """Abstract domain per direction; hyperbox/hyperbox is the interval baseline."""

    forward: str = ZONOTOPE
    backward: str = ZONOTOPE

    def __post_init__(self):
        for name in ("forward", "backward"):
            raw = getattr(self, name)
            if raw not in _DOMAIN_ALIASES:
                raise ValueError(f"unknown abstract domain: {raw!r}")
            object.__setattr__(self, name, _DOMAIN_ALIASES[raw])

    @property
    def label(self) -> str:
        """Two-letter tag, forward then backward: ZZ, HH, HZ, or ZH."""
        first = "Z" if self.forward == ZONOTOPE else "H"
        second = "Z" if self.backward == ZONOTOPE else "H"
        return first + second

    @classmethod
    def from_label(cls, label: str) -> "DomainChoice":
        if len(label) != 2 or any(ch not in "HZ" for ch in label.upper()):
            raise ValueError(f"domain label must be two of H/Z, got {label!r}")
        lookup = {"H": HYPERBOX, "Z": ZONOTOPE}
        up = label.upper()
        return cls(lookup[up[0]], lookup[up[1]])


@dataclass
class LayerTrace:
    """Sets recorded while propagating one network over one input region."""

    domain: DomainChoice
    input_set: object
    after_layer: list = field(default_factory=list)
    pre_activation: dict = field(default_factory=dict)
    post_activation: dict = field(default_factory=dict)
    jacobians: dict = field(default_factory=dict)
    backward_sets: list = field(default_factory=list)
    final_backward: object = None


@dataclass
class LipschitzReport:
    """Certified bound plus the configuration and size statistics behind it."""

    bound: float
    norm_method: str
    domain: DomainChoice
    generator_counts: list
    wall_time: float

    def to_dict(self, include_timing: bool = False) -> dict:
        doc = {
            "bound": float(self.bound),
            "norm_method": self.norm_method,
            "domain": {"forward": self.domain.forward, "backward": self.domain.backward},
            "generator_counts": [int(c) for c in self.generator_counts],
        }
        if include_timing:
            doc["wall_time_seconds"] = float(self.wall_time)
        return doc


def _gen_count(s) -> int:
    return s.dof if isinstance(s, Zonotope) else 0


def _budget_for(width: int, budget: int | None) -> int:
    return budget if budget is not None else BUDGET_WIDTH_FACTOR * width


def map_nonlin(kind: str, z: Zonotope) -> Zonotope:
    """Sound zonotope image under an elementwise nonlinearity.

    Each coordinate gets the optimal vertical band over its interval hull;
    the result is the scaled zonotope plus one fresh axis-aligned generator
    per coordinate with a nonzero residual.  Stable coordinates (band of zero
    altitude) stay exact and add no degrees of freedom.
    """
    hull = zono_interval_hull(z)
    d = z.dim
    slopes = np.empty(d)
    intercepts = np.empty(d)
    mus = np.empty(d)
    for i in range(d):
        fit = vp_fit(kind, hull.lower[i], hull.upper[i])
        slopes[i], intercepts[i], mus[i] = fit.slope, fit.intercept, fit.half_altitude
    scaled = hadamard_scale_zono(slopes, z)
    residual = Zonotope(intercepts, _residual_columns(mus))
    return minkowski_sum(scaled, residual)


def _residual_columns(mus: np.ndarray) -> np.ndarray:
    """diag(mu) with zero-altitude columns omitted."""
    idx = np.flatnonzero(mus > 0.0)
    cols = np.zeros((mus.shape[0], idx.shape[0]))
    cols[idx, np.arange(idx.shape[0])] = mus[idx]
    return cols


def map_nonlin_box(kind: str, h: Hyperbox) -> Hyperbox:
    """Exact per-coordinate image of a box; all supported operators are monotone."""
    fn = ACTIVATIONS[kind][0]
    return Hyperbox.from_bounds(fn(h.lower), fn(h.upper))


def elementwise_jacobian(kind: str, z_pre) -> Hyperbox:
    """Box containing the nonlinearity's derivative over the pre-activation set.

    relu uses the 0/1 step of the endpoint signs (derivative at exactly 0 is
    taken as 0).  tanh and sigmoid derivatives peak at 0, so straddling
    intervals reach the peak while stable intervals span the endpoint values.
    """
    hull = z_pre if isinstance(z_pre, Hyperbox) else zono_interval_hull(z_pre)
    lower, upper = hull.lower, hull.upper
    if kind == "relu":
        jl = np.where(lower > 0.0, 1.0, 0.0)
        ju = np.where(upper > 0.0, 1.0, 0.0)
    elif kind in ("tanh", "sigmoid"):
        deriv = ACTIVATIONS[kind][1]
        far = np.maximum(np.abs(lower), np.abs(upper))
        near = np.minimum(np.abs(lower), np.abs(upper))
        jl = deriv(far)
        ju = np.where((lower <= 0.0) & (upper >= 0.0), deriv(0.0), deriv(near))
    else:
        raise ValueError(f"unsupported nonlinearity: {kind!r}")
    return Hyperbox.from_bounds(jl, ju)


def elementwise_mul_set(j: Hyperbox, y: Zonotope) -> Zonotope:
    """Sound zonotope image of {x * z : x in j, z in y}, coordinatewise bands."""
    if j.dim != y.dim:
        raise DimensionMismatch("jacobian box and set dimensions differ")
    hull = zono_interval_hull(y)
    d = y.dim
    slopes = np.empty(d)
    intercepts = np.empty(d)
    mus = np.empty(d)
    for i in range(d):
        fit = vp_fit_mul(MulBounds(hull.lower[i], hull.upper[i],
                                   j.lower[i], j.upper[i]))
        slopes[i], intercepts[i], mus[i] = fit.slope, fit.intercept, fit.half_altitude
    scaled = hadamard_scale_zono(slopes, y)
    residual = Zonotope(intercepts, _residual_columns(mus))
    return minkowski_sum(scaled, residual)


def elementwise_mul_box(j: Hyperbox, y: Hyperbox) -> Hyperbox:
    """Tightest box for a coordinatewise interval product (interval arithmetic)."""
    if j.dim != y.dim:
        raise DimensionMismatch("jacobian box and set dimensions differ")
    corners = np.stack([j.lower * y.lower, j.lower * y.upper,
                        j.upper * y.lower, j.upper * y.upper])
    return Hyperbox.from_bounds(corners.min(axis=0), corners.max(axis=0))


def forward_pass(net: NetworkIR, x_region: Hyperbox, domain: DomainChoice,
                 budget: int | None = None) -> LayerTrace:
    """Propagate the input region through every layer, recording everything the
    backward pass needs (pre-activation hulls and derivative boxes)."""
    if x_region.dim != net.input_dim:
        raise DimensionMismatch(
            f"region dimension {x_region.dim} does not match input {net.input_dim}"
        )
    use_zono = domain.forward == ZONOTOPE
    cur = x_region.to_zonotope() if use_zono else x_region
    trace = LayerTrace(domain=domain, input_set=cur)
    for idx, layer in enumerate(net.layers):
        if isinstance(layer, Affine):
            if not np.isfinite(layer.weight).all():
                raise InternalInvariantError("non-finite weights in affine layer")
            if use_zono:
                cur = affine_map_zono(layer.weight, layer.bias, cur)
            else:
                cur = affine_map_box(layer.weight, layer.bias, cur)
        else:
            trace.pre_activation[idx] = cur
            trace.jacobians[idx] = elementwise_jacobian(layer.kind, cur)
            if use_zono:
                cur = map_nonlin(layer.kind, cur)
                cur = reduce_generators(cur, _budget_for(cur.dim, budget))
            else:
                cur = map_nonlin_box(layer.kind, cur)
            trace.post_activation[idx] = cur
        trace.after_layer.append(cur)
    return trace


def backward_pass(net: NetworkIR, trace: LayerTrace, domain: DomainChoice | None = None,
                  budget: int | None = None):
    """Push the dual unit ball backwards through the recorded trace.

    Affine layers apply their transpose with no bias; nonlinearity layers
    multiply elementwise with the stored derivative box.  A trailing output
    nonlinearity therefore multiplies the dual ball first.  Returns the final
    set, a superset of all attainable gradient-vector products.
    """
    domain = trace.domain if domain is None else domain
    missing = [i for i, l in enumerate(net.layers)
               if isinstance(l, Nonlin) and i not in trace.jacobians]
    if missing:
        raise InternalInvariantError(f"trace lacks jacobians for layers {missing}")
    use_zono = domain.backward == ZONOTOPE
    out = net.output_dim
    if use_zono:
        cur = Zonotope(np.zeros(out), np.eye(out))
    else:
        cur = Hyperbox(np.zeros(out), np.ones(out))
    trace.backward_sets = [cur]
    for idx in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[idx]
        if isinstance(layer, Affine):
            wt = layer.weight.T
            zero = np.zeros(wt.shape[0])
            cur = (affine_map_zono(wt, zero, cur) if use_zono
                   else affine_map_box(wt, zero, cur))
        else:
            jac = trace.jacobians[idx]
            if use_zono:
                cur = elementwise_mul_set(jac, cur)
                cur = reduce_generators(cur, _budget_for(cur.dim, budget))
            else:
                cur = elementwise_mul_box(jac, cur)
        trace.backward_sets.append(cur)
    trace.final_backward = cur
    return cur


def zlip(net: NetworkIR, x_region: Hyperbox, domain: DomainChoice | None = None,
         norm_method: str = "lp", budget: int | None = None,
         max_dof: int = DEFAULT_MAX_DOF) -> LipschitzReport:
    """Certified upper bound on the local (inf,1) Lipschitz constant.

    Runs the forward pass, derivative boxing, and backward pass over the
    region, then maximizes the l1 norm over the final set with the requested
    method.  The dual ball is always the inf-norm unit ball, matching the
    (inf,1) target.
    """
    start = time.monotonic()
    domain = DomainChoice() if domain is None else domain
    trace = forward_pass(net, x_region, domain, budget)
    final = backward_pass(net, trace, domain, budget)
    if isinstance(final, Hyperbox) and METHOD_ALIASES.get(norm_method) == "exact":
        # box coordinates are independent: the exact max is closed form, so
        # skip the vertex enumeration (and its degrees-of-freedom cap)
        witness = np.where(np.abs(final.upper) >= np.abs(final.lower), 1.0, -1.0)
        value = float(np.maximum(np.abs(final.lower), np.abs(final.upper)).sum())
        result = NormMaxResult(value, "exact", witness)
    else:
        z_final = final.to_zonotope() if isinstance(final, Hyperbox) else final
        result = run_l1max(z_final, norm_method, max_dof)
    elapsed = time.monotonic() - start
    if not np.isfinite(result.value) or result.value < 0.0:
        raise InternalInvariantError(f"norm maximization returned {result.value}")
    counts = [_gen_count(s) for s in trace.after_layer]
    counts += [_gen_count(s) for s in trace.backward_sets]
    return LipschitzReport(
        bound=result.value,
        norm_method=result.method,
        domain=domain,
        generator_counts=counts,
        wall_time=elapsed,
    )
