"""Network representation, model file format, conv lowering, and ground-truth kit.

Networks are flat sequences of explicit affine maps and elementwise
nonlinearities.  Convolutions (and transpose convolutions) in model files are
lowered eagerly to dense matrices over inputs flattened channel-major, then
row, then column.  The module also provides the concrete machinery everything
else is tested against: forward evaluation, manual vector-Jacobian products,
a sampled Lipschitz lower bound, and seeded random network generation (PCG64,
so fixtures are reproducible).

Model file schema (version "zonolip-net/1")::

    {"version": "zonolip-net/1",
     "input_dim": <int>,
     "layers": [
        {"type": "dense", "rows": R, "cols": C, "w_b64": ..., "b_b64": ...},
        {"type": "conv2d" | "convT2d",
         "in_channels": C, "in_h": H, "in_w": W, "out_channels": O,
         "kh": KH, "kw": KW, "stride": S, "padding": P,
         "w_b64": ..., "b_b64": ...},
        {"type": "relu" | "tanh" | "sigmoid"},
     ]}

Weight blobs are row-major float64, little-endian, base64.  conv2d weights
have shape (out_channels, in_channels, kh, kw) and biases one entry per
output channel; convT2d weights are stored as the mirror convolution's
weights, shape (in_channels, out_channels, kh, kw).
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ChainMismatchError, DimensionMismatch, NonFiniteWeightError, SchemaError
from .scalarops import ACTIVATIONS, NONLIN_KINDS
from .sets import Hyperbox

FORMAT_VERSION = "zonolip-net/1"


@dataclass(frozen=True)
class Affine:
    """Explicit affine layer x -> weight @ x + bias."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weight, dtype=np.float64)
        b = np.ascontiguousarray(self.bias, dtype=np.float64)
        if w.ndim != 2 or b.ndim != 1 or b.shape[0] != w.shape[0]:
            raise DimensionMismatch(
                f"affine layer shapes do not agree: weight {w.shape}, bias {b.shape}"
            )
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True)
class Nonlin:
    """Elementwise nonlinearity layer."""

    kind: str

    def __post_init__(self):
        if self.kind not in NONLIN_KINDS:
            raise SchemaError(f"unknown nonlinearity kind: {self.kind!r}")


@dataclass(frozen=True)
class NetworkIR:
    """Validated feedforward network: layers chain and weights are finite."""

    layers: tuple
    input_dim: int

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        dim = self.input_dim
        for i, layer in enumerate(self.layers):
            if isinstance(layer, Affine):
                if layer.in_dim != dim:
                    raise ChainMismatchError(
                        f"layer {i} expects input dim {layer.in_dim}, got {dim}"
                    )
                if not (np.isfinite(layer.weight).all() and np.isfinite(layer.bias).all()):
                    raise NonFiniteWeightError(f"layer {i} has non-finite weights")
                dim = layer.out_dim
            elif isinstance(layer, Nonlin):
                pass
            else:
                raise SchemaError(f"layer {i} has unsupported type {type(layer).__name__}")
        object.__setattr__(self, "_output_dim", dim)

    @property
    def output_dim(self) -> int:
        return self._output_dim


@dataclass(frozen=True)
class ConvSpec:
    """Shape description of a (transpose) convolution layer."""

    in_channels: int
    in_h: int
    in_w: int
    out_channels: int
    kh: int
    kw: int
    stride: int = 1
    padding: int = 0
    transpose: bool = False
    weight: np.ndarray = field(default=None)
    bias: np.ndarray = field(default=None)

    @property
    def out_hw(self) -> tuple[int, int]:
        if self.transpose:
            oh = (self.in_h - 1) * self.stride - 2 * self.padding + self.kh
            ow = (self.in_w - 1) * self.stride - 2 * self.padding + self.kw
        else:
            oh = (self.in_h + 2 * self.padding - self.kh) // self.stride + 1
            ow = (self.in_w + 2 * self.padding - self.kw) // self.stride + 1
        if oh < 1 or ow < 1:
            raise SchemaError(f"convolution output shape is empty: {oh}x{ow}")
        return oh, ow

    @property
    def in_dim(self) -> int:
        return self.in_channels * self.in_h * self.in_w

    @property
    def out_dim(self) -> int:
        oh, ow = self.out_hw
        return self.out_channels * oh * ow


def _conv_matrix(weight: np.ndarray, in_chw: tuple[int, int, int],
                 stride: int, padding: int) -> np.ndarray:
    """Dense matrix of a standard convolution over channel-major flattening."""
    out_c, in_c, kh, kw = weight.shape
    c, h, w = in_chw
    oh = (h + 2 * padding - kh) // stride + 1
    ow = (w + 2 * padding - kw) // stride + 1
    mat = np.zeros((out_c * oh * ow, c * h * w))
    for co in range(out_c):
        for oy in range(oh):
            for ox in range(ow):
                row = (co * oh + oy) * ow + ox
                for ci in range(in_c):
                    for ky in range(kh):
                        iy = oy * stride - padding + ky
                        if iy < 0 or iy >= h:
                            continue
                        for kx in range(kw):
                            ix = ox * stride - padding + kx
                            if ix < 0 or ix >= w:
                                continue
                            col = (ci * h + iy) * w + ix
                            mat[row, col] = weight[co, ci, ky, kx]
    return mat


def lower_conv(spec: ConvSpec) -> Affine:
    """Materialize the explicit affine map equal to the (transpose) convolution.

    A transpose convolution is the matrix transpose of its mirror convolution,
    with the layer's own per-channel bias added on the output side.
    """
    weight = np.asarray(spec.weight, dtype=np.float64)
    oh, ow = spec.out_hw
    if spec.transpose:
        # mirror conv maps the convT output space back to its input space
        if weight.shape != (spec.in_channels, spec.out_channels, spec.kh, spec.kw):
            raise SchemaError(
                f"convT2d weight shape {weight.shape} does not match spec"
            )
        mirror = _conv_matrix(weight, (spec.out_channels, oh, ow),
                              spec.stride, spec.padding)
        mat = mirror.T
    else:
        if weight.shape != (spec.out_channels, spec.in_channels, spec.kh, spec.kw):
            raise SchemaError(
                f"conv2d weight shape {weight.shape} does not match spec"
            )
        mat = _conv_matrix(weight, (spec.in_channels, spec.in_h, spec.in_w),
                           spec.stride, spec.padding)
    bias_c = np.zeros(spec.out_channels) if spec.bias is None else np.asarray(
        spec.bias, dtype=np.float64)
    if bias_c.shape != (spec.out_channels,):
        raise SchemaError("conv bias must have one entry per output channel")
    bias = np.repeat(bias_c, oh * ow)
    return Affine(mat, bias)


def _encode_blob(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<f8").tobytes()).decode("ascii")


def _decode_blob(b64: str, shape: tuple, what: str) -> np.ndarray:
    try:
        raw = base64.b64decode(b64, validate=True)
    except Exception as exc:
        raise SchemaError(f"{what}: invalid base64 blob") from exc
    expected = int(np.prod(shape)) * 8
    if len(raw) != expected:
        raise SchemaError(f"{what}: blob has {len(raw)} bytes, expected {expected}")
    return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)


def _require(obj: dict, key: str, kind, what: str):
    if key not in obj:
        raise SchemaError(f"{what}: missing field {key!r}")
    val = obj[key]
    if kind is int and isinstance(val, bool) or not isinstance(val, kind):
        raise SchemaError(f"{what}: field {key!r} has wrong type")
    return val


def load_network(path) -> NetworkIR:
    """Parse a zonolip-net/1 model file; conv layers are lowered eagerly."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("model document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported model version: {doc.get('version')!r}")
    input_dim = _require(doc, "input_dim", int, "model")
    if input_dim < 1:
        raise SchemaError(f"input_dim must be positive, got {input_dim}")
    raw_layers = _require(doc, "layers", list, "model")
    layers = []
    for i, entry in enumerate(raw_layers):
        what = f"layer {i}"
        if not isinstance(entry, dict):
            raise SchemaError(f"{what}: must be an object")
        ltype = _require(entry, "type", str, what)
        if ltype in NONLIN_KINDS:
            layers.append(Nonlin(ltype))
        elif ltype == "dense":
            rows = _require(entry, "rows", int, what)
            cols = _require(entry, "cols", int, what)
            w = _decode_blob(_require(entry, "w_b64", str, what), (rows, cols), what)
            b = _decode_blob(_require(entry, "b_b64", str, what), (rows,), what)
            layers.append(Affine(w, b))
        elif ltype in ("conv2d", "convT2d"):
            transpose = ltype == "convT2d"
            fields = {k: _require(entry, k, int, what)
                      for k in ("in_channels", "in_h", "in_w", "out_channels",
                                "kh", "kw", "stride", "padding")}
            wshape = ((fields["in_channels"], fields["out_channels"],
                       fields["kh"], fields["kw"]) if transpose else
                      (fields["out_channels"], fields["in_channels"],
                       fields["kh"], fields["kw"]))
            w = _decode_blob(_require(entry, "w_b64", str, what), wshape, what)
            b = _decode_blob(_require(entry, "b_b64", str, what),
                             (fields["out_channels"],), what)
            spec = ConvSpec(transpose=transpose, weight=w, bias=b, **fields)
            layers.append(lower_conv(spec))
        else:
            raise SchemaError(f"{what}: unknown layer type {ltype!r}")
    return NetworkIR(tuple(layers), input_dim)


def save_network(net: NetworkIR, path) -> None:
    """Write a network as a zonolip-net/1 file (affine layers as dense)."""
    entries = []
    for layer in net.layers:
        if isinstance(layer, Affine):
            entries.append({
                "type": "dense",
                "rows": layer.out_dim,
                "cols": layer.in_dim,
                "w_b64": _encode_blob(layer.weight),
                "b_b64": _encode_blob(layer.bias),
            })
        else:
            entries.append({"type": layer.kind})
    doc = {"version": FORMAT_VERSION, "input_dim": net.input_dim, "layers": entries}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def eval_network(net: NetworkIR, x) -> np.ndarray:
    """Concrete forward pass; x may be a vector or a batch with samples as rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != net.input_dim:
        raise DimensionMismatch(
            f"input has dimension {x.shape[-1]}, network expects {net.input_dim}"
        )
    out = x
    for layer in net.layers:
        if isinstance(layer, Affine):
            out = out @ layer.weight.T + layer.bias
        else:
            out = ACTIVATIONS[layer.kind][0](out)
    return out


@dataclass(frozen=True)
class VJPResult:
    """Gradient of u^T f at x plus the activation derivative diagonals seen."""

    gradient: np.ndarray
    jacobian_diagonals: tuple


def vjp(net: NetworkIR, x, u) -> VJPResult:
    """Manual backpropagation: gradient = (d f/d x)^T u at the point x."""
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise DimensionMismatch("vjp input has wrong dimension")
    if u.shape != (net.output_dim,):
        raise DimensionMismatch("vjp cotangent has wrong dimension")
    diags = []
    pre = []
    out = x
    for layer in net.layers:
        if isinstance(layer, Affine):
            out = layer.weight @ out + layer.bias
        else:
            pre.append(out)
            diags.append(ACTIVATIONS[layer.kind][1](out))
            out = ACTIVATIONS[layer.kind][0](out)
    g = u
    it = len(diags)
    for layer in reversed(net.layers):
        if isinstance(layer, Affine):
            g = layer.weight.T @ g
        else:
            it -= 1
            g = diags[it] * g
    return VJPResult(g, tuple(diags))


def _batch_jacobians(net: NetworkIR, xs: np.ndarray) -> np.ndarray:
    """Per-sample transposed Jacobians, shape (n, input_dim, output_dim)."""
    n = xs.shape[0]
    masks = []
    out = xs
    for layer in net.layers:
        if isinstance(layer, Affine):
            out = out @ layer.weight.T + layer.bias
        else:
            masks.append(ACTIVATIONS[layer.kind][1](out))
            out = ACTIVATIONS[layer.kind][0](out)
    jac = np.broadcast_to(np.eye(net.output_dim), (n, net.output_dim, net.output_dim)).copy()
    it = len(masks)
    for layer in reversed(net.layers):
        if isinstance(layer, Affine):
            jac = np.einsum("ij,njk->nik", layer.weight.T, jac)
        else:
            it -= 1
            jac = masks[it][:, :, None] * jac
    return jac


def sampled_lower_bound(net: NetworkIR, region: Hyperbox, n: int, seed: int,
                        exact_dof: int = 12) -> float:
    """Attained-VJP lower bound on the local (inf,1) Lipschitz constant.

    Draws n points uniformly from the region.  For each point the cotangent u
    is chosen three ways: a random sign vector, an alternating sign-ascent
    refinement of it, and (when output_dim <= exact_dof) exhaustive sign
    enumeration.  Every candidate is an attained ||grad^T u||_1, so the
    running max is a valid lower bound.  Deterministic given the seed, and
    samples are drawn as a stream so a longer run extends a shorter one.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if region.dim != net.input_dim:
        raise DimensionMismatch("region dimension does not match network input")
    rng = np.random.Generator(np.random.PCG64(seed))
    d, out = net.input_dim, net.output_dim
    raw = rng.random((n, d + out))
    xs = region.lower + raw[:, :d] * (region.upper - region.lower)
    u0 = np.where(raw[:, d:] < 0.5, -1.0, 1.0)

    jac = _batch_jacobians(net, xs)  # (n, d, out)
    best = float(np.abs(np.einsum("nio,no->ni", jac, u0)).sum(axis=1).max())

    u = u0
    for _ in range(8):
        g = np.einsum("nio,no->ni", jac, u)
        v = np.where(g >= 0.0, 1.0, -1.0)
        u = np.where(np.einsum("nio,ni->no", jac, v) >= 0.0, 1.0, -1.0)
    best = max(best, float(np.abs(np.einsum("nio,no->ni", jac, u)).sum(axis=1).max()))

    if out <= exact_dof:
        signs = np.where(
            (np.arange(2 ** out)[:, None] >> np.arange(out - 1, -1, -1)) & 1, 1.0, -1.0
        )  # (2^out, out), lexicographic
        n_verts = signs.shape[0]
        chunk = max(1, (1 << 23) // max(1, d * n_verts))  # cap scratch at ~64 MB
        for lo in range(0, n, chunk):
            block = jac[lo:lo + chunk].reshape(-1, out) @ signs.T
            vals = np.abs(block).reshape(-1, d, n_verts).sum(axis=1)
            best = max(best, float(vals.max()))
    return best


def gen_random_net(widths, nonlinearity: str, weight_scale: float = 1.0,
                   seed: int = 0) -> NetworkIR:
    """Random fully connected network with i.i.d. uniform [-s, s] weights.

    ``widths`` lists every layer width including input and output; the given
    nonlinearity is inserted between consecutive affine layers.  PCG64-seeded,
    so the same seed always reproduces the same network bit for bit.
    """
    widths = [int(w) for w in widths]
    if len(widths) < 2 or min(widths) < 1:
        raise ValueError("widths must list input and output dims, all positive")
    if nonlinearity not in NONLIN_KINDS:
        raise ValueError(f"unknown nonlinearity: {nonlinearity!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    s = float(weight_scale)
    layers = []
    for i in range(len(widths) - 1):
        w = rng.uniform(-s, s, size=(widths[i + 1], widths[i]))
        b = rng.uniform(-s, s, size=widths[i + 1])
        layers.append(Affine(w, b))
        if i < len(widths) - 2:
            layers.append(Nonlin(nonlinearity))
    return NetworkIR(tuple(layers), widths[0])
