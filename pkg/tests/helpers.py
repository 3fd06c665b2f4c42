"""Independent oracles shared across the test suite.

Everything here is deliberately implemented from first principles (explicit
enumeration, dense grids, finite differences, sliding windows) so that the
library is checked against a second route, not against itself.
"""

from __future__ import annotations

import itertools

import numpy as np

from zonolip.netio import Affine, NetworkIR
from zonolip.scalarops import ACTIVATIONS
from zonolip.sets import Zonotope


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_zonotope(gen: np.random.Generator, d: int, m: int, scale: float = 2.0) -> Zonotope:
    center = gen.uniform(-scale, scale, size=d)
    gens = gen.uniform(-scale, scale, size=(d, m))
    return Zonotope(center, gens)


def enumerate_signs(m: int) -> np.ndarray:
    """All of {-1,+1}^m, lexicographic with -1 first, one row per vector."""
    if m == 0:
        return np.zeros((1, 0))
    return np.array(list(itertools.product((-1.0, 1.0), repeat=m)))


def brute_zono_linmax(z: Zonotope, a) -> float:
    a = np.asarray(a, dtype=np.float64)
    signs = enumerate_signs(z.dof)
    return float(max(a @ (z.center + z.generators @ s) for s in signs))


def brute_zono_l1max(z: Zonotope) -> float:
    signs = enumerate_signs(z.dof)
    return float(max(np.abs(z.center + z.generators @ s).sum() for s in signs))


def brute_matnorm_inf1(M) -> float:
    """max over sign vectors v of ||M v||_1, by exhaustive enumeration."""
    M = np.asarray(M, dtype=np.float64)
    signs = enumerate_signs(M.shape[1])
    return float(max(np.abs(M @ s).sum() for s in signs))


def grid_band_search(z_grid: np.ndarray, y_rows: list, center_slope: float,
                     n_slopes: int = 512, span: float = 1.0):
    """Best half-altitude over a slope grid, each slope with its best intercept.

    ``y_rows`` are arrays of y-values over ``z_grid`` (several rows describe a
    lattice in y, e.g. the two extreme multipliers of a product set).
    Returns (best_mu, best_slope).
    """
    slopes = np.linspace(center_slope - span, center_slope + span, n_slopes)
    y_all = np.concatenate(y_rows)
    z_all = np.concatenate([z_grid] * len(y_rows))
    dev = y_all[None, :] - slopes[:, None] * z_all[None, :]
    mus = 0.5 * (dev.max(axis=1) - dev.min(axis=1))
    idx = int(np.argmin(mus))
    return float(mus[idx]), float(slopes[idx])


def band_grid(l: float, u: float, grid_n: int = 4097) -> np.ndarray:
    """Uniform grid that always includes an interior kink at 0."""
    grid = np.linspace(l, u, grid_n)
    if l < 0.0 < u:
        grid = np.union1d(grid, [0.0])
    return grid


def sliding_window_conv(x_chw: np.ndarray, weight: np.ndarray,
                        stride: int, padding: int) -> np.ndarray:
    """Direct convolution: loops over output positions and the kernel window."""
    out_c, in_c, kh, kw = weight.shape
    c, h, w = x_chw.shape
    oh = (h + 2 * padding - kh) // stride + 1
    ow = (w + 2 * padding - kw) // stride + 1
    padded = np.zeros((c, h + 2 * padding, w + 2 * padding))
    padded[:, padding:padding + h, padding:padding + w] = x_chw
    out = np.zeros((out_c, oh, ow))
    for co in range(out_c):
        for oy in range(oh):
            for ox in range(ow):
                window = padded[:, oy * stride:oy * stride + kh,
                                ox * stride:ox * stride + kw]
                out[co, oy, ox] = float((weight[co] * window).sum())
    return out


def sliding_window_conv_transpose(x_chw: np.ndarray, weight: np.ndarray,
                                  stride: int, padding: int) -> np.ndarray:
    """Direct transpose convolution by scattering each input into the output."""
    in_c, out_c, kh, kw = weight.shape
    c, h, w = x_chw.shape
    oh = (h - 1) * stride - 2 * padding + kh
    ow = (w - 1) * stride - 2 * padding + kw
    full = np.zeros((out_c, oh + 2 * padding, ow + 2 * padding))
    for ci in range(in_c):
        for iy in range(h):
            for ix in range(w):
                full[:, iy * stride:iy * stride + kh, ix * stride:ix * stride + kw] \
                    += x_chw[ci, iy, ix] * weight[ci]
    if padding:
        return full[:, padding:-padding, padding:-padding]
    return full


def eval_reference(net: NetworkIR, x: np.ndarray) -> np.ndarray:
    """Straightforward per-row reimplementation of the forward pass."""
    out = np.asarray(x, dtype=np.float64)
    for layer in net.layers:
        if isinstance(layer, Affine):
            nxt = np.empty(layer.out_dim)
            for i in range(layer.out_dim):
                nxt[i] = float(np.dot(layer.weight[i], out)) + float(layer.bias[i])
            out = nxt
        else:
            out = ACTIVATIONS[layer.kind][0](out)
    return out


def finite_diff_vjp(net: NetworkIR, x: np.ndarray, u: np.ndarray,
                    h: float = 1e-5) -> np.ndarray:
    """Central finite differences of u^T f(x)."""
    from zonolip.netio import eval_network

    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (u @ eval_network(net, x + step) - u @ eval_network(net, x - step)) / (2 * h)
    return grad
