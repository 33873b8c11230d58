"""d-fold tensor products: multi-indexed coefficients and product functionals.

Coefficients are dense complex arrays with one axis per factor; axis j is
indexed by window_j.  Per-axis generator actions, the norm-weighted
restriction (which multiplies in the basis norms of the fixed indices),
product invariant functionals, and the joint-kernel projector live here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from . import repn
from .distributions import Sign
from .errors import InvalidIndex, ParamMismatch
from .params import IndexWindow, MultiParam, SeriesParam, check_window, expand_window


@dataclass(frozen=True)
class TensorCoeffs:
    """Truncated element of a d-fold tensor product."""

    params: MultiParam
    windows: tuple[IndexWindow, ...]
    coeffs: np.ndarray

    def __post_init__(self):
        windows = tuple(self.windows)
        object.__setattr__(self, "windows", windows)
        if len(windows) != self.params.d:
            raise ValueError(f"{len(windows)} windows for d={self.params.d}")
        for p, w in zip(self.params.factors, windows):
            check_window(p, w)
        arr = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        shape = tuple(len(w) for w in windows)
        if arr.shape != shape:
            raise ValueError(f"coefficient shape {arr.shape} != window shape {shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def d(self) -> int:
        return self.params.d

    def embedded(self, windows: tuple[IndexWindow, ...]) -> "TensorCoeffs":
        """Zero-fill into larger (or shifted) windows covering the support."""
        arr = embed_array(self.coeffs, self.windows, windows)
        return TensorCoeffs(self.params, tuple(windows), arr)

    def factor_vector(self) -> repn.CoeffVector:
        """View a rank-1 tensor as a CoeffVector."""
        if self.d != 1:
            raise ValueError(f"rank-1 only, got d={self.d}")
        return repn.CoeffVector(self.params.factors[0], self.windows[0], self.coeffs.copy())


def from_coeff_vector(f: repn.CoeffVector, params: MultiParam | None = None) -> TensorCoeffs:
    if params is None:
        params = MultiParam((f.param,))
    if params.d != 1 or params.factors[0] != f.param:
        raise ParamMismatch("params do not match the vector's factor")
    return TensorCoeffs(params, (f.window,), f.coeffs.copy())


def zeros(params: MultiParam, windows: tuple[IndexWindow, ...]) -> TensorCoeffs:
    shape = tuple(len(w) for w in windows)
    return TensorCoeffs(params, tuple(windows), np.zeros(shape, dtype=np.complex128))


def embed_array(
    arr: np.ndarray,
    old: tuple[IndexWindow, ...],
    new: tuple[IndexWindow, ...],
) -> np.ndarray:
    """Re-window a dense array; raises if nonzero support would be dropped."""
    if len(old) != len(new):
        raise ValueError("rank mismatch")
    out = np.zeros(tuple(len(w) for w in new), dtype=np.complex128)
    src, dst = [], []
    for wo, wn in zip(old, new):
        lo, hi = max(wo.lo, wn.lo), min(wo.hi, wn.hi)
        if lo > hi:
            if np.any(arr != 0):
                raise ValueError("windows do not overlap the support")
            return out
        src.append(slice(lo - wo.lo, hi - wo.lo + 1))
        dst.append(slice(lo - wn.lo, hi - wn.lo + 1))
    out[tuple(dst)] = arr[tuple(src)]
    kept = np.zeros(arr.shape, dtype=bool)
    kept[tuple(src)] = True
    if np.any(arr[~kept] != 0):
        raise ValueError("target windows do not cover the support")
    return out


def common_windows(
    a: tuple[IndexWindow, ...], b: tuple[IndexWindow, ...]
) -> tuple[IndexWindow, ...]:
    return tuple(IndexWindow(min(x.lo, y.lo), max(x.hi, y.hi)) for x, y in zip(a, b))


def add(a: TensorCoeffs, b: TensorCoeffs, scale: complex = 1.0) -> TensorCoeffs:
    """a + scale*b on the union windows."""
    if a.params != b.params:
        raise ParamMismatch("tensor params differ")
    wins = common_windows(a.windows, b.windows)
    arr = embed_array(a.coeffs, a.windows, wins) + scale * embed_array(b.coeffs, b.windows, wins)
    return TensorCoeffs(a.params, wins, arr)


def _weight_grids(params: MultiParam, windows) -> tuple[np.ndarray, np.ndarray]:
    """(1 + sum mu + 2|k|^2) grid and the product of squared basis norms."""
    d = params.d
    base = 1.0 + params.mu_sum
    q = np.zeros(tuple(len(w) for w in windows))
    w2 = np.ones(tuple(len(w) for w in windows))
    for j, (p, w) in enumerate(zip(params.factors, windows)):
        shape = [1] * d
        shape[j] = len(w)
        ks = w.indices().astype(np.float64)
        q = q + (2.0 * ks * ks).reshape(shape)
        w2 = w2 * repn.basis_norm_sq_array(p, w).reshape(shape)
    return base + q, w2


def tensor_sobolev_norm(f: TensorCoeffs, t: float) -> float:
    """sqrt of sum (1 + sum mu_j + 2|k|^2)^t |f(k)|^2 prod ||u(k_j)||^2."""
    qgrid, w2 = _weight_grids(f.params, f.windows)
    mag2 = np.abs(f.coeffs) ** 2
    if t == 0.0:
        return float(np.sqrt(np.sum(mag2 * w2)))
    return float(np.sqrt(np.sum(qgrid**t * mag2 * w2)))


def norm0(f: TensorCoeffs) -> float:
    return tensor_sobolev_norm(f, 0.0)


def apply_u_axis_array(
    arr: np.ndarray, axis: int, param: SeriesParam, window: IndexWindow
) -> tuple[np.ndarray, IndexWindow]:
    """Generator action along one axis of a dense array; window grows by one."""
    out_win = expand_window(param, window, 1)
    moved = np.moveaxis(arr, axis, -1)
    out_shape = moved.shape[:-1] + (len(out_win),)
    out = np.zeros(out_shape, dtype=np.complex128)
    ks = window.indices()
    off = window.lo - out_win.lo
    n = len(window)
    out[..., off : off + n] += 1j * ks * moved
    out[..., off + 1 : off + n + 1] += -0.5j * repn.c_plus(param, ks) * moved
    cut = out_win.lo - (window.lo - 1)  # 1 when clipped at the lowest weight
    out[..., off - 1 + cut : off - 1 + n] += (0.5j * repn.c_minus(param, ks) * moved)[
        ..., cut:
    ]
    return np.moveaxis(out, -1, axis), out_win


def apply_U_factor(f: TensorCoeffs, axis: int) -> TensorCoeffs:
    """Per-factor generator action U_axis (0-based axis)."""
    if not 0 <= axis < f.d:
        raise InvalidIndex(f"axis {axis} out of range for d={f.d}")
    arr, out_win = apply_u_axis_array(
        f.coeffs, axis, f.params.factors[axis], f.windows[axis]
    )
    wins = list(f.windows)
    wins[axis] = out_win
    return TensorCoeffs(f.params, tuple(wins), arr)


def slice_axis(f: TensorCoeffs, axis: int, k: int) -> TensorCoeffs:
    """Raw coefficient slice at one fixed index (no norm factor)."""
    if not 0 <= axis < f.d:
        raise InvalidIndex(f"axis {axis} out of range for d={f.d}")
    if f.d == 1:
        raise InvalidIndex("cannot slice a rank-1 tensor to rank 0")
    w = f.windows[axis]
    if k not in w:
        raise InvalidIndex(f"index {k} outside window [{w.lo}, {w.hi}] on axis {axis}")
    arr = np.take(f.coeffs, k - w.lo, axis=axis)
    wins = f.windows[:axis] + f.windows[axis + 1 :]
    return TensorCoeffs(f.params.drop(axis), wins, arr.copy())


def restrict(f: TensorCoeffs, fixed: dict[int, int]) -> TensorCoeffs:
    """Projection onto the unfixed factors, times prod ||u(k_j)|| over fixed j.

    `fixed` maps 0-based axes to basis indices.  Matches the projection
    used by the norm inequalities, where the fixed-index basis norms are
    multiplied into the remaining coefficients.
    """
    if not fixed:
        return f
    axes = sorted(fixed)
    if len(axes) >= f.d:
        raise InvalidIndex("at least one axis must remain")
    scale = 1.0
    out = f
    for axis in reversed(axes):
        k = fixed[axis]
        p, w = out.params.factors[axis], out.windows[axis]
        if k not in w:
            raise InvalidIndex(f"index {k} outside window on axis {axis}")
        scale *= np.sqrt(repn.basis_norm_sq(p, k))
        out = slice_axis(out, axis, k)
    return TensorCoeffs(out.params, out.windows, out.coeffs * scale)


MultiTag = tuple[Sign, ...]


def valid_tags(params: MultiParam) -> list[MultiTag]:
    """All product functionals; discrete factors contribute Plus only."""
    choices = [dist.valid_signs(p) for p in params.factors]
    return list(itertools.product(*choices))


def product_dist_evaluate(f: TensorCoeffs, tag: MultiTag) -> complex:
    """sum_k f(k) prod_j D^{tag_j}(u(k_j))."""
    if len(tag) != f.d:
        raise ValueError(f"tag length {len(tag)} != d={f.d}")
    out = f.coeffs
    for p, w, s in zip(f.params.factors, f.windows, tag):
        vals = dist.dist_values_array(p, s, w)
        out = np.tensordot(out, vals, axes=([0], [0]))
    return complex(out)


def phi_tensor(params: MultiParam, tag: MultiTag, windows: tuple[IndexWindow, ...]) -> TensorCoeffs:
    """The product dual element Phi_tag = tensor of per-factor phis."""
    vecs = []
    for p, w, s in zip(params.factors, windows, tag):
        vecs.append(dist.phi(p, s).embedded(w).coeffs)
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return TensorCoeffs(params, tuple(windows), out)


def kernel_project(f: TensorCoeffs) -> TensorCoeffs:
    """Remove the Phi components so every product functional vanishes."""
    arr = f.coeffs.copy()
    for tag in valid_tags(f.params):
        c = product_dist_evaluate(f, tag)
        if c != 0:
            arr = arr - c * phi_tensor(f.params, tag, f.windows).coeffs
    return TensorCoeffs(f.params, f.windows, arr)


def kernel_defects(f: TensorCoeffs) -> dict[MultiTag, float]:
    return {tag: abs(product_dist_evaluate(f, tag)) for tag in valid_tags(f.params)}
