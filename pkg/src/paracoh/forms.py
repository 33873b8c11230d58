"""Leafwise differential forms for the product action, and their primitives.

A degree-n form assigns a coefficient tensor to every increasing n-tuple of
axes (0-based).  Component arrays always carry all d index axes; the tuple
records which generators the form eats.  The exterior derivative is

    (d w)(a_0, ..., a_n) = sum_p (-1)^p U_{a_p} w(..., a_p omitted, ...),

and d o d = 0 because the per-axis actions commute.

Primitives of closed forms are found by the axis-0 slicing recursion: solve
the sub-problem on each axis-0 slice (top-degree solve when the degree fills
the remaining axes), form the invariant remainder theta for the components
containing axis 0, recurse on theta, and assemble.  For degree 1 the
remainder is a joint-invariant 0-form which must vanish; a marginal defect
falls back to one joint least-squares solve over all axes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import lsmr

from . import repn, tensor
from .errors import InvalidIndex, NoConvergence, NotClosed, ThetaNotVanishing
from .params import IndexWindow, MultiParam, expand_window
from .solver import (
    SolveOptions,
    SolveReport,
    _solve_top_rec,
    sigma_schedule,
)
from .tensor import TensorCoeffs, tensor_sobolev_norm

Axes = tuple[int, ...]


@dataclass(frozen=True)
class LeafwiseForm:
    """Degree-n leafwise form; all components share params and windows."""

    degree: int
    params: MultiParam
    windows: tuple[IndexWindow, ...]
    components: dict[Axes, np.ndarray]

    def __post_init__(self):
        d = self.params.d
        n = self.degree
        if not 0 <= n <= d:
            raise ValueError(f"degree {n} out of range for d={d}")
        expected = set(itertools.combinations(range(d), n))
        if set(self.components) != expected:
            raise ValueError(
                f"degree-{n} form over d={d} needs components exactly at {sorted(expected)}"
            )
        windows = tuple(self.windows)
        object.__setattr__(self, "windows", windows)
        shape = tuple(len(w) for w in windows)
        comps = {}
        for axes, arr in self.components.items():
            a = np.ascontiguousarray(arr, dtype=np.complex128)
            if a.shape != shape:
                raise ValueError(f"component {axes} has shape {a.shape}, want {shape}")
            a.setflags(write=False)
            comps[axes] = a
        object.__setattr__(self, "components", comps)

    @property
    def d(self) -> int:
        return self.params.d

    def component_tensor(self, axes: Axes) -> TensorCoeffs:
        return TensorCoeffs(self.params, self.windows, self.components[axes].copy())


def zero_form(params: MultiParam, windows: tuple[IndexWindow, ...], degree: int) -> LeafwiseForm:
    shape = tuple(len(w) for w in windows)
    comps = {
        axes: np.zeros(shape, dtype=np.complex128)
        for axes in itertools.combinations(range(params.d), degree)
    }
    return LeafwiseForm(degree, params, windows, comps)


def form_from_function(f: TensorCoeffs) -> LeafwiseForm:
    """Wrap a coefficient tensor as the top-degree form it determines."""
    return LeafwiseForm(f.d, f.params, f.windows, {tuple(range(f.d)): f.coeffs.copy()})


def form_sobolev_norm(w: LeafwiseForm, t: float) -> float:
    total = 0.0
    for arr in w.components.values():
        total += tensor_sobolev_norm(TensorCoeffs(w.params, w.windows, arr), t) ** 2
    return float(np.sqrt(total))


def form_norm0(w: LeafwiseForm) -> float:
    return form_sobolev_norm(w, 0.0)


def _unify(
    items: list[tuple[np.ndarray, tuple[IndexWindow, ...]]]
) -> tuple[list[np.ndarray], tuple[IndexWindow, ...]]:
    """Embed arrays with per-item windows into their common hull."""
    d = len(items[0][1])
    hull = tuple(
        IndexWindow(min(w[j].lo for _, w in items), max(w[j].hi for _, w in items))
        for j in range(d)
    )
    return [tensor.embed_array(arr, wins, hull) for arr, wins in items], hull


def exterior_derivative(w: LeafwiseForm) -> LeafwiseForm:
    """Degree n+1 form; every window grows by one."""
    if w.degree >= w.d:
        raise ValueError(f"cannot differentiate a degree-{w.degree} form when d={w.d}")
    out_windows = tuple(
        expand_window(p, win, 1) for p, win in zip(w.params.factors, w.windows)
    )
    out_shape = tuple(len(win) for win in out_windows)
    comps = {}
    for axes in itertools.combinations(range(w.d), w.degree + 1):
        acc = np.zeros(out_shape, dtype=np.complex128)
        for pos, axis in enumerate(axes):
            src = axes[:pos] + axes[pos + 1 :]
            term, term_win = tensor.apply_u_axis_array(
                w.components[src], axis, w.params.factors[axis], w.windows[axis]
            )
            wins = list(w.windows)
            wins[axis] = term_win
            acc += (-1.0) ** pos * tensor.embed_array(term, tuple(wins), out_windows)
        comps[axes] = acc
    return LeafwiseForm(w.degree + 1, w.params, out_windows, comps)


def is_closed(w: LeafwiseForm, tol: float = 1e-10) -> tuple[bool, float]:
    """(closed?, absolute defect ||d w||_0); closed iff defect <= tol*||w||_0."""
    defect = form_norm0(exterior_derivative(w))
    return defect <= tol * form_norm0(w), defect


def restrict_form(w: LeafwiseForm, axis: int, k: int) -> LeafwiseForm:
    """Forget the components containing `axis`, restrict the rest at index k.

    Restriction follows the projection convention: coefficients pick up the
    basis-norm factor of the fixed index.  Axes above `axis` shift down.
    """
    if not 0 <= axis < w.d:
        raise InvalidIndex(f"axis {axis} out of range for d={w.d}")
    if w.degree > w.d - 1:
        raise InvalidIndex("top-degree forms have no components away from any axis")
    win = w.windows[axis]
    if k not in win:
        raise InvalidIndex(f"index {k} outside window [{win.lo}, {win.hi}]")
    scale = np.sqrt(repn.basis_norm_sq(w.params.factors[axis], k))
    comps = {}
    for axes, arr in w.components.items():
        if axis in axes:
            continue
        sliced = np.take(arr, k - win.lo, axis=axis) * scale
        comps[tuple(a - 1 if a > axis else a for a in axes)] = sliced
    return LeafwiseForm(
        w.degree,
        w.params.drop(axis),
        w.windows[:axis] + w.windows[axis + 1 :],
        comps,
    )


def varsigma_schedule(
    t: float, d: int, base: float = 4.0, s1: float = 3.0, c: float = 0.5
) -> float:
    """Sobolev loss for lower-degree primitives.

    Two factors: t + base.  Above that the recursion takes the max of
    vs_{d-1}(vs_{d-1}(t)+t+1), vs_{d-1}(t)+t, and sigma_{d-1}(t)+t.
    """
    if t <= 0:
        raise ValueError(f"needs t > 0, got {t}")
    if d < 2:
        raise ValueError(f"needs d >= 2, got {d}")
    if d == 2:
        return t + base
    inner = varsigma_schedule(t, d - 1, base, s1, c)
    a = varsigma_schedule(inner + t + 1.0, d - 1, base, s1, c)
    b = inner + t
    top = sigma_schedule(t, d - 1, s1, c) + t
    return max(a, b, top)


# --- the primitive recursion --------------------------------------------------


def _slice_comps(
    comps: dict[Axes, np.ndarray], lo: int, k: int, relabel: bool
) -> dict[Axes, np.ndarray]:
    """Slice every component at axis0 = k; optionally shift axis labels down."""
    out = {}
    for axes, arr in comps.items():
        key = tuple(a - 1 for a in axes) if relabel else axes
        out[key] = np.take(arr, k - lo, axis=0)
    return out


def _top_degree_slice(
    sub_params: MultiParam,
    sub_windows: tuple[IndexWindow, ...],
    f_arr: np.ndarray,
    opts: SolveOptions,
    scale: float,
) -> tuple[dict[Axes, np.ndarray], tuple[IndexWindow, ...]]:
    """Primitive of a top-degree form over the remaining axes, via the
    coboundary solve; component at (all axes except p) gets sign (-1)^p."""
    sols, _ = _solve_top_rec(sub_params, sub_windows, f_arr, opts, scale)
    items = [(arr, wins) for arr, wins in sols]
    arrays, hull = _unify(items)
    d_sub = sub_params.d
    every = tuple(range(d_sub))
    comps = {}
    for p, arr in enumerate(arrays):
        comps[every[:p] + every[p + 1 :]] = (-1.0) ** p * arr
    return comps, hull


def _primitive_rec(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    comps: dict[Axes, np.ndarray],
    n: int,
    opts: SolveOptions,
    scale: float,
) -> tuple[dict[Axes, np.ndarray], tuple[IndexWindow, ...]]:
    """Primitive of a closed degree-n form (1 <= n <= d-1), axes 0-based."""
    d = params.d
    sub_params = params.drop(0)
    sub_windows = windows[1:]
    w0 = windows[0]

    # eta1: solve the forgotten-axis problem on every axis-0 slice
    slices = []
    for k in w0.indices():
        sub = {
            tuple(a - 1 for a in axes): np.take(arr, k - w0.lo, axis=0)
            for axes, arr in comps.items()
            if 0 not in axes
        }
        if n == d - 1:
            got = _top_degree_slice(
                sub_params, sub_windows, sub[tuple(range(d - 1))], opts, scale
            )
        else:
            got = _primitive_rec(sub_params, sub_windows, sub, n, opts, scale)
        slices.append(got)
    eta1_comps, eta1_sub_windows = _stack_slices(slices, w0)
    eta1_windows = (w0,) + eta1_sub_windows

    # theta: the components containing axis 0, minus U_0 eta1
    theta_comps: dict[Axes, np.ndarray] = {}
    theta_windows = None
    for axes in itertools.combinations(range(1, d), n - 1):
        om_arr = comps[(0,) + axes]
        e_arr = eta1_comps[tuple(a - 1 for a in axes)]
        u0, w0x = tensor.apply_u_axis_array(e_arr, 0, params.factors[0], w0)
        u0_wins = (w0x,) + eta1_sub_windows
        hull = tensor.common_windows(u0_wins, windows)
        theta = tensor.embed_array(om_arr, windows, hull) - tensor.embed_array(
            u0, u0_wins, hull
        )
        theta_comps[axes] = theta
        theta_windows = hull

    if n == 1:
        # theta is a 0-form invariant under every remaining generator: it
        # must vanish; accept, fall back to a joint solve, or fail.
        theta_norm = tensor_sobolev_norm(
            TensorCoeffs(params, theta_windows, theta_comps[()]), 0.0
        )
        if theta_norm <= opts.tol_residual * scale:
            return {(): eta1_comps[()]}, eta1_windows
        if theta_norm <= np.sqrt(opts.tol_residual) * scale:
            return _joint_degree1_solve(params, windows, comps, opts, eta1_comps[()], eta1_windows)
        raise ThetaNotVanishing(
            f"invariant remainder has norm {theta_norm:.3e} "
            f"(budget {opts.tol_residual * scale:.3e}); input may not be closed"
        )

    # zeta: primitives of the theta slices, recursed at degree n-1.  The
    # assembled components containing axis 0 enter d(eta) through -d(zeta_k),
    # so zeta solves for the negated remainder.
    zslices = []
    for k in theta_windows[0].indices():
        sub = _slice_comps(theta_comps, theta_windows[0].lo, k, relabel=True)
        sub = {axes: -arr for axes, arr in sub.items()}
        zslices.append(_primitive_rec(sub_params, theta_windows[1:], sub, n - 1, opts, scale))
    zeta_comps, zeta_sub_windows = _stack_slices(zslices, theta_windows[0])
    zeta_windows = (theta_windows[0],) + zeta_sub_windows

    # assemble: tuples with axis 0 take zeta slices, the rest take eta1
    items: list[tuple[np.ndarray, tuple[IndexWindow, ...]]] = []
    keys: list[Axes] = []
    for axes in itertools.combinations(range(d), n - 1):
        if axes and axes[0] == 0:
            arr = zeta_comps[tuple(a - 1 for a in axes[1:])]
            items.append((arr, zeta_windows))
        else:
            arr = eta1_comps[tuple(a - 1 for a in axes)]
            items.append((arr, eta1_windows))
        keys.append(axes)
    arrays, hull = _unify(items)
    return dict(zip(keys, arrays)), hull


def _stack_slices(
    slices: list[tuple[dict[Axes, np.ndarray], tuple[IndexWindow, ...]]],
    w0: IndexWindow,
) -> tuple[dict[Axes, np.ndarray], tuple[IndexWindow, ...]]:
    """Merge per-slice solutions into full components with axis 0 restored."""
    hull = tuple(
        IndexWindow(min(w[j].lo for _, w in slices), max(w[j].hi for _, w in slices))
        for j in range(len(slices[0][1]))
    )
    keys = list(slices[0][0].keys())
    out = {}
    for key in keys:
        stacked = np.stack(
            [tensor.embed_array(comps[key], wins, hull) for comps, wins in slices],
            axis=0,
        )
        out[key] = stacked
    return out, hull


def _axis_operator_sparse(
    params: MultiParam, windows: tuple[IndexWindow, ...], axis: int
) -> tuple[sp.csr_matrix, tuple[IndexWindow, ...]]:
    """Sparse matrix of U_axis from `windows` to the axis-expanded windows."""
    mats = []
    out_windows = []
    for j, (p, w) in enumerate(zip(params.factors, windows)):
        if j == axis:
            a, w_out = repn.u_matrix(p, w)
            mats.append(sp.csr_matrix(a))
            out_windows.append(w_out)
        else:
            mats.append(sp.identity(len(w), dtype=np.complex128, format="csr"))
            out_windows.append(w)
    op = mats[0]
    for m in mats[1:]:
        op = sp.kron(op, m, format="csr")
    return op, tuple(out_windows)


def _joint_degree1_solve(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    comps: dict[Axes, np.ndarray],
    opts: SolveOptions,
    init: np.ndarray,
    init_windows: tuple[IndexWindow, ...],
) -> tuple[dict[Axes, np.ndarray], tuple[IndexWindow, ...]]:
    """Stacked least squares for U_j eta = w((j,)), all axes at once."""
    d = params.d
    g_windows = tuple(expand_window(p, w, opts.pad) for p, w in zip(params.factors, windows))
    blocks = []
    rhs_parts = []
    col_scale = None
    for j in range(d):
        op, out_wins = _axis_operator_sparse(params, g_windows, j)
        w_out = _weight_vector(params, out_wins)
        w_in = _weight_vector(params, g_windows)
        blocks.append(sp.diags(w_out) @ op @ sp.diags(1.0 / w_in))
        col_scale = w_in
        rhs = tensor.embed_array(comps[(j,)], windows, out_wins).ravel()
        rhs_parts.append(rhs * w_out)
    a = sp.vstack(blocks, format="csr")
    b = np.concatenate(rhs_parts)
    x0 = tensor.embed_array(init, init_windows, g_windows).ravel() * col_scale
    res = lsmr(a, b, x0=x0, atol=1e-14, btol=1e-14, maxiter=5000)
    x = res[0] / col_scale
    return {(): x.reshape(tuple(len(w) for w in g_windows))}, g_windows


def _weight_vector(params: MultiParam, windows: tuple[IndexWindow, ...]) -> np.ndarray:
    w = np.ones(1)
    for p, win in zip(params.factors, windows):
        w = np.kron(w, np.sqrt(repn.basis_norm_sq_array(p, win)))
    return w


def solve_primitive(
    w: LeafwiseForm, opts: SolveOptions = SolveOptions()
) -> tuple[LeafwiseForm, SolveReport]:
    """Primitive eta with d(eta) = w, for closed w of degree 1..d-1.

    Raises NotClosed on the precondition, ThetaNotVanishing when the
    degenerate branch's invariant remainder survives, NoConvergence when
    the assembled residual misses the tolerance.
    """
    n, d = w.degree, w.d
    if d < 2 or not 1 <= n <= d - 1:
        raise ValueError(f"solve_primitive needs d >= 2 and 1 <= degree <= d-1, got n={n}, d={d}")
    wn0 = form_norm0(w)
    closed, defect = is_closed(w, opts.tol_kernel)
    if not closed:
        raise NotClosed(
            f"||d w||_0 = {defect:.3e} exceeds {opts.tol_kernel:.1e} * ||w||_0"
        )
    if wn0 == 0.0:
        eta = zero_form(w.params, w.windows, n - 1)
        return eta, SolveReport(0.0, 0.0, defect, {t: 0.0 for t in opts.t_list}, 0)
    comps, hull = _primitive_rec(w.params, w.windows, dict(w.components), n, opts, wn0)
    eta = LeafwiseForm(n - 1, w.params, hull, comps)
    resid_form = _form_difference(exterior_derivative(eta), w)
    residual = form_norm0(resid_form)
    if residual > opts.tol_residual * wn0:
        raise NoConvergence(
            f"primitive residual {residual:.3e} above {opts.tol_residual:.1e} * ||w||_0"
        )
    ratios = {}
    for t in opts.t_list:
        denom = form_sobolev_norm(
            w, varsigma_schedule(t, d, opts.varsigma_base, opts.s1, opts.c_const)
        )
        ratios[t] = form_sobolev_norm(eta, t) / denom if denom > 0 else 0.0
    return eta, SolveReport(residual, wn0, defect, ratios, 0)


def _form_difference(a: LeafwiseForm, b: LeafwiseForm) -> LeafwiseForm:
    if a.degree != b.degree or a.params != b.params:
        raise ValueError("form mismatch")
    hull = tensor.common_windows(a.windows, b.windows)
    comps = {
        axes: tensor.embed_array(a.components[axes], a.windows, hull)
        - tensor.embed_array(b.components[axes], b.windows, hull)
        for axes in a.components
    }
    return LeafwiseForm(a.degree, a.params, hull, comps)
