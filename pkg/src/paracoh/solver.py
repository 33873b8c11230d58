"""Coboundary solvers: the degree-1 base case, the splitting, the recursion.

The degree-1 equation U g = f is solved as a weighted least-squares problem
on a padded window.  The truncated operator is a full-column-rank banded
matrix whose cokernel is exactly the span of the restricted invariant
functionals, so for inputs annihilated by those functionals the truncated
system is consistent and the (unique) least-squares solution is exact up to
rounding.  Obstructed inputs leave a residual bounded below by the dual
certificate |D(f)| / ||Riesz(D)||, which `obstruction_certificate` reports.

Top degree recurses on the number of factors: split f into f_otimes + f_d,
solve the two leading-factor problems for the split amplitudes F_plus and
F_minus once each, solve the last-factor equation slice by slice for f_d,
and assemble.  Padded windows keep minimal-norm freedom; refinement doubles
the padding and accepts once the solution stabilizes on the original window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from . import repn, tensor
from .distributions import Sign, dist_values_array, evaluate, phi, valid_signs
from .errors import NoConvergence, NotInKernel
from .params import IndexWindow, MultiParam, SeriesParam, expand_window
from .repn import CoeffVector, basis_norm_sq_array, sobolev_norm, u_matrix
from .tensor import TensorCoeffs, norm0, tensor_sobolev_norm, valid_tags


@dataclass(frozen=True)
class SolveOptions:
    """Window padding, tolerances, and reporting knobs for all solvers."""

    pad: int = 8
    tol_kernel: float = 1e-8
    tol_residual: float = 1e-8
    max_refine: int = 3
    t_list: tuple[float, ...] = (1.0, 2.0)
    s1: float = 3.0         # degree-1 Sobolev loss used in reports
    c_const: float = 0.5    # additive constant in the schedule recursion
    varsigma_base: float = 4.0  # two-factor lower-degree loss offset

    def __post_init__(self):
        if self.pad < 2:
            raise ValueError(f"pad must be >= 2, got {self.pad}")
        if self.tol_kernel <= 0 or self.tol_residual <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_refine < 1:
            raise ValueError("need at least one refinement for stabilization")


@dataclass
class SolveReport:
    """Residual and Sobolev-ratio diagnostics for one solver call.

    residual_interior and kernel_defect are absolute ||.||_0 quantities;
    divide by f_norm0 for the relative gates.
    """

    residual_interior: float
    f_norm0: float
    kernel_defect: float
    sobolev_ratios: dict[float, float] = field(default_factory=dict)
    refinements_used: int = 0

    def as_dict(self) -> dict:
        return {
            "residual_interior": self.residual_interior,
            "f_norm0": self.f_norm0,
            "kernel_defect": self.kernel_defect,
            "sobolev_ratios": {str(t): r for t, r in self.sobolev_ratios.items()},
            "refinements_used": self.refinements_used,
        }


def sigma_schedule(t: float, d: int, s1: float = 3.0, c: float = 0.5) -> float:
    """Sobolev loss for the top-degree solve: sigma_1 = t + s1, then
    sigma_d = 2(sigma_{d-1} + t) + c."""
    if t <= 0:
        raise ValueError(f"needs t > 0, got {t}")
    if d < 1:
        raise ValueError(f"needs d >= 1, got {d}")
    sigma = t + s1
    for _ in range(d - 1):
        sigma = 2.0 * (sigma + t) + c
    return sigma


# --- degree-1 least squares ------------------------------------------------


@dataclass(frozen=True)
class _Factor:
    q: np.ndarray
    r: np.ndarray
    win_in: IndexWindow
    win_out: IndexWindow
    w_in: np.ndarray
    w_out: np.ndarray


@lru_cache(maxsize=6)
def _qr_factor(param: SeriesParam, lo: int, hi: int) -> _Factor:
    win_in = IndexWindow(lo, hi)
    a, win_out = u_matrix(param, win_in)
    w_in = np.sqrt(basis_norm_sq_array(param, win_in))
    w_out = np.sqrt(basis_norm_sq_array(param, win_out))
    a_hat = a * w_out[:, None] / w_in[None, :]
    q, r = sla.qr(a_hat, mode="economic")
    return _Factor(q, r, win_in, win_out, w_in, w_out)


def _embed_rows(rows: np.ndarray, win_from: IndexWindow, win_to: IndexWindow) -> np.ndarray:
    out = np.zeros((rows.shape[0], len(win_to)), dtype=np.complex128)
    off = win_from.lo - win_to.lo
    out[:, off : off + len(win_from)] = rows
    return out


def _lstsq_rows(
    param: SeriesParam, win_in: IndexWindow, rhs: np.ndarray, win_rhs: IndexWindow
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares solve of the generator for a batch of right-hand sides.

    rhs has shape (batch, len(win_rhs)); returns (solutions on win_in,
    per-row residual in the ||.||_0 metric over the full output window).
    """
    fac = _qr_factor(param, win_in.lo, win_in.hi)
    if not fac.win_out.contains_window(win_rhs):
        raise ValueError("rhs window exceeds the solve's output window")
    f_hat = _embed_rows(rhs, win_rhs, fac.win_out) * fac.w_out[None, :]
    y = f_hat @ np.conj(fac.q)            # (batch, n_in) = (Q^H f)^T
    x_hat = sla.solve_triangular(fac.r, y.T, lower=False).T
    resid = f_hat - y @ fac.q.T
    resid_norm = np.linalg.norm(resid, axis=1)
    return x_hat / fac.w_in[None, :], resid_norm


def _solve_rows_refined(
    param: SeriesParam,
    win_rhs: IndexWindow,
    rhs: np.ndarray,
    opts: SolveOptions,
    scale: float,
) -> tuple[np.ndarray, IndexWindow, float, int]:
    """Refinement loop for a batch sharing one operator.

    Accepts once every row's residual is below tol_residual*scale and the
    solutions agree on the previous window to the same tolerance.  Returns
    (solutions, window, worst residual, refinements used).
    """
    tol = opts.tol_residual * scale
    pad = opts.pad
    prev = None
    for attempt in range(opts.max_refine + 1):
        win_in = expand_window(param, win_rhs, pad)
        sol, resid = _lstsq_rows(param, win_in, rhs, win_rhs)
        if prev is not None:
            prev_sol, prev_win = prev
            off = prev_win.lo - win_in.lo
            w0 = np.sqrt(basis_norm_sq_array(param, prev_win))
            diff = (sol[:, off : off + len(prev_win)] - prev_sol) * w0[None, :]
            stable = float(np.max(np.linalg.norm(diff, axis=1), initial=0.0)) <= tol
            if stable and float(np.max(resid, initial=0.0)) <= tol:
                return sol, win_in, float(np.max(resid, initial=0.0)), attempt
        prev = (sol, win_in)
        pad *= 2
    raise NoConvergence(
        f"degree-1 solve did not stabilize after {opts.max_refine} refinements "
        f"(worst residual {float(np.max(resid, initial=0.0)):.3e}, budget {tol:.3e})"
    )


def solve_degree1(f: CoeffVector, opts: SolveOptions = SolveOptions()) -> tuple[CoeffVector, SolveReport]:
    """Solve U g = f for one irreducible; f must annihilate D+ (and D-).

    Returns the unique least-squares solution on the padded window together
    with residual/ratio diagnostics.  Raises NotInKernel when an invariant
    functional does not vanish on f, NoConvergence when refinement fails.
    """
    fn0 = sobolev_norm(f, 0.0)
    defect = 0.0
    for tag in valid_signs(f.param):
        val = abs(evaluate(f, tag))
        defect = max(defect, val)
        if val > opts.tol_kernel * fn0:
            raise NotInKernel(
                f"D{tag.value}(f) = {val:.3e} exceeds {opts.tol_kernel:.1e} * ||f||_0",
                defect=val,
                tag=(tag,),
            )
    if fn0 == 0.0:
        g = repn.zero_vector(f.param, f.window)
        return g, SolveReport(0.0, 0.0, 0.0, {t: 0.0 for t in opts.t_list}, 0)
    sol, win, resid, refs = _solve_rows_refined(
        f.param, f.window, f.coeffs[None, :], opts, fn0
    )
    g = CoeffVector(f.param, win, sol[0])
    ratios = {}
    for t in opts.t_list:
        denom = sobolev_norm(f, sigma_schedule(t, 1, opts.s1, opts.c_const))
        ratios[t] = sobolev_norm(g, t) / denom if denom > 0 else 0.0
    return g, SolveReport(resid, fn0, defect, ratios, refs)


# --- splitting --------------------------------------------------------------


@dataclass(frozen=True)
class SplitParts:
    """f = f_otimes + f_d, with the split amplitudes F_± exposed."""

    f_otimes: TensorCoeffs
    f_d: TensorCoeffs
    amplitudes: dict[Sign, TensorCoeffs]  # rank d-1, F_s(k) = sum_m f(k,m) D^s(u(m))


def split(f: TensorCoeffs) -> SplitParts:
    """Separate the last factor: f_otimes(k,l) = sum_± phi_±(l) F_±(k)."""
    d = f.d
    if d < 2:
        raise ValueError("split needs d >= 2")
    p_last = f.params.factors[-1]
    w_last = f.windows[-1]
    lead_params = f.params.keep_leading(d - 1)
    lead_windows = f.windows[:-1]
    amplitudes = {}
    f_ot = np.zeros(f.coeffs.shape, dtype=np.complex128)
    for s in (Sign.PLUS, Sign.MINUS):
        dv = dist_values_array(p_last, s, w_last)
        amp = np.tensordot(f.coeffs, dv, axes=([d - 1], [0]))
        amplitudes[s] = TensorCoeffs(lead_params, lead_windows, amp)
        phi_vec = phi(p_last, s).embedded(w_last).coeffs
        f_ot = f_ot + amp[..., None] * phi_vec
    f_otimes = TensorCoeffs(f.params, f.windows, f_ot)
    f_d = TensorCoeffs(f.params, f.windows, f.coeffs - f_ot)
    return SplitParts(f_otimes, f_d, amplitudes)


def regularity_check(f: TensorCoeffs, t: float, c: float = 0.5) -> float:
    """Diagnostic ratio ||f_otimes||_t / ||f||_{2t+c}."""
    if f.d < 2:
        raise ValueError("needs d >= 2")
    if t <= 0:
        raise ValueError(f"needs t > 0, got {t}")
    denom = tensor_sobolev_norm(f, 2.0 * t + c)
    if denom == 0.0:
        return 0.0
    return tensor_sobolev_norm(split(f).f_otimes, t) / denom


# --- top-degree recursion ---------------------------------------------------


def _slice_kernel_guard(
    rows: np.ndarray, param: SeriesParam, window: IndexWindow, opts: SolveOptions, scale: float
) -> float:
    worst = 0.0
    for s in valid_signs(param):
        dv = dist_values_array(param, s, window)
        defects = np.abs(rows @ dv)
        worst = max(worst, float(np.max(defects, initial=0.0)))
    if worst > opts.tol_kernel * scale:
        raise NotInKernel(
            f"slice defect {worst:.3e} exceeds {opts.tol_kernel:.1e} * scale", defect=worst
        )
    return worst


def _solve_top_rec(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    arr: np.ndarray,
    opts: SolveOptions,
    scale: float,
) -> tuple[list[tuple[np.ndarray, tuple[IndexWindow, ...]]], int]:
    """Recursive solve; returns [(g_i coefficients, g_i windows)] and the
    worst refinement count.  Kernel membership is guarded per slice against
    the global scale."""
    d = params.d
    p_last = params.factors[-1]
    w_last = windows[-1]
    if d == 1:
        rows = arr[None, :]
        _slice_kernel_guard(rows, p_last, w_last, opts, scale)
        sol, win, _, refs = _solve_rows_refined(p_last, w_last, rows, opts, scale)
        return [(sol[0], (win,))], refs
    f = TensorCoeffs(params, windows, arr)
    parts = split(f)
    lead_params = params.keep_leading(d - 1)
    lead_windows = windows[:-1]
    refs_worst = 0

    # leading-factor problems, one per split amplitude
    partials: dict[Sign, list[tuple[np.ndarray, tuple[IndexWindow, ...]]] | None] = {}
    for s in (Sign.PLUS, Sign.MINUS):
        amp = parts.amplitudes[s]
        if norm0(amp) == 0.0:
            partials[s] = None
            continue
        sols, refs = _solve_top_rec(lead_params, amp.windows, amp.coeffs, opts, scale)
        partials[s] = sols
        refs_worst = max(refs_worst, refs)

    out: list[tuple[np.ndarray, tuple[IndexWindow, ...]]] = []
    for i in range(d - 1):
        acc = None
        acc_wins = None
        for s in (Sign.PLUS, Sign.MINUS):
            if partials[s] is None:
                continue
            gi, gi_wins = partials[s][i]
            phi_vec = phi(p_last, s).embedded(w_last).coeffs
            term = gi[..., None] * phi_vec
            if acc is None:
                acc, acc_wins = term, gi_wins + (w_last,)
            else:
                wins = tensor.common_windows(acc_wins, gi_wins + (w_last,))
                acc = tensor.embed_array(acc, acc_wins, wins) + tensor.embed_array(
                    term, gi_wins + (w_last,), wins
                )
                acc_wins = wins
        if acc is None:
            acc = np.zeros(tuple(len(w) for w in lead_windows) + (len(w_last),), np.complex128)
            acc_wins = lead_windows + (w_last,)
        out.append((acc, acc_wins))

    # last-factor problem, slice by slice over the leading indices
    lead_shape = tuple(len(w) for w in lead_windows)
    rows = parts.f_d.coeffs.reshape(int(np.prod(lead_shape)), len(w_last))
    _slice_kernel_guard(rows, p_last, w_last, opts, scale)
    sol, win, _, refs = _solve_rows_refined(p_last, w_last, rows, opts, scale)
    refs_worst = max(refs_worst, refs)
    out.append((sol.reshape(lead_shape + (len(win),)), lead_windows + (win,)))
    return out, refs_worst


def solve_top(
    f: TensorCoeffs, opts: SolveOptions = SolveOptions()
) -> tuple[list[TensorCoeffs], SolveReport]:
    """Solve U_1 g_1 + ... + U_d g_d = f for f in the joint kernel.

    Returns d tensors on common padded windows plus diagnostics.  Raises
    NotInKernel if some product functional does not vanish on f, and
    NoConvergence if the residual survives refinement.
    """
    fn0 = norm0(f)
    worst_tag, worst = None, 0.0
    for tag in valid_tags(f.params):
        val = abs(tensor.product_dist_evaluate(f, tag))
        if val > worst:
            worst_tag, worst = tag, val
    if worst > opts.tol_kernel * fn0:
        raise NotInKernel(
            f"product functional {''.join(s.value for s in worst_tag)} gives "
            f"{worst:.3e} on f (budget {opts.tol_kernel:.1e} * ||f||_0)",
            defect=worst,
            tag=worst_tag,
        )
    if fn0 == 0.0:
        zero = [tensor.zeros(f.params, f.windows) for _ in range(f.d)]
        return zero, SolveReport(0.0, 0.0, 0.0, {t: 0.0 for t in opts.t_list}, 0)
    raw, refs = _solve_top_rec(f.params, f.windows, f.coeffs, opts, fn0)
    unified = tuple(
        IndexWindow(min(w[j].lo for _, w in raw), max(w[j].hi for _, w in raw))
        for j in range(f.d)
    )
    g_list = [
        TensorCoeffs(f.params, unified, tensor.embed_array(arr, wins, unified))
        for arr, wins in raw
    ]
    report = verify_solution(f, g_list, opts.t_list, opts)
    report.refinements_used = refs
    report.kernel_defect = worst
    if report.residual_interior > opts.tol_residual * fn0:
        raise NoConvergence(
            f"top-degree residual {report.residual_interior:.3e} above "
            f"{opts.tol_residual:.1e} * ||f||_0 = {opts.tol_residual * fn0:.3e}"
        )
    return g_list, report


def solve_top_vector(
    f: CoeffVector, opts: SolveOptions = SolveOptions()
) -> tuple[list[TensorCoeffs], SolveReport]:
    """d = 1 entry point taking a bare CoeffVector."""
    return solve_top(tensor.from_coeff_vector(f), opts)


def verify_solution(
    f: TensorCoeffs,
    g_list: list[TensorCoeffs],
    t_list: tuple[float, ...] = (1.0, 2.0),
    opts: SolveOptions = SolveOptions(),
) -> SolveReport:
    """Residual of sum_i U_i g_i - f at t=0, kernel defect of f, and the
    ratios ||g_i||_t / ||f||_{sigma_d(t)}.

    The residual is taken over the full padded output windows; truncated
    kernel-consistent systems are exactly solvable, so no edge region is
    excluded.
    """
    if len(g_list) != f.d:
        raise ValueError(f"expected {f.d} primitives, got {len(g_list)}")
    resid = TensorCoeffs(f.params, f.windows, -f.coeffs)
    for i, g in enumerate(g_list):
        resid = tensor.add(resid, tensor.apply_U_factor(g, i))
    fn0 = norm0(f)
    kernel_defect = max(
        (abs(tensor.product_dist_evaluate(f, tag)) for tag in valid_tags(f.params)),
        default=0.0,
    )
    ratios = {}
    for t in t_list:
        denom = tensor_sobolev_norm(f, sigma_schedule(t, f.d, opts.s1, opts.c_const))
        num = max((tensor_sobolev_norm(g, t) for g in g_list), default=0.0)
        ratios[t] = num / denom if denom > 0 else 0.0
    return SolveReport(norm0(resid), fn0, kernel_defect, ratios, 0)


# --- obstruction probes ------------------------------------------------------


@dataclass(frozen=True)
class ObstructionProbe:
    """Least-squares residuals of an (intentionally) unsolvable problem."""

    residual: float          # at the requested padding
    residual_refined: float  # padding doubled
    f_norm0: float


def least_squares_probe(f: CoeffVector, opts: SolveOptions = SolveOptions()) -> ObstructionProbe:
    """Minimal degree-1 residuals at pad and 2*pad, skipping kernel checks."""
    fn0 = sobolev_norm(f, 0.0)
    out = []
    for pad in (opts.pad, 2 * opts.pad):
        win_in = expand_window(f.param, f.window, pad)
        _, resid = _lstsq_rows(f.param, win_in, f.coeffs[None, :], f.window)
        out.append(float(resid[0]))
    return ObstructionProbe(out[0], out[1], fn0)


def obstruction_certificate(f: TensorCoeffs, pad: int = 8) -> float:
    """Certified lower bound on min ||sum_i U_i g_i - f||_0 over truncated g.

    Each product functional's Riesz representative r on the padded output
    windows satisfies A* r = 0 for the joint truncated operator, so the
    minimal residual is at least |D(f)| / ||r||_0; the best such bound over
    the functionals is returned.
    """
    best = 0.0
    for tag in valid_tags(f.params):
        num = abs(tensor.product_dist_evaluate(f, tag))
        if num == 0.0:
            continue
        denom_sq = 1.0
        for p, w, s in zip(f.params.factors, f.windows, tag):
            w_out = expand_window(p, w, pad + 1)
            dv = np.abs(dist_values_array(p, s, w_out)) ** 2
            w2 = basis_norm_sq_array(p, w_out)
            denom_sq *= float(np.sum(dv / w2))
        best = max(best, num / np.sqrt(denom_sq))
    return best
