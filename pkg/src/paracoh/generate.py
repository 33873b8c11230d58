"""Seeded random inputs: smooth-vector surrogates, coboundaries, closed forms.

Coefficients are i.i.d. complex Gaussian damped by (1+Q)^(-decay) so that
high Sobolev norms stay finite at desk scale; `margin` zeroes a band at the
truncation edges so the generator action cannot spill outside the window.
The lowest-weight edge of a discrete factor is a true boundary of the index
set, not a truncation cut, so no margin is applied there.
"""

from __future__ import annotations

import numpy as np

from . import forms, repn, tensor
from .forms import LeafwiseForm
from .params import IndexWindow, Kind, MultiParam, SeriesParam
from .repn import CoeffVector
from .tensor import TensorCoeffs


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _edge_mask(param: SeriesParam, window: IndexWindow, margin: int) -> np.ndarray:
    keep = np.ones(len(window), dtype=bool)
    if margin > 0:
        keep[-margin:] = False
        if not (param.kind is Kind.DISCRETE and window.lo == param.n):
            keep[:margin] = False
    return keep


def random_vector(
    param: SeriesParam,
    window: IndexWindow,
    rng: np.random.Generator,
    decay: float = 4.0,
    margin: int = 2,
) -> CoeffVector:
    q = 1.0 + repn.weight_q_array(param, window.indices())
    coeffs = _complex_normal(rng, len(window)) * q ** (-decay)
    coeffs[~_edge_mask(param, window, margin)] = 0.0
    return CoeffVector(param, window, coeffs)


def random_tensor(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    rng: np.random.Generator,
    decay: float = 4.0,
    margin: int = 2,
) -> TensorCoeffs:
    qgrid, _ = tensor._weight_grids(params, windows)
    coeffs = _complex_normal(rng, qgrid.shape) * qgrid ** (-decay)
    for j, (p, w) in enumerate(zip(params.factors, windows)):
        shape = [1] * params.d
        shape[j] = len(w)
        coeffs = coeffs * _edge_mask(p, w, margin).reshape(shape)
    return TensorCoeffs(params, tuple(windows), coeffs)


def random_kernel_tensor(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    rng: np.random.Generator,
    decay: float = 4.0,
    margin: int = 2,
) -> TensorCoeffs:
    return tensor.kernel_project(random_tensor(params, windows, rng, decay, margin))


def random_coboundary_vector(
    param: SeriesParam,
    window: IndexWindow,
    rng: np.random.Generator,
    decay: float = 4.0,
    margin: int = 3,
) -> tuple[CoeffVector, CoeffVector]:
    """(f, g0) with f = U g0 re-windowed onto `window`; f is a coboundary."""
    g0 = random_vector(param, window, rng, decay, max(margin, 2))
    f = repn.apply_U(g0).embedded(window)
    return f, g0


def random_coboundary_tensor(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    rng: np.random.Generator,
    decay: float = 4.0,
    margin: int = 3,
) -> tuple[TensorCoeffs, list[TensorCoeffs]]:
    """(f, [h_i]) with f = sum_i U_i h_i on the original windows."""
    hs = [
        random_tensor(params, windows, rng, decay, max(margin, 2))
        for _ in range(params.d)
    ]
    f = tensor.zeros(params, windows)
    for i, h in enumerate(hs):
        f = tensor.add(f, tensor.apply_U_factor(h, i))
    return f.embedded(windows), hs


def random_form(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    degree: int,
    rng: np.random.Generator,
    decay: float = 4.0,
    margin: int = 2,
) -> LeafwiseForm:
    import itertools

    comps = {
        axes: random_tensor(params, windows, rng, decay, margin).coeffs.copy()
        for axes in itertools.combinations(range(params.d), degree)
    }
    return LeafwiseForm(degree, params, tuple(windows), comps)


def random_closed_form(
    params: MultiParam,
    windows: tuple[IndexWindow, ...],
    degree: int,
    rng: np.random.Generator,
    decay: float = 4.0,
    margin: int = 3,
) -> tuple[LeafwiseForm, LeafwiseForm]:
    """(w, eta_true) with w = d(eta_true): closed to machine precision."""
    if not 1 <= degree <= params.d:
        raise ValueError(f"degree {degree} out of range")
    eta = random_form(params, windows, degree - 1, rng, decay, max(margin, 2))
    return forms.exterior_derivative(eta), eta
