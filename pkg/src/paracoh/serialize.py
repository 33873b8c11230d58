"""JSON schemas for coefficient data, forms, and reports.

One document per object.  Tensors:

    {"format_version": 1,
     "factors": [{"kind": "principal", "nu_im": 2.0} |
                 {"kind": "complementary", "nu": 0.5} |
                 {"kind": "discrete", "n": 1}, ...],
     "windows": [{"lo": -64, "hi": 64}, ...],
     "coeffs": [{"k": [0, 1], "re": ..., "im": ...}, ...]}

Coefficients are sparse (nonzero entries only, sorted by index tuple) and
round-trip bit-exactly.  Forms add "degree" and per-component documents
under "components", with 1-based "axes".  Loads validate kinds, windows,
index membership, finiteness, and the format version.
"""

from __future__ import annotations

import json
import math
import os
from typing import Any

import numpy as np

from .errors import SchemaError
from .forms import LeafwiseForm
from .params import IndexWindow, Kind, MultiParam, SeriesParam
from .repn import CoeffVector
from .tensor import TensorCoeffs, from_coeff_vector

FORMAT_VERSION = 1


def factor_to_json(p: SeriesParam) -> dict:
    if p.kind is Kind.PRINCIPAL:
        return {"kind": "principal", "nu_im": p.nu.imag}
    if p.kind is Kind.COMPLEMENTARY:
        return {"kind": "complementary", "nu": p.nu.real}
    return {"kind": "discrete", "n": p.n}


def factor_from_json(obj: Any) -> SeriesParam:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"bad factor entry: {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "principal":
            return SeriesParam.principal(float(obj["nu_im"]))
        if kind == "complementary":
            return SeriesParam.complementary(float(obj["nu"]))
        if kind == "discrete":
            return SeriesParam.discrete(int(obj["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad factor entry {obj!r}: {exc}") from exc
    raise SchemaError(f"unknown factor kind {kind!r}")


def window_from_json(obj: Any) -> IndexWindow:
    try:
        return IndexWindow(int(obj["lo"]), int(obj["hi"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad window entry {obj!r}: {exc}") from exc


def _coeffs_to_json(arr: np.ndarray, windows: tuple[IndexWindow, ...]) -> list[dict]:
    entries = []
    for idx in np.argwhere(arr != 0):
        k = [int(i + w.lo) for i, w in zip(idx, windows)]
        val = arr[tuple(idx)]
        entries.append({"k": k, "re": float(val.real), "im": float(val.imag)})
    entries.sort(key=lambda e: tuple(e["k"]))
    return entries


def _coeffs_from_json(
    entries: Any, windows: tuple[IndexWindow, ...]
) -> np.ndarray:
    arr = np.zeros(tuple(len(w) for w in windows), dtype=np.complex128)
    seen = set()
    if not isinstance(entries, list):
        raise SchemaError("coeffs must be a list")
    for e in entries:
        try:
            k = tuple(int(x) for x in e["k"])
            re, im = float(e["re"]), float(e["im"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad coefficient entry {e!r}: {exc}") from exc
        if len(k) != len(windows):
            raise SchemaError(f"index {k} has wrong rank")
        if k in seen:
            raise SchemaError(f"duplicate index {k}")
        seen.add(k)
        if not (math.isfinite(re) and math.isfinite(im)):
            raise SchemaError(f"non-finite coefficient at {k}")
        pos = []
        for x, w in zip(k, windows):
            if x not in w:
                raise SchemaError(f"index {k} outside window [{w.lo}, {w.hi}]")
            pos.append(x - w.lo)
        arr[tuple(pos)] = complex(re, im)
    return arr


def _check_version(doc: Any) -> None:
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(
            f"format_version {doc.get('format_version')!r} not supported "
            f"(want {FORMAT_VERSION})"
        )


def tensor_to_json(f: TensorCoeffs) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "factors": [factor_to_json(p) for p in f.params.factors],
        "windows": [{"lo": w.lo, "hi": w.hi} for w in f.windows],
        "coeffs": _coeffs_to_json(f.coeffs, f.windows),
    }


def tensor_from_json(doc: Any, eps0: float = 0.05, nu0: float = 0.95) -> TensorCoeffs:
    _check_version(doc)
    try:
        factors = tuple(factor_from_json(o) for o in doc["factors"])
        windows = tuple(window_from_json(o) for o in doc["windows"])
    except KeyError as exc:
        raise SchemaError(f"missing field {exc}") from exc
    if len(factors) != len(windows):
        raise SchemaError("factors and windows disagree in length")
    params = MultiParam(factors, eps0=eps0, nu0=nu0)
    arr = _coeffs_from_json(doc.get("coeffs", []), windows)
    return TensorCoeffs(params, windows, arr)


def vector_to_json(f: CoeffVector) -> dict:
    return tensor_to_json(from_coeff_vector(f))


def vector_from_json(doc: Any, eps0: float = 0.05, nu0: float = 0.95) -> CoeffVector:
    t = tensor_from_json(doc, eps0, nu0)
    if t.d != 1:
        raise SchemaError(f"expected one factor, got {t.d}")
    return t.factor_vector()


def form_to_json(w: LeafwiseForm) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "degree": w.degree,
        "factors": [factor_to_json(p) for p in w.params.factors],
        "windows": [{"lo": win.lo, "hi": win.hi} for win in w.windows],
        "components": [
            {"axes": [a + 1 for a in axes], "coeffs": _coeffs_to_json(arr, w.windows)}
            for axes, arr in sorted(w.components.items())
        ],
    }


def form_from_json(doc: Any, eps0: float = 0.05, nu0: float = 0.95) -> LeafwiseForm:
    _check_version(doc)
    try:
        degree = int(doc["degree"])
        factors = tuple(factor_from_json(o) for o in doc["factors"])
        windows = tuple(window_from_json(o) for o in doc["windows"])
        entries = doc["components"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad form document: {exc}") from exc
    params = MultiParam(factors, eps0=eps0, nu0=nu0)
    comps = {}
    for e in entries:
        try:
            axes = tuple(int(a) - 1 for a in e["axes"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad component entry: {exc}") from exc
        if axes in comps:
            raise SchemaError(f"duplicate component {axes}")
        if any(not 0 <= a < params.d for a in axes) or tuple(sorted(axes)) != axes:
            raise SchemaError(f"bad axes tuple {[a + 1 for a in axes]}")
        comps[axes] = _coeffs_from_json(e.get("coeffs", []), windows)
    try:
        return LeafwiseForm(degree, params, windows, comps)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def save_json(path: str | os.PathLike, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_json(path: str | os.PathLike) -> Any:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc


def save_tensor(path: str | os.PathLike, f: TensorCoeffs) -> None:
    save_json(path, tensor_to_json(f))


def load_tensor(path: str | os.PathLike, eps0: float = 0.05, nu0: float = 0.95) -> TensorCoeffs:
    return tensor_from_json(load_json(path), eps0, nu0)


def save_form(path: str | os.PathLike, w: LeafwiseForm) -> None:
    save_json(path, form_to_json(w))


def load_form(path: str | os.PathLike, eps0: float = 0.05, nu0: float = 0.95) -> LeafwiseForm:
    return form_from_json(load_json(path), eps0, nu0)


def table_to_csv(rows: list[dict], path: str | os.PathLike) -> None:
    """Sweep table with the fixed header param,value,bound,ratio."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "value", "bound", "ratio"])
        for row in rows:
            writer.writerow(
                [row.get("param"), row.get("value"), row.get("bound"), row.get("ratio")]
            )
