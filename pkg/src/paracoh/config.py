"""Experiment configuration: components, truncation, tolerances, seeds."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

from .errors import ConfigError
from .params import MultiParam, SeriesParam
from .serialize import factor_from_json, factor_to_json
from .solver import SolveOptions


@dataclass(frozen=True)
class ComponentConfig:
    """One direct-sum component: a label and its factor parameters."""

    label: str
    factors: tuple[SeriesParam, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    components: tuple[ComponentConfig, ...]
    k_per_axis: int = 64
    t_list: tuple[float, ...] = (1.0, 2.0)
    seed: int = 0
    eps0: float = 0.05
    nu0: float = 0.95
    pad: int = 8
    tol_kernel: float = 1e-8
    tol_residual: float = 1e-8
    max_refine: int = 3
    out_dir: str | None = None

    def __post_init__(self):
        if not self.components:
            raise ConfigError("component list is empty")
        d = len(self.components[0].factors)
        for c in self.components:
            if len(c.factors) != d:
                raise ConfigError(
                    f"component {c.label!r} has {len(c.factors)} factors, others have {d}"
                )
        if self.k_per_axis < 4:
            raise ConfigError(f"k_per_axis too small: {self.k_per_axis}")
        if not self.t_list or any(t <= 0 for t in self.t_list):
            raise ConfigError(f"t_list must be positive, got {self.t_list}")

    @property
    def d(self) -> int:
        return len(self.components[0].factors)

    def multi_param(self, component: ComponentConfig) -> MultiParam:
        # gate violations surface here as AssumptionGateError / SpectralGapError
        return MultiParam(component.factors, eps0=self.eps0, nu0=self.nu0)

    def solve_options(self) -> SolveOptions:
        return SolveOptions(
            pad=self.pad,
            tol_kernel=self.tol_kernel,
            tol_residual=self.tol_residual,
            max_refine=self.max_refine,
            t_list=self.t_list,
        )


def config_to_json(cfg: ExperimentConfig) -> dict:
    return {
        "components": [
            {"label": c.label, "factors": [factor_to_json(p) for p in c.factors]}
            for c in cfg.components
        ],
        "k_per_axis": cfg.k_per_axis,
        "t_list": list(cfg.t_list),
        "seed": cfg.seed,
        "eps0": cfg.eps0,
        "nu0": cfg.nu0,
        "pad": cfg.pad,
        "tol_kernel": cfg.tol_kernel,
        "tol_residual": cfg.tol_residual,
        "max_refine": cfg.max_refine,
        "out_dir": cfg.out_dir,
    }


def config_from_json(doc) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    try:
        comps = tuple(
            ComponentConfig(
                label=str(c.get("label", f"component-{i}")),
                factors=tuple(factor_from_json(p) for p in c["factors"]),
            )
            for i, c in enumerate(doc["components"])
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad components entry: {exc}") from exc
    kwargs = {}
    for key in (
        "k_per_axis",
        "seed",
        "pad",
        "max_refine",
    ):
        if key in doc:
            kwargs[key] = int(doc[key])
    for key in ("eps0", "nu0", "tol_kernel", "tol_residual"):
        if key in doc:
            kwargs[key] = float(doc[key])
    if "t_list" in doc:
        kwargs["t_list"] = tuple(float(t) for t in doc["t_list"])
    if doc.get("out_dir") is not None:
        kwargs["out_dir"] = str(doc["out_dir"])
    try:
        return ExperimentConfig(components=comps, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_json(doc)


def config_hash(cfg: ExperimentConfig) -> str:
    doc = config_to_json(cfg)
    doc.pop("out_dir", None)  # location does not change the experiment
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def default_config(d: int = 2, seed: int = 0, k_per_axis: int = 32) -> ExperimentConfig:
    """A small built-in component list so the CLI runs without a file.

    Components form a one-parameter slice (principal nu varying, the other
    factors fixed), the shape a direct-integral surrogate takes.
    """
    tail = (SeriesParam.complementary(0.9), SeriesParam.discrete(1))
    comps = []
    for i, s in enumerate((1.0, 1.5, 2.0)):
        factors = (SeriesParam.principal(s),) + tail[: d - 1]
        comps.append(ComponentConfig(label=f"component-{i}", factors=factors))
    return ExperimentConfig(
        components=tuple(comps), seed=seed, k_per_axis=k_per_axis
    )


def override(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return replace(cfg, **kwargs) if kwargs else cfg
