"""YAML config loading for the pipeline and benchmark runner."""

from dataclasses import replace
from typing import Optional

import yaml

from .errors import InvalidInput
from .measures import MeasureSpec
from .penalties import PenaltySpec
from .pipeline import PipelineConfig
from .solver import SolverConfig

_TOP_KEYS = {
    "measure", "penalty", "alpha", "escalate", "split_frac",
    "lambda_screen", "hp_grid", "seed", "solver",
}
_SOLVER_KEYS = {"max_cd_iters", "cd_tol", "lla_m", "lla_eps", "lla_weight"}


def _measure_from(d) -> MeasureSpec:
    if isinstance(d, str):
        return MeasureSpec(kind=d)
    bw = d.get("bandwidth")
    return MeasureSpec(kind=d.get("kind", "nr_hsic"),
                       bandwidth=None if bw in (None, "median") else float(bw))


def pipeline_config_from_dict(raw: dict) -> PipelineConfig:
    """Validate and build a PipelineConfig from a plain mapping."""
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
    cfg = PipelineConfig()
    kwargs = {}
    if "measure" in raw:
        kwargs["measure"] = _measure_from(raw["measure"])
    if "penalty" in raw:
        kwargs["penalty"] = PenaltySpec.from_dict(raw["penalty"])
    for key in ("alpha", "split_frac", "lambda_screen"):
        if key in raw:
            kwargs[key] = float(raw[key])
    if "escalate" in raw:
        kwargs["escalate"] = bool(raw["escalate"])
    if "seed" in raw:
        kwargs["seed"] = int(raw["seed"])
    if "hp_grid" in raw:
        kwargs["hp_grid"] = [PenaltySpec.from_dict(h) for h in raw["hp_grid"]]
    if "solver" in raw:
        sraw = dict(raw["solver"])
        bad = set(sraw) - _SOLVER_KEYS
        if bad:
            raise InvalidInput(f"unknown solver keys: {sorted(bad)}")
        kwargs["solver"] = SolverConfig(**sraw)
    return replace(cfg, **kwargs)


def load_pipeline_config(path: Optional[str]) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise InvalidInput("config file must contain a mapping")
    return pipeline_config_from_dict(raw)
