"""Thin wrapper around the smrmr screener for array-based workflows.

Exposes three call-and-return entry points that accept plain arrays and
mappings and hand back native Python containers:

    select(X, y, **config) -> BindingReport
    simulate(dgp, n, p, seed=0, c=0.5) -> dict
    benchmark(dgp_spec, config, replicates, workers=1) -> dict

Configuration uses exactly the same keys as the primary package's config
file; no options are added or renamed at this layer.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

import smrmr
from smrmr import (
    InvalidInput,
    NumericalFailure,
    ResourceLimit,
    SmrmrError,
)

__version__ = "0.1.0"

__all__ = ["BindingReport", "select", "simulate", "benchmark", "__version__"]


@dataclass
class BindingReport:
    """Selection outcome with plain-Python field types."""

    w: List[float]
    threshold: Union[float, str]
    selected: List[int]
    fdp_hat: float
    alpha_used: float

    def to_dict(self) -> dict:
        return {
            "w": list(self.w),
            "threshold": self.threshold,
            "selected": list(self.selected),
            "fdp_hat": self.fdp_hat,
            "alpha_used": self.alpha_used,
        }


def _translate(exc: SmrmrError) -> Exception:
    if isinstance(exc, NumericalFailure):
        return ArithmeticError(str(exc))
    if isinstance(exc, ResourceLimit):
        return MemoryError(str(exc))
    return ValueError(str(exc))


def _check_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d array")
    bad = np.argwhere(~np.isfinite(X))
    if bad.size:
        i, j = bad[0]
        raise ValueError(f"non-finite value in X at row {i}, column {j}")
    return X


def _check_vector(y, n_rows: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != n_rows:
        raise ValueError(
            f"length mismatch: X has {n_rows} rows, y has {y.shape[0]} entries"
        )
    bad = np.flatnonzero(~np.isfinite(y))
    if bad.size:
        raise ValueError(f"non-finite value in y at index {int(bad[0])}")
    return y


def select(X, y, **config) -> BindingReport:
    """Run the full selection pipeline and return a plain-container report.

    Keyword arguments mirror the config-file schema (measure, penalty,
    alpha, escalate, split_frac, lambda_screen, hp_grid, seed, solver).
    """
    X = _check_matrix(X)
    y = _check_vector(y, X.shape[0])
    try:
        cfg = smrmr.pipeline_config_from_dict(dict(config))
        report = smrmr.run(X, y, cfg)
    except SmrmrError as exc:
        raise _translate(exc) from exc
    threshold = "inf" if math.isinf(report.threshold) else float(report.threshold)
    return BindingReport(
        w=[float(v) for v in report.w],
        threshold=threshold,
        selected=[int(k) for k in report.selected],
        fdp_hat=float(report.fdp_hat),
        alpha_used=float(report.alpha_used),
    )


def simulate(dgp: str, n: int, p: int, seed: int = 0, c: float = 0.5) -> dict:
    """Draw one synthetic dataset and return its arrays plus metadata."""
    try:
        spec = smrmr.DgpSpec(id=str(dgp), n=int(n), p=int(p), c=float(c),
                             seed=int(seed))
        data = smrmr.generate(spec)
    except SmrmrError as exc:
        raise _translate(exc) from exc
    return {
        "X": data.X,
        "y": data.y,
        "true_support": [int(k) for k in data.true_support],
        "task": data.task,
        "c": spec.effective_c,
        "seed": spec.seed,
    }


def benchmark(
    dgp: dict,
    config: Optional[dict] = None,
    replicates: int = 10,
    workers: int = 1,
    downstream: bool = False,
) -> dict:
    """Seeded Monte-Carlo selection experiment; returns the metric summary."""
    try:
        spec = smrmr.DgpSpec(
            id=str(dgp["id"]), n=int(dgp["n"]), p=int(dgp["p"]),
            c=float(dgp.get("c", 0.5)), seed=0,
        )
        cfg = smrmr.pipeline_config_from_dict(dict(config or {}))
        result = smrmr.fdr_experiment(
            spec, cfg, int(replicates), workers=max(1, int(workers)),
            eval_downstream=bool(downstream),
        )
    except KeyError as exc:
        raise ValueError(f"dgp mapping is missing key {exc}") from exc
    except SmrmrError as exc:
        raise _translate(exc) from exc
    return result.summary
