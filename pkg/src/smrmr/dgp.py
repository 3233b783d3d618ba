"""Synthetic data-generating processes with the AR(1)-correlated design."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInput

POISSON_RATE_FLOOR = 1e-6
INVERSE_GUARD = 1e-3

DGP_IDS = ("1a", "1b", "1c", "1d", "2a", "2b", "2c", "3a", "3b", "3c")

# id -> (support, default c override or None)
_TEN = tuple(range(0, 100, 10))
_SUPPORTS = {
    "1a": ((0, 5), 0.0),
    "1b": ((0, 10, 20, 30), None),
    "1c": ((0, 10, 20, 30), None),
    "1d": (_TEN, None),
    "2a": ((0, 10, 20, 30), None),
    "2b": ((0, 10, 20, 30), None),
    "2c": (_TEN, None),
    "3a": ((0, 5), 0.0),
    "3b": (_TEN, None),
    "3c": (_TEN, None),
}


@dataclass(frozen=True)
class DgpSpec:
    id: str
    n: int
    p: int
    c: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.id not in DGP_IDS:
            raise InvalidInput(f"unknown DGP id: {self.id!r}")
        if self.n < 2:
            raise InvalidInput("n must be at least 2")
        if not 0.0 <= self.c < 1.0:
            raise InvalidInput("c must lie in [0, 1)")
        support, forced_c = _SUPPORTS[self.id]
        if max(support) >= self.p:
            raise InvalidInput(
                f"DGP {self.id} needs p > {max(support)}, got p={self.p}"
            )

    @property
    def support(self) -> tuple:
        return _SUPPORTS[self.id][0]

    @property
    def effective_c(self) -> float:
        forced = _SUPPORTS[self.id][1]
        return self.c if forced is None else forced

    @property
    def task(self) -> str:
        return "classification" if self.id.startswith("3") else "regression"


@dataclass
class SynthDataset:
    X: np.ndarray
    y: np.ndarray
    true_support: np.ndarray
    task: str


def sample_ar_gaussian(
    n: int, p: int, c: float, seed, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """Rows i.i.d. N(0, Sigma) with Sigma_kl = c^|k-l|, via the AR(1)
    recursion (exact for this covariance, O(np))."""
    if not 0.0 <= c < 1.0:
        raise InvalidInput("c must lie in [0, 1)")
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
    Z = rng.standard_normal((n, p))
    if c == 0.0:
        return Z
    X = np.empty((n, p))
    X[:, 0] = Z[:, 0]
    w = np.sqrt(1.0 - c * c)
    for k in range(1, p):
        X[:, k] = c * X[:, k - 1] + w * Z[:, k]
    return X


def generate(spec: DgpSpec) -> SynthDataset:
    """Draw one dataset; identical spec gives identical bytes."""
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 7]))
    X = sample_ar_gaussian(spec.n, spec.p, spec.effective_c, None, rng=rng)
    S = np.array(spec.support)
    did = spec.id
    if did in ("1a", "1b", "1c", "1d"):
        beta = {
            "1a": np.array([4.0, 8.0]),
            "1b": np.array([1.0, 2.0, 4.0, 8.0]),
            "1c": np.array([1.0, 2.0, 4.0, 8.0]),
            "1d": np.ones(10),
        }[did]
        y = X[:, S] @ beta + rng.standard_normal(spec.n)
    elif did == "2a":
        y = (
            5.0 * X[:, 0]
            + 2.0 * np.sin(np.pi * X[:, 10] / 2.0)
            + 2.0 * X[:, 20] * (X[:, 20] > 0)
            + 2.0 * np.exp(5.0 * X[:, 30])
            + rng.standard_normal(spec.n)
        )
    elif did == "2b":
        # keep the reciprocal bounded: redraw near-zero X_20 entries
        col = X[:, 20]
        mask = np.abs(col) < INVERSE_GUARD
        while np.any(mask):
            col[mask] = rng.standard_normal(int(mask.sum()))
            mask = np.abs(col) < INVERSE_GUARD
        X[:, 20] = col
        y = (
            3.0 * X[:, 0]
            + 3.0 * X[:, 10] ** 3
            + 3.0 / X[:, 20]
            + 5.0 * (X[:, 30] > 0)
            + rng.standard_normal(spec.n)
        )
    elif did == "2c":
        rate = np.maximum(X[:, S].sum(axis=1), POISSON_RATE_FLOOR)
        y = rng.poisson(rate).astype(np.float64)
    elif did == "3a":
        y = (X[:, 0] + X[:, 5] > 0).astype(np.float64)  # exp(t) > 1 iff t > 0
    else:  # 3b, 3c
        y = (X[:, S].sum(axis=1) > 0).astype(np.float64)
    return SynthDataset(X=X, y=y, true_support=S, task=spec.task)
