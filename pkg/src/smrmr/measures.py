"""Kernel matrices and V-statistic dependence estimators.

Implements the Gaussian-kernel HSIC family (biased V-statistic, unbiased
U-statistic, normalized ratio) and the squared projection correlation for
scalar samples, together with the centered building blocks they share.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import pc_association
from .errors import DegenerateFeature, InvalidInput, ResourceLimit

#: Largest n for which the full n x n x n angle tensor may be materialized.
ANGLE_TENSOR_MAX_N = 1000


@dataclass(frozen=True)
class MeasureSpec:
    """Choice of dependence estimator.

    kind: ``"nr_hsic"`` (normalized HSIC ratio) or ``"pc2"`` (squared
    projection correlation).  ``bandwidth`` fixes the Gaussian kernel width
    for nr-HSIC; ``None`` means the median heuristic per sample.
    """

    kind: str = "nr_hsic"
    bandwidth: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("nr_hsic", "pc2"):
            raise InvalidInput(f"unknown measure kind: {self.kind!r}")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise InvalidInput("bandwidth must be positive")


@dataclass(frozen=True)
class CenteredGram:
    """Doubly centered kernel matrix H K H with its Frobenius norm."""

    entries: np.ndarray
    frob: float


@dataclass(frozen=True)
class AngleTensor:
    """Per-slice double-centered arccos tensor with its squared norm."""

    entries: np.ndarray
    sqnorm: float


def _as_sample(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size < 2:
        raise InvalidInput("sample needs at least two observations")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("sample contains non-finite values")
    return x


def median_heuristic_bandwidth(x) -> float:
    """Median of all pairwise absolute differences of the sample.

    Falls back to the smallest positive distance when the median itself is
    zero; raises :class:`DegenerateFeature` when all values coincide.
    """
    x = _as_sample(x)
    d = np.abs(x[:, None] - x[None, :])
    pair = d[np.triu_indices(x.size, k=1)]
    if not np.any(pair > 0):
        raise DegenerateFeature("all sample values identical")
    med = float(np.median(pair))
    if med == 0.0:
        med = float(pair[pair > 0].min())
    return med


def gaussian_kernel_matrix(x, bandwidth: float) -> np.ndarray:
    """K_ij = exp(-(x_i - x_j)^2 / (2 bandwidth^2))."""
    x = _as_sample(x)
    if not bandwidth > 0:
        raise InvalidInput("bandwidth must be positive")
    d2 = (x[:, None] - x[None, :]) ** 2
    return np.exp(-d2 / (2.0 * bandwidth * bandwidth))


def center_gram(K) -> CenteredGram:
    """Apply the centering H K H through the closed-form row/column means."""
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidInput("gram matrix must be square")
    row = K.mean(axis=1, keepdims=True)
    col = K.mean(axis=0, keepdims=True)
    entries = K - row - col + K.mean()
    return CenteredGram(entries=entries, frob=float(np.linalg.norm(entries)))

def _gram_for(x: np.ndarray, spec: MeasureSpec) -> CenteredGram:
    bw = spec.bandwidth if spec.bandwidth is not None else median_heuristic_bandwidth(x)
    return center_gram(gaussian_kernel_matrix(x, bw))


def hsic_v(Kc: CenteredGram, Lc: CenteredGram) -> float:
    """Biased HSIC V-statistic (1/n^2) <HKH, HLH>_F."""
    if Kc.entries.shape != Lc.entries.shape:
        raise InvalidInput("gram dimensions differ")
    n = Kc.entries.shape[0]
    return float(np.sum(Kc.entries * Lc.entries)) / (n * n)


def hsic_u(Kraw, Lraw) -> float:
    """Unbiased HSIC U-statistic over without-replacement tuples.

    Uses the closed-form reduction of the three tuple sums; may be negative.
    """
    K = np.asarray(Kraw, dtype=np.float64)
    L = np.asarray(Lraw, dtype=np.float64)
    if K.shape != L.shape or K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidInput("gram matrices must be square with equal shapes")
    n = K.shape[0]
    if n < 4:
        raise InvalidInput("unbiased HSIC needs n >= 4")
    Kt = K - np.diag(np.diag(K))
    Lt = L - np.diag(np.diag(L))
    A = float(np.sum(Kt * Lt))                       # sum over i != j
    rK = Kt.sum(axis=1)
    rL = Lt.sum(axis=1)
    T = float(rK @ rL)                               # shares the leading index
    SK = float(rK.sum())
    SL = float(rL.sum())
    quad = SK * SL - 4.0 * T + 2.0 * A               # all four indices distinct
    trip = T - A                                     # (i, j, m) distinct
    return (
        A / (n * (n - 1))
        + quad / (n * (n - 1) * (n - 2) * (n - 3))
        - 2.0 * trip / (n * (n - 1) * (n - 2))
    )


def nr_hsic_v(x, y, spec: MeasureSpec = MeasureSpec()) -> float:
    """Normalized HSIC ratio HSIC(x,y)/sqrt(HSIC(x,x) HSIC(y,y))."""
    x = _as_sample(x)
    y = _as_sample(y)
    if x.size != y.size:
        raise InvalidInput("samples must have equal length")
    Kc = _gram_for(x, spec)
    Lc = _gram_for(y, spec)
    if Kc.frob <= 0.0:
        raise DegenerateFeature("zero self-dependence in first sample")
    if Lc.frob <= 0.0:
        raise DegenerateFeature("zero self-dependence in second sample")
    return float(np.sum(Kc.entries * Lc.entries)) / (Kc.frob * Lc.frob)


def _raw_angle_slice(x: np.ndarray, r: int) -> np.ndarray:
    """Raw arccos slice for fixed reference index r, zeros on i=r / l=r and
    coincident points."""
    u = x - x[r]
    norm = np.abs(u)
    denom = np.outer(norm, norm)
    inner = np.outer(u, u)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(denom > 0.0, inner / np.where(denom > 0.0, denom, 1.0), 1.0)
    return np.arccos(np.clip(cos, -1.0, 1.0))


def angle_tensor(x) -> AngleTensor:
    """Full per-slice double-centered angle tensor (O(n^3) memory)."""
    x = _as_sample(x)
    n = x.size
    if n < 3:
        raise InvalidInput("angle tensor needs n >= 3")
    if n > ANGLE_TENSOR_MAX_N:
        raise ResourceLimit(
            f"n={n} exceeds the angle-tensor cap ({ANGLE_TENSOR_MAX_N})"
        )
    out = np.empty((n, n, n))
    for r in range(n):
        raw = _raw_angle_slice(x, r)
        row = raw.mean(axis=1, keepdims=True)
        col = raw.mean(axis=0, keepdims=True)
        out[:, :, r] = raw - row - col + raw.mean()
    return AngleTensor(entries=out, sqnorm=float(np.sum(out * out)))


def pc_squared_v(x, y) -> float:
    """Squared projection correlation V-statistic estimator.

    Streams over reference slices, so no n^3 tensor is kept in memory.
    """
    x = _as_sample(x)
    y = _as_sample(y)
    if x.size != y.size:
        raise InvalidInput("samples must have equal length")
    if x.size < 3:
        raise InvalidInput("projection correlation needs n >= 3")
    if x.size > ANGLE_TENSOR_MAX_N:
        raise ResourceLimit(
            f"n={x.size} exceeds the angle-tensor cap ({ANGLE_TENSOR_MAX_N})"
        )
    M = pc_association(np.column_stack([x, y]))
    if M[0, 0] <= 0.0 or M[1, 1] <= 0.0:
        raise DegenerateFeature("zero angle-tensor norm")
    return float(M[0, 1] / math.sqrt(M[0, 0] * M[1, 1]))


def dependence(x, y, spec: MeasureSpec) -> float:
    """Dispatch on the configured measure."""
    if spec.kind == "nr_hsic":
        return nr_hsic_v(x, y, spec)
    return pc_squared_v(x, y)
