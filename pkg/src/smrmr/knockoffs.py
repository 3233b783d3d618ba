"""Second-order Gaussian model-X knockoffs and the knockoff+ selection rule."""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInput, NumericalFailure

MIN_EIGENVALUE = 1e-6


@dataclass
class KnockoffMatrix:
    """Sampled knockoff copies with the moments used to build them."""

    xk: np.ndarray
    s_vec: np.ndarray
    mu_hat: np.ndarray
    sigma_hat: np.ndarray


@dataclass
class KnockoffReport:
    """Importance scores, threshold, selection and the estimated FDP."""

    w: np.ndarray
    threshold: float
    selected: np.ndarray
    fdp_hat: float
    alpha_used: float
    # original column ids aligned with w when a screening stage remapped the
    # selection; not part of the serialized schema
    feature_ids: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {
            "w": [float(v) for v in self.w],
            "threshold": "inf" if math.isinf(self.threshold) else float(self.threshold),
            "selected": [int(k) for k in self.selected],
            "fdp_hat": float(self.fdp_hat),
            "alpha_used": float(self.alpha_used),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _shrunk_covariance(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample covariance shrunk toward its diagonal just enough for the
    correlation matrix to have smallest eigenvalue >= 1e-6."""
    mu = X.mean(axis=0)
    cov = np.cov(X, rowvar=False, bias=False)
    cov = np.atleast_2d(cov)
    d = np.diag(cov).copy()
    if np.any(d <= 0):
        raise NumericalFailure("zero-variance column in knockoff stage")
    scale = np.sqrt(d)
    corr = cov / np.outer(scale, scale)
    lmin = float(np.linalg.eigvalsh(corr)[0])
    if lmin < MIN_EIGENVALUE:
        # eigenvalues of (1-g) C + g I shift linearly toward 1
        g = (MIN_EIGENVALUE - lmin) / (1.0 - lmin)
        corr = (1.0 - g) * corr + g * np.eye(corr.shape[0])
    sigma = corr * np.outer(scale, scale)
    return mu, sigma


def sample_knockoffs(X, seed: int) -> KnockoffMatrix:
    """Equicorrelated second-order Gaussian knockoffs.

    Estimates the first two moments of X, picks the equicorrelated s on the
    correlation scale, and draws each knockoff row from the Gaussian
    conditional on the observed row.  Deterministic for a fixed seed.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < X.shape[1] + 1:
        raise InvalidInput("knockoffs need n >= p + 1 rows")
    n, p = X.shape
    mu, sigma = _shrunk_covariance(X)
    d = np.diag(sigma)
    scale = np.sqrt(d)
    corr = sigma / np.outer(scale, scale)
    lmin_corr = float(np.linalg.eigvalsh(corr)[0])
    s_corr = min(2.0 * lmin_corr, 1.0)
    s_vec = s_corr * d  # back to covariance scale
    try:
        sigma_inv = np.linalg.inv(sigma)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("shrunk covariance is singular") from exc
    S = np.diag(s_vec)
    cond_cov = 2.0 * S - S @ sigma_inv @ S
    cond_cov = 0.5 * (cond_cov + cond_cov.T)
    evals, evecs = np.linalg.eigh(cond_cov)
    evals = np.clip(evals, 0.0, None)  # PSD repair for roundoff
    factor = evecs * np.sqrt(evals)
    cond_mean = X - (X - mu) @ sigma_inv @ S
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    z = rng.standard_normal((n, p))
    xk = cond_mean + z @ factor.T
    return KnockoffMatrix(xk=xk, s_vec=s_vec, mu_hat=mu, sigma_hat=sigma)


def importance_scores(theta_joint) -> np.ndarray:
    """W_k = theta_k - theta_{p+k} from a 2p coefficient vector."""
    theta = np.asarray(
        getattr(theta_joint, "theta", theta_joint), dtype=np.float64
    ).ravel()
    if theta.shape[0] % 2 != 0:
        raise InvalidInput("joint coefficient vector must have even dimension")
    p = theta.shape[0] // 2
    return theta[:p] - theta[p:]


def knockoff_threshold(w, alpha: float) -> float:
    """Knockoff+ threshold over the candidate set of unique nonzero |W_k|."""
    w = np.asarray(w, dtype=np.float64).ravel()
    if not 0.0 < alpha < 1.0:
        raise InvalidInput("alpha must be in (0, 1)")
    candidates = np.unique(np.abs(w[w != 0.0]))
    for t in candidates:
        ratio = (1 + np.sum(w <= -t)) / max(1, np.sum(w >= t))
        if ratio <= alpha:
            return float(t)
    return math.inf


def _fdp_hat(w: np.ndarray, t: float) -> float:
    if math.isinf(t):
        return 0.0
    return float(np.sum(w <= -t)) / max(1, int(np.sum(w >= t)))


def select(w, alpha: float, escalate: bool = False) -> KnockoffReport:
    """Selection at level alpha; optionally escalate by 0.05 steps until a
    non-empty set is found, falling back to the top-score feature."""
    w = np.asarray(w, dtype=np.float64).ravel()
    if not 0.0 < alpha < 1.0:
        raise InvalidInput("alpha must be in (0, 1)")
    t = knockoff_threshold(w, alpha)
    selected = np.flatnonzero(w >= t) if not math.isinf(t) else np.array([], dtype=int)
    alpha_used = alpha
    if escalate:
        while selected.size == 0 and alpha_used + 0.05 < 1.0:
            alpha_used = round(alpha_used + 0.05, 10)
            t = knockoff_threshold(w, alpha_used)
            if not math.isinf(t):
                selected = np.flatnonzero(w >= t)
        if selected.size == 0:
            alpha_used = 1.0
            selected = np.array([int(np.argmax(w))])
            t = math.inf
    return KnockoffReport(
        w=w,
        threshold=t,
        selected=selected,
        fdp_hat=_fdp_hat(w, t),
        alpha_used=alpha_used,
    )
