"""Relevance/redundancy system assembly and the penalized non-negative solver.

The quadratic data are V-statistic estimates: a relevance vector J with
J_k = D(X_k, Y) and a redundancy matrix K with K_kl = D(X_k, X_l).  Both
nr-HSIC and squared projection correlation reduce to normalized inner
products of centered per-feature representations, so the whole system is one
Gram accumulation.  Minimization over the non-negative orthant is cyclic
coordinate descent, wrapped in a local linear approximation loop for the
folded-concave penalties.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._kernels import cd_weighted_nn, pc_association
from .errors import DegenerateFeature, InvalidInput
from .measures import MeasureSpec, _gram_for
from .penalties import PenaltySpec, penalty_derivative, penalty_value

SUPPORT_TOL = 1e-10
DIAG_RIDGE = 1e-8


@dataclass
class AssocSystem:
    """Quadratic-program data: relevance vector, redundancy matrix, measure."""

    relevance: np.ndarray
    redundancy: np.ndarray
    measure: MeasureSpec

    @property
    def p(self) -> int:
        return self.relevance.shape[0]


@dataclass
class Coefficients:
    """Non-negative solution with its support and final objective value."""

    theta: np.ndarray
    objective: float
    converged: bool = True
    support: np.ndarray = field(init=False)

    def __post_init__(self):
        self.support = np.flatnonzero(self.theta > SUPPORT_TOL)


@dataclass(frozen=True)
class SolverConfig:
    max_cd_iters: int = 10_000
    cd_tol: float = 1e-7
    lla_m: int = 2
    lla_eps: float = 1e-6
    lla_weight: str = "derivative"  # "derivative" | "value"

    def __post_init__(self):
        if self.max_cd_iters < 1 or self.lla_m < 1:
            raise InvalidInput("iteration counts must be positive")
        if self.cd_tol <= 0 or self.lla_eps <= 0:
            raise InvalidInput("tolerances must be positive")
        if self.lla_weight not in ("derivative", "value"):
            raise InvalidInput("lla_weight must be 'derivative' or 'value'")


def _hsic_rows(cols: np.ndarray, spec: MeasureSpec) -> np.ndarray:
    """Unit-Frobenius centered Gram of every column, flattened row-wise."""
    n, m = cols.shape
    rows = np.empty((m, n * n))
    for k in range(m):
        try:
            Kc = _gram_for(cols[:, k], spec)
        except DegenerateFeature as exc:
            raise DegenerateFeature(
                "constant column in system assembly", column=k
            ) from exc
        if Kc.frob <= 0.0:
            raise DegenerateFeature("constant column in system assembly", column=k)
        rows[k] = Kc.entries.ravel() / Kc.frob
    return rows


def _association_matrix(cols: np.ndarray, spec: MeasureSpec) -> np.ndarray:
    """Matrix of pairwise dependence estimates for all columns at once.

    Entry (k, l) is the configured measure between columns k and l; the
    diagonal is 1 by self-normalization.
    """
    if spec.kind == "nr_hsic":
        rows = _hsic_rows(cols, spec)
        return rows @ rows.T
    M = pc_association(np.ascontiguousarray(cols))
    d = np.diag(M).copy()
    bad = np.flatnonzero(d <= 0.0)
    if bad.size:
        raise DegenerateFeature(
            "constant column in system assembly", column=int(bad[0])
        )
    scale = np.sqrt(d)
    return M / np.outer(scale, scale)


def _check_columns(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidInput("X must be a 2-d matrix")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("X contains non-finite values")
    return X


def build_system(X, y, measure: MeasureSpec = MeasureSpec()) -> AssocSystem:
    """Assemble J and K for a data matrix and its response.

    Each per-feature centered representation is computed once and reused
    across all p^2 redundancy pairs.
    """
    X = _check_columns(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != X.shape[0]:
        raise InvalidInput("X and y row counts differ")
    if X.shape[0] < 3:
        raise InvalidInput("system assembly needs n >= 3")
    cols = np.column_stack([X, y])
    try:
        M = _association_matrix(cols, measure)
    except DegenerateFeature as exc:
        if exc.column is not None and exc.column == X.shape[1]:
            raise DegenerateFeature("constant response", column=None) from exc
        raise
    p = X.shape[1]
    return AssocSystem(
        relevance=M[:p, p].copy(), redundancy=M[:p, :p].copy(), measure=measure
    )


def build_joint_system(X, Xk, y, measure: MeasureSpec = MeasureSpec()) -> AssocSystem:
    """Joint original + knockoff system of dimension 2p.

    The redundancy matrix is block-diagonal: the joint loss carries no
    original-to-knockoff cross terms.
    """
    X = _check_columns(X)
    Xk = _check_columns(Xk)
    if X.shape != Xk.shape:
        raise InvalidInput("knockoff matrix shape differs from X")
    orig = build_system(X, y, measure)
    knock = build_system(Xk, y, measure)
    p = X.shape[1]
    redundancy = np.zeros((2 * p, 2 * p))
    redundancy[:p, :p] = orig.redundancy
    redundancy[p:, p:] = knock.redundancy
    relevance = np.concatenate([orig.relevance, knock.relevance])
    return AssocSystem(relevance=relevance, redundancy=redundancy, measure=measure)


def loss_value(sys: AssocSystem, theta) -> float:
    """Unpenalized quadratic loss 1/2 - theta'J + 1/2 theta'K theta."""
    theta = np.asarray(theta, dtype=np.float64).ravel()
    if theta.shape[0] != sys.p:
        raise InvalidInput("theta dimension mismatch")
    if np.any(theta < 0):
        raise InvalidInput("theta must be non-negative")
    return float(
        0.5 - theta @ sys.relevance + 0.5 * theta @ sys.redundancy @ theta
    )


def _quad_part(sys: AssocSystem, theta: np.ndarray) -> float:
    return float(-theta @ sys.relevance + 0.5 * theta @ sys.redundancy @ theta)


def penalized_objective(sys: AssocSystem, pen: PenaltySpec, theta: np.ndarray) -> float:
    return _quad_part(sys, theta) + sum(penalty_value(pen, t) for t in theta)


def solve_weighted_l1(
    sys: AssocSystem,
    weights,
    cfg: SolverConfig = SolverConfig(),
    theta0: Optional[np.ndarray] = None,
) -> Coefficients:
    """Non-negative weighted-L1 quadratic via cyclic coordinate descent.

    A ridge of 1e-8 is added to the diagonal so tiny negative eigenvalues of
    the V-statistic redundancy matrix cannot stall convergence.
    """
    weights = np.asarray(weights, dtype=np.float64).ravel()
    if weights.shape[0] != sys.p:
        raise InvalidInput("weights dimension mismatch")
    K = sys.redundancy + DIAG_RIDGE * np.eye(sys.p)
    if np.any(np.diag(K) <= 0):
        raise InvalidInput("redundancy diagonal must be strictly positive")
    theta = (
        np.zeros(sys.p) if theta0 is None else np.array(theta0, dtype=np.float64)
    )
    iters, delta = cd_weighted_nn(
        np.ascontiguousarray(K),
        np.ascontiguousarray(sys.relevance),
        np.ascontiguousarray(weights),
        theta,
        cfg.max_cd_iters,
        cfg.cd_tol,
    )
    obj = _quad_part(sys, theta) + float(weights @ theta)
    return Coefficients(theta=theta, objective=obj, converged=delta < cfg.cd_tol)


def solve_smrmr(
    sys: AssocSystem, pen: PenaltySpec, cfg: SolverConfig = SolverConfig()
) -> Coefficients:
    """Minimize the penalized loss; LLA outer loop for SCAD/MCP.

    SCAD/MCP start from the Lasso solution at the same lambda, then take up
    to ``lla_m`` reweighted solves with weights given by the penalty
    derivative at the previous iterate (or the value, per ``lla_weight``).
    """
    p = sys.p
    if pen.kind in ("none", "lasso"):
        w = np.zeros(p) if pen.kind == "none" else np.full(p, pen.lam)
        sol = solve_weighted_l1(sys, w, cfg)
        return Coefficients(
            theta=sol.theta,
            objective=penalized_objective(sys, pen, sol.theta),
            converged=sol.converged,
        )
    weight_fn = penalty_derivative if cfg.lla_weight == "derivative" else penalty_value
    beta = solve_weighted_l1(sys, np.full(p, pen.lam), cfg).theta
    converged = True
    for _ in range(cfg.lla_m):
        w = np.array([weight_fn(pen, b) for b in beta])
        sol = solve_weighted_l1(sys, w, cfg, theta0=beta)
        converged = sol.converged
        step = float(np.linalg.norm(sol.theta - beta))
        beta = sol.theta
        if step < cfg.lla_eps:
            break
    return Coefficients(
        theta=beta,
        objective=penalized_objective(sys, pen, beta),
        converged=converged,
    )
