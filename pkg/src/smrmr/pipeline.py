"""Multi-stage selection: split, screen, tune, knockoff filter.

When n < 2p the rows are split; the first split ranks features marginally,
then by the penalized solve, keeping at most p_max = floor((n1 - 1) / 2) of
them so the knockoff construction on the second split is well posed.  The
first split's rows are recycled into both blocks of the joint design to
recover their power.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .errors import InvalidInput, SampleTooSmall
from .knockoffs import KnockoffReport, importance_scores, sample_knockoffs, select
from .measures import MeasureSpec, dependence
from .penalties import PenaltySpec
from .solver import SolverConfig, build_joint_system, build_system, solve_smrmr

DEFAULT_HP_LAMBDAS = (0.001, 0.005, 0.01, 0.05, 0.1)


def _default_grid() -> List[PenaltySpec]:
    return [replace(PenaltySpec(), lam=l) for l in DEFAULT_HP_LAMBDAS]


@dataclass
class PipelineConfig:
    measure: MeasureSpec = MeasureSpec()
    penalty: PenaltySpec = PenaltySpec()
    alpha: float = 0.3
    escalate: bool = False
    split_frac: float = 0.4
    lambda_screen: float = 0.01
    hp_grid: List[PenaltySpec] = field(default_factory=_default_grid)
    seed: int = 0
    solver: SolverConfig = SolverConfig()

    def __post_init__(self):
        if not 0.0 < self.split_frac < 1.0:
            raise InvalidInput("split_frac must be in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInput("alpha must be in (0, 1)")
        if self.lambda_screen <= 0:
            raise InvalidInput("lambda_screen must be positive")


@dataclass
class ScreenOutput:
    s0: np.ndarray           # retained features, original coordinates
    x1: np.ndarray           # rows available to the knockoff stage
    dr: bool                 # data recycling active (split happened)
    s0b: np.ndarray          # marginal pre-screen survivors
    n0: int                  # first-split size (0 when no split)


def _stage_seed(seed: int, tag: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, tag])


def _marginal_scores(X: np.ndarray, y: np.ndarray, measure: MeasureSpec) -> np.ndarray:
    return np.array([dependence(X[:, k], y, measure) for k in range(X.shape[1])])


def screen(X, y, cfg: PipelineConfig) -> ScreenOutput:
    """Reduce to at most p_max features when n < 2p; pass-through otherwise."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, p = X.shape
    if n < 10:
        raise SampleTooSmall("screening needs at least 10 rows")
    if n >= 2 * p:
        full = np.arange(p)
        return ScreenOutput(s0=full, x1=X, dr=False, s0b=full, n0=0)
    n0 = int(np.floor(cfg.split_frac * n))
    n1 = n - n0
    p_max = (n1 - 1) // 2
    if p_max < 1:
        raise SampleTooSmall("second split too small to host knockoffs")
    X0, y0 = X[:n0], y[:n0]
    marg = _marginal_scores(X0, y0, cfg.measure)
    order = np.lexsort((np.arange(p), -marg))
    s0b = np.sort(order[: min(4 * p_max, p)])
    pen = replace(cfg.penalty, lam=cfg.lambda_screen)
    sol = solve_smrmr(build_system(X0[:, s0b], y0, cfg.measure), pen, cfg.solver)
    # rank by coefficient, marginal score then index as tie-breaks
    key = np.lexsort((s0b, -marg[s0b], -sol.theta))
    s0 = np.sort(s0b[key[:p_max]])
    return ScreenOutput(s0=s0, x1=X[n0:], dr=True, s0b=s0b, n0=n0)


def _joint_design(
    scr: ScreenOutput, X: np.ndarray, y: np.ndarray, cfg: PipelineConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Original block, knockoff block and response rows for the joint solve."""
    cols = scr.s0
    x1s = scr.x1[:, cols]
    if scr.dr and 2 * cols.size >= x1s.shape[0]:
        raise SampleTooSmall("second split cannot host 2|S0| knockoff columns")
    km = sample_knockoffs(x1s, _stage_seed(cfg.seed, 0).generate_state(1)[0])
    if scr.dr:
        x0s = X[: scr.n0, cols]
        orig = np.vstack([x0s, x1s])
        knock = np.vstack([x0s, km.xk])  # recycled rows enter both blocks
        resp = y
    else:
        orig, knock, resp = x1s, km.xk, y
    return orig, knock, resp


def knockoff_stage(
    scr: ScreenOutput,
    X,
    y,
    cfg: PipelineConfig,
    penalty: Optional[PenaltySpec] = None,
) -> KnockoffReport:
    """Joint original+knockoff fit and knockoff+ selection, reported in
    original column coordinates."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    pen = cfg.penalty if penalty is None else penalty
    orig, knock, resp = _joint_design(scr, X, y, cfg)
    sys = build_joint_system(orig, knock, resp, cfg.measure)
    sol = solve_smrmr(sys, pen, cfg.solver)
    w = importance_scores(sol)
    report = select(w, cfg.alpha, cfg.escalate)
    report.selected = scr.s0[report.selected]
    report.feature_ids = scr.s0
    return report


def tune(scr: ScreenOutput, X, y, cfg: PipelineConfig) -> PenaltySpec:
    """Grid search over penalty candidates by held-out unpenalized joint loss.

    Fixed 80/20 row split of the stage-2 data, seeded by the pipeline seed;
    ties go to the larger lambda (sparser fit).
    """
    if not cfg.hp_grid:
        raise InvalidInput("hp_grid must be non-empty")
    if len(cfg.hp_grid) == 1:
        return cfg.hp_grid[0]
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    orig, knock, resp = _joint_design(scr, X, y, cfg)
    n = orig.shape[0]
    rng = np.random.default_rng(_stage_seed(cfg.seed, 1))
    perm = rng.permutation(n)
    cut = max(int(np.floor(0.8 * n)), orig.shape[1] * 2 + 1)
    train, val = np.sort(perm[:cut]), np.sort(perm[cut:])
    if val.size < 3:
        return max(cfg.hp_grid, key=lambda h: h.lam)
    sys_train = build_joint_system(orig[train], knock[train], resp[train], cfg.measure)
    sys_val = build_joint_system(orig[val], knock[val], resp[val], cfg.measure)
    best = None
    for cand in cfg.hp_grid:
        sol = solve_smrmr(sys_train, cand, cfg.solver)
        g = float(
            -sol.theta @ sys_val.relevance
            + 0.5 * sol.theta @ sys_val.redundancy @ sol.theta
        )
        if best is None or g < best[0] - 1e-12 or (
            abs(g - best[0]) <= 1e-12 and cand.lam > best[1].lam
        ):
            best = (g, cand)
    return best[1]


def run(X, y, cfg: PipelineConfig) -> KnockoffReport:
    """screen -> tune -> knockoff filter; deterministic given (data, seed)."""
    scr = screen(X, y, cfg)
    pen = tune(scr, X, y, cfg)
    return knockoff_stage(scr, X, y, cfg, penalty=pen)
