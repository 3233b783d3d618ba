"""Selection metrics, downstream models, greedy mRMR baseline and the
Monte-Carlo FDR experiment harness."""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dgp import DgpSpec, generate
from .errors import InvalidInput
from .pipeline import PipelineConfig, run
from .solver import AssocSystem

CSV_COLUMNS = (
    "dgp", "method", "seed", "tpr", "fdr", "fpr",
    "n_selected", "mse", "acc", "alpha_used", "empty",
)


@dataclass
class SelectionMetrics:
    tpr: float
    fdr: float
    fpr: float
    n_selected: int
    mse: Optional[float] = None
    acc: Optional[float] = None


@dataclass
class BenchResult:
    dgp: DgpSpec
    method: str
    replicates: int
    rows: list
    summary: dict
    failures: int = 0


def score_selection(selected, truth, p: int) -> SelectionMetrics:
    """Counting metrics; the empty selection scores all zeros."""
    sel = set(int(k) for k in selected)
    tru = set(int(k) for k in truth)
    if any(k >= p or k < 0 for k in sel | tru):
        raise InvalidInput("index out of range")
    tp = len(sel & tru)
    fp = len(sel - tru)
    return SelectionMetrics(
        tpr=tp / len(tru) if tru else 0.0,
        fdr=fp / max(1, len(sel)),
        fpr=fp / max(1, p - len(tru)),
        n_selected=len(sel),
    )


# ---------------------------------------------------------------------------
# Downstream predictive models (shared coordinate-descent core, signed case)
# ---------------------------------------------------------------------------

def _lasso_cd(X, y, lam, max_iters=2000, tol=1e-8):
    n, p = X.shape
    theta = np.zeros(p)
    col_sq = (X * X).sum(axis=0) / n
    r = y.copy()
    for _ in range(max_iters):
        delta = 0.0
        for k in range(p):
            if col_sq[k] <= 0:
                continue
            rho = (X[:, k] @ r) / n + col_sq[k] * theta[k]
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / col_sq[k]
            ch = new - theta[k]
            if ch != 0.0:
                r -= ch * X[:, k]
                delta = max(delta, abs(ch))
            theta[k] = new
        if delta < tol:
            break
    return theta


def _lasso_cv_fit(Xtr, ytr, n_folds=5, n_lams=20, seed=0):
    n = Xtr.shape[0]
    mu, sd = Xtr.mean(axis=0), Xtr.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    Xs = (Xtr - mu) / sd
    ybar = ytr.mean()
    yc = ytr - ybar
    lam_max = np.max(np.abs(Xs.T @ yc)) / n
    if lam_max <= 0:
        lam_max = 1.0
    lams = lam_max * np.logspace(0, -3, n_lams)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    folds = rng.permutation(n) % n_folds
    cv_err = np.zeros(n_lams)
    for f in range(n_folds):
        tr, va = folds != f, folds == f
        if va.sum() == 0 or tr.sum() < 2:
            continue
        for i, lam in enumerate(lams):
            th = _lasso_cd(Xs[tr], yc[tr], lam)
            pred = Xs[va] @ th
            cv_err[i] += float(np.mean((yc[va] - pred) ** 2))
    best = lams[int(np.argmin(cv_err))]
    theta = _lasso_cd(Xs, yc, best)

    def predict(Xnew):
        return ((Xnew - mu) / sd) @ theta + ybar

    return predict


def _logistic_irls_fit(Xtr, ytr, ridge=1e-6, max_iters=100, tol=1e-8):
    n, p = Xtr.shape
    A = np.column_stack([np.ones(n), Xtr])
    beta = np.zeros(p + 1)
    for _ in range(max_iters):
        eta = np.clip(A @ beta, -30, 30)
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = np.maximum(mu * (1.0 - mu), 1e-10)
        z = eta + (ytr - mu) / w
        H = A.T @ (w[:, None] * A) + ridge * np.eye(p + 1)
        new = np.linalg.solve(H, A.T @ (w * z))
        step = np.max(np.abs(new - beta))
        beta = new
        if step < tol:
            break

    def predict(Xnew):
        eta = np.clip(np.column_stack([np.ones(Xnew.shape[0]), Xnew]) @ beta, -30, 30)
        return (1.0 / (1.0 + np.exp(-eta)) >= 0.5).astype(float)

    return predict


def downstream_fit(train, test, selected, task: str, seed: int = 0) -> float:
    """Refit on the selected columns and score on the test set.

    Regression: CV-tuned L1 least squares, returns test MSE.  Classification:
    ridge-stabilized logistic regression, returns test accuracy.  An empty
    selection falls back to the constant predictor.
    """
    Xtr, ytr = train
    Xte, yte = test
    Xtr = np.asarray(Xtr, dtype=np.float64)
    Xte = np.asarray(Xte, dtype=np.float64)
    ytr = np.asarray(ytr, dtype=np.float64).ravel()
    yte = np.asarray(yte, dtype=np.float64).ravel()
    sel = np.asarray(sorted(int(k) for k in selected), dtype=int)
    if task == "regression":
        if sel.size == 0:
            return float(np.mean((yte - ytr.mean()) ** 2))
        predict = _lasso_cv_fit(Xtr[:, sel], ytr, seed=seed)
        return float(np.mean((yte - predict(Xte[:, sel])) ** 2))
    if sel.size == 0:
        majority = 1.0 if ytr.mean() >= 0.5 else 0.0
        return float(np.mean(yte == majority))
    predict = _logistic_irls_fit(Xtr[:, sel], ytr)
    return float(np.mean(predict(Xte[:, sel]) == yte))


# ---------------------------------------------------------------------------
# Greedy mRMR baseline
# ---------------------------------------------------------------------------

def _mrmr_criterion(J, K, members) -> float:
    s = len(members)
    idx = list(members)
    return float(J[idx].sum()) / s - float(K[np.ix_(idx, idx)].sum()) / (s * s)


def greedy_mrmr(sys: AssocSystem, s: int) -> np.ndarray:
    """Forward greedy maximization of mean relevance minus mean redundancy."""
    p = sys.p
    if not 1 <= s <= p:
        raise InvalidInput("subset size must lie in [1, p]")
    J, K = sys.relevance, sys.redundancy
    chosen = [int(np.argmax(J))]
    while len(chosen) < s:
        best_j, best_val = None, -math.inf
        for j in range(p):
            if j in chosen:
                continue
            val = _mrmr_criterion(J, K, chosen + [j])
            if val > best_val + 1e-15:
                best_j, best_val = j, val
        chosen.append(best_j)
    return np.array(sorted(chosen))


# ---------------------------------------------------------------------------
# Monte-Carlo FDR experiment
# ---------------------------------------------------------------------------

def _replicate_seed(master: int, rep: int) -> int:
    return int(np.random.SeedSequence([int(master), rep]).generate_state(1)[0])


def _one_replicate(args):
    spec, cfg, rep, eval_downstream, test_n, method = args
    seed = _replicate_seed(cfg.seed, rep)
    data = generate(replace(spec, seed=seed))
    try:
        report = run(data.X, data.y, replace(cfg, seed=seed))
    except Exception as exc:  # replicate failures recorded, not fatal
        return {"seed": seed, "error": repr(exc)}
    m = score_selection(report.selected, data.true_support, spec.p)
    row = {
        "dgp": spec.id,
        "method": method,
        "seed": seed,
        "tpr": m.tpr,
        "fdr": m.fdr,
        "fpr": m.fpr,
        "n_selected": m.n_selected,
        "mse": "",
        "acc": "",
        "alpha_used": report.alpha_used,
        "empty": int(m.n_selected == 0),
    }
    if eval_downstream:
        test = generate(replace(spec, n=test_n, seed=seed + 1))
        score = downstream_fit(
            (data.X, data.y), (test.X, test.y), report.selected, spec.task, seed=seed
        )
        row["mse" if spec.task == "regression" else "acc"] = score
    return row


def _summarize(rows: list) -> dict:
    summary = {}
    for key in ("tpr", "fdr", "fpr", "n_selected", "mse", "acc", "empty"):
        vals = [float(r[key]) for r in rows if r.get(key) not in ("", None)]
        if not vals:
            continue
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        summary[key] = {"mean": mean, "se": se, "n": len(vals)}
    return summary


def fdr_experiment(
    spec: DgpSpec,
    cfg: PipelineConfig,
    replicates: int,
    workers: int = 1,
    out_dir: Optional[str] = None,
    method: str = "smrmr",
    eval_downstream: bool = False,
    test_n: int = 500,
) -> BenchResult:
    """Run the full pipeline over seeded replicates and aggregate metrics.

    Worker count only affects wall time; rows are keyed by replicate index
    so the output is identical for any scheduling.
    """
    if replicates < 1:
        raise InvalidInput("need at least one replicate")
    jobs = [(spec, cfg, r, eval_downstream, test_n, method) for r in range(replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_replicate, jobs))
    else:
        results = [_one_replicate(j) for j in jobs]
    rows = [r for r in results if "error" not in r]
    failures = len(results) - len(rows)
    summary = _summarize(rows)
    summary["failures"] = failures
    summary["replicates"] = replicates
    result = BenchResult(
        dgp=spec, method=method, replicates=replicates,
        rows=rows, summary=summary, failures=failures,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        stem = f"{spec.id}_{method}_n{spec.n}_p{spec.p}"
        with open(os.path.join(out_dir, stem + ".csv"), "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
        with open(os.path.join(out_dir, stem + ".json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
    return result
