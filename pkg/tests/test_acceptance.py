"""End-to-end acceptance checks, one per release criterion.

Each test prints a single PASS/FAIL line so the suite output doubles as a
sign-off checklist.  The statistical checks pin their master seeds; the
Monte-Carlo experiments run the same code paths as the ``benchmark`` CLI.
"""

import math
import os
import subprocess
import sys
from dataclasses import replace

import numpy as np

from smrmr import (
    DgpSpec,
    MeasureSpec,
    PenaltySpec,
    PipelineConfig,
    center_gram,
    fdr_experiment,
    gaussian_kernel_matrix,
    generate,
    hsic_v,
    knockoff_threshold,
    median_heuristic_bandwidth,
    nr_hsic_v,
    pc_squared_v,
    run,
    sample_knockoffs,
    solve_smrmr,
    solve_weighted_l1,
)
from smrmr.dgp import sample_ar_gaussian
from smrmr.penalties import penalty_derivative
from smrmr.solver import DIAG_RIDGE, SolverConfig, penalized_objective

from test_knockoffs import brute_force_threshold
from test_measures import _hsic_v_multisum, _pc_squared_oracle
from test_solver import enumerate_smrmr, random_system


def _report(name: str, ok: bool, detail: str = ""):
    tail = f" ({detail})" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}: {name}{tail}")
    assert ok, f"{name}{tail}"


def test_estimator_oracle_equivalence():
    rng = np.random.default_rng(2024)
    worst_h = 0.0
    for _ in range(50):
        n = int(rng.integers(4, 13))
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        K = gaussian_kernel_matrix(x, median_heuristic_bandwidth(x))
        L = gaussian_kernel_matrix(y, median_heuristic_bandwidth(y))
        got = hsic_v(center_gram(K), center_gram(L))
        worst_h = max(worst_h, abs(got - _hsic_v_multisum(K, L)))
    worst_p = 0.0
    for _ in range(20):
        n = int(rng.integers(4, 9))
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        worst_p = max(worst_p, abs(pc_squared_v(x, y) - _pc_squared_oracle(x, y)))
    _report(
        "estimator oracle equivalence",
        worst_h <= 1e-10 and worst_p <= 1e-10,
        f"hsic dev {worst_h:.2e}, pc dev {worst_p:.2e}",
    )


def test_self_normalization():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        x = rng.standard_normal(int(rng.integers(4, 60)))
        worst = max(worst, abs(nr_hsic_v(x, x) - 1.0))
        worst = max(worst, abs(pc_squared_v(x, x) - 1.0))
    _report("self-normalization equals one", worst <= 1e-12, f"dev {worst:.2e}")


def test_solver_oracle():
    rng = np.random.default_rng(7)
    penalties = [
        PenaltySpec(kind="none", lam=0.0),
        PenaltySpec(kind="lasso", lam=0.05),
        PenaltySpec(kind="scad", lam=0.05),
        PenaltySpec(kind="mcp", lam=0.05),
    ]
    tight = SolverConfig(cd_tol=1e-10)
    worst_coef = 0.0
    worst_kkt = 0.0
    for i in range(500):
        p = int(rng.integers(2, 5))
        sys = random_system(rng, p)
        pen = penalties[i % 4]
        got = solve_smrmr(sys, pen, tight).theta
        want = enumerate_smrmr(sys, pen, tight)
        worst_coef = max(worst_coef, float(np.max(np.abs(got - want))))
        if pen.kind == "lasso":
            K = sys.redundancy + DIAG_RIDGE * np.eye(p)
            grad = sys.relevance - K @ got
            for k in range(p):
                if got[k] > 1e-10:
                    worst_kkt = max(worst_kkt, abs(grad[k] - pen.lam))
                else:
                    worst_kkt = max(worst_kkt, max(0.0, grad[k] - pen.lam))
    _report(
        "solver matches active-set enumeration",
        worst_coef <= 1e-6 and worst_kkt <= 1e-6,
        f"coef dev {worst_coef:.2e}, kkt residual {worst_kkt:.2e}",
    )


def test_lla_descent():
    rng = np.random.default_rng(17)
    cfg = SolverConfig()
    worst_rise = -math.inf
    for _ in range(500):
        p = int(rng.integers(2, 8))
        sys = random_system(rng, p)
        pen = PenaltySpec(
            kind=("scad" if rng.random() < 0.5 else "mcp"),
            lam=float(rng.uniform(0.01, 0.3)),
        )
        beta = solve_weighted_l1(sys, np.full(p, pen.lam)).theta
        prev = penalized_objective(sys, pen, beta)
        for _ in range(cfg.lla_m):
            w = np.array([penalty_derivative(pen, b) for b in beta])
            beta = solve_weighted_l1(sys, w, theta0=beta).theta
            cur = penalized_objective(sys, pen, beta)
            worst_rise = max(worst_rise, cur - prev)
            prev = cur
    _report(
        "local linear approximation descends",
        worst_rise <= 1e-10,
        f"max objective rise {worst_rise:.2e}",
    )


def test_knockoff_moments_and_threshold():
    X = sample_ar_gaussian(100_000, 10, 0.5, seed=314)
    km = sample_knockoffs(X, seed=159)
    S = np.diag(km.s_vec)
    target = np.block(
        [[km.sigma_hat, km.sigma_hat - S], [km.sigma_hat - S, km.sigma_hat]]
    )
    emp = np.cov(np.hstack([X, km.xk]), rowvar=False)
    moment_err = float(np.max(np.abs(emp - target)))
    rng = np.random.default_rng(265)
    mismatches = 0
    for _ in range(1000):
        p = int(rng.integers(1, 40))
        w = np.round(rng.standard_normal(p), 2)
        w[rng.random(p) < 0.3] = 0.0
        alpha = float(rng.uniform(0.05, 0.95))
        if knockoff_threshold(w, alpha) != brute_force_threshold(w, alpha):
            mismatches += 1
    _report(
        "knockoff moments and threshold",
        moment_err <= 0.02 and mismatches == 0,
        f"cov err {moment_err:.4f}, threshold mismatches {mismatches}",
    )


def _fdr_config(measure_kind, penalty_kind):
    base = PenaltySpec(kind=penalty_kind, lam=0.01)
    return PipelineConfig(
        measure=MeasureSpec(kind=measure_kind),
        penalty=base,
        hp_grid=[replace(base, lam=l) for l in (0.001, 0.005, 0.01, 0.05, 0.1)],
        alpha=0.3,
        escalate=False,
        seed=0,
    )


def test_fdr_control_at_desk_scale():
    spec = DgpSpec(id="1a", n=100, p=100, seed=0)
    workers = min(4, os.cpu_count() or 1)
    details = []
    ok = True
    for label, measure, pen in (
        ("pc2+mcp", "pc2", "mcp"),
        ("nr_hsic+lasso", "nr_hsic", "lasso"),
    ):
        res = fdr_experiment(
            spec, _fdr_config(measure, pen), replicates=100, workers=workers
        )
        s = res.summary["fdr"]
        bound = 0.30 + 2.0 * s["se"]
        ok = ok and res.failures == 0 and s["mean"] <= bound
        details.append(f"{label}: FDP {s['mean']:.4f} <= {bound:.4f}")
    _report("false discovery rate controlled", ok, "; ".join(details))


def test_power_sanity():
    spec = DgpSpec(id="1a", n=100, p=100, seed=0)
    pen = PenaltySpec(kind="none", lam=0.0)
    cfg = PipelineConfig(
        measure=MeasureSpec(kind="pc2"),
        penalty=pen,
        hp_grid=[pen],
        alpha=0.3,
        escalate=True,
        seed=0,
    )
    workers = min(4, os.cpu_count() or 1)
    res = fdr_experiment(
        spec, cfg, replicates=50, workers=workers, eval_downstream=True
    )
    mean_mse = res.summary["mse"]["mean"]
    _report(
        "downstream power in the expected band",
        res.failures == 0 and 2.0 <= mean_mse <= 8.0,
        f"mean test MSE {mean_mse:.3f} in [2, 8]",
    )


def test_escalation_semantics():
    pen = PenaltySpec(kind="lasso", lam=0.01)
    base = PipelineConfig(
        measure=MeasureSpec(kind="pc2"),
        penalty=pen,
        hp_grid=[pen],
        alpha=0.3,
    )
    rng = np.random.default_rng(31)
    non_empty_with = 0
    empty_without = 0
    for rep in range(100):
        X = rng.standard_normal((100, 100))
        y = rng.standard_normal(100)  # pure noise response
        with_esc = run(X, y, replace(base, escalate=True, seed=rep))
        without = run(X, y, replace(base, escalate=False, seed=rep))
        non_empty_with += with_esc.selected.size > 0
        empty_without += without.selected.size == 0
    _report(
        "escalation semantics",
        non_empty_with == 100 and empty_without > 50,
        f"escalated non-empty {non_empty_with}/100, plain empty {empty_without}/100",
    )


def test_determinism():
    data = generate(DgpSpec(id="1a", n=100, p=100, seed=5))
    pen = PenaltySpec(kind="lasso", lam=0.01)
    cfg = PipelineConfig(
        measure=MeasureSpec(kind="pc2"), penalty=pen, hp_grid=[pen],
        escalate=True, seed=77,
    )
    first = run(data.X, data.y, cfg).to_json(sort_keys=True)
    second = run(data.X, data.y, cfg).to_json(sort_keys=True)
    spec = DgpSpec(id="1a", n=60, p=40, seed=0)
    seq = fdr_experiment(spec, replace(cfg, seed=0), replicates=8, workers=1)
    par = fdr_experiment(spec, replace(cfg, seed=0), replicates=8, workers=4)
    rows_equal = sorted(map(repr, seq.rows)) == sorted(map(repr, par.rows))
    _report(
        "deterministic outputs",
        first == second and rows_equal,
        "byte-identical JSON and worker-invariant rows",
    )


def test_cli_reports_are_reproducible(tmp_path):
    """Same seed through the command-line surface gives identical bytes."""
    data = generate(DgpSpec(id="1a", n=80, p=30, seed=2))
    csv_path = tmp_path / "d.csv"
    header = ",".join([f"x{k}" for k in range(30)] + ["y"])
    np.savetxt(
        csv_path, np.column_stack([data.X, data.y]), delimiter=",",
        header=header, comments="", fmt="%.10g",
    )
    payloads = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.json"
        proc = subprocess.run(
            [
                sys.executable, "-m", "smrmr.cli", "select", str(csv_path),
                "--response", "y", "--measure", "pc2", "--penalty", "lasso",
                "--lam", "0.01", "--escalate", "--seed", "11",
                "--out", str(out),
            ],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        payloads.append(out.read_bytes())
    _report("command-line reproducibility", payloads[0] == payloads[1])
