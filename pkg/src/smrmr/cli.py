"""Command-line interface: select, simulate, benchmark, diagnose."""

import csv as csv_mod
import json
import math
import os
import secrets
import sys
from dataclasses import replace

import click
import numpy as np

from . import __version__
from .bench import fdr_experiment
from .config import load_pipeline_config, pipeline_config_from_dict
from .dgp import DGP_IDS, DgpSpec, generate
from .errors import NumericalFailure, SmrmrError
from .knockoffs import sample_knockoffs
from .measures import MeasureSpec
from .penalties import PenaltySpec
from .pipeline import run

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _resolve_seed(seed):
    if seed is not None:
        return int(seed)
    drawn = secrets.randbits(32)
    click.echo(f"seed not given; drew seed={drawn} (pass --seed {drawn} to replay)")
    return drawn


def _read_csv(path: str, response: str):
    try:
        with open(path, newline="") as fh:
            reader = csv_mod.reader(fh)
            header = next(reader, None)
            if not header or len(header) < 2:
                _fail(EXIT_VALIDATION, "CSV needs a header row with >= 2 columns")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(header):
                    _fail(EXIT_VALIDATION, f"malformed CSV row at line {lineno}")
                try:
                    rows.append([float(v) for v in row])
                except ValueError:
                    _fail(EXIT_VALIDATION, f"non-numeric value at line {lineno}")
    except OSError as exc:
        _fail(EXIT_VALIDATION, f"cannot read {path}: {exc}")
    if response not in header:
        _fail(EXIT_VALIDATION, f"response column {response!r} not in header")
    data = np.array(rows, dtype=np.float64)
    ridx = header.index(response)
    y = data[:, ridx]
    X = np.delete(data, ridx, axis=1)
    names = [h for i, h in enumerate(header) if i != ridx]
    return X, y, names


@click.group()
@click.version_option(__version__)
def main():
    """Sparse mRMR feature screening with knockoff FDR control."""


@main.command("select")
@click.argument("data", type=click.Path())
@click.option("--response", required=True, help="Name of the response column.")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="YAML config file mirroring the pipeline settings.")
@click.option("--alpha", type=float, default=None, help="Target FDR level (default 0.3).")
@click.option("--measure", type=click.Choice(["nr_hsic", "pc2"]), default=None,
              help="Dependence measure (default nr_hsic).")
@click.option("--penalty", type=click.Choice(["none", "lasso", "scad", "mcp"]),
              default=None, help="Penalty family (default lasso).")
@click.option("--lam", "--lambda", "lam", type=float, default=None,
              help="Penalty strength override.")
@click.option("--escalate/--no-escalate", default=None,
              help="Escalate alpha until the selection is non-empty.")
@click.option("--seed", type=int, default=None, help="Master seed (drawn and printed if absent).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the report JSON here.")
def cmd_select(data, response, config_path, alpha, measure, penalty, lam,
               escalate, seed, out_path):
    """Run the full selection pipeline on a CSV file."""
    X, y, names = _read_csv(data, response)
    try:
        cfg = load_pipeline_config(config_path)
        if measure is not None:
            cfg = replace(cfg, measure=MeasureSpec(kind=measure))
        if penalty is not None or lam is not None:
            pen = cfg.penalty
            if penalty is not None:
                pen = replace(pen, kind=penalty)
            if lam is not None:
                pen = replace(pen, lam=lam)
            cfg = replace(cfg, penalty=pen, hp_grid=[pen])
        if alpha is not None:
            cfg = replace(cfg, alpha=alpha)
        if escalate is not None:
            cfg = replace(cfg, escalate=escalate)
        if seed is None and config_path is not None:
            import yaml

            with open(config_path) as fh:
                if "seed" in (yaml.safe_load(fh) or {}):
                    seed = cfg.seed
        cfg = replace(cfg, seed=_resolve_seed(seed))
    except SmrmrError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    try:
        report = run(X, y, cfg)
    except NumericalFailure as exc:
        _fail(EXIT_NUMERICAL, str(exc))
    except SmrmrError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    payload = report.to_json(indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(payload + "\n")
    ids = (report.feature_ids if report.feature_ids is not None
           else np.arange(len(report.w)))
    click.echo(f"{'feature':<24}{'score':>12}")
    for k in report.selected:
        local = int(np.flatnonzero(ids == k)[0])
        click.echo(f"{names[int(k)]:<24}{report.w[local]:>12.6f}")
    if len(report.selected) == 0:
        click.echo("(empty selection)")
    thr = "inf" if math.isinf(report.threshold) else f"{report.threshold:.6g}"
    click.echo(
        f"alpha_used={report.alpha_used} threshold={thr} fdp_hat={report.fdp_hat:.4f}"
    )


@main.command("simulate")
@click.option("--dgp", "dgp_id", required=True, type=click.Choice(list(DGP_IDS)))
@click.option("--n", type=int, required=True)
@click.option("--p", type=int, required=True)
@click.option("--c", type=float, default=0.5, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out-prefix", required=True, help="Prefix for X.csv, y.csv, meta.json.")
def cmd_simulate(dgp_id, n, p, c, seed, out_prefix):
    """Generate one synthetic dataset and write it as CSV + JSON sidecar."""
    try:
        spec = DgpSpec(id=dgp_id, n=n, p=p, c=c, seed=_resolve_seed(seed))
        data = generate(spec)
    except SmrmrError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    os.makedirs(os.path.dirname(os.path.abspath(out_prefix + "X.csv")), exist_ok=True)
    header = ",".join(f"x{k}" for k in range(p))
    np.savetxt(out_prefix + "X.csv", data.X, delimiter=",",
               header=header, comments="", fmt="%.17g")
    np.savetxt(out_prefix + "y.csv", data.y, delimiter=",",
               header="y", comments="", fmt="%.17g")
    meta = {
        "dgp": dgp_id, "n": n, "p": p, "c": spec.effective_c, "seed": spec.seed,
        "true_support": [int(k) for k in data.true_support], "task": data.task,
    }
    with open(out_prefix + "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    click.echo(f"wrote {out_prefix}X.csv, {out_prefix}y.csv, {out_prefix}meta.json")


@main.command("benchmark")
@click.option("--config", "config_path", type=click.Path(), required=True,
              help="YAML file with dgp: {id, n, p, c} plus pipeline settings.")
@click.option("--replicates", type=int, default=10, show_default=True)
@click.option("--workers", type=int,
              default=lambda: int(os.environ.get("SMRMR_WORKERS", "1")),
              help="Parallel workers [env SMRMR_WORKERS].")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--downstream/--no-downstream", default=False,
              help="Also fit the downstream model per replicate.")
def cmd_benchmark(config_path, replicates, workers, out_dir, downstream):
    """Monte-Carlo FDR/selection experiment; emits per-replicate CSV + summary."""
    try:
        with open(config_path) as fh:
            import yaml

            raw = yaml.safe_load(fh) or {}
        dgp_raw = raw.pop("dgp", None)
        if not dgp_raw:
            _fail(EXIT_VALIDATION, "benchmark config needs a 'dgp' table")
        spec = DgpSpec(
            id=str(dgp_raw["id"]), n=int(dgp_raw["n"]), p=int(dgp_raw["p"]),
            c=float(dgp_raw.get("c", 0.5)), seed=0,
        )
        method = raw.pop("method", "smrmr")
        cfg = pipeline_config_from_dict(raw)
    except (KeyError, SmrmrError, OSError) as exc:
        _fail(EXIT_VALIDATION, f"invalid benchmark config: {exc}")
    result = fdr_experiment(
        spec, cfg, replicates, workers=max(1, workers), out_dir=out_dir,
        method=method, eval_downstream=downstream,
    )
    if result.failures == result.replicates:
        _fail(EXIT_NUMERICAL, "all replicates failed")
    click.echo(f"{'metric':<12}{'mean':>12}{'se':>12}{'n':>6}")
    for key, stats in sorted(result.summary.items()):
        if isinstance(stats, dict):
            click.echo(
                f"{key:<12}{stats['mean']:>12.4f}{stats['se']:>12.4f}{stats['n']:>6}"
            )
    if result.failures:
        click.echo(f"failures: {result.failures}/{result.replicates}")


@main.command("diagnose")
@click.argument("data", type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def cmd_diagnose(data, seed, out_path):
    """Knockoff moment diagnostics for a feature CSV (no response needed)."""
    try:
        with open(data, newline="") as fh:
            reader = csv_mod.reader(fh)
            header = next(reader, None)
            rows = [[float(v) for v in row] for row in reader]
    except (OSError, ValueError) as exc:
        _fail(EXIT_VALIDATION, f"cannot parse {data}: {exc}")
    X = np.array(rows, dtype=np.float64)
    try:
        km = sample_knockoffs(X, _resolve_seed(seed))
    except SmrmrError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    joint = np.hstack([X, km.xk])
    emp = np.cov(joint, rowvar=False)
    p = X.shape[1]
    target = np.block([
        [km.sigma_hat, km.sigma_hat - np.diag(km.s_vec)],
        [km.sigma_hat - np.diag(km.s_vec), km.sigma_hat],
    ])
    report = {
        "p": p,
        "n": X.shape[0],
        "s_vec": [float(v) for v in km.s_vec],
        "max_abs_cov_error": float(np.max(np.abs(emp - target))),
        "max_abs_mean_error": float(np.max(np.abs(km.xk.mean(axis=0) - km.mu_hat))),
    }
    payload = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(payload + "\n")
    click.echo(payload)


if __name__ == "__main__":
    main()
