"""Command-line interface: fit, kkt-check, lambda, oracle, simulate.

Exit codes: 0 success, 1 usage error (message on stderr), 2 numerical failure
(structured JSON error on stdout).  Every successful run echoes its fully
resolved configuration into the output for reproducibility.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from .errors import SqrtRegError
from .model import RegressionProblem
from .norms import (
    BoxCone,
    GroupNorm,
    L1Norm,
    Norm,
    SortedL1Norm,
    SparseGroupNorm,
    StructuredNorm,
    WedgeCone,
)
from .simulate import (
    SimulationConfig,
    cross_validate_lambda,  # noqa: F401  (re-exported for scripting parity)
    render_summary_csv,
    render_summary_text,
    run_study,
)
from .solver import SolverConfig, check_kkt, fit
from .theory import oracle_certificate, theoretical_lambda
from .model import GroundTruth

NORM_CHOICES = ("l1", "group", "sorted-l1", "sparse-group", "box", "wedge")


def _parse_groups(spec: str) -> list[list[int]]:
    """Parse ``"0-4,5-9"`` style group lists (ranges inclusive, singletons allowed)."""
    groups = []
    for token in spec.split(","):
        token = token.strip()
        if "-" in token:
            a, b = token.split("-")
            groups.append(list(range(int(a), int(b) + 1)))
        else:
            groups.append([int(token)])
    return groups


def _parse_seq(spec: str, p: int) -> np.ndarray:
    """Parse a weight sequence: ``linear:1:0.1`` or a comma list of floats."""
    if spec.startswith("linear:"):
        _, a, b = spec.split(":")
        return np.linspace(float(a), float(b), p)
    return np.asarray([float(x) for x in spec.split(",")], dtype=float)


def _parse_bounds(spec: str, p: int) -> np.ndarray:
    vals = [float(x) for x in spec.split(",")]
    if len(vals) == 1:
        return np.full(p, vals[0])
    return np.asarray(vals, dtype=float)


def build_norm(
    name: str,
    p: int,
    *,
    groups: str | None = None,
    lambda_seq: str | None = None,
    l1_weight: float | None = None,
    group_weight: float | None = None,
    box_lower: str | None = None,
    box_upper: str | None = None,
) -> Norm:
    if name == "l1":
        return L1Norm()
    if name == "group":
        if not groups:
            raise click.UsageError("--groups is required for the group norm")
        return GroupNorm(_parse_groups(groups))
    if name == "sorted-l1":
        seq = lambda_seq or "linear:1:0.1"
        return SortedL1Norm(_parse_seq(seq, p))
    if name == "sparse-group":
        if not groups:
            raise click.UsageError("--groups is required for the sparse-group norm")
        lam = 1.0 if l1_weight is None else l1_weight
        eta = 1.0 if group_weight is None else group_weight
        return SparseGroupNorm(lam, eta, _parse_groups(groups))
    if name == "box":
        lo = _parse_bounds(box_lower or "0.5", p)
        hi = _parse_bounds(box_upper or "2.0", p)
        return StructuredNorm(BoxCone(lo, hi))
    if name == "wedge":
        return StructuredNorm(WedgeCone())
    raise click.UsageError(f"unknown norm {name!r}; choose from {NORM_CHOICES}")


def _norm_options(fn):
    fn = click.option("--norm", "norm_name", type=click.Choice(NORM_CHOICES), default="l1",
                      show_default=True, help="Penalty norm variant.")(fn)
    fn = click.option("--groups", default=None, help="Group partition, e.g. '0-4,5-9'.")(fn)
    fn = click.option("--lambda-seq", default=None,
                      help="Sorted-l1 weights: 'linear:1:0.1' or comma list.")(fn)
    fn = click.option("--l1-weight", type=float, default=None, help="Sparse-group l1 weight.")(fn)
    fn = click.option("--group-weight", type=float, default=None,
                      help="Sparse-group group weight.")(fn)
    fn = click.option("--box-lower", default=None, help="Box cone lower bounds (scalar or list).")(fn)
    fn = click.option("--box-upper", default=None, help="Box cone upper bounds (scalar or list).")(fn)
    return fn


def _load_problem(problem, x_csv, y_csv) -> RegressionProblem:
    if problem:
        return RegressionProblem.from_json(problem)
    if x_csv and y_csv:
        return RegressionProblem.from_csv(x_csv, y_csv)
    raise click.UsageError("provide --problem FILE.json or both --x-csv and --y-csv")


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


@click.group()
@click.option("--log-level", default="warning",
              type=click.Choice(["debug", "info", "warning", "error"]), show_default=True)
def cli(log_level):
    """Square-root-regularized regression toolbox."""
    logging.basicConfig(level=getattr(logging, log_level.upper()))


@cli.command("fit")
@click.option("--problem", type=click.Path(exists=True), default=None,
              help="Problem as a single JSON document with fields 'X' and 'Y'.")
@click.option("--x-csv", type=click.Path(exists=True), default=None)
@click.option("--y-csv", type=click.Path(exists=True), default=None)
@_norm_options
@click.option("--lambda", "lam", type=float, required=True, help="Penalty level.")
@click.option("--kkt-tol", type=float, default=1e-6, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def fit_cmd(problem, x_csv, y_csv, norm_name, groups, lambda_seq, l1_weight,
            group_weight, box_lower, box_upper, lam, kkt_tol, out):
    """Fit the square-root-penalized estimator and report the solution."""
    prob = _load_problem(problem, x_csv, y_csv)
    norm = build_norm(norm_name, prob.p, groups=groups, lambda_seq=lambda_seq,
                      l1_weight=l1_weight, group_weight=group_weight,
                      box_lower=box_lower, box_upper=box_upper)
    config = SolverConfig(lam=lam, kkt_tol=kkt_tol)
    result = fit(prob, norm, config)
    payload = {
        "config": {
            "command": "fit", "norm": norm.to_config(), "lambda": lam,
            "kkt_tol": kkt_tol, "n": prob.n, "p": prob.p,
        },
        "result": result.to_dict(),
    }
    _emit(payload, out)
    if not result.converged:
        raise SqrtRegError(
            f"fit did not converge: kkt_residual={result.kkt_residual:.3e} > {kkt_tol:.1e}"
        )


@cli.command("kkt-check")
@click.option("--problem", type=click.Path(exists=True), default=None)
@click.option("--x-csv", type=click.Path(exists=True), default=None)
@click.option("--y-csv", type=click.Path(exists=True), default=None)
@_norm_options
@click.option("--beta", required=True,
              help="Coefficient vector: comma list or a JSON file path.")
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--out", type=click.Path(), default=None)
def kkt_cmd(problem, x_csv, y_csv, norm_name, groups, lambda_seq, l1_weight,
            group_weight, box_lower, box_upper, beta, lam, out):
    """Evaluate the stationarity residual of a given coefficient vector."""
    prob = _load_problem(problem, x_csv, y_csv)
    norm = build_norm(norm_name, prob.p, groups=groups, lambda_seq=lambda_seq,
                      l1_weight=l1_weight, group_weight=group_weight,
                      box_lower=box_lower, box_upper=box_upper)
    if Path(beta).exists():
        vec = np.asarray(json.loads(Path(beta).read_text(encoding="utf-8")), dtype=float)
    else:
        vec = np.asarray([float(x) for x in beta.split(",")], dtype=float)
    residual = check_kkt(prob, norm, vec, lam)
    _emit({
        "config": {"command": "kkt-check", "norm": norm.to_config(), "lambda": lam},
        "kkt_residual": residual,
    }, out)


@cli.command("lambda")
@_norm_options
@click.option("--n", type=int, required=True)
@click.option("--p", type=int, required=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--a-tilde", type=float, default=None,
              help="Structured norms: bound on the design-dependent factor.")
@click.option("--extreme-points", type=int, default=None,
              help="Structured norms: bound on the number of cone extreme points.")
@click.option("--out", type=click.Path(), default=None)
def lambda_cmd(norm_name, groups, lambda_seq, l1_weight, group_weight, box_lower,
               box_upper, n, p, alpha, a_tilde, extreme_points, out):
    """Closed-form penalty level for Gaussian errors."""
    norm = build_norm(norm_name, p, groups=groups, lambda_seq=lambda_seq,
                      l1_weight=l1_weight, group_weight=group_weight,
                      box_lower=box_lower, box_upper=box_upper)
    value = theoretical_lambda(norm, n, p, alpha, a_tilde=a_tilde,
                               extreme_points=extreme_points)
    payload = {"config": {"command": "lambda", "norm": norm.to_config(),
                          "n": n, "p": p, "alpha": alpha}}
    if isinstance(value, tuple):
        payload["lambda"], payload["eta"] = value
    else:
        payload["lambda"] = value
    _emit(payload, out)


@cli.command("oracle")
@click.option("--problem", type=click.Path(exists=True), required=True)
@click.option("--truth", type=click.Path(exists=True), required=True,
              help="JSON with fields beta0, sigma, noise, active_set.")
@_norm_options
@click.option("--set", "index_set", required=True, help="Allowed set, e.g. '0,1,2'.")
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--delta", type=float, default=0.5, show_default=True)
@click.option("--restarts", type=int, default=25, show_default=True,
              help="Search restarts for the effective-sparsity estimate.")
@click.option("--out", type=click.Path(), default=None)
def oracle_cmd(problem, truth, norm_name, groups, lambda_seq, l1_weight, group_weight,
               box_lower, box_upper, index_set, lam, delta, restarts, out):
    """Fit, then evaluate the sharp-bound certificate at beta = beta0."""
    prob = RegressionProblem.from_json(problem)
    gt = GroundTruth.from_dict(json.loads(Path(truth).read_text(encoding="utf-8")))
    norm = build_norm(norm_name, prob.p, groups=groups, lambda_seq=lambda_seq,
                      l1_weight=l1_weight, group_weight=group_weight,
                      box_lower=box_lower, box_upper=box_upper)
    S = tuple(int(i) for i in index_set.split(","))
    result = fit(prob, norm, SolverConfig(lam=lam))
    cert = oracle_certificate(prob, norm, S, gt.beta0, gt.beta0, gt.noise, lam, delta,
                              fit_result=result, gamma_opts={"restarts": restarts})
    _emit({
        "config": {"command": "oracle", "norm": norm.to_config(), "lambda": lam,
                   "delta": delta, "set": list(S)},
        "certificate": cert.to_dict(),
        "fit": {"converged": result.converged, "kkt_residual": result.kkt_residual},
    }, out)


@cli.command("simulate")
@click.option("--scenario",
              type=click.Choice(("decreasing", "decreasing-random", "grouped", "grouped-random")),
              default="decreasing", show_default=True)
@click.option("--profile", type=click.Choice(["desk", "paper"]), default="desk",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n", type=int, default=None)
@click.option("--p", type=int, default=None)
@click.option("--repetitions", type=int, default=None)
@click.option("--rho", type=float, default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--cv-folds", type=int, default=None)
@click.option("--cv-grid-size", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
              default="text", show_default=True, help="Summary format printed to stdout.")
@click.option("--out", type=click.Path(), default=None,
              help="Write OUT (full JSON report) plus .csv and .txt summaries.")
def simulate_cmd(scenario, profile, seed, n, p, repetitions, rho, sigma, cv_folds,
                 cv_grid_size, alpha, fmt, out):
    """Run the benchmark protocol for one scenario."""
    overrides = {k: v for k, v in dict(
        n=n, p=p, repetitions=repetitions, rho=rho, sigma=sigma,
        cv_folds=cv_folds, cv_grid_size=cv_grid_size, alpha=alpha,
    ).items() if v is not None}
    overrides.update(scenario=scenario, seed=seed)
    config = SimulationConfig.desk(**overrides) if profile == "desk" \
        else SimulationConfig.paper_scale(**overrides)
    report = run_study(config)
    if out:
        base = Path(out)
        base.write_text(report.to_json() + "\n", encoding="utf-8")
        base.with_suffix(".csv").write_text(render_summary_csv(report), encoding="utf-8")
        base.with_suffix(".txt").write_text(render_summary_text(report), encoding="utf-8")
    if fmt == "json":
        click.echo(report.to_json())
    elif fmt == "csv":
        click.echo(render_summary_csv(report), nl=False)
    else:
        click.echo(render_summary_text(report), nl=False)


def dispatch(argv) -> int:
    """Run the CLI on an argument list, mapping failures to exit codes."""
    try:
        cli.main(args=list(argv), standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:  # --help and friends
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except SqrtRegError as exc:
        click.echo(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 2
    except (ValueError, ArithmeticError) as exc:
        click.echo(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
