"""Benchmark protocol: Toeplitz Gaussian designs, four signal scenarios, and
square-root l1 versus square-root sorted-l1 fits at closed-form and
cross-validated penalty levels.

A study draws the design once, then per repetition draws fresh noise, fits
both methods at both penalty sources, and records three error metrics:
``||b0 - bh||_1``, the sorted-l1 error with the configured weight sequence,
and the unscaled prediction error ``||X (b0 - bh)||_2``.  Reports are fully
deterministic given the seed; see :mod:`sqrtreg._rng` for the stream layout.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from . import _rng
from .errors import SqrtRegError
from .model import GroundTruth, RegressionProblem, prediction_error_l2
from .norms import L1Norm, Norm, SortedL1Norm
from .solver import SolverConfig, fit
from .theory import theoretical_lambda

__all__ = [
    "SimulationConfig",
    "SimulationReport",
    "generate_problem",
    "cross_validate_lambda",
    "run_study",
    "render_summary_csv",
    "render_summary_text",
    "SCENARIOS",
]

SCENARIOS = ("decreasing", "decreasing-random", "grouped", "grouped-random")

# support used by the "random" scenarios at full scale (needs p >= 403)
_FIXED_RANDOM_SUPPORT = (154, 129, 276, 29, 233, 240, 402)

_DECREASING_VALUES = tuple(4.0 - k / 3.0 for k in range(7))
_GROUPED_VALUES = (4.0, 4.0, 4.0, 3.0, 3.0, 2.0, 2.0)

METHODS = ("sr-lasso", "sr-slope")
SOURCES = ("theoretical", "cv")
METRICS = ("l1_error", "sorted_l1_error", "prediction_error")


@dataclasses.dataclass(frozen=True)
class SimulationConfig:
    """Design, signal and protocol constants of one study."""

    n: int = 100
    p: int = 500
    rho: float = 0.9
    sigma: float = 1.0
    repetitions: int = 100
    scenario: str = "decreasing"
    seed: int = 0
    cv_folds: int = 8
    alpha: float = 0.05
    sorted_seq_start: float = 1.0
    sorted_seq_end: float = 0.1
    cv_grid_size: int = 30
    cv_grid_span: tuple[float, float] = (0.01, 2.0)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.p < 7:
            raise ValueError(f"p must be at least 7 to place the signal, got {self.p}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must be in [0, 1), got {self.rho}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be at least 2")

    @classmethod
    def desk(cls, **overrides) -> "SimulationConfig":
        """Scaled-down profile for quick runs: n=50, p=100, 20 repetitions."""
        defaults = dict(n=50, p=100, repetitions=20)
        defaults.update(overrides)
        return cls(**defaults)

    @classmethod
    def paper_scale(cls, **overrides) -> "SimulationConfig":
        """Full-scale profile: n=100, p=500, 100 repetitions."""
        return cls(**overrides)

    @property
    def sorted_weights(self) -> np.ndarray:
        return np.linspace(self.sorted_seq_start, self.sorted_seq_end, self.p)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["cv_grid_span"] = list(self.cv_grid_span)
        return d


def _toeplitz_cholesky(p: int, rho: float) -> np.ndarray:
    if rho == 0.0:
        return np.eye(p)
    idx = np.arange(p)
    cov = rho ** np.abs(idx[:, None] - idx[None, :])
    return np.linalg.cholesky(cov)


def _scenario_beta0(config: SimulationConfig) -> tuple[np.ndarray, tuple[int, ...]]:
    values = _DECREASING_VALUES if config.scenario.startswith("decreasing") else _GROUPED_VALUES
    if config.scenario.endswith("random"):
        if config.p >= 403:
            support = _FIXED_RANDOM_SUPPORT
        else:
            rng = _rng.stream(config.seed, _rng.SUPPORT)
            support = tuple(int(i) for i in rng.choice(config.p, size=7, replace=False))
    else:
        support = tuple(range(7))
    beta0 = np.zeros(config.p)
    for idx, val in zip(support, values):
        beta0[idx] = val
    return beta0, tuple(sorted(support))


def generate_design(config: SimulationConfig) -> np.ndarray:
    """The study's design matrix: rows i.i.d. Gaussian with Toeplitz covariance
    ``rho ** |i - j|``; drawn once per study (stream 0)."""
    rng = _rng.stream(config.seed, _rng.DESIGN)
    Z = rng.standard_normal((config.n, config.p))
    return Z @ _toeplitz_cholesky(config.p, config.rho).T


def _assemble(config, X, beta0, support, rep):
    signal = X @ beta0
    noise = _rng.stream(config.seed, _rng.NOISE, rep).standard_normal(config.n) * config.sigma
    Y = signal + noise
    # store the noise as re-derived from Y so Y - X beta0 recovers it bit-exactly
    truth = GroundTruth(beta0=beta0, sigma=config.sigma, noise=Y - signal, active_set=support)
    return RegressionProblem(X=X, Y=Y), truth


def generate_problem(config: SimulationConfig, rep: int = 0) -> tuple[RegressionProblem, GroundTruth]:
    """Problem and truth for one repetition: fixed design, fresh noise (stream 1, rep)."""
    X = generate_design(config)
    beta0, support = _scenario_beta0(config)
    return _assemble(config, X, beta0, support, rep)


# fits inside the cross-validation loop run at relaxed tolerances: fold fits
# only need prediction-grade accuracy, and their convergence bar must stay
# reachable near the interpolating end of the grid.  Final fits use defaults.
_CV_SOLVER = dict(max_outer=40, max_inner=2000, tol_outer=1e-5, tol_inner=1e-9, kkt_tol=1e-3)


def cross_validate_lambda(
    problem: RegressionProblem,
    spec: Norm,
    grid,
    folds: int,
    seed: int,
    *,
    solver_opts: dict | None = None,
) -> float:
    """Penalty level minimizing the k-fold held-out mean squared prediction error.

    Rows are shuffled once (stream 2 of ``seed``) and split into contiguous
    blocks.  A penalty level with any non-converged fold fit is excluded; ties
    resolve to the smaller level.
    """
    grid = np.unique(np.asarray(grid, dtype=float))  # ascending, deduplicated
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    if folds > problem.n:
        raise ValueError(f"cannot make {folds} folds from {problem.n} rows")
    order = _rng.stream(seed, _rng.CV).permutation(problem.n)
    blocks = np.array_split(order, folds)

    opts = dict(_CV_SOLVER)
    opts.update(solver_opts or {})
    sse = np.zeros(grid.size)
    counts = np.zeros(grid.size, dtype=int)
    valid = np.ones(grid.size, dtype=bool)
    for block in blocks:
        mask = np.ones(problem.n, dtype=bool)
        mask[block] = False
        train = RegressionProblem(X=problem.X[mask], Y=problem.Y[mask])
        X_test, Y_test = problem.X[block], problem.Y[block]
        warm = np.zeros(problem.p)
        # descending path with warm starts: solutions change slowly in lam
        for gi in range(grid.size - 1, -1, -1):
            if not valid[gi]:
                continue
            try:
                res = fit(train, spec, SolverConfig(lam=float(grid[gi]), beta_init=warm, **opts))
            except SqrtRegError:
                valid[gi] = False
                continue
            if not res.converged:
                valid[gi] = False
                continue
            warm = np.asarray(res.beta_hat)
            err = Y_test - X_test @ res.beta_hat
            sse[gi] += float(err @ err)
            counts[gi] += block.size
    if not np.any(valid):
        raise SqrtRegError("every grid level failed cross-validation (no converged fits)")
    mse = np.where(valid, sse / np.maximum(counts, 1), np.inf)
    return float(grid[int(np.argmin(mse))])  # argmin takes the first = smallest level


@dataclasses.dataclass(frozen=True)
class SimulationReport:
    """Per-repetition records plus aggregated means, all JSON-serializable."""

    config: dict
    theoretical_lambdas: dict
    records: tuple[dict, ...]
    summary: dict
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "theoretical_lambdas": self.theoretical_lambdas,
            "summary": self.summary,
            "diagnostics": self.diagnostics,
            "records": list(self.records),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationReport":
        return cls(
            config=data["config"],
            theoretical_lambdas=data["theoretical_lambdas"],
            records=tuple(data["records"]),
            summary=data["summary"],
            diagnostics=data["diagnostics"],
        )


def _metrics(config: SimulationConfig, truth: GroundTruth, problem, beta_hat) -> dict:
    diff = truth.beta0 - beta_hat
    sorted_norm = SortedL1Norm(config.sorted_weights)
    return {
        "l1_error": float(np.sum(np.abs(diff))),
        "sorted_l1_error": sorted_norm.value(diff),
        "prediction_error": prediction_error_l2(problem, beta_hat, truth.beta0),
    }


def run_study(config: SimulationConfig) -> SimulationReport:
    """Execute the full protocol for one scenario and aggregate the tables."""
    X = generate_design(config)
    beta0, support = _scenario_beta0(config)
    sorted_weights = config.sorted_weights
    norms: dict[str, Norm] = {
        "sr-lasso": L1Norm(),
        "sr-slope": SortedL1Norm(sorted_weights),
    }
    lam_theory = {
        name: float(theoretical_lambda(norm, config.n, config.p, config.alpha))
        for name, norm in norms.items()
    }
    lo, hi = config.cv_grid_span
    grids = {
        name: np.geomspace(lo * lam_theory[name], hi * lam_theory[name], config.cv_grid_size)
        for name in norms
    }

    records = []
    for rep in range(config.repetitions):
        problem, truth = _assemble(config, X, beta0, support, rep)
        for name, norm in norms.items():
            lam_by_source = {"theoretical": lam_theory[name]}
            cv_error = None
            try:
                lam_by_source["cv"] = cross_validate_lambda(
                    problem, norm, grids[name], config.cv_folds,
                    seed=_rng.child_seed(config.seed, _rng.CV, rep),
                )
            except SqrtRegError as exc:
                cv_error = str(exc)
            for source in SOURCES:
                record = {"rep": rep, "method": name, "source": source}
                if source == "cv" and "cv" not in lam_by_source:
                    record.update({"error": f"cv failed: {cv_error}", "lambda": None})
                    records.append(record)
                    continue
                lam = lam_by_source[source]
                record["lambda"] = lam
                try:
                    res = fit(problem, norm, SolverConfig(lam=lam))
                except SqrtRegError as exc:
                    record["error"] = str(exc)
                    records.append(record)
                    continue
                record.update(_metrics(config, truth, problem, res.beta_hat))
                record.update({
                    "error": None,
                    "converged": res.converged,
                    "kkt_residual": res.kkt_residual,
                    "outer_iters": res.outer_iters,
                    "inner_iters": res.inner_iters,
                    "residual_norm_n": res.residual_norm_n,
                })
                records.append(record)

    summary: dict = {}
    diagnostics: dict = {"failed_records": 0, "non_converged": 0}
    for name in norms:
        summary[name] = {}
        for source in SOURCES:
            cell = [r for r in records if r["method"] == name and r["source"] == source]
            good = [r for r in cell if r.get("error") is None]
            diagnostics["failed_records"] += len(cell) - len(good)
            diagnostics["non_converged"] += sum(1 for r in good if not r["converged"])
            summary[name][source] = {
                metric: (float(np.mean([r[metric] for r in good])) if good else None)
                for metric in METRICS
            }
            summary[name][source]["count"] = len(good)
    kkts = [r["kkt_residual"] for r in records if r.get("error") is None]
    diagnostics["max_kkt_residual"] = float(np.max(kkts)) if kkts else None
    diagnostics["active_set"] = list(support)

    return SimulationReport(
        config=config.to_dict(),
        theoretical_lambdas=lam_theory,
        records=tuple(records),
        summary=summary,
        diagnostics=diagnostics,
    )


def render_summary_csv(report: SimulationReport) -> str:
    lines = ["method,lambda_source," + ",".join(METRICS)]
    for name in METHODS:
        for source in SOURCES:
            cell = report.summary[name][source]
            vals = ",".join("" if cell[m] is None else repr(cell[m]) for m in METRICS)
            lines.append(f"{name},{source},{vals}")
    return "\n".join(lines) + "\n"


def render_summary_text(report: SimulationReport) -> str:
    header = f"{'method':<10} {'lambda':<12} " + " ".join(f"{m:>18}" for m in METRICS)
    lines = [header, "-" * len(header)]
    for name in METHODS:
        for source in SOURCES:
            cell = report.summary[name][source]
            vals = " ".join(
                f"{cell[m]:>18.6f}" if cell[m] is not None else f"{'n/a':>18}" for m in METRICS
            )
            lines.append(f"{name:<10} {source:<12} {vals}")
    return "\n".join(lines) + "\n"
