"""Square-root-penalized fitting and its first-order optimality certificate.

The estimator minimizes ``||Y - X b||_n + lam * Omega(b)``.  The solver runs
an outer scale iteration: freeze the residual norm ``sigma``, solve the
penalized least-squares problem ``0.5 * ||Y - X b||_n^2 + sigma * lam *
Omega(b)`` with accelerated proximal gradient, update ``sigma``, repeat.  The
fixed point of the scale map satisfies exactly the stationarity conditions of
the original objective, which ``check_kkt`` measures as a scalar residual:

    max( max(0, Omega*(X' e / (n ||e||_n)) - lam),
         |e' X b / (n ||e||_n) - lam * Omega(b)| / (1 + lam * Omega(b)) )

with ``e`` the fit residual.  The equality branch is normalized so the
residual is comparable across problem scales.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import DimensionError, InterpolationError, SqrtRegError
from .model import RegressionProblem, norm_n
from .norms import L1Norm, Norm

__all__ = ["SolverConfig", "FitResult", "fit", "check_kkt", "fixed_point_check"]

# residual norms below this multiple of ||Y||_n count as interpolation
INTERPOLATION_GUARD = 1e-12


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    """Penalty level and loop controls for :func:`fit`."""

    lam: float
    max_outer: int = 100
    max_inner: int = 20000
    tol_outer: float = 1e-8
    tol_inner: float = 1e-12
    kkt_tol: float = 1e-6
    beta_init: np.ndarray | None = None

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration limits must be at least 1")
        if min(self.tol_outer, self.tol_inner, self.kkt_tol) <= 0:
            raise ValueError("tolerances must be positive")


@dataclasses.dataclass(frozen=True)
class FitResult:
    """Solution of one square-root-penalized fit."""

    beta_hat: np.ndarray
    residual: np.ndarray
    residual_norm_n: float
    outer_iters: int
    inner_iters: int
    kkt_residual: float
    converged: bool
    objective: float
    objective_trace: tuple[float, ...]

    def __post_init__(self):
        for name in ("beta_hat", "residual"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        return {
            "beta_hat": self.beta_hat.tolist(),
            "residual": self.residual.tolist(),
            "residual_norm_n": self.residual_norm_n,
            "outer_iters": self.outer_iters,
            "inner_iters": self.inner_iters,
            "kkt_residual": self.kkt_residual,
            "converged": self.converged,
            "objective": self.objective,
            "objective_trace": list(self.objective_trace),
        }


def operator_norm_sq(X: np.ndarray, iters: int = 50, tol: float = 1e-8) -> float:
    """Largest eigenvalue of ``X' X / n`` by power iteration (deterministic start)."""
    n, p = X.shape
    v = np.ones(p) + 1e-3 * np.arange(p)  # breaks symmetry without randomness
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = X.T @ (X @ v) / n
        lam_new = float(np.linalg.norm(w))
        if lam_new == 0.0:
            return 0.0
        v = w / lam_new
        if abs(lam_new - lam) <= tol * lam_new:
            lam = lam_new
            break
        lam = lam_new
    return lam


def _fista(X, Y, norm: Norm, pen: float, beta0, step: float, max_iter: int, tol: float):
    """Monotone accelerated proximal gradient on ``0.5 ||Y-Xb||_n^2 + pen * Omega(b)``.

    Restarts the momentum whenever the objective would increase, so the
    returned objective never exceeds the warm-start value.  Returns
    ``(beta, iterations)``.
    """
    n = Y.shape[0]

    def objective(b, r):
        return 0.5 * float(r @ r) / n + pen * norm.value(b)

    b = beta0.copy()
    Xb = X @ b
    r = Y - Xb
    f_b = objective(b, r)
    r_y = r
    t = 1.0
    for k in range(1, max_iter + 1):
        grad = -(X.T @ r_y) / n
        b_new = norm.prox((b if t == 1.0 else y) - step * grad, step * pen)
        Xb_new = X @ b_new
        r_new = Y - Xb_new
        f_new = objective(b_new, r_new)
        if f_new > f_b:
            # momentum overshoot: restart from the last accepted iterate
            grad = -(X.T @ r) / n
            b_new = norm.prox(b - step * grad, step * pen)
            Xb_new = X @ b_new
            r_new = Y - Xb_new
            f_new = objective(b_new, r_new)
            t = 1.0
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        momentum = (t - 1.0) / t_new
        y = b_new + momentum * (b_new - b)
        r_y = r_new - momentum * (Xb_new - Xb)  # residual at y without a matvec
        done = abs(f_b - f_new) <= tol * max(1.0, abs(f_new))
        b, Xb, r, f_b, t = b_new, Xb_new, r_new, f_new, t_new
        if done:
            return b, k
    return b, max_iter


def check_kkt(problem: RegressionProblem, spec: Norm, beta_hat, lam: float) -> float:
    """Scalar stationarity residual of the square-root-penalized objective.

    Zero (to floating point) exactly when ``beta_hat`` satisfies the
    optimality conditions at penalty level ``lam``.  Raises
    :class:`InterpolationError` when the residual norm is numerically zero,
    where the conditions are undefined.
    """
    beta_hat = np.asarray(beta_hat, dtype=float)
    if beta_hat.shape != (problem.p,):
        raise DimensionError(f"beta_hat has shape {beta_hat.shape}, expected ({problem.p},)")
    eps = problem.Y - problem.X @ beta_hat
    s = norm_n(eps)
    y_scale = norm_n(problem.Y)
    if s <= INTERPOLATION_GUARD * max(y_scale, 1e-300):
        raise InterpolationError(
            "residual norm is numerically zero: the fit interpolates and the "
            "optimality conditions are undefined"
        )
    z = problem.X.T @ eps / (problem.n * s)
    dual_excess = max(0.0, spec.dual(z) - lam)
    omega = spec.value(beta_hat)
    equality_gap = abs(float(z @ beta_hat) - lam * omega) / (1.0 + lam * omega)
    return max(dual_excess, equality_gap)


def fit(problem: RegressionProblem, spec: Norm, config: SolverConfig) -> FitResult:
    """Minimize ``||Y - X b||_n + lam * Omega(b)``.

    Alternates the residual-scale update with a warm-started accelerated
    proximal-gradient solve of the scaled squared-loss problem.  After the
    scale stabilizes, the stationarity residual is evaluated; if it exceeds
    ``config.kkt_tol`` the inner tolerance is tightened and the loop
    continues.  Non-convergence is reported through ``converged=False``,
    never silently.
    """
    X, Y, n, p = problem.X, problem.Y, problem.n, problem.p
    lam = config.lam
    y_scale = norm_n(Y)

    if config.beta_init is not None:
        beta = np.asarray(config.beta_init, dtype=float).copy()
        if beta.shape != (p,):
            raise DimensionError(f"beta_init has shape {beta.shape}, expected ({p},)")
    else:
        beta = np.zeros(p)

    if y_scale == 0.0:
        # zero response: the unique minimizer is zero with objective zero
        zero = np.zeros(p)
        return FitResult(
            beta_hat=zero, residual=Y.copy(), residual_norm_n=0.0,
            outer_iters=0, inner_iters=0, kkt_residual=0.0, converged=True,
            objective=0.0, objective_trace=(0.0,),
        )

    L = operator_norm_sq(X)
    if L == 0.0:
        raise SqrtRegError("design matrix is identically zero")
    step = 1.0 / (1.01 * L)

    resid = Y - X @ beta
    sigma = norm_n(resid)
    trace = [sigma + lam * spec.value(beta)]
    inner_total = 0
    inner_tol = config.tol_inner
    kkt = np.inf
    converged = False
    outer = 0

    for outer in range(1, config.max_outer + 1):
        if sigma <= INTERPOLATION_GUARD * y_scale:
            raise InterpolationError(
                "residual norm collapsed during fitting: the penalized problem "
                "is in the interpolating (overfitting) regime; increase lam"
            )
        beta, used = _fista(X, Y, spec, sigma * lam, beta, step, config.max_inner, inner_tol)
        inner_total += used
        resid = Y - X @ beta
        sigma_new = norm_n(resid)
        trace.append(sigma_new + lam * spec.value(beta))
        moved = abs(sigma_new - sigma) > config.tol_outer * max(sigma, 1e-300)
        sigma = sigma_new
        if moved:
            continue
        kkt = check_kkt(problem, spec, beta, lam)
        if kkt <= config.kkt_tol:
            converged = True
            break
        if inner_tol <= 1e-17:
            break  # cannot tighten further; report non-convergence
        inner_tol = max(inner_tol * 1e-2, 1e-17)

    if not converged:
        # the loop budget ran out; certification is by the residual itself
        if not np.isfinite(kkt):
            kkt = check_kkt(problem, spec, beta, lam)
        converged = kkt <= config.kkt_tol

    return FitResult(
        beta_hat=beta,
        residual=resid,
        residual_norm_n=sigma,
        outer_iters=outer,
        inner_iters=inner_total,
        kkt_residual=float(kkt),
        converged=converged,
        objective=float(trace[-1]),
        objective_trace=tuple(trace),
    )


def fixed_point_check(
    problem: RegressionProblem,
    lam: float,
    *,
    config: SolverConfig | None = None,
    fit_result: FitResult | None = None,
) -> float:
    """Sup-norm gap between the square-root l1 fit and the plain l1 fit
    re-solved at the fitted residual scale.

    The plain fit minimizes ``0.5 ||Y - X b||_n^2 + lam * sigma_hat ||b||_1``
    with ``sigma_hat`` the residual norm of the square-root fit; at the fixed
    point the two estimates coincide.
    """
    spec = L1Norm()
    if config is None:
        config = SolverConfig(lam=lam)
    if fit_result is None:
        fit_result = fit(problem, spec, config)
    if not fit_result.converged:
        raise SqrtRegError("square-root fit did not converge; fixed-point check is meaningless")
    sigma_hat = fit_result.residual_norm_n
    if sigma_hat <= INTERPOLATION_GUARD * max(norm_n(problem.Y), 1e-300):
        raise InterpolationError("square-root fit interpolates; fixed-point map undefined")

    L = operator_norm_sq(problem.X)
    step = 1.0 / (1.01 * L)
    # cold start: the comparison stays independent of the square-root solution
    beta_l, _ = _fista(
        problem.X, problem.Y, spec, lam * sigma_hat,
        np.zeros(problem.p), step, max_iter=200000, tol=1e-16,
    )
    return float(np.max(np.abs(beta_l - fit_result.beta_hat)))
