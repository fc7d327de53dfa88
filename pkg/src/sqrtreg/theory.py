"""Penalty-level formulas, effective-sparsity constants, and the two-sided
prediction/estimation bound certificate.

Notation used throughout (all quantities normalized by the realized noise):

* ``f``         -- ``lam * Omega(beta0) / ||noise||_n``, the penalized signal size.
* ``lambda0``   -- ``Omega*(X' noise / n) / ||noise||_n``, the full dual level.
* ``lambda_s``  -- same dual level with the correlations outside S zeroed out.
* ``lambda_sc`` -- complement-norm dual level of the correlations outside S.
* ``lambda_m``  -- ``max(lambda_s, lambda_sc)``, the level the penalty has to beat.

The certificate evaluates both sides of the sharp bound

    ||X(bh - b0)||_n^2
      + 2 delta ||e||_n [ (l* + lm) Omega(bh_S - b) + (l* - lm) Omega^c(bh_Sc) ]
    <=  ||X(b - b0)||_n^2 + ||e||_n^2 [ (1+delta)(lt + lm) ]^2 * Gamma^2(L_S, S)

with ``l* = lam (1 - (lambda0/lam)(1+2f)) / (f+2)``, ``lt = lam (1+f)`` and
``L_S = (lt + lm)/(l* - lm) * (1+delta)/(1-delta)``.  ``Gamma^2`` is the
effective sparsity, estimated by nonconvex search (flagged as an estimate).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import _rng
from .errors import (
    CalibrationError,
    DegenerateDesignError,
    DimensionError,
    DisallowedSetError,
)
from .model import RegressionProblem, norm_n
from .norms import (
    ComplementNorm,
    GroupNorm,
    L1Norm,
    Norm,
    SortedL1Norm,
    SparseGroupNorm,
    StructuredNorm,
)
from .solver import FitResult, SolverConfig, fit, operator_norm_sq

__all__ = [
    "EmpiricalLevels",
    "OracleCertificate",
    "EffectiveSparsityEstimate",
    "ProbabilityBoundParams",
    "OraclePointResult",
    "empirical_levels",
    "effective_sparsity",
    "effective_sparsity_detail",
    "oracle_certificate",
    "best_oracle_point",
    "theoretical_lambda",
    "expected_dual_bound",
    "calibration_constants",
    "probability_bound",
    "noise_norm_bound",
    "noise_norm_bound_factor",
]


# ---------------------------------------------------------------------------
# empirical levels
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EmpiricalLevels:
    f: float
    lambda0: float
    lambda_s: float
    lambda_sc: float
    lambda_m: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _pad(values, indices, p: int) -> np.ndarray:
    out = np.zeros(p)
    out[np.asarray(indices, dtype=int)] = values
    return out


def empirical_levels(
    problem: RegressionProblem,
    spec: Norm,
    S,
    beta0,
    noise,
    lam: float,
) -> EmpiricalLevels:
    """Noise-normalized penalty levels for an allowed set S."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (problem.n,):
        raise DimensionError(f"noise has shape {noise.shape}, expected ({problem.n},)")
    eps_norm = norm_n(noise)
    if eps_norm == 0.0:
        raise ValueError("noise vector is zero; the normalized levels are undefined")
    cn = ComplementNorm(spec, S, problem.p)
    S = cn.allowed_set
    g = problem.X.T @ noise / problem.n
    lambda0 = spec.dual(g) / eps_norm
    g_s = np.zeros(problem.p)
    if S:
        idx = np.asarray(S, dtype=int)
        g_s[idx] = g[idx]
    lambda_s = spec.dual(g_s) / eps_norm
    if cn.r:
        lambda_sc = cn.dual(g[np.asarray(cn.complement_indices, dtype=int)]) / eps_norm
    else:
        lambda_sc = 0.0
    f = lam * spec.value(np.asarray(beta0, dtype=float)) / eps_norm
    return EmpiricalLevels(
        f=float(f),
        lambda0=float(lambda0),
        lambda_s=float(lambda_s),
        lambda_sc=float(lambda_sc),
        lambda_m=float(max(lambda_s, lambda_sc)),
    )


# ---------------------------------------------------------------------------
# effective sparsity
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EffectiveSparsityEstimate:
    """Search-based estimate of the effective-sparsity constant.

    ``delta`` is an upper bound on the defining minimum (any feasible point
    gives one), so ``gamma_sq = 1/delta^2`` leans low; treat it as an
    estimate, not a certificate.  ``dispersion`` is the spread of the restart
    results, a rough indicator of search reliability.
    """

    delta: float
    gamma_sq: float
    restart_values: tuple[float, ...]
    dispersion: float
    dense_refined: bool

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["restart_values"] = list(self.restart_values)
        return d


def _project_norm_ball(norm: Norm, v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto ``{w : norm(w) <= radius}`` via its prox map.

    The projection equals the prox at the multiplier that lands on the
    boundary; the norm value of the prox output is nonincreasing in the
    multiplier, so bisection is exact.
    """
    if norm.value(v) <= radius:
        return v
    hi = 1e-6 * (1.0 + float(np.max(np.abs(v))))
    for _ in range(200):
        if norm.value(norm.prox(v, hi)) <= radius:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if norm.value(norm.prox(v, mid)) <= radius:
            hi = mid
        else:
            lo = mid
    return norm.prox(v, hi)


def _min_quadratic_over_ball(A, target, norm, radius, w0, lip, iters):
    """Projected gradient for ``min 0.5 ||target - A w||_n^2, norm(w) <= radius``."""
    n = target.shape[0]
    w = _project_norm_ball(norm, w0, radius)
    r = target - A @ w
    f = 0.5 * float(r @ r) / n
    step = 1.0 / lip if lip > 0 else 1.0
    for _ in range(iters):
        grad = -(A.T @ r) / n
        improved = False
        s = step
        for _ in range(20):
            w_try = _project_norm_ball(norm, w - s * grad, radius)
            r_try = target - A @ w_try
            f_try = 0.5 * float(r_try @ r_try) / n
            if f_try <= f:
                w, r, f = w_try, r_try, f_try
                improved = True
                break
            s *= 0.5
        if not improved:
            break
    return w


def _min_quadratic_on_sphere(A, target, value_of, u0, lip, iters):
    """Gradient steps renormalized onto ``{u : value_of(u) = 1}`` (accept-if-better)."""
    n = target.shape[0]

    def objective(u):
        r = target - A @ u
        return 0.5 * float(r @ r) / n

    u = u0 / value_of(u0)
    f = objective(u)
    step = 1.0 / lip if lip > 0 else 1.0
    for _ in range(iters):
        grad = -(A.T @ (target - A @ u)) / n
        improved = False
        s = step
        for _ in range(20):
            u_try = u - s * grad
            val = value_of(u_try)
            if val > 0:
                u_try = u_try / val
                f_try = objective(u_try)
                if f_try < f:
                    u, f = u_try, f_try
                    improved = True
                    break
            s *= 0.5
        if not improved:
            break
    return u


def effective_sparsity_detail(
    problem: RegressionProblem,
    spec: Norm,
    S,
    L: float,
    *,
    restarts: int = 25,
    rounds: int = 40,
    u_steps: int = 40,
    w_steps: int = 60,
    seed: int = 0,
    dense_samples: int | None = None,
    dense_limit: int = 12,
) -> EffectiveSparsityEstimate:
    """Estimate the effective sparsity ``Gamma^2(L, S)`` by alternating search.

    Minimizes ``||X_S u - X_Sc w||_n`` over ``Omega(pad(u)) = 1`` and
    ``Omega^c(w) <= L`` with multi-start alternation (sphere steps for u,
    projected gradient for w) and, for small dimensions, an additional dense
    random search.  ``dense_samples=None`` applies the default policy of
    ``10**6`` samples when ``p <= dense_limit``; pass an explicit count to
    force refinement at any dimension.
    """
    if L <= 0:
        raise ValueError(f"L must be positive, got {L}")
    cn = ComplementNorm(spec, S, problem.p)
    S = cn.allowed_set
    if not S:
        raise DisallowedSetError("S must be nonempty: the unit-norm constraint on "
                                 "the S-coordinates is unsatisfiable for the empty set")
    idx_s = np.asarray(S, dtype=int)
    idx_c = np.asarray(cn.complement_indices, dtype=int)
    Xs = problem.X[:, idx_s]
    Xc = problem.X[:, idx_c]
    r = idx_c.size

    def value_of(u):
        return spec.value(_pad(u, idx_s, problem.p))

    lip_s = operator_norm_sq(Xs)
    lip_c = operator_norm_sq(Xc) if r else 0.0

    results = []
    for restart in range(restarts):
        rng = _rng.stream(seed, _rng.SEARCH, restart)
        u = rng.standard_normal(idx_s.size)
        if not np.any(u):
            u = np.ones(idx_s.size)
        u = u / value_of(u)
        w = np.zeros(r)
        prev = math.inf
        for _ in range(rounds):
            if r:
                w = _min_quadratic_over_ball(Xc, Xs @ u, cn.norm, L, w, lip_c, w_steps)
            u = _min_quadratic_on_sphere(Xs, Xc @ w if r else np.zeros(problem.n),
                                         value_of, u, lip_s, u_steps)
            val = norm_n(Xs @ u - (Xc @ w if r else 0.0))
            if abs(prev - val) <= 1e-10 * max(val, 1e-30):
                break
            prev = val
        results.append(float(norm_n(Xs @ u - (Xc @ w if r else 0.0))))

    if dense_samples is None:
        dense_samples = 10 ** 6 if problem.p <= dense_limit else 0
    dense_refined = dense_samples > 0
    best_dense = math.inf
    if dense_refined:
        rng = _rng.stream(seed, _rng.SEARCH, 10 ** 6)
        chunk = 20000
        remaining = dense_samples
        while remaining > 0:
            m = min(chunk, remaining)
            remaining -= m
            U = rng.standard_normal((m, idx_s.size))
            padded = np.zeros((m, problem.p))
            padded[:, idx_s] = U
            uvals = spec.value_many(padded)
            keep = uvals > 0
            U = U[keep] / uvals[keep, None]
            fitted = U @ Xs.T
            if r:
                W = rng.standard_normal((U.shape[0], r))
                wvals = cn.norm.value_many(W)
                radii = L * rng.uniform(0.0, 1.0, U.shape[0]) ** (1.0 / max(r, 1))
                boundary = rng.uniform(size=U.shape[0]) < 0.5
                radii[boundary] = L
                scale = np.where(wvals > 0, radii / np.maximum(wvals, 1e-300), 0.0)
                W = W * scale[:, None]
                fitted = fitted - W @ Xc.T
            deltas = np.linalg.norm(fitted, axis=1) / math.sqrt(problem.n)
            if deltas.size:
                best_dense = min(best_dense, float(np.min(deltas)))

    candidates = list(results)
    if best_dense < math.inf:
        candidates.append(best_dense)
    delta = min(candidates)
    if delta < 1e-10:
        raise DegenerateDesignError(
            f"effective-sparsity minimum is numerically zero (delta={delta:.3e}); "
            "the constant blows up for this design and set"
        )
    dispersion = float(max(results) - min(results)) if results else 0.0
    return EffectiveSparsityEstimate(
        delta=float(delta),
        gamma_sq=float(1.0 / delta ** 2),
        restart_values=tuple(results),
        dispersion=dispersion,
        dense_refined=dense_refined,
    )


def effective_sparsity(problem, spec, S, L, **opts) -> float:
    """Effective sparsity ``Gamma^2(L, S)``; see :func:`effective_sparsity_detail`."""
    return effective_sparsity_detail(problem, spec, S, L, **opts).gamma_sq


# ---------------------------------------------------------------------------
# the certificate
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class OracleCertificate:
    """Both sides of the sharp bound plus every constant entering it.

    When the level condition fails (``lambda_star <= lambda_m``) the bound is
    not claimed: ``L_S``, ``gamma_sq``, ``lhs`` and ``rhs`` are ``None`` and
    ``assumptions_ok`` is ``False``.
    """

    levels: EmpiricalLevels
    lam: float
    delta: float
    lambda_star: float
    lambda_tilde: float
    a_const: float
    assumptions_ok: bool
    L_S: float | None
    gamma_sq: float | None
    gamma_dispersion: float | None
    gamma_is_estimate: bool
    lhs: float | None
    rhs: float | None
    C1: float
    C2: float | None
    pred_err_sq: float
    approx_err_sq: float
    est_err_s: float
    est_err_sc: float
    noise_norm_n: float

    def bound_holds(self) -> bool | None:
        """Whether ``lhs <= rhs``; ``None`` when the bound was not claimed."""
        if self.lhs is None or self.rhs is None:
            return None
        return self.lhs <= self.rhs

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["levels"] = self.levels.to_dict()
        return d


def oracle_certificate(
    problem: RegressionProblem,
    spec: Norm,
    S,
    beta,
    beta0,
    noise,
    lam: float,
    delta: float = 0.5,
    *,
    fit_result: FitResult,
    gamma_opts: dict | None = None,
) -> OracleCertificate:
    """Evaluate the sharp bound at an oracle point ``beta`` supported in S.

    ``delta`` is the free trade-off parameter in [0, 1); 0.5 balances the
    prediction and estimation parts.  ``gamma_opts`` is forwarded to
    :func:`effective_sparsity_detail`.
    """
    if not (0.0 <= delta < 1.0):
        raise ValueError(f"delta must be in [0, 1), got {delta}")
    beta = np.asarray(beta, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    noise = np.asarray(noise, dtype=float)
    cn = ComplementNorm(spec, S, problem.p)
    S = cn.allowed_set
    support = set(int(i) for i in np.flatnonzero(beta))
    if not support.issubset(set(S)):
        raise DisallowedSetError(
            f"support of beta {sorted(support)} is not contained in S {list(S)}"
        )
    levels = empirical_levels(problem, spec, S, beta0, noise, lam)
    f = levels.f
    lambda_star = lam * (1.0 - (levels.lambda0 / lam) * (1.0 + 2.0 * f)) / (f + 2.0)
    lambda_tilde = lam * (1.0 + f)
    a_const = 3.0 * (1.0 + f)
    assumptions_ok = ((levels.lambda0 / lam) * (1.0 + 2.0 * f) < 1.0) and (
        a_const * levels.lambda_m < lam
    )

    eps_norm = norm_n(noise)
    bh = fit_result.beta_hat
    idx_s = np.asarray(S, dtype=int)
    idx_c = np.asarray(cn.complement_indices, dtype=int)
    est_err_s = spec.value(_pad(bh[idx_s] - beta[idx_s], idx_s, problem.p)) if len(S) else 0.0
    est_err_sc = cn.value(bh[idx_c]) if cn.r else 0.0
    pred_err_sq = norm_n(problem.X @ (bh - beta0)) ** 2
    approx_err_sq = norm_n(problem.X @ (beta - beta0)) ** 2

    C = levels.lambda_m / lam
    C1 = (1.0 + delta) ** 2 * eps_norm ** 2 * (f + C + 1.0) ** 2
    C2 = None
    inner = 1.0 - 2.0 * C * (1.0 + 2.0 * f)
    if delta > 0 and inner > 0 and math.sqrt(inner) - C > 0:
        C2 = 1.0 / (2.0 * delta * eps_norm) / (math.sqrt(inner) - C)

    L_S = gamma_sq = dispersion = lhs = rhs = None
    if lambda_star > levels.lambda_m:
        L_S = (lambda_tilde + levels.lambda_m) / (lambda_star - levels.lambda_m)
        L_S *= (1.0 + delta) / (1.0 - delta)
        est = effective_sparsity_detail(problem, spec, S, L_S, **(gamma_opts or {}))
        gamma_sq = est.gamma_sq
        dispersion = est.dispersion
        lhs = pred_err_sq + 2.0 * delta * eps_norm * (
            (lambda_star + levels.lambda_m) * est_err_s
            + (lambda_star - levels.lambda_m) * est_err_sc
        )
        rhs = approx_err_sq + eps_norm ** 2 * (
            (1.0 + delta) * (lambda_tilde + levels.lambda_m)
        ) ** 2 * gamma_sq
    else:
        assumptions_ok = False

    return OracleCertificate(
        levels=levels,
        lam=float(lam),
        delta=float(delta),
        lambda_star=float(lambda_star),
        lambda_tilde=float(lambda_tilde),
        a_const=float(a_const),
        assumptions_ok=bool(assumptions_ok),
        L_S=L_S,
        gamma_sq=gamma_sq,
        gamma_dispersion=dispersion,
        gamma_is_estimate=True,
        lhs=lhs,
        rhs=rhs,
        C1=float(C1),
        C2=C2,
        pred_err_sq=float(pred_err_sq),
        approx_err_sq=float(approx_err_sq),
        est_err_s=float(est_err_s),
        est_err_sc=float(est_err_sc),
        noise_norm_n=float(eps_norm),
    )


@dataclasses.dataclass(frozen=True)
class OraclePointResult:
    active_set: tuple[int, ...]
    beta_star: np.ndarray
    certificate: OracleCertificate
    rank_deficient: bool
    rhs_values: tuple[float, ...]


def best_oracle_point(
    problem: RegressionProblem,
    spec: Norm,
    candidate_sets,
    beta0,
    noise,
    lam: float,
    delta: float = 0.5,
    *,
    fit_result: FitResult | None = None,
    gamma_opts: dict | None = None,
) -> OraclePointResult:
    """Pick, among the candidate allowed sets, the one minimizing the bound's
    right-hand side, with the oracle coefficient vector given by least-squares
    projection of the true signal onto the selected columns.

    Enumeration is restricted to the supplied candidates.  Rank-deficient
    column subsets fall back to the pseudo-inverse projection and are flagged.
    """
    candidate_sets = [tuple(sorted({int(i) for i in S})) for S in candidate_sets]
    if not candidate_sets:
        raise ValueError("candidate_sets must be nonempty")
    if fit_result is None:
        fit_result = fit(problem, spec, SolverConfig(lam=lam))
    beta0 = np.asarray(beta0, dtype=float)
    signal = problem.X @ beta0

    best = None
    rhs_values = []
    for S in candidate_sets:
        idx = np.asarray(S, dtype=int)
        coef, _, rank, _ = np.linalg.lstsq(problem.X[:, idx], signal, rcond=None)
        rank_def = rank < idx.size
        beta_star = _pad(coef, idx, problem.p)
        cert = oracle_certificate(
            problem, spec, S, beta_star, beta0, noise, lam, delta,
            fit_result=fit_result, gamma_opts=gamma_opts,
        )
        rhs = cert.rhs if cert.rhs is not None else math.inf
        rhs_values.append(float(rhs))
        if best is None or rhs < best[0]:
            best = (rhs, S, beta_star, cert, rank_def)

    _, S, beta_star, cert, rank_def = best
    return OraclePointResult(
        active_set=S,
        beta_star=beta_star,
        certificate=cert,
        rank_deficient=bool(rank_def),
        rhs_values=tuple(rhs_values),
    )


# ---------------------------------------------------------------------------
# closed-form penalty levels and probability bounds
# ---------------------------------------------------------------------------


def calibration_constants(alpha: float, n: int) -> tuple[float, float]:
    """The pair ``(t, Delta)`` with ``t = sqrt(log(4/alpha))`` and
    ``Delta^2 = 1 - t sqrt(2/n)``; errors out when ``Delta^2 <= 0``."""
    if not 0.0 < alpha < 1.0:
        raise CalibrationError(f"alpha must be in (0, 1), got {alpha}")
    t = math.sqrt(math.log(4.0 / alpha))
    delta_sq = 1.0 - t * math.sqrt(2.0 / n)
    if delta_sq <= 0.0:
        raise CalibrationError(
            f"Delta^2 = 1 - t*sqrt(2/n) = {delta_sq:.4g} <= 0 at alpha={alpha}, n={n}; "
            "increase alpha or n"
        )
    return t, math.sqrt(delta_sq)


def expected_dual_bound(
    spec: Norm,
    n: int,
    p: int | None = None,
    *,
    a_tilde: float | None = None,
    extreme_points: int | None = None,
) -> float:
    """Closed-form upper bound on the expected noise-normalized dual level."""
    base = math.sqrt(2.0 / n)
    if isinstance(spec, (L1Norm, SparseGroupNorm)):
        if p is None:
            p = getattr(spec, "p", None)
        if p is None:
            raise ValueError("p is required for the l1-family bound")
        return base * (2.0 + math.sqrt(math.log(p)))
    if isinstance(spec, GroupNorm):
        return base * (2.0 + math.sqrt(math.log(len(spec.groups))))
    if isinstance(spec, SortedL1Norm):
        r_sq = float(np.sum(1.0 / spec.weights ** 2))
        return base * ((2.0 * math.sqrt(2.0) + 1.0) / math.sqrt(2.0) + math.sqrt(math.log(r_sq)))
    if isinstance(spec, StructuredNorm):
        if a_tilde is None or extreme_points is None:
            raise ValueError(
                "structured norms need user-supplied a_tilde and extreme_points bounds"
            )
        return base * a_tilde * (2.0 + math.sqrt(math.log(extreme_points)))
    raise ValueError(f"no closed-form bound for {type(spec).__name__}")


def theoretical_lambda(
    spec: Norm,
    n: int,
    p: int,
    alpha: float,
    *,
    a_tilde: float | None = None,
    extreme_points: int | None = None,
):
    """Noise-free penalty level for Gaussian errors at miss probability alpha.

    Returns a float for every norm except the sparse-group penalty, which
    yields the pair ``(l1 level, group level)``.
    """
    t, delta = calibration_constants(alpha, n)
    base = math.sqrt(2.0 / n)
    own_p = getattr(spec, "p", None)
    if own_p is not None and own_p != p:
        raise DimensionError(f"norm is defined on p={own_p}, got p={p}")
    if isinstance(spec, SparseGroupNorm):
        lam = base * (t / delta + 2.0 + math.sqrt(math.log(p)))
        eta = base * (t / delta + 2.0 + math.sqrt(math.log(len(spec.groups))))
        return lam, eta
    if isinstance(spec, L1Norm):
        return base * (t / delta + 2.0 + math.sqrt(math.log(p)))
    if isinstance(spec, GroupNorm):
        return base * (t / delta + 2.0 + math.sqrt(math.log(len(spec.groups))))
    if isinstance(spec, SortedL1Norm):
        r_sq = float(np.sum(1.0 / spec.weights ** 2))
        return base * (
            t / (spec.weights[-1] * delta)
            + (2.0 * math.sqrt(2.0) + 1.0) / math.sqrt(2.0)
            + math.sqrt(math.log(r_sq))
        )
    if isinstance(spec, StructuredNorm):
        ev = expected_dual_bound(spec, n, p, a_tilde=a_tilde, extreme_points=extreme_points)
        return base * t * spec.l2_bound() / delta + ev
    raise ValueError(f"no theoretical level for {type(spec).__name__}")


@dataclasses.dataclass(frozen=True)
class ProbabilityBoundParams:
    """Inputs of the Gaussian concentration bound for the dual-level event.

    ``boxed_calibration`` fixes ``t``, ``Delta`` and ``d`` so that the two
    tail terms sum to ``alpha``; ``general`` keeps them free (requires
    ``Delta > 1`` and ``d > ev_bound`` when evaluated).
    """

    delta_cal: float
    D: float
    ev_bound: float
    b2: float
    d: float
    boxed: bool
    alpha: float | None = None
    t: float | None = None

    def __post_init__(self):
        if self.D <= 0:
            raise ValueError(f"D must be positive, got {self.D}")
        if self.b2 > self.D ** 2 * (1.0 + 1e-12):
            raise ValueError(f"b2={self.b2} exceeds D^2={self.D ** 2}")

    @classmethod
    def boxed_calibration(cls, alpha: float, n: int, D: float, ev_bound: float):
        t, delta = calibration_constants(alpha, n)
        d = t * (D / delta) * math.sqrt(2.0 / n) + ev_bound
        return cls(delta_cal=delta, D=D, ev_bound=ev_bound, b2=D ** 2, d=d,
                   boxed=True, alpha=alpha, t=t)

    @classmethod
    def general(cls, delta_cal: float, D: float, ev_bound: float, d: float,
                b2: float | None = None):
        return cls(delta_cal=delta_cal, D=D, ev_bound=ev_bound,
                   b2=D ** 2 if b2 is None else b2, d=d, boxed=False)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def probability_bound(params: ProbabilityBoundParams, n: int) -> float:
    """Lower bound on the probability that both dual levels stay below ``d``.

    The boxed calibration is constructed so the bound equals ``1 - alpha``;
    the general form evaluates the two-exponential expression and insists on
    its validity regime (``d`` above the expectation bound, ``Delta > 1``).
    """
    if params.boxed:
        return 1.0 - params.alpha
    if params.d <= params.ev_bound:
        raise CalibrationError(
            f"d={params.d} must exceed the expectation bound {params.ev_bound}"
        )
    if params.delta_cal <= 1.0:
        raise CalibrationError(
            f"the general form requires Delta > 1, got Delta={params.delta_cal}"
        )
    gap = params.d - params.ev_bound
    first = 2.0 * math.exp(-(gap ** 2) * params.delta_cal ** 2 / (2.0 * params.b2 / n))
    second = 2.0 * math.exp(-(n / 4.0) * (1.0 - params.delta_cal ** 2) ** 2)
    return 1.0 - first - second


def noise_norm_bound(sigma: float, n: int, x: float) -> tuple[float, float]:
    """``(sigma^2 (1 + 2x + 2x^2), 1 - exp(-n x^2))``: a high-probability cap
    on the squared n-scaled noise norm."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return sigma ** 2 * (1.0 + 2.0 * x + 2.0 * x ** 2), 1.0 - math.exp(-n * x ** 2)


def noise_norm_bound_factor(sigma: float, n: int, C: float) -> tuple[float, float]:
    """Same cap in multiplicative form: ``(sigma^2 C, 1 - exp(-(n/2)(C - sqrt(2C-1))))``."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if C < 1.0:
        raise ValueError(f"C must be at least 1, got {C}")
    return sigma ** 2 * C, 1.0 - math.exp(-(n / 2.0) * (C - math.sqrt(2.0 * C - 1.0)))
