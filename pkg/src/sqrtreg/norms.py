"""Penalty-norm family: values, dual norms, proximal operators, complements.

Supported penalties:

* ``L1Norm``           -- the l1 norm.
* ``GroupNorm``        -- sum over a group partition of sqrt(|G|) * ||b_G||_2.
* ``SortedL1Norm``     -- decreasing positive weights applied to decreasingly
                          sorted magnitudes.
* ``SparseGroupNorm``  -- l1_weight * ||b||_1 + group_weight * group norm.
* ``StructuredNorm``   -- cone-generated norms, ``min over a in the cone of
                          0.5 * sum(b_j^2 / a_j + a_j)``; box and wedge cones.

Every norm knows which index sets S it weakly decomposes over and hands out
its complement norm on the remaining coordinates via ``restrict``.  The
complement is again one of the classes above, so complement values, duals and
proximal maps need no separate code paths.

Ties between equal magnitudes are always broken by original index (stable
sorts), which keeps every operation deterministic.
"""

from __future__ import annotations

import abc
import math

import numpy as np

from .errors import DimensionError, DisallowedSetError

__all__ = [
    "Norm",
    "L1Norm",
    "GroupNorm",
    "SortedL1Norm",
    "SparseGroupNorm",
    "StructuredNorm",
    "ScaledNorm",
    "BoxCone",
    "WedgeCone",
    "ComplementNorm",
    "norm_value",
    "dual_norm",
    "prox",
    "complement_norm_value",
    "ell2_comparison_constant",
    "norm_from_config",
]


def _soft_threshold(v: np.ndarray, t) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _check_indices(S, p: int) -> tuple[int, ...]:
    S = tuple(sorted({int(i) for i in S}))
    if S and (S[0] < 0 or S[-1] >= p):
        raise DisallowedSetError(f"index set {S} is not contained in 0..{p - 1}")
    return S


class Norm(abc.ABC):
    """A penalty norm with the operations the solver and theory layers need."""

    @abc.abstractmethod
    def value(self, beta) -> float:
        """Norm value; nonnegative, zero exactly at zero."""

    @abc.abstractmethod
    def dual(self, z) -> float:
        """Dual norm ``max { <z, b> : value(b) <= 1 }``."""

    @abc.abstractmethod
    def prox(self, v, step: float) -> np.ndarray:
        """``argmin_b 0.5 * ||b - v||_2^2 + step * value(b)``."""

    @abc.abstractmethod
    def l2_bound(self) -> float:
        """A constant D with ``||b||_2 <= D * value(b)`` for all b."""

    def check_allowed(self, S, p: int) -> tuple[int, ...]:
        """Validate that S is an allowed set for weak decomposability."""
        return _check_indices(S, p)

    @abc.abstractmethod
    def restrict(self, S, p: int) -> "Norm":
        """Complement norm on the coordinates outside S (in increasing order)."""

    @abc.abstractmethod
    def to_config(self) -> dict:
        """JSON-serializable description (variant tag plus parameters)."""

    def value_many(self, B: np.ndarray) -> np.ndarray:
        """Row-wise norm values; vectorized where the subclass allows it."""
        return np.array([self.value(row) for row in np.asarray(B, dtype=float)])

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.to_config().items() if k != "variant")
        return f"{type(self).__name__}({params})"


class L1Norm(Norm):
    """The l1 norm; decomposes exactly over every index set."""

    def value(self, beta) -> float:
        return float(np.sum(np.abs(beta)))

    def value_many(self, B) -> np.ndarray:
        return np.sum(np.abs(B), axis=1)

    def dual(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return float(np.max(np.abs(z))) if z.size else 0.0

    def prox(self, v, step) -> np.ndarray:
        return _soft_threshold(np.asarray(v, dtype=float), step)

    def l2_bound(self) -> float:
        return 1.0

    def restrict(self, S, p) -> "L1Norm":
        self.check_allowed(S, p)
        return L1Norm()

    def to_config(self) -> dict:
        return {"variant": "l1"}


class GroupNorm(Norm):
    """Group norm ``sum_j sqrt(|G_j|) * ||b_{G_j}||_2`` over a partition."""

    def __init__(self, groups):
        groups = [tuple(sorted(int(i) for i in g)) for g in groups]
        if not groups or any(len(g) == 0 for g in groups):
            raise ValueError("groups must be a nonempty collection of nonempty index sets")
        flat = sorted(i for g in groups for i in g)
        p = len(flat)
        if flat != list(range(p)):
            raise ValueError(f"groups must partition 0..{p - 1}; got indices {flat}")
        self.groups = tuple(groups)
        self.p = p
        self._idx = [np.asarray(g, dtype=int) for g in self.groups]
        self._root_sizes = np.array([math.sqrt(len(g)) for g in self.groups])

    def _check_dim(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.p,):
            raise DimensionError(f"vector has shape {beta.shape}, expected ({self.p},)")
        return beta

    def value(self, beta) -> float:
        beta = self._check_dim(beta)
        return float(sum(w * np.linalg.norm(beta[g]) for g, w in zip(self._idx, self._root_sizes)))

    def dual(self, z) -> float:
        z = self._check_dim(z)
        return float(max(np.linalg.norm(z[g]) / w for g, w in zip(self._idx, self._root_sizes)))

    def prox(self, v, step) -> np.ndarray:
        v = self._check_dim(v)
        out = np.zeros_like(v)
        for g, w in zip(self._idx, self._root_sizes):
            block = v[g]
            nrm = np.linalg.norm(block)
            if nrm > step * w:
                out[g] = (1.0 - step * w / nrm) * block
        return out

    def l2_bound(self) -> float:
        return 1.0

    def check_allowed(self, S, p) -> tuple[int, ...]:
        S = super().check_allowed(S, p)
        if p != self.p:
            raise DimensionError(f"norm is defined on p={self.p}, got p={p}")
        sset = set(S)
        for g in self.groups:
            inside = sset.intersection(g)
            if inside and len(inside) != len(g):
                raise DisallowedSetError(
                    f"set splits group {g}; allowed sets must be unions of whole groups"
                )
        return S

    def restrict(self, S, p) -> "GroupNorm":
        S = self.check_allowed(S, p)
        keep = [i for i in range(p) if i not in set(S)]
        pos = {old: new for new, old in enumerate(keep)}
        remaining = [tuple(pos[i] for i in g) for g in self.groups if g[0] not in set(S)]
        return GroupNorm(remaining)

    def to_config(self) -> dict:
        return {"variant": "group", "groups": [list(g) for g in self.groups]}


class SortedL1Norm(Norm):
    """Sorted-l1 norm with a decreasing positive weight sequence."""

    def __init__(self, weights):
        w = np.array(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if np.any(np.diff(w) > 0):
            raise ValueError("weights must be nonincreasing")
        if w[-1] <= 0:
            raise ValueError("all weights must be strictly positive")
        w.flags.writeable = False
        self.weights = w
        self.p = w.size

    def _check_dim(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.p,):
            raise DimensionError(f"vector has shape {beta.shape}, expected ({self.p},)")
        return beta

    def value(self, beta) -> float:
        beta = self._check_dim(beta)
        mags = np.sort(np.abs(beta))[::-1]
        return float(self.weights @ mags)

    def value_many(self, B) -> np.ndarray:
        mags = -np.sort(-np.abs(np.asarray(B, dtype=float)), axis=1)
        return mags @ self.weights

    def dual(self, z) -> float:
        z = self._check_dim(z)
        mags = np.sort(np.abs(z))[::-1]
        ratios = np.cumsum(mags) / np.cumsum(self.weights)
        return float(np.max(ratios))

    def prox(self, v, step) -> np.ndarray:
        v = self._check_dim(v)
        return _prox_sorted_l1(v, step * self.weights)

    def l2_bound(self) -> float:
        return float(1.0 / self.weights[-1])

    def restrict(self, S, p) -> "SortedL1Norm":
        S = self.check_allowed(S, p)
        if p != self.p:
            raise DimensionError(f"norm is defined on p={self.p}, got p={p}")
        if len(S) == p:
            raise DisallowedSetError("complement of the full index set is empty")
        # the p - |S| smallest weights act on the complement coordinates
        return SortedL1Norm(self.weights[len(S):])

    def to_config(self) -> dict:
        return {"variant": "sorted-l1", "weights": self.weights.tolist()}


try:  # C-level pool-adjacent-violators; the Python stack below is the fallback
    from scipy.optimize import isotonic_regression as _isotonic_regression
except ImportError:  # pragma: no cover
    _isotonic_regression = None


def _pava_decreasing(d: np.ndarray) -> np.ndarray:
    """Nonincreasing isotonic regression of ``d`` (pool adjacent violators)."""
    if _isotonic_regression is not None:
        return _isotonic_regression(d, increasing=False).x
    sums: list[float] = []
    counts: list[int] = []
    for x in d:
        s, c = float(x), 1
        while sums and sums[-1] * c <= s * counts[-1]:  # previous mean <= new mean
            s += sums.pop()
            c += counts.pop()
        sums.append(s)
        counts.append(c)
    out = np.empty_like(d)
    start = 0
    for s, c in zip(sums, counts):
        out[start:start + c] = s / c
        start += c
    return out


def _prox_sorted_l1(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Proximal map of the sorted-l1 norm with per-position thresholds ``w``.

    Stack-based pool-adjacent-violators reduction: sort magnitudes, subtract
    the thresholds, average out increasing runs, clip at zero, then undo the
    sort and restore signs.  Exact in O(p log p).
    """
    signs = np.sign(v)
    mags = np.abs(v)
    order = np.argsort(-mags, kind="stable")
    solution_sorted = np.maximum(_pava_decreasing(mags[order] - w), 0.0)
    out = np.empty_like(solution_sorted)
    out[order] = solution_sorted
    return signs * out


class ScaledNorm(Norm):
    """A positive multiple of another norm (used for complement norms)."""

    def __init__(self, base: Norm, scale: float):
        if scale <= 0:
            raise ValueError(f"scale must be positive, got {scale}")
        self.base = base
        self.scale = float(scale)

    def value(self, beta) -> float:
        return self.scale * self.base.value(beta)

    def value_many(self, B) -> np.ndarray:
        return self.scale * self.base.value_many(B)

    def dual(self, z) -> float:
        return self.base.dual(z) / self.scale

    def prox(self, v, step) -> np.ndarray:
        return self.base.prox(v, step * self.scale)

    def l2_bound(self) -> float:
        return self.base.l2_bound() / self.scale

    def check_allowed(self, S, p) -> tuple[int, ...]:
        return self.base.check_allowed(S, p)

    def restrict(self, S, p) -> "ScaledNorm":
        return ScaledNorm(self.base.restrict(S, p), self.scale)

    def to_config(self) -> dict:
        return {"variant": "scaled", "scale": self.scale, "base": self.base.to_config()}


class SparseGroupNorm(Norm):
    """``l1_weight * ||b||_1 + group_weight * sum_j sqrt(|G_j|) ||b_{G_j}||_2``."""

    def __init__(self, l1_weight: float, group_weight: float, groups):
        if l1_weight < 0 or group_weight < 0 or l1_weight + group_weight == 0:
            raise ValueError("weights must be nonnegative and not both zero")
        self.l1_weight = float(l1_weight)
        self.group_weight = float(group_weight)
        self._group_norm = GroupNorm(groups)
        self.groups = self._group_norm.groups
        self.p = self._group_norm.p

    def value(self, beta) -> float:
        beta = np.asarray(beta, dtype=float)
        return self.l1_weight * float(np.sum(np.abs(beta))) + self.group_weight * self._group_norm.value(beta)

    def dual(self, z) -> float:
        z = np.asarray(z, dtype=float)
        lam, eta = self.l1_weight, self.group_weight
        if lam == 0:
            return self._group_norm.dual(z) / eta
        linf = float(np.max(np.abs(z))) if z.size else 0.0
        if eta == 0:
            return linf / lam
        hi = min(linf / lam, self._group_norm.dual(z) / eta)
        if hi == 0:
            return 0.0

        def feasible(mu: float) -> bool:
            s = _soft_threshold(z, lam * mu)
            return all(
                np.linalg.norm(s[g]) <= eta * mu * w + 1e-300
                for g, w in zip(self._group_norm._idx, self._group_norm._root_sizes)
            )

        lo = 0.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                hi = mid
            else:
                lo = mid
        return hi

    def prox(self, v, step) -> np.ndarray:
        # soft-threshold first, then group shrinkage: exact for this nesting
        shrunk = _soft_threshold(np.asarray(v, dtype=float), step * self.l1_weight)
        if self.group_weight == 0:
            return shrunk
        return self._group_norm.prox(shrunk, step * self.group_weight)

    def l2_bound(self) -> float:
        if self.l1_weight > 0:
            return 1.0 / self.l1_weight
        return 1.0 / self.group_weight  # group comparison constant, rescaled

    def check_allowed(self, S, p) -> tuple[int, ...]:
        S = _check_indices(S, p)
        if p != self.p:
            raise DimensionError(f"norm is defined on p={self.p}, got p={p}")
        if self.l1_weight == 0:
            raise DisallowedSetError(
                "complement norm degenerates when l1_weight is zero; use GroupNorm instead"
            )
        return S

    def restrict(self, S, p) -> ScaledNorm:
        self.check_allowed(S, p)
        return ScaledNorm(L1Norm(), self.l1_weight)

    def to_config(self) -> dict:
        return {
            "variant": "sparse-group",
            "l1_weight": self.l1_weight,
            "group_weight": self.group_weight,
            "groups": [list(g) for g in self.groups],
        }


# ---------------------------------------------------------------------------
# cone-generated (structured sparsity) norms
# ---------------------------------------------------------------------------


def _golden_min(f, lo: float, hi: float, iters: int = 100) -> float:
    """Golden-section minimizer of a unimodal scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


class BoxCone:
    """Conic hull of a coordinate box with positive bounds.

    The cone is ``{ t * a : t >= 0, lower <= a <= upper }``; taking the conic
    hull (rather than the bare box) is what makes the induced penalty
    absolutely homogeneous, hence a genuine norm.
    """

    variant = "box"

    def __init__(self, lower, upper):
        lower = np.array(lower, dtype=float)
        upper = np.array(upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if np.any(lower <= 0) or np.any(upper < lower):
            raise ValueError("box bounds need 0 < lower <= upper")
        lower.flags.writeable = False
        upper.flags.writeable = False
        self.lower = lower
        self.upper = upper
        self.dim = lower.size

    def scale_vector(self, beta_sq: np.ndarray) -> np.ndarray:
        """Minimizer of ``sum(beta_sq / c + c)`` over the cone.

        Reduces to a scalar search: for fixed overall scale t the best box
        point is ``clip(|beta| / t, lower, upper)`` coordinate-wise, and the
        resulting objective is convex in t, so golden section on log t is
        exact.
        """
        babs = np.sqrt(beta_sq)
        total = babs.sum()
        if total == 0.0:
            return np.zeros_like(babs)

        lower, upper = self.lower, self.upper

        def objective(log_t: float) -> float:
            t = math.exp(log_t)
            c = t * np.clip(babs / t, lower, upper)
            return float(np.sum(beta_sq / c) + c.sum())

        lo = math.log(total / upper.sum()) - 20.0
        hi = math.log(total / lower.sum()) + 20.0
        t_best = math.exp(_golden_min(objective, lo, hi))
        return t_best * np.clip(babs / t_best, lower, upper)

    def prox_scale_vector(self, v_abs: np.ndarray, s: float) -> np.ndarray:
        """Minimizer over the cone of ``sum(v^2 / (c + s) + c)`` (prox inner problem).

        Same reduction as ``scale_vector``: for fixed overall scale t the best
        box point is ``clip((|v| - s) / t, lower, upper)`` and the profile is
        convex in t.  The all-zero cone point is compared explicitly since the
        scale search cannot reach t = 0.
        """
        v_sq = v_abs * v_abs
        shifted = np.maximum(v_abs - s, 0.0)
        lower, upper = self.lower, self.upper
        zero_obj = float(np.sum(v_sq) / s)
        if shifted.sum() == 0.0:
            return np.zeros_like(v_abs)

        def objective(log_t: float) -> float:
            t = math.exp(log_t)
            c = t * np.clip(shifted / t, lower, upper)
            return float(np.sum(v_sq / (c + s)) + c.sum())

        lo = math.log(shifted.sum() / upper.sum()) - 20.0
        hi = math.log(shifted.sum() / lower.sum()) + 20.0
        log_t = _golden_min(objective, lo, hi)
        if objective(log_t) >= zero_obj:
            return np.zeros_like(v_abs)
        t = math.exp(log_t)
        return t * np.clip(shifted / t, lower, upper)

    def dual_value(self, z: np.ndarray) -> float:
        """Exact dual via the ratio program ``max_a sum(a z^2) / sum(a)`` over the box."""
        zsq = np.asarray(z, dtype=float) ** 2
        if zsq.shape != (self.dim,):
            raise DimensionError(f"vector has shape {zsq.shape}, expected ({self.dim},)")
        if not np.any(zsq > 0):
            return 0.0
        a = self.lower
        mu = float(a @ zsq / a.sum())
        for _ in range(200):
            a = np.where(zsq > mu, self.upper, self.lower)
            mu_new = float(a @ zsq / a.sum())
            if mu_new <= mu * (1 + 1e-15):
                break
            mu = mu_new
        return math.sqrt(mu_new)

    def l2_bound(self) -> float:
        return math.sqrt(self.upper.max() / self.lower.sum())

    def check_allowed(self, S, p):
        if p != self.dim:
            raise DimensionError(f"cone has dimension {self.dim}, got p={p}")
        S = _check_indices(S, p)
        # The decomposition condition requires zero-padded restrictions of cone
        # elements to stay in the cone.  Positive lower bounds rule that out
        # for every proper nonempty subset: the norm gap left for the
        # complement coordinates is quadratic near zero, below any norm.
        if 0 < len(S) < p:
            raise DisallowedSetError(
                "box cones with positive lower bounds decompose only over the "
                f"empty and the full index set; got {S}"
            )
        return S

    def restrict(self, S, p) -> "BoxCone":
        S = self.check_allowed(S, p)
        keep = np.array([i for i in range(p) if i not in set(S)], dtype=int)
        return BoxCone(self.lower[keep], self.upper[keep])

    def to_config(self) -> dict:
        return {"variant": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


class WedgeCone:
    """Cone of nonincreasing nonnegative sequences ``a_1 >= ... >= a_p >= 0``."""

    variant = "wedge"
    dim = None  # dimension-free

    def scale_vector(self, beta_sq: np.ndarray) -> np.ndarray:
        """Minimizer of ``sum(beta_sq / c + c)`` over the wedge.

        Separable convex objective under a chain constraint: pool adjacent
        violators is exact, with pooled block value sqrt(mean of beta_sq).
        The pooling pattern matches squared-loss isotonic regression because
        sqrt(mean) orders blocks exactly as the mean does.
        """
        return np.sqrt(_pava_decreasing(np.asarray(beta_sq, dtype=float)))

    def prox_scale_vector(self, v_abs: np.ndarray, s: float) -> np.ndarray:
        """Minimizer over the wedge of ``sum(v^2 / (c + s) + c)`` (prox inner problem).

        Separable convex under the chain constraint; the pooled block value is
        ``max(0, sqrt(block mean of v^2) - s)``, a nondecreasing transform of
        the block mean, so the squared-loss pooling pattern is reused.
        """
        pooled = _pava_decreasing(np.asarray(v_abs, dtype=float) ** 2)
        return np.maximum(np.sqrt(pooled) - s, 0.0)

    def dual_value(self, z: np.ndarray) -> float:
        zsq = np.asarray(z, dtype=float) ** 2
        if zsq.size == 0:
            return 0.0
        prefixes = np.cumsum(zsq) / np.arange(1, zsq.size + 1)
        return math.sqrt(float(np.max(prefixes)))

    def l2_bound(self) -> float:
        return 1.0

    def check_allowed(self, S, p):
        S = _check_indices(S, p)
        if S and list(S) != list(range(len(S))):
            raise DisallowedSetError(
                f"wedge norms decompose only over prefix sets 0..k-1; got {S}"
            )
        return S

    def restrict(self, S, p) -> "WedgeCone":
        self.check_allowed(S, p)
        return WedgeCone()

    def to_config(self) -> dict:
        return {"variant": "wedge"}


class StructuredNorm(Norm):
    """Norm generated by a convex cone: ``min_a 0.5 * sum(b^2 / a + a)``."""

    def __init__(self, cone):
        if not isinstance(cone, (BoxCone, WedgeCone)):
            raise ValueError(f"unsupported cone {cone!r}; expected BoxCone or WedgeCone")
        self.cone = cone

    def _check_dim(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        if self.cone.dim is not None and beta.shape != (self.cone.dim,):
            raise DimensionError(f"vector has shape {beta.shape}, expected ({self.cone.dim},)")
        return beta

    def value(self, beta) -> float:
        beta = self._check_dim(beta)
        beta_sq = beta * beta
        c = self.cone.scale_vector(beta_sq)
        mask = c > 0
        return 0.5 * float(np.sum(beta_sq[mask] / c[mask]) + c.sum())

    def dual(self, z) -> float:
        return self.cone.dual_value(self._check_dim(z))

    def prox(self, v, step) -> np.ndarray:
        """Exact prox via the cone-scale reduction.

        Minimizing jointly over the coefficients and the cone scales, the
        coefficient block has the closed form ``b = v c / (c + step)``; what
        remains is the cone's separable convex inner problem in c, which each
        cone solves exactly.
        """
        v = self._check_dim(v)
        if step <= 0:
            raise ValueError(f"step must be positive, got {step}")
        if not np.any(v):
            return np.zeros_like(v)
        c = self.cone.prox_scale_vector(np.abs(v), step)
        return v * c / (c + step)

    def l2_bound(self) -> float:
        return self.cone.l2_bound()

    def check_allowed(self, S, p) -> tuple[int, ...]:
        return self.cone.check_allowed(S, p)

    def restrict(self, S, p) -> "StructuredNorm":
        return StructuredNorm(self.cone.restrict(S, p))

    def to_config(self) -> dict:
        return {"variant": "structured", "cone": self.cone.to_config()}


# ---------------------------------------------------------------------------
# complements and module-level helpers
# ---------------------------------------------------------------------------


class ComplementNorm:
    """Complement norm of a parent penalty for an allowed set S.

    Acts on vectors indexed by the complement coordinates of S in increasing
    order.  Construction validates the allowed-set condition of the parent.
    """

    def __init__(self, parent: Norm, allowed_set, p: int):
        allowed_set = parent.check_allowed(allowed_set, p)
        self.parent = parent
        self.allowed_set = allowed_set
        self.p = int(p)
        self.complement_indices = tuple(i for i in range(p) if i not in set(allowed_set))
        # the complement of the full set lives on R^0; its norm is identically zero
        self.norm = parent.restrict(allowed_set, p) if self.complement_indices else None

    @property
    def r(self) -> int:
        return len(self.complement_indices)

    def _check(self, beta_sc) -> np.ndarray:
        beta_sc = np.asarray(beta_sc, dtype=float)
        if beta_sc.shape != (self.r,):
            raise DimensionError(
                f"complement vector has shape {beta_sc.shape}, expected ({self.r},)"
            )
        return beta_sc

    def value(self, beta_sc) -> float:
        beta_sc = self._check(beta_sc)
        return self.norm.value(beta_sc) if self.norm is not None else 0.0

    def dual(self, z_sc) -> float:
        z_sc = self._check(z_sc)
        return self.norm.dual(z_sc) if self.norm is not None else 0.0

    def __repr__(self):
        return f"ComplementNorm(parent={self.parent!r}, allowed_set={self.allowed_set}, p={self.p})"


def norm_value(spec: Norm, beta) -> float:
    return spec.value(beta)


def dual_norm(spec: Norm, z) -> float:
    return spec.dual(z)


def prox(spec: Norm, v, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    return spec.prox(v, step)


def complement_norm_value(cn: ComplementNorm, beta_sc) -> float:
    return cn.value(beta_sc)


def ell2_comparison_constant(spec: Norm) -> float:
    return spec.l2_bound()


def norm_from_config(config: dict) -> Norm:
    """Rebuild a norm from its JSON configuration (inverse of ``to_config``)."""
    variant = config.get("variant")
    if variant == "l1":
        return L1Norm()
    if variant == "group":
        return GroupNorm(config["groups"])
    if variant == "sorted-l1":
        return SortedL1Norm(config["weights"])
    if variant == "sparse-group":
        return SparseGroupNorm(config["l1_weight"], config["group_weight"], config["groups"])
    if variant == "scaled":
        return ScaledNorm(norm_from_config(config["base"]), config["scale"])
    if variant == "structured":
        cone_cfg = config["cone"]
        if cone_cfg["variant"] == "box":
            cone = BoxCone(cone_cfg["lower"], cone_cfg["upper"])
        elif cone_cfg["variant"] == "wedge":
            cone = WedgeCone()
        else:
            raise ValueError(f"unknown cone variant {cone_cfg['variant']!r}")
        return StructuredNorm(cone)
    raise ValueError(f"unknown norm variant {variant!r}")
