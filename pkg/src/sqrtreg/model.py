"""Regression-problem containers and the n-scaled vector algebra.

All modules measure n-vectors with the root-mean-square norm
``norm_n(v) = sqrt(sum(v_j^2) / n)`` and the matching inner product
``inner_n(u, v) = <u, v> / n``; the conventions live here in one place.
Containers are immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .errors import DimensionError

__all__ = [
    "RegressionProblem",
    "GroundTruth",
    "norm_n",
    "inner_n",
    "residual",
    "prediction_error_l2",
]


def _frozen_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    arr.flags.writeable = False
    return arr


def norm_n(v) -> float:
    """Root-mean-square norm ``sqrt(sum(v_j^2) / len(v))``; zero for empty input."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    return float(np.linalg.norm(v) / np.sqrt(v.size))


def inner_n(u, v) -> float:
    """Inner product divided by the sample size, ``<u, v> / len(u)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionError(f"inner_n arguments differ in shape: {u.shape} vs {v.shape}")
    if u.size == 0:
        return 0.0
    return float(u @ v / u.size)


@dataclasses.dataclass(frozen=True)
class RegressionProblem:
    """Design matrix / response pair for ``Y = X beta + noise``.

    Parameters
    ----------
    X : (n, p) array
        Dense design matrix.
    Y : (n,) array
        Response vector.
    """

    X: np.ndarray
    Y: np.ndarray
    n: int = dataclasses.field(init=False)
    p: int = dataclasses.field(init=False)

    def __post_init__(self):
        X = _frozen_array(self.X, "X", ndim=2)
        Y = _frozen_array(self.Y, "Y", ndim=1)
        if Y.shape[0] != X.shape[0]:
            raise DimensionError(
                f"Y has length {Y.shape[0]} but X has {X.shape[0]} rows"
            )
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "n", int(X.shape[0]))
        object.__setattr__(self, "p", int(X.shape[1]))

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {"X": self.X.tolist(), "Y": self.Y.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "RegressionProblem":
        return cls(X=np.asarray(data["X"], dtype=float), Y=np.asarray(data["Y"], dtype=float))

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def from_json(cls, path) -> "RegressionProblem":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_csv(self, x_path, y_path) -> None:
        """Write the problem as a CSV pair: X as an n x p table, Y as one column."""
        np.savetxt(x_path, self.X, delimiter=",")
        np.savetxt(y_path, self.Y, delimiter=",")

    @classmethod
    def from_csv(cls, x_path, y_path) -> "RegressionProblem":
        X = np.loadtxt(x_path, delimiter=",", ndmin=2)
        Y = np.loadtxt(y_path, delimiter=",")
        return cls(X=X, Y=np.atleast_1d(Y))


@dataclasses.dataclass(frozen=True)
class GroundTruth:
    """Simulation-side truth: coefficient vector, noise level and realized noise.

    Fitting never reads this; it exists so simulations and the theoretical
    certificates can compare an estimate against the generating model.
    ``active_set`` always equals the support of ``beta0``.
    """

    beta0: np.ndarray
    sigma: float
    noise: np.ndarray
    active_set: tuple[int, ...]

    def __post_init__(self):
        beta0 = _frozen_array(self.beta0, "beta0", ndim=1)
        noise = _frozen_array(self.noise, "noise", ndim=1)
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        support = tuple(int(i) for i in np.flatnonzero(beta0))
        active = tuple(sorted(int(i) for i in self.active_set))
        if active != support:
            raise ValueError(
                f"active_set {active} does not match the support of beta0 {support}"
            )
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "active_set", active)

    def to_dict(self) -> dict:
        return {
            "beta0": self.beta0.tolist(),
            "sigma": self.sigma,
            "noise": self.noise.tolist(),
            "active_set": list(self.active_set),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GroundTruth":
        return cls(
            beta0=np.asarray(data["beta0"], dtype=float),
            sigma=float(data["sigma"]),
            noise=np.asarray(data["noise"], dtype=float),
            active_set=tuple(int(i) for i in data["active_set"]),
        )


def residual(problem: RegressionProblem, beta) -> np.ndarray:
    """Residual vector ``Y - X beta`` at an arbitrary coefficient vector."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (problem.p,):
        raise DimensionError(
            f"beta has shape {beta.shape}, expected ({problem.p},) to match X's columns"
        )
    return problem.Y - problem.X @ beta


def prediction_error_l2(problem: RegressionProblem, beta_hat, beta0) -> float:
    """Unscaled Euclidean prediction error ``||X (beta0 - beta_hat)||_2``.

    Deliberately not divided by sqrt(n): this is the benchmark-table metric.
    """
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    for name, b in (("beta_hat", beta_hat), ("beta0", beta0)):
        if b.shape != (problem.p,):
            raise DimensionError(
                f"{name} has shape {b.shape}, expected ({problem.p},) to match X's columns"
            )
    return float(np.linalg.norm(problem.X @ (beta0 - beta_hat)))
