"""Targets, observation models and the two risk functionals.

Targets are real trigonometric polynomials of degree p, normalized so that
``max |eta*(x)| = 1`` on [0, 1]; that makes ``(1 + eta*(x)) / 2`` a valid
label probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ProbabilityOutOfRange, ZeroTarget
from .estimator import DualWeights, SampleSet, l2_distance_sq_exact, predict

__all__ = [
    "TargetFunction",
    "ObservationSet",
    "RiskRecord",
    "generate_target",
    "normalization_grid_size",
    "gaussian_observations",
    "binary_labels",
    "relative_l2_error",
    "excess_classification_risk",
    "excess_risk_from_values",
    "DEFAULT_RISK_GRID",
]

DEFAULT_RISK_GRID = 8192
PROB_TOL = 1e-9
_EVAL_CHUNK = 1 << 20


def normalization_grid_size(p: int) -> int:
    return max(4096, 32 * (2 * p + 1))


@dataclass(frozen=True)
class TargetFunction:
    """Real trigonometric polynomial ``sum_{|l| <= p} c_l exp(2j pi l x)``.

    ``coefficients[l + p]`` holds ``c_l``; conjugate symmetry ``c_{-l} =
    conj(c_l)`` is enforced at construction.
    """

    coefficients: np.ndarray
    normalization_grid_size: int = 0
    peak_location: Optional[float] = None

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).copy()
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficients must be a 1-d array of odd length 2p+1")
        if not np.allclose(c, np.conj(c[::-1]), rtol=0, atol=1e-14 * max(1.0, np.abs(c).max())):
            raise ValueError("coefficients are not conjugate symmetric")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def p(self) -> int:
        return (self.coefficients.size - 1) // 2

    @property
    def l2_norm_sq(self) -> float:
        """Parseval: ``||eta||_{L2}^2 = sum |c_l|^2``."""
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def evaluate_complex(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ell = np.arange(-self.p, self.p + 1)
        return np.exp(2j * np.pi * np.multiply.outer(x, ell)) @ self.coefficients

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        c = self.coefficients[self.p:]
        out = np.empty(flat.size)
        step = max(1, _EVAL_CHUNK // c.size)
        ell = np.arange(1, self.p + 1)
        for start in range(0, flat.size, step):
            blk = flat[start:start + step]
            acc = np.full(blk.size, c[0].real)
            if self.p:
                acc += 2.0 * (np.exp(2j * np.pi * np.outer(blk, ell)) @ c[1:]).real
            out[start:start + step] = acc
        return out.reshape(x.shape) if x.ndim else float(out[0])


def _refined_peak(f: TargetFunction, grid_size: int):
    """Grid maximum of |f| polished by a bounded scalar search around near-maximal grid peaks."""
    u = np.arange(grid_size) / grid_size
    vals = np.abs(f(u))
    top = vals.max()
    if f.p == 0:
        return top, 0.0
    is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)) & (vals >= 0.99 * top)
    h = 1.0 / grid_size
    best, best_x = top, float(u[np.argmax(vals)])
    for x0 in u[is_peak]:
        res = minimize_scalar(
            lambda s: -abs(f(s)), bounds=(x0 - h, x0 + h), method="bounded", options={"xatol": 1e-13}
        )
        if -res.fun > best:
            best, best_x = -res.fun, float(res.x % 1.0)
    return best, best_x


def generate_target(p: int, rng_seed=None) -> TargetFunction:
    """Random real trigonometric polynomial of degree ``p`` with ``max |eta| = 1``.

    ``c_0`` is standard normal, ``c_l`` for ``l >= 1`` has independent standard
    normal real and imaginary parts, and ``c_{-l} = conj(c_l)``. The peak of
    ``|eta|`` is found on a grid of ``max(4096, 32 (2p+1))`` points and polished
    by a local search so that it bounds ``|eta|`` everywhere, not just on the grid.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    rng = np.random.default_rng(rng_seed)
    c0 = rng.standard_normal()
    pos = rng.standard_normal(p) + 1j * rng.standard_normal(p)
    coeffs = np.concatenate([np.conj(pos[::-1]), [c0], pos])
    g = normalization_grid_size(p)
    raw = TargetFunction(coeffs, g)
    peak, where = _refined_peak(raw, g)
    return TargetFunction(coeffs / peak, g, where)


@dataclass(frozen=True)
class ObservationSet:
    samples: SampleSet
    y: np.ndarray
    model: str
    sigma: Optional[float] = None
    noise: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.model not in ("gaussian", "binary"):
            raise ValueError(f"unknown observation model {self.model!r}")


def gaussian_observations(target: TargetFunction, samples: SampleSet, sigma: float = 1.0, rng_seed=None) -> ObservationSet:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(rng_seed)
    xi = sigma * rng.standard_normal(samples.n)
    return ObservationSet(samples, target(samples.x) + xi, "gaussian", sigma, xi)


def binary_labels(target: TargetFunction, samples: SampleSet, rng_seed=None) -> ObservationSet:
    """Labels in {-1, +1} with ``P(y = +1 | x) = (1 + eta(x)) / 2``."""
    eta = target(samples.x)
    worst = np.max(np.abs(eta)) if eta.size else 0.0
    if worst > 1 + PROB_TOL:
        raise ProbabilityOutOfRange(f"|eta(x_i)| = {worst!r} exceeds 1")
    rng = np.random.default_rng(rng_seed)
    u = rng.random(samples.n)
    y = np.where(u < 0.5 * (1.0 + eta), 1.0, -1.0)
    return ObservationSet(samples, y, "binary")


def relative_l2_error(w: DualWeights, k, target: TargetFunction, k2=None) -> float:
    """``||eta - eta_hat||^2 / ||eta||^2`` computed in closed form."""
    norm_sq = target.l2_norm_sq
    if norm_sq == 0:
        raise ZeroTarget("target has zero L2 norm")
    dist_sq = l2_distance_sq_exact(w, k, target, k2)
    return max(dist_sq, 0.0) / norm_sq


def excess_risk_from_values(eta_hat, eta_star) -> float:
    """Relative excess classification risk from values on a common midpoint grid.

    ``sign(0)`` is taken as +1.
    """
    eta_hat = np.asarray(eta_hat, dtype=float)
    eta_star = np.asarray(eta_star, dtype=float)
    weight = np.abs(eta_star)
    total = weight.sum()
    if total == 0:
        raise ZeroTarget("target vanishes on the quadrature grid")
    flipped = (eta_hat >= 0) != (eta_star >= 0)
    return float(weight[flipped].sum() / total)


def excess_classification_risk(w: DualWeights, kernel, target: TargetFunction, grid_size: int = DEFAULT_RISK_GRID) -> float:
    if grid_size < 1024:
        raise ValueError("grid_size must be at least 1024")
    u = (np.arange(grid_size) + 0.5) / grid_size
    return excess_risk_from_values(predict(w, kernel, u), target(u))


@dataclass
class RiskRecord:
    config_id: str
    mode: str
    n: int
    trial: int
    seed: int
    alpha: float
    rel_l2_error: float
    rel_excess_risk: float
    cond_RRstar: Optional[float] = None
    c_value: Optional[float] = None
    resamples: int = 0
    wall_ms: Optional[float] = None
