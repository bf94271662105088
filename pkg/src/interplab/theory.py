"""Closed-form bounds and asymptotic verdicts.

Every bound is returned with its hidden universal constant set to one, so the
values are meant for comparing shapes and trends, not absolute levels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DegenerateSurvival, InvalidBracket, InvalidEigen

__all__ = [
    "Verdict",
    "RegularizationBracket",
    "RegimeVerdict",
    "bracket",
    "bias_bound",
    "variance_bound",
    "refined_bias_bound",
    "survival_factor",
    "classification_upper_bound",
    "regime",
    "condition_lower_bound",
    "distortion_threshold",
    "distortion_s_star",
    "distortion_ratio",
]


class Verdict(enum.Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RegularizationBracket:
    """Bounds ``alpha_L I <= alpha I + RR* <= alpha_U I`` and their two means."""

    alpha_L: float
    alpha_U: float

    @property
    def alpha_bar(self) -> float:
        """Harmonic mean of the bracket ends."""
        return 2.0 * self.alpha_U * self.alpha_L / (self.alpha_U + self.alpha_L)

    @property
    def alpha_tilde(self) -> float:
        return 0.5 * (self.alpha_U + self.alpha_L)

    @property
    def ratio(self) -> float:
        return self.alpha_U / self.alpha_L


def bracket(alpha_L: float, alpha_U: float) -> RegularizationBracket:
    if not alpha_L > 0:
        raise InvalidBracket(f"alpha_L must be positive, got {alpha_L}")
    if alpha_U < alpha_L:
        raise InvalidBracket(f"alpha_U = {alpha_U} < alpha_L = {alpha_L}")
    return RegularizationBracket(float(alpha_L), float(alpha_U))


def _check_c(c):
    if not 0 <= c < 1:
        raise ValueError(f"c must lie in [0, 1), got {c}")


def bias_bound(br: RegularizationBracket, n, lambda_1, lambda_p, lambda_p1, c, h_norm) -> float:
    """Noise-free error bound for targets in the top eigenspace.

    ``min(sqrt(l1), abar / ((1-c) n sqrt(lp)), sqrt(abar/n) / (1-c))
    * (1 + sqrt(n l_{p+1} / abar)) * h_norm``
    """
    _check_c(c)
    abar = br.alpha_bar
    inv = 1.0 / (1.0 - c)
    core = min(
        math.sqrt(lambda_1),
        inv * abar / (n * math.sqrt(lambda_p)),
        inv * math.sqrt(abar / n),
    )
    return core * (1.0 + math.sqrt(n * lambda_p1 / abar)) * h_norm


def variance_bound(br: RegularizationBracket, n, p_count, tr_RstarR, sigma_sq) -> float:
    """``sigma^2 (aU/aL + 1)^2 (p/n + tr(R*R) / atilde^2)``."""
    return sigma_sq * (br.ratio + 1.0) ** 2 * (p_count / n + tr_RstarR / br.alpha_tilde ** 2)


def refined_bias_bound(br: RegularizationBracket, n, lambda_1, lambda_p, lambda_p1, c, h_norm) -> float:
    """Distance of the noise-free estimate from the idealized survival image of the target."""
    _check_c(c)
    abar = br.alpha_bar
    core = min(lambda_1, abar / (n * math.sqrt(lambda_p)), math.sqrt(abar / n))
    return (c + math.sqrt(n * lambda_p1 / abar)) * core * h_norm


def survival_factor(n, alpha_bar) -> float:
    """Fraction ``n / (abar + n)`` of a flat-top signal kept by the idealized estimator."""
    if n < 1 or alpha_bar < 0:
        raise ValueError("need n >= 1 and alpha_bar >= 0")
    return n / (alpha_bar + n)


def classification_upper_bound(residual_l2, s) -> float:
    if not s > 0:
        raise DegenerateSurvival(f"survival factor must be positive, got {s}")
    return residual_l2 / s


@dataclass(frozen=True)
class RegimeVerdict:
    regression: Verdict
    classification: Verdict
    preconditions_met: bool


def _strictly_less(a, b) -> bool:
    return a < b and not math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def regime(beta, r, q) -> RegimeVerdict:
    """Asymptotic consistency of the bi-level ensemble as n grows.

    Boundaries between cases are reported as ``Unknown``, as is everything when
    ``beta > 2`` and ``r < 1`` do not both hold.
    """
    ok = beta > 2 and r < 1
    if not ok:
        return RegimeVerdict(Verdict.UNKNOWN, Verdict.UNKNOWN, False)
    edge = 1.0 - r
    if _strictly_less(q, edge):
        return RegimeVerdict(Verdict.CONSISTENT, Verdict.CONSISTENT, True)
    if not _strictly_less(edge, q):
        return RegimeVerdict(Verdict.UNKNOWN, Verdict.UNKNOWN, True)
    cls = Verdict.UNKNOWN
    if _strictly_less(q, 1.5 * edge) and _strictly_less(2.0 * (r + q), beta):
        cls = Verdict.CONSISTENT
    return RegimeVerdict(Verdict.INCONSISTENT, cls, True)


def condition_lower_bound(n, d, tau) -> float:
    """``n^2 (n-1)^2 / (2 pi^2 d^2 tau^2)``: w.p. >= 1 - exp(-tau) the Fourier
    residual Gram condition number is at least this large."""
    if n < 2 or d < 1 or not tau > 0:
        raise ValueError("need n >= 2, d >= 1, tau > 0")
    n = float(n)
    return n * n * (n - 1) ** 2 / (2.0 * math.pi ** 2 * float(d) ** 2 * tau ** 2)


def distortion_threshold(lambda_1, b) -> float:
    """Eigenvalue maximizing the two-eigenvalue distortion; below it the pair (p, 1) is no longer worst."""
    return lambda_1 / (1.0 + math.sqrt(1.0 + lambda_1 / b)) ** 2


def _pair_s(lam, lambda_1, b):
    root = math.sqrt(lam * lambda_1)
    return (lam * lambda_1 + b * (lam + lambda_1 - root)) / ((b + lam) * (b + lambda_1))


def _pair_objective(lam, lambda_1, b):
    root = math.sqrt(lam * lambda_1)
    return b * root * (math.sqrt(lambda_1) - math.sqrt(lam)) / ((b + lambda_1) * (b + lam))


def distortion_s_star(lambda_1, lambda_p, b) -> Tuple[float, float]:
    """Best scalar ``s`` approximating the idealized survival operator, and the H->L2 error.

    When ``lambda_p`` is below :func:`distortion_threshold` the returned pair
    is the worst case over a continuous spectrum in ``[lambda_p, lambda_1]``.
    """
    if not 0 < lambda_p <= lambda_1:
        raise InvalidEigen(f"need 0 < lambda_p <= lambda_1, got {lambda_p}, {lambda_1}")
    if not b > 0:
        raise ValueError("b must be positive")
    lam_star = distortion_threshold(lambda_1, b)
    if lambda_p >= lam_star:
        return _pair_s(lambda_p, lambda_1, b), _pair_objective(lambda_p, lambda_1, b)
    obj = b * lambda_1 ** 1.5 / (2.0 * (b + lambda_1) * (b + math.sqrt(b * (b + lambda_1))))
    return _pair_s(lam_star, lambda_1, b), obj


def distortion_ratio(lambda_1, lambda_p, b) -> float:
    s, obj = distortion_s_star(lambda_1, lambda_p, b)
    return obj / s
