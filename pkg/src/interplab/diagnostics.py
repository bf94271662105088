"""Empirical concentration quantities consumed by the deterministic bounds.

Everything uses dense symmetric/Hermitian eigendecompositions; matrices here
are at most a few thousand rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import EigFailure
from .estimator import SampleSet, gram_matrix, uniform_samples
from .kernels import (
    FourierKernel,
    IndepGaussianFeatures,
    indep_gaussian_residual_gram,
    residual_kernel_eval,
    top_feature_matrix,
)
from .spectra import BiLevelSpectrum
from .theory import bracket, condition_lower_bound

__all__ = [
    "ConcentrationReport",
    "ConditionExperiment",
    "residual_gram",
    "residual_gram_stats",
    "top_block_deviation",
    "trace_RstarR",
    "theorem1_c_value",
    "indep_residual_deviation",
    "condition_experiment",
    "MIN_EIG_FLOOR",
]

MIN_EIG_FLOOR = 1e-14


@dataclass(frozen=True)
class ConcentrationReport:
    lambda_min_RRstar: float
    lambda_max_RRstar: float
    condition: float
    tr_RstarR_L2: float
    c_value: float
    deviation_CstarC: float
    n: int
    p_count: int
    d: int
    seed: Optional[int] = None
    alpha: float = 0.0
    lambda_min_raw: float = float("nan")

    @property
    def alpha_L(self) -> float:
        return self.alpha + self.lambda_min_RRstar

    @property
    def alpha_U(self) -> float:
        return self.alpha + self.lambda_max_RRstar

    @property
    def bracket(self):
        return bracket(self.alpha_L, self.alpha_U)


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc


def residual_gram(k: FourierKernel, samples: SampleSet) -> np.ndarray:
    return gram_matrix(partial(residual_kernel_eval, k), samples).entries


def _extremes(ev: np.ndarray, trace: float):
    raw_min = float(ev[0])
    return max(raw_min, MIN_EIG_FLOOR * trace), float(ev[-1]), raw_min


def residual_gram_stats(k: FourierKernel, samples: SampleSet):
    """Extreme eigenvalues ``(lambda_min, lambda_max)`` of the residual Gram matrix RR*.

    ``lambda_min`` is floored at ``1e-14 * trace`` so condition numbers stay finite.
    """
    g = residual_gram(k, samples)
    lo, hi, _ = _extremes(_eigvalsh(g), float(np.trace(g)))
    return lo, hi


def top_block_deviation(p: int, samples: SampleSet) -> float:
    """``|| (1/n) V^H V - I ||`` for the (2p+1) unit-modulus top Fourier features."""
    v = top_feature_matrix(p, samples)
    n = v.shape[0]
    dev = v.conj().T @ v / n - np.eye(2 * p + 1)
    dev = 0.5 * (dev + dev.conj().T)
    return float(np.max(np.abs(_eigvalsh(dev))))


def trace_RstarR(k: Union[FourierKernel, IndepGaussianFeatures], samples: Optional[SampleSet] = None) -> float:
    """``tr_{L2}(R* R) = sum_i sum_{tail} lambda_l^2 |v_l(x_i)|^2``.

    Deterministic ``n * 2(d-p) gamma^2`` for Fourier features; for Gaussian
    features it is computed from the drawn feature matrix.
    """
    if isinstance(k, IndepGaussianFeatures):
        s = k.spectrum
        lam = np.full(s.tail_count, s.tail_value) if isinstance(s, BiLevelSpectrum) else np.asarray(s.values[s.top_count:])
        w = k.feature_matrix[:, k.p:]
        return float(np.sum(lam ** 2 * np.sum(w * w, axis=0)))
    n = 0 if samples is None else samples.n
    return n * 2.0 * (k.d - k.p) * k.gamma ** 2


def theorem1_c_value(k: FourierKernel, p: int, samples: SampleSet, alpha: float, seed: Optional[int] = None) -> ConcentrationReport:
    """Bracket of ``alpha I + RR*`` and the constant ``c`` entering the bias bound."""
    g = residual_gram(k, samples)
    lo, hi, raw = _extremes(_eigvalsh(g), float(np.trace(g)))
    dev = top_block_deviation(p, samples)
    a_lo, a_hi = alpha + lo, alpha + hi
    c = (a_hi - a_lo) / (a_hi + a_lo) + 2.0 * dev
    return ConcentrationReport(
        lambda_min_RRstar=lo,
        lambda_max_RRstar=hi,
        condition=hi / lo,
        tr_RstarR_L2=trace_RstarR(k, samples),
        c_value=c,
        deviation_CstarC=dev,
        n=samples.n,
        p_count=2 * p + 1,
        d=k.d,
        seed=seed,
        alpha=alpha,
        lambda_min_raw=raw,
    )


def indep_residual_deviation(f: IndepGaussianFeatures) -> float:
    """``||RR* - tr(T_tail) I|| / sqrt(n tr(T_tail^2))`` for Gaussian features."""
    g = indep_gaussian_residual_gram(f)
    s = f.spectrum
    lam = np.full(s.tail_count, s.tail_value) if isinstance(s, BiLevelSpectrum) else np.asarray(s.values[s.top_count:])
    dev = g - lam.sum() * np.eye(f.n)
    norm = float(np.max(np.abs(_eigvalsh(dev))))
    return norm / np.sqrt(f.n * np.dot(lam, lam))


@dataclass(frozen=True)
class ConditionExperiment:
    n: int
    d: int
    tau: float
    seeds: List[int]
    conditions: List[float]
    bound: float

    @property
    def exceedance(self) -> float:
        return float(np.mean([c >= self.bound for c in self.conditions]))

    @property
    def median(self) -> float:
        return float(np.median(self.conditions))


def condition_experiment(n: int, d: int, tau: float, seeds: Sequence[int], p: int = 1, gamma: float = 0.5) -> ConditionExperiment:
    """Condition numbers of RR* for uniform samples, one draw per seed.

    The condition number does not depend on ``gamma``; ``p`` only trims the
    lowest frequencies out of the residual kernel.
    """
    k = FourierKernel(p, d, gamma)
    conds = []
    for seed in sorted(seeds):
        lo, hi = residual_gram_stats(k, uniform_samples(n, seed))
        conds.append(hi / lo)
    return ConditionExperiment(n, d, tau, sorted(seeds), conds, condition_lower_bound(n, d, tau))
