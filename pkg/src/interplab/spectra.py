"""Eigenvalue ensembles for the kernel integral operator.

Two conventions are supported for the bi-level ensemble:

* ``SingleIndex`` -- eigenvalues indexed 1..d, the first p equal to one.
* ``FourierSymmetric`` -- Fourier frequencies -d..d, the 2p+1 central ones
  equal to one.

Bi-level spectra are kept in closed form (two values and two counts) since
d reaches ~1e9 in the sweeps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import InvalidParams

__all__ = [
    "Indexing",
    "BiLevelParams",
    "BiLevelSpectrum",
    "ExplicitSpectrum",
    "Spectrum",
    "bilevel_spectrum",
    "spectrum_traces",
    "robust_floor",
]


class Indexing(enum.Enum):
    SINGLE = "single"
    FOURIER = "fourier"


def robust_floor(x: float, rtol: float = 1e-12) -> int:
    """floor(x), snapping values within ``rtol`` (relative) of an integer onto it.

    ``729 ** (1/3)`` evaluates to 8.999999999999998 in double precision; the
    intended value is 9.
    """
    nearest = round(x)
    if abs(x - nearest) <= rtol * max(1.0, abs(x)):
        return int(nearest)
    return int(math.floor(x))


@dataclass(frozen=True)
class BiLevelParams:
    """Knobs of the bi-level ensemble: sample count and exponents (beta, r, q)."""

    n: int
    beta: float
    r: float
    q: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidParams(f"n must be a positive integer, got {self.n!r}")
        if not self.beta > 1:
            raise InvalidParams(f"beta must exceed 1, got {self.beta}")
        if not 0 < self.r < 1:
            raise InvalidParams(f"r must lie in (0, 1), got {self.r}")
        gap = self.beta - self.r
        # q = beta - r typed as decimals can land a rounding error below the boundary
        if not 0 < self.q < gap or math.isclose(self.q, gap, rel_tol=1e-12, abs_tol=1e-12):
            raise InvalidParams(
                f"q must lie in (0, beta - r) = (0, {gap}), got {self.q}"
            )
        if self.p < 1:
            raise InvalidParams(f"p = floor(n^r) = {self.p} < 1")
        if self.d < self.p + 1:
            raise InvalidParams(f"d = floor(n^beta) = {self.d} must exceed p = {self.p}")
        if not 0 < self.gamma < 1:
            raise InvalidParams(f"gamma = {self.gamma} outside (0, 1)")

    @property
    def p(self) -> int:
        return robust_floor(float(self.n) ** self.r)

    @property
    def d(self) -> int:
        return robust_floor(float(self.n) ** self.beta)

    @property
    def gamma(self) -> float:
        return float(self.n) ** (-(self.beta - self.r - self.q))


@dataclass(frozen=True)
class BiLevelSpectrum:
    top_value: float
    tail_value: float
    top_count: int
    tail_count: int

    def __post_init__(self):
        if not self.top_value >= self.tail_value > 0:
            raise InvalidParams("bi-level spectrum needs top_value >= tail_value > 0")
        if self.top_count < 1 or self.tail_count < 1:
            raise InvalidParams("bi-level spectrum needs top_count >= 1 and tail_count >= 1")

    @property
    def lambda_1(self) -> float:
        return self.top_value

    @property
    def lambda_p(self) -> float:
        return self.top_value

    @property
    def lambda_p1(self) -> float:
        return self.tail_value

    def __len__(self):
        return self.top_count + self.tail_count


@dataclass(frozen=True)
class ExplicitSpectrum:
    """A nonincreasing positive eigenvalue sequence split after ``top_count`` entries."""

    values: Tuple[float, ...]
    top_count: int

    def __init__(self, values: Sequence[float], top_count: int):
        vals = tuple(float(v) for v in values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "top_count", int(top_count))
        if not vals:
            raise InvalidParams("explicit spectrum is empty")
        if min(vals) <= 0:
            raise InvalidParams("eigenvalues must be strictly positive")
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise InvalidParams("eigenvalues must be nonincreasing")
        if not 0 <= self.top_count <= len(vals):
            raise InvalidParams(f"top_count {top_count} out of range for {len(vals)} values")

    @property
    def tail_count(self) -> int:
        return len(self.values) - self.top_count

    @property
    def lambda_1(self) -> float:
        return self.values[0]

    @property
    def lambda_p(self) -> float:
        return self.values[self.top_count - 1]

    @property
    def lambda_p1(self) -> float:
        return self.values[self.top_count] if self.tail_count else 0.0

    def __len__(self):
        return len(self.values)


Spectrum = Union[BiLevelSpectrum, ExplicitSpectrum]


def bilevel_spectrum(params: BiLevelParams, indexing: Indexing = Indexing.FOURIER) -> BiLevelSpectrum:
    """Closed-form bi-level spectrum for ``params`` under the given index convention."""
    p, d, gamma = params.p, params.d, params.gamma
    if indexing is Indexing.SINGLE:
        return BiLevelSpectrum(1.0, gamma, p, d - p)
    if indexing is Indexing.FOURIER:
        return BiLevelSpectrum(1.0, gamma, 2 * p + 1, 2 * (d - p))
    raise InvalidParams(f"unknown indexing {indexing!r}")


def spectrum_traces(s: Spectrum) -> Tuple[float, float]:
    """Return ``(sum of tail eigenvalues, sum of squared tail eigenvalues)``."""
    if isinstance(s, BiLevelSpectrum):
        return s.tail_count * s.tail_value, s.tail_count * s.tail_value ** 2
    tail = np.asarray(s.values[s.top_count:], dtype=float)
    return float(tail.sum()), float(np.dot(tail, tail))
