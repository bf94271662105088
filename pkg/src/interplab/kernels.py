"""Kernels and feature maps.

The bi-level Fourier kernel on [0, 1) is a weighted sum of two Dirichlet
kernels,

    k(x, y) = (1 - gamma) D_p(x - y) + gamma D_d(x - y),
    D_m(t)  = sin((2m + 1) pi t) / sin(pi t),

which is what the sum over frequencies -d..d with eigenvalue 1 on |l| <= p and
gamma elsewhere collapses to. Everything here is real; complex numbers only
show up in :func:`top_feature_matrix`.

The independent-Gaussian ensemble replaces Fourier features by i.i.d. N(0, 1)
draws, which is the setting where residual Gram matrices concentrate with
d ~ n rather than d ~ n^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, InvalidParams
from .spectra import BiLevelSpectrum, ExplicitSpectrum, Spectrum

__all__ = [
    "FourierKernel",
    "IndepGaussianFeatures",
    "dirichlet_sinc",
    "dirichlet_sum",
    "scaled_phase",
    "kernel_eval",
    "residual_kernel_eval",
    "second_moment_kernel_eval",
    "dirichlet_pair",
    "top_feature_matrix",
    "indep_gaussian_features",
    "indep_gaussian_residual_gram",
    "indep_gaussian_top_deviation",
    "MAX_GAUSSIAN_FEATURES",
]

MAX_GAUSSIAN_FEATURES = 200_000

# t is split into pieces on 2**-20 and 2**-41 lattices plus a remainder below
# 2**-42; the first two products with (2m+1) < 2**33 are exact, so the phase is
# reduced mod 2 with an error of order 2**-42 * ulp.
_SPLIT_HI = 2.0 ** 20
_SPLIT_MID = 2.0 ** 41
_SERIES_CUTOFF = 1e-4


def _reduce_mod2(a):
    return a - 2.0 * np.round(0.5 * a)


def scaled_phase(big_n: int, t):
    """``big_n * t`` reduced into [-1, 1] modulo 2, accurate for ``|t| <= 1``."""
    t = np.asarray(t, dtype=float)
    t_hi = np.round(t * _SPLIT_HI) / _SPLIT_HI
    t_rest = t - t_hi
    t_mid = np.round(t_rest * _SPLIT_MID) / _SPLIT_MID
    t_lo = t_rest - t_mid
    return _reduce_mod2(_reduce_mod2(_reduce_mod2(big_n * t_hi) + _reduce_mod2(big_n * t_mid)) + big_n * t_lo)


def dirichlet_sinc(m: int, t):
    """Period-1 Dirichlet kernel ``sin((2m+1) pi t) / sin(pi t)``.

    Vectorized over ``t``. The removable singularities at integer ``t`` are
    handled with a second-order series, and the numerator phase is reduced
    exactly so that ``m`` up to ~4e9 keeps full double precision.
    """
    if m < 0:
        raise InvalidParams(f"m must be nonnegative, got {m}")
    big_n = 2 * int(m) + 1
    if big_n >= 2 ** 33:
        raise InvalidParams(f"m = {m} too large for exact phase reduction")
    t = np.asarray(t, dtype=float)
    t = t - np.round(t)
    phase = scaled_phase(big_n, t)
    pt = np.pi * t
    small = np.abs(big_n * pt) < _SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sin(np.pi * phase) / np.sin(pt)
    series = big_n * (1.0 - (big_n * big_n - 1.0) * pt * pt / 6.0)
    out = np.where(small, series, ratio)
    return out if out.ndim else float(out)


def dirichlet_sum(m: int, u, x, z, chunk: int = 1 << 20) -> np.ndarray:
    """``sum_i z_i D_m(u_j - x_i)`` for every query point ``u_j``.

    Uses the addition formulas for sine so each kernel entry costs a few
    multiplies; entries with ``|sin(pi (u - x))| < 1e-3`` are recomputed with
    :func:`dirichlet_sinc` to avoid cancellation near coincident points.
    """
    u = np.asarray(u, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    z = np.asarray(z, dtype=float)
    big_n = 2 * int(m) + 1
    pu, px = np.pi * scaled_phase(big_n, u), np.pi * scaled_phase(big_n, x)
    nsu, ncu, nsx, ncx = np.sin(pu), np.cos(pu), np.sin(px), np.cos(px)
    dsu, dcu = np.sin(np.pi * u), np.cos(np.pi * u)
    dsx, dcx = np.sin(np.pi * x), np.cos(np.pi * x)
    out = np.empty(u.size)
    step = max(1, chunk // max(x.size, 1))
    for a in range(0, u.size, step):
        b = min(a + step, u.size)
        den = np.multiply.outer(dsu[a:b], dcx)
        den -= np.multiply.outer(dcu[a:b], dsx)
        num = np.multiply.outer(nsu[a:b], ncx)
        num -= np.multiply.outer(ncu[a:b], nsx)
        close = np.abs(den) < 1e-3
        den[close] = 1.0
        num /= den
        if close.any():
            rows, cols = np.nonzero(close)
            num[rows, cols] = dirichlet_sinc(m, u[a:b][rows] - x[cols])
        out[a:b] = num @ z
    return out


@dataclass(frozen=True)
class FourierKernel:
    """Bi-level Fourier kernel with top half-bandwidth ``p`` and full half-bandwidth ``d``."""

    p: int
    d: int
    gamma: float

    def __post_init__(self):
        if not 0 <= self.p < self.d:
            raise InvalidParams(f"need 0 <= p < d, got p={self.p}, d={self.d}")
        if not 0 < self.gamma <= 1:
            raise InvalidParams(f"gamma must lie in (0, 1], got {self.gamma}")

    @classmethod
    def from_params(cls, params) -> "FourierKernel":
        return cls(params.p, params.d, params.gamma)

    @property
    def diagonal(self) -> float:
        return (1 - self.gamma) * (2 * self.p + 1) + self.gamma * (2 * self.d + 1)

    def __call__(self, x, y):
        return kernel_eval(self, x, y)


def dirichlet_pair(k: FourierKernel, x, y):
    """Return ``(D_p(x - y), D_d(x - y))`` with broadcasting."""
    t = np.subtract(x, y)
    return dirichlet_sinc(k.p, t), dirichlet_sinc(k.d, t)


def kernel_eval(k: FourierKernel, x, y):
    dp, dd = dirichlet_pair(k, x, y)
    return (1 - k.gamma) * dp + k.gamma * dd


def residual_kernel_eval(k: FourierKernel, x, y):
    """Kernel restricted to the tail frequencies p < |l| <= d."""
    dp, dd = dirichlet_pair(k, x, y)
    return k.gamma * (dd - dp)


def second_moment_kernel_eval(k: FourierKernel, x, y):
    """Kernel with every eigenvalue squared; gives L2 inner products of kernel sections."""
    dp, dd = dirichlet_pair(k, x, y)
    g2 = k.gamma * k.gamma
    return (1 - g2) * dp + g2 * dd


def top_feature_matrix(p: int, x) -> np.ndarray:
    """n x (2p+1) matrix with entries exp(2j pi l x_i), columns l = -p..p."""
    x = np.asarray(getattr(x, "x", x), dtype=float)
    ell = np.arange(-p, p + 1)
    return np.exp(2j * np.pi * np.outer(x, ell))


@dataclass(frozen=True)
class IndepGaussianFeatures:
    p: int
    d: int
    spectrum: Spectrum
    feature_matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.feature_matrix.shape[0]


def indep_gaussian_features(
    n: int,
    p: int,
    d: int,
    spectrum: Optional[Spectrum] = None,
    seed: Union[int, np.random.Generator, None] = None,
) -> IndepGaussianFeatures:
    """Draw an n x d matrix of i.i.d. standard normal features.

    If ``spectrum`` is omitted a flat bi-level spectrum (1 on the top p
    features, 1 on the tail) is used.
    """
    if not 0 <= p < d:
        raise InvalidParams(f"need 0 <= p < d, got p={p}, d={d}")
    if d > MAX_GAUSSIAN_FEATURES:
        raise InvalidParams(f"d = {d} exceeds the cap of {MAX_GAUSSIAN_FEATURES}")
    if spectrum is None:
        spectrum = BiLevelSpectrum(1.0, 1.0, p, d - p) if p else ExplicitSpectrum([1.0] * d, 0)
    rng = np.random.default_rng(seed)
    feats = rng.standard_normal((n, d))
    return IndepGaussianFeatures(p, d, spectrum, feats)


def _tail_weights(f: IndepGaussianFeatures) -> np.ndarray:
    s = f.spectrum
    if s.tail_count != f.d - f.p:
        raise DimensionMismatch(f"spectrum tail has {s.tail_count} entries, expected d - p = {f.d - f.p}")
    if f.feature_matrix.shape[1] != f.d:
        raise DimensionMismatch(f"feature matrix has {f.feature_matrix.shape[1]} columns, expected {f.d}")
    if isinstance(s, BiLevelSpectrum):
        return np.full(s.tail_count, s.tail_value)
    return np.asarray(s.values[s.top_count:], dtype=float)


def indep_gaussian_residual_gram(f: IndepGaussianFeatures) -> np.ndarray:
    """RR* = sum over tail features of lambda_l w_l w_l^T."""
    lam = _tail_weights(f)
    w = f.feature_matrix[:, f.p:]
    g = (w * lam) @ w.T
    return 0.5 * (g + g.T)


def indep_gaussian_top_deviation(f: IndepGaussianFeatures) -> float:
    """Spectral norm of (1/n) C^T C - I for the top-p Gaussian features."""
    if f.p == 0:
        return 0.0
    c = f.feature_matrix[:, : f.p]
    dev = c.T @ c / f.n - np.eye(f.p)
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (dev + dev.T)))))
