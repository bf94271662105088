"""Gram assembly, ridge / minimum-norm solves and exact L2 geometry.

The estimator is ``f(x) = sum_i z_i k(x, x_i)`` with ``z = (alpha I + K)^{-1} y``;
``alpha = 0`` is the minimum-Hilbert-norm interpolator. No jitter is ever added
to the diagonal: a failed factorization surfaces as :class:`GramSingular`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Optional

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .errors import GramSingular, UnsupportedTarget
from .kernels import FourierKernel, dirichlet_pair, dirichlet_sum, second_moment_kernel_eval

__all__ = [
    "SampleSet",
    "GramMatrix",
    "DualWeights",
    "uniform_samples",
    "gram_matrix",
    "fourier_gram_pair",
    "ridge_solve",
    "predict",
    "l2_distance_exact",
    "l2_distance_sq_exact",
    "hilbert_norm_sq",
    "MAX_N",
]

MAX_N = 4000
INTERP_RESIDUAL_RTOL = 1e-8
_PREDICT_CHUNK = 1 << 20  # kernel entries per block


@dataclass(frozen=True)
class SampleSet:
    """Sample locations on [0, 1)."""

    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.size

    def __len__(self):
        return self.x.size


def uniform_samples(n: int, seed=None) -> SampleSet:
    rng = np.random.default_rng(seed)
    return SampleSet(rng.random(n))


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    kernel_tag: str = ""

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DualWeights:
    z: np.ndarray
    alpha: float
    samples: SampleSet = field(repr=False)

    def scaled(self, c: float) -> "DualWeights":
        return DualWeights(c * self.z, self.alpha, self.samples)


def _kernel_tag(kernel) -> str:
    if isinstance(kernel, partial):
        return f"{kernel.func.__name__}({kernel.args[0]!r})"
    return repr(kernel)


def gram_matrix(kernel, samples: SampleSet, tag: Optional[str] = None) -> GramMatrix:
    """Gram matrix ``K_ij = kernel(x_i, x_j)``; the upper triangle is mirrored."""
    x = samples.x
    k = np.asarray(kernel(x[:, None], x[None, :]), dtype=float)
    return GramMatrix(_mirror(k), tag if tag is not None else _kernel_tag(kernel))


def _mirror(k: np.ndarray) -> np.ndarray:
    return np.triu(k) + np.triu(k, 1).T


def fourier_gram_pair(k: FourierKernel, samples: SampleSet):
    """Gram matrices of the kernel and of its squared-eigenvalue variant.

    Shares one evaluation of the two Dirichlet kernels; entries match
    :func:`gram_matrix` with ``kernel_eval`` / ``second_moment_kernel_eval``.
    """
    x = samples.x
    dp, dd = dirichlet_pair(k, x[:, None], x[None, :])
    g2 = k.gamma * k.gamma
    K = GramMatrix(_mirror((1 - k.gamma) * dp + k.gamma * dd), f"kernel_eval({k!r})")
    K2 = GramMatrix(_mirror((1 - g2) * dp + g2 * dd), f"second_moment_kernel_eval({k!r})")
    return K, K2


def ridge_solve(K: GramMatrix, y, alpha: float, samples: Optional[SampleSet] = None) -> DualWeights:
    """Solve ``(alpha I + K) z = y`` by Cholesky.

    Raises
    ------
    GramSingular
        If the factorization breaks down or the solve residual
        ``||(alpha I + K) z - y||`` exceeds ``1e-8 * ||y||``.
    """
    if alpha < 0:
        raise ValueError("negative regularization is not supported")
    y = np.asarray(y, dtype=float)
    a = K.entries + alpha * np.eye(K.n)
    chol, info = lapack.dpotrf(a, lower=1, clean=1)
    if info != 0:
        done = max(info - 1, 0)
        pivots = np.diag(chol)[:done] ** 2
        smallest = float(pivots.min()) if done else float(a[0, 0])
        raise GramSingular(
            f"Cholesky failed at column {info} (alpha={alpha}); smallest pivot {smallest:.3e}",
            smallest_pivot=smallest,
            alpha=alpha,
        )
    tmp = solve_triangular(chol, y, lower=True, check_finite=False)
    z = solve_triangular(chol, tmp, lower=True, trans="T", check_finite=False)
    if not np.all(np.isfinite(z)):
        raise GramSingular("non-finite dual weights", alpha=alpha)
    resid = np.linalg.norm(a @ z - y)
    if resid > INTERP_RESIDUAL_RTOL * np.linalg.norm(y):
        smallest = float(np.min(np.diag(chol)) ** 2)
        raise GramSingular(
            f"solve residual {resid:.3e} exceeds tolerance (alpha={alpha}); smallest pivot {smallest:.3e}",
            smallest_pivot=smallest,
            alpha=alpha,
        )
    return DualWeights(z, float(alpha), samples)


def predict(w: DualWeights, kernel, x):
    """Evaluate ``sum_i z_i kernel(x, x_i)`` at scalar or array ``x``.

    A :class:`FourierKernel` goes through :func:`dirichlet_sum`; any other
    callable is evaluated entrywise in blocks.
    """
    xs = w.samples.x
    xq = np.asarray(x, dtype=float)
    flat = xq.ravel()
    if isinstance(kernel, FourierKernel):
        out = (1 - kernel.gamma) * dirichlet_sum(kernel.p, flat, xs, w.z)
        out += kernel.gamma * dirichlet_sum(kernel.d, flat, xs, w.z)
        return out.reshape(xq.shape) if xq.ndim else float(out[0])
    out = np.empty(flat.size)
    step = max(1, _PREDICT_CHUNK // max(xs.size, 1))
    for start in range(0, flat.size, step):
        block = flat[start:start + step]
        out[start:start + step] = np.asarray(kernel(block[:, None], xs[None, :])) @ w.z
    return out.reshape(xq.shape) if xq.ndim else float(out[0])


def l2_distance_sq_exact(w: DualWeights, k: FourierKernel, target, k2: Optional[GramMatrix] = None) -> float:
    """Squared L2 distance ``z^T K2 z - 2 z^T f(x) + ||f||^2`` (unclamped).

    ``K2`` is the Gram matrix of the squared-eigenvalue kernel. Valid only for
    targets supported on the top frequencies, where the integral operator acts
    as the identity.
    """
    if target.p > k.p:
        raise UnsupportedTarget(f"target bandwidth {target.p} exceeds the top block p={k.p}")
    if k2 is None:
        k2 = gram_matrix(partial(second_moment_kernel_eval, k), w.samples)
    z = w.z
    t = target(w.samples.x)
    return float(z @ (k2.entries @ z) - 2.0 * (z @ t) + target.l2_norm_sq)


def l2_distance_exact(w: DualWeights, k: FourierKernel, target, k2: Optional[GramMatrix] = None) -> float:
    val = l2_distance_sq_exact(w, k, target, k2)
    if val < 0:
        scale = target.l2_norm_sq + 1.0
        if val < -1e-10 * scale:
            raise ArithmeticError(f"squared L2 distance {val:.3e} is negative beyond rounding")
        val = 0.0
    return float(np.sqrt(val))


def hilbert_norm_sq(w: DualWeights, K: GramMatrix) -> float:
    return float(w.z @ (K.entries @ w.z))
