"""Trial and sweep execution.

Each (mode, n, trial) cell draws everything from seeds derived from the
master seed and its labels, never from a shared generator, so cells can run
in any order or process and the collected records are sorted before use.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from threadpoolctl import threadpool_limits

from .. import __version__
from ..diagnostics import theorem1_c_value
from ..errors import GramSingular, TrialFailed
from ..estimator import fourier_gram_pair, ridge_solve, uniform_samples
from ..kernels import FourierKernel
from ..risks import (
    RiskRecord,
    binary_labels,
    excess_classification_risk,
    gaussian_observations,
    generate_target,
    relative_l2_error,
)
from ..spectra import BiLevelParams, bilevel_spectrum
from .config import SweepConfig
from .seeds import derive_seed

__all__ = ["MAX_RESAMPLES", "SummaryRow", "TrialFailure", "SweepResult", "run_trial", "run_sweep", "summarize", "resolve_workers"]

MAX_RESAMPLES = 3


@dataclass(frozen=True)
class SummaryRow:
    mode: str
    n: int
    count: int
    mean_rel_l2_error: float
    se_rel_l2_error: float
    mean_rel_excess_risk: float
    se_rel_excess_risk: float


@dataclass(frozen=True)
class TrialFailure:
    mode: str
    n: int
    trial: int
    reason: str


@dataclass
class SweepResult:
    config: SweepConfig
    records: List[RiskRecord]
    failures: List[TrialFailure] = field(default_factory=list)
    summary: Dict[Tuple[str, int], SummaryRow] = field(default_factory=dict)
    provenance: str = ""


def _cell_seed(cfg: SweepConfig, n: int, trial: int, attempt: int) -> int:
    # mode is deliberately absent: both noise models see the same samples and target
    return derive_seed(cfg.master_seed, (cfg.config_id, n, trial, attempt))


def run_trial(cfg: SweepConfig, n: int, trial_index: int, mode: str) -> RiskRecord:
    """One estimator fit and its two risks.

    A singular Gram system is redrawn under a fresh sub-seed at most
    ``MAX_RESAMPLES`` times; the record's ``resamples`` counts the redraws.
    """
    if mode not in cfg.modes:
        raise ValueError(f"mode {mode!r} is not enabled in config {cfg.config_id!r}")
    t0 = time.perf_counter()
    params = BiLevelParams(n, cfg.beta, cfg.r, cfg.q)
    spec = bilevel_spectrum(params)
    k = FourierKernel(params.p, params.d, spec.tail_value)
    last_err: Optional[GramSingular] = None
    for attempt in range(MAX_RESAMPLES + 1):
        seed = _cell_seed(cfg, n, trial_index, attempt)
        samples = uniform_samples(n, derive_seed(seed, ("samples",)))
        target = generate_target(params.p, derive_seed(seed, ("target",)))
        noise_seed = derive_seed(seed, ("noise", mode))
        if mode == "gaussian":
            obs = gaussian_observations(target, samples, cfg.sigma, noise_seed)
        else:
            obs = binary_labels(target, samples, noise_seed)
        K, K2 = fourier_gram_pair(k, samples)
        try:
            w = ridge_solve(K, obs.y, cfg.alpha, samples)
        except GramSingular as exc:
            last_err = exc
            continue
        rec = RiskRecord(
            config_id=cfg.config_id,
            mode=mode,
            n=n,
            trial=trial_index,
            seed=seed,
            alpha=cfg.alpha,
            rel_l2_error=relative_l2_error(w, k, target, K2),
            rel_excess_risk=excess_classification_risk(w, k, target, cfg.grid_size),
            resamples=attempt,
        )
        if cfg.diagnostics_enabled:
            rep = theorem1_c_value(k, params.p, samples, cfg.alpha, seed)
            rec.cond_RRstar = rep.condition
            rec.c_value = rep.c_value
        rec.wall_ms = 1e3 * (time.perf_counter() - t0)
        return rec
    raise TrialFailed(f"{cfg.config_id} {mode} n={n} trial={trial_index}: singular after {MAX_RESAMPLES} resamples ({last_err})")


def _run_cell(cfg: SweepConfig, cell):
    mode, n, trial = cell
    try:
        rec = run_trial(cfg, n, trial, mode)
    except Exception as exc:  # a broken cell must not sink the sweep
        return TrialFailure(mode, n, trial, f"{type(exc).__name__}: {exc}")
    if rec.wall_ms is not None and rec.wall_ms > 1e3 * cfg.cell_timeout_s:
        return TrialFailure(mode, n, trial, f"exceeded {cfg.cell_timeout_s:g} s wall budget")
    return rec


def _init_worker():
    threadpool_limits(limits=1)


def resolve_workers(workers: Optional[int] = None) -> int:
    """Explicit ``workers`` wins; otherwise ``INTERPLAB_THREADS``; otherwise 1."""
    if workers is None:
        env = os.environ.get("INTERPLAB_THREADS", "").strip()
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def _mean_se(values):
    m = len(values)
    mean = math.fsum(values) / m
    if m < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (m - 1)
    return mean, math.sqrt(var / m)


def summarize(records) -> Dict[Tuple[str, int], SummaryRow]:
    """Mean and standard error of both risks per (mode, n), in sorted order."""
    groups: Dict[Tuple[str, int], list] = {}
    for rec in sorted(records, key=lambda r: (r.mode, r.n, r.trial)):
        groups.setdefault((rec.mode, rec.n), []).append(rec)
    out = {}
    for key, recs in groups.items():
        l2 = _mean_se([r.rel_l2_error for r in recs])
        ex = _mean_se([r.rel_excess_risk for r in recs])
        out[key] = SummaryRow(key[0], key[1], len(recs), l2[0], l2[1], ex[0], ex[1])
    return out


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> SweepResult:
    cells = sorted((mode, n, t) for mode in cfg.modes for n in cfg.n_values for t in range(cfg.trials))
    workers = resolve_workers(workers)
    if workers == 1:
        with threadpool_limits(limits=1):
            outcomes = [_run_cell(cfg, c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker) as pool:
            outcomes = list(pool.map(_run_cell, [cfg] * len(cells), cells, chunksize=max(1, len(cells) // (8 * workers))))
    records = sorted((o for o in outcomes if isinstance(o, RiskRecord)), key=lambda r: (r.mode, r.n, r.trial))
    failures = sorted((o for o in outcomes if isinstance(o, TrialFailure)), key=lambda f: (f.mode, f.n, f.trial))
    provenance = f"interplab {__version__}; config sha256:{cfg.digest()}"
    return SweepResult(cfg, records, failures, summarize(records), provenance)
