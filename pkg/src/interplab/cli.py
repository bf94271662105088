"""Command line entry point: ``interplab <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .diagnostics import condition_experiment, theorem1_c_value
from .errors import ConfigError, InterplabError, InvalidParams
from .estimator import uniform_samples
from .harness import derive_seed, emit_csv, emit_svg, load_config, run_sweep
from .kernels import FourierKernel
from .spectra import BiLevelParams
from .theory import (
    bias_bound,
    classification_upper_bound,
    distortion_ratio,
    distortion_s_star,
    distortion_threshold,
    refined_bias_bound,
    regime,
    survival_factor,
    variance_bound,
)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _fraction(text):
    from fractions import Fraction

    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="interplab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"interplab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("sweep", help="run a config sweep and write CSV + SVG")
    sp.add_argument("--config", required=True, type=Path)
    sp.add_argument("--out", required=True, type=Path, help="output directory")
    sp.add_argument("--trials", type=_positive_int, help="override the config's trial count")
    sp.add_argument("--threads", type=_positive_int, help="worker processes (default: $INTERPLAB_THREADS or 1)")

    sp = sub.add_parser("regime", help="asymptotic consistency verdicts")
    for name in ("--beta", "--r", "--q"):
        sp.add_argument(name, required=True, type=_fraction)

    sp = sub.add_parser("bounds", help="evaluate the risk bounds on one sampled instance")
    for name in ("--beta", "--r", "--q"):
        sp.add_argument(name, required=True, type=_fraction)
    sp.add_argument("--n", required=True, type=_positive_int)
    sp.add_argument("--alpha", type=float, default=1e-3)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--h-norm", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("condition", help="condition number of RR* against its lower bound")
    sp.add_argument("--n", required=True, type=_positive_int)
    sp.add_argument("--d", required=True, type=_positive_int)
    sp.add_argument("--tau", required=True, type=float)
    sp.add_argument("--trials", required=True, type=_positive_int)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("distortion", help="optimal scalar survival factor and its error")
    sp.add_argument("--lambda1", required=True, type=float)
    sp.add_argument("--lambdap", required=True, type=float)
    sp.add_argument("--b", required=True, type=float)

    sp = sub.add_parser("plot", help="render sweep CSV(s) to SVG")
    sp.add_argument("--in", dest="inputs", required=True, action="append", type=Path)
    sp.add_argument("--out", required=True, type=Path)
    return ap


def _cmd_sweep(a) -> int:
    if not a.config.is_file():
        raise UsageError(f"sweep: --config: no such file: {a.config}")
    try:
        cfg = load_config(a.config)
    except ConfigError as exc:
        raise UsageError(f"sweep: --config: {exc}")
    if a.trials:
        cfg = cfg.with_trials(a.trials)
    res = run_sweep(cfg, workers=a.threads)
    a.out.mkdir(parents=True, exist_ok=True)
    csv_path = emit_csv(res, a.out / f"{cfg.config_id}.csv")
    print(f"# {res.provenance}")
    print(f"{'mode':<9} {'n':>6} {'trials':>6} {'rel_l2_error':>22} {'rel_excess_risk':>22}")
    for row in res.summary.values():
        print(
            f"{row.mode:<9} {row.n:>6} {row.count:>6} "
            f"{row.mean_rel_l2_error:>12.4g} ± {row.se_rel_l2_error:<7.2g} "
            f"{row.mean_rel_excess_risk:>12.4g} ± {row.se_rel_excess_risk:<7.2g}"
        )
    for f in res.failures:
        print(f"failed: {f.mode} n={f.n} trial={f.trial}: {f.reason}", file=sys.stderr)
    print(f"wrote {csv_path}")
    if res.records:
        print(f"wrote {emit_svg(res, a.out / f'{cfg.config_id}.svg')}")
        return EXIT_OK
    print("every trial failed", file=sys.stderr)
    return EXIT_RUNTIME


def _cmd_regime(a) -> int:
    v = regime(a.beta, a.r, a.q)
    print(f"regression: {v.regression}")
    print(f"classification: {v.classification}")
    if not v.preconditions_met:
        print("note: verdicts need beta > 2 and r < 1")
    return EXIT_OK


def _fmt(x) -> str:
    return f"{x:.6g}"


def _cmd_bounds(a) -> int:
    try:
        params = BiLevelParams(a.n, a.beta, a.r, a.q)
    except InvalidParams as exc:
        raise UsageError(f"bounds: {exc}")
    if a.alpha < 0:
        raise UsageError("bounds: --alpha: must be >= 0")
    k = FourierKernel.from_params(params)
    samples = uniform_samples(a.n, derive_seed(a.seed, ("bounds", a.n)))
    rep = theorem1_c_value(k, params.p, samples, a.alpha, a.seed)
    br = rep.bracket
    lam1, lamp, lamp1 = 1.0, 1.0, params.gamma
    print(f"n={a.n} p={params.p} d={params.d} gamma={_fmt(params.gamma)} alpha={_fmt(a.alpha)} seed={a.seed}")
    print(f"lambda_min(RR*)={_fmt(rep.lambda_min_RRstar)} lambda_max(RR*)={_fmt(rep.lambda_max_RRstar)} cond={_fmt(rep.condition)}")
    print(f"alpha_L={_fmt(br.alpha_L)} alpha_U={_fmt(br.alpha_U)} alpha_bar={_fmt(br.alpha_bar)} alpha_tilde={_fmt(br.alpha_tilde)}")
    print(f"top deviation={_fmt(rep.deviation_CstarC)} c={_fmt(rep.c_value)} tr(R*R)={_fmt(rep.tr_RstarR_L2)}")
    var = variance_bound(br, a.n, rep.p_count, rep.tr_RstarR_L2, a.sigma ** 2)
    s = survival_factor(a.n, br.alpha_bar)
    print(f"variance bound: {_fmt(var)}")
    print(f"survival factor: {_fmt(s)}")
    if rep.c_value < 1:
        bias = bias_bound(br, a.n, lam1, lamp, lamp1, rep.c_value, a.h_norm)
        refined = refined_bias_bound(br, a.n, lam1, lamp, lamp1, rep.c_value, a.h_norm)
        print(f"bias bound: {_fmt(bias)}")
        print(f"refined bias bound: {_fmt(refined)}")
        print(f"classification bound: {_fmt(classification_upper_bound(refined + math.sqrt(var), s))}")
    else:
        print("bias bound: n/a (c >= 1 on this draw)")
        print("refined bias bound: n/a (c >= 1 on this draw)")
        print("classification bound: n/a (c >= 1 on this draw)")
    return EXIT_OK


def _cmd_condition(a) -> int:
    if a.n < 2 or not a.tau > 0:
        raise UsageError("condition: need --n >= 2 and --tau > 0")
    if not 0 <= a.p < a.d:
        raise UsageError("condition: --p: need 0 <= p < d")
    seeds = [derive_seed(a.seed, ("condition", a.n, a.d, t)) for t in range(a.trials)]
    exp = condition_experiment(a.n, a.d, a.tau, seeds, p=a.p)
    print(f"bound: {exp.bound:.6g}")
    print(f"median condition: {exp.median:.6g}")
    print(f"exceedance: {exp.exceedance:.4g} ({sum(c >= exp.bound for c in exp.conditions)}/{len(exp.conditions)})")
    print(f"guaranteed rate: {1 - math.exp(-a.tau):.4g}")
    return EXIT_OK


def _cmd_distortion(a) -> int:
    if not a.b > 0:
        raise UsageError("distortion: --b: must be positive")
    if not 0 < a.lambdap <= a.lambda1:
        raise UsageError("distortion: --lambdap: need 0 < lambdap <= lambda1")
    s, obj = distortion_s_star(a.lambda1, a.lambdap, a.b)
    thr = distortion_threshold(a.lambda1, a.b)
    print(f"s*: {s:.10g}")
    print(f"objective: {obj:.10g}")
    print(f"ratio: {distortion_ratio(a.lambda1, a.lambdap, a.b):.10g}")
    print(f"threshold: {thr:.10g} ({'two-eigenvalue' if a.lambdap >= thr else 'continuous-spectrum'} worst case)")
    return EXIT_OK


def _cmd_plot(a) -> int:
    for p in a.inputs:
        if not p.is_file():
            raise UsageError(f"plot: --in: no such file: {p}")
    print(f"wrote {emit_svg(a.inputs, a.out)}")
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "regime": _cmd_regime,
    "bounds": _cmd_bounds,
    "condition": _cmd_condition,
    "distortion": _cmd_distortion,
    "plot": _cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InterplabError, ArithmeticError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
