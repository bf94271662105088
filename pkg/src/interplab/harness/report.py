"""CSV and SVG output for sweep results."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union
from xml.sax.saxutils import escape

from ..errors import EmptyResult
from ..risks import RiskRecord
from .runner import SweepResult

__all__ = ["CSV_HEADER", "emit_csv", "format_csv", "read_csv", "emit_svg", "render_svg"]

CSV_HEADER = (
    "config_id", "mode", "n", "trial", "seed", "alpha", "rel_l2_error",
    "rel_excess_risk", "cond_RRstar", "c_value", "resamples", "wall_ms",
)


def _g17(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def _row(rec: RiskRecord, with_wall: bool):
    return [
        rec.config_id, rec.mode, str(rec.n), str(rec.trial), str(rec.seed), _g17(rec.alpha),
        _g17(rec.rel_l2_error), _g17(rec.rel_excess_risk), _g17(rec.cond_RRstar), _g17(rec.c_value),
        str(rec.resamples), _g17(rec.wall_ms) if with_wall else "",
    ]


def format_csv(res: SweepResult) -> str:
    """CSV text; wall times are blank unless the config asks for them, keeping reruns byte-identical."""
    with_wall = getattr(res.config, "record_wall_time", False)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in sorted(res.records, key=lambda r: (r.mode, r.n, r.trial)):
        w.writerow(_row(rec, with_wall))
    return buf.getvalue()


def emit_csv(res: SweepResult, path) -> Path:
    path = Path(path)
    path.write_text(format_csv(res), encoding="utf-8", newline="")
    return path


def _opt_float(s: str):
    return float(s) if s != "" else None


def read_csv(path) -> List[RiskRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: not a sweep CSV (unexpected header)")
        out = []
        for row in reader:
            if not row:
                continue
            out.append(RiskRecord(
                config_id=row[0], mode=row[1], n=int(row[2]), trial=int(row[3]), seed=int(row[4]),
                alpha=float(row[5]), rel_l2_error=float(row[6]), rel_excess_risk=float(row[7]),
                cond_RRstar=_opt_float(row[8]), c_value=_opt_float(row[9]),
                resamples=int(row[10]), wall_ms=_opt_float(row[11]),
            ))
    return out


# --- SVG -------------------------------------------------------------------

_PANEL_W, _PANEL_H = 420, 320
_MARGIN = dict(left=70, right=20, top=40, bottom=55)
_LEGEND_H = 24
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
_PANELS = (
    ("rel_l2_error", ("gaussian", "binary"), "relative L2 error"),
    ("rel_excess_risk", ("binary", "gaussian"), "relative excess risk"),
)

Series = Dict[str, List[Tuple[float, float]]]


def _collect(records: Sequence[RiskRecord], field: str, mode_pref) -> Series:
    """Per-config mean of ``field`` versus n, using the first preferred mode present."""
    by_cfg: Dict[str, Dict[str, Dict[int, List[float]]]] = {}
    for r in records:
        by_cfg.setdefault(r.config_id, {}).setdefault(r.mode, {}).setdefault(r.n, []).append(getattr(r, field))
    out: Series = {}
    for cid in sorted(by_cfg):
        modes = by_cfg[cid]
        mode = next((m for m in mode_pref if m in modes), None)
        if mode is None:
            continue
        out[cid] = [(float(n), math.fsum(v) / len(v)) for n, v in sorted(modes[mode].items())]
    return out


def _log_range(vals):
    lo, hi = min(vals), max(vals)
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    return a, max(b, a + 1)


def _panel(series: Series, title: str, x0: float, colors: Dict[str, str]) -> List[str]:
    pts = [(n, v) for s in series.values() for n, v in s]
    positive = [v for _, v in pts if v > 0]
    floor = min(positive) / 10 if positive else 1e-6
    xa, xb = _log_range([n for n, _ in pts])
    ya, yb = _log_range([max(v, floor) for _, v in pts])
    left, top = x0 + _MARGIN["left"], _MARGIN["top"]
    w = _PANEL_W - _MARGIN["left"] - _MARGIN["right"]
    h = _PANEL_H - _MARGIN["top"] - _MARGIN["bottom"]

    def sx(n):
        return left + w * (math.log10(n) - xa) / (xb - xa)

    def sy(v):
        return top + h * (1 - (math.log10(max(v, floor)) - ya) / (yb - ya))

    el = [
        '<g class="panel">',
        f'<rect x="{left:.1f}" y="{top:.1f}" width="{w:.1f}" height="{h:.1f}" fill="none" stroke="#333"/>',
        f'<text x="{left + w / 2:.1f}" y="{top - 12:.1f}" text-anchor="middle" font-size="14">{escape(title)} vs n</text>',
        f'<text x="{left + w / 2:.1f}" y="{top + h + 42:.1f}" text-anchor="middle" font-size="12">n</text>',
        f'<text x="{x0 + 16:.1f}" y="{top + h / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 {x0 + 16:.1f} {top + h / 2:.1f})">{escape(title)}</text>',
    ]
    for e in range(xa, xb + 1):
        x = sx(10.0 ** e)
        el.append(f'<line x1="{x:.1f}" y1="{top + h:.1f}" x2="{x:.1f}" y2="{top + h + 5:.1f}" stroke="#333"/>')
        el.append(f'<text x="{x:.1f}" y="{top + h + 20:.1f}" text-anchor="middle" font-size="11">1e{e}</text>')
    for e in range(ya, yb + 1):
        y = sy(10.0 ** e)
        el.append(f'<line x1="{left - 5:.1f}" y1="{y:.1f}" x2="{left:.1f}" y2="{y:.1f}" stroke="#333"/>')
        el.append(f'<text x="{left - 8:.1f}" y="{y + 4:.1f}" text-anchor="end" font-size="11">1e{e}</text>')
    for cid, s in series.items():
        c = colors[cid]
        coords = " ".join(f"{sx(n):.2f},{sy(v):.2f}" for n, v in s)
        el.append(f'<polyline class="series" data-config="{escape(cid)}" points="{coords}" fill="none" stroke="{c}" stroke-width="1.6"/>')
        for n, v in s:
            el.append(f'<circle class="marker" cx="{sx(n):.2f}" cy="{sy(v):.2f}" r="3" fill="{c}"/>')
    el.append("</g>")
    return el


def render_svg(records: Sequence[RiskRecord]) -> str:
    panels = [(_collect(records, f, pref), title) for f, pref, title in _PANELS]
    if not any(series for series, _ in panels):
        raise EmptyResult("no summary points to plot")
    ids = sorted({cid for series, _ in panels for cid in series})
    colors = {cid: _COLORS[i % len(_COLORS)] for i, cid in enumerate(ids)}
    width = 2 * _PANEL_W
    height = _PANEL_H + _LEGEND_H * len(ids) + 10
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, (series, title) in enumerate(panels):
        if series:
            out.extend(_panel(series, title, i * _PANEL_W, colors))
    out.append('<g class="legend">')
    for i, cid in enumerate(ids):
        y = _PANEL_H + 10 + i * _LEGEND_H
        out.append(f'<line x1="80" y1="{y:.1f}" x2="110" y2="{y:.1f}" stroke="{colors[cid]}" stroke-width="2"/>')
        out.append(f'<text x="118" y="{y + 4:.1f}" font-size="12">{escape(cid)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(source: Union[SweepResult, str, Path, Iterable], path) -> Path:
    """Write the two-panel log-log plot.

    ``source`` may be a :class:`SweepResult`, a CSV path, or an iterable of
    either (all records are merged, one polyline per ``config_id``).
    """
    path = Path(path)
    path.write_text(render_svg(_gather(source)), encoding="utf-8")
    return path


def _gather(source) -> List[RiskRecord]:
    if isinstance(source, SweepResult):
        return list(source.records)
    if isinstance(source, (str, Path)):
        return read_csv(source)
    recs: List[RiskRecord] = []
    for item in source:
        recs.extend(_gather(item))
    return recs
