"""Report files: CSV tables with fixed schemas and self-contained SVG charts.

All writes are atomic (temp file in the target directory, then rename) so a
failed run never leaves a truncated table behind.  Floats are serialized with
``repr``, the shortest exact round-trip form, which also makes outputs
byte-reproducible across runs and thread counts.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from pathlib import Path
from xml.sax.saxutils import escape

from .adaptive import OptimizationReport
from .designs import PointBased, ResponseDesign
from .harness import ErrorReport, ScalogramRow

__all__ = [
    "atomic_write_text",
    "write_report",
    "write_scalogram",
    "write_optimization_report",
]


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8", newline="")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _design_cols(design: ResponseDesign) -> tuple[str, str, int]:
    if isinstance(design, PointBased):
        return "points", "", design.n_points
    return "partition", design.protocol, design.k_per_side


_PALETTE = (
    "#1b6ca8", "#d1495b", "#46953c", "#8c5383", "#e0882f",
    "#3fa7a3", "#70584d", "#9aa71f", "#5560c8", "#b05e2a",
)


def _svg_chart(title: str, x_label: str, y_label: str, series,
               width: int = 720, height: int = 440) -> str:
    """Line chart with one polyline per series; no external assets.

    ``series`` is a list of (name, xs, ys); non-finite y values are dropped
    from the polyline but the series keeps its legend entry.
    """
    left, right, top, bottom = 64.0, 188.0, 40.0, 52.0
    plot_w = width - left - right
    plot_h = height - top - bottom
    finite = [
        (x, y)
        for _, xs, ys in series
        for x, y in zip(xs, ys)
        if math.isfinite(float(y))
    ]
    x_min = min((x for x, _ in finite), default=0.0)
    x_max = max((x for x, _ in finite), default=1.0)
    if x_max <= x_min:
        x_min, x_max = x_min - 0.5, x_min + 0.5
    y_max = max((y for _, y in finite), default=1.0)
    y_max = y_max * 1.05 if y_max > 0 else 1.0

    def px(x: float) -> float:
        return left + (x - x_min) / (x_max - x_min) * plot_w

    def py(y: float) -> float:
        return top + plot_h - y / y_max * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="22" font-size="15">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" '
        f'text-anchor="middle">{escape(x_label)}</text>',
        f'<text x="16" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + plot_h / 2:.1f})">{escape(y_label)}</text>',
    ]
    for i in range(5):
        xv = x_min + (x_max - x_min) * i / 4
        yv = y_max * i / 4
        parts.append(
            f'<line x1="{px(xv):.1f}" y1="{top + plot_h}" x2="{px(xv):.1f}" '
            f'y2="{top + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px(xv):.1f}" y="{top + plot_h + 18}" '
            f'text-anchor="middle">{xv:g}</text>'
        )
        parts.append(
            f'<line x1="{left - 5}" y1="{py(yv):.1f}" x2="{left}" '
            f'y2="{py(yv):.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{py(yv) + 4:.1f}" '
            f'text-anchor="end">{yv:.3g}</text>'
        )
    for i, (name, xs, ys) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(
            f"{px(float(x)):.2f},{py(float(y)):.2f}"
            for x, y in zip(xs, ys)
            if math.isfinite(float(y))
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = top + 14 * i
        parts.append(
            f'<line x1="{left + plot_w + 10}" y1="{ly:.1f}" '
            f'x2="{left + plot_w + 28}" y2="{ly:.1f}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{left + plot_w + 33}" y="{ly + 4:.1f}">{escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_report(report: ErrorReport, directory) -> list[Path]:
    """Write the error-report tables and one chart per metric family.

    Files: errors_by_design.csv, errors_by_unit.csv, curves.csv, and
    curves_pi.svg / curves_erp.svg when there is at least one series.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    design_rows = []
    unit_rows = []
    curve_rows = []
    for res in report.results:
        kind, protocol, size = _design_cols(res.design)
        legend = res.legend.name
        design_rows.append((legend, kind, protocol, size, res.overall_error, res.stderr))
        for r in res.per_unit:
            unit_rows.append((r.unit_row, r.unit_col, r.pi, r.erp,
                              legend, kind, size, r.error_rate))
        for metric, curve in (("pi", res.curve_by_pi), ("erp", res.curve_by_erp)):
            for center, mean, count in zip(curve.bin_centers, curve.mean_error,
                                           curve.counts):
                curve_rows.append((metric, float(center), float(mean),
                                   int(count), legend, kind, size))

    written.append(atomic_write_text(
        directory / "errors_by_design.csv",
        _csv_text(("legend", "design", "protocol", "n_or_k",
                   "overall_error", "stderr"), design_rows)))
    written.append(atomic_write_text(
        directory / "errors_by_unit.csv",
        _csv_text(("unit_row", "unit_col", "pi", "erp",
                   "legend", "design", "n_or_k", "error_rate"), unit_rows)))
    written.append(atomic_write_text(
        directory / "curves.csv",
        _csv_text(("metric", "bin_center", "mean_error", "count",
                   "legend", "design", "n_or_k"), curve_rows)))

    for metric, pick, x_label in (
        ("pi", lambda r: r.curve_by_pi, "unit purity"),
        ("erp", lambda r: r.curve_by_erp, "equivalent reference probability"),
    ):
        series = [
            (f"{res.legend.name} {res.design.name}",
             pick(res).bin_centers, pick(res).mean_error)
            for res in report.results
        ]
        if series:
            written.append(atomic_write_text(
                directory / f"curves_{metric}.svg",
                _svg_chart(f"Mean label error by {x_label}", x_label,
                           "mean error rate", series)))
    return written


def write_scalogram(rows: list[ScalogramRow], directory) -> list[Path]:
    """Write scalogram.csv and its chart."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    table = [(r.unit_side, r.frac_purity_gt_090, r.frac_purity_lt_050) for r in rows]
    written = [atomic_write_text(
        directory / "scalogram.csv",
        _csv_text(("unit_side", "frac_purity_gt_090", "frac_purity_lt_050"), table))]
    if rows:
        sides = [r.unit_side for r in rows]
        series = [
            ("purity > 0.9", sides, [r.frac_purity_gt_090 for r in rows]),
            ("purity < 0.5", sides, [r.frac_purity_lt_050 for r in rows]),
        ]
        written.append(atomic_write_text(
            directory / "scalogram.svg",
            _svg_chart("Unit purity vs. unit size", "unit side (cells)",
                       "fraction of units", series)))
    return written


def write_optimization_report(report: OptimizationReport, directory) -> list[Path]:
    """Write the per-unit adaptive-effort table and an aggregate summary."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = [
        (r.unit_row, r.unit_col, r.metric, r.mean_n, r.error_rate, r.cap_hit_fraction)
        for r in report.rows
    ]
    written = [atomic_write_text(
        directory / "optimization.csv",
        _csv_text(("unit_row", "unit_col", "metric", "mean_n",
                   "error_rate", "cap_hit_fraction"), rows))]
    summary = {
        "repetitions": report.repetitions,
        "mean_n": report.mean_n,
        "error_rate": report.error_rate,
        "cap_hit_fraction": report.cap_hit_fraction,
        "confident_stop_count": report.confident_stop_count,
        "confident_error_count": report.confident_error_count,
        "confident_error_rate": report.confident_error_rate,
    }
    written.append(atomic_write_text(
        directory / "optimization_summary.json",
        json.dumps(summary, indent=2, sort_keys=True) + "\n"))
    if report.rows:
        order = sorted(report.rows, key=lambda r: r.metric)
        series = [("mean points", [r.metric for r in order], [r.mean_n for r in order])]
        written.append(atomic_write_text(
            directory / "optimization_effort.svg",
            _svg_chart("Adaptive effort by unit metric", "unit metric",
                       "mean points used", series)))
    return written
