"""Write experiment results: curve CSVs, a regret chart (SVG) and a run manifest."""

from __future__ import annotations

import csv
import math
from html import escape
from pathlib import Path
from typing import Iterable

from .evaluation import CURVE_HEADER, AggregateCurve
from .harness import ExperimentResult

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _num(x: float) -> str:
    return f"{x:.10g}"


def _write_csv(path: Path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_num(v) if isinstance(v, float) else v for v in row])


def _nice_ceiling(x: float) -> float:
    if x <= 0:
        return 1.0
    exp = 10 ** math.floor(math.log10(x))
    for step in (1, 2, 2.5, 5, 10):
        if step * exp >= x:
            return step * exp
    return 10 * exp


def render_svg(curves: list[AggregateCurve], budget: int, title: str = "Average simple regret") -> str:
    """Line chart of mean regret per policy with a shaded +/- one std band."""
    width, height = 960, 560
    left, right, top, bottom = 70, 300, 40, 60
    pw, ph = width - left - right, height - top - bottom
    y_max = min(1.0, _nice_ceiling(max(float((c.mean_regret + c.std_regret).max()) for c in curves)))

    def sx(r: float) -> float:
        return left + pw * r / budget

    def sy(v: float) -> float:
        v = min(max(v, 0.0), y_max)
        return top + ph * (1.0 - v / y_max)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for i in range(6):
        v = y_max * i / 5
        y = sy(v)
        out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    for i in range(6):
        r = budget * i / 5
        x = sx(r)
        out.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{top + ph + 18}" text-anchor="middle">{r:.0f}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">Rounds (arm pulls)</text>')
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">Average simple regret</text>'
    )
    for i, curve in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        xs = [sx(r) for r in curve.rounds]
        hi = [sy(m + s) for m, s in zip(curve.mean_regret, curve.std_regret)]
        lo = [sy(m - s) for m, s in zip(curve.mean_regret, curve.std_regret)]
        band = [f"{x:.1f},{y:.1f}" for x, y in zip(xs, hi)]
        band += [f"{x:.1f},{y:.1f}" for x, y in zip(reversed(xs), reversed(lo))]
        line = [f"{x:.1f},{sy(m):.1f}" for x, m in zip(xs, curve.mean_regret)]
        out.append(f'<polygon points="{" ".join(band)}" fill="{color}" fill-opacity="0.15" stroke="none"/>')
        out.append(f'<polyline points="{" ".join(line)}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        ly = top + 10 + 20 * i
        lx = left + pw + 20
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(curve.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def manifest_lines(result: ExperimentResult) -> list[str]:
    config = result.config
    lines = ["# best arm identification run manifest", "[experiment]"]
    lines.append(f"source = {result.source_description}")
    for key, value in config.as_items():
        lines.append(f"{key} = {value}")
    for p in result.policies:
        agg = p.aggregate()
        issued = [r.pulls_issued for r in p.runs]
        lines += [
            "",
            f"[policy {p.config.slug}]",
            f"label = {p.label}",
            f"runs = {len(p.runs)}",
            f"budget = {config.budget}",
            f"pulls_issued_mean = {_num(p.mean_pulls_issued)}",
            f"pulls_issued_min = {min(issued)}",
            f"pulls_issued_max = {max(issued)}",
            f"unused_pulls_mean = {_num(config.budget - p.mean_pulls_issued)}",
            f"utilization = {_num(p.utilization)}",
            f"round_averaged_regret = {_num(agg.round_averaged_regret)}",
            f"final_mean_regret = {_num(float(agg.mean_regret[-1]))}",
            f"final_mean_error = {_num(float(agg.mean_error[-1]))}",
        ]
    return lines


def read_manifest(path: str | Path) -> dict[str, dict[str, str]]:
    """Parse a manifest back into ``{section: {key: value}}``; raises on malformed lines."""
    sections: dict[str, dict[str, str]] = {}
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1], {})
            continue
        key, eq, value = line.partition(" = ")
        if not eq or current is None:
            raise ValueError(f"{path}:{lineno}: malformed manifest line {raw!r}")
        current[key] = value
    return sections


def emit_outputs(result: ExperimentResult, out_dir: str | Path | None = None) -> list[Path]:
    """Write every output file; returns the paths written."""
    if not result.policies or not any(p.runs for p in result.policies):
        raise ValueError("no results to write")
    aggregates = [p.aggregate() for p in result.policies]
    out = Path(out_dir if out_dir is not None else result.config.out_dir)
    curves_dir = out / "curves"
    curves_dir.mkdir(parents=True, exist_ok=True)

    written = []
    for p, agg in zip(result.policies, aggregates):
        path = curves_dir / f"{p.config.slug}.csv"
        _write_csv(path, CURVE_HEADER, agg.rows())
        written.append(path)

    path = out / "aggregate.csv"
    _write_csv(path, ("policy", *CURVE_HEADER), ((agg.label, *row) for agg in aggregates for row in agg.rows()))
    written.append(path)

    path = out / "runs.csv"
    _write_csv(
        path,
        ("policy", "run", "round", "regret", "error"),
        (
            (p.label, run.curve.run_id, c.round, c.simple_regret, c.error_rate)
            for p in result.policies
            for run in p.runs
            for c in run.curve.checkpoints
        ),
    )
    written.append(path)

    path = out / "regret.svg"
    path.write_text(render_svg(aggregates, result.config.budget), encoding="utf-8")
    written.append(path)

    path = out / "manifest.txt"
    path.write_text("\n".join(manifest_lines(result)) + "\n", encoding="utf-8")
    written.append(path)
    return written
