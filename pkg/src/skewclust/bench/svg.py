"""Minimal self-contained SVG line charts (mean with +-1 std bars)."""
from __future__ import annotations

import math
import os
from xml.sax.saxutils import escape

__all__ = ["line_chart", "sweep_plots"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22")


def _finite(v):
    return v is not None and not (isinstance(v, float) and math.isnan(v))


def line_chart(series: dict, title: str, xlabel: str, ylabel: str,
               width: int = 640, height: int = 420) -> str:
    """``series`` maps a name to a list of ``(x, mean, std)`` points."""
    left, right, top, bottom = 60, 150, 30, 50
    pts = [(x, m, s) for v in series.values() for x, m, s in v if _finite(m)]
    if pts:
        xmin, xmax = min(p[0] for p in pts), max(p[0] for p in pts)
        ymin = min(p[1] - (p[2] or 0) for p in pts)
        ymax = max(p[1] + (p[2] or 0) for p in pts)
    else:
        xmin = ymin = 0.0
        xmax = ymax = 1.0
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - xmin) / (xmax - xmin) * pw

    def sy(y):
        return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for i in range(5):
        xv = xmin + (xmax - xmin) * i / 4
        yv = ymin + (ymax - ymin) * i / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 15}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 5}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
    for j, (name, data) in enumerate(series.items()):
        color = _COLORS[j % len(_COLORS)]
        data = sorted((x, m, s) for x, m, s in data if _finite(m))
        if data:
            path = " ".join(f"{sx(x):.1f},{sy(m):.1f}" for x, m, _ in data)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, m, s in data:
            s = s if _finite(s) else 0.0
            out.append(f'<line x1="{sx(x):.1f}" y1="{sy(m - s):.1f}" x2="{sx(x):.1f}" '
                       f'y2="{sy(m + s):.1f}" stroke="{color}"/>')
            out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(m):.1f}" r="2.5" fill="{color}"/>')
        ly = top + 12 + 16 * j
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_plots(agg_rows: list, out_dir: str) -> list:
    """One ARI chart and one TopTF chart per p value; returns the written paths."""
    paths = []
    ps = sorted({r["p"] for r in agg_rows})
    for pi, p in enumerate(ps):
        for key, ylabel in (("ari", "mean ARI"), ("top_tf", "mean TopTF")):
            series = {}
            for r in agg_rows:
                if r["p"] == p:
                    series.setdefault(r["method"], []).append(
                        (r["mu"], r[key + "_mean"], r[key + "_std"]))
            svg = line_chart(series, f"{ylabel} vs mu (p={p:g})", "mu", ylabel)
            suffix = "" if len(ps) == 1 else f"_p{pi}"
            path = os.path.join(out_dir, f"sweep_{key.replace('_', '')}{suffix}.svg")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(svg)
            paths.append(path)
    return paths
