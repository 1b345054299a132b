"""Minimal SVG line plots for the threshold sweep and the ablation curve.

Output is plain text with fixed number formatting, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 480, 320
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 56, 16, 28, 44
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


@dataclass(frozen=True)
class Series:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / n
    return [lo + i * step for i in range(n + 1)]


def _num(v: float) -> str:
    return f"{v:.2f}"


def line_plot(series: Sequence[Series], title: str, xlabel: str, ylabel: str,
              xlim: tuple[float, float] | None = None,
              ylim: tuple[float, float] = (0.0, 1.0)) -> str:
    """Render one or more polylines on shared axes and return the SVG text."""
    if not series:
        raise ValueError("nothing to plot")
    if xlim is None:
        xs = [x for s in series for x in s.xs]
        xlim = (min(xs), max(xs))
    x0, x1 = xlim
    y0, y1 = ylim
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (0.5 if x1 == x0 else (x - x0) / (x1 - x0)) * pw

    def py(y):
        y = min(max(y, y0), y1)
        return MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="16" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{_num(px(t))}" y1="{MARGIN_T + ph}" x2="{_num(px(t))}" '
                   f'y2="{MARGIN_T + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{_num(px(t))}" y="{MARGIN_T + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{MARGIN_L - 4}" y1="{_num(py(t))}" x2="{MARGIN_L}" '
                   f'y2="{_num(py(t))}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 7}" y="{_num(py(t) + 4)}" text-anchor="end">{t:.1f}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {MARGIN_T + ph / 2:.2f})">{escape(ylabel)}</text>')
    for i, s in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in zip(s.xs, s.ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN_T + 14 + 14 * i
        out.append(f'<line x1="{WIDTH - MARGIN_R - 90}" y1="{ly - 4}" x2="{WIDTH - MARGIN_R - 72}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{WIDTH - MARGIN_R - 68}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def threshold_plot(points) -> str:
    """Precision and recall of the abuse class against the probability threshold."""
    ts = [p.threshold for p in points]
    return line_plot([Series("precision", ts, [p.precision for p in points]),
                      Series("recall", ts, [p.recall for p in points])],
                     "Threshold sweep", "probability threshold", "score", xlim=(0.0, 1.0))


def ablation_plot(curve) -> str:
    """Mean F against the number of removed features."""
    n_total = curve[0][0]
    removed = [n_total - k for k, _, _ in curve]
    return line_plot([Series("F-measure", removed, [s for _, _, s in curve])],
                     "Feature ablation", "features removed", "F-measure")
