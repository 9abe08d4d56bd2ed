"""Dependency-free SVG emission for benchmark reports.

Hand-rolled rather than delegated to a plotting package so that chart
bytes are a pure function of the data (no timestamps or library version
metadata), which keeps CLI reruns byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 34, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


@dataclass(frozen=True)
class ChartBox:
    """One box of a box-and-whisker chart; whiskers may be absent."""

    label: str
    method: str
    median: float
    q1: float
    q3: float
    whisker_lo: float | None = None
    whisker_hi: float | None = None
    outliers: tuple[float, ...] = field(default_factory=tuple)


def _fmt(v: float) -> str:
    return format(v, "g")


def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s for s in (1 * mag, 2 * mag, 5 * mag, 10 * mag) if s >= raw)
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


class _Scale:
    def __init__(self, lo, hi, pix_lo, pix_hi):
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        self.lo, self.hi = lo - pad, hi + pad
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, v: float) -> float:
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]


def _axes(sx, sy, x_label: str, y_label: str, x_ticks, y_ticks) -> list[str]:
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    parts = [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{x_label}</text>',
        f'<text x="16" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">{y_label}</text>',
    ]
    for t, label in x_ticks:
        px = sx(t) if callable(sx) else t
        parts.append(f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y0 + 4}" stroke="black"/>')
        parts.append(f'<text x="{px:.1f}" y="{y0 + 17}" text-anchor="middle">{label}</text>')
    for t in y_ticks:
        py = sy(t)
        parts.append(f'<line x1="{x0 - 4}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="black"/>')
        parts.append(f'<line x1="{x0}" y1="{py:.1f}" x2="{x1}" y2="{py:.1f}" stroke="#dddddd"/>')
        parts.append(f'<text x="{x0 - 7}" y="{py + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    return parts


def _legend(methods: list[str]) -> list[str]:
    parts = []
    for k, method in enumerate(methods):
        x = WIDTH - MARGIN_R - 110
        y = MARGIN_T + 8 + 16 * k
        color = PALETTE[k % len(PALETTE)]
        parts.append(f'<rect x="{x}" y="{y - 8}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{x + 14}" y="{y + 1}">{method}</text>')
    return parts


def line_chart(series: dict[str, list[tuple[float, float]]], title: str = "",
               x_label: str = "", y_label: str = "") -> str:
    """Line chart of (x, y) points per named series, e.g. RMSE vs setting."""
    if not series or all(not pts for pts in series.values()):
        raise ValueError("nothing to plot")
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    sx = _Scale(min(xs), max(xs), MARGIN_L, WIDTH - MARGIN_R)
    sy = _Scale(min(min(ys), 0.0), max(ys), HEIGHT - MARGIN_B, MARGIN_T)
    x_ticks = [(t, _fmt(t)) for t in _ticks(sx.lo, sx.hi)]
    parts = _header(title) + _axes(sx, sy, x_label, y_label, x_ticks, _ticks(sy.lo, sy.hi))
    for k, (method, pts) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in sorted(pts))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{color}"/>')
    parts += _legend(list(series))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def box_chart(boxes: list[ChartBox], title: str = "", x_label: str = "", y_label: str = "") -> str:
    """Box-and-whisker chart; boxes sharing a label form one labeled cluster."""
    if not boxes:
        raise ValueError("nothing to plot")
    methods = list(dict.fromkeys(b.method for b in boxes))
    values = []
    for b in boxes:
        values += [b.q1, b.q3, b.median]
        values += [v for v in (b.whisker_lo, b.whisker_hi) if v is not None]
        values += list(b.outliers)
    sy = _Scale(min(min(values), 0.0), max(values), HEIGHT - MARGIN_B, MARGIN_T)
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    slot = plot_w / len(boxes)
    half = 0.32 * slot

    labels = list(dict.fromkeys(b.label for b in boxes))
    x_ticks = []
    for label in labels:
        centers = [MARGIN_L + (i + 0.5) * slot for i, b in enumerate(boxes) if b.label == label]
        x_ticks.append((sum(centers) / len(centers), label))
    parts = _header(title) + _axes(None, sy, x_label, y_label, x_ticks, _ticks(sy.lo, sy.hi))

    for i, b in enumerate(boxes):
        cx = MARGIN_L + (i + 0.5) * slot
        color = PALETTE[methods.index(b.method) % len(PALETTE)]
        top, bot = sy(b.q3), sy(b.q1)
        parts.append(
            f'<rect x="{cx - half:.1f}" y="{top:.1f}" width="{2 * half:.1f}" '
            f'height="{bot - top:.1f}" fill="{color}" fill-opacity="0.25" stroke="{color}"/>'
        )
        med = sy(b.median)
        parts.append(f'<line x1="{cx - half:.1f}" y1="{med:.1f}" x2="{cx + half:.1f}" y2="{med:.1f}" '
                     f'stroke="{color}" stroke-width="2"/>')
        for wv, edge in ((b.whisker_lo, bot), (b.whisker_hi, top)):
            if wv is None:
                continue
            wy = sy(wv)
            parts.append(f'<line x1="{cx:.1f}" y1="{edge:.1f}" x2="{cx:.1f}" y2="{wy:.1f}" '
                         f'stroke="{color}" stroke-dasharray="3,2"/>')
            parts.append(f'<line x1="{cx - half / 2:.1f}" y1="{wy:.1f}" x2="{cx + half / 2:.1f}" '
                         f'y2="{wy:.1f}" stroke="{color}"/>')
        for ov in b.outliers:
            oy = sy(ov)
            parts.append(f'<text x="{cx:.1f}" y="{oy + 4:.1f}" text-anchor="middle" '
                         f'fill="{color}">+</text>')
    parts += _legend(methods)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
