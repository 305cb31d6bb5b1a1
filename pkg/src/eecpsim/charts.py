"""Standalone SVG charts (line and grouped bar) with no plotting dependency."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Optional, Sequence

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 80, 190, 60, 70


def _escape(text: str) -> str:
    return (
        str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:g}" if abs(v) < 1e6 else f"{v:.3g}"


class _Canvas:
    def __init__(self, title: str, x_label: str, y_label: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
            f'<text x="{(LEFT + WIDTH - RIGHT) / 2:.1f}" y="32" text-anchor="middle" font-size="18" '
            f'font-family="sans-serif">{_escape(title)}</text>',
            f'<text x="{(LEFT + WIDTH - RIGHT) / 2:.1f}" y="{HEIGHT - 20}" text-anchor="middle" '
            f'font-size="13" font-family="sans-serif">{_escape(x_label)}</text>',
            f'<text x="20" y="{(TOP + HEIGHT - BOTTOM) / 2:.1f}" text-anchor="middle" font-size="13" '
            f'font-family="sans-serif" transform="rotate(-90 20 {(TOP + HEIGHT - BOTTOM) / 2:.1f})">'
            f"{_escape(y_label)}</text>",
        ]
        self.x0, self.x1 = LEFT, WIDTH - RIGHT
        self.y0, self.y1 = HEIGHT - BOTTOM, TOP

    def y_axis(self, lo: float, hi: float):
        self.ylo, self.yhi = lo, hi
        for t in _nice_ticks(lo, hi):
            y = self.ypx(t)
            self.parts.append(f'<line x1="{self.x0}" y1="{y:.2f}" x2="{self.x1}" y2="{y:.2f}" stroke="#e0e0e0"/>')
            self.parts.append(
                f'<text x="{self.x0 - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11" '
                f'font-family="sans-serif">{_fmt(t)}</text>'
            )

    def ypx(self, v: float) -> float:
        span = self.yhi - self.ylo
        return self.y0 - (v - self.ylo) / span * (self.y0 - self.y1)

    def frame(self):
        self.parts.append(f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x1}" y2="{self.y0}" stroke="#000"/>')
        self.parts.append(f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x0}" y2="{self.y1}" stroke="#000"/>')

    def legend(self, entries: Sequence[tuple[str, str]], note: Optional[str] = None):
        x = self.x1 + 20
        for i, (label, color) in enumerate(entries):
            y = TOP + 10 + 22 * i
            self.parts.append(f'<rect x="{x}" y="{y - 9}" width="14" height="10" fill="{color}"/>')
            self.parts.append(
                f'<text x="{x + 20}" y="{y}" font-size="12" font-family="sans-serif">{_escape(label)}</text>'
            )
        if note:
            y = TOP + 10 + 22 * len(entries)
            self.parts.append(
                f'<text x="{x}" y="{y}" font-size="11" font-family="sans-serif">{_escape(note)}</text>'
            )

    def save(self, path) -> Path:
        path = Path(path)
        self.parts.append("</svg>")
        try:
            path.write_text("\n".join(self.parts) + "\n", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write chart {path}: {exc}") from exc
        return path


def line_chart(
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
    title: str,
    path,
    x_label: str = "Round",
    y_label: str = "",
) -> Path:
    """One polyline per entry of ``series`` (label -> (x, y))."""
    if not series:
        raise ValueError("need at least one series")
    xs = [float(v) for x, _ in series.values() for v in x]
    ys = [float(v) for _, y in series.values() for v in y]
    if not xs:
        raise ValueError("series are empty")
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(0.0, min(ys)), max(ys)
    if yhi <= ylo:
        yhi = ylo + 1.0
    c = _Canvas(title, x_label, y_label or title)
    c.y_axis(ylo, yhi)
    xspan = (xhi - xlo) or 1.0

    def xpx(v):
        return c.x0 + (v - xlo) / xspan * (c.x1 - c.x0)

    for t in _nice_ticks(xlo, xhi):
        c.parts.append(
            f'<text x="{xpx(t):.2f}" y="{c.y0 + 18}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{_fmt(t)}</text>'
        )
        c.parts.append(f'<line x1="{xpx(t):.2f}" y1="{c.y0}" x2="{xpx(t):.2f}" y2="{c.y0 + 5}" stroke="#000"/>')
    entries = []
    for i, (label, (x, y)) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        x, y = list(x), list(y)
        if len(x) == 1:  # a single point still spans the plot
            x, y = [xlo, xhi if xhi > xlo else xlo + 1], [y[0], y[0]]
        pts = " ".join(f"{xpx(float(a)):.2f},{c.ypx(float(b)):.2f}" for a, b in zip(x, y))
        c.parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        entries.append((label, color))
    c.frame()
    c.legend(entries)
    return c.save(path)


def milestone_chart(
    values: Mapping[str, Mapping[str, tuple[float, bool]]],
    title: str,
    path,
    max_rounds: int,
) -> Path:
    """Grouped bars: one group per milestone, one bar per protocol.

    ``values`` maps protocol -> milestone -> (value, censored). A value of
    None means fully censored and is drawn at ``max_rounds``; any censored bar
    gets a dashed outline and a star.
    """
    if not values:
        raise ValueError("need at least one protocol")
    protocols = list(values)
    groups = list(next(iter(values.values())))
    top = max([max_rounds] if any(cen for m in values.values() for _, cen in m.values()) else [1])
    top = max([top] + [v for m in values.values() for v, _ in m.values() if v is not None])
    c = _Canvas(title, "Milestone", "Round")
    c.y_axis(0.0, float(top) * 1.05)
    group_w = (c.x1 - c.x0) / len(groups)
    bar_w = group_w * 0.7 / len(protocols)
    any_censored = False
    for g, name in enumerate(groups):
        gx = c.x0 + g * group_w + group_w * 0.15
        for p, proto in enumerate(protocols):
            value, censored = values[proto][name]
            if value is None:
                value = max_rounds
            any_censored = any_censored or censored
            x = gx + p * bar_w
            y = c.ypx(value)
            extra = ' stroke="#000" stroke-dasharray="4 3"' if censored else ""
            c.parts.append(
                f'<rect class="bar" x="{x:.2f}" y="{y:.2f}" width="{bar_w * 0.9:.2f}" height="{c.y0 - y:.2f}" '
                f'fill="{COLORS[p % len(COLORS)]}"{extra}/>'
            )
            if censored:
                c.parts.append(
                    f'<text x="{x + bar_w * 0.45:.2f}" y="{y - 4:.2f}" text-anchor="middle" '
                    f'font-size="12" font-family="sans-serif">*</text>'
                )
        c.parts.append(
            f'<text x="{c.x0 + (g + 0.5) * group_w:.2f}" y="{c.y0 + 18}" text-anchor="middle" '
            f'font-size="12" font-family="sans-serif">{_escape(name)}</text>'
        )
    c.frame()
    note = f"* censored at {max_rounds} rounds" if any_censored else None
    c.legend([(p, COLORS[i % len(COLORS)]) for i, p in enumerate(protocols)], note)
    return c.save(path)
