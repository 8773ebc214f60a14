"""Minimal standalone SVG line charts."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT, MARGIN = 640, 400, 50


def line_chart(
    path,
    series: Sequence[tuple[str, str, Sequence[float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    comment: str = "",
) -> None:
    """Write ``(label, colour, values)`` series against their index."""
    values = [v for _, _, ys in series for v in ys]
    if not values:
        raise ValueError("nothing to plot")
    lo, hi = min(0.0, min(values)), max(values)
    if hi == lo:
        hi = lo + 1.0
    npts = max(len(ys) for _, _, ys in series)
    span_x = max(1, npts - 1)
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def px(i):
        return MARGIN + pw * i / span_x

    def py(v):
        return HEIGHT - MARGIN - ph * (v - lo) / (hi - lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    if comment:
        out.append(f"<!-- {escape(comment.replace('--', '- -'))} -->")
    out += [
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="12" y="{HEIGHT / 2}" font-size="12" transform="rotate(-90 12 {HEIGHT / 2})" '
        f'text-anchor="middle">{escape(ylabel)}</text>',
        f'<text x="{MARGIN - 4}" y="{py(hi) + 4:.1f}" text-anchor="end" font-size="10">{hi:g}</text>',
        f'<text x="{MARGIN - 4}" y="{py(lo) + 4:.1f}" text-anchor="end" font-size="10">{lo:g}</text>',
    ]
    for k, (label, colour, ys) in enumerate(series):
        pts = " ".join(f"{px(i):.1f},{py(v):.1f}" for i, v in enumerate(ys))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{pts}"/>')
        ly = MARGIN + 14 * (k + 1)
        out.append(f'<text x="{WIDTH - MARGIN - 4}" y="{ly}" text-anchor="end" font-size="11" '
                   f'fill="{colour}">{escape(label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
