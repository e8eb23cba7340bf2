"""Minimal line-chart SVG writer (no plotting dependency)."""

from __future__ import annotations

from typing import Sequence

COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#000000", "#9467bd")


def line_chart(series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
               points: Sequence[tuple[float, float]] = (), width: int = 480, height: int = 360,
               title: str = "") -> str:
    xs = [x for _, sx, _ in series for x in sx] + [p[0] for p in points]
    ys = [y for _, _, sy in series for y in sy] + [p[1] for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1
    pad = 40

    def px(x, y):
        return (pad + (x - x0) / (x1 - x0) * (width - 2 * pad),
                height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="13">{title}</text>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>']
    for i, (name, sx, sy) in enumerate(series):
        pts = " ".join("%.2f,%.2f" % px(x, y) for x, y in zip(sx, sy))
        color = COLORS[i % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{width - pad}" y="{pad + 14 * i}" text-anchor="end" font-size="11" '
                   f'fill="{color}">{name}</text>')
    for x, y in points:
        cx, cy = px(x, y)
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
