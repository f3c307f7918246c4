"""Minimal standalone SVG charts; no renderer dependency.

CSV files are the source of truth, these are courtesy visualizations: a
probability-per-feature bar chart with the selection threshold line, and a
selected-count-per-round curve.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

_WIDTH = 800
_HEIGHT = 400
_MARGIN = 50


def _svg(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _axes(title: str) -> list[str]:
    x0, y0 = _MARGIN, _HEIGHT - _MARGIN
    x1, y1 = _WIDTH - _MARGIN, _MARGIN
    return [
        f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]


def probability_bars_svg(
    probs: Sequence[float],
    threshold: float,
    path: str | Path,
    title: str = "Selection probability per feature",
) -> None:
    """Bar chart of per-feature probabilities with a horizontal threshold line."""
    body = _axes(title)
    plot_w = _WIDTH - 2 * _MARGIN
    plot_h = _HEIGHT - 2 * _MARGIN
    n = max(len(probs), 1)
    bar_w = max(plot_w / n - 1.0, 0.5)
    for i, p in enumerate(probs):
        h = p * plot_h
        x = _MARGIN + i * plot_w / n
        y = _HEIGHT - _MARGIN - h
        fill = "#d62728" if p > threshold else "#1f77b4"
        body.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" height="{h:.2f}" fill="{fill}"/>'
        )
    ty = _HEIGHT - _MARGIN - threshold * plot_h
    body.append(
        f'<line x1="{_MARGIN}" y1="{ty:.2f}" x2="{_WIDTH - _MARGIN}" y2="{ty:.2f}" '
        f'stroke="gray" stroke-dasharray="6 3"/>'
    )
    body.append(
        f'<text x="{_WIDTH - _MARGIN}" y="{ty - 5:.2f}" text-anchor="end" font-size="12">'
        f"threshold {threshold}</text>"
    )
    Path(path).write_text(_svg(body))


def line_curve_svg(
    xs: Sequence[float],
    ys: Sequence[float],
    path: str | Path,
    title: str = "Selected features per round",
) -> None:
    """Polyline of y values over x values (e.g. selected count vs round)."""
    body = _axes(title)
    plot_w = _WIDTH - 2 * _MARGIN
    plot_h = _HEIGHT - 2 * _MARGIN
    if xs:
        x_max = max(max(xs), 1)
        y_max = max(max(ys), 1)
        points = " ".join(
            f"{_MARGIN + x / x_max * plot_w:.2f},{_HEIGHT - _MARGIN - y / y_max * plot_h:.2f}"
            for x, y in zip(xs, ys)
        )
        body.append(f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
        body.append(
            f'<text x="{_MARGIN}" y="{_MARGIN - 8}" font-size="12">max y = {y_max}</text>'
        )
    Path(path).write_text(_svg(body))
