"""Deterministic histogram binning and minimal SVG emission.

The SVG output is plain hand-built markup (no plotting dependency, no
embedded timestamps or versions), so identical inputs give byte-identical
documents.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .dist import EmpiricalMeasure, LimitLaw
from .errors import BadParameter

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 50, 15, 15, 35


def histogram(emp: EmpiricalMeasure, bins: int, lo: float, hi: float):
    """Left-closed equal-width binning of raw atom counts; the final bin
    also includes its right edge (so bin totals equal the atom count when
    the range covers the support)."""
    if bins < 1:
        raise BadParameter("need at least one bin")
    if not hi > lo:
        raise BadParameter("empty histogram range")
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(emp.values, bins=edges, weights=emp.counts)
    return edges, counts


def histogram_csv_rows(edges: np.ndarray, counts: np.ndarray):
    yield "bin_left,bin_right,count"
    for left, right, c in zip(edges[:-1], edges[1:], counts):
        yield f"{left!r},{right!r},{c!r}"


def _path(points) -> str:
    return "M" + "L".join(f"{x:.2f},{y:.2f}" for x, y in points)


def svg_histogram(
    emp: EmpiricalMeasure,
    bins: int,
    lo: float,
    hi: float,
    law: Optional[LimitLaw] = None,
    title: str = "",
) -> str:
    """Density-scaled histogram with an optional overlay of the law's
    density sampled at 512 points."""
    edges, counts = histogram(emp, bins, lo, hi)
    width = (hi - lo) / bins
    dens = counts / max(1.0, counts.sum()) / width
    ymax = float(dens.max()) if dens.max() > 0 else 1.0
    if law is not None and law.density(np.array([0.0])) is not None:
        ymax = max(ymax, float(np.nanmax(law.density(np.linspace(lo, hi, 512)))))
    ymax *= 1.08

    def sx(x):
        return _ML + (x - lo) / (hi - lo) * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - y / ymax * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    for left, d in zip(edges[:-1], dens):
        x0, x1 = sx(left), sx(left + width)
        y = sy(float(d))
        parts.append(
            f'<rect x="{x0:.2f}" y="{y:.2f}" width="{x1 - x0:.2f}" '
            f'height="{_H - _MB - y:.2f}" fill="#7a9cc6" stroke="#3c5a80" stroke-width="0.5"/>'
        )
    if law is not None:
        xs = np.linspace(lo, hi, 512)
        ds = law.density(xs)
        if ds is not None:
            pts = [(sx(float(x)), sy(float(d))) for x, d in zip(xs, ds)]
            parts.append(
                f'<path d="{_path(pts)}" fill="none" stroke="#c03030" '
                f'stroke-width="1.5" stroke-dasharray="6,4"/>'
            )
    # axes
    parts.append(
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>'
    )
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>')
    for xt in np.linspace(lo, hi, 5):
        parts.append(
            f'<text x="{sx(float(xt)):.2f}" y="{_H - _MB + 16}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{xt:.2g}</text>'
        )
    if title:
        parts.append(
            f'<text x="{_W / 2}" y="{_MT + 4}" font-size="13" text-anchor="middle" '
            f'font-family="sans-serif">{title}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
