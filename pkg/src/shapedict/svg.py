"""SVG rendering of shapes, atoms, and reconstruction overlays.

Shapes are laid out on a grid, one cell each, individually scaled to fit.
Landmark configurations draw as closed polygons through their points;
B-spline configurations are sampled along the curve first.  In overlay
mode a second family (typically reconstructions) is drawn on top of the
first (the originals) with a distinct stroke class.  Output is plain
SVG 1.1 text, byte-deterministic for fixed input.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .bspline import sample_curve
from .configspace import Metric, MetricKind
from .errors import UsageError

#: Default number of curve samples per B-spline shape.
CURVE_SAMPLES = 200

_STYLE = (
    ".base{fill:none;stroke:#8b8b8b;stroke-width:%(w).2f}"
    ".overlay{fill:none;stroke:#1f6feb;stroke-width:%(w).2f}"
    ".label{font:10px sans-serif;fill:#444}"
)


def _outline(shape: np.ndarray, metric: Metric, samples: int) -> np.ndarray:
    if metric.kind is MetricKind.BSPLINE_CLOSED:
        return sample_curve(shape, metric.spline_basis(), samples)
    return np.asarray(shape, dtype=complex)


def _path(points: np.ndarray, transform, cls: str) -> str:
    cmds = []
    for i, p in enumerate(points):
        x, y = transform(p)
        cmds.append(f"{'M' if i == 0 else 'L'}{x:.3f} {y:.3f}")
    return f'<path class="{cls}" d="{" ".join(cmds)} Z"/>'


def render_svg(
    shapes,
    metric: Metric,
    *,
    overlay=None,
    columns: Optional[int] = None,
    cell: float = 160.0,
    margin: float = 14.0,
    samples: int = CURVE_SAMPLES,
    stroke_width: float = 1.5,
    labels: Optional[Sequence] = None,
) -> str:
    """Render shapes (rows of a K-by-N array) as an SVG grid.

    ``overlay`` takes a second K-by-N array drawn on top of the first
    within the same cells (reconstruction over original); both layers in
    a cell share one scale so they superimpose faithfully.
    """
    shapes = np.asarray(shapes, dtype=complex)
    if shapes.ndim == 1:
        shapes = shapes[None, :]
    if shapes.shape[0] == 0:
        raise UsageError("nothing to render")
    if overlay is not None:
        overlay = np.asarray(overlay, dtype=complex)
        if overlay.ndim == 1:
            overlay = overlay[None, :]
        if overlay.shape != shapes.shape:
            raise UsageError(
                f"overlay of shape {overlay.shape} does not match shapes {shapes.shape}"
            )
    count = shapes.shape[0]
    cols = columns or min(count, max(1, round(math.sqrt(count))))
    rows = -(-count // cols)

    body = []
    for k in range(count):
        cx = (k % cols) * cell
        cy = (k // cols) * cell
        outlines = [(_outline(shapes[k], metric, samples), "base")]
        if overlay is not None:
            outlines.append((_outline(overlay[k], metric, samples), "overlay"))
        pts = np.concatenate([o for o, _ in outlines])
        lo_x, hi_x = float(pts.real.min()), float(pts.real.max())
        lo_y, hi_y = float(pts.imag.min()), float(pts.imag.max())
        span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
        scale = (cell - 2 * margin) / span
        mid_x, mid_y = (lo_x + hi_x) / 2, (lo_y + hi_y) / 2

        def transform(p, cx=cx, cy=cy, mid_x=mid_x, mid_y=mid_y, scale=scale):
            # Flip the vertical axis: SVG y grows downward.
            return (
                cx + cell / 2 + (p.real - mid_x) * scale,
                cy + cell / 2 - (p.imag - mid_y) * scale,
            )

        for outline_pts, cls in outlines:
            body.append(_path(outline_pts, transform, cls))
        if labels is not None:
            body.append(
                f'<text class="label" x="{cx + 4:.1f}" y="{cy + 12:.1f}">{labels[k]}</text>'
            )

    width = cols * cell
    height = rows * cell
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">\n'
        f"<style>{_STYLE % {'w': stroke_width}}</style>\n" + "\n".join(body) + "\n</svg>\n"
    )
