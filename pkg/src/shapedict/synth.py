"""Synthetic landmark datasets: base silhouettes, deformation, scrambling.

Each dataset element starts from a named base silhouette, gets a random
smooth deformation, then a random similitude, and is finally projected to
a pre-shape.  The deformation draws one complex Gaussian vector per
landmark and smooths it with the kernel of squared distances between the
base's landmarks, so nearby landmarks move coherently; its amplitude is
rescaled so that ``deformation`` is exactly the metric norm of the
perturbation added to the unit-norm base.

Everything is reproducible from the seed; per-element generators come
from independent substreams, so any parallel evaluation order gives the
same dataset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .configspace import Dataset, Metric, preshape
from .errors import NumericalError, UsageError

#: Inner-to-outer radius ratio of star silhouettes.
STAR_INNER_RADIUS = 0.45

#: Vertical-to-horizontal axis ratio of the ellipse silhouette.
ELLIPSE_AXIS_RATIO = 0.6

BaseKind = Union[str, Sequence[complex]]


@dataclass
class SynthSpec:
    """Recipe for a synthetic dataset.

    ``bases`` entries are silhouette names ("ellipse", "polygon-5",
    "star-6") or explicit landmark sequences.  Ranges are inclusive
    uniform draws; the defaults apply the identity similitude.
    """

    bases: list
    n_points: int
    copies: int = 1
    deformation: float = 0.0
    rotation_range: tuple[float, float] = (0.0, 0.0)
    scale_range: tuple[float, float] = (1.0, 1.0)
    translation_range: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_points < 3:
            raise UsageError("need at least 3 landmarks")
        if self.copies < 1:
            raise UsageError("need at least one copy per base")
        if self.deformation < 0:
            raise UsageError("deformation amplitude must be nonnegative")
        if not self.bases:
            raise UsageError("need at least one base silhouette")


def _resample_closed(vertices: np.ndarray, n: int) -> np.ndarray:
    """n points at equal arc length along a closed polygon, from vertex 0."""
    edges = np.roll(vertices, -1) - vertices
    lengths = np.abs(edges)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    targets = total * np.arange(n) / n
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(vertices) - 1)
    frac = (targets - cum[idx]) / lengths[idx]
    return vertices[idx] + frac * edges[idx]


def base_shape(kind: BaseKind, n: int) -> np.ndarray:
    """Deterministic landmark sampling of a named silhouette.

    "ellipse" places landmarks at uniform parameter angles; "polygon-k"
    and "star-k" resample the silhouette outline at n equal arc-length
    steps starting from the first vertex.  A sequence of points is taken
    verbatim (and must have length n).
    """
    if n < 3:
        raise UsageError("need at least 3 landmarks")
    if not isinstance(kind, str):
        pts = np.asarray(kind, dtype=complex)
        if pts.shape != (n,):
            raise UsageError(f"imported base has {pts.shape} points, expected {n}")
        return pts
    if kind == "ellipse":
        ang = 2.0 * np.pi * np.arange(n) / n
        return np.cos(ang) + 1j * ELLIPSE_AXIS_RATIO * np.sin(ang)
    name, _, arg = kind.partition("-")
    if name == "polygon" and arg.isdigit() and int(arg) >= 3:
        k = int(arg)
        verts = np.exp(2j * np.pi * np.arange(k) / k)
        return _resample_closed(verts, n)
    if name == "star" and arg.isdigit() and int(arg) >= 2:
        k = int(arg)
        ang = np.pi * np.arange(2 * k) / k
        radius = np.where(np.arange(2 * k) % 2 == 0, 1.0, STAR_INNER_RADIUS)
        return _resample_closed(radius * np.exp(1j * ang), n)
    raise UsageError(f"unknown base silhouette {kind!r}")


def deform(z_or, metric: Metric, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Add a kernel-smoothed random deformation of metric norm ``eps``.

    Draws a standard complex Gaussian per landmark, smooths it with the
    squared-distance kernel of the input's landmarks (zero diagonal), and
    adds the unit-normalized result scaled by ``eps``.
    """
    z_or = np.asarray(z_or, dtype=complex)
    kernel = np.abs(z_or[:, None] - z_or[None, :]) ** 2
    for _ in range(10):
        g = (rng.standard_normal(z_or.size) + 1j * rng.standard_normal(z_or.size)) * np.sqrt(0.5)
        d = kernel @ g
        nrm = metric.norm(d)
        if nrm > 0.0:
            return z_or + (eps / nrm) * d
    raise NumericalError("random deformation kept collapsing to zero")


def make_dataset(spec: SynthSpec) -> Dataset:
    """Generate the dataset described by ``spec``; labels give the base index.

    Every element is deformed, scrambled by a random similitude drawn
    from the configured ranges, and projected to a pre-shape.
    """
    metric = Metric.landmarks(spec.n_points)
    bases = [preshape(base_shape(kind, spec.n_points), metric) for kind in spec.bases]
    streams = np.random.SeedSequence(spec.seed).spawn(len(bases) * spec.copies)
    shapes = np.empty((len(bases) * spec.copies, spec.n_points), dtype=complex)
    labels: list[int] = []
    for b, base in enumerate(bases):
        for c in range(spec.copies):
            i = b * spec.copies + c
            rng = np.random.default_rng(streams[i])
            z = deform(base, metric, spec.deformation, rng)
            angle = rng.uniform(*spec.rotation_range)
            scale = rng.uniform(*spec.scale_range)
            shift = spec.translation_range * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
            z = scale * np.exp(1j * angle) * z + shift * metric.shift
            shapes[i] = preshape(z, metric)
            labels.append(b)
    return Dataset(shapes=shapes, metric=metric, labels=labels)
