"""Configurations of planar objects and their projection to pre-shapes.

A configuration is a complex N-vector: landmark coordinates, or control
coefficients of an interpolating curve.  A ``Metric`` fixes the geometry
of the configuration space: the positive-definite matrix ``phi`` behind
the Hermitian product, and the ``shift`` vector along which translations
act.  Centering removes the translational part; normalizing removes
scale; the result is a pre-shape (centered, unit phi-norm).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from . import bspline, linalg
from .errors import (
    DegenerateConfigurationError,
    MetricMismatchError,
    UsageError,
)

#: Relative scale below which the centered part counts as degenerate.
DEGENERATE_TOL = 1e-12


class MetricKind(str, enum.Enum):
    LANDMARKS = "landmarks"
    BSPLINE_CLOSED = "bspline_closed"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class Metric:
    """Geometry of a configuration space: the pair (phi, shift).

    Immutable after construction and safe to share across threads.  Use
    the ``landmarks``, ``bspline_closed``, or ``custom`` constructors.
    """

    kind: MetricKind
    phi: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=complex)
        shift = np.asarray(self.shift, dtype=complex)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            raise UsageError(f"metric matrix must be square, got shape {phi.shape}")
        if shift.shape != (phi.shape[0],):
            raise UsageError(
                f"shift vector of length {shift.shape} does not match metric size "
                f"{phi.shape[0]}"
            )
        if not linalg.is_conjugate_symmetric(phi):
            raise UsageError("metric matrix is not conjugate-symmetric")
        linalg.check_finite(phi, "metric matrix")
        linalg.check_finite(shift, "shift vector")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "shift", shift)
        # Positive-definiteness check; result is cached for later use.
        self.sqrt_pair
        if linalg.herm_norm(shift, phi) <= 0.0:
            raise UsageError("shift vector must have positive norm")

    @classmethod
    def landmarks(cls, n: int) -> "Metric":
        """Identity metric over n landmarks; translations shift every point."""
        if n < 1:
            raise UsageError("need at least one landmark")
        return cls(MetricKind.LANDMARKS, np.eye(n, dtype=complex), np.ones(n, dtype=complex))

    @classmethod
    def bspline_closed(cls, m: int) -> "Metric":
        """Closed cubic B-spline metric with m control points."""
        basis = bspline.gram_closed(m)
        return cls(MetricKind.BSPLINE_CLOSED, basis.gram.astype(complex), np.ones(m, dtype=complex))

    @classmethod
    def custom(cls, phi, shift) -> "Metric":
        """User-supplied metric matrix and shift configuration."""
        return cls(MetricKind.CUSTOM, np.asarray(phi, dtype=complex), np.asarray(shift, dtype=complex))

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @cached_property
    def sqrt_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached ``(sqrt(phi), sqrt(phi)^-1)``."""
        return linalg.metric_sqrt(self.phi)

    @cached_property
    def shift_norm_sq(self) -> float:
        return float(np.real(linalg.herm_inner(self.shift, self.shift, self.phi)))

    def inner(self, z, w) -> complex:
        return linalg.herm_inner(z, w, self.phi)

    def norm(self, z) -> float:
        return linalg.herm_norm(z, self.phi)

    def spline_basis(self) -> bspline.SplineBasis:
        if self.kind is not MetricKind.BSPLINE_CLOSED:
            raise UsageError("metric is not a closed B-spline metric")
        return bspline.SplineBasis(m=self.n, gram=np.real(self.phi))

    def compatible(self, other: "Metric") -> bool:
        return (
            self.kind is other.kind
            and self.n == other.n
            and np.allclose(self.phi, other.phi, rtol=0.0, atol=1e-12)
            and np.allclose(self.shift, other.shift, rtol=0.0, atol=1e-12)
        )

    def require_same(self, other: "Metric") -> None:
        if not self.compatible(other):
            raise MetricMismatchError(
                f"metrics differ ({self.kind.value}/{self.n} vs {other.kind.value}/{other.n})"
            )


@dataclass(eq=False)
class Dataset:
    """Shapes sharing one metric: a K-by-N complex array, one row each."""

    shapes: np.ndarray
    metric: Metric
    labels: Optional[list] = field(default=None)

    def __post_init__(self):
        shapes = np.asarray(self.shapes, dtype=complex)
        if shapes.size == 0:
            shapes = shapes.reshape(0, self.metric.n)
        if shapes.ndim != 2 or shapes.shape[1] != self.metric.n:
            raise UsageError(
                f"shapes array of shape {shapes.shape} does not match metric size "
                f"{self.metric.n}"
            )
        self.shapes = shapes
        if self.labels is not None and len(self.labels) != len(self.shapes):
            raise UsageError(
                f"{len(self.labels)} labels for {len(self.shapes)} shapes"
            )

    def __len__(self) -> int:
        return self.shapes.shape[0]


def centre_of(z, m: Metric) -> complex:
    """Center of a configuration: the coefficient b with z - b*shift
    orthogonal to the shift direction.

    For landmarks this is the arithmetic mean of the points; for curves it
    is the temporal mean of the curve.
    """
    z = np.asarray(z, dtype=complex)
    return complex(m.inner(m.shift, z) / m.shift_norm_sq)


def center(z, m: Metric) -> np.ndarray:
    """Project out the translational part: ``z - centre_of(z) * shift``."""
    z = np.asarray(z, dtype=complex)
    return z - centre_of(z, m) * m.shift


def is_degenerate(z, m: Metric) -> bool:
    """True when z lies on the translation line (collapses to a point)."""
    z = np.asarray(z, dtype=complex)
    return m.norm(center(z, m)) <= DEGENERATE_TOL * max(m.norm(z), 1.0)


def preshape(z, m: Metric) -> np.ndarray:
    """Project a non-degenerate configuration onto the pre-shape sphere.

    Centers, then scales to unit phi-norm.  The result is invariant under
    translations and positive scalings of z, and picks up the phase of any
    complex scaling.
    """
    z = np.asarray(z, dtype=complex)
    z0 = center(z, m)
    nrm = m.norm(z0)
    if nrm <= DEGENERATE_TOL * max(m.norm(z), 1.0):
        raise DegenerateConfigurationError(
            "configuration is degenerate (collapses to a single point)"
        )
    return z0 / nrm


def preshape_defect(z, m: Metric) -> float:
    """How far z is from being a pre-shape: max of centering and norm error."""
    z = np.asarray(z, dtype=complex)
    return max(abs(complex(m.inner(m.shift, z))), abs(m.norm(z) - 1.0))


def is_preshape(z, m: Metric, tol: float = 1e-10) -> bool:
    return preshape_defect(z, m) <= tol
