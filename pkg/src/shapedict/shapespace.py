"""Kendall shape-space geometry over pre-shapes.

A shape is the orbit of a pre-shape under rotations ``exp(i theta)``.
Every quantity here depends on pre-shapes z, w only through the
correlation ``a = z* phi w``: its modulus drives the three classical
distances and its argument is the optimal rotation angle.

    full distance      sqrt(1 - |a|^2)      (optimal scaling + rotation)
    partial distance   sqrt(2 - 2 |a|)      (optimal rotation only)
    geodesic distance  arccos |a|           (arc length on the quotient)

Inputs are assumed to be pre-shapes under the given metric; feed raw
configurations through ``configspace.preshape`` first.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .configspace import Metric
from .errors import NonUniqueGeodesicError, NonUniqueGeodesicWarning, NonUniqueMeanWarning
from .linalg import herm_eig
from .errors import UsageError

#: Below this correlation magnitude two pre-shapes count as decorrelated.
DECORRELATION_TOL = 1e-12


@dataclass(frozen=True)
class Alignment:
    """Optimal similarity alignment of one pre-shape along another.

    ``factor`` is the correlation z* phi w; applying it to z gives the
    closest point to w on the complex line through z.  ``scaling`` is its
    modulus (at most 1 for pre-shapes) and ``angle`` its argument in
    [0, 2pi).  When the pre-shapes are decorrelated (factor ~ 0) the angle
    is reported as 0 and ``decorrelated`` is set.
    """

    factor: complex
    angle: float
    scaling: float
    decorrelated: bool


def optimal_alignment(z, w, m: Metric) -> Alignment:
    """Correlation, optimal rotation angle, and optimal scaling of z along w."""
    a = m.inner(z, w)
    lam = abs(a)
    if lam <= DECORRELATION_TOL:
        return Alignment(factor=a, angle=0.0, scaling=lam, decorrelated=True)
    return Alignment(factor=a, angle=float(np.angle(a)) % (2.0 * np.pi), scaling=lam, decorrelated=False)


def _correlation_modulus(z, w, m: Metric) -> float:
    # Clamp round-off: |z* phi w| <= 1 for pre-shapes by Cauchy-Schwarz.
    return min(abs(m.inner(z, w)), 1.0)


def dist_full(z, w, m: Metric) -> float:
    """Residual after optimally scaling and rotating z onto w; in [0, 1]."""
    lam = _correlation_modulus(z, w, m)
    return float(np.sqrt(max(1.0 - lam * lam, 0.0)))


def dist_partial(z, w, m: Metric) -> float:
    """Residual after optimally rotating z onto w; in [0, sqrt(2)]."""
    lam = _correlation_modulus(z, w, m)
    return float(np.sqrt(max(2.0 - 2.0 * lam, 0.0)))


def dist_geodesic(z, w, m: Metric) -> float:
    """Arc-length distance between the shapes of z and w; in [0, pi/2]."""
    return float(np.arccos(_correlation_modulus(z, w, m)))


def geodesic_path(z, w, m: Metric, t: float) -> np.ndarray:
    """Point at parameter ``t`` on the shortest geodesic from [z] to [w].

    z is first rotated optimally along w; the path then follows the great
    circle between the rotated z and w on the pre-shape sphere, so every
    returned point is itself a pre-shape.  At maximal separation
    (distance pi/2) the geodesic is not unique; one representative is
    returned and a NonUniqueGeodesicWarning is emitted.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    align = optimal_alignment(z, w, m)
    if align.decorrelated:
        warnings.warn(
            "pre-shapes are maximally distant; returning one of many geodesics",
            NonUniqueGeodesicWarning,
        )
        zt = z
    else:
        zt = np.exp(1j * align.angle) * z
    r = float(np.arccos(min(align.scaling, 1.0)))
    if r < 1e-12:
        return w.copy()
    sin_r = np.sin(r)
    if sin_r < 1e-12:
        # Unreachable for optimally rotated pre-shapes (r <= pi/2); kept as
        # a guard against antipodal inputs from broken callers.
        raise NonUniqueGeodesicError("antipodal endpoints admit no unique geodesic")
    path = (np.sin((1.0 - t) * r) * zt + np.sin(t * r) * w) / sin_r
    return path / m.norm(path)


def frechet_mean(data, m: Metric) -> np.ndarray:
    """Mean shape under the full distance, as one representative pre-shape.

    The mean is the top eigenvector of the sum of line projectors
    ``z_k z_k* phi``; it maximizes the summed squared correlations with
    the data among unit-norm centered configurations.  A tied leading
    eigenvalue (non-unique mean) raises NonUniqueMeanWarning but still
    returns one maximizer.
    """
    data = np.asarray(data, dtype=complex)
    if data.ndim != 2 or data.shape[0] < 1:
        raise UsageError("need a nonempty K-by-N array of pre-shapes")
    zmat = data.T
    op = (zmat @ zmat.conj().T) @ m.phi
    pairs = herm_eig(op, m.phi)
    lam = pairs.eigenvalues
    if lam.size > 1 and lam[0] - lam[1] <= 1e-10 * max(lam[0], 0.0):
        warnings.warn(
            "mean shape is not unique (tied leading eigenvalues)", NonUniqueMeanWarning
        )
    mean = pairs.eigenvectors[:, 0]
    # Eigenvectors of the data operator are centered already; tidy up
    # round-off so the result satisfies the pre-shape invariants exactly.
    mean = mean - (m.inner(m.shift, mean) / m.shift_norm_sq) * m.shift
    return mean / m.norm(mean)
