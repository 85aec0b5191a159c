"""Closed cubic B-spline curves: generator, periodized basis, Gram matrix.

A curve with M control coefficients is ``r(t) = sum_n z[n] phi_n(t)`` on
[0, 1], where the ``phi_n`` are integer shifts of the cubic generator
compressed by M and wrapped around the unit period.  Their Gram matrix
``Phi[n, m] = integral(phi_n phi_m)`` turns control vectors into an inner
product space in which ``|z - w|_Phi`` equals the L2 distance between the
curves themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UsageError

#: The generator's support radius: beta3 vanishes outside [-2, 2].
SUPPORT = 2

#: Smallest usable number of control points.
MIN_CONTROL_POINTS = 4


@dataclass(frozen=True)
class SplineBasis:
    """Periodized cubic B-spline basis with ``m`` control points.

    ``gram`` is the real symmetric circulant matrix of basis-function
    products; every row sums to ``1/m`` and the all-ones vector has unit
    norm under it.
    """

    m: int
    gram: np.ndarray


def beta3(t):
    """Cubic B-spline generator: piecewise cubic, support [-2, 2], C2."""
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    inner = a**3 / 2.0 - a**2 + 2.0 / 3.0
    outer = (2.0 - a) ** 3 / 6.0
    out = np.where(a <= 1.0, inner, np.where(a <= 2.0, outer, 0.0))
    return out if out.ndim else float(out)


def basis_closed(m: int, n: int, t):
    """Evaluate the n-th periodized basis function at ``t`` in [0, 1].

    Basis functions whose support crosses the period boundary
    (n in {0, 1, m-1}) pick up the wrapped copy of the generator, so each
    phi_n is 1-periodic and the family sums to one everywhere.
    """
    if m < MIN_CONTROL_POINTS:
        raise UsageError(f"closed cubic B-splines need at least 4 control points, got {m}")
    if not 0 <= n < m:
        raise UsageError(f"basis index {n} out of range for {m} control points")
    t = np.asarray(t, dtype=float)
    x = m * t - n
    if n in (0, 1):
        val = beta3(x) + beta3(x - m)
    elif n == m - 1:
        val = beta3(x) + beta3(x + m)
    else:
        val = beta3(x)
    return val if np.ndim(val) else float(val)


@lru_cache(maxsize=None)
def _autocorrelation(lag: int) -> float:
    """``integral beta3(x) beta3(x - lag) dx`` by 64-point Gauss-Legendre
    on each unit interval of the overlap (exact for the degree-6 product)."""
    lag = abs(lag)
    if lag > 2 * SUPPORT - 1:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(64)
    total = 0.0
    for left in range(lag - SUPPORT, SUPPORT):
        x = 0.5 * (nodes + 1.0) + left
        total += 0.5 * float(np.sum(weights * beta3(x) * beta3(x - lag)))
    return total


def gram_closed(m: int) -> SplineBasis:
    """Gram matrix of the periodized basis with ``m`` control points.

    Entry (n, n') depends only on the circular lag; it collects the
    generator autocorrelation at every periodic image of that lag (two
    images can overlap when m < 7) and carries the 1/m change of scale
    from compressing the generator onto [0, 1].
    """
    if m < MIN_CONTROL_POINTS:
        raise UsageError(f"closed cubic B-splines need at least 4 control points, got {m}")
    row = np.zeros(m)
    for lag in range(m):
        total = 0.0
        for p in range(-1, 2):
            total += _autocorrelation(lag + p * m)
        row[lag] = total / m
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return SplineBasis(m=m, gram=row[idx])


def sample_curve(z, basis: SplineBasis, num_samples: int) -> np.ndarray:
    """Evaluate the curve of control vector ``z`` at ``i/num_samples``.

    The sample at t = 1 is omitted since closed curves repeat there.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape[0] != basis.m:
        raise UsageError(
            f"control vector has {z.shape[0]} entries, basis expects {basis.m}"
        )
    if num_samples < 2:
        raise UsageError("need at least 2 samples")
    return design_matrix(basis.m, np.arange(num_samples) / num_samples) @ z


def design_matrix(m: int, t) -> np.ndarray:
    """Rows of basis-function values at each parameter in ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.column_stack([basis_closed(m, n, t) for n in range(m)])
