"""Dense complex linear algebra for Hermitian-metric geometry.

A metric matrix ``phi`` is conjugate-symmetric and positive-definite; it
induces the inner product ``z* phi w`` (antilinear in the first argument)
and the norm ``|z|_phi = sqrt(z* phi z)``.  Everything here is a pure
function of its inputs.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateConfigurationError,
    NotPositiveDefiniteError,
    UsageError,
)

#: Relative eigenvalue floor below which a metric counts as singular.
PD_TOL = 1e-12

#: Tolerance on conjugate symmetry of a metric matrix.
HERMITIAN_TOL = 1e-14


class EigenPairs(NamedTuple):
    """Eigendecomposition of an operator self-adjoint w.r.t. a metric.

    ``eigenvalues`` are real and sorted in descending order;
    ``eigenvectors`` holds one phi-orthonormal eigenvector per column.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1:
        raise UsageError(f"expected a vector, got array of shape {z.shape}")
    return z


def check_finite(a, name: str = "input") -> np.ndarray:
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise UsageError(f"{name} contains NaN or Inf entries")
    return a


def is_conjugate_symmetric(phi: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(float(np.abs(phi).max()), 1.0)
    return bool(np.abs(phi - phi.conj().T).max() <= tol * scale)


def herm_inner(z, w, phi) -> complex:
    """Hermitian product ``z* phi w``, antilinear in ``z``."""
    z = _as_vector(z)
    w = _as_vector(w)
    phi = np.asarray(phi)
    if not (z.shape[0] == w.shape[0] == phi.shape[0] == phi.shape[1]):
        raise UsageError(
            f"dimension mismatch: z has {z.shape[0]}, w has {w.shape[0]}, "
            f"phi is {phi.shape}"
        )
    return complex(z.conj() @ (phi @ w))


def herm_norm(z, phi) -> float:
    """Norm ``|z|_phi``; clamps the tiny negative round-off of ``z* phi z``."""
    z = np.asarray(z, dtype=complex)
    quad = np.real(z.conj() @ (phi @ z))
    return float(np.sqrt(max(quad, 0.0)))


def metric_sqrt(phi) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(sqrt, inv_sqrt)`` of a positive-definite metric.

    Both factors are conjugate-symmetric; ``sqrt @ sqrt`` reproduces ``phi``
    and ``inv_sqrt`` is its inverse.  Raises NotPositiveDefiniteError when
    the smallest eigenvalue is nonpositive or below ``PD_TOL`` times the
    largest one.
    """
    phi = check_finite(np.asarray(phi, dtype=complex), "phi")
    lam, vecs = np.linalg.eigh((phi + phi.conj().T) / 2.0)
    lam_max = float(lam[-1])
    if lam[0] <= 0.0 or lam[0] <= PD_TOL * lam_max:
        raise NotPositiveDefiniteError(
            f"metric is not positive-definite: eigenvalue range "
            f"[{lam[0]:.3e}, {lam_max:.3e}]"
        )
    root = np.sqrt(lam)
    sqrt = (vecs * root) @ vecs.conj().T
    inv_sqrt = (vecs / root) @ vecs.conj().T
    sqrt = (sqrt + sqrt.conj().T) / 2.0
    inv_sqrt = (inv_sqrt + inv_sqrt.conj().T) / 2.0
    return sqrt, inv_sqrt


def herm_eig(h, phi, *, selfadjoint_tol: float = 1e-10) -> EigenPairs:
    """Eigendecomposition of ``h`` assumed self-adjoint w.r.t. ``phi``.

    Self-adjointness means ``(h z)* phi w == z* phi (h w)``, i.e.
    ``h* phi == phi h`` as matrices; it is verified up to
    ``selfadjoint_tol`` relative.  The problem is mapped with
    ``sqrt(phi)`` onto a standard conjugate-symmetric eigenproblem and the
    eigenvectors are mapped back, which makes them phi-orthonormal.
    """
    h = check_finite(np.asarray(h, dtype=complex), "operator")
    sqrt, inv_sqrt = metric_sqrt(phi)
    lhs = np.asarray(phi) @ h
    scale = max(float(np.abs(lhs).max()), 1.0)
    if np.abs(h.conj().T @ np.asarray(phi) - lhs).max() > selfadjoint_tol * scale:
        raise UsageError("operator is not self-adjoint w.r.t. the metric")
    b = sqrt @ h @ inv_sqrt
    b = (b + b.conj().T) / 2.0
    lam, q = np.linalg.eigh(b)
    order = np.argsort(lam)[::-1]
    return EigenPairs(lam[order], inv_sqrt @ q[:, order])


def pinv(a) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a complex matrix.

    Computed from the eigendecomposition of the conjugate-symmetric
    ``a a*``; singular values at or below ``max(shape) * eps * sigma_max``
    are treated as zero.
    """
    a = check_finite(np.asarray(a, dtype=complex), "matrix")
    if a.ndim != 2:
        raise UsageError(f"expected a matrix, got array of shape {a.shape}")
    lam, u = np.linalg.eigh(a @ a.conj().T)
    lam = np.maximum(lam, 0.0)
    sigma = np.sqrt(lam)
    cutoff = max(a.shape) * np.finfo(float).eps * (sigma[-1] if sigma.size else 0.0)
    keep = sigma > cutoff
    if not np.any(keep):
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    uk = u[:, keep]
    return a.conj().T @ ((uk / lam[keep]) @ uk.conj().T)


def project_line(z, w, phi) -> np.ndarray:
    """Orthogonal projection of ``w`` onto the complex line through ``z``.

    Returns ``(z* phi w / |z|_phi^2) z``; the residual is phi-orthogonal
    to ``z``.
    """
    z = _as_vector(z)
    nsq = np.real(herm_inner(z, z, phi))
    if nsq <= 0.0:
        raise DegenerateConfigurationError("cannot project onto the zero line")
    return (herm_inner(z, w, phi) / nsq) * z
