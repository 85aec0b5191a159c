"""Greedy sparse coding by order-recursive matching pursuit (ORMP).

Given a dictionary of atoms and a sparsity budget, ORMP grows a support
one atom at a time.  At each step the chosen atom maximizes the residual
correlation after orthogonalization against the atoms already selected,
so the intermediate residual is always the exact orthogonal projection
error onto the current span.

Two interchangeable implementations are provided:

* ``ormp_naive`` keeps explicit working vectors and orthogonalizes them
  step by step (direct transcription of the textbook recursion);
* ``ormp_cholesky`` runs entirely on the precomputed Gram matrix of the
  dictionary, implicitly maintaining the inverse Cholesky factor of the
  selected sub-Gram.  It returns the same support and coefficients and is
  the one to use in bulk.

``ormp_real`` is the plain-real Euclidean variant used by the align-first
baseline after its isometric change of coordinates.  Coding different
data points is independent and side-effect-free, so callers may
parallelize freely over samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSubsetError, UsageError
from .linalg import herm_norm

#: The "maximum is zero" stop test, relative to the norm of the datum.
STOP_TOL = 1e-12

#: Working atoms shorter than this are numerically dependent on the
#: selected ones and are excluded from the argmax.
DEPENDENT_ATOM_TOL = 1e-10

#: Condition-number bound on subset Gram matrices in solve_subset.
SUBSET_COND_LIMIT = 1e12


@dataclass
class SparseCode:
    """Sparse coefficients of one datum over a dictionary.

    ``support`` lists the selected atom indices in selection order;
    ``coefficients`` aligns with it; both are empty when the datum is
    uncorrelated with every atom.  ``residual_norm`` is the norm of the
    approximation error, recomputed from the final coefficients.
    """

    support: np.ndarray
    coefficients: np.ndarray
    residual_norm: float

    def dense(self, size: int) -> np.ndarray:
        """Expand to a full weight vector of the given length."""
        out = np.zeros(size, dtype=self.coefficients.dtype)
        out[self.support] = self.coefficients
        return out


def _check_problem(atoms: np.ndarray, z: np.ndarray, n0: int) -> None:
    if atoms.ndim != 2 or atoms.shape[1] == 0:
        raise UsageError("dictionary must have at least one atom")
    if n0 < 1:
        raise UsageError("sparsity must be at least 1")
    if z.shape != (atoms.shape[0],):
        raise UsageError(
            f"datum of length {z.shape} does not match atom length {atoms.shape[0]}"
        )


def _ormp_on_gram(gram, corr, n0, tol_stop):
    """Shared recursion over the dictionary Gram matrix.

    ``corr`` holds the correlations of every atom with the datum.  Works
    for complex and real dtypes alike.  Returns the support (selection
    order) and the final coefficients.
    """
    j_total = gram.shape[0]
    dtype = np.result_type(gram.dtype, corr.dtype)
    steps = min(n0, j_total)
    norms_sq = np.real(np.diagonal(gram)).astype(float).copy()
    corr = corr.astype(dtype, copy=True)
    # Columns of ``basis_coeffs`` express each orthonormal basis vector in
    # the selected atoms; stacked they form the inverse adjoint Cholesky
    # factor of the selected sub-Gram.
    basis_coeffs = np.zeros((steps, steps), dtype=dtype)
    atom_proj = np.zeros((steps, j_total), dtype=dtype)
    selected = np.zeros(j_total, dtype=bool)
    support: list[int] = []
    gammas: list[complex] = []

    for step in range(steps):
        eligible = ~selected & (norms_sq > DEPENDENT_ATOM_TOL**2)
        if not np.any(eligible):
            break
        crit = np.full(j_total, -np.inf)
        crit[eligible] = np.abs(corr[eligible]) ** 2 / norms_sq[eligible]
        best = int(np.argmax(crit))
        if np.sqrt(max(crit[best], 0.0)) <= tol_stop:
            break
        nrm = np.sqrt(norms_sq[best])
        gamma = corr[best] / nrm
        coeffs = np.zeros(steps, dtype=dtype)
        coeffs[step] = 1.0
        if step:
            coeffs -= basis_coeffs[:, :step] @ atom_proj[:step, best]
        coeffs /= nrm
        basis_coeffs[:, step] = coeffs
        rows = support + [best]
        atom_proj[step] = np.conj(coeffs[: step + 1]) @ gram[rows, :]
        norms_sq -= np.abs(atom_proj[step]) ** 2
        np.maximum(norms_sq, 0.0, out=norms_sq)
        corr -= gamma * np.conj(atom_proj[step])
        selected[best] = True
        support.append(best)
        gammas.append(gamma)

    count = len(support)
    if count == 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=dtype)
    alpha = basis_coeffs[:count, :count] @ np.asarray(gammas, dtype=dtype)
    return np.asarray(support, dtype=int), alpha


def solve_subset(z, atoms, phi, support) -> np.ndarray:
    """Exact least-squares coefficients over a fixed support.

    Solves the normal equations of the selected atoms so that the
    weighted sum is the orthogonal projection of ``z`` onto their span.
    Raises SingularSubsetError when the subset Gram is numerically
    singular (condition number at or above 1e12).
    """
    z = np.asarray(z, dtype=complex)
    atoms = np.asarray(atoms, dtype=complex)
    support = np.asarray(support, dtype=int)
    if support.size == 0:
        return np.zeros(0, dtype=complex)
    if support.size != np.unique(support).size:
        raise UsageError("support indices must be distinct")
    sub = atoms[:, support]
    gram = sub.conj().T @ (phi @ sub)
    gram = (gram + gram.conj().T) / 2.0
    lam = np.linalg.eigvalsh(gram)
    if lam[0] <= 0.0 or lam[-1] >= SUBSET_COND_LIMIT * lam[0]:
        raise SingularSubsetError(
            f"selected atoms are numerically dependent (condition "
            f"{lam[-1] / max(lam[0], np.finfo(float).tiny):.2e})"
        )
    return np.linalg.solve(gram, sub.conj().T @ (phi @ z))


def ormp_naive(z, atoms, phi, n0: int) -> SparseCode:
    """Reference ORMP over explicit working vectors.

    Maintains the orthogonalized copies of all atoms and of the residual;
    each step picks the atom with the largest normalized correlation,
    then projects everything onto the orthogonal complement of the
    selected direction.  Final coefficients solve the exact subset
    least-squares problem.
    """
    z = np.asarray(z, dtype=complex)
    atoms = np.asarray(atoms, dtype=complex)
    _check_problem(atoms, z, n0)
    phi = np.asarray(phi)
    norm_z = herm_norm(z, phi)
    tol_stop = STOP_TOL * norm_z

    deltas = atoms.copy()
    resid = z.copy()
    selected = np.zeros(atoms.shape[1], dtype=bool)
    support: list[int] = []
    for _ in range(min(n0, atoms.shape[1])):
        phi_deltas = phi @ deltas
        norms = np.sqrt(np.maximum(np.real(np.sum(deltas.conj() * phi_deltas, axis=0)), 0.0))
        corr = np.abs(deltas.conj().T @ (phi @ resid))
        eligible = ~selected & (norms > DEPENDENT_ATOM_TOL)
        if not np.any(eligible):
            break
        crit = np.full(atoms.shape[1], -np.inf)
        crit[eligible] = corr[eligible] / norms[eligible]
        best = int(np.argmax(crit))
        if crit[best] <= tol_stop:
            break
        q = deltas[:, best] / norms[best]
        phi_q = phi @ q
        deltas -= np.outer(q, phi_q.conj() @ deltas)
        resid = resid - (phi_q.conj() @ resid) * q
        selected[best] = True
        support.append(best)

    support_arr = np.asarray(support, dtype=int)
    coeffs = solve_subset(z, atoms, phi, support_arr)
    approx = atoms[:, support_arr] @ coeffs if support_arr.size else np.zeros_like(z)
    return SparseCode(support_arr, coeffs, herm_norm(z - approx, phi))


def ormp_cholesky(z, atoms, phi, n0: int, gram=None) -> SparseCode:
    """Gram-based ORMP; same selections and coefficients as ``ormp_naive``.

    ``gram`` is the dictionary Gram matrix (atoms* phi atoms); pass the
    precomputed one when coding many data points against one dictionary.
    Per-step work touches only correlation, norm, and back-substitution
    tables indexed by atom, never the full-length vectors.
    """
    z = np.asarray(z, dtype=complex)
    atoms = np.asarray(atoms, dtype=complex)
    _check_problem(atoms, z, n0)
    phi = np.asarray(phi)
    if gram is None:
        gram = atoms.conj().T @ (phi @ atoms)
        gram = (gram + gram.conj().T) / 2.0
    norm_z = herm_norm(z, phi)
    corr = atoms.conj().T @ (phi @ z)
    support, coeffs = _ormp_on_gram(gram, corr, n0, STOP_TOL * norm_z)
    approx = atoms[:, support] @ coeffs if support.size else np.zeros_like(z)
    return SparseCode(support, coeffs, herm_norm(z - approx, phi))


def ormp_real(x, atoms, n0: int, gram=None) -> SparseCode:
    """Euclidean ORMP with real weights, for real-embedded problems."""
    x = np.asarray(x, dtype=float)
    atoms = np.asarray(atoms, dtype=float)
    _check_problem(atoms, x, n0)
    if gram is None:
        gram = atoms.T @ atoms
        gram = (gram + gram.T) / 2.0
    corr = atoms.T @ x
    support, coeffs = _ormp_on_gram(gram, corr, n0, STOP_TOL * float(np.linalg.norm(x)))
    approx = atoms[:, support] @ coeffs if support.size else np.zeros_like(x)
    return SparseCode(support, coeffs, float(np.linalg.norm(x - approx)))
