"""Comparison baselines: complex PCA and the align-first dictionary.

Complex PCA extracts metric-orthonormal modes from the data operator;
reconstructing with the first few modes is the natural undercomplete
baseline with complex weights but fixed atom directions.

The align-first method is the classical alternative to complex weights:
every pre-shape is optimally rotated along a single reference (the mean
shape), and a standard real-weight dictionary is then learned in the
isometrically flattened space.  Real weights can scale but not rotate
atoms inside the weighted sums, which is exactly what the complex-weight
learner improves upon.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .configspace import Metric
from .dictlearn import (
    Dictionary,
    LearnConfig,
    LearnReport,
    SparseCode,
    _alternate_minimization,
    codes_to_matrix,
)
from .errors import UsageError
from .linalg import herm_eig
from .ormp import ormp_real
from .shapespace import DECORRELATION_TOL, frechet_mean


@dataclass(eq=False)
class PcaModel:
    """Complex principal modes of a dataset of configurations.

    ``modes`` columns are metric-orthonormal; ``eigenvalues`` are the
    nonnegative energies along them, descending.  ``dataset_mean`` is the
    coefficient-wise average subtracted before the analysis (zero when it
    was kept).  ``total_energy`` is the summed squared norm of the
    (centered) data, so the reconstruction loss with the first n modes is
    ``total_energy - eigenvalues[:n].sum()``.
    """

    modes: np.ndarray
    eigenvalues: np.ndarray
    dataset_mean: np.ndarray
    metric: Metric
    n_samples: int
    total_energy: float


def complex_pca(data, metric: Metric, n_modes: int, subtract_mean: bool = True) -> PcaModel:
    """Top eigenvectors of the data operator under the metric.

    The modes maximize the summed squared correlations with the data
    among metric-orthonormal families.  By default the coefficient-wise
    arithmetic average of the dataset is subtracted first and stored in
    the model; pass ``subtract_mean=False`` to analyze the raw data.
    """
    data = np.asarray(data, dtype=complex)
    if data.ndim != 2 or data.shape[0] < 1:
        raise UsageError("need a nonempty K-by-N array of configurations")
    if n_modes < 1 or n_modes > metric.n:
        raise UsageError(f"number of modes must lie in [1, {metric.n}]")
    mean = data.mean(axis=0) if subtract_mean else np.zeros(metric.n, dtype=complex)
    centered = (data - mean).T
    op = (centered @ centered.conj().T) @ metric.phi
    pairs = herm_eig(op, metric.phi)
    energy = float(np.sum(np.real(centered.conj() * (metric.phi @ centered))))
    return PcaModel(
        modes=pairs.eigenvectors[:, :n_modes],
        eigenvalues=np.maximum(pairs.eigenvalues[:n_modes], 0.0),
        dataset_mean=mean,
        metric=metric,
        n_samples=data.shape[0],
        total_energy=energy,
    )


def pca_code(z, model: PcaModel, n0: int) -> np.ndarray:
    """Best approximation of ``z`` by the first ``n0`` modes."""
    if n0 < 0 or n0 > model.modes.shape[1]:
        raise UsageError(f"mode count must lie in [0, {model.modes.shape[1]}]")
    z = np.asarray(z, dtype=complex)
    used = model.modes[:, :n0]
    return used @ (used.conj().T @ (model.metric.phi @ z))


def pca_rmse(model: PcaModel, n0: int) -> float:
    """Root mean square reconstruction error with the first n0 modes."""
    loss = model.total_energy - float(np.sum(model.eigenvalues[:n0]))
    return float(np.sqrt(max(loss, 0.0) / model.n_samples))


def align_dataset(data, reference, metric: Metric) -> tuple[np.ndarray, np.ndarray]:
    """Optimally rotate every pre-shape along one reference pre-shape.

    Returns the rotated dataset and a boolean mask of the entries that
    were decorrelated from the reference (left unchanged: no rotation is
    better than any other for them).  After alignment each correlation
    with the reference is real and nonnegative.
    """
    data = np.asarray(data, dtype=complex)
    reference = np.asarray(reference, dtype=complex)
    corr = data.conj() @ (metric.phi @ reference)  # entry k: z_k* phi ref
    decorrelated = np.abs(corr) <= DECORRELATION_TOL
    # The optimal rotation angle of z along ref is arg(z* phi ref), so the
    # normalized correlation is exactly the rotation factor to apply.
    phase = np.where(decorrelated, 1.0, corr / np.where(decorrelated, 1.0, np.abs(corr)))
    return data * phase[:, None], decorrelated


def _stack_real(zmat: np.ndarray) -> np.ndarray:
    return np.vstack([zmat.real, zmat.imag])


def _unstack_complex(ymat: np.ndarray) -> np.ndarray:
    n = ymat.shape[0] // 2
    return ymat[:n] + 1j * ymat[n:]


def align_first_learn(
    data,
    metric: Metric,
    cfg: LearnConfig,
    *,
    align: bool = True,
    reference_index: Optional[int] = None,
) -> tuple[Dictionary, list[SparseCode], LearnReport]:
    """Real-weight dictionary learning on a pre-rotated dataset.

    The dataset is optimally rotated along its mean shape (or along the
    datum at ``reference_index``), mapped isometrically to real stacked
    coordinates through the metric square root, and fed to the real-weight
    version of the learner.  The returned atoms are mapped back to
    pre-shapes; the reported loss is the same squared metric norm used by
    the complex-weight learner, measured against the *aligned* data.

    ``align=False`` skips the rotation step (useful to isolate the effect
    of real weights).
    """
    data = np.asarray(data, dtype=complex)
    if data.ndim != 2 or data.shape[0] == 0:
        raise UsageError("dataset is empty")
    start = time.perf_counter()
    if align:
        if reference_index is None:
            reference = frechet_mean(data, metric)
        else:
            reference = data[reference_index]
        aligned, _ = align_dataset(data, reference, metric)
    else:
        aligned = data

    sqrt_phi, inv_sqrt_phi = metric.sqrt_pair
    ymat = _stack_real(sqrt_phi @ aligned.T)

    def make_coder(atoms: np.ndarray):
        gram = atoms.T @ atoms
        gram = (gram + gram.T) / 2.0
        return lambda x: ormp_real(x, atoms, cfg.sparsity, gram=gram)

    atoms_real, codes, history, replacements, usage, _ = _alternate_minimization(
        ymat,
        cfg,
        None,
        np.random.default_rng(cfg.seed),
        make_coder,
        lambda a: np.linalg.norm(a, axis=0),
        lambda resid: float(np.sum(resid * resid)),
    )

    atoms = inv_sqrt_phi @ _unstack_complex(atoms_real)
    norms = np.sqrt(np.maximum(np.real(np.sum(atoms.conj() * (metric.phi @ atoms), axis=0)), 0.0))
    atoms = atoms / np.where(norms > 0.0, norms, 1.0)
    dictionary = Dictionary(atoms=atoms, metric=metric, usage=usage)

    amat = codes_to_matrix(codes, cfg.atoms)
    resid = aligned.T - atoms @ amat.astype(complex)
    final_loss = float(np.sum(np.real(resid.conj() * (metric.phi @ resid))))
    report = LearnReport(
        loss_history=history,
        final_rmse=float(np.sqrt(final_loss / data.shape[0])),
        atom_replacements=replacements,
        wall_time=time.perf_counter() - start,
    )
    return dictionary, codes, report
