"""Dictionary learning for planar shapes with complex sparse weights.

The learner alternates two steps over a dataset of pre-shapes:

1. sparse coding: each datum gets a complex weight vector with at most
   ``sparsity`` nonzeros, computed by Gram-based ORMP against the current
   dictionary (independently per datum, parallelizable);
2. dictionary update: the closed-form least-squares optimum
   ``data @ pinv(codes)`` replaces the dictionary, whose columns are then
   rescaled back onto the pre-shape sphere.  Columns that collapsed or
   went unused are replaced by pre-shapes drawn from the dataset.

Because the weights are complex, every atom is rotated and scaled inside
each weighted sum, so the dataset never needs pre-alignment; the coding
residual of a datum equals the full Procrustes distance between the datum
and its normalized reconstruction.
"""

from __future__ import annotations

import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .configspace import Metric, preshape_defect
from .errors import DatasetTooSmallError, UsageError
from .linalg import pinv
from .ormp import SparseCode, ormp_cholesky

#: Atom columns with norm at or below this are considered collapsed.
COLLAPSED_ATOM_TOL = 1e-10

#: Environment variable capping the coding-pass worker count (0 = auto).
THREADS_ENV = "KSD_THREADS"


@dataclass(eq=False)
class Dictionary:
    """Learned dictionary: one pre-shape atom per column, one shared metric."""

    atoms: np.ndarray
    metric: Metric
    usage: np.ndarray = field(default=None)

    def __post_init__(self):
        self.atoms = np.asarray(self.atoms, dtype=complex)
        if self.atoms.ndim != 2 or self.atoms.shape[1] < 1:
            raise UsageError("dictionary needs at least one atom column")
        if self.atoms.shape[0] != self.metric.n:
            raise UsageError(
                f"atom length {self.atoms.shape[0]} does not match metric size {self.metric.n}"
            )
        if self.usage is None:
            self.usage = np.zeros(self.atoms.shape[1], dtype=int)
        self.usage = np.asarray(self.usage, dtype=int)

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]

    def gram(self) -> np.ndarray:
        g = self.atoms.conj().T @ (self.metric.phi @ self.atoms)
        return (g + g.conj().T) / 2.0


@dataclass
class LearnConfig:
    """Parameters of a learning run.

    ``batch_size`` = 0 recodes the whole dataset every iteration; a
    positive value recodes one random batch per iteration instead (codes
    start at zero), for large datasets.  ``dead_atom_usage_threshold`` is
    the usage count at or below which an atom counts as under-utilized
    and gets replaced (0 = replace only never-used atoms).
    """

    atoms: int
    sparsity: int
    iterations: int
    seed: int = 0
    batch_size: int = 0
    dead_atom_usage_threshold: int = 0

    def __post_init__(self):
        if self.atoms < 1:
            raise UsageError("need at least one atom")
        if not 1 <= self.sparsity <= self.atoms:
            raise UsageError(
                f"sparsity must lie in [1, {self.atoms}], got {self.sparsity}"
            )
        if self.iterations < 1:
            raise UsageError("need at least one iteration")
        if self.batch_size < 0 or self.dead_atom_usage_threshold < 0:
            raise UsageError("batch size and usage threshold must be nonnegative")


@dataclass
class LearnReport:
    """Loss trace and summary of one learning run.

    ``loss_history`` holds the total squared reconstruction error after
    every coding pass (the last entry belongs to the final full pass that
    produced the returned codes); ``final_rmse`` is
    ``sqrt(loss_history[-1] / K)``.
    """

    loss_history: list[float]
    final_rmse: float
    atom_replacements: int
    wall_time: float


def codes_to_matrix(codes: Sequence[SparseCode], n_atoms: int) -> np.ndarray:
    """Stack sparse codes into the dense weight matrix (atoms x data)."""
    dtype = complex
    if codes and codes[0].coefficients.dtype.kind == "f":
        dtype = float
    amat = np.zeros((n_atoms, len(codes)), dtype=dtype)
    for k, code in enumerate(codes):
        amat[code.support, k] = code.coefficients
    return amat


def usage_counts(codes: Sequence[SparseCode], n_atoms: int) -> np.ndarray:
    """How many codes select each atom."""
    counts = np.zeros(n_atoms, dtype=int)
    for code in codes:
        counts[code.support] += 1
    return counts


def mod_update(data_matrix: np.ndarray, code_matrix: np.ndarray) -> np.ndarray:
    """Least-squares dictionary update ``Z pinv(A)`` for fixed codes.

    Minimizes the total squared reconstruction error over all dictionaries
    at once; the optimum does not depend on the metric matrix, so the
    plain pseudo-inverse solves the problem for every metric.
    """
    data_matrix = np.asarray(data_matrix)
    code_matrix = np.asarray(code_matrix)
    if data_matrix.ndim != 2 or code_matrix.ndim != 2:
        raise UsageError("mod_update expects matrices")
    if data_matrix.shape[1] != code_matrix.shape[1]:
        raise UsageError(
            f"data has {data_matrix.shape[1]} columns but codes have "
            f"{code_matrix.shape[1]}"
        )
    return data_matrix @ pinv(code_matrix)


def _renormalize_and_replace_matrix(
    raw: np.ndarray,
    pool: np.ndarray,
    col_norms: Callable[[np.ndarray], np.ndarray],
    usage: np.ndarray,
    threshold: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    norms = col_norms(raw)
    dead = (norms <= COLLAPSED_ATOM_TOL) | (usage <= threshold)
    atoms = raw / np.where(dead, 1.0, norms)
    n_dead = int(dead.sum())
    if n_dead:
        if n_dead > pool.shape[1]:
            raise DatasetTooSmallError(
                f"{n_dead} atoms need replacement but the dataset holds only "
                f"{pool.shape[1]} shapes"
            )
        picks = rng.choice(pool.shape[1], size=n_dead, replace=False)
        atoms[:, dead] = pool[:, picks]
    return atoms, n_dead


def renormalize_and_replace(
    raw: np.ndarray,
    data: np.ndarray,
    metric: Metric,
    usage: np.ndarray,
    rng: np.random.Generator,
    threshold: int = 0,
) -> Dictionary:
    """Scale dictionary columns back to unit norm; replace dead ones.

    Columns with vanishing norm or with usage at or below ``threshold``
    are replaced by distinct pre-shapes drawn from ``data`` (rows) without
    replacement using the supplied generator.
    """
    data = np.asarray(data, dtype=complex)
    if data.ndim != 2 or data.shape[0] < 1:
        raise UsageError("need a nonempty dataset of pre-shapes")
    atoms, _ = _renormalize_and_replace_matrix(
        np.asarray(raw, dtype=complex),
        data.T,
        lambda a: _phi_col_norms(a, metric.phi),
        np.asarray(usage, dtype=int),
        threshold,
        rng,
    )
    return Dictionary(atoms=atoms, metric=metric)


def _phi_col_norms(a: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(np.real(np.sum(a.conj() * (phi @ a), axis=0)), 0.0))


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if n == 0:
        return os.cpu_count() or 1
    return max(n, 1)


def _code_pass(xmat: np.ndarray, coder, indices: Sequence[int]) -> list[SparseCode]:
    """Code the given columns; results are in index order regardless of
    the number of workers."""
    workers = _worker_count()
    if workers <= 1 or len(indices) < 4 * workers:
        return [coder(xmat[:, k]) for k in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda k: coder(xmat[:, k]), indices))


def _empty_code(dtype) -> SparseCode:
    return SparseCode(
        np.zeros(0, dtype=int), np.zeros(0, dtype=dtype), float("nan")
    )


def _alternate_minimization(
    xmat: np.ndarray,
    cfg: LearnConfig,
    init_atoms: Optional[np.ndarray],
    rng: np.random.Generator,
    make_coder,
    col_norms: Callable[[np.ndarray], np.ndarray],
    loss_of_residual: Callable[[np.ndarray], float],
):
    """Shared alternation loop for the complex and real learners.

    ``make_coder(atoms)`` returns a per-datum coding closure bound to the
    current dictionary (with its Gram precomputed); ``col_norms`` and
    ``loss_of_residual`` carry the geometry of the ambient space.
    """
    n_data = xmat.shape[1]
    if init_atoms is None:
        picks = rng.choice(n_data, size=cfg.atoms, replace=n_data < cfg.atoms)
        atoms = xmat[:, picks].copy()
    else:
        atoms = np.array(init_atoms, copy=True)

    batch_mode = cfg.batch_size > 0
    codes: list[SparseCode] = [_empty_code(xmat.dtype)] * n_data if batch_mode else []
    history: list[float] = []
    replacements = 0

    for _ in range(cfg.iterations):
        coder = make_coder(atoms)
        if batch_mode:
            batch = np.sort(rng.choice(n_data, size=min(cfg.batch_size, n_data), replace=False))
            refreshed = _code_pass(xmat, coder, list(batch))
            for k, code in zip(batch, refreshed):
                codes[k] = code
        else:
            codes = _code_pass(xmat, coder, range(n_data))
        amat = codes_to_matrix(codes, cfg.atoms)
        history.append(loss_of_residual(xmat - atoms @ amat))
        usage = usage_counts(codes, cfg.atoms)
        raw = mod_update(xmat, amat)
        atoms, n_dead = _renormalize_and_replace_matrix(
            raw, xmat, col_norms, usage, cfg.dead_atom_usage_threshold, rng
        )
        replacements += n_dead

    coder = make_coder(atoms)
    codes = _code_pass(xmat, coder, range(n_data))
    amat = codes_to_matrix(codes, cfg.atoms)
    final_loss = loss_of_residual(xmat - atoms @ amat)
    history.append(final_loss)
    usage = usage_counts(codes, cfg.atoms)
    return atoms, codes, history, replacements, usage, final_loss


def learn(
    data: np.ndarray,
    metric: Metric,
    cfg: LearnConfig,
    init: Optional[Dictionary | np.ndarray] = None,
) -> tuple[Dictionary, list[SparseCode], LearnReport]:
    """Learn a dictionary of pre-shape atoms with complex sparse weights.

    ``data`` is a K-by-N array of pre-shapes under ``metric``.  The
    default initialization takes ``cfg.atoms`` distinct dataset elements
    chosen by the seeded generator; pass ``init`` to start from a given
    dictionary instead.  Identical inputs give bit-identical results
    regardless of the worker count.
    """
    data = np.asarray(data, dtype=complex)
    if data.ndim != 2 or data.shape[0] == 0:
        raise UsageError("dataset is empty")
    if data.shape[1] != metric.n:
        raise UsageError(
            f"shapes of length {data.shape[1]} do not match metric size {metric.n}"
        )
    worst = max(preshape_defect(z, metric) for z in data)
    if worst > 1e-6:
        raise UsageError(
            f"dataset entries are not pre-shapes (defect {worst:.2e}); "
            "run configspace.preshape first"
        )
    if data.shape[0] < cfg.atoms:
        warnings.warn(
            f"dataset has {data.shape[0]} shapes for {cfg.atoms} atoms; "
            "initialization will repeat elements"
        )
    init_atoms = None
    if init is not None:
        if isinstance(init, Dictionary):
            metric.require_same(init.metric)
            init_atoms = init.atoms
        else:
            init_atoms = np.asarray(init, dtype=complex)
        if init_atoms.shape != (metric.n, cfg.atoms):
            raise UsageError(
                f"initial dictionary of shape {init_atoms.shape} does not match "
                f"({metric.n}, {cfg.atoms})"
            )

    phi = metric.phi
    start = time.perf_counter()

    def make_coder(atoms: np.ndarray):
        gram = atoms.conj().T @ (phi @ atoms)
        gram = (gram + gram.conj().T) / 2.0
        return lambda z: ormp_cholesky(z, atoms, phi, cfg.sparsity, gram=gram)

    def loss_of_residual(resid: np.ndarray) -> float:
        return float(np.sum(np.real(resid.conj() * (phi @ resid))))

    atoms, codes, history, replacements, usage, final_loss = _alternate_minimization(
        data.T,
        cfg,
        init_atoms,
        np.random.default_rng(cfg.seed),
        make_coder,
        lambda a: _phi_col_norms(a, phi),
        loss_of_residual,
    )
    report = LearnReport(
        loss_history=history,
        final_rmse=float(np.sqrt(final_loss / data.shape[0])),
        atom_replacements=replacements,
        wall_time=time.perf_counter() - start,
    )
    return Dictionary(atoms=atoms, metric=metric, usage=usage), codes, report


def reconstruct(
    dictionary: Dictionary, code: SparseCode
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Weighted atom sum of a code, raw and projected to a pre-shape.

    The pre-shape is the raw sum rescaled to unit norm (it is already
    centered); ``None`` when the sum collapses to zero.
    """
    raw = np.zeros(dictionary.metric.n, dtype=complex)
    if code.support.size:
        raw = dictionary.atoms[:, code.support] @ code.coefficients
    nrm = dictionary.metric.norm(raw)
    if nrm <= 1e-12:
        return raw, None
    return raw, raw / nrm


def loss_and_rmse(
    data: np.ndarray,
    metric: Metric,
    dictionary: Dictionary | np.ndarray,
    codes: Sequence[SparseCode],
) -> tuple[float, float]:
    """Total squared reconstruction error and its root mean square.

    Always recomputed from scratch out of the residuals; never read off
    incremental state.
    """
    data = np.asarray(data, dtype=complex)
    if data.shape[0] == 0:
        raise UsageError("dataset is empty")
    if len(codes) != data.shape[0]:
        raise UsageError(f"{len(codes)} codes for {data.shape[0]} shapes")
    atoms = dictionary.atoms if isinstance(dictionary, Dictionary) else np.asarray(dictionary)
    amat = codes_to_matrix(codes, atoms.shape[1])
    resid = data.T - atoms @ amat
    loss = float(np.sum(np.real(resid.conj() * (metric.phi @ resid))))
    return loss, float(np.sqrt(loss / data.shape[0]))
