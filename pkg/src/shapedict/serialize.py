"""JSON file formats for datasets, dictionaries, and sparse codes.

All artifacts are JSON objects with a ``format`` tag.  Complex numbers
are stored as ``[re, im]`` pairs; floats use the shortest decimal
representation that round-trips exactly, so save/load preserves every
value bit for bit.  Validation is strict: unknown fields and wrong
dimensions are rejected with errors naming the offending location.

Dataset files::

    {"format": "shapedict/dataset",
     "metric": {"kind": "landmarks" | "bspline_closed", "size": N}
             | {"kind": "custom", "size": N,
                "phi": [[[re, im], ...], ...], "shift": [[re, im], ...]},
     "shapes": [[[re, im], ...N pairs], ...],
     "labels": [...]}                      # optional, one entry per shape

Dictionary files add the learned atoms, a configuration echo, and the
loss history; atoms are re-verified as pre-shapes on load.  Codes files
hold one ``{"support": [...], "coefficients": [...], "residual_norm": r}``
object per datum.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .configspace import Dataset, Metric, MetricKind, is_preshape
from .dictlearn import Dictionary, LearnConfig
from .errors import FormatError
from .ormp import SparseCode

DATASET_FORMAT = "shapedict/dataset"
DICTIONARY_FORMAT = "shapedict/dictionary"
CODES_FORMAT = "shapedict/codes"

#: Tolerance when re-verifying loaded dictionary atoms as pre-shapes.
ATOM_ROUNDTRIP_TOL = 1e-8


def _require_keys(obj, required: set, optional: set, loc: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{loc}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in required and key not in optional:
            raise FormatError(f"{loc}: unknown field {key!r}")
    for key in required:
        if key not in obj:
            raise FormatError(f"{loc}: missing field {key!r}")


def _pair(value, loc: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise FormatError(f"{loc}: expected an [re, im] pair")
    return complex(value[0], value[1])


def _pair_list(values, n: Optional[int], loc: str) -> np.ndarray:
    if not isinstance(values, list):
        raise FormatError(f"{loc}: expected a list")
    if n is not None and len(values) != n:
        raise FormatError(f"{loc}: expected {n} entries, got {len(values)}")
    return np.array([_pair(v, f"{loc}[{i}]") for i, v in enumerate(values)], dtype=complex)


def _encode_complex(values) -> list:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 1:
        return [[float(v.real), float(v.imag)] for v in arr]
    return [_encode_complex(row) for row in arr]


def _metric_to_json(metric: Metric) -> dict:
    doc = {"kind": metric.kind.value, "size": metric.n}
    if metric.kind is MetricKind.CUSTOM:
        doc["phi"] = _encode_complex(metric.phi)
        doc["shift"] = _encode_complex(metric.shift)
    return doc


def _metric_from_json(doc, loc: str) -> Metric:
    _require_keys(doc, {"kind", "size"}, {"phi", "shift"}, loc)
    kind = doc["kind"]
    size = doc["size"]
    if not isinstance(size, int) or size < 1:
        raise FormatError(f"{loc}.size: expected a positive integer")
    if kind == MetricKind.LANDMARKS.value:
        return Metric.landmarks(size)
    if kind == MetricKind.BSPLINE_CLOSED.value:
        return Metric.bspline_closed(size)
    if kind == MetricKind.CUSTOM.value:
        if "phi" not in doc or "shift" not in doc:
            raise FormatError(f"{loc}: custom metric needs 'phi' and 'shift'")
        phi_doc = doc["phi"]
        if not isinstance(phi_doc, list) or len(phi_doc) != size:
            raise FormatError(f"{loc}.phi: expected {size} rows")
        phi = np.array(
            [_pair_list(row, size, f"{loc}.phi[{i}]") for i, row in enumerate(phi_doc)]
        )
        shift = _pair_list(doc["shift"], size, f"{loc}.shift")
        return Metric.custom(phi, shift)
    raise FormatError(f"{loc}.kind: unknown metric kind {kind!r}")


def _dump(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def _load(path, expected_format: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object at the top level")
    if doc.get("format") != expected_format:
        raise FormatError(
            f"{path}: expected format {expected_format!r}, got {doc.get('format')!r}"
        )
    return doc


def save_dataset(dataset: Dataset, path) -> None:
    doc = {
        "format": DATASET_FORMAT,
        "metric": _metric_to_json(dataset.metric),
        "shapes": _encode_complex(dataset.shapes) if len(dataset) else [],
    }
    if dataset.labels is not None:
        doc["labels"] = list(dataset.labels)
    _dump(doc, path)


def load_dataset(path) -> Dataset:
    doc = _load(path, DATASET_FORMAT)
    _require_keys(doc, {"format", "metric", "shapes"}, {"labels"}, "$")
    metric = _metric_from_json(doc["metric"], "$.metric")
    shapes_doc = doc["shapes"]
    if not isinstance(shapes_doc, list):
        raise FormatError("$.shapes: expected a list")
    shapes = np.zeros((len(shapes_doc), metric.n), dtype=complex)
    for i, row in enumerate(shapes_doc):
        shapes[i] = _pair_list(row, metric.n, f"$.shapes[{i}]")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list):
            raise FormatError("$.labels: expected a list")
        if len(labels) != len(shapes_doc):
            raise FormatError(
                f"$.labels: {len(labels)} labels for {len(shapes_doc)} shapes"
            )
    return Dataset(shapes=shapes, metric=metric, labels=labels)


def save_dictionary(
    dictionary: Dictionary,
    path,
    config: Optional[LearnConfig] = None,
    loss_history: Optional[Sequence[float]] = None,
    weights: str = "complex",
) -> None:
    doc = {
        "format": DICTIONARY_FORMAT,
        "metric": _metric_to_json(dictionary.metric),
        "atoms": _encode_complex(dictionary.atoms.T),
        "weights": weights,
        "config": None
        if config is None
        else {
            "atoms": config.atoms,
            "sparsity": config.sparsity,
            "iterations": config.iterations,
            "seed": config.seed,
            "batch_size": config.batch_size,
            "dead_atom_usage_threshold": config.dead_atom_usage_threshold,
        },
        "loss_history": [float(v) for v in loss_history] if loss_history else [],
    }
    _dump(doc, path)


def load_dictionary(path) -> tuple[Dictionary, dict]:
    """Load a dictionary plus its metadata (config echo, loss history)."""
    doc = _load(path, DICTIONARY_FORMAT)
    _require_keys(
        doc, {"format", "metric", "atoms"}, {"weights", "config", "loss_history"}, "$"
    )
    metric = _metric_from_json(doc["metric"], "$.metric")
    atoms_doc = doc["atoms"]
    if not isinstance(atoms_doc, list) or not atoms_doc:
        raise FormatError("$.atoms: expected a nonempty list")
    atoms = np.zeros((metric.n, len(atoms_doc)), dtype=complex)
    for j, row in enumerate(atoms_doc):
        atom = _pair_list(row, metric.n, f"$.atoms[{j}]")
        if not is_preshape(atom, metric, tol=ATOM_ROUNDTRIP_TOL):
            raise FormatError(f"$.atoms[{j}]: atom is not a pre-shape under the metric")
        atoms[:, j] = atom
    meta = {
        "weights": doc.get("weights", "complex"),
        "config": doc.get("config"),
        "loss_history": doc.get("loss_history", []),
    }
    return Dictionary(atoms=atoms, metric=metric), meta


def save_codes(codes: Sequence[SparseCode], path, sparsity: int, weights: str = "complex") -> None:
    doc = {
        "format": CODES_FORMAT,
        "sparsity": sparsity,
        "weights": weights,
        "codes": [
            {
                "support": [int(j) for j in code.support],
                "coefficients": _encode_complex(code.coefficients),
                "residual_norm": float(code.residual_norm),
            }
            for code in codes
        ],
    }
    _dump(doc, path)


def load_codes(path) -> tuple[list[SparseCode], dict]:
    doc = _load(path, CODES_FORMAT)
    _require_keys(doc, {"format", "sparsity", "codes"}, {"weights"}, "$")
    weights = doc.get("weights", "complex")
    codes: list[SparseCode] = []
    codes_doc = doc["codes"]
    if not isinstance(codes_doc, list):
        raise FormatError("$.codes: expected a list")
    for k, entry in enumerate(codes_doc):
        loc = f"$.codes[{k}]"
        _require_keys(entry, {"support", "coefficients", "residual_norm"}, set(), loc)
        support = entry["support"]
        if not isinstance(support, list) or not all(isinstance(j, int) for j in support):
            raise FormatError(f"{loc}.support: expected a list of integers")
        coeffs = _pair_list(entry["coefficients"], len(support), f"{loc}.coefficients")
        if weights == "real":
            if np.any(coeffs.imag != 0.0):
                raise FormatError(f"{loc}.coefficients: real-weight code has imaginary parts")
            coeffs = coeffs.real
        codes.append(
            SparseCode(
                support=np.asarray(support, dtype=int),
                coefficients=coeffs,
                residual_norm=float(entry["residual_norm"]),
            )
        )
    return codes, {"weights": weights, "sparsity": doc["sparsity"]}
