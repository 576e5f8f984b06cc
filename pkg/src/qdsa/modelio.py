"""Model and state files: strict JSON schema, parsing and emission.

A model file is a UTF-8 JSON object with keys ``dim``, ``label``,
``hamiltonian``, ``lindblad_ops``, ``kraus_ops``, ``tolerances`` and
``horizon``; exactly one of the generator form (``hamiltonian`` with
optional ``lindblad_ops``) or the channel form (``kraus_ops``) must be
present.  Complex entries are two-element arrays ``[re, im]`` and matrices
are row-major nested arrays.  Unknown keys are rejected outright, which
catches typos early.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channels import LindbladGenerator, QuantumChannel, DensityMatrix
from .errors import NotHermitian, NotPSD, NotUnital, ParseError, ValidationError
from .linalg import DimMismatch, ToleranceConfig
from .models import FIXTURES, build_fixture

__all__ = [
    "ModelSpec",
    "parse_model",
    "model_spec_from_fixture",
    "matrix_to_json",
    "matrix_from_json",
    "parse_state",
]

_MODEL_KEYS = {"dim", "label", "hamiltonian", "lindblad_ops", "kraus_ops",
               "tolerances", "horizon"}
_TOL_KEYS = {"atol", "rank_rtol", "psd_tol"}
_STATE_KEYS = {"dim", "label", "matrix"}


def matrix_to_json(m: np.ndarray):
    """Row-major nested array of [re, im] pairs."""
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]


def _entry_from_json(entry, where: str) -> complex:
    if (not isinstance(entry, (list, tuple)) or len(entry) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)):
        raise ParseError(f"{where}: complex entries must be two-element [re, im] arrays")
    return complex(entry[0], entry[1])


def matrix_from_json(data, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ParseError(f"{where}: expected a nonempty nested array")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or not row:
            raise ParseError(f"{where}: row {i} is not a nonempty array")
        rows.append([_entry_from_json(v, f"{where}[{i}]") for v in row])
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError(f"{where}: ragged rows")
    return np.array(rows, dtype=complex)


@dataclass(frozen=True)
class ModelSpec:
    """A validated model description: exactly one of the two generator forms."""

    dim: int
    label: str
    hamiltonian: np.ndarray | None
    lindblad_ops: tuple | None
    kraus_ops: tuple | None
    tolerances: ToleranceConfig | None
    horizon: float | None

    @property
    def is_channel(self) -> bool:
        return self.kraus_ops is not None

    def build(self):
        """Construct the validated channel or generator."""
        tol = self.tolerances
        try:
            if self.is_channel:
                return QuantumChannel(self.kraus_ops, tol)
            return LindbladGenerator(self.hamiltonian, self.lindblad_ops or (), tol)
        except (NotUnital, NotHermitian, DimMismatch) as exc:
            raise ValidationError(str(exc)) from exc

    def to_json_dict(self) -> dict:
        out: dict = {"dim": self.dim, "label": self.label}
        if self.is_channel:
            out["kraus_ops"] = [matrix_to_json(v) for v in self.kraus_ops]
        else:
            out["hamiltonian"] = matrix_to_json(self.hamiltonian)
            out["lindblad_ops"] = [matrix_to_json(v) for v in self.lindblad_ops]
        if self.tolerances is not None:
            out["tolerances"] = {"atol": self.tolerances.atol,
                                 "rank_rtol": self.tolerances.rank_rtol,
                                 "psd_tol": self.tolerances.psd_tol}
        if self.horizon is not None:
            out["horizon"] = self.horizon
        return out


def _as_model_spec(data, where: str) -> ModelSpec:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: top level must be a JSON object")
    unknown = set(data) - _MODEL_KEYS
    if unknown:
        raise ParseError(f"{where}: unknown keys {sorted(unknown)}")
    if "dim" not in data or not isinstance(data["dim"], int) or isinstance(data["dim"], bool):
        raise ParseError(f"{where}: 'dim' must be an integer")
    dim = data["dim"]
    if dim < 1:
        raise ValidationError(f"{where}: 'dim' must be positive, got {dim}")
    label = data.get("label", "model")
    if not isinstance(label, str):
        raise ParseError(f"{where}: 'label' must be a string")

    has_generator = "hamiltonian" in data or "lindblad_ops" in data
    has_channel = "kraus_ops" in data
    if has_generator and has_channel:
        raise ValidationError(f"{where}: give either a generator or kraus_ops, not both")
    if not has_generator and not has_channel:
        raise ValidationError(f"{where}: one of hamiltonian/lindblad_ops or kraus_ops is required")

    hamiltonian = None
    lindblad_ops = None
    kraus_ops = None
    if has_channel:
        raw = data["kraus_ops"]
        if not isinstance(raw, list) or not raw:
            raise ParseError(f"{where}: 'kraus_ops' must be a nonempty array of matrices")
        kraus_ops = tuple(matrix_from_json(v, f"kraus_ops[{i}]") for i, v in enumerate(raw))
        for i, v in enumerate(kraus_ops):
            if v.shape != (dim, dim):
                raise ValidationError(f"{where}: kraus_ops[{i}] has shape {v.shape}, expected ({dim}, {dim})")
    else:
        if "hamiltonian" not in data:
            raise ValidationError(f"{where}: generator form requires 'hamiltonian'")
        hamiltonian = matrix_from_json(data["hamiltonian"], "hamiltonian")
        if hamiltonian.shape != (dim, dim):
            raise ValidationError(f"{where}: hamiltonian has shape {hamiltonian.shape}, expected ({dim}, {dim})")
        raw = data.get("lindblad_ops", [])
        if not isinstance(raw, list):
            raise ParseError(f"{where}: 'lindblad_ops' must be an array of matrices")
        lindblad_ops = tuple(matrix_from_json(v, f"lindblad_ops[{i}]") for i, v in enumerate(raw))
        for i, v in enumerate(lindblad_ops):
            if v.shape != (dim, dim):
                raise ValidationError(f"{where}: lindblad_ops[{i}] has shape {v.shape}, expected ({dim}, {dim})")

    tolerances = None
    if "tolerances" in data:
        raw = data["tolerances"]
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: 'tolerances' must be an object")
        unknown = set(raw) - _TOL_KEYS
        if unknown:
            raise ParseError(f"{where}: unknown tolerance keys {sorted(unknown)}")
        try:
            tolerances = ToleranceConfig(**{k: float(raw[k]) for k in raw})
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{where}: bad tolerances: {exc}") from exc

    horizon = None
    if "horizon" in data:
        raw = data["horizon"]
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise ParseError(f"{where}: 'horizon' must be a number")
        horizon = float(raw)
        if horizon <= 0:
            raise ValidationError(f"{where}: 'horizon' must be positive, got {horizon}")

    spec = ModelSpec(dim, label, hamiltonian, lindblad_ops, kraus_ops, tolerances, horizon)
    spec.build()  # surface semantic problems (hermiticity, unitality) now
    return spec


def parse_model(path) -> ModelSpec:
    """Read and validate a model file.

    ParseError covers malformed structure (bad JSON, unknown keys, wrong
    entry shapes); ValidationError covers semantic violations (dimension
    mismatches, a non-Hermitian Hamiltonian, a non-unital Kraus family,
    both or neither generator forms present).
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return _as_model_spec(data, str(path))


def model_spec_from_fixture(name: str) -> ModelSpec:
    """ModelSpec for a named fixture (what ``examples emit`` writes)."""
    if name not in FIXTURES:
        raise ValidationError(
            f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    model = build_fixture(name)
    fixture = FIXTURES[name]
    if isinstance(model, QuantumChannel):
        return ModelSpec(model.dim, name, None, None, model.kraus_ops, None, fixture.horizon)
    return ModelSpec(model.dim, name, model.hamiltonian, model.lindblad_ops, None,
                     None, fixture.horizon)


def parse_state(path, dim: int | None = None) -> DensityMatrix:
    """Read a density-matrix file: a JSON object with 'dim' and 'matrix'."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    unknown = set(data) - _STATE_KEYS
    if unknown:
        raise ParseError(f"{path}: unknown keys {sorted(unknown)}")
    if "dim" not in data or "matrix" not in data:
        raise ParseError(f"{path}: 'dim' and 'matrix' are required")
    if not isinstance(data["dim"], int) or isinstance(data["dim"], bool):
        raise ParseError(f"{path}: 'dim' must be an integer")
    m = matrix_from_json(data["matrix"], "matrix")
    if m.shape != (data["dim"], data["dim"]):
        raise ValidationError(f"{path}: matrix shape {m.shape} does not match dim {data['dim']}")
    if dim is not None and data["dim"] != dim:
        raise ValidationError(f"{path}: state dimension {data['dim']} does not match model dimension {dim}")
    try:
        return DensityMatrix(m)
    except (NotPSD, ValueError, DimMismatch) as exc:
        raise ValidationError(f"{path}: not a density matrix: {exc}") from exc
