"""Full structural analysis of one model, with a machine-readable report.

``run_analyze`` chains the asymptotics pipeline (stationary space, minimal
enclosures, recurrent projection, decay ideal) and re-validates every
structural law it relies on, recording each as a named check with its
residual and tolerance.  The report serializes to JSON; projections are
stored as rank plus range basis and re-validate on load.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    DEFAULT_DECAY_TOL,
    DEFAULT_HORIZON,
    decay_ideal_test,
    recurrent_projection,
    restricted_stationary_dim,
    stationary_space,
)
from .errors import ValidationError
from .harmonic import subharmonic_residual
from .linalg import (
    Projection,
    ToleranceConfig,
    hermitian_part,
    opnorm,
    support_projection,
)
from .modelio import ModelSpec

__all__ = [
    "AnalysisOptions",
    "CheckResult",
    "AnalysisReport",
    "run_analyze",
    "default_seed",
]

_SEED_ENV = "QDS_SEED"


def default_seed() -> int:
    """Seed from the QDS_SEED environment variable, else 42."""
    raw = os.environ.get(_SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"{_SEED_ENV} must be an integer, got {raw!r}") from exc


@dataclass(frozen=True)
class AnalysisOptions:
    horizon: float | None = None
    tol: ToleranceConfig | None = None
    seed: int | None = None
    decay_tol: float = DEFAULT_DECAY_TOL


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_json_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual,
                "tolerance": self.tolerance, "passed": self.passed}


def _projection_to_json(p: Projection) -> dict:
    return {"rank": p.rank,
            "range_basis": [[[float(v.real), float(v.imag)] for v in p.range_basis[:, j]]
                            for j in range(p.rank)]}


def _projection_from_json(data, dim: int) -> Projection:
    rank = data["rank"]
    cols = data["range_basis"]
    if len(cols) != rank:
        raise ValidationError("projection rank does not match its basis")
    basis = np.zeros((dim, rank), dtype=complex)
    for j, col in enumerate(cols):
        if len(col) != dim:
            raise ValidationError("projection basis column has wrong length")
        basis[:, j] = [complex(re, im) for re, im in col]
    p = Projection.from_range_basis(basis, dim)
    return Projection.from_matrix(p.matrix)  # re-validate on load


@dataclass(frozen=True)
class AnalysisReport:
    label: str
    dim: int
    kind: str
    horizon: float
    stationary_dim: int
    enclosure_ranks: tuple
    is_unique: bool
    fixed_algebra_dim: int
    recurrent: Projection
    stationary_support: Projection
    sup_deviation: float
    transient_norm: float
    decay_ideal_rank: int
    faithful_family: bool
    supports_match: bool
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "kind": self.kind,
            "horizon": self.horizon,
            "stationary_dim": self.stationary_dim,
            "enclosure_ranks": list(self.enclosure_ranks),
            "is_unique": self.is_unique,
            "fixed_algebra_dim": self.fixed_algebra_dim,
            "recurrent": _projection_to_json(self.recurrent),
            "stationary_support": _projection_to_json(self.stationary_support),
            "sup_deviation": self.sup_deviation,
            "transient_norm": self.transient_norm,
            "decay_ideal_rank": self.decay_ideal_rank,
            "faithful_family": self.faithful_family,
            "supports_match": self.supports_match,
            "checks": [c.to_json_dict() for c in self.checks],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "AnalysisReport":
        dim = data["dim"]
        return cls(
            label=data["label"],
            dim=dim,
            kind=data["kind"],
            horizon=data["horizon"],
            stationary_dim=data["stationary_dim"],
            enclosure_ranks=tuple(data["enclosure_ranks"]),
            is_unique=data["is_unique"],
            fixed_algebra_dim=data["fixed_algebra_dim"],
            recurrent=_projection_from_json(data["recurrent"], dim),
            stationary_support=_projection_from_json(data["stationary_support"], dim),
            sup_deviation=data["sup_deviation"],
            transient_norm=data["transient_norm"],
            decay_ideal_rank=data["decay_ideal_rank"],
            faithful_family=data["faithful_family"],
            supports_match=data["supports_match"],
            checks=tuple(CheckResult(c["name"], c["residual"], c["tolerance"])
                         for c in data["checks"]),
        )

    def pretty(self) -> str:
        lines = [
            f"model {self.label} (dim {self.dim}, {self.kind}), horizon {self.horizon:g}",
            f"  stationary dimension   {self.stationary_dim}",
            f"  enclosure ranks        {list(self.enclosure_ranks)}"
            f"  (unique: {'yes' if self.is_unique else 'no'})",
            f"  recurrent rank         {self.recurrent.rank}",
            f"  stationary supp rank   {self.stationary_support.rank}",
            f"  decay ideal rank       {self.decay_ideal_rank}",
            f"  sup deviation          {self.sup_deviation:.3e}",
            f"  transient norm         {self.transient_norm:.3e}",
            f"  faithful family        {'yes' if self.faithful_family else 'no'}",
        ]
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"  [{status}] {c.name:<32} residual {c.residual:.3e}"
                         f" (tol {c.tolerance:.1e})")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _matrix_units(dim: int):
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            yield unit


def run_analyze(spec, options: AnalysisOptions | None = None) -> AnalysisReport:
    """Analyze a ModelSpec (or a bare channel/generator).

    The returned report carries a pass/fail check per structural law; the
    CLI maps an overall failure to a nonzero exit code.
    """
    options = options or AnalysisOptions()
    if isinstance(spec, ModelSpec):
        model = spec.build()
        label = spec.label
        horizon = options.horizon or spec.horizon or DEFAULT_HORIZON
        tol = options.tol or spec.tolerances
    else:
        model = spec
        label = type(spec).__name__
        horizon = options.horizon or DEFAULT_HORIZON
        tol = options.tol
    tol = tol or ToleranceConfig()
    seed = options.seed if options.seed is not None else default_seed()
    decay_tol = options.decay_tol

    report = recurrent_projection(model, horizon=horizon, tol=tol, seed=seed)
    space = stationary_space(model, tol)
    decomposition = report.enclosures
    r_min = report.recurrent

    checks = []
    checks.append(CheckResult("recurrent-limit-identity", report.sup_deviation, decay_tol))
    checks.append(CheckResult("transient-decay", report.transient_norm, decay_tol))
    checks.append(CheckResult(
        "supports-match",
        opnorm(r_min.matrix - report.stationary_support.matrix), 100 * tol.atol))
    checks.append(CheckResult(
        "faithful-implies-full-recurrent",
        float(model.dim - r_min.rank) if report.faithful_family else 0.0, 0.5))

    ortho = 0.0
    subharm = 0.0
    minimal_defect = 0.0
    for i, p in enumerate(decomposition.minimal_projections):
        subharm = max(subharm, subharmonic_residual(model, p))
        sdim, state = restricted_stationary_dim(model, p, tol)
        supp_rank = support_projection(state.matrix, tol).rank
        minimal_defect = max(minimal_defect, float(abs(sdim - 1) + (p.rank - supp_rank)))
        for q in decomposition.minimal_projections[i + 1:]:
            ortho = max(ortho, opnorm(p.matrix @ q.matrix))
    checks.append(CheckResult("enclosures-orthogonal", ortho, 10 * tol.atol))
    checks.append(CheckResult("enclosures-subharmonic", subharm, 10 * tol.atol))
    checks.append(CheckResult("enclosures-minimal", minimal_defect, 0.5))

    disagreements = 0
    for unit in _matrix_units(model.dim):
        result = decay_ideal_test(model, unit, r_min, horizon=horizon,
                                  tol=tol, decay_tol=decay_tol)
        algebraic_decisive = (result.algebraic_residual <= tol.atol
                              or result.algebraic_residual >= 10 * tol.atol)
        dynamic_decisive = (result.dynamic_residual <= decay_tol
                            or result.dynamic_residual >= 10 * decay_tol)
        if algebraic_decisive and dynamic_decisive:
            if result.in_ideal_algebraic != result.in_ideal_dynamic:
                disagreements += 1
    checks.append(CheckResult("decay-ideal-agreement", float(disagreements), 0.5))

    limit_support = support_projection(hermitian_part(report.limit_estimate), tol)
    checks.append(CheckResult("limit-support-full",
                              float(model.dim - limit_support.rank), 0.5))

    return AnalysisReport(
        label=label,
        dim=model.dim,
        kind="channel" if hasattr(model, "kraus_ops") else "generator",
        horizon=horizon,
        stationary_dim=space.dim,
        enclosure_ranks=tuple(p.rank for p in decomposition.minimal_projections),
        is_unique=decomposition.is_unique,
        fixed_algebra_dim=decomposition.fixed_algebra_dim,
        recurrent=r_min,
        stationary_support=report.stationary_support,
        sup_deviation=report.sup_deviation,
        transient_norm=report.transient_norm,
        decay_ideal_rank=model.dim - r_min.rank,
        faithful_family=report.faithful_family,
        supports_match=report.supports_match,
        checks=tuple(checks),
    )
