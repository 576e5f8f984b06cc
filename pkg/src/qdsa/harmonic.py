"""Decision procedures for sub-harmonic and super-harmonic projections.

A projection ``p`` is sub-harmonic for a unital positive map ``alpha`` when
``alpha(p) >= p``; equivalently the closed face of states supported in
``p`` is invariant under the predual.  Four equivalent formulations are
evaluated side by side in :func:`subharmonic_report`:

1. invariance of the supported face (sampled over random states in it),
2. the operator order ``alpha(p) >= p``,
3. the compression identity ``p alpha(a) p = p alpha(p a p) p`` for all a,
4. the corner identity ``alpha(p' a p') = p' alpha(p' a p') p'`` with
   ``p' = 1 - p``.

Exact algebraic reductions are preferred wherever available: for a Kraus
family the order condition is equivalent to ``p' V_i p = 0`` for every i
(via ``p alpha(p') p = sum_i (p' V_i p)^dag (p' V_i p)``), and for a
generator to ``p' L_i p = 0`` together with ``p' G p = 0`` where
``G = -iH - (1/2) sum_i L_i^dag L_i``.  Both reductions are cross-validated
against the time-sampled order condition in the test suite.

Sub-harmonic and super-harmonic projections each form a complete lattice;
:func:`subharmonic_closure` checks closure of a family under infimum and
supremum.  :func:`fixed_point_support_check` certifies that the support of
a positive fixed point of a CP unital map is super-harmonic, which drives
the recurrence analysis downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channels import (
    LindbladGenerator,
    QuantumChannel,
    apply_heisenberg,
)
from .errors import DimMismatch, FamilyNotSubharmonic, NotFixedPoint, NotPSD, TheoremViolation
from .linalg import (
    ConditionCheck,
    Projection,
    ToleranceConfig,
    _statuses_consistent,
    as_complex_matrix,
    hermitian_part,
    is_psd,
    opnorm,
    order_leq,
    proj_infimum,
    proj_supremum,
    support_projection,
)

__all__ = [
    "HarmonicityReport",
    "ClosureResult",
    "subharmonic_report",
    "kraus_invariance_test",
    "is_subharmonic_generator",
    "is_subharmonic",
    "subharmonic_residual",
    "is_superharmonic",
    "subharmonic_closure",
    "fixed_point_support_check",
]


def _tol(tol):
    from .linalg import DEFAULT_TOL

    return DEFAULT_TOL if tol is None else tol


def _matrix_units(dim: int):
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            yield unit


@dataclass(frozen=True)
class HarmonicityReport:
    """Residuals of the four equivalent sub-harmonicity conditions.

    The verdict is always taken from the operator-order condition, which is
    exact; face invariance is only sampled and never treated as a proof.
    Whenever all residuals are decisive the four booleans must agree.
    """

    face_invariance: ConditionCheck
    operator_order: ConditionCheck
    compression: ConditionCheck
    corner: ConditionCheck
    verdict: bool

    def conditions(self):
        return (self.face_invariance, self.operator_order, self.compression, self.corner)

    def consistent(self) -> bool:
        return _statuses_consistent(self.conditions())


def subharmonic_report(ch: QuantumChannel, p: Projection, trials: int = 32,
                       tol: ToleranceConfig | None = None,
                       rng=None) -> HarmonicityReport:
    """Evaluate all four sub-harmonicity conditions for a channel.

    Conditions 3 and 4 are checked on the full matrix-unit basis; the face
    condition is sampled on ``trials`` states ``p sigma p / tr(p sigma)``
    with ``sigma`` random and full rank.
    """
    tol = _tol(tol)
    if p.dim != ch.dim:
        raise DimMismatch("projection dimension does not match the channel")
    if rng is None:
        rng = np.random.default_rng(0)
    pm = p.matrix
    pc = np.eye(ch.dim) - pm

    alpha_p = apply_heisenberg(ch, pm)
    order_defect = max(0.0, -float(np.linalg.eigvalsh(hermitian_part(alpha_p - pm))[0]))

    comp = 0.0
    corner = 0.0
    for unit in _matrix_units(ch.dim):
        comp = max(comp, opnorm(pm @ apply_heisenberg(ch, unit) @ pm
                                - pm @ apply_heisenberg(ch, pm @ unit @ pm) @ pm))
        inside = apply_heisenberg(ch, pc @ unit @ pc)
        corner = max(corner, opnorm(inside - pc @ inside @ pc))

    face = 0.0
    if p.rank > 0:
        for _ in range(trials):
            g = rng.standard_normal((ch.dim, ch.dim)) + 1j * rng.standard_normal((ch.dim, ch.dim))
            sigma = g @ g.conj().T
            compressed = pm @ sigma @ pm
            rho = compressed / np.trace(compressed)
            nu = sum(v @ rho @ v.conj().T for v in ch.kraus_ops)
            face = max(face, abs(complex(np.trace(nu @ pm)) - 1.0))

    a = tol.atol
    order_check = ConditionCheck("alpha(p) >= p", order_defect, a)
    return HarmonicityReport(
        face_invariance=ConditionCheck("face invariance (sampled)", face, a),
        operator_order=order_check,
        compression=ConditionCheck("p alpha(a) p = p alpha(pap) p", comp, a),
        corner=ConditionCheck("corner invariance", corner, a),
        verdict=order_check.holds,
    )


def _kraus_residual(ch: QuantumChannel, p: Projection) -> float:
    pc = np.eye(ch.dim) - p.matrix
    return max(opnorm(pc @ v @ p.matrix) for v in ch.kraus_ops)


def kraus_invariance_test(ch: QuantumChannel, p: Projection,
                          tol: ToleranceConfig | None = None) -> bool:
    """Exact algebraic sub-harmonicity test: ``(1-p) V_i p = 0`` for all i."""
    tol = _tol(tol)
    if p.dim != ch.dim:
        raise DimMismatch("projection dimension does not match the channel")
    return _kraus_residual(ch, p) <= tol.atol


def _generator_residual(gen: LindbladGenerator, p: Projection) -> float:
    pm = p.matrix
    pc = np.eye(gen.dim) - pm
    g = -1j * gen.hamiltonian
    worst = 0.0
    for l in gen.lindblad_ops:
        worst = max(worst, opnorm(pc @ l @ pm))
        g = g - 0.5 * (l.conj().T @ l)
    return max(worst, opnorm(pc @ g @ pm))


def is_subharmonic_generator(gen: LindbladGenerator, p: Projection,
                             tol: ToleranceConfig | None = None) -> bool:
    """Generator-level sub-harmonicity: ``(1-p) L_i p = 0`` and ``(1-p) G p = 0``.

    ``G = -iH - (1/2) sum_i L_i^dag L_i``.  The criterion is exact (no time
    grid); the test suite cross-validates it against the order condition
    ``alpha_t(p) >= p`` sampled at several times, and any disagreement
    beyond tolerance is a test failure rather than something resolved here.
    """
    tol = _tol(tol)
    if p.dim != gen.dim:
        raise DimMismatch("projection dimension does not match the generator")
    return _generator_residual(gen, p) <= tol.atol


def subharmonic_residual(obj, p: Projection) -> float:
    """The algebraic invariance residual (zero exactly when sub-harmonic)."""
    if isinstance(obj, QuantumChannel):
        return _kraus_residual(obj, p)
    if isinstance(obj, LindbladGenerator):
        return _generator_residual(obj, p)
    raise TypeError(f"expected QuantumChannel or LindbladGenerator, got {type(obj)!r}")


def is_subharmonic(obj, p: Projection, tol: ToleranceConfig | None = None) -> bool:
    """Dispatch to the exact Kraus-level or generator-level test."""
    tol = _tol(tol)
    return subharmonic_residual(obj, p) <= tol.atol


def is_superharmonic(obj, p: Projection, tol: ToleranceConfig | None = None) -> bool:
    """True when ``alpha(p) <= p``, i.e. the complement is sub-harmonic."""
    return is_subharmonic(obj, p.complement(), tol)


class ClosureResult(NamedTuple):
    infimum: Projection
    supremum: Projection
    both_subharmonic: bool


def subharmonic_closure(obj, family, tol: ToleranceConfig | None = None) -> ClosureResult:
    """Infimum and supremum of a sub-harmonic family, with closure flags.

    Every member must already pass the sub-harmonic test (else
    FamilyNotSubharmonic); lattice closure then demands that both the
    infimum and the supremum pass it as well, which is reported in
    ``both_subharmonic``.
    """
    tol = _tol(tol)
    family = list(family)
    for i, p in enumerate(family):
        if not is_subharmonic(obj, p, tol):
            raise FamilyNotSubharmonic(
                f"family member {i} fails the sub-harmonic test "
                f"(residual {subharmonic_residual(obj, p):.3e})")
    inf = proj_infimum(family, tol)
    sup = proj_supremum(family, tol)
    both = is_subharmonic(obj, inf, tol) and is_subharmonic(obj, sup, tol)
    return ClosureResult(inf, sup, both)


def fixed_point_support_check(ch: QuantumChannel, x,
                              tol: ToleranceConfig | None = None):
    """Support of a positive fixed point, certified super-harmonic.

    ``x`` must be PSD with ``alpha(x) = x`` within tolerance (else
    NotFixedPoint).  The support ``s`` of a positive fixed point of a CP
    unital map always satisfies ``alpha(s) <= s``; a decisive failure here
    falsifies a structural law and therefore raises TheoremViolation
    (indicating numerical breakdown), rather than returning quietly.

    Returns ``(support, superharmonic)``.
    """
    tol = _tol(tol)
    xm = as_complex_matrix(x)
    if xm.shape[0] != ch.dim:
        raise DimMismatch("operand dimension does not match the channel")
    if not is_psd(xm, tol):
        raise NotPSD("fixed point candidate is not positive semidefinite")
    residual = opnorm(apply_heisenberg(ch, xm) - xm)
    if residual > tol.atol:
        raise NotFixedPoint(f"alpha(x) deviates from x by {residual:.3e}")
    s = support_projection(xm, tol)
    alpha_s = apply_heisenberg(ch, s.matrix)
    defect = max(0.0, -float(np.linalg.eigvalsh(hermitian_part(s.matrix - alpha_s))[0]))
    if defect > tol.atol:
        raise TheoremViolation(
            f"support of a fixed point failed the super-harmonic check "
            f"(defect {defect:.3e}); this indicates numerical breakdown")
    superharmonic = order_leq(alpha_s, s.matrix, tol)
    return s, superharmonic
