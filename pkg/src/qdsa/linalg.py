"""Dense complex linear algebra for operator-order analysis.

Everything operates on small dense complex matrices (dimension a few dozen
at most).  The module provides the Hermitian spectral calculus, the matrix
exponential, the positive-semidefinite order, support projections, lattice
operations (infimum and supremum) on ortho-projections, and a diagnostic
evaluating the standard equivalent algebraic characterisations of
``x >= p`` and ``x <= p`` for ``0 <= x <= 1`` and a projection ``p``.

All functions are pure; returned arrays are marked read-only so values can
be shared freely between callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimMismatch, NotHermitian, NotPSD, OutOfUnitInterval

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "Projection",
    "ConditionCheck",
    "OrderDiagnostic",
    "as_complex_matrix",
    "opnorm",
    "trace_norm",
    "hermitian_part",
    "hermitian_eig",
    "matrix_exp",
    "hermitian_matrix_exp",
    "is_psd",
    "min_eigenvalue",
    "order_leq",
    "support_projection",
    "proj_infimum",
    "proj_supremum",
    "projections_equal",
    "projection_order_diagnostic",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used throughout the package.

    atol: absolute residual tolerance for equality and invariant checks.
    rank_rtol: relative eigenvalue/singular-value threshold for rank and
        support decisions (relative to the largest value, with an absolute
        floor of ``atol``).
    psd_tol: slack allowed on the minimum eigenvalue in positivity checks.
    """

    atol: float = 1e-9
    rank_rtol: float = 1e-8
    psd_tol: float = 1e-9

    def __post_init__(self):
        for name in ("atol", "rank_rtol", "psd_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2), got {value!r}")


DEFAULT_TOL = ToleranceConfig()


def _tol(tol: ToleranceConfig | None) -> ToleranceConfig:
    return DEFAULT_TOL if tol is None else tol


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def as_complex_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a square complex matrix with finite entries."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimMismatch("matrix contains non-finite entries")
    return m


def opnorm(m: np.ndarray) -> float:
    """Spectral (largest singular value) norm."""
    return float(np.linalg.norm(m, 2))


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def _check_hermitian(m: np.ndarray, tol: ToleranceConfig, what: str = "matrix"):
    residual = opnorm(m - m.conj().T)
    if residual > tol.atol:
        raise NotHermitian(f"{what} is not Hermitian (residual {residual:.3e})")


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real positive.

    Ties go to the lowest index, for reproducibility across BLAS builds.
    """
    out = np.array(vectors)
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))
        pivot = col[k]
        if abs(pivot) > 0.0:
            out[:, j] = col * (abs(pivot) / pivot)
    return out


def hermitian_eig(a, tol: ToleranceConfig | None = None):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues real and
    ascending and eigenvectors as orthonormal columns with fixed phases.

    Raises NotHermitian if the input is not Hermitian within ``tol.atol``.
    """
    tol = _tol(tol)
    m = as_complex_matrix(a)
    _check_hermitian(m, tol)
    w, v = np.linalg.eigh(m)
    return w, _fix_phases(v)


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential via scaling-and-squaring with a Pade core."""
    m = as_complex_matrix(a)
    return scipy.linalg.expm(m)


def hermitian_matrix_exp(a, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix through its spectral form.

    Used as an independent cross-check of :func:`matrix_exp`.
    """
    w, v = hermitian_eig(a, tol)
    return (v * np.exp(w)) @ v.conj().T


def min_eigenvalue(a, tol: ToleranceConfig | None = None) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    tol = _tol(tol)
    m = as_complex_matrix(a)
    _check_hermitian(m, tol)
    return float(np.linalg.eigvalsh(m)[0])


def is_psd(a, tol: ToleranceConfig | None = None) -> bool:
    """True when the Hermitian matrix ``a`` has min eigenvalue >= -psd_tol."""
    tol = _tol(tol)
    return min_eigenvalue(a, tol) >= -tol.psd_tol


def order_leq(a, b, tol: ToleranceConfig | None = None) -> bool:
    """Operator order: True when ``b - a`` is positive semidefinite."""
    tol = _tol(tol)
    ma = as_complex_matrix(a)
    mb = as_complex_matrix(b)
    if ma.shape != mb.shape:
        raise DimMismatch(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    _check_hermitian(ma, tol)
    _check_hermitian(mb, tol)
    return is_psd(mb - ma, tol)


@dataclass(frozen=True)
class Projection:
    """An ortho-projection together with its rank and an orthonormal range basis."""

    matrix: np.ndarray
    rank: int
    range_basis: np.ndarray

    def __post_init__(self):
        _freeze(self.matrix)
        _freeze(self.range_basis)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(cls, m, tol: ToleranceConfig | None = None) -> "Projection":
        """Validate ``m`` as a projection (Hermitian idempotent) and build it."""
        tol = _tol(tol)
        p = as_complex_matrix(m)
        _check_hermitian(p, tol, "projection")
        idem = opnorm(p @ p - p)
        if idem > tol.atol:
            raise NotPSD(f"matrix is not idempotent (residual {idem:.3e})")
        w, v = np.linalg.eigh(hermitian_part(p))
        keep = w > 0.5
        return cls.from_range_basis(_fix_phases(v[:, keep]), p.shape[0])

    @classmethod
    def from_range_basis(cls, basis, dim: int | None = None) -> "Projection":
        """Build the projection onto the span of orthonormal columns ``basis``."""
        b = np.array(basis, dtype=complex)
        if b.ndim != 2:
            raise DimMismatch("range basis must be a 2-d array of columns")
        if dim is None:
            dim = b.shape[0]
        if b.shape[0] != dim:
            raise DimMismatch("range basis has wrong ambient dimension")
        k = b.shape[1]
        if k and opnorm(b.conj().T @ b - np.eye(k)) > 1e-6:
            raise DimMismatch("range basis columns are not orthonormal")
        p = b @ b.conj().T if k else np.zeros((dim, dim), dtype=complex)
        return cls(hermitian_part(p), k, b)

    @classmethod
    def zero(cls, dim: int) -> "Projection":
        return cls.from_range_basis(np.zeros((dim, 0), dtype=complex), dim)

    @classmethod
    def identity(cls, dim: int) -> "Projection":
        return cls.from_range_basis(np.eye(dim, dtype=complex), dim)

    def complement(self) -> "Projection":
        w, v = np.linalg.eigh(hermitian_part(np.eye(self.dim) - self.matrix))
        return Projection.from_range_basis(_fix_phases(v[:, w > 0.5]), self.dim)


def projections_equal(p: Projection, q: Projection,
                      tol: ToleranceConfig | None = None, factor: float = 10.0) -> bool:
    """True when two projections coincide within ``factor * atol``."""
    tol = _tol(tol)
    if p.dim != q.dim:
        raise DimMismatch("projections live on different spaces")
    return opnorm(p.matrix - q.matrix) <= factor * tol.atol


def support_projection(x, tol: ToleranceConfig | None = None) -> Projection:
    """Smallest projection ``P`` with ``x P = P x = x`` for PSD ``x``.

    Eigenvalues above ``max(rank_rtol * lambda_max, atol)`` count as nonzero;
    the relative cutoff with an absolute floor keeps support decisions stable
    when eigenvalues span many orders of magnitude after long evolutions.
    The zero matrix has the zero projection as its support.
    """
    tol = _tol(tol)
    m = as_complex_matrix(x)
    _check_hermitian(m, tol, "support argument")
    w, v = np.linalg.eigh(hermitian_part(m))
    if w[0] < -tol.psd_tol:
        raise NotPSD(f"support of a non-PSD matrix (min eigenvalue {w[0]:.3e})")
    lam_max = float(w[-1]) if w.size else 0.0
    cutoff = max(tol.rank_rtol * lam_max, tol.atol)
    keep = w > cutoff
    return Projection.from_range_basis(_fix_phases(v[:, keep]), m.shape[0])


def _common_dim(family) -> int:
    dims = {p.dim for p in family}
    if len(dims) != 1:
        raise DimMismatch(f"projection family mixes dimensions {sorted(dims)}")
    return dims.pop()


def proj_infimum(family, tol: ToleranceConfig | None = None) -> Projection:
    """Infimum (intersection of ranges) of a nonempty projection family.

    Computed spectrally: the intersection is the eigenvalue-``n`` eigenspace
    of the sum of the ``n`` family members.  Exact at this scale, with no
    iteration or convergence criterion.
    """
    family = list(family)
    if not family:
        raise DimMismatch("projection family must be nonempty")
    tol = _tol(tol)
    dim = _common_dim(family)
    n = len(family)
    s = np.zeros((dim, dim), dtype=complex)
    for p in family:
        s = s + p.matrix
    w, v = np.linalg.eigh(hermitian_part(s))
    cutoff = max(tol.rank_rtol * n, tol.atol)
    keep = w >= n - cutoff
    return Projection.from_range_basis(_fix_phases(v[:, keep]), dim)


def proj_supremum(family, tol: ToleranceConfig | None = None) -> Projection:
    """Supremum (span of the union of ranges) of a nonempty projection family.

    Computed as the support of the sum of the members; De Morgan duality with
    :func:`proj_infimum` is cross-checked in the test suite rather than used
    as the implementation.
    """
    family = list(family)
    if not family:
        raise DimMismatch("projection family must be nonempty")
    tol = _tol(tol)
    dim = _common_dim(family)
    s = np.zeros((dim, dim), dtype=complex)
    for p in family:
        s = s + p.matrix
    return support_projection(s, tol)


@dataclass(frozen=True)
class ConditionCheck:
    """One algebraic condition with its residual.

    ``holds`` applies the ``atol`` threshold; residuals in the indecisive
    band ``(atol, 10 * atol)`` are flagged so that agreement checks between
    equivalent conditions stay honest.
    """

    label: str
    residual: float
    atol: float

    @property
    def holds(self) -> bool:
        return self.residual <= self.atol

    @property
    def decisive(self) -> bool:
        return self.residual <= self.atol or self.residual >= 10.0 * self.atol

    @property
    def status(self) -> bool | None:
        """True/False when decisive, None in the indecisive band."""
        return self.holds if self.decisive else None


def _statuses_consistent(checks) -> bool:
    decided = [c.holds for c in checks if c.decisive]
    return len(set(decided)) <= 1


@dataclass(frozen=True)
class OrderDiagnostic:
    """Equivalent characterisations of ``x >= p`` and ``x <= p``.

    For ``0 <= x <= 1`` and a projection ``p`` the five conditions of
    ``x_geq_p`` are mutually equivalent, as are the four of ``x_leq_p``.
    """

    x_geq_p: tuple[ConditionCheck, ...]
    x_leq_p: tuple[ConditionCheck, ...]

    def consistent(self) -> bool:
        """True when no decisive conditions disagree within either group."""
        return _statuses_consistent(self.x_geq_p) and _statuses_consistent(self.x_leq_p)


def projection_order_diagnostic(x, p: Projection,
                                tol: ToleranceConfig | None = None) -> OrderDiagnostic:
    """Evaluate all equivalent order conditions between ``x`` and ``p``.

    ``x`` must satisfy ``0 <= x <= 1`` within tolerance, else
    OutOfUnitInterval is raised.
    """
    tol = _tol(tol)
    xm = as_complex_matrix(x)
    _check_hermitian(xm, tol, "order diagnostic argument")
    w = np.linalg.eigvalsh(hermitian_part(xm))
    if w[0] < -tol.psd_tol or w[-1] > 1.0 + tol.psd_tol:
        raise OutOfUnitInterval(
            f"eigenvalues must lie in [0, 1], got range [{w[0]:.3e}, {w[-1]:.3e}]")
    pm = p.matrix
    if pm.shape != xm.shape:
        raise DimMismatch("x and p have different dimensions")
    pc = np.eye(p.dim) - pm

    def psd_defect(m):
        return max(0.0, -float(np.linalg.eigvalsh(hermitian_part(m))[0]))

    a = tol.atol
    geq = (
        ConditionCheck("x - p is psd", psd_defect(xm - pm), a),
        ConditionCheck("p x p = p", opnorm(pm @ xm @ pm - pm), a),
        ConditionCheck("x = p + (1-p) x (1-p)", opnorm(xm - pm - pc @ xm @ pc), a),
        ConditionCheck("x p = p", opnorm(xm @ pm - pm), a),
        ConditionCheck("p x = p", opnorm(pm @ xm - pm), a),
    )
    leq = (
        ConditionCheck("p - x is psd", psd_defect(pm - xm), a),
        ConditionCheck("p x p = x", opnorm(pm @ xm @ pm - xm), a),
        ConditionCheck("x p = x", opnorm(xm @ pm - xm), a),
        ConditionCheck("p x = x", opnorm(pm @ xm - xm), a),
    )
    return OrderDiagnostic(geq, leq)
