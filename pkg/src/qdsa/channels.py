"""Completely positive unital maps and their generators.

Two representations are supported: a :class:`QuantumChannel` holds a Kraus
family ``{V_i}`` acting in the Heisenberg picture as
``alpha(a) = sum_i V_i^dag a V_i`` (the predual acts on states as
``nu(rho) = sum_i V_i rho V_i^dag``), and a :class:`LindbladGenerator`
holds a Hamiltonian ``H`` and jump operators ``{L_i}`` generating the
norm-continuous semigroup ``alpha_t = exp(t L)``.

Superoperators use the column-stacking vectorization convention

    vec(A B C) = (C^T kron A) vec(B),

stated here once and tested bit-exactly; Heisenberg and Schrodinger
superoperators of the same object are mutual adjoints under the
Hilbert-Schmidt pairing and are always tagged with their picture rather
than inferred from context.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NegativeTime, NotHermitian, NotPSD, NotUnital
from .linalg import (
    DEFAULT_TOL,
    Projection,
    ToleranceConfig,
    as_complex_matrix,
    hermitian_part,
    is_psd,
    matrix_exp,
    opnorm,
    support_projection,
)

__all__ = [
    "HEISENBERG",
    "SCHRODINGER",
    "QuantumChannel",
    "LindbladGenerator",
    "DensityMatrix",
    "Superoperator",
    "StinespringDilation",
    "StructureReport",
    "vec",
    "unvec",
    "apply_heisenberg",
    "apply_schrodinger",
    "lindblad_apply",
    "to_superoperator",
    "evolve",
    "propagator",
    "compose_channels",
    "generator_to_channel",
    "stinespring_dilate",
    "check_structure",
]

HEISENBERG = "heisenberg"
SCHRODINGER = "schrodinger"
_PICTURES = (HEISENBERG, SCHRODINGER)


def _tol(tol):
    return DEFAULT_TOL if tol is None else tol


def _check_picture(picture: str):
    if picture not in _PICTURES:
        raise ValueError(f"picture must be one of {_PICTURES}, got {picture!r}")


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: vec([[a, b], [c, d]]) = (a, c, b, d)."""
    return np.asarray(m).flatten(order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise DimMismatch(f"cannot reshape length-{v.size} vector to a square matrix")
    return v.reshape((dim, dim), order="F")


class QuantumChannel:
    """A CP unital map given by its Kraus family.

    Kraus operators are kept as the multiset given, neither normalized nor
    reordered.  Unitality ``sum_i V_i^dag V_i = 1`` (equivalently, the
    predual preserves the trace) is enforced on construction.
    """

    def __init__(self, kraus_ops, tol: ToleranceConfig | None = None):
        tol = _tol(tol)
        ops = tuple(as_complex_matrix(v) for v in kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        for v in ops:
            if v.shape != (dim, dim):
                raise DimMismatch("Kraus operators must share one square shape")
        gram = sum(v.conj().T @ v for v in ops)
        residual = opnorm(gram - np.eye(dim))
        if residual > tol.atol:
            raise NotUnital(f"sum V^dag V deviates from identity by {residual:.3e}")
        for v in ops:
            v.flags.writeable = False
        self.dim = dim
        self.kraus_ops = ops

    def __repr__(self):
        return f"QuantumChannel(dim={self.dim}, n_kraus={len(self.kraus_ops)})"


class LindbladGenerator:
    """Generator data ``(H, {L_i})`` of a CP unital semigroup.

    The jump-operator list may be empty (purely Hamiltonian flow) and the
    Hamiltonian may be zero (pure dissipation).
    """

    def __init__(self, hamiltonian, lindblad_ops=(), tol: ToleranceConfig | None = None):
        tol = _tol(tol)
        h = as_complex_matrix(hamiltonian)
        residual = opnorm(h - h.conj().T)
        if residual > tol.atol:
            raise NotHermitian(f"Hamiltonian is not Hermitian (residual {residual:.3e})")
        dim = h.shape[0]
        ops = tuple(as_complex_matrix(l) for l in lindblad_ops)
        for l in ops:
            if l.shape != (dim, dim):
                raise DimMismatch("jump operators must match the Hamiltonian dimension")
        h.flags.writeable = False
        for l in ops:
            l.flags.writeable = False
        self.dim = dim
        self.hamiltonian = h
        self.lindblad_ops = ops

    def __repr__(self):
        return f"LindbladGenerator(dim={self.dim}, n_jumps={len(self.lindblad_ops)})"


class DensityMatrix:
    """A normal state: positive semidefinite with unit trace."""

    def __init__(self, matrix, tol: ToleranceConfig | None = None):
        tol = _tol(tol)
        m = as_complex_matrix(matrix)
        if not is_psd(m, tol):
            raise NotPSD("density matrix is not positive semidefinite")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > tol.atol:
            raise ValueError(f"density matrix trace deviates from 1 by {abs(tr - 1.0):.3e}")
        m = hermitian_part(m)
        m.flags.writeable = False
        self.matrix = m
        self.dim = m.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def pure(cls, state_vector) -> "DensityMatrix":
        v = np.asarray(state_vector, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("cannot build a pure state from the zero vector")
        v = v / n
        return cls(np.outer(v, v.conj()))

    def support(self, tol: ToleranceConfig | None = None) -> Projection:
        return support_projection(self.matrix, tol)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class Superoperator:
    """A ``d^2 x d^2`` matrix acting on vectorized operators, tagged by picture."""

    def __init__(self, matrix, picture: str):
        _check_picture(picture)
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimMismatch("superoperator matrix must be square")
        dim = int(round(np.sqrt(m.shape[0])))
        if dim * dim != m.shape[0]:
            raise DimMismatch("superoperator size must be a perfect square")
        m.flags.writeable = False
        self.matrix = m
        self.picture = picture
        self.dim = dim

    def apply(self, a) -> np.ndarray:
        """Act on a ``d x d`` matrix."""
        m = as_complex_matrix(a)
        if m.shape[0] != self.dim:
            raise DimMismatch("operand dimension does not match the superoperator")
        return unvec(self.matrix @ vec(m), self.dim)

    def __repr__(self):
        return f"Superoperator(dim={self.dim}, picture={self.picture!r})"


class StinespringDilation:
    """Isometry ``V`` with ``alpha(a) = V^dag (a kron 1_n) V``.

    ``V`` stacks the Kraus family: ``V k = sum_i (V_i k) kron e_i`` where
    ``n`` is the number of Kraus operators.
    """

    def __init__(self, isometry, multiplicity: int, tol: ToleranceConfig | None = None):
        tol = _tol(tol)
        v = np.array(isometry, dtype=complex)
        if v.ndim != 2 or multiplicity < 1 or v.shape[0] != v.shape[1] * multiplicity:
            raise DimMismatch("isometry must have shape (d*n, d)")
        dim = v.shape[1]
        residual = opnorm(v.conj().T @ v - np.eye(dim))
        if residual > tol.atol:
            raise NotUnital(f"V^dag V deviates from identity by {residual:.3e}")
        v.flags.writeable = False
        self.isometry = v
        self.multiplicity = multiplicity
        self.dim = dim

    def represent(self, a) -> np.ndarray:
        """The dilated representation ``pi(a) = a kron 1_n``."""
        return np.kron(as_complex_matrix(a), np.eye(self.multiplicity))

    def reconstruct(self, a) -> np.ndarray:
        """Evaluate ``V^dag pi(a) V``, which must reproduce the channel."""
        v = self.isometry
        return v.conj().T @ self.represent(a) @ v


def _check_dim(obj_dim: int, a: np.ndarray):
    if a.shape[0] != obj_dim:
        raise DimMismatch(f"operand dimension {a.shape[0]} does not match {obj_dim}")


def apply_heisenberg(ch: QuantumChannel, a) -> np.ndarray:
    """Heisenberg action ``sum_i V_i^dag a V_i`` on an observable."""
    m = as_complex_matrix(a)
    _check_dim(ch.dim, m)
    out = np.zeros_like(m)
    for v in ch.kraus_ops:
        out += v.conj().T @ m @ v
    return out


def _schrodinger_action(ch: QuantumChannel, m: np.ndarray) -> np.ndarray:
    out = np.zeros_like(m)
    for v in ch.kraus_ops:
        out += v @ m @ v.conj().T
    return out


def apply_schrodinger(ch: QuantumChannel, rho: DensityMatrix,
                      tol: ToleranceConfig | None = None) -> DensityMatrix:
    """Predual action ``sum_i V_i rho V_i^dag`` on a state."""
    _check_dim(ch.dim, rho.matrix)
    return DensityMatrix(_schrodinger_action(ch, rho.matrix), tol)


def lindblad_apply(gen: LindbladGenerator, a, picture: str = HEISENBERG) -> np.ndarray:
    """Apply the generator to an operator in the requested picture.

    Heisenberg:  i [H, a] + sum_i (L_i^dag a L_i - (1/2){L_i^dag L_i, a})
    Schrodinger: -i [H, rho] + sum_i (L_i rho L_i^dag - (1/2){L_i^dag L_i, rho})
    """
    _check_picture(picture)
    m = as_complex_matrix(a)
    _check_dim(gen.dim, m)
    h = gen.hamiltonian
    if picture == HEISENBERG:
        out = 1j * (h @ m - m @ h)
        for l in gen.lindblad_ops:
            k = l.conj().T @ l
            out += l.conj().T @ m @ l - 0.5 * (k @ m + m @ k)
    else:
        out = -1j * (h @ m - m @ h)
        for l in gen.lindblad_ops:
            k = l.conj().T @ l
            out += l @ m @ l.conj().T - 0.5 * (k @ m + m @ k)
    return out


def _channel_superop_matrix(ch: QuantumChannel, picture: str) -> np.ndarray:
    d = ch.dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for v in ch.kraus_ops:
        if picture == HEISENBERG:
            s += np.kron(v.T, v.conj().T)
        else:
            s += np.kron(v.conj(), v)
    return s


def _generator_superop_matrix(gen: LindbladGenerator, picture: str) -> np.ndarray:
    d = gen.dim
    eye = np.eye(d)
    h = gen.hamiltonian
    if picture == HEISENBERG:
        s = 1j * (np.kron(eye, h) - np.kron(h.T, eye))
    else:
        s = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for l in gen.lindblad_ops:
        k = l.conj().T @ l
        if picture == HEISENBERG:
            s += np.kron(l.T, l.conj().T)
        else:
            s += np.kron(l.conj(), l)
        s -= 0.5 * (np.kron(eye, k) + np.kron(k.T, eye))
    return s


def to_superoperator(obj, picture: str = HEISENBERG) -> Superoperator:
    """Vectorized matrix form of a channel or generator in the given picture."""
    _check_picture(picture)
    if isinstance(obj, QuantumChannel):
        return Superoperator(_channel_superop_matrix(obj, picture), picture)
    if isinstance(obj, LindbladGenerator):
        return Superoperator(_generator_superop_matrix(obj, picture), picture)
    raise TypeError(f"expected QuantumChannel or LindbladGenerator, got {type(obj)!r}")


def evolve(gen: LindbladGenerator, t: float, picture: str = HEISENBERG) -> Superoperator:
    """The semigroup element ``exp(t L)`` as a superoperator.

    Time evolution always goes through the ``d^2 x d^2`` exponential; there
    are no step integrators and hence no step-size decisions.
    """
    _check_picture(picture)
    if t < 0:
        raise NegativeTime(f"evolution time must be nonnegative, got {t}")
    s = _generator_superop_matrix(gen, picture)
    return Superoperator(matrix_exp(t * s), picture)


def propagator(obj, t: float, picture: str = HEISENBERG) -> Superoperator:
    """Evolution to time ``t``: ``exp(t L)`` for generators, ``S^n`` for channels.

    Discrete channels take integer horizons (an iteration count); ``t`` must
    then be integral within 1e-9.
    """
    _check_picture(picture)
    if isinstance(obj, LindbladGenerator):
        return evolve(obj, t, picture)
    if isinstance(obj, QuantumChannel):
        if t < 0:
            raise NegativeTime(f"iteration count must be nonnegative, got {t}")
        n = int(round(t))
        if abs(t - n) > 1e-9:
            raise ValueError(f"discrete channels need an integer horizon, got {t}")
        s = _channel_superop_matrix(obj, picture)
        return Superoperator(np.linalg.matrix_power(s, n), picture)
    raise TypeError(f"expected QuantumChannel or LindbladGenerator, got {type(obj)!r}")


def compose_channels(first: QuantumChannel, second: QuantumChannel,
                     tol: ToleranceConfig | None = None) -> QuantumChannel:
    """Composition ``rho -> second(first(rho))`` with Kraus family of products."""
    if first.dim != second.dim:
        raise DimMismatch("cannot compose channels of different dimensions")
    ops = [w @ v for w in second.kraus_ops for v in first.kraus_ops]
    return QuantumChannel(ops, tol)


def generator_to_channel(gen: LindbladGenerator, t: float,
                         tol: ToleranceConfig | None = None) -> QuantumChannel:
    """Kraus form of the CP map ``exp(t L)`` via its Choi matrix.

    The Choi matrix is assembled block-wise from the predual action on
    matrix units and eigendecomposed; eigenvalues below the support cutoff
    are dropped.
    """
    tol = _tol(tol)
    if t < 0:
        raise NegativeTime(f"evolution time must be nonnegative, got {t}")
    d = gen.dim
    s = propagator(gen, t, SCHRODINGER)
    choi = np.zeros((d * d, d * d), dtype=complex)
    for c1 in range(d):
        for c2 in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[c1, c2] = 1.0
            choi[c1 * d:(c1 + 1) * d, c2 * d:(c2 + 1) * d] = s.apply(unit)
    w, v = np.linalg.eigh(hermitian_part(choi))
    cutoff = max(tol.rank_rtol * float(w[-1]), tol.atol)
    ops = [unvec(np.sqrt(w[j]) * v[:, j], d) for j in range(len(w)) if w[j] > cutoff]
    return QuantumChannel(ops, tol)


def stinespring_dilate(ch: QuantumChannel,
                       tol: ToleranceConfig | None = None) -> StinespringDilation:
    """Stack the Kraus family into the canonical dilation isometry."""
    tol = _tol(tol)
    d = ch.dim
    n = len(ch.kraus_ops)
    v = np.zeros((d * n, d), dtype=complex)
    for i, k in enumerate(ch.kraus_ops):
        v[i::n, :] = k
    return StinespringDilation(v, n, tol)


@dataclass(frozen=True)
class StructureReport:
    """Residuals of the structural axioms of a map or generator.

    Accepts raw, unvalidated Kraus families so that broken inputs can be
    diagnosed; failures are carried in the residuals, never raised.
    """

    kind: str
    dim: int
    unitality_residual: float
    trace_residual: float
    hamiltonian_residual: float
    duality_residual: float

    def ok(self, tol: ToleranceConfig | None = None) -> bool:
        tol = _tol(tol)
        worst = max(self.unitality_residual, self.trace_residual,
                    self.hamiltonian_residual, self.duality_residual)
        return worst <= tol.atol


def _random_state_matrix(dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m)


def _random_hermitian_matrix(dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return hermitian_part(g)


def check_structure(obj, tol: ToleranceConfig | None = None,
                    rng=None, trials: int = 20) -> StructureReport:
    """Report unitality, trace-preservation, Hermiticity and duality residuals.

    ``obj`` may be a validated channel or generator, or a bare sequence of
    Kraus matrices (which is how a non-unital family gets diagnosed).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if isinstance(obj, LindbladGenerator):
        h = obj.hamiltonian
        herm = opnorm(h - h.conj().T)
        unital = opnorm(lindblad_apply(obj, np.eye(obj.dim), HEISENBERG))
        trace = 0.0
        dual = 0.0
        for _ in range(trials):
            rho = _random_state_matrix(obj.dim, rng)
            a = _random_hermitian_matrix(obj.dim, rng)
            drho = lindblad_apply(obj, rho, SCHRODINGER)
            trace = max(trace, abs(complex(np.trace(drho))))
            dual = max(dual, abs(complex(np.trace(drho @ a))
                                 - complex(np.trace(rho @ lindblad_apply(obj, a, HEISENBERG)))))
        return StructureReport("generator", obj.dim, unital, trace, herm, dual)

    if isinstance(obj, QuantumChannel):
        ops = obj.kraus_ops
        kind = "channel"
    else:
        ops = tuple(as_complex_matrix(v) for v in obj)
        if not ops:
            raise ValueError("empty Kraus family")
        kind = "kraus"
    dim = ops[0].shape[0]
    gram = sum(v.conj().T @ v for v in ops)
    unital = opnorm(gram - np.eye(dim))
    trace = 0.0
    dual = 0.0
    for _ in range(trials):
        rho = _random_state_matrix(dim, rng)
        a = _random_hermitian_matrix(dim, rng)
        nu = sum(v @ rho @ v.conj().T for v in ops)
        al = sum(v.conj().T @ a @ v for v in ops)
        trace = max(trace, abs(complex(np.trace(nu)) - complex(np.trace(rho))))
        dual = max(dual, abs(complex(np.trace(nu @ a)) - complex(np.trace(rho @ al))))
    return StructureReport(kind, dim, unital, trace, 0.0, dual)
