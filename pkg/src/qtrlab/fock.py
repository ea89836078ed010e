"""
Truncated Fock-space linear algebra.

Operators and states of a single harmonic oscillator restricted to the
first ``dim`` number states |0>, ..., |dim-1>. Everything is stored as a
dense complex matrix/vector; truncation dimensions here are at most a few
hundred, so dense is both simpler and faster than sparse.

Conventions
-----------
a |n> = sqrt(n) |n-1>,  a[n-1, n] = sqrt(n)
x = sqrt(hbar / (2 m omega)) (a + a^dag)
p = i sqrt(hbar m omega / 2) (a^dag - a)
|alpha> = exp(-|alpha|^2 / 2) sum_n alpha^n / sqrt(n!) |n>
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.special

from .errors import DimensionError, NumericError, ParameterError, ShapeError, TruncationError

#: Default bound on the coherent-state weight discarded by truncation.
TAIL_TOL = 1e-12

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise DimensionError(f"dim must be an integer >= 2, got {dim!r}")
    return int(dim)


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """A dense ``dim x dim`` complex matrix acting on the truncated Fock space.

    The matrix is copied on construction and marked read-only.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"operator must be a square matrix, got shape {m.shape}")
        _check_dim(m.shape[0])
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "TruncatedOperator":
        return TruncatedOperator(self.entries.conj().T)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        eye = np.eye(self.dim)
        return bool(np.max(np.abs(self.entries @ self.entries.conj().T - eye)) <= tol)

    def apply(self, state: "StateVector") -> "StateVector":
        """Return the normalized image ``op |state>``."""
        _match(self, state)
        return StateVector(self.entries @ state.amplitudes)

    def _coerce(self, other):
        if isinstance(other, TruncatedOperator):
            _match(self, other)
            return other.entries
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return self.apply(other)
        m = self._coerce(other)
        if m is NotImplemented:
            return m
        return TruncatedOperator(self.entries @ m)

    def __add__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return m
        return TruncatedOperator(self.entries + m)

    def __sub__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return m
        return TruncatedOperator(self.entries - m)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return TruncatedOperator(scalar * self.entries)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __neg__(self):
        return TruncatedOperator(-self.entries)

    def __repr__(self):
        return f"TruncatedOperator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm complex amplitude vector over Fock levels.

    Amplitudes are normalized on construction; a zero vector is rejected.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=complex)
        if psi.ndim != 1:
            raise ShapeError(f"state must be a vector, got shape {psi.shape}")
        _check_dim(psi.shape[0])
        if not np.all(np.isfinite(psi)):
            raise NumericError("state amplitudes must be finite")
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ParameterError("state vector has zero norm")
        if norm != 1.0:
            psi = psi / norm
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def overlap(self, other: "StateVector") -> complex:
        """Return ``<self|other>``."""
        _match(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self):
        return f"StateVector(dim={self.dim})"


def _match(a, b):
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")


def fidelity(a: StateVector, b: StateVector) -> float:
    """Global-phase-insensitive overlap ``|<a|b>|``."""
    return abs(a.overlap(b))


def identity(dim: int) -> TruncatedOperator:
    return TruncatedOperator(np.eye(_check_dim(dim)))


def basis(n: int, dim: int) -> StateVector:
    """Number state |n> in a ``dim``-level truncation."""
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise DimensionError(f"level {n} outside 0..{dim - 1}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return StateVector(psi)


def vacuum(dim: int) -> StateVector:
    return basis(0, dim)


def ladder_operators(dim: int) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Return the annihilation and creation operators ``(a, a^dag)``."""
    dim = _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    op = TruncatedOperator(a)
    return op, op.dag()


def number_operator(dim: int) -> TruncatedOperator:
    return TruncatedOperator(np.diag(np.arange(_check_dim(dim), dtype=float)))


def quadrature_operators(dim: int, m: float = 1.0, omega: float = 1.0,
                         hbar: float = 1.0) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Position and momentum ``(x, p)`` of an oscillator with mass ``m``."""
    for name, val in (("m", m), ("omega", omega), ("hbar", hbar)):
        if not (np.isfinite(val) and val > 0):
            raise ParameterError(f"{name} must be positive and finite, got {val!r}")
    a, ad = ladder_operators(dim)
    x = math.sqrt(hbar / (2 * m * omega)) * (a + ad)
    p = 1j * math.sqrt(hbar * m * omega / 2) * (ad - a)
    return x, p


def commutator(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    return A @ B - B @ A


def _poisson_tails(mean):
    # tails[k] = sum_{j >= k} e^{-mean} mean^j / j!, summed from the top down
    # in log space so weights far below epsilon relative to 1 are resolved.
    hi = int(mean + 40 * math.sqrt(mean) + 60)
    n = np.arange(hi)
    p = np.exp(-mean + n * math.log(mean) - scipy.special.gammaln(n + 1))
    return np.append(np.cumsum(p[::-1])[::-1], 0.0)


def poisson_tail(mean: float, dim: int) -> float:
    """Weight ``sum_{n >= dim} e^{-mean} mean^n / n!`` dropped by truncation."""
    if not np.isfinite(mean):
        raise NumericError(f"non-finite Poisson mean {mean!r}")
    if mean == 0:
        return 0.0
    tails = _poisson_tails(mean)
    return float(tails[dim]) if dim < len(tails) else 0.0


def min_coherent_dim(alpha: complex, tail_tol: float = TAIL_TOL) -> int:
    """Smallest truncation whose discarded coherent weight is below ``tail_tol``."""
    mean = abs(alpha) ** 2
    if not np.isfinite(mean):
        raise NumericError(f"non-finite amplitude {alpha!r}")
    if mean == 0:
        return 2
    ok = np.nonzero(_poisson_tails(mean) < tail_tol)[0]
    return max(2, int(ok[0]))


def _require_tail(alpha, dim, tail_tol):
    tail = poisson_tail(abs(alpha) ** 2, dim)
    if not tail < tail_tol:
        need = min_coherent_dim(alpha, tail_tol)
        raise TruncationError(
            f"dim={dim} discards coherent weight {tail:.3g} >= {tail_tol:g} "
            f"for |alpha|={abs(alpha):.6g}; need dim >= {need}",
            required_dim=need,
        )


def coherent_state(alpha: complex, dim: int, tail_tol: float = TAIL_TOL) -> StateVector:
    """Truncated coherent state |alpha>, renormalized after truncation.

    Raises
    ------
    TruncationError
        If more than ``tail_tol`` of the Poisson weight lies above ``dim``.
    """
    dim = _check_dim(dim)
    alpha = complex(alpha)
    _require_tail(alpha, dim, tail_tol)
    amp = np.empty(dim, dtype=complex)
    amp[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        amp[n] = amp[n - 1] * alpha / math.sqrt(n)
    return StateVector(amp)


def matrix_exponential(op: TruncatedOperator) -> TruncatedOperator:
    """``exp(op)`` by scaling and squaring with a Pade core (``scipy.linalg.expm``)."""
    if not np.all(np.isfinite(op.entries)):
        raise NumericError("matrix exponential of non-finite entries")
    return TruncatedOperator(scipy.linalg.expm(op.entries))


def displacement(alpha: complex, dim: int, tail_tol: float = TAIL_TOL) -> TruncatedOperator:
    """Displacement operator ``exp(alpha a^dag - alpha^* a)`` on ``dim`` levels."""
    dim = _check_dim(dim)
    alpha = complex(alpha)
    _require_tail(alpha, dim, tail_tol)
    a, ad = ladder_operators(dim)
    return matrix_exponential(alpha * ad - alpha.conjugate() * a)


def expectation(op: TruncatedOperator, state: StateVector) -> complex:
    """``<state|op|state>``."""
    _match(op, state)
    psi = state.amplitudes
    return complex(np.vdot(psi, op.entries @ psi))
