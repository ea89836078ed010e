"""
Heisenberg-picture drift of an observable under an open-system generator.

    d<Z>/dt = < c^dag Z c - (1/2) c^dag c Z - (1/2) Z c^dag c + (i/hbar) [H, Z] >

``adjoint_drift`` returns the operator inside the brackets. A constant
register slope needs ``adjoint_drift(S) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .fock import TruncatedOperator, commutator, ladder_operators, number_operator


@dataclass(frozen=True, eq=False)
class LangevinSpec:
    """Hamiltonian ``H`` and jump operator ``c`` (``None`` means no dissipation)."""

    H: TruncatedOperator
    c: TruncatedOperator | None = None
    hbar: float = 1.0

    def __post_init__(self):
        if not self.H.is_hermitian():
            raise ParameterError("Hamiltonian H must be hermitian")
        if self.c is not None and self.c.dim != self.H.dim:
            raise ShapeError(f"H has dim {self.H.dim} but c has dim {self.c.dim}")
        if not self.hbar > 0:
            raise ParameterError(f"hbar must be positive, got {self.hbar!r}")

    @property
    def dim(self) -> int:
        return self.H.dim


def default_spec(dim: int, omega: float = 1.0, hbar: float = 1.0) -> LangevinSpec:
    """Number-conserving ``H = hbar omega a^dag a`` with no jump operator."""
    return LangevinSpec(hbar * omega * number_operator(dim), None, hbar)


def decay_spec(dim: int, kappa: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> LangevinSpec:
    """``default_spec`` plus photon loss ``c = sqrt(kappa) a``."""
    a, _ = ladder_operators(dim)
    return LangevinSpec(hbar * omega * number_operator(dim), np.sqrt(kappa) * a, hbar)


def adjoint_drift(Z: TruncatedOperator, spec: LangevinSpec) -> TruncatedOperator:
    if Z.dim != spec.dim:
        raise ShapeError(f"Z has dim {Z.dim} but spec has dim {spec.dim}")
    out = (1j / spec.hbar) * commutator(spec.H, Z)
    if spec.c is not None:
        c, cd = spec.c, spec.c.dag()
        n = cd @ c
        out = out + cd @ Z @ c - 0.5 * (n @ Z) - 0.5 * (Z @ n)
    return out


def drift_norm(op: TruncatedOperator, mask_edge: bool = False) -> float:
    """Max-magnitude entry, optionally ignoring the top Fock row and column."""
    m = op.entries[:-1, :-1] if mask_edge else op.entries
    return float(np.max(np.abs(m)))


def check_constant_S(S: TruncatedOperator, spec: LangevinSpec, mask_edge: bool = False) -> float:
    """Size of ``adjoint_drift(S)``; zero certifies ``S`` as a fixed point."""
    if not S.is_hermitian():
        raise ParameterError("S must be hermitian")
    return drift_norm(adjoint_drift(S, spec), mask_edge)
