"""
Galilean change of reference frame for oscillator states.

A state prepared in a frame moving at velocity ``v`` is seen as
``exp((i/hbar) v G) |psi>`` with ``G = p t - m x``. Substituting the
quadratures turns the exponent into ``alpha a^dag - alpha^* a`` with::

    alpha = -v sqrt(m / (2 hbar)) (t sqrt(omega) + i / sqrt(omega))

so the boosted vacuum is the coherent state |alpha> and
``|alpha|^2 = v^2 beta`` with ``beta = (m / (2 hbar)) (omega t^2 + 1/omega)``.

The commonly quoted shorter form ``-v sqrt(m/2hbar) (t sqrt(omega) + i)``
coincides with this at ``omega = 1``; it is available via ``literal=True``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SuperluminalError
from .fock import (
    TAIL_TOL,
    StateVector,
    TruncatedOperator,
    _require_tail,
    matrix_exponential,
    quadrature_operators,
)


@dataclass(frozen=True)
class BoostParams:
    """Relative velocity and oscillator constants of a frame change.

    Attributes
    ----------
    v : float
        Relative velocity in units of c, ``|v| < 1``.
    m, omega, hbar : float
        Mass, angular frequency and action, all strictly positive.
    t : float
        Epoch at which the boost generator is evaluated, ``t >= 0``.
    """

    v: float
    m: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.v) or abs(self.v) >= 1:
            raise SuperluminalError(f"velocity must satisfy |v| < 1, got v={self.v!r}")
        for name in ("m", "omega", "hbar"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be positive and finite, got {val!r}")
        if not (np.isfinite(self.t) and self.t >= 0):
            raise ParameterError(f"t must be finite and >= 0, got {self.t!r}")


def boost_generator(params: BoostParams, dim: int) -> TruncatedOperator:
    """``G = p t - m x`` on ``dim`` levels."""
    x, p = quadrature_operators(dim, params.m, params.omega, params.hbar)
    return params.t * p - params.m * x


def alpha_of(params: BoostParams, literal: bool = False) -> complex:
    """Coherent amplitude of the boosted vacuum.

    ``literal=True`` returns ``-v sqrt(m/2hbar) (t sqrt(omega) + i)``, which
    only reproduces the boost for ``omega = 1``.
    """
    pre = -params.v * math.sqrt(params.m / (2 * params.hbar))
    imag = 1.0 if literal else 1.0 / math.sqrt(params.omega)
    return complex(pre * params.t * math.sqrt(params.omega), pre * imag)


def beta_of(params: BoostParams, literal: bool = False) -> float:
    """``beta`` with ``|alpha_of(params)|^2 = v^2 beta``."""
    inv = 1.0 if literal else 1.0 / params.omega
    return params.m / (2 * params.hbar) * (params.omega * params.t ** 2 + inv)


def boost_state(params: BoostParams, state: StateVector,
                tail_tol: float = TAIL_TOL) -> StateVector:
    """Apply ``exp((i/hbar) v G)`` to ``state``.

    Raises
    ------
    TruncationError
        If ``state.dim`` is too small to hold the boosted vacuum.
    """
    _require_tail(alpha_of(params), state.dim, tail_tol)
    G = boost_generator(params, state.dim)
    U = matrix_exponential((1j * params.v / params.hbar) * G)
    return U.apply(state)
