"""
Diagonal dilation observable.

For a boosted vacuum |alpha> with ``|alpha|^2 = beta u`` (``u = v^2``) a
diagonal operator ``S = sum_n S_n |n><n|`` has

    <alpha|S|alpha> = e^{-beta u} sum_n S_n (beta u)^n / n!.

Requiring this to equal ``eps sqrt(1 - u)`` for every ``u`` in [0, 1) and
matching powers of ``u`` against the Maclaurin series of
``g(u) = sqrt(1 - u) e^{beta u} = sum_n c_n u^n`` fixes

    S_n = eps n! c_n / beta^n,   c_n = sum_k b_k beta^(n-k) / (n-k)!

where ``b_k`` are the coefficients of ``sqrt(1 - u)``. The closed form used
for evaluation is the equivalent ``S_n = eps sum_k b_k n!/(n-k)! beta^-k``,
which never forms ``n!`` or ``beta^n`` separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boost import BoostParams, alpha_of, beta_of
from .errors import DimensionError, NumericError, ParameterError, SuperluminalError
from .fock import (
    TAIL_TOL,
    StateVector,
    TruncatedOperator,
    coherent_state,
    expectation,
    min_coherent_dim,
)

#: Hard cap on the adaptive truncation used by :func:`verify_dilation`.
MAX_ADAPTIVE_DIM = 600


def gamma(v: float) -> float:
    """Lorentz factor ``1 / sqrt(1 - v^2)`` (c = 1)."""
    if not np.isfinite(v) or abs(v) >= 1:
        raise SuperluminalError(f"Lorentz factor needs |v| < 1, got v={v!r}")
    return 1.0 / math.sqrt(1.0 - v * v)


def sqrt_series_coeffs(order: int) -> list[float]:
    """Maclaurin coefficients ``b_0..b_order`` of ``sqrt(1 - u)``."""
    if order < 0:
        raise ParameterError(f"order must be >= 0, got {order}")
    b = [1.0]
    for k in range(1, order + 1):
        b.append(b[-1] * (k - 1.5) / k)
    return b


def product_coeffs(beta: float, order: int) -> list[float]:
    """Maclaurin coefficients ``c_0..c_order`` of ``sqrt(1 - u) exp(beta u)``."""
    b = sqrt_series_coeffs(order)
    e = [1.0]
    for j in range(1, order + 1):
        e.append(e[-1] * beta / j)
    return [math.fsum(b[k] * e[n - k] for k in range(n + 1)) for n in range(order + 1)]


@dataclass(frozen=True)
class DilationSeries:
    """Diagonal entries ``S_n`` of the dilation observable, ``n < n_series``."""

    eps: float
    beta: float
    coeffs: tuple[float, ...]

    @property
    def n_series(self) -> int:
        return len(self.coeffs)


def dilation_series(eps: float, beta: float, n_series: int) -> DilationSeries:
    """Solve the diagonal matching condition for ``S_0 .. S_{n_series-1}``.

    Raises
    ------
    NumericError
        If some ``S_n`` overflows float64 (small ``beta`` with large order).
    """
    if not (np.isfinite(eps) and eps > 0):
        raise ParameterError(f"eps must be positive, got {eps!r}")
    if not (np.isfinite(beta) and beta > 0):
        raise ParameterError(f"beta must be positive, got {beta!r}")
    if n_series < 1:
        raise ParameterError(f"n_series must be >= 1, got {n_series}")
    b = sqrt_series_coeffs(n_series - 1)
    coeffs = [eps]
    for n in range(1, n_series):
        # r = n! / (n-k)! / beta^k, built up factor by factor
        r = 1.0
        terms = [b[0]]
        for k in range(1, n + 1):
            r *= (n - k + 1) / beta
            terms.append(b[k] * r)
        s = eps * math.fsum(terms)
        if not math.isfinite(s):
            raise NumericError(
                f"S_{n} overflows float64 for beta={beta:g}; lower n_series (max usable {n})"
            )
        coeffs.append(s)
    return DilationSeries(float(eps), float(beta), tuple(coeffs))


def build_S_operator(series: DilationSeries, dim: int) -> TruncatedOperator:
    """Diagonal operator ``diag(S_0, ..., S_{dim-1})``."""
    if dim > series.n_series:
        raise DimensionError(
            f"dim={dim} exceeds the {series.n_series} available series coefficients"
        )
    return TruncatedOperator(np.diag(np.asarray(series.coeffs[:dim], dtype=float)))


def series_partial_sums(series: DilationSeries, v: float) -> np.ndarray:
    """Cumulative sums of ``S_n (beta v^2)^n / n!``.

    Entry ``N-1`` is the partial sum over ``n < N``; the limit is
    ``eps sqrt(1 - v^2) exp(beta v^2)``.
    """
    x = series.beta * v * v
    S = np.asarray(series.coeffs)
    n = np.arange(series.n_series)
    if x == 0:
        w = (n == 0).astype(float)
    else:
        w = np.exp(n * math.log(x) - np.array([math.lgamma(k + 1) for k in n]))
    return np.cumsum(S * w)


def series_tail_bound(beta: float, v: float, order: int, weight: float = 1.0,
                      horizon: int = 20000) -> float:
    """Estimate ``weight * sum_{n >= order} |c_n| v^(2n)``.

    Terms are summed explicitly up to a horizon where they have decayed,
    with a geometric bound on the remainder.
    """
    u = v * v
    if u == 0:
        return 0.0
    M = order + 64
    while True:
        M = min(M, horizon)
        b = np.array(sqrt_series_coeffs(M))
        logj = np.arange(M + 1) * math.log(beta) - np.array(
            [math.lgamma(j + 1) for j in range(M + 1)])
        c = np.convolve(b, np.exp(logj))[: M + 1]
        t = np.abs(c) * np.exp(np.arange(M + 1) * math.log(u))
        rest = t[-1] * u / (1 - u)
        if rest < 1e-3 * max(t[order:].sum(), 1e-300) or M == horizon:
            return weight * (float(t[order:].sum()) + rest)
        M *= 2


@dataclass(frozen=True)
class DilationCheck:
    measured: float
    target: float
    abs_error: float
    dim: int


def adaptive_dim(params: BoostParams, eps: float = 1.0, tail_tol: float = TAIL_TOL) -> int:
    """Smallest dim with coherent tail and series tail both below ``tail_tol``."""
    alpha = alpha_of(params)
    dim = min_coherent_dim(alpha, tail_tol)
    if params.v == 0:
        return dim
    beta = beta_of(params)
    weight = eps * math.exp(-abs(alpha) ** 2)
    while series_tail_bound(beta, params.v, dim, weight) >= tail_tol:
        dim += 1
        if dim > MAX_ADAPTIVE_DIM:
            raise NumericError(
                f"no adaptive dim <= {MAX_ADAPTIVE_DIM} reaches series tail {tail_tol:g} "
                f"at v={params.v}"
            )
    return dim


def verify_dilation(params: BoostParams, eps: float = 1.0, dim: int | None = None) -> DilationCheck:
    """Compare ``<alpha|S|alpha>`` with the Lorentz-dilated slope ``eps / gamma``.

    ``dim=None`` selects the truncation adaptively. The dilation series is
    built to order ``dim`` and with the exact ``beta`` of ``params``.
    """
    target = eps / gamma(params.v)
    if dim is None:
        dim = adaptive_dim(params, eps)
    state = coherent_state(alpha_of(params), dim)
    series = dilation_series(eps, beta_of(params), dim)
    S = build_S_operator(series, dim)
    measured = expectation(S, state).real
    return DilationCheck(measured, target, abs(measured - target), dim)


def qtr_expectation_growth(series: DilationSeries, state: StateVector, dt: float,
                           dim: int | None = None) -> float:
    """Register accumulation ``<S> dt`` under a constant drift ``S``."""
    if not dt >= 0:
        raise ParameterError(f"elapsed time must be >= 0, got {dt!r}")
    if dim is not None and dim != state.dim:
        raise DimensionError(f"dim={dim} does not match state dim {state.dim}")
    S = build_S_operator(series, state.dim)
    return expectation(S, state).real * dt


def time_to_threshold(A: float, eps: float, v: float) -> float:
    """Time at which ``(eps / gamma(v)) t`` reaches ``A``."""
    if not A > 0:
        raise ParameterError(f"threshold A must be positive, got {A!r}")
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps!r}")
    return gamma(v) * A / eps
