"""
Classical stochastic time register.

A biased Wiener martingale

    Z(t + dt) - Z(t) = sqrt(delta2 dt) * N(theta, 1/2)

sampled on a fixed step grid. Each walker draws from its own Philox
(counter-based) substream keyed by ``(seed, walker)``, so an ensemble is
identical whether walkers are generated serially, in parallel, or one at a
time.

Only ``theta`` and ``sqrt(delta2 dt)`` affect the walk; ``delta2`` and
``dt`` are kept separate to mirror the dynamical equation.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

#: Variance of the unscaled Gaussian increment.
INCREMENT_VARIANCE = 0.5


@dataclass(frozen=True)
class WalkConfig:
    theta: float
    delta2: float = 1.0
    dt: float = 1.0
    steps: int = 100
    walkers: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ParameterError(f"theta must be finite, got {self.theta!r}")
        if not (math.isfinite(self.delta2) and self.delta2 > 0):
            raise ParameterError(f"delta2 must be positive, got {self.delta2!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ParameterError(f"dt must be positive, got {self.dt!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ParameterError(f"steps must be an integer >= 1, got {self.steps!r}")
        if int(self.walkers) != self.walkers or self.walkers < 1:
            raise ParameterError(f"walkers must be an integer >= 1, got {self.walkers!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def scale(self) -> float:
        """``sqrt(delta2 dt)``, the factor multiplying each Gaussian draw."""
        return math.sqrt(self.delta2 * self.dt)

    @property
    def drift(self) -> float:
        """Expected increment per step, ``theta sqrt(delta2 dt)``."""
        return self.theta * self.scale


def walker_rng(seed: int, walker: int) -> np.random.Generator:
    """Independent substream for one walker."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(walker),))
    return np.random.Generator(np.random.Philox(ss))


def walker_increments(config: WalkConfig, walker: int) -> np.ndarray:
    """The ``steps`` increments of one walker."""
    g = walker_rng(config.seed, walker).standard_normal(config.steps)
    return config.scale * (config.theta + math.sqrt(INCREMENT_VARIANCE) * g)


@dataclass(frozen=True, eq=False)
class WalkEnsemble:
    """``walkers x (steps + 1)`` trajectories, column 0 all zeros."""

    trajectories: np.ndarray
    config: WalkConfig

    @property
    def walkers(self) -> int:
        return self.trajectories.shape[0]


def simulate_walks(config: WalkConfig, n_jobs: int = 1) -> WalkEnsemble:
    """Sample every walker of ``config``.

    ``n_jobs > 1`` draws walkers on a thread pool; the result is
    bit-identical to the serial one.
    """
    Z = np.zeros((config.walkers, config.steps + 1))

    def fill(w):
        np.cumsum(walker_increments(config, w), out=Z[w, 1:])

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(fill, range(config.walkers)))
    else:
        for w in range(config.walkers):
            fill(w)
    Z.setflags(write=False)
    return WalkEnsemble(Z, config)


def _nonempty(ensemble):
    if ensemble.trajectories.size == 0 or ensemble.walkers == 0:
        raise ParameterError("ensemble has no walkers")


def ensemble_mean(ensemble: WalkEnsemble) -> np.ndarray:
    """Per-step mean across walkers."""
    _nonempty(ensemble)
    return ensemble.trajectories.mean(axis=0)


def ensemble_std(ensemble: WalkEnsemble) -> np.ndarray:
    """Per-step sample standard deviation across walkers (0 for one walker)."""
    _nonempty(ensemble)
    if ensemble.walkers == 1:
        return np.zeros(ensemble.trajectories.shape[1])
    return ensemble.trajectories.std(axis=0, ddof=1)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    analytic: float

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.slope == self.analytic else math.inf
        return (self.slope - self.analytic) / self.stderr


def fit_mean_slope(ensemble: WalkEnsemble) -> SlopeFit:
    """Least-squares slope of the ensemble mean against step index.

    The OLS slope is linear in the data, so the slope of the mean equals the
    mean of per-walker slopes; those are i.i.d., which gives a standard
    error that respects the random-walk correlation along each trajectory.
    """
    _nonempty(ensemble)
    Z = ensemble.trajectories
    n = np.arange(Z.shape[1], dtype=float)
    w = (n - n.mean()) / np.sum((n - n.mean()) ** 2)
    slopes = Z @ w
    W = len(slopes)
    stderr = float(slopes.std(ddof=1) / math.sqrt(W)) if W > 1 else math.nan
    return SlopeFit(float(ensemble_mean(ensemble) @ w), stderr, ensemble.config.drift)


@dataclass(frozen=True)
class TickRecord:
    walker: int
    step: int | None
    threshold: float


def detect_ticks(ensemble: WalkEnsemble, threshold: float) -> list[TickRecord]:
    """First step at which each walker reaches ``threshold`` (``None`` if never)."""
    if not threshold > 0:
        raise ParameterError(f"threshold must be positive, got {threshold!r}")
    hit = ensemble.trajectories >= threshold
    first = np.argmax(hit, axis=1)
    crossed = hit.any(axis=1)
    return [
        TickRecord(w, int(first[w]) if crossed[w] else None, float(threshold))
        for w in range(ensemble.walkers)
    ]


def sprt_boundaries(alpha_err: float, beta_err: float) -> tuple[float, float]:
    """Wald's ``(upper, lower)`` log-likelihood-ratio boundaries."""
    for name, r in (("alpha_err", alpha_err), ("beta_err", beta_err)):
        if not 0 < r < 0.5:
            raise ParameterError(f"{name} must lie in (0, 1/2), got {r!r}")
    return math.log((1 - beta_err) / alpha_err), math.log(beta_err / (1 - alpha_err))


class Decision(str, enum.Enum):
    UPPER = "accept-upper"
    LOWER = "accept-lower"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class SPRTResult:
    decision: Decision
    step: int
    value: float


def _sprt_path(Z, upper, lower):
    out = (Z >= upper) | (Z <= lower)
    if not out.any():
        return SPRTResult(Decision.UNDECIDED, len(Z) - 1, float(Z[-1]))
    k = int(np.argmax(out))
    d = Decision.UPPER if Z[k] >= upper else Decision.LOWER
    return SPRTResult(d, k, float(Z[k]))


def _check_sprt_bounds(upper, lower):
    if not lower < 0 < upper:
        raise ParameterError(f"need lower < 0 < upper, got lower={lower!r}, upper={upper!r}")


def sprt_run(config: WalkConfig, upper: float, lower: float, walker: int = 0) -> SPRTResult:
    """Run walker ``walker`` of ``config`` until it leaves ``(lower, upper)``.

    The walk is treated as the accumulated log-likelihood ratio. If neither
    boundary is hit within ``config.steps`` the result is undecided with
    ``step = config.steps``.
    """
    _check_sprt_bounds(upper, lower)
    Z = np.concatenate(([0.0], np.cumsum(walker_increments(config, walker))))
    return _sprt_path(Z, upper, lower)


def sprt_ensemble(config: WalkConfig, upper: float, lower: float) -> list[SPRTResult]:
    """:func:`sprt_run` for every walker of ``config``."""
    _check_sprt_bounds(upper, lower)
    ens = simulate_walks(config)
    return [_sprt_path(Z, upper, lower) for Z in ens.trajectories]
