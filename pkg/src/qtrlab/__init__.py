"""Numerical laboratory for time dilation as a quantum time-register effect."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DimensionError,
    NumericError,
    ParameterError,
    QTRError,
    ShapeError,
    SuperluminalError,
    TruncationError,
)
from .fock import (  # noqa: E402
    StateVector,
    TruncatedOperator,
    coherent_state,
    displacement,
    expectation,
    ladder_operators,
    matrix_exponential,
    min_coherent_dim,
    quadrature_operators,
    vacuum,
)
from .boost import BoostParams, alpha_of, beta_of, boost_generator, boost_state  # noqa: E402
from .dilation import (  # noqa: E402
    DilationSeries,
    build_S_operator,
    dilation_series,
    gamma,
    qtr_expectation_growth,
    sqrt_series_coeffs,
    time_to_threshold,
    verify_dilation,
)
from .register import (  # noqa: E402
    WalkConfig,
    WalkEnsemble,
    detect_ticks,
    ensemble_mean,
    simulate_walks,
    sprt_boundaries,
    sprt_run,
)
from .langevin import LangevinSpec, adjoint_drift, check_constant_S  # noqa: E402
