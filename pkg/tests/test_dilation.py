import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtrlab.boost import BoostParams, alpha_of
from qtrlab.dilation import (
    DilationSeries,
    adaptive_dim,
    build_S_operator,
    dilation_series,
    gamma,
    product_coeffs,
    qtr_expectation_growth,
    series_partial_sums,
    series_tail_bound,
    sqrt_series_coeffs,
    time_to_threshold,
    verify_dilation,
)
from qtrlab.errors import DimensionError, NumericError, ParameterError, SuperluminalError
from qtrlab.fock import coherent_state, min_coherent_dim, vacuum


def exact_S(eps, beta, n):
    """S_n = eps n! c_n / beta^n in rational arithmetic (beta rational)."""
    beta = Fraction(beta)
    b = [Fraction(1)]
    for k in range(1, n + 1):
        b.append(b[-1] * (Fraction(2 * k - 3, 2)) / k)
    c = sum(b[k] * beta ** (n - k) / math.factorial(n - k) for k in range(n + 1))
    return Fraction(eps) * math.factorial(n) * c / beta ** n


class TestGamma:
    @pytest.mark.parametrize("v,g", [(0, 1), (0.6, 1.25), (0.8, 5 / 3), (-0.6, 1.25)])
    def test_values(self, v, g):
        assert gamma(v) == pytest.approx(g, rel=1e-15)

    @pytest.mark.parametrize("v", [1, -1, 1.01])
    def test_superluminal(self, v):
        with pytest.raises(SuperluminalError):
            gamma(v)

    def test_blowup(self):
        assert gamma(0.999) > 22

    def test_increasing(self):
        vs = np.linspace(0, 0.999, 500)
        assert np.all(np.diff([gamma(v) for v in vs]) > 0)


class TestSqrtSeries:
    def test_order0(self):
        assert sqrt_series_coeffs(0) == [1.0]

    def test_order3(self):
        assert sqrt_series_coeffs(3) == [1.0, -0.5, -0.125, -0.0625]

    def test_against_numerical_derivatives(self):
        mpmath.mp.dps = 30
        oracle = mpmath.taylor(lambda u: mpmath.sqrt(1 - u), 0, 10)
        np.testing.assert_allclose(sqrt_series_coeffs(10), [float(x) for x in oracle], rtol=1e-14)

    def test_partial_sums_converge(self):
        b = sqrt_series_coeffs(200)
        s = math.fsum(bk * 0.25 ** k for k, bk in enumerate(b))
        assert s == pytest.approx(math.sqrt(0.75), abs=1e-10)

    def test_negative_order(self):
        with pytest.raises(ParameterError):
            sqrt_series_coeffs(-1)


class TestDilationSeries:
    @given(st.floats(0.01, 100), st.floats(0.05, 20))
    def test_s00(self, eps, beta):
        assert dilation_series(eps, beta, 4).coeffs[0] == eps

    def test_s11_beta_half(self):
        assert dilation_series(1, 0.5, 2).coeffs[1] == 0.0

    def test_s11_beta_2_5(self):
        assert dilation_series(1, 2.5, 2).coeffs[1] == pytest.approx(0.8, abs=1e-15)

    def test_frozen_s22(self):
        # hand convolution: c_2 = beta^2/2 - beta/2 - 1/8
        assert dilation_series(1, 0.5, 3).coeffs[2] == pytest.approx(-2.0, rel=1e-15)
        assert dilation_series(1, 2.5, 3).coeffs[2] == pytest.approx(0.56, rel=1e-14)

    @pytest.mark.parametrize("beta", ["1/2", "5/2", "1/10", "4", "17/4"])
    def test_against_rational_oracle(self, beta):
        s = dilation_series(1.0, float(Fraction(beta)), 60)
        for n in (0, 1, 2, 5, 17, 40, 59):
            ref = exact_S(1, Fraction(beta), n)
            assert s.coeffs[n] == pytest.approx(float(ref), rel=1e-12, abs=1e-300)

    def test_product_coeffs_against_mpmath(self):
        mpmath.mp.dps = 40
        for beta in (0.5, 2.5, 7.0):
            ref = mpmath.taylor(lambda u: mpmath.sqrt(1 - u) * mpmath.exp(beta * u), 0, 25)
            np.testing.assert_allclose(product_coeffs(beta, 25), [float(x) for x in ref],
                                       rtol=1e-12, atol=1e-15)

    def test_overflow_reported(self):
        with pytest.raises(NumericError):
            dilation_series(1.0, 0.01, 400)

    @pytest.mark.parametrize("bad", [(0, 1, 3), (1, 0, 3), (1, -1, 3), (1, 1, 0)])
    def test_preconditions(self, bad):
        with pytest.raises(ParameterError):
            dilation_series(*bad)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.1, 5), st.floats(0, 0.9))
    def test_series_identity(self, beta, v):
        eps = 1.0
        N = 2
        while series_tail_bound(beta, v, N) >= 1e-10:
            N += 1
        s = dilation_series(eps, beta, N)
        partial = series_partial_sums(s, v)
        target = eps * math.sqrt(1 - v * v) * math.exp(beta * v * v)
        assert partial[-1] == pytest.approx(target, abs=1e-8)

    def test_tail_bound_brackets_error(self):
        s = dilation_series(1.0, 1.0, 120)
        v = 0.8
        target = math.sqrt(1 - v * v) * math.exp(v * v)
        partial = series_partial_sums(s, v)
        for N in (10, 30, 60):
            err = abs(partial[N - 1] - target)
            assert err <= series_tail_bound(1.0, v, N) * (1 + 1e-9) + 1e-14


class TestOperator:
    def test_dim1_invalid(self):
        with pytest.raises(DimensionError):
            build_S_operator(dilation_series(1, 0.5, 4), 1)

    def test_diag_beta_half(self):
        S = build_S_operator(dilation_series(1, 0.5, 2), 2)
        np.testing.assert_array_equal(S.entries, np.diag([1.0, 0.0]))

    def test_hermitian(self):
        assert build_S_operator(dilation_series(1, 1.3, 30), 30).is_hermitian()

    def test_order_error(self):
        with pytest.raises(DimensionError):
            build_S_operator(dilation_series(1, 0.5, 4), 5)


class TestVerify:
    def test_rest(self):
        r = verify_dilation(BoostParams(0.0), eps=2.0)
        assert r.measured == r.target == 2.0
        assert r.abs_error == 0

    def test_v06_dim64(self):
        r = verify_dilation(BoostParams(0.6), dim=64)
        assert r.measured == pytest.approx(0.8, abs=1e-6)

    def test_v09_adaptive(self):
        r = verify_dilation(BoostParams(0.9))
        assert r.measured == pytest.approx(math.sqrt(1 - 0.81), abs=1e-5)
        assert abs(r.measured - 0.43588989) < 1e-5

    @pytest.mark.parametrize("v", [0.3, 0.6, 0.9])
    def test_error_shrinks(self, v):
        p = BoostParams(v)
        d0 = min_coherent_dim(alpha_of(p))
        errs = [verify_dilation(p, dim=d).abs_error for d in (d0, 2 * d0, 4 * d0, 8 * d0)]
        for prev, cur in zip(errs, errs[1:]):
            assert cur < prev or cur < 1e-12

    def test_adaptive_dim_meets_tails(self):
        p = BoostParams(0.8, t=1.0)
        d = adaptive_dim(p)
        assert d >= 2
        assert verify_dilation(p, dim=d).abs_error < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 0.9), st.floats(0.5, 2), st.floats(0.5, 2), st.floats(0, 1.5))
    def test_property(self, v, m, omega, t):
        r = verify_dilation(BoostParams(v, m=m, omega=omega, t=t), eps=1.5)
        assert r.abs_error <= 1e-5
        assert r.target == pytest.approx(1.5 * math.sqrt(1 - v * v))

    def test_superluminal(self):
        # rejected when the frame is built, before any truncation work
        with pytest.raises(SuperluminalError):
            verify_dilation(BoostParams(1.0))


class TestGrowth:
    def test_zero_elapsed(self):
        s = dilation_series(1, 0.5, 4)
        assert qtr_expectation_growth(s, vacuum(4), 0.0) == 0

    def test_rest_frame(self):
        s = dilation_series(1, 0.5, 4)
        assert qtr_expectation_growth(s, vacuum(4), 5.0) == 5.0

    def test_moving_frame(self):
        p = BoostParams(0.6)
        d = adaptive_dim(p)
        s = dilation_series(1.0, 0.5, d)
        assert qtr_expectation_growth(s, coherent_state(alpha_of(p), d), 5.0) == pytest.approx(4, abs=5e-5)

    def test_negative_elapsed(self):
        with pytest.raises(ParameterError):
            qtr_expectation_growth(dilation_series(1, 0.5, 4), vacuum(4), -1)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionError):
            qtr_expectation_growth(dilation_series(1, 0.5, 8), vacuum(4), 1.0, dim=8)


class TestThreshold:
    def test_rest(self):
        assert time_to_threshold(1, 1, 0) == 1

    def test_v06(self):
        assert time_to_threshold(1, 1, 0.6) == pytest.approx(1.25, rel=1e-15)

    @given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(-0.999, 0.999))
    def test_ratio(self, A, eps, v):
        r = time_to_threshold(A, eps, v) / time_to_threshold(A, eps, 0)
        assert r == pytest.approx(gamma(v), rel=1e-12)

    @pytest.mark.parametrize("bad", [(0, 1, 0.1), (1, 0, 0.1)])
    def test_invalid(self, bad):
        with pytest.raises(ParameterError):
            time_to_threshold(*bad)

    def test_superluminal(self):
        with pytest.raises(SuperluminalError):
            time_to_threshold(1, 1, 1.0)


def test_series_dataclass_order():
    s = DilationSeries(1.0, 0.5, (1.0, 0.0, -2.0))
    assert s.n_series == 3
