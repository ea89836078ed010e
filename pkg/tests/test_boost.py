import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtrlab.boost import BoostParams, alpha_of, beta_of, boost_generator, boost_state
from qtrlab.errors import ParameterError, SuperluminalError, TruncationError
from qtrlab.fock import StateVector, coherent_state, fidelity, min_coherent_dim, vacuum

params_st = st.builds(
    BoostParams,
    v=st.floats(-0.99, 0.99),
    m=st.floats(0.1, 5),
    omega=st.floats(0.1, 5),
    hbar=st.floats(0.1, 5),
    t=st.floats(0, 5),
)


class TestParams:
    @pytest.mark.parametrize("v", [1.0, -1.0, 1.5, math.inf, math.nan])
    def test_superluminal(self, v):
        with pytest.raises(SuperluminalError):
            BoostParams(v)

    @pytest.mark.parametrize("bad", [dict(m=0), dict(omega=-2), dict(hbar=0), dict(t=-1)])
    def test_invalid(self, bad):
        with pytest.raises(ParameterError):
            BoostParams(0.5, **bad)


class TestGenerator:
    def test_t0(self):
        p = BoostParams(0.4, m=2.0, t=0.0)
        G = boost_generator(p, 6)
        from qtrlab.fock import quadrature_operators
        x, _ = quadrature_operators(6, 2.0)
        np.testing.assert_allclose(G.entries, -2.0 * x.entries)
        assert G.is_hermitian()

    def test_dim2_entry(self):
        G = boost_generator(BoostParams(0.1, t=1.0), 2)
        assert G.entries[0, 1] == pytest.approx(-1j / math.sqrt(2) - 1 / math.sqrt(2))

    @settings(max_examples=30, deadline=None)
    @given(params_st, st.integers(2, 20))
    def test_hermitian(self, p, dim):
        assert boost_generator(p, dim).is_hermitian(1e-12)


class TestAlpha:
    def test_no_boost(self):
        assert alpha_of(BoostParams(0.0, t=3.0)) == 0

    def test_t0(self):
        a = alpha_of(BoostParams(0.5))
        assert a.real == 0
        assert a.imag == pytest.approx(-0.35355339, abs=1e-8)

    def test_t2(self):
        a = alpha_of(BoostParams(0.5, t=2.0))
        assert a.real == pytest.approx(-0.70710678, abs=1e-8)
        assert a.imag == pytest.approx(-0.35355339, abs=1e-8)

    @pytest.mark.parametrize("t,beta", [(0.0, 0.5), (2.0, 2.5)])
    def test_beta_unit_frequency(self, t, beta):
        assert beta_of(BoostParams(0.3, t=t)) == pytest.approx(beta, rel=1e-15)

    def test_beta_literal_vs_exact(self):
        p = BoostParams(0.3, m=2.0, omega=4.0, hbar=1.0, t=1.0)
        # literal short form: (m / 2hbar)(omega t^2 + 1)
        assert beta_of(p, literal=True) == pytest.approx(5.0, rel=1e-15)
        # exact boost amplitude: (m / 2hbar)(omega t^2 + 1/omega)
        assert beta_of(p) == pytest.approx(4.25, rel=1e-15)

    def test_literal_only_valid_at_unit_frequency(self):
        p = BoostParams(0.3, m=2.0, omega=4.0, t=1.0)
        d = 40
        boosted = boost_state(p, vacuum(d))
        assert fidelity(boosted, coherent_state(alpha_of(p), d)) >= 1 - 1e-8
        assert fidelity(boosted, coherent_state(alpha_of(p, literal=True), d)) < 0.999

    @settings(max_examples=200, deadline=None)
    @given(params_st)
    def test_alpha_beta_identity(self, p):
        assert abs(abs(alpha_of(p)) ** 2 - p.v ** 2 * beta_of(p)) <= 1e-12 * max(1, beta_of(p))


class TestBoostState:
    def test_identity_at_rest(self):
        rng = np.random.default_rng(3)
        psi = StateVector(rng.normal(size=10) + 1j * rng.normal(size=10))
        out = boost_state(BoostParams(0.0, t=2.0), psi)
        np.testing.assert_allclose(out.amplitudes, psi.amplitudes, atol=1e-15)

    def test_vacuum_fidelity(self):
        p = BoostParams(0.3, t=1.0)
        out = boost_state(p, vacuum(32))
        assert fidelity(out, coherent_state(alpha_of(p), 32)) >= 1 - 1e-8

    def test_too_small(self):
        with pytest.raises(TruncationError) as info:
            boost_state(BoostParams(0.9, t=5.0), vacuum(4))
        assert info.value.required_dim > 4

    @settings(max_examples=40, deadline=None)
    @given(params_st)
    def test_vacuum_property(self, p):
        alpha = alpha_of(p)
        if abs(alpha) > 4:
            return
        d = min_coherent_dim(alpha)
        out = boost_state(p, vacuum(d))
        assert np.linalg.norm(out.amplitudes) == pytest.approx(1, abs=1e-10)
        assert fidelity(out, coherent_state(alpha, d)) >= 1 - 1e-8

    @settings(max_examples=30, deadline=None)
    @given(params_st, st.integers(0, 2 ** 32 - 1))
    def test_inverse(self, p, seed):
        alpha = alpha_of(p)
        if abs(alpha) > 4:
            return
        d = min_coherent_dim(alpha) + 4
        rng = np.random.default_rng(seed)
        psi = StateVector(rng.normal(size=d) + 1j * rng.normal(size=d))
        back = BoostParams(-p.v, p.m, p.omega, p.hbar, p.t)
        assert fidelity(boost_state(back, boost_state(p, psi)), psi) >= 1 - 1e-8
