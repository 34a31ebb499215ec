import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from fracdev.jumps import Degenerate, Exponential, Gaussian, TwoPoint, Uniform
from fracdev.kernels import (
    CgfDomainError,
    CgfLimit,
    ScalingRegime,
    alpha_exponent,
    cgf_classical_nu1,
    cgf_limit_LD,
    cgf_limit_MD,
    interarrival_cgf,
    interarrival_cgf_inverse,
    log_mgf_compound,
    mgf_compound,
    mgf_inverse_stable,
    psi_kappa,
)
from fracdev.mittag_leffler import ml
from fracdev.samplers import ProcessParams


class TestFiniteTime:
    def test_inverse_stable_mgf(self):
        assert mgf_inverse_stable(0.5, 4.0, 0.5) == pytest.approx(ml(0.5, 1.0))

    def test_compound_at_zero(self):
        assert mgf_compound(ProcessParams(0.5, 1), Gaussian(0, 1), 3.0, 0.0) == 1.0

    def test_compound_formula(self):
        params, law = ProcessParams(0.7, 2.0), Uniform(-1.0, 2.0)
        theta, t = 0.3, 5.0
        arg = 2.0 * (law.mgf(theta) - 1.0) * t**0.7
        assert mgf_compound(params, law, t, theta) == pytest.approx(ml(0.7, arg), rel=1e-13)
        assert log_mgf_compound(params, law, t, theta) == pytest.approx(math.log(ml(0.7, arg)), rel=1e-13)

    def test_outside_domain(self):
        with pytest.raises(CgfDomainError):
            mgf_compound(ProcessParams(0.5, 1), Exponential(1.0), 1.0, 1.5)

    @pytest.mark.parametrize("nu, t", [(1.0, 1.0), (0.5, 0.0)])
    def test_inverse_stable_arguments(self, nu, t):
        with pytest.raises(ValueError):
            mgf_inverse_stable(nu, t, 0.1)


class TestLdLimit:
    @pytest.mark.parametrize("law", [Degenerate(1.0), Gaussian(0.2, 1.0), TwoPoint(1, -1, 0.3)], ids=repr)
    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.8])
    def test_is_limit_of_scaled_log_mgf(self, law, nu):
        params = ProcessParams(nu, 1.5)
        cgf = cgf_limit_LD(params, law)
        t = 1e6
        for theta in (-0.8, -0.1, 0.2, 0.9):
            scaled = log_mgf_compound(params, law, t, theta) / t
            # the finite-t error is O(log(t)/t) where Lambda > 0 and O(t^-nu) where Lambda = 0
            assert scaled == pytest.approx(cgf(theta), abs=5 * t ** (-nu))

    def test_zero_where_mgf_below_one(self):
        cgf = cgf_limit_LD(ProcessParams(0.5, 1), Degenerate(1.0))
        assert cgf(-3.0) == 0.0
        assert cgf(0.0) == 0.0
        assert cgf(1.0) == pytest.approx((math.e - 1) ** 2)

    def test_infinite_outside_domain(self):
        cgf = cgf_limit_LD(ProcessParams(0.5, 1), Exponential(2.0))
        assert cgf(2.0) == math.inf
        assert cgf(5.0) == math.inf
        assert cgf.domain == (-math.inf, 2.0)

    def test_overflow_is_inf(self):
        cgf = cgf_limit_LD(ProcessParams(0.1, 1), Degenerate(1.0))
        assert cgf(500.0) == math.inf

    def test_classical(self):
        cgf = cgf_classical_nu1(2.0, Degenerate(1.0))
        assert cgf(1.0) == pytest.approx(2 * (math.e - 1))
        assert cgf(-1.0) < 0


class TestMdLimit:
    @pytest.mark.parametrize(
        "law, kind", [(Gaussian(0.0, 2.0), "MD_mu_zero"), (Degenerate(1.0), "MD_mu_pos"), (Degenerate(-1.0), "MD_mu_neg")]
    )
    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.8])
    def test_is_limit_of_scaled_log_mgf(self, law, kind, nu):
        lam = 1.3
        cgf = cgf_limit_MD(nu, lam, law.mean, law.variance)
        assert cgf.kind == kind
        regime = ScalingRegime.for_process(nu, law.mean, beta=0.5)
        params = ProcessParams(nu, lam)
        errs = []
        for t in (1e6, 1e10, 1e14):
            a = regime.a_t(t)
            lead = regime.md_multiplier(t) / t  # factor in front of S(t)
            err = 0.0
            for theta in (-1.0, -0.3, 0.4, 1.2):
                scaled = a * log_mgf_compound(params, law, t, theta * lead / a)
                err = max(err, abs(scaled - cgf(theta)) / max(1.0, cgf(theta)))
            errs.append(err)
        # convergence is slow for small nu (relative corrections decay like a power of a_t)
        assert errs[2] < errs[1] < errs[0]
        assert errs[2] < 0.05

    def test_closed_forms(self):
        assert cgf_limit_MD(0.5, 1.0, 0.0, 2.0)(2.0) == pytest.approx(16.0)
        pos = cgf_limit_MD(0.5, 1.0, 1.0)
        assert pos(2.0) == 4.0 and pos(-2.0) == 0.0
        neg = cgf_limit_MD(0.5, 1.0, -1.0)
        assert neg(-2.0) == 4.0 and neg(2.0) == 0.0

    def test_mu_zero_needs_variance(self):
        with pytest.raises(ValueError):
            cgf_limit_MD(0.5, 1.0, 0.0, 0.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            CgfLimit("XX", 0.5, 1.0)


class TestRenewal:
    @given(st.floats(1e-3, 50.0), st.floats(0.05, 0.99), st.floats(0.1, 10.0))
    def test_inverse_round_trip(self, theta, nu, lam):
        # keep eta = -(lam*expm1(theta))**(1/nu) inside the double range
        assume((math.log(lam) + theta) / nu < 700)
        eta = interarrival_cgf_inverse(nu, lam, -theta)
        assert eta < 0
        assert interarrival_cgf(nu, lam, eta) == pytest.approx(-theta, rel=1e-10)

    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.8])
    @pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
    def test_psi_matches_ld_limit(self, nu, lam):
        cgf = cgf_limit_LD(ProcessParams(nu, lam), Degenerate(1.0))
        for theta in np.linspace(0.01, 3.0, 31):
            assert abs(psi_kappa(nu, lam, theta) - cgf(theta)) <= 1e-12 * max(1.0, cgf(theta))

    def test_kappa_is_log_laplace_of_interarrival(self):
        # Mittag-Leffler waiting time: E[exp(eta T)] = lam / (lam + (-eta)^nu)
        assert interarrival_cgf(0.5, 2.0, -4.0) == pytest.approx(math.log(2.0 / 4.0))

    def test_domains(self):
        with pytest.raises(CgfDomainError):
            interarrival_cgf(0.5, 1.0, 0.0)
        with pytest.raises(CgfDomainError):
            interarrival_cgf_inverse(0.5, 1.0, 0.0)
        with pytest.raises(CgfDomainError):
            psi_kappa(0.5, 1.0, 0.0)


class TestScaling:
    def test_alpha(self):
        assert alpha_exponent(0.5, 0.0) == 0.75
        assert alpha_exponent(0.5, 1.0) == 0.5

    @pytest.mark.parametrize("beta", [0.0, 1.0, -0.2, 1.5])
    def test_beta_validated(self, beta):
        assert not ScalingRegime.accepts(beta)
        with pytest.raises(ValueError):
            ScalingRegime(0.5, beta)

    def test_speeds(self):
        r = ScalingRegime.for_process(0.5, 1.0, beta=0.5)
        t = 100.0
        assert r.a_t(t) == pytest.approx(0.1)
        assert r.md_speed(t) == pytest.approx(10.0)
        assert r.ld_speed(t) == t
        assert r.weak_multiplier(t) == pytest.approx(10.0)
        assert r.md_multiplier(t) == pytest.approx(math.sqrt(10.0))


class TestReferenceExamples:
    def test_inverse_stable_mgf(self):
        assert mgf_inverse_stable(0.5, 1.0, 0.0) == 1.0
        assert mgf_inverse_stable(0.5, 1.0, 1.0) == pytest.approx(5.00898, abs=5e-6)
        assert mgf_inverse_stable(0.7, 2.0, -1.0) == pytest.approx(ml(0.7, -(2.0**0.7)), rel=1e-15)

    def test_compound_mgf(self):
        assert mgf_compound(ProcessParams(0.7, 3.0), Gaussian(1.0, 2.0), 5.0, 0.0) == 1.0
        value = mgf_compound(ProcessParams(1.0, 1.0), Degenerate(1.0), 1.0, math.log(2.0))
        assert value == pytest.approx(math.e, rel=1e-14)
        with pytest.raises(CgfDomainError):
            mgf_compound(ProcessParams(0.5, 1.0), Exponential(1.0), 1.0, 1.0)

    def test_alpha(self):
        assert alpha_exponent(0.9, -2.0) == pytest.approx(0.1)

    def test_ld_examples(self):
        params = ProcessParams(0.5, 1.0)
        for law in (Degenerate(1.0), Gaussian(0.0, 1.0), Uniform(-1, 2), TwoPoint(1, -1, 0.5), Exponential(1.0)):
            assert cgf_limit_LD(params, law)(0.0) == 0.0
        assert cgf_limit_LD(params, Degenerate(1.0))(math.log(2.0)) == pytest.approx(1.0, rel=1e-15)
        expected = math.expm1(0.125) ** 2
        assert cgf_limit_LD(params, Gaussian(0.0, 1.0))(-0.5) == pytest.approx(expected, rel=1e-14)

    def test_md_examples(self):
        assert cgf_limit_MD(0.5, 1.0, 0.0, 2.0)(1.0) == pytest.approx(1.0)
        assert cgf_limit_MD(0.5, 1.0, 1.0)(-3.0) == 0.0
        assert cgf_limit_MD(0.5, 1.0, -1.0)(-1.0) == pytest.approx(1.0)

    def test_classical_examples(self):
        cgf = cgf_classical_nu1(1.0, Degenerate(1.0))
        assert cgf(0.0) == 0.0
        assert cgf(1.0) == pytest.approx(math.e - 1.0)

    def test_kappa_near_zero(self):
        assert abs(interarrival_cgf(0.5, 1.0, -1e-14)) < 1e-6

    @pytest.mark.parametrize("theta", [0.5, 1.0])
    def test_gartner_ellis_trend(self, theta):
        params, law = ProcessParams(0.5, 1.0), Degenerate(1.0)
        limit = cgf_limit_LD(params, law)(theta)
        diffs = [abs(log_mgf_compound(params, law, t, theta) / t - limit) for t in (10.0, 100.0, 1e3, 1e4)]
        assert all(b < a for a, b in zip(diffs, diffs[1:]))
        assert diffs[-1] < 0.05
