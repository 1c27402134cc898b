import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccc_rates import kernels
from ccc_rates.channel import ChannelParams, MCConfig, params_from_snr
from ccc_rates.constellation import Constellation, gen_apsk, gen_psk, gen_square_qam, normalize, rotate, single_point
from ccc_rates.errors import ContractError, PreconditionError
from ccc_rates.mi import (
    Method,
    MIEstimate,
    Stream,
    combine,
    mi_conditional,
    mi_marginal,
    rate_region_corner,
    secrecy_rates,
    sum_rate,
)
from ccc_rates.oracle import QuadratureConfig, quad_mi_terms

MC = MCConfig(4000, seed=7)


def close(est: MIEstimate, ref: float, floor: float = 0.01) -> bool:
    return abs(est.bits - ref) <= max(3 * est.std_error, floor)


class TestDegenerate:
    def test_zero_power(self, qpsk):
        p = ChannelParams(0.0, 1.0, 1.0)
        assert mi_marginal(qpsk, qpsk, 1.0, MC, power=0.0).bits == 0.0
        assert sum_rate(qpsk, qpsk, p, MC).bits == 0.0
        sec = secrecy_rates(qpsk, qpsk, p, MC)
        c = sec.components
        for term in (c.i_x2_y, c.i_x1_y_given_x2, c.i_x2_y_given_x1, c.i_x1_ye, c.i_x2_ye):
            assert term.bits == 0.0 and term.std_error == 0.0

    def test_single_symbol_alphabets(self):
        one = single_point()
        assert mi_marginal(one, one, 0.1, MC).bits == 0.0
        assert mi_conditional(one, one, 0.1, MC).bits == 0.0

    def test_single_point_user2(self, qpsk):
        pair = rate_region_corner(qpsk, single_point(), params_from_snr(5.0), MC)
        assert pair.r2.bits == 0.0
        assert abs(pair.sum.bits - pair.r1.bits) <= 3 * math.hypot(pair.sum.std_error, pair.r1.std_error)


class TestContract:
    def test_unnormalized_rejected(self, qpsk):
        raw = gen_square_qam(4)
        with pytest.raises(ContractError):
            mi_marginal(raw, qpsk, 1.0, MC)
        with pytest.raises(ContractError):
            mi_conditional(qpsk, raw, 1.0, MC)

    def test_bad_sigma(self, qpsk):
        with pytest.raises(ContractError):
            mi_marginal(qpsk, qpsk, 0.0, MC)

    def test_non_degraded_refused(self, qpsk):
        with pytest.raises(PreconditionError):
            secrecy_rates(qpsk, qpsk, params_from_snr(10.0, 12.0), MC)


class TestAgainstOracle:
    def test_qpsk_marginal(self, qpsk):
        ref = quad_mi_terms(qpsk, qpsk, ChannelParams(1.0, 0.1, 0.1)).i_x2_y
        est = mi_marginal(qpsk, qpsk, 0.1, MCConfig(100_000, seed=1))
        assert close(est, ref)

    def test_hqam_conditional(self, hqam16):
        ref = quad_mi_terms(hqam16, single_point(), ChannelParams(1.0, 0.1, 0.1)).i_x1_y_given_x2
        est = mi_conditional(hqam16, hqam16, 0.1, MCConfig(100_000, seed=2))
        assert close(est, ref)

    def test_qpsk_corner_10db(self, qpsk):
        p = params_from_snr(10.0)
        t = quad_mi_terms(qpsk, qpsk, p)
        pair = rate_region_corner(qpsk, qpsk, p, MCConfig(10_000, seed=3))
        assert close(pair.r1, t.i_x1_y_given_x2)
        assert close(pair.r2, t.i_x2_y_given_x1)
        assert close(pair.sum, t.sum_rate)

    def test_secrecy_terms(self, qpsk):
        p = params_from_snr(5.0, 0.0)
        t = quad_mi_terms(qpsk, rotate(qpsk, 0.4), p)
        sec = secrecy_rates(qpsk, rotate(qpsk, 0.4), p, MCConfig(10_000, seed=4))
        c = sec.components
        assert close(c.i_x2_y, t.i_x2_y)
        assert close(c.i_x1_y_given_x2, t.i_x1_y_given_x2)
        assert close(c.i_x2_y_given_x1, t.i_x2_y_given_x1)
        assert close(c.i_x1_ye, t.i_x1_ye)
        assert close(c.i_x2_ye, t.i_x2_ye)


class TestLimits:
    def test_bpsk_noiseless(self, bpsk):
        est = mi_conditional(bpsk, bpsk, 1e-6, MC)
        assert est.bits == pytest.approx(1.0, abs=0.01)

    def test_bpsk_pair_40db(self, bpsk):
        p = params_from_snr(40.0)
        assert sum_rate(bpsk, bpsk, p, MC).bits == pytest.approx(1.5, abs=0.02)
        assert sum_rate(bpsk, rotate(bpsk, math.pi / 2), p, MC).bits == pytest.approx(2.0, abs=0.02)

    @pytest.mark.parametrize("pair", ["qpsk", "bpsk_apsk"])
    def test_vanishing_snr(self, pair, qpsk, bpsk):
        a, b = (qpsk, qpsk) if pair == "qpsk" else (bpsk, normalize(gen_apsk(16)))
        assert sum_rate(a, b, params_from_snr(-30.0), MC).bits < 0.01

    def test_tiny_noise_stays_finite(self, qpsk):
        est = sum_rate(qpsk, rotate(qpsk, 0.3), ChannelParams(1.0, 1e-8, 1e-8), MCConfig(200, 0))
        assert est.bits == pytest.approx(4.0, abs=1e-9)


class TestStructure:
    def test_symmetric_corner(self, qpsk):
        pair = rate_region_corner(qpsk, qpsk, params_from_snr(3.0), MC)
        assert abs(pair.r1.bits - pair.r2.bits) <= 3 * math.hypot(pair.r1.std_error, pair.r2.std_error)

    def test_equal_noise_ssr_residual(self, qpsk):
        p = params_from_snr(5.0)
        sec = secrecy_rates(qpsk, qpsk, p, MC)
        raw = sec.components.ssr_raw
        assert raw.bits >= -3 * raw.std_error
        assert sec.ssr_bits >= 0.0 and sec.r1_sec_bits >= 0.0 and sec.r2_sec_bits >= 0.0
        assert sec.ssr_bits <= sec.components.sum_rate.bits + 3 * raw.std_error

    def test_blind_eve(self, qpsk):
        snr = 8.0
        p = params_from_snr(snr, snr - 60.0)
        sec = secrecy_rates(qpsk, qpsk, p, MC)
        assert abs(sec.ssr_bits - sec.components.sum_rate.bits) <= 0.02

    def test_joint_rotation(self, qpsk):
        p = params_from_snr(6.0)
        a = sum_rate(qpsk, rotate(qpsk, 0.2), p, MC)
        b = sum_rate(rotate(qpsk, 1.1), rotate(qpsk, 1.3), p, MC)
        assert abs(a.bits - b.bits) <= 3 * math.hypot(a.std_error, b.std_error)

    def test_single_draw_has_infinite_error(self, qpsk):
        est = mi_conditional(qpsk, qpsk, 0.5, MCConfig(1, 0))
        assert math.isinf(est.std_error)

    def test_stream_tags_decorrelate_terms(self, qpsk):
        a = mi_conditional(qpsk, qpsk, 0.5, MC, stream=Stream.MAIN_COND_X1)
        b = mi_conditional(qpsk, qpsk, 0.5, MC, stream=Stream.MAIN_COND_X2)
        assert a.bits != b.bits
        assert abs(a.bits - b.bits) <= 3 * math.hypot(a.std_error, b.std_error)


class TestDeterminism:
    def test_repeat_bit_identical(self, hqam16):
        p = params_from_snr(12.0)
        a = sum_rate(hqam16, rotate(hqam16, 0.3), p, MCConfig(300, 9))
        b = sum_rate(hqam16, rotate(hqam16, 0.3), p, MCConfig(300, 9))
        assert a == b

    @pytest.mark.skipif("cython" not in kernels.available_backends(), reason="compiled kernels not built")
    def test_threads_and_backends(self, hqam16):
        p = params_from_snr(12.0, 9.0)
        mc = MCConfig(200, 5)
        runs = [secrecy_rates(hqam16, hqam16, p, mc, threads=t, backend="cython") for t in (1, 4, 8)]
        assert runs[0] == runs[1] == runs[2]
        py = secrecy_rates(hqam16, hqam16, p, mc, backend="python")
        assert py.ssr_bits == pytest.approx(runs[0].ssr_bits, abs=1e-12)

    def test_chunking_does_not_change_result(self, hqam16, monkeypatch):
        from ccc_rates import mi

        p = params_from_snr(4.0)
        mc = MCConfig(64, 2)
        whole = mi.mi_marginal(hqam16, hqam16, p.sigma1_sq, mc)
        monkeypatch.setattr(mi, "_CHUNK_ELEMENTS", 64 * 5)
        split = mi.mi_marginal(hqam16, hqam16, p.sigma1_sq, mc)
        assert split.bits == pytest.approx(whole.bits, abs=1e-12)


def test_combine_quadrature_errors():
    a = MIEstimate(1.0, 0.3, 10)
    b = MIEstimate(0.5, 0.4, 20)
    c = combine((1, a), (-1, b))
    assert c.bits == 0.5 and c.std_error == pytest.approx(0.5) and c.n_samples == 10
    assert c.method is Method.MONTE_CARLO


def test_negative_std_error_rejected():
    with pytest.raises(ValueError):
        MIEstimate(1.0, -0.1, 1)


BASIC = {
    "bpsk": gen_psk(2),
    "qpsk": normalize(gen_square_qam(4)),
    "8psk": gen_psk(8),
    "3pt": normalize(Constellation("tri", [1, -0.5 + 0.8j, -0.5 - 0.8j])),
}


@settings(max_examples=15, deadline=None, derandomize=True)
@given(
    st.sampled_from(sorted(BASIC)),
    st.sampled_from(sorted(BASIC)),
    st.floats(-10, 25),
    st.floats(0, 2 * math.pi),
    st.integers(0, 2**32),
)
def test_bounds_property(n1, n2, snr, theta, seed):
    c1, c2 = BASIC[n1], rotate(BASIC[n2], theta)
    p = params_from_snr(snr)
    mc = MCConfig(400, seed)
    m1, m2 = c1.order, c2.order
    pair = rate_region_corner(c1, c2, p, mc)
    for est, cap in ((pair.r1, m1), (pair.r2, m2), (pair.sum, m1 * m2)):
        assert -3 * est.std_error <= est.bits <= math.log2(cap) + 3 * est.std_error + 1e-12
    assert pair.sum.bits <= math.log2(1 + 2 / p.sigma1_sq) + 3 * pair.sum.std_error + 1e-12
