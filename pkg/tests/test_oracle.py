import math

import numpy as np
import pytest

from ccc_rates.channel import ChannelParams, params_from_snr
from ccc_rates.constellation import gen_psk, gen_square_qam, gen_star_qam, normalize, rotate, single_point, RingSpec
from ccc_rates.errors import ContractError, InvalidInputError, PreconditionError, TooLargeError
from ccc_rates.mi import Method
from ccc_rates.oracle import (
    QuadratureConfig,
    gaussian_capacity_bound,
    mixture_entropy,
    quad_mi_terms,
    quad_rate_region_corner,
    quad_secrecy_rates,
    quad_sum_rate,
    sumset_entropy,
)

Q128 = QuadratureConfig(nodes_per_dim=128)


@pytest.fixture(scope="module")
def psk8():
    return normalize(gen_star_qam(8, RingSpec((1.0,), (8,))))


@pytest.mark.parametrize("s2", [0.01, 1.0, 30.0])
def test_single_gaussian_entropy(s2):
    assert mixture_entropy([0.3 + 0.1j], s2) == pytest.approx(math.log2(math.pi * math.e * s2), abs=1e-10)


def test_far_apart_mixture_adds_one_bit():
    # two well-separated equiprobable components: h = h(Gaussian) + 1 bit
    s2 = 1e-3
    assert mixture_entropy([-1.0, 1.0], s2) == pytest.approx(math.log2(math.pi * math.e * s2) + 1.0, abs=1e-9)


def test_coincident_centers_merge():
    a = mixture_entropy([0.0, 0.0, 1.0, 1.0], 0.3)
    b = mixture_entropy([0.0, 1.0], 0.3)
    assert a == pytest.approx(b, abs=1e-12)


@pytest.mark.parametrize("snr", [-10.0, 0.0, 10.0, 20.0])
def test_chain_rule(qpsk, bpsk, psk8, snr):
    for c1, c2 in ((qpsk, qpsk), (bpsk, psk8), (qpsk, rotate(qpsk, 0.5))):
        t = quad_mi_terms(c1, c2, params_from_snr(snr))
        assert abs(t.sum_rate - t.sum_rate_alt) < 1e-8


@pytest.mark.parametrize("snr", [-10.0, 0.0, 10.0, 20.0])
def test_node_doubling(qpsk, bpsk, psk8, snr):
    p = params_from_snr(snr, snr - 3.0)
    for c1, c2 in ((qpsk, qpsk), (bpsk, psk8)):
        a = quad_mi_terms(c1, c2, p)
        b = quad_mi_terms(c1, c2, p, Q128)
        for name in ("i_x2_y", "i_x1_y_given_x2", "i_x2_y_given_x1", "i_x1_ye", "i_x2_ye"):
            assert abs(getattr(a, name) - getattr(b, name)) < 1e-7, name


def test_gauss_hermite_rule_agrees(qpsk):
    p = params_from_snr(10.0)
    gh = quad_sum_rate(qpsk, qpsk, p, QuadratureConfig(rule="gauss-hermite")).bits
    tr = quad_sum_rate(qpsk, qpsk, p).bits
    assert gh == pytest.approx(tr, abs=1e-5)


def test_high_snr_matches_sumset(bpsk, qpsk):
    p = params_from_snr(60.0)
    for c1, c2 in ((bpsk, bpsk), (bpsk, rotate(bpsk, math.pi / 2)), (qpsk, qpsk)):
        assert abs(quad_sum_rate(c1, c2, p).bits - sumset_entropy(c1, c2)) < 1e-3


def test_sumset_values(bpsk, qpsk):
    assert sumset_entropy(bpsk, bpsk) == pytest.approx(1.5, abs=1e-15)
    assert sumset_entropy(bpsk, rotate(bpsk, math.pi / 2)) == pytest.approx(2.0, abs=1e-15)
    # QPSK + QPSK: 9 sums with multiplicities 1,2,1,2,4,2,1,2,1 over 16
    probs = np.array([1, 2, 1, 2, 4, 2, 1, 2, 1]) / 16
    assert sumset_entropy(qpsk, qpsk) == pytest.approx(float(-(probs * np.log2(probs)).sum()), abs=1e-12)


def test_single_user_noiseless_bpsk(bpsk):
    t = quad_mi_terms(bpsk, bpsk, params_from_snr(40.0))
    assert t.i_x1_y_given_x2 == pytest.approx(1.0, abs=1e-6)


def test_qam16_with_single_point_60db():
    q16 = normalize(gen_square_qam(16))
    assert quad_sum_rate(q16, single_point(), params_from_snr(60.0)).bits == pytest.approx(4.0, abs=1e-3)


def test_gaussian_bound(qpsk, bpsk, psk8):
    for snr in (-10.0, 0.0, 5.0, 15.0, 30.0):
        p = params_from_snr(snr)
        for c1, c2 in ((qpsk, qpsk), (bpsk, psk8), (bpsk, bpsk)):
            assert quad_sum_rate(c1, c2, p).bits <= gaussian_capacity_bound(p) + 1e-9


def test_bound_formula():
    assert gaussian_capacity_bound(ChannelParams(1.0, 2.0, 2.0)) == pytest.approx(1.0)


def test_monotone_in_snr(qpsk):
    vals = [quad_sum_rate(qpsk, qpsk, params_from_snr(s)).bits for s in range(-10, 31, 5)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_joint_rotation_exact(qpsk):
    p = params_from_snr(7.0)
    base = quad_sum_rate(qpsk, qpsk, p).bits
    for phi in (0.3, 1.0, 2.2):
        assert abs(quad_sum_rate(rotate(qpsk, phi), rotate(qpsk, phi), p).bits - base) < 1e-12


def test_eve_monotone(qpsk):
    snr = 10.0
    vals = [
        quad_secrecy_rates(qpsk, qpsk, params_from_snr(snr, snr - d)).ssr_bits for d in np.linspace(0, 30, 6)
    ]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_secrecy_structure(qpsk):
    p = params_from_snr(10.0, 7.0)
    sec = quad_secrecy_rates(qpsk, qpsk, p)
    c = sec.components
    assert c.i_x2_y.method is Method.QUADRATURE and c.i_x2_y.std_error == 0.0
    assert sec.ssr_bits == pytest.approx(max(0.0, c.ssr_raw.bits))
    with pytest.raises(PreconditionError):
        quad_secrecy_rates(qpsk, qpsk, params_from_snr(10.0, 11.0))


def test_corner_symmetric(qpsk):
    pair = quad_rate_region_corner(qpsk, qpsk, params_from_snr(4.0))
    assert pair.r1.bits == pytest.approx(pair.r2.bits, abs=1e-12)


def test_zero_power(qpsk):
    t = quad_mi_terms(qpsk, qpsk, ChannelParams(0.0, 1.0, 1.0))
    assert t.sum_rate == 0.0 and t.ssr_raw == 0.0


def test_size_limit():
    q16 = normalize(gen_square_qam(16))
    q64 = normalize(gen_square_qam(64))
    with pytest.raises(TooLargeError):
        quad_sum_rate(q16, q64, params_from_snr(0.0))


def test_needs_normalized(qpsk):
    with pytest.raises(ContractError):
        quad_sum_rate(gen_square_qam(4), qpsk, params_from_snr(0.0))


@pytest.mark.parametrize(
    "kwargs", [dict(nodes_per_dim=4), dict(joint_size_limit=0), dict(rule="simpson"), dict(half_width=0.0)]
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidInputError):
        QuadratureConfig(**kwargs)


@pytest.mark.parametrize("snr", [0.0, 12.0])
def test_joint_rotation_exact_asymmetric(bpsk, snr):
    from ccc_rates.constellation import gen_hex_qam

    h9 = normalize(gen_hex_qam(9))
    p = params_from_snr(snr, snr - 3.0)
    base = quad_mi_terms(h9, rotate(bpsk, 0.4), p)
    for phi in (0.3, 1.0, 2.2):
        turned = quad_mi_terms(rotate(h9, phi), rotate(bpsk, 0.4 + phi), p)
        for name in ("i_x2_y", "i_x1_y_given_x2", "i_x2_y_given_x1", "i_x1_ye", "i_x2_ye"):
            assert abs(getattr(turned, name) - getattr(base, name)) < 1e-12


from hypothesis import given, settings, strategies as st  # noqa: E402

coord = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(coord, coord), min_size=1, max_size=9),
    st.floats(0, 2 * math.pi),
    st.sampled_from([0.01, 0.3, 3.0]),
    st.sampled_from([0, 3, 5, 8]),
)
def test_mixture_entropy_rotation_invariant(raw, phi, s2, fold):
    pts = np.array([complex(a, b) for a, b in raw])
    if fold:
        # impose n-fold symmetry to exercise the symmetric branches
        pts = (pts[:, None] * np.exp(2j * np.pi * np.arange(fold) / fold)).ravel()
    q = QuadratureConfig(nodes_per_dim=16)
    a = mixture_entropy(pts, s2, q)
    b = mixture_entropy(pts * np.exp(1j * phi), s2, q)
    assert abs(a - b) < 1e-10
