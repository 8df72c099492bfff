import math

import numpy as np
import pytest

from onebit import exact, make_protocol
from onebit.constants import PHI, SQRT2, SQRT3
from onebit.protocols import (
    BiasedShared,
    ConvexDitheredBiased,
    DeterministicRounding,
    KbitUnbiased,
    LimitBiased,
    RandomizedRounding,
    SharedUnbiased,
    SubtractiveDithering,
    ThreePointBiased,
    ThreePointUnbiased,
    TruncatedDithering,
    biased_alpha_opt,
    hybrid_4bit,
    hybrid_8bit,
    hybrid_unbounded,
)
from onebit.randomness import PrivateDraw, SharedDraw


def test_randomized_rounding_definition():
    P = RandomizedRounding()
    assert float(P.q_hi(0.0, np.array(0))) == 0.0
    assert P.encode(0.0, SharedDraw.from_bits(0, 0), PrivateDraw(0.7)) == 0
    assert exact.variance_at(P, 0.5) == pytest.approx(0.25, abs=1e-15)
    assert exact.mse_at(P, 0.3) == pytest.approx(0.21, abs=1e-15)


def test_deterministic_rounding_definition():
    P = DeterministicRounding()
    s = SharedDraw.from_bits(0, 0)
    assert P.encode(0.3, s) == 0
    assert P.decode(0, s) == 0.25
    assert exact.mse_at(P, 0.3) == pytest.approx(0.0025, abs=1e-15)
    assert exact.mse_at(P, 0.5) == pytest.approx(1 / 16, abs=1e-15)
    assert exact.mse_at(P, 0.25) == 0.0


def test_shared_unbiased_definition():
    P = SharedUnbiased(1)
    s = SharedDraw.from_bits(1, 0)
    # x=1/2, h=0, r=0.3: (r+h)/2 = 0.15 <= 0.5, so send 1; decode 1 - 1/4
    assert P.encode(0.5, s, PrivateDraw(0.3)) == 1
    assert P.decode(1, s) == pytest.approx(0.75, abs=1e-15)
    assert exact.worst_case(P)[0] == pytest.approx(1 / 8, abs=1e-12)
    P8 = SharedUnbiased(8)
    assert exact.worst_case(P8)[0] == pytest.approx(1 / 12 + 1 / 393216, abs=1e-12)


def test_shared_unbiased_send_probability():
    P = SharedUnbiased(3)
    h = np.arange(8)
    q = P.q_hi(0.3, h)
    assert np.allclose(q, np.clip(0.3 * 8 - h, 0, 1), atol=0)


def test_subtractive_dithering_definition():
    P = SubtractiveDithering()
    for h in (0.1, 0.6, 0.93):
        s = SharedDraw.continuous(h)
        assert P.encode(1.0, s) == 1
        assert P.decode(1, s) == pytest.approx(h + 0.5, abs=1e-15)
    assert exact.variance_at(P, 0.234) == pytest.approx(1 / 12, abs=1e-14)


def test_subtractive_dithering_uniform_law():
    # estimate distribution as a function of h is uniform on [x-1/2, x+1/2]
    P = SubtractiveDithering()
    x = 0.3
    u = (np.arange(2_000_001) + 0.5) / 2_000_001
    est = np.where(x >= u, u + 0.5, u - 0.5)
    for t in np.linspace(x - 0.5, x + 0.5, 21):
        empirical = np.mean(est <= t)
        assert empirical == pytest.approx(t - (x - 0.5), abs=1e-6)


def test_three_point_unbiased_definition():
    P = ThreePointUnbiased()
    assert P.encode(0.5, SharedDraw.from_bits(1, 1)) == 0
    assert P.decode(0, SharedDraw.from_bits(1, 1)) == pytest.approx(0.25, abs=1e-15)
    for x in (0.0, 0.5, 1.0):
        assert exact.variance_at(P, x) == pytest.approx(1 / 16, abs=1e-14)
        assert exact.bias_at(P, x) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        exact.mse_at(P, 0.3)


def test_truncated_dithering():
    assert exact.mse_at(TruncatedDithering(0.0), 0.5) == pytest.approx(1 / 12, abs=1e-14)
    z = TruncatedDithering.optimal_z()
    assert 0.1734 < z < 0.1736
    # full truncation: constant estimate 1/2
    assert exact.mse_at(TruncatedDithering(0.5), 0.0) == pytest.approx(0.25, abs=1e-12)
    # symmetric bias vanishes at the midpoint
    assert exact.bias_at(TruncatedDithering(z), 0.5) == pytest.approx(0.0, abs=1e-14)


def test_convex_dithered_biased():
    P = ConvexDitheredBiased(2.0 - PHI)
    for x in (0.0, 0.37, 0.85, 1.0):
        assert exact.mse_at(P, x) == pytest.approx(5 / 3 - PHI, abs=1e-14)
    assert exact.mse_at(ConvexDitheredBiased(1.0), 0.0) == pytest.approx(1 / 3, abs=1e-14)
    rr_law = lambda x: x * (1 - x)
    P0 = ConvexDitheredBiased(0.0)
    for x in np.linspace(0, 1, 17):
        assert exact.mse_at(P0, float(x)) == pytest.approx(rr_law(x), abs=1e-14)


def test_biased_shared_parameters():
    assert biased_alpha_opt(1) == pytest.approx(1 / 3, abs=1e-14)
    assert biased_alpha_opt(2) == pytest.approx((15 - 6 * SQRT3) / 13, abs=1e-14)
    assert biased_alpha_opt(3) == pytest.approx(7 / 19, abs=1e-14)
    assert exact.worst_case(BiasedShared(1))[0] == pytest.approx(1 / 18, abs=1e-12)
    assert exact.worst_case(BiasedShared(2))[0] == pytest.approx(
        (259 - 140 * SQRT3) / 338, abs=1e-12)
    assert exact.worst_case(BiasedShared(3))[0] == pytest.approx(35 / 722, abs=1e-12)


def test_biased_shared_deterministic_encoding():
    P = BiasedShared(2)
    a = P.alpha
    for h in range(4):
        s = SharedDraw.from_bits(2, h)
        assert P.encode((1 - a) / 2 - 1e-6, s) == 0
        assert P.encode((1 + a) / 2, s) == 1  # right edge sends 1
    # on band i the sender says 1 iff h <= i
    x = (1 - a) / 2 + 1.5 * a / 3  # band 1
    for h in range(4):
        assert P.encode(x, SharedDraw.from_bits(2, h)) == (1 if h <= 1 else 0)


def test_three_point_biased():
    P = ThreePointBiased()
    a = P.alpha
    assert a == pytest.approx(1 - 1 / SQRT2, abs=1e-15)
    for x in (0.0, 0.5, 1.0):
        assert exact.mse_at(P, x) == pytest.approx(0.75 - 1 / SQRT2, abs=1e-14)
    # greedy rule away from the three special points
    want = 0.5 * ((0.45 - (1 - a)) ** 2 + (0.45 - a) ** 2)
    assert exact.mse_at(P, 0.45) == pytest.approx(want, abs=1e-14)
    # sender reduces to 0 / 1-h / 1 on the three points
    for h in range(2):
        s = SharedDraw.from_bits(1, h)
        assert P.encode(0.0, s) == 0
        assert P.encode(1.0, s) == 1
        assert P.encode(0.5, s) == 1 - h


def test_limit_biased_branches():
    P = LimitBiased()
    assert exact.mse_at(P, 0.0) == pytest.approx(5 / 3 - PHI, abs=1e-14)
    assert exact.mse_at(P, 0.1) == pytest.approx(
        0.01 + (PHI - 2) * 0.1 + (5 / 3 - PHI), abs=1e-14)
    mid = (2 * PHI - 3) / (PHI - 2) * 0.45 ** 2 + (PHI - 1) * 0.45 + (23 - 15 * PHI) / 12
    assert exact.mse_at(P, 0.45) == pytest.approx(mid, abs=1e-14)


def test_hybrid_published_costs():
    assert exact.worst_case(hybrid_unbounded())[0] == pytest.approx(
        (6 * math.sqrt(10) + 11 * math.sqrt(5) - 18 * SQRT2 - 17) / 24, abs=1e-9)
    assert exact.worst_case(hybrid_4bit())[0] == pytest.approx(
        (1049 - 169 * SQRT2 - 430 * SQRT3) / 1352, abs=1e-9)
    assert exact.worst_case(hybrid_8bit())[0] == pytest.approx(
        (1830635 - 1232945 * SQRT2) / 1858592, abs=1e-9)


def test_hybrid_is_exact_mixture():
    for H in (hybrid_4bit(), hybrid_8bit(), hybrid_unbounded()):
        p, A, B = H.mixture
        for x in np.linspace(0, 1, 101):
            mix = p * exact.mse_at(A, float(x)) + (1 - p) * exact.mse_at(B, float(x))
            assert exact.mse_at(H, float(x)) == pytest.approx(mix, abs=1e-12)


def test_kbit_reduces_to_one_bit():
    for l in (1, 3):
        su = SharedUnbiased(l)
        kb = KbitUnbiased(1, l)
        for x in np.linspace(0, 1, 33):
            for h in range(1 << l):
                s = SharedDraw.from_bits(l, h)
                for rr in np.linspace(0, 0.999, 11):
                    r = PrivateDraw(float(rr))
                    m = su.encode(float(x), s, r)
                    assert kb.encode(float(x), s, r) == m
                    assert kb.decode(m, s) == su.decode(m, s)


def test_kbit_variances():
    assert exact.variance_at(KbitUnbiased(2, None), 0.3) == pytest.approx(1 / 108, abs=1e-10)
    assert exact.worst_case(KbitUnbiased(2, 1))[0] == pytest.approx(1 / 72, abs=1e-12)


def test_unbiasedness_grid():
    grid = np.linspace(0, 1, 257)
    for P in (RandomizedRounding(), SharedUnbiased(2), SharedUnbiased(5),
              SubtractiveDithering(), KbitUnbiased(2, 2), KbitUnbiased(3, None)):
        for x in grid:
            assert abs(exact.bias_at(P, float(x))) < 1e-12
    for x in (0.0, 0.5, 1.0):
        assert abs(exact.bias_at(ThreePointUnbiased(), x)) < 1e-12


def test_decoder_table_deterministic():
    # decode value is a pure function of (message, h)
    for P in (SharedUnbiased(3), BiasedShared(2), ThreePointBiased(), hybrid_4bit()):
        h = np.arange(1 << P.shared_bits)
        t0a, t0b = P.decode_message(0, h), P.decode_message(0, h)
        t1a, t1b = P.decode_message(1, h), P.decode_message(1, h)
        assert np.array_equal(t0a, t0b) and np.array_equal(t1a, t1b)
        assert len(np.asarray(t0a)) == 1 << P.shared_bits


def test_make_protocol_registry():
    assert make_protocol("biased-shared", l=3).params == {"l": 3}
    with pytest.raises(ValueError):
        make_protocol("nope")
    with pytest.raises(ValueError):
        make_protocol("rr", l=3)
    with pytest.raises(ValueError):
        make_protocol("shared-unbiased", l=0)
    with pytest.raises(ValueError):
        make_protocol("hybrid", variant="l5")
