import numpy as np
import pytest

from onebit.constants import PHI, SQRT2, SQRT3
from onebit.lowerbound import (
    DiscreteDistribution,
    brute_force_cost,
    kbit_comb_distribution,
    kbit_triplet_bound,
    kbit_triplet_bound_closed,
    maximize_bound,
    named_distribution,
    optimal_deterministic_cost,
    three_point_bound_closed,
)


def test_distribution_validation():
    with pytest.raises(ValueError):
        DiscreteDistribution((0.5,), (1.0,))
    with pytest.raises(ValueError):
        DiscreteDistribution((0.5, 0.2), (0.5, 0.5))
    with pytest.raises(ValueError):
        DiscreteDistribution((0.2, 0.5), (0.6, 0.5))
    with pytest.raises(ValueError):
        DiscreteDistribution((0.2, 1.5), (0.5, 0.5))


def test_from_file(tmp_path):
    path = tmp_path / "prior.q"
    path.write_text("# three points\n0 0.25\n1 0.25\n0.5 0.5  # middle\n")
    dist = DiscreteDistribution.from_file(path)
    assert dist.points == (0.0, 0.5, 1.0)
    assert dist.weights == (0.25, 0.5, 0.25)


def test_named_bounds():
    assert optimal_deterministic_cost(named_distribution("uniform3"), 1).bound == \
        pytest.approx(1 / 24, abs=1e-12)
    assert optimal_deterministic_cost(named_distribution("sqrt2-3"), 1).bound == \
        pytest.approx(0.75 - 1 / SQRT2, abs=1e-12)
    assert optimal_deterministic_cost(named_distribution("uniform4"), 1).bound == \
        pytest.approx((2 - SQRT3) / 6, abs=1e-12)
    assert optimal_deterministic_cost(named_distribution("golden4"), 1).bound == \
        pytest.approx((5 * PHI - 8) / 2, abs=1e-12)


def test_certificate_structure():
    cert = optimal_deterministic_cost(named_distribution("uniform3"), 1)
    assert len(cert.centroids) == 2
    assert len(cert.partition) == 3
    # partition is contiguous and each centroid is the weighted mean
    assert list(cert.partition) == sorted(cert.partition)
    dist = named_distribution("uniform3")
    for c in set(cert.partition):
        idx = [i for i, p in enumerate(cert.partition) if p == c]
        w = sum(dist.weights[i] for i in idx)
        mean = sum(dist.weights[i] * dist.points[i] for i in idx) / w
        assert cert.centroids[c] == pytest.approx(mean, abs=1e-12)


def test_centroid_perturbation_never_improves():
    dist = named_distribution("golden4")
    cert = optimal_deterministic_cost(dist, 1)

    def cost(centroids):
        pts = np.asarray(dist.points)
        wts = np.asarray(dist.weights)
        d = np.min((pts[:, None] - np.asarray(centroids)[None, :]) ** 2, axis=1)
        return float(np.dot(wts, d))

    base = cost(cert.centroids)
    assert base == pytest.approx(cert.bound, abs=1e-12)
    for i in range(len(cert.centroids)):
        for delta in (1e-4, -1e-4):
            tweaked = list(cert.centroids)
            tweaked[i] += delta
            assert cost(tweaked) >= base - 1e-12


def test_dp_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(3, 13))
        pts = np.sort(rng.random(n))
        while np.any(np.diff(pts) < 1e-6):
            pts = np.sort(rng.random(n))
        wts = rng.random(n) + 0.05
        wts = wts / wts.sum()
        wts[-1] += 1.0 - wts.sum()
        dist = DiscreteDistribution(tuple(pts), tuple(wts))
        for k in (1, 2):
            assert optimal_deterministic_cost(dist, k).bound == pytest.approx(
                brute_force_cost(dist, k), abs=1e-12)


def test_three_point_lemma_matches_dp():
    rng = np.random.default_rng(13)
    for _ in range(1000):
        q0 = float(rng.uniform(0.05, 0.4))
        qh = float(rng.uniform(0.05, 0.9 - 2 * q0))
        q1 = 1.0 - q0 - qh
        if q1 < q0:  # lemma assumes the mass at 0 is the lighter endpoint
            continue
        dist = DiscreteDistribution((0.0, 0.5, 1.0), (q0, qh, q1))
        assert optimal_deterministic_cost(dist, 1).bound == pytest.approx(
            three_point_bound_closed(q0, qh), abs=1e-12)
    assert three_point_bound_closed(1 / 3, 1 / 3) == pytest.approx(1 / 24, abs=1e-15)
    assert three_point_bound_closed((2 - SQRT2) / 2, SQRT2 - 1) == pytest.approx(
        0.75 - 1 / SQRT2, abs=1e-15)
    assert three_point_bound_closed(0.0, 0.5) == 0.0


def test_comb_reduces_to_three_points_at_k1():
    comb = kbit_comb_distribution(1)
    ref = named_distribution("sqrt2-3")
    assert comb.points == ref.points
    assert comb.weights == pytest.approx(ref.weights, abs=1e-15)
    assert kbit_triplet_bound(1) == pytest.approx(kbit_triplet_bound_closed(1), abs=1e-12)
    assert kbit_triplet_bound_closed(1) == pytest.approx((3 - 2 * SQRT2) / 4, abs=1e-15)


def test_comb_weights_normalize():
    for k in (1, 2, 3, 4):
        comb = kbit_comb_distribution(k)
        assert sum(comb.weights) == pytest.approx(1.0, abs=1e-12)
        assert len(comb.points) == 3 * 2 ** (k - 1)


def test_more_message_bits_never_hurt():
    dist = named_distribution("uniform4")
    b1 = optimal_deterministic_cost(dist, 1).bound
    b2 = optimal_deterministic_cost(dist, 2).bound
    assert b2 <= b1 + 1e-15
    assert b2 == 0.0  # four centroids cover four points exactly


def test_maximize_bound_monotone():
    assert maximize_bound(named_distribution("uniform3"), 1, iterations=30).bound >= \
        1 / 24 - 1e-12
    assert maximize_bound(named_distribution("golden4"), 1, iterations=30).bound >= \
        (5 * PHI - 8) / 2 - 1e-12
    assert maximize_bound(named_distribution("uniform4"), 1, iterations=60).bound >= \
        (2 - SQRT3) / 6 - 1e-12
