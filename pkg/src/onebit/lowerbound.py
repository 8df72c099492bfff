"""Minimax lower bounds via the best deterministic k-bit scheme for a prior.

For any distribution q over [0, 1], the cheapest deterministic k-bit
algorithm against q lower-bounds the worst-case cost of every randomized
k-bit algorithm.  For discrete q the optimum is a weighted squared-error
clustering of the support into at most 2^k contiguous groups, solved exactly
by dynamic programming.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .constants import PHI, SQRT2, SQRT3


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite prior: sorted support points in [0, 1] with positive weights."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        wts = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        if len(pts) < 2:
            raise ValueError("need at least 2 support points")
        if len(pts) != len(wts):
            raise ValueError("points and weights must have equal length")
        if any(not 0.0 <= p <= 1.0 for p in pts):
            raise ValueError("support points must lie in [0, 1]")
        if any(b <= a for a, b in zip(pts[:-1], pts[1:])):
            raise ValueError("support points must be strictly increasing")
        if any(w <= 0.0 for w in wts):
            raise ValueError("weights must be positive")
        if abs(sum(wts) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(wts)!r}")

    @classmethod
    def from_file(cls, path) -> "DiscreteDistribution":
        """Parse a plain-text prior: one `point weight` pair per line,
        `#` starts a comment."""
        pts, wts = [], []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                parts = body.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected `point weight`, got {body!r}")
                pts.append(float(parts[0]))
                wts.append(float(parts[1]))
        order = np.argsort(pts)
        return cls(tuple(np.asarray(pts)[order]), tuple(np.asarray(wts)[order]))


@dataclass(frozen=True)
class BoundCertificate:
    """A lower-bound value with the receiver outputs that attain it."""

    bound: float
    centroids: tuple
    partition: tuple  # cluster index of each support point, contiguous


def named_distribution(name: str) -> DiscreteDistribution:
    """Priors with published closed-form bounds."""
    if name == "uniform3":
        return DiscreteDistribution((0.0, 0.5, 1.0), (1 / 3, 1 / 3, 1 / 3))
    if name == "sqrt2-3":
        side = (2.0 - SQRT2) / 2.0
        return DiscreteDistribution((0.0, 0.5, 1.0), (side, SQRT2 - 1.0, side))
    if name == "uniform4":
        return DiscreteDistribution(
            (0.0, 1.0 - 1.0 / SQRT3, 1.0 / SQRT3, 1.0), (0.25, 0.25, 0.25, 0.25)
        )
    if name == "golden4":
        outer = (3.0 - PHI) / 5.0
        inner = (2.0 * PHI - 1.0) / 10.0
        return DiscreteDistribution(
            (0.0, (3.0 * PHI - 4.0) / 2.0, (6.0 - 3.0 * PHI) / 2.0, 1.0),
            (outer, inner, inner, outer),
        )
    raise ValueError(
        f"unknown distribution {name!r}; choose from uniform3, sqrt2-3, uniform4, golden4"
    )


NAMED_DISTRIBUTIONS = ("uniform3", "sqrt2-3", "uniform4", "golden4")


def _segment_costs(pts: np.ndarray, wts: np.ndarray):
    """seg[i, j] = weighted SSE of points i..j around their weighted mean."""
    w = np.concatenate(([0.0], np.cumsum(wts)))
    s = np.concatenate(([0.0], np.cumsum(wts * pts)))
    q = np.concatenate(([0.0], np.cumsum(wts * pts * pts)))
    i = np.arange(len(pts))[:, None]
    j = np.arange(len(pts))[None, :]
    dw = w[j + 1] - w[i]
    ds = s[j + 1] - s[i]
    dq = q[j + 1] - q[i]
    with np.errstate(divide="ignore", invalid="ignore"):
        seg = dq - np.where(dw > 0, ds * ds / np.where(dw > 0, dw, 1.0), 0.0)
    seg[j < i] = 0.0
    return np.maximum(seg, 0.0)


def _certificate_from_boundaries(pts, wts, boundaries, k: int) -> BoundCertificate:
    """Build the certificate for segments [b, next_b) given sorted boundaries."""
    n = len(pts)
    edges = list(boundaries) + [n]
    centroids = []
    partition = np.empty(n, dtype=int)
    bound = 0.0
    for c, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        seg_w = wts[a:b].sum()
        mean = float(np.dot(wts[a:b], pts[a:b]) / seg_w)
        centroids.append(mean)
        partition[a:b] = c
        bound += float(np.dot(wts[a:b], (pts[a:b] - mean) ** 2))
    while len(centroids) < (1 << k):
        centroids.append(centroids[-1])
    return BoundCertificate(bound, tuple(centroids), tuple(int(c) for c in partition))


def optimal_deterministic_cost(q: DiscreteDistribution, k: int = 1) -> BoundCertificate:
    """Exactly optimal deterministic k-bit scheme against the prior q.

    Optimal clusters under squared loss are contiguous in the sorted support,
    so dynamic programming over split positions finds the global optimum.
    """
    if k < 1:
        raise ValueError(f"message bits k must be >= 1, got {k}")
    pts = np.asarray(q.points)
    wts = np.asarray(q.weights)
    n = len(pts)
    K = min(1 << k, n)
    if K >= n:
        return _certificate_from_boundaries(pts, wts, list(range(n)), k)

    seg = _segment_costs(pts, wts)
    # dp[c][j]: best cost of covering points 0..j with c+1 clusters
    dp = np.full((K, n), np.inf)
    back = np.zeros((K, n), dtype=int)
    dp[0] = seg[0]
    for c in range(1, K):
        for j in range(c, n):
            prev = dp[c - 1, c - 1:j] + seg[c:j + 1, j]
            best = int(np.argmin(prev))
            dp[c, j] = prev[best]
            back[c, j] = best + c  # start index of the last cluster

    boundaries = []
    j = n - 1
    for c in range(K - 1, 0, -1):
        start = back[c, j]
        boundaries.append(int(start))
        j = start - 1
    boundaries.append(0)
    boundaries.reverse()
    return _certificate_from_boundaries(pts, wts, boundaries, k)


def brute_force_cost(q: DiscreteDistribution, k: int = 1) -> float:
    """Exhaustive check over all contiguous partitions (small supports only)."""
    pts = np.asarray(q.points)
    wts = np.asarray(q.weights)
    n = len(pts)
    K = min(1 << k, n)
    seg = _segment_costs(pts, wts)
    best = math.inf
    for splits in itertools.combinations(range(1, n), K - 1):
        edges = [0, *splits, n]
        cost = sum(seg[a, b - 1] for a, b in zip(edges[:-1], edges[1:]))
        best = min(best, cost)
    return best


def three_point_bound_closed(q0: float, qhalf: float) -> float:
    """Closed-form one-bit bound for mass q0 at 0 and qhalf at 1/2 (with the
    remaining, at-least-q0 mass at 1): q0*qhalf / (4*(q0 + qhalf))."""
    if q0 < 0 or qhalf < 0:
        raise ValueError("weights must be nonnegative")
    if q0 + qhalf == 0:
        return 0.0
    return q0 * qhalf / (4.0 * (q0 + qhalf))


def kbit_comb_distribution(k: int) -> DiscreteDistribution:
    """Equally spaced comb of 3*2^(k-1) points, each consecutive triplet
    weighted like the sqrt(2) three-point prior scaled to total mass 2^(1-k)."""
    if k < 1:
        raise ValueError(f"message bits k must be >= 1, got {k}")
    m = 3 * (1 << (k - 1))
    pts = np.arange(m) / (m - 1)
    outer = (2.0 - SQRT2) / (1 << k)
    center = (SQRT2 - 1.0) / (1 << (k - 1))
    wts = np.tile([outer, center, outer], 1 << (k - 1))
    return DiscreteDistribution(tuple(pts), tuple(wts))


def kbit_triplet_bound(k: int) -> float:
    """Lower bound for k-bit schemes from the comb prior (solved exactly);
    equals (3 - 2*sqrt(2)) / (3*2^(k-1) - 1)^2."""
    return optimal_deterministic_cost(kbit_comb_distribution(k), k).bound


def kbit_triplet_bound_closed(k: int) -> float:
    return (3.0 - 2.0 * SQRT2) / (3.0 * 2.0 ** (k - 1) - 1.0) ** 2


def maximize_bound(initial: DiscreteDistribution, k: int = 1, iterations: int = 200,
                   rng: np.random.Generator | None = None) -> BoundCertificate:
    """Best-effort coordinate ascent on the prior to push the bound up.

    Perturbs one support point or one weight at a time (renormalizing the
    weights), keeping only improvements; the result is never worse than the
    initial prior's bound.  No global-optimality guarantee.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    pts = np.asarray(initial.points, dtype=float)
    wts = np.asarray(initial.weights, dtype=float)
    n = len(pts)

    def evaluate(p, w):
        order = np.argsort(p)
        p, w = p[order], w[order]
        if np.any(np.diff(p) <= 1e-9):
            return None
        w = np.maximum(w, 1e-9)
        w = w / w.sum()
        try:
            dist = DiscreteDistribution(tuple(p), tuple(w))
        except ValueError:
            return None
        return optimal_deterministic_cost(dist, k)

    best_cert = optimal_deterministic_cost(initial, k)
    step = 0.05
    for _ in range(iterations):
        improved = False
        for idx in range(2 * n):
            for sign in (1.0, -1.0):
                p, w = pts.copy(), wts.copy()
                delta = sign * step * (1.0 + rng.random())
                if idx < n:
                    p[idx] = np.clip(p[idx] + delta, 0.0, 1.0)
                else:
                    w[idx - n] = w[idx - n] * (1.0 + delta)
                cert = evaluate(p, w)
                if cert is not None and cert.bound > best_cert.bound + 1e-15:
                    best_cert = cert
                    pts = np.array(sorted(p))
                    w = np.maximum(w, 1e-9)
                    wts = (w / w.sum())[np.argsort(p)]
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-7:
                break
    return best_cert
