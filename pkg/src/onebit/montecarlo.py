"""End-to-end protocol simulation and the distributed mean-estimation demo.

Every report is deterministic given its seed: randomness comes from numpy's
PCG64 via SeedSequence, and sharded work derives per-shard streams from
(master seed, shard index).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import exact, kernels
from .protocols import Protocol
from .randomness import make_rng, spawn_rng


@dataclass(frozen=True)
class SimReport:
    protocol_id: str
    x: float
    trials: int
    mse: float
    bias: float
    stderr: float  # standard error of the mse estimate

    def to_json(self) -> str:
        return json.dumps(asdict(self))


@dataclass(frozen=True)
class MeanEstimationReport:
    n_senders: int
    true_mean: float
    estimated_mean: float
    squared_error: float
    predicted_variance: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _simulate_batch(P: Protocol, x: float, trials: int, rng: np.random.Generator):
    """Decoded estimates for `trials` fresh (shared, private) draws."""
    if trials == 0:
        return np.empty(0)
    if P.shared_kind in ("bits", "none"):
        nbits = P.shared_bits
        h = rng.integers(0, 1 << nbits, size=trials) if nbits else np.zeros(trials, np.int64)
        r = rng.random(trials)
        table_h = np.arange(1 << nbits)
        q1 = np.array(np.broadcast_to(P.q_hi(x, table_h), table_h.shape), dtype=float)
        vlo, vhi = P.values(x, table_h)
        vlo = np.array(np.broadcast_to(vlo, table_h.shape), dtype=float)
        vhi = np.array(np.broadcast_to(vhi, table_h.shape), dtype=float)
        return kernels.decode_table(h, r, q1, vlo, vhi)
    if P.shared_kind == "continuous":
        u = rng.random(trials)
        t, a, b, c, lo, hi = P.affine_sim_params(x)
        return kernels.threshold_affine(u, t, a, b, c, lo, hi)
    if P.shared_kind == "composite":
        u = rng.random(trials)
        pick_a = u < P.p
        n_a = int(pick_a.sum())
        out = np.empty(trials)
        out[pick_a] = _simulate_batch(P.a, x, n_a, rng)
        out[~pick_a] = _simulate_batch(P.b, x, trials - n_a, rng)
        return out
    raise ValueError(f"cannot simulate shared kind {P.shared_kind!r}")


def simulate(P: Protocol, x: float, trials: int, seed: int) -> SimReport:
    """Monte Carlo estimate of mse and bias at input x."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = make_rng(seed)
    est = _simulate_batch(P, float(x), trials, rng)
    err = est - float(x)
    sq = err * err
    mse = float(sq.mean())
    bias = float(err.mean())
    stderr = float(sq.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SimReport(P.pid, float(x), trials, mse, bias, stderr)


def _estimate_elementwise(P: Protocol, xs: np.ndarray, rng: np.random.Generator):
    """One decoded estimate per sender, each with its own shared draw."""
    n = xs.shape[0]
    if P.shared_kind in ("bits", "none"):
        nbits = P.shared_bits
        h = rng.integers(0, 1 << nbits, size=n) if nbits else np.zeros(n, np.int64)
        shared = h
    elif P.shared_kind == "continuous":
        shared = rng.random(n)
    else:
        raise ValueError("mean estimation supports bit-budget and continuous protocols")
    q = np.asarray(P.q_hi(xs, shared), dtype=float)
    vlo, vhi = P.values(xs, shared)
    if P.uses_private:
        r = rng.random(n)
        hi = r < q
    else:
        hi = q >= 0.5
    return np.where(hi, vhi, vlo)


def mean_estimation(xs, P: Protocol, seed: int) -> MeanEstimationReport:
    """Each sender transmits its value once; the receiver averages the decodes.

    Requires an unbiased protocol: the average of unbiased per-sender
    estimates is an unbiased estimate of the mean, with variance equal to
    the summed per-sender variances divided by n^2.
    """
    if not P.unbiased:
        raise ValueError(f"mean estimation requires an unbiased protocol, got {P.pid!r}")
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[0]
    rng = make_rng(seed)
    est = _estimate_elementwise(P, xs, rng)
    true_mean = float(xs.mean())
    est_mean = float(est.mean())
    # for an unbiased protocol the per-sender variance equals its mse
    per_sender = P.closed_mse(xs)
    if per_sender is None:
        per_sender = np.array([exact.variance_at(P, float(x)) for x in xs])
    return MeanEstimationReport(
        n_senders=n,
        true_mean=true_mean,
        estimated_mean=est_mean,
        squared_error=(est_mean - true_mean) ** 2,
        predicted_variance=float(per_sender.sum()) / (n * n),
    )


def sharded_simulate(P: Protocol, x: float, trials: int, seed: int, shards: int) -> SimReport:
    """Order-independent sharded simulation: shard i uses stream (seed, i)."""
    if shards < 1:
        raise ValueError(f"shards must be >= 1, got {shards}")
    per = [trials // shards + (1 if i < trials % shards else 0) for i in range(shards)]
    chunks = [
        _simulate_batch(P, float(x), per[i], spawn_rng(seed, i))
        for i in range(shards)
        if per[i] > 0
    ]
    est = np.concatenate(chunks)
    err = est - float(x)
    sq = err * err
    stderr = float(sq.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SimReport(P.pid, float(x), trials, float(sq.mean()), float(err.mean()), stderr)
