"""Exact bias/variance/expected-squared-error evaluation and worst-case search.

For bit-budget protocols the expectation is an exact finite sum over the
2^l shared values; for continuous-shared protocols it is a piecewise
Gauss-Legendre integral over u, exact because every integrand is piecewise
polynomial of low degree between the protocol's breakpoints.  Composite
hybrids are evaluated as exact mixtures of their sub-protocols.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import protocols
from .protocols import Protocol

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)

_THREE_POINTS = np.array([0.0, 0.5, 1.0])


def _moments_bits(P: Protocol, x: float):
    h = np.arange(1 << P.shared_bits)
    q = np.asarray(P.q_hi(x, h), dtype=float)
    vlo, vhi = P.values(x, h)
    vlo = np.broadcast_to(np.asarray(vlo, dtype=float), h.shape)
    vhi = np.broadcast_to(np.asarray(vhi, dtype=float), h.shape)
    m1 = np.mean(q * vhi + (1.0 - q) * vlo)
    m2 = np.mean(q * vhi * vhi + (1.0 - q) * vlo * vlo)
    return m1, m2


def _moments_continuous(P: Protocol, x: float):
    cuts = {0.0, 1.0}
    for t in P.h_breakpoints(x):
        t = float(t)
        if 0.0 < t < 1.0:
            cuts.add(t)
    edges = sorted(cuts)
    m1 = 0.0
    m2 = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        u = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
        w = 0.5 * (b - a) * _GL_WEIGHTS
        q = np.asarray(P.q_hi(x, u), dtype=float)
        vlo, vhi = P.values(x, u)
        m1 += float(np.sum(w * (q * vhi + (1.0 - q) * vlo)))
        m2 += float(np.sum(w * (q * vhi * vhi + (1.0 - q) * vlo * vlo)))
    return m1, m2


def moments_at(P: Protocol, x: float):
    """First and second moments of the decoded estimate at input x."""
    mixture = getattr(P, "mixture", None)
    if mixture is not None and P.shared_kind == "composite":
        p, a, b = mixture
        m1a, m2a = moments_at(a, x)
        m1b, m2b = moments_at(b, x)
        return p * m1a + (1.0 - p) * m1b, p * m2a + (1.0 - p) * m2b
    if P.shared_kind in ("bits", "none"):
        return _moments_bits(P, x)
    if P.shared_kind == "continuous":
        return _moments_continuous(P, x)
    raise ValueError(f"cannot evaluate shared kind {P.shared_kind!r}")


def mse_at(P: Protocol, x: float) -> float:
    """Exact expected squared error of the protocol at input x."""
    m1, m2 = moments_at(P, x)
    return m2 - 2.0 * x * m1 + x * x


def bias_at(P: Protocol, x: float) -> float:
    m1, _ = moments_at(P, x)
    return m1 - x


def variance_at(P: Protocol, x: float) -> float:
    m1, m2 = moments_at(P, x)
    return m2 - m1 * m1


def variance_closed_unbiased(x, l: int):
    """Closed-form variance of the l-bit shared-randomness unbiased protocol.

    Equals (1 - 4^-l)/12 + 2^-l * (x mod 2^-l) - (x mod 2^-l)^2; its maximum
    over x is (1/2 + 4^-l)/6.
    """
    return protocols.quantizer_variance(x, l)


def _mse_grid(P: Protocol, xs: np.ndarray) -> np.ndarray:
    """Expected squared error on an array of inputs, vectorized."""
    closed = P.closed_mse(xs)
    if closed is not None:
        return np.asarray(closed, dtype=float)
    if P.shared_kind in ("bits", "none"):
        h = np.arange(1 << P.shared_bits)
        out = np.empty(xs.shape[0])
        chunk = max(1, 4_000_000 // max(1, h.shape[0]))
        for start in range(0, xs.shape[0], chunk):
            xc = xs[start:start + chunk, None]
            q = np.asarray(P.q_hi(xc, h[None, :]), dtype=float)
            vlo, vhi = P.values(xc, h[None, :])
            err = q * (vhi - xc) ** 2 + (1.0 - q) * (vlo - xc) ** 2
            out[start:start + chunk] = np.mean(err, axis=1)
        return out
    return np.array([mse_at(P, float(x)) for x in xs])


def worst_case(P: Protocol, grid_points: int | None = None, argmax_tol: float = 1e-9):
    """Worst-case expected squared error and the set of inputs attaining it.

    Maximizes over the protocol's analytic candidates plus a dense uniform
    grid, with local refinement around the grid maxima; protocols restricted
    to {0, 1/2, 1} are maximized over those points only.
    """
    if P.domain == "three":
        vals = np.array([mse_at(P, x) for x in _THREE_POINTS])
        cost = float(np.max(vals))
        argmax = _THREE_POINTS[vals >= cost - argmax_tol]
        return cost, sorted(float(v) for v in argmax)

    if grid_points is None:
        grid_points = max(4097, min(1 << (P.shared_bits + 12), 65537))
    grid = np.linspace(0.0, 1.0, grid_points)
    grid_vals = _mse_grid(P, grid)

    finalists = set(float(c) for c in P.worst_candidates() if 0.0 <= c <= 1.0)
    top = np.argsort(grid_vals)[-8:]
    cell = 1.0 / (grid_points - 1)
    for idx in top:
        x0 = grid[idx]
        finalists.add(float(x0))
        lo = max(0.0, x0 - cell)
        hi = min(1.0, x0 + cell)
        res = minimize_scalar(lambda t: -mse_at(P, t), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        finalists.add(float(res.x))

    pts = sorted(finalists)
    vals = np.array([mse_at(P, x) for x in pts])
    cost = float(np.max(vals))
    argmax = [p for p, v in zip(pts, vals) if v >= cost - argmax_tol]
    return cost, argmax


@dataclass
class CostProfile:
    """Exact per-x cost records over an evaluation grid."""

    protocol_id: str
    params: dict
    x: np.ndarray
    mse: np.ndarray
    bias: np.ndarray
    variance: np.ndarray
    worst_cost: float
    worst_argmax: list = field(default_factory=list)

    def write_csv(self, target) -> None:
        """Write `x,mse,bias,variance` rows at 17 significant digits."""
        own = isinstance(target, (str, bytes))
        fh = open(target, "w", newline="") if own else target
        try:
            writer = csv.writer(fh)
            writer.writerow(["x", "mse", "bias", "variance"])
            for row in zip(self.x, self.mse, self.bias, self.variance):
                writer.writerow([f"{v:.17g}" for v in row])
        finally:
            if own:
                fh.close()

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def profile(P: Protocol, xs) -> CostProfile:
    """Evaluate mse/bias/variance on a grid and attach the worst-case summary."""
    xs = np.asarray(xs, dtype=float)
    m1 = np.empty_like(xs)
    m2 = np.empty_like(xs)
    for i, x in enumerate(xs):
        m1[i], m2[i] = moments_at(P, float(x))
    mse = m2 - 2.0 * xs * m1 + xs * xs
    bias = m1 - xs
    var = m2 - m1 * m1
    cost, argmax = worst_case(P)
    return CostProfile(P.pid, dict(P.params), xs, mse, bias, var, cost, argmax)


def grid_for(P: Protocol, n: int) -> np.ndarray:
    """Default evaluation grid: uniform for full-interval protocols,
    the three special points otherwise."""
    if P.domain == "three":
        return _THREE_POINTS.copy()
    return np.linspace(0.0, 1.0, n)
