"""One-bit and k-bit encoders/decoders for reals in [0, 1].

Every protocol pairs a sender (``encode``) with a receiver (``decode``) and
additionally exposes enough structure — exact send probabilities, decoder
tables, integration breakpoints, analytic worst-case candidates — that exact
evaluation and Monte Carlo simulation need no protocol-specific logic.

Protocols fall into three shared-randomness kinds:

* ``bits``   — both parties see an ``l``-bit integer ``h``;
* ``continuous`` — both parties see a uniform ``u`` in [0, 1);
* ``none``   — sender-private randomness only (treated as 0 shared bits).

Hybrid protocols multiplex two sub-protocols through a selector drawn from
the shared randomness.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .constants import PHI
from .randomness import PrivateDraw, SharedDraw


class Protocol:
    """Base sender/receiver pair.

    Subclasses set the class attributes below and implement ``q_hi`` (the
    probability, over private randomness, of sending the high message given
    shared value ``h``) and ``decode_message``.  Both must broadcast over
    numpy arrays of ``h`` (and, for elementwise simulation, over matching
    arrays of ``x``).
    """

    pid = "base"
    shared_kind = "none"  # "bits" | "continuous" | "composite" | "none"
    shared_bits = 0
    uses_private = False
    unbiased = False
    domain = "full"  # "full" | "three"

    def __init__(self, **params):
        self.params = dict(params)

    # --- core interface --------------------------------------------------

    def q_hi(self, x, h):
        raise NotImplementedError

    def message_pair(self, x) -> tuple[int, int]:
        """The two messages the sender may emit for this x (low, high)."""
        return 0, 1

    def decode_message(self, m, h):
        raise NotImplementedError

    def values(self, x, h):
        """Decoded estimates (low, high) as arrays over ``h``."""
        m0, m1 = self.message_pair(x)
        return self.decode_message(m0, h), self.decode_message(m1, h)

    def closed_mse(self, x):
        """Vectorized closed-form expected squared error, or None."""
        return None

    def worst_candidates(self) -> np.ndarray:
        """Analytic candidates for the worst-case x."""
        return np.array([0.0, 0.5, 1.0])

    # --- continuous-shared protocols only ---------------------------------

    def h_breakpoints(self, x):
        """Points in (0,1) where the integrand over u changes polynomial."""
        return []

    def affine_sim_params(self, x):
        """(t, a, b, c, lo, hi): estimate = clip(a*u + b + c*[u <= t], lo, hi)."""
        raise NotImplementedError

    # --- scalar convenience API -------------------------------------------

    def encode(self, x: float, s: SharedDraw, r: PrivateDraw | None = None) -> int:
        h = s.value
        q = float(self.q_hi(x, np.asarray(h)))
        m0, m1 = self.message_pair(x)
        if not self.uses_private:
            return m1 if q >= 0.5 else m0
        if r is None:
            raise ValueError(f"{self.pid} requires private randomness")
        return m1 if r.r < q else m0

    def decode(self, m: int, s: SharedDraw) -> float:
        return float(self.decode_message(m, np.asarray(s.value)))

    def sample_shared(self, rng: np.random.Generator, n: int):
        """Batch of raw shared values (ints for bits, floats for continuous)."""
        if self.shared_kind in ("bits", "none"):
            if self.shared_bits == 0:
                return np.zeros(n, dtype=np.int64)
            return rng.integers(0, 1 << self.shared_bits, size=n)
        if self.shared_kind == "continuous":
            return rng.random(n)
        raise NotImplementedError

    def draw_one(self, rng: np.random.Generator) -> SharedDraw:
        if self.shared_kind in ("bits", "none"):
            return SharedDraw.from_bits(self.shared_bits, int(self.sample_shared(rng, 1)[0]))
        if self.shared_kind == "continuous":
            return SharedDraw.continuous(float(rng.random()))
        raise NotImplementedError

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({inner})"


# ---------------------------------------------------------------------------
# no shared randomness
# ---------------------------------------------------------------------------


class RandomizedRounding(Protocol):
    """Send Bernoulli(x); estimate is the bit itself.  Unbiased, Var = x(1-x)."""

    pid = "rr"
    shared_kind = "none"
    uses_private = True
    unbiased = True

    def __init__(self):
        super().__init__()

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        return np.broadcast_arrays(x, np.zeros_like(np.asarray(h, dtype=float)))[0]

    def decode_message(self, m, h):
        return np.broadcast_arrays(
            np.asarray(m, dtype=float), np.asarray(h, dtype=float)
        )[0]

    def encode(self, x, s, r=None):
        if r is None:
            raise ValueError("rr requires private randomness")
        return 1 if r.r < x else 0

    def closed_mse(self, x):
        x = np.asarray(x, dtype=float)
        return x * (1.0 - x)

    def worst_candidates(self):
        return np.array([0.0, 0.5, 1.0])


class DeterministicRounding(Protocol):
    """Threshold at 1/2; estimate at cell midpoints 1/4 and 3/4."""

    pid = "dr"
    shared_kind = "none"

    def __init__(self):
        super().__init__()

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        q = (x >= 0.5).astype(float)
        return np.broadcast_arrays(q, np.zeros_like(np.asarray(h, dtype=float)))[0]

    def decode_message(self, m, h):
        v = 0.25 + 0.5 * np.asarray(m, dtype=float)
        return np.broadcast_arrays(v, np.asarray(h, dtype=float))[0]

    def closed_mse(self, x):
        x = np.asarray(x, dtype=float)
        v = np.where(x >= 0.5, 0.75, 0.25)
        return (x - v) ** 2

    def worst_candidates(self):
        return np.array([0.0, 0.5, 1.0])


# ---------------------------------------------------------------------------
# unbiased with shared randomness
# ---------------------------------------------------------------------------


def quantizer_variance(x, l: int):
    """Variance of the l-bit shared-randomness unbiased quantizer at x.

    Piecewise-quadratic in the offset of x within its dyadic cell; the
    fractional part is computed as x*2^l - floor(x*2^l) before rescaling to
    avoid cancellation at cell boundaries.
    """
    x = np.asarray(x, dtype=float)
    scale = 2.0 ** l
    frac = (x * scale - np.floor(x * scale)) / scale
    return (1.0 - 4.0 ** (-l)) / 12.0 + frac / scale - frac * frac


class SharedUnbiased(Protocol):
    """l shared bits + private randomness; unbiased for every x.

    Sender emits 1 iff x >= (r + h) / 2^l; receiver outputs
    X + (h - (2^l - 1)/2) / 2^l.
    """

    pid = "shared-unbiased"
    shared_kind = "bits"
    uses_private = True
    unbiased = True

    def __init__(self, l: int = 1):
        if not 1 <= int(l) <= 20:
            raise ValueError(f"bit budget l must be in [1, 20], got {l}")
        super().__init__(l=int(l))
        self.l = int(l)
        self.shared_bits = self.l
        self._scale = 2.0 ** self.l
        self._offset = 0.5 * (self._scale - 1.0)

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        return np.clip(x * self._scale - h, 0.0, 1.0)

    def decode_message(self, m, h):
        return np.asarray(m, dtype=float) + (np.asarray(h, dtype=float) - self._offset) / self._scale

    def encode(self, x, s, r=None):
        if r is None:
            raise ValueError("shared-unbiased requires private randomness")
        # X = 1 iff x >= (r + h) / 2^l, ties resolved exactly as written
        return 1 if x * self._scale - s.value >= r.r else 0

    def closed_mse(self, x):
        return quantizer_variance(x, self.l)

    def worst_candidates(self):
        step = 1.0 / self._scale
        return 0.5 * step + step * np.arange(int(self._scale))


class SubtractiveDithering(Protocol):
    """Continuous shared offset h; send 1 iff x >= h, output X + h - 1/2.

    The estimate is uniform on [x - 1/2, x + 1/2], so Var = 1/12 everywhere.
    """

    pid = "dither"
    shared_kind = "continuous"
    unbiased = True

    def __init__(self):
        super().__init__()

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        return (x >= h).astype(float)

    def decode_message(self, m, h):
        return np.asarray(m, dtype=float) + np.asarray(h, dtype=float) - 0.5

    def closed_mse(self, x):
        return np.full_like(np.asarray(x, dtype=float), 1.0 / 12.0)

    def h_breakpoints(self, x):
        return [x]

    def affine_sim_params(self, x):
        return x, 1.0, -0.5, 1.0, -np.inf, np.inf


class ThreePointUnbiased(Protocol):
    """One shared bit, unbiased on {0, 1/2, 1} with Var = 1/16.

    Sender: X=0 at x=0, X=1 at x=1, X=1-h at x=1/2.  Receiver:
    X + (h - 1/2)/2.
    """

    pid = "three-unbiased"
    shared_kind = "bits"
    shared_bits = 1
    unbiased = True
    domain = "three"

    _DOMAIN = (0.0, 0.5, 1.0)

    def __init__(self):
        super().__init__()

    def _domain_value(self, x):
        for t in self._DOMAIN:
            if abs(float(x) - t) < 1e-9:
                return t
        raise ValueError(f"x={x} outside the supported domain {{0, 1/2, 1}}")

    def q_hi(self, x, h):
        t = self._domain_value(x)
        h = np.asarray(h, dtype=float)
        if t == 0.0:
            return np.zeros_like(h)
        if t == 1.0:
            return np.ones_like(h)
        return 1.0 - h

    def decode_message(self, m, h):
        return np.asarray(m, dtype=float) + (np.asarray(h, dtype=float) - 0.5) / 2.0

    def worst_candidates(self):
        return np.array(self._DOMAIN)


# ---------------------------------------------------------------------------
# biased protocols
# ---------------------------------------------------------------------------


class TruncatedDithering(Protocol):
    """Subtractive dithering with the estimate clipped into [z, 1-z].

    Trades bias at the edges for lower worst-case squared error; the default
    z balances the error at x=0 against the error at x=1/2.
    """

    pid = "trunc-dither"
    shared_kind = "continuous"

    def __init__(self, z: float | None = None):
        if z is None:
            z = self.optimal_z()
        z = float(z)
        if not 0.0 <= z <= 0.5:
            raise ValueError(f"truncation z must be in [0, 1/2], got {z}")
        super().__init__(z=z)
        self.z = z

    @staticmethod
    def edge_cost(z):
        """Expected squared error at x=0 (and x=1) as a function of z."""
        z = np.asarray(z, dtype=float)
        return 2.0 / 3.0 * z ** 3 + 0.5 * z ** 2 + 1.0 / 24.0

    @staticmethod
    def center_cost(z):
        """Expected squared error at x=1/2 as a function of z."""
        z = np.asarray(z, dtype=float)
        return 2.0 * z * (0.5 - z) ** 2 + 2.0 / 3.0 * (0.5 - z) ** 3

    @staticmethod
    def optimal_z() -> float:
        """The z in (0, 1/2) balancing the edge and center costs."""
        f = lambda z: TruncatedDithering.center_cost(z) - TruncatedDithering.edge_cost(z)
        return float(brentq(f, 1e-9, 0.45, xtol=1e-14))

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        return (x >= h).astype(float)

    def decode_message(self, m, h):
        raw = np.asarray(m, dtype=float) + np.asarray(h, dtype=float) - 0.5
        return np.clip(raw, self.z, 1.0 - self.z)

    def closed_mse(self, x):
        # Integrate (clip(X + u - 1/2, z, 1-z) - x)^2 over u in [0,1]; the
        # integrand is piecewise quadratic, so each region has a cubic
        # antiderivative.
        x = np.asarray(x, dtype=float)
        z = self.z

        def cube(a, b, c):
            # integral of (u + c)^2 for u from a to b (a <= b assumed)
            return ((b + c) ** 3 - (a + c) ** 3) / 3.0

        # u <= x (X=1): estimate u + 1/2 until u = 1/2 - z, then clipped to 1-z
        c_lin = cube(0.0, np.minimum(x, 0.5 - z), 0.5 - x)
        c_hi = np.maximum(0.0, x - (0.5 - z)) * (1.0 - z - x) ** 2
        # u > x (X=0): estimate clipped to z until u = z + 1/2, then u - 1/2
        c_lo = np.maximum(0.0, np.minimum(1.0, z + 0.5) - x) * (z - x) ** 2
        lin_start = np.maximum(x, z + 0.5)
        c_lin2 = np.where(lin_start < 1.0, cube(lin_start, 1.0, -0.5 - x), 0.0)
        return c_lin + c_hi + c_lo + c_lin2

    def h_breakpoints(self, x):
        return [x, 0.5 - self.z, 0.5 + self.z]

    def affine_sim_params(self, x):
        return x, 1.0, -0.5, 1.0, self.z, 1.0 - self.z

    def worst_candidates(self):
        return np.array([0.0, 0.5, 1.0])


class ConvexDitheredBiased(Protocol):
    """Dithered sender, receiver shrinks toward the shared offset.

    Estimate alpha*h + (1-alpha)*X; at alpha = 2 - phi the expected squared
    error is the constant 5/3 - phi.
    """

    pid = "convex-dither"
    shared_kind = "continuous"

    def __init__(self, alpha: float | None = None):
        if alpha is None:
            alpha = 2.0 - PHI
        alpha = float(alpha)
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"mixing weight alpha must be in [0, 1], got {alpha}")
        super().__init__(alpha=alpha)
        self.alpha = alpha

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        return (x >= h).astype(float)

    def decode_message(self, m, h):
        return self.alpha * np.asarray(h, dtype=float) + (1.0 - self.alpha) * np.asarray(m, dtype=float)

    def closed_mse(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        return x - x * x - 3 * x * a + 3 * x * x * a + a * a / 3.0 + x * a * a - x * x * a * a

    def h_breakpoints(self, x):
        return [x]

    def affine_sim_params(self, x):
        return x, self.alpha, 0.0, 1.0 - self.alpha, -np.inf, np.inf

    def worst_candidates(self):
        return np.array([0.0, 0.5, 1.0])


def biased_alpha_opt(l: int) -> float:
    """Optimal interval width parameter for the l-bit biased protocol."""
    two = 2.0 ** l
    four = 4.0 ** l
    root = math.sqrt(2.0 ** (l - 2) * (two - 1.0) ** 2 * (5.0 * two - 8.0))
    return (1.0 - 2.5 * two + 1.5 * four - root) / (four - two + 1.0)


def biased_cost_opt(l: int) -> float:
    """Worst-case cost of the l-bit biased protocol at its optimal alpha."""
    two = 2.0 ** l
    four = 4.0 ** l
    inner = 2.0 - 3.0 * two + 2.0 ** (l / 2.0) * math.sqrt(5.0 * two - 8.0)
    return (two - 1.0) * (2.0 * two - 1.0) * inner ** 2 / (24.0 * (four - two + 1.0) ** 2)


class BiasedShared(Protocol):
    """Deterministic l-shared-bit protocol cutting [0,1] into 2^l - 1 bands.

    Below (1-alpha)/2 the sender always says 0, above (1+alpha)/2 always 1;
    on band i it says 1 iff h <= i.  Receiver: alpha*h/(2^l-1) + (1-alpha)*X.
    """

    pid = "biased-shared"
    shared_kind = "bits"

    def __init__(self, l: int = 1):
        if not 1 <= int(l) <= 16:
            raise ValueError(f"bit budget l must be in [1, 16], got {l}")
        super().__init__(l=int(l))
        self.l = int(l)
        self.shared_bits = self.l
        self.n_vals = (1 << self.l) - 1  # distinct h levels minus one, also band count
        self.alpha = biased_alpha_opt(self.l)

    def _band(self, x):
        x = np.asarray(x, dtype=float)
        lo = (1.0 - self.alpha) / 2.0
        i = np.floor((x - lo) * self.n_vals / self.alpha)
        return np.clip(i, 0, self.n_vals - 1).astype(np.int64)

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h)
        a = self.alpha
        mid = (h <= self._band(x)).astype(float)
        return np.where(x < (1.0 - a) / 2.0, 0.0, np.where(x >= (1.0 + a) / 2.0, 1.0, mid))

    def decode_message(self, m, h):
        return self.alpha * np.asarray(h, dtype=float) / self.n_vals + (1.0 - self.alpha) * np.asarray(m, dtype=float)

    def closed_mse(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        two = float(1 << self.l)
        n = float(self.n_vals)
        psi = a * a * (2.0 * two - 1.0) / (6.0 * n)
        i = self._band(x).astype(float)
        gamma = a * (1.0 - a) * i * (i + 1.0) / (two * n) + (1.0 - a) ** 2 * (i + 1.0) / two
        mid = psi + gamma - x * a - x * (1.0 - a) * (i + 1.0) / (two / 2.0) + x * x
        below = psi - x * a + x * x
        above = psi - (1.0 - x) * a + (1.0 - x) ** 2
        return np.where(x < (1.0 - a) / 2.0, below, np.where(x >= (1.0 + a) / 2.0, above, mid))

    def worst_candidates(self):
        lo = (1.0 - self.alpha) / 2.0
        edges = lo + self.alpha * np.arange(self.n_vals + 1) / self.n_vals
        return np.concatenate(([0.0, 1.0], edges))


class ThreePointBiased(Protocol):
    """One shared bit, deterministic, tuned for {0, 1/2, 1}.

    Receiver outputs alpha*h + (1-alpha)*X with alpha = 1 - 1/sqrt(2); the
    sender, knowing h, emits the bit whose decode value is nearest to x
    (ties go to 0), which on the three special points reduces to sending
    0, 1-h, 1 respectively.
    """

    pid = "three-biased"
    shared_kind = "bits"
    shared_bits = 1
    domain = "three"

    def __init__(self):
        super().__init__()
        self.alpha = 1.0 - 1.0 / math.sqrt(2.0)

    def q_hi(self, x, h):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        v0 = self.alpha * h
        v1 = self.alpha * h + (1.0 - self.alpha)
        return ((x - v1) ** 2 < (x - v0) ** 2).astype(float)

    def decode_message(self, m, h):
        return self.alpha * np.asarray(h, dtype=float) + (1.0 - self.alpha) * np.asarray(m, dtype=float)

    def closed_mse(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        t0 = np.minimum(x * x, (x - (1.0 - a)) ** 2)
        t1 = np.minimum((x - a) ** 2, (1.0 - x) ** 2)
        return 0.5 * (t0 + t1)

    def worst_candidates(self):
        a = self.alpha
        return np.array([0.0, (1.0 - a) / 2.0, 0.5, (1.0 + a) / 2.0, 1.0])


class LimitBiased(Protocol):
    """Unbounded-shared-randomness biased protocol with alpha = 2 - phi.

    Deterministic 0/1 outside the central band of width alpha; inside it the
    sender thresholds u against the band-relative position of x.  Receiver:
    alpha*u + (1-alpha)*X.
    """

    pid = "limit-biased"
    shared_kind = "continuous"

    def __init__(self):
        super().__init__()
        self.alpha = 2.0 - PHI

    def _threshold(self, x):
        return (np.asarray(x, dtype=float) - (1.0 - self.alpha) / 2.0) / self.alpha

    def q_hi(self, x, h):
        h = np.asarray(h, dtype=float)
        return (h <= self._threshold(x)).astype(float)

    def decode_message(self, m, h):
        return self.alpha * np.asarray(h, dtype=float) + (1.0 - self.alpha) * np.asarray(m, dtype=float)

    def closed_mse(self, x):
        x = np.asarray(x, dtype=float)
        lo = (PHI - 1.0) / 2.0
        hi = (3.0 - PHI) / 2.0
        below = x * x + (PHI - 2.0) * x + (5.0 / 3.0 - PHI)
        mid = (2.0 * PHI - 3.0) / (PHI - 2.0) * x * x + (PHI - 1.0) * x + (23.0 - 15.0 * PHI) / 12.0
        above = x * x - PHI * x + 2.0 / 3.0
        return np.where(x < lo, below, np.where(x > hi, above, mid))

    def h_breakpoints(self, x):
        t = float(self._threshold(x))
        return [t] if 0.0 < t < 1.0 else []

    def affine_sim_params(self, x):
        return float(self._threshold(x)), self.alpha, 0.0, 1.0 - self.alpha, -np.inf, np.inf

    def worst_candidates(self):
        return np.array([0.0, (PHI - 1.0) / 2.0, 0.5, (3.0 - PHI) / 2.0, 1.0])


# ---------------------------------------------------------------------------
# hybrids
# ---------------------------------------------------------------------------


class DyadicHybrid(Protocol):
    """Bit-budget hybrid: top selector bits pick sub-protocol A or B.

    The selector fires A with probability p_numerator / 2^selector_bits; the
    remaining low bits are shared by both sub-protocols, each reading the
    most-significant bits it needs.  The expected squared error is the exact
    p-mixture of the sub-protocol errors.
    """

    pid = "hybrid"
    shared_kind = "bits"

    def __init__(self, p_numerator: int, selector_bits: int, a: Protocol, b: Protocol):
        if not 0 <= p_numerator <= (1 << selector_bits):
            raise ValueError("selector numerator out of range")
        for sub in (a, b):
            if sub.shared_kind not in ("bits", "none"):
                raise ValueError("bit-budget hybrid requires bit-budget sub-protocols")
        super().__init__(p_numerator=p_numerator, selector_bits=selector_bits,
                         a=a.pid, b=b.pid)
        self.a = a
        self.b = b
        self.p_numerator = int(p_numerator)
        self.selector_bits = int(selector_bits)
        self.sub_bits = max(a.shared_bits, b.shared_bits)
        self.shared_bits = self.selector_bits + self.sub_bits
        self.p = p_numerator / float(1 << selector_bits)
        self.mixture = (self.p, a, b)
        self.uses_private = a.uses_private or b.uses_private
        self.unbiased = a.unbiased and b.unbiased

    def _route(self, h):
        h = np.asarray(h)
        sel = h >> self.sub_bits
        rem = h & ((1 << self.sub_bits) - 1)
        use_a = sel < self.p_numerator
        ha = rem >> (self.sub_bits - self.a.shared_bits)
        hb = rem >> (self.sub_bits - self.b.shared_bits)
        return use_a, ha, hb

    def q_hi(self, x, h):
        use_a, ha, hb = self._route(h)
        return np.where(use_a, self.a.q_hi(x, ha), self.b.q_hi(x, hb))

    def decode_message(self, m, h):
        use_a, ha, hb = self._route(h)
        return np.where(use_a, self.a.decode_message(m, ha), self.b.decode_message(m, hb))

    def closed_mse(self, x):
        ca = self.a.closed_mse(x)
        cb = self.b.closed_mse(x)
        if ca is None or cb is None:
            return None
        return self.p * ca + (1.0 - self.p) * cb

    def worst_candidates(self):
        return np.concatenate(([0.0, 1.0], self.a.worst_candidates(), self.b.worst_candidates()))


class ContinuousHybrid(Protocol):
    """Unbounded-randomness hybrid: a continuous selector picks A or B.

    The shared value is a triple (selector u, A's draw, B's draw); only the
    selected sub-protocol's draw is consumed on any invocation, so the
    expected squared error is the exact p-mixture.
    """

    pid = "hybrid"
    shared_kind = "composite"

    def __init__(self, p: float, a: Protocol, b: Protocol):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"mixing probability must be in [0, 1], got {p}")
        super().__init__(p=p, a=a.pid, b=b.pid)
        self.a = a
        self.b = b
        self.p = float(p)
        self.mixture = (self.p, a, b)
        self.uses_private = a.uses_private or b.uses_private
        self.unbiased = a.unbiased and b.unbiased

    def encode(self, x, s, r=None):
        u, sa, sb = s
        return self.a.encode(x, sa, r) if u < self.p else self.b.encode(x, sb, r)

    def decode(self, m, s):
        u, sa, sb = s
        return self.a.decode(m, sa) if u < self.p else self.b.decode(m, sb)

    def draw_one(self, rng):
        return (float(rng.random()), self.a.draw_one(rng), self.b.draw_one(rng))

    def closed_mse(self, x):
        ca = self.a.closed_mse(x)
        cb = self.b.closed_mse(x)
        if ca is None or cb is None:
            return None
        return self.p * ca + (1.0 - self.p) * cb

    def worst_candidates(self):
        return np.concatenate(([0.0, 1.0], self.a.worst_candidates(), self.b.worst_candidates()))


def hybrid_unbounded() -> ContinuousHybrid:
    """Golden-ratio mixture of the limit protocol and the three-point one."""
    return ContinuousHybrid(PHI - 1.0, LimitBiased(), ThreePointBiased())


def hybrid_3bit() -> ContinuousHybrid:
    """p=2/3 mixture of the 3-bit banded protocol and the three-point one."""
    return ContinuousHybrid(2.0 / 3.0, BiasedShared(3), ThreePointBiased())


def hybrid_4bit() -> DyadicHybrid:
    """4 shared bits: 2 selector bits (p=3/4) over banded-2 vs three-point."""
    return DyadicHybrid(3, 2, BiasedShared(2), ThreePointBiased())


def hybrid_8bit() -> DyadicHybrid:
    """8 shared bits: 4 selector bits (p=11/16) over banded-4 vs three-point."""
    return DyadicHybrid(11, 4, BiasedShared(4), ThreePointBiased())


# ---------------------------------------------------------------------------
# k-bit generalization
# ---------------------------------------------------------------------------


class KbitUnbiased(Protocol):
    """k-bit message: quantize to the grid i/(2^k - 1), rounding the cell
    offset with the 1-bit shared-randomness scheme.

    With l=None the shared value is continuous (the dithering limit) and no
    private randomness is needed.
    """

    pid = "kbit"

    def __init__(self, k: int = 1, l: int | None = 1):
        if not 1 <= int(k) <= 16:
            raise ValueError(f"message bits k must be in [1, 16], got {k}")
        super().__init__(k=int(k), l=None if l is None else int(l))
        self.k = int(k)
        self.R = (1 << self.k) - 1
        if l is None:
            self.l = None
            self.shared_kind = "continuous"
            self.uses_private = False
        else:
            if not 1 <= int(l) <= 20:
                raise ValueError(f"bit budget l must be in [1, 20], got {l}")
            self.l = int(l)
            self.shared_kind = "bits"
            self.shared_bits = self.l
            self.uses_private = True
            self._scale = 2.0 ** self.l
            self._offset = 0.5 * (self._scale - 1.0)
        self.unbiased = True

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        c = np.minimum(np.floor(self.R * x), self.R - 1)
        return c, self.R * x - c

    def message_pair(self, x):
        c, _ = self._split(x)
        return int(c), int(c) + 1

    def q_hi(self, x, h):
        _, p = self._split(x)
        h = np.asarray(h, dtype=float)
        if self.l is None:
            return (p >= h).astype(float)
        return np.clip(p * self._scale - h, 0.0, 1.0)

    def decode_message(self, m, h):
        m = np.asarray(m, dtype=float)
        h = np.asarray(h, dtype=float)
        if self.l is None:
            return (m + h - 0.5) / self.R
        return (m + (h - self._offset) / self._scale) / self.R

    def values(self, x, h):
        c, _ = self._split(x)
        return self.decode_message(c, h), self.decode_message(c + 1.0, h)

    def encode(self, x, s, r=None):
        c, p = self._split(x)
        if self.l is None:
            return int(c) + (1 if p >= s.value else 0)
        if r is None:
            raise ValueError("kbit with a bit budget requires private randomness")
        return int(c) + (1 if p * self._scale - s.value >= r.r else 0)

    def closed_mse(self, x):
        _, p = self._split(x)
        if self.l is None:
            return np.full_like(np.asarray(x, dtype=float), 1.0 / (12.0 * self.R * self.R))
        return quantizer_variance(p, self.l) / (self.R * self.R)

    def h_breakpoints(self, x):
        _, p = self._split(x)
        p = float(p)
        return [p] if 0.0 < p < 1.0 else []

    def affine_sim_params(self, x):
        c, p = self._split(x)
        return float(p), 1.0 / self.R, (float(c) - 0.5) / self.R, 1.0 / self.R, -np.inf, np.inf

    def worst_candidates(self):
        if self.l is None:
            return np.array([0.0, 0.5 / self.R, 1.0])
        step = 2.0 ** (-self.l)
        offs = 0.5 * step + step * np.arange(1 << self.l)
        cells = np.arange(self.R)[:, None]
        return ((cells + offs[None, :]) / self.R).ravel()


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_HYBRID_VARIANTS = {
    "unbounded": hybrid_unbounded,
    "l3": hybrid_3bit,
    "l4": hybrid_4bit,
    "l8": hybrid_8bit,
}


def _make_hybrid(variant: str = "unbounded"):
    if variant not in _HYBRID_VARIANTS:
        raise ValueError(
            f"unknown hybrid variant {variant!r}; choose from {sorted(_HYBRID_VARIANTS)}"
        )
    return _HYBRID_VARIANTS[variant]()


PROTOCOL_IDS = (
    "rr", "dr", "shared-unbiased", "dither", "three-unbiased", "trunc-dither",
    "convex-dither", "biased-shared", "three-biased", "limit-biased", "hybrid",
    "kbit",
)

_FACTORIES = {
    "rr": RandomizedRounding,
    "dr": DeterministicRounding,
    "shared-unbiased": SharedUnbiased,
    "dither": SubtractiveDithering,
    "three-unbiased": ThreePointUnbiased,
    "trunc-dither": TruncatedDithering,
    "convex-dither": ConvexDitheredBiased,
    "biased-shared": BiasedShared,
    "three-biased": ThreePointBiased,
    "limit-biased": LimitBiased,
    "hybrid": _make_hybrid,
    "kbit": KbitUnbiased,
}


def make_protocol(pid: str, **params) -> Protocol:
    """Construct a protocol from its CLI id and keyword parameters."""
    if pid not in _FACTORIES:
        raise ValueError(f"unknown protocol {pid!r}; choose from {sorted(_FACTORIES)}")
    try:
        return _FACTORIES[pid](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for protocol {pid!r}: {exc}") from None
