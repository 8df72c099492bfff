"""One-bit and k-bit transmission of reals in [0, 1]: protocols, exact cost
analysis, Monte Carlo validation, and minimax lower bounds."""

from .exact import (
    CostProfile,
    bias_at,
    mse_at,
    profile,
    variance_at,
    variance_closed_unbiased,
    worst_case,
)
from .lowerbound import (
    BoundCertificate,
    DiscreteDistribution,
    kbit_triplet_bound,
    maximize_bound,
    named_distribution,
    optimal_deterministic_cost,
    three_point_bound_closed,
)
from .montecarlo import MeanEstimationReport, SimReport, mean_estimation, simulate
from .protocols import (
    PROTOCOL_IDS,
    Protocol,
    biased_alpha_opt,
    biased_cost_opt,
    hybrid_3bit,
    hybrid_4bit,
    hybrid_8bit,
    hybrid_unbounded,
    make_protocol,
)
from .randomness import PrivateDraw, SharedDraw, draw_shared, make_rng

__version__ = "0.1.0"

__all__ = [
    "CostProfile", "bias_at", "mse_at", "profile", "variance_at",
    "variance_closed_unbiased", "worst_case",
    "BoundCertificate", "DiscreteDistribution", "kbit_triplet_bound",
    "maximize_bound", "named_distribution", "optimal_deterministic_cost",
    "three_point_bound_closed",
    "MeanEstimationReport", "SimReport", "mean_estimation", "simulate",
    "PROTOCOL_IDS", "Protocol", "biased_alpha_opt", "biased_cost_opt",
    "hybrid_3bit", "hybrid_4bit", "hybrid_8bit", "hybrid_unbounded",
    "make_protocol",
    "PrivateDraw", "SharedDraw", "draw_shared", "make_rng",
    "__version__",
]
