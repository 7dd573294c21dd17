"""Dimensioning and Monte Carlo validation of a periodically pooled uplink.

Massive fleets of periodically reporting devices share a recurring pool of
uplink resources.  This package answers how large the shared part of the
pool must be so every device delivers its reports within one interval with a
target reliability: closed-form demand moments and a scheduler-independent
Gaussian tail bound (`analytic`), the inverse dimensioning, a mapping onto
the LTE resource grid (`lte`), and a seeded Monte Carlo engine that
validates both the Gaussian approximation and the bound (`sim`).
"""

from .analytic import (
    ArrivalModel,
    DemandSummary,
    OnePerRI,
    PoissonPerRI,
    SystemParams,
    attempts_pmf,
    attempts_second_moment,
    demand_summary,
    dimension_capacity,
    expected_attempts,
    failure_bound,
)
from .errors import (
    IndeterminateEstimateError,
    InfeasibleGeometryError,
    InfeasibleTargetError,
    M2MPoolError,
    ParameterError,
    UnsupportedArrivalError,
)
from .lte import (
    LteProfile,
    PoolPlan,
    build_pool_plan,
    capacity_from_subframes,
    rbs_per_report,
)
from .numerics import (
    RngStream,
    q_function,
    q_inverse,
    sample_attempts,
    sample_poisson,
)
from .sim import (
    DemandHistogram,
    FailureEstimate,
    IntervalResult,
    SchedulerPolicy,
    estimate_failure_prob,
    ks_distance,
    sample_demand,
    simulate_interval,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "ArrivalModel",
    "DemandHistogram",
    "DemandSummary",
    "FailureEstimate",
    "IndeterminateEstimateError",
    "InfeasibleGeometryError",
    "InfeasibleTargetError",
    "IntervalResult",
    "LteProfile",
    "M2MPoolError",
    "OnePerRI",
    "ParameterError",
    "PoissonPerRI",
    "PoolPlan",
    "RngStream",
    "SchedulerPolicy",
    "SystemParams",
    "UnsupportedArrivalError",
    "attempts_pmf",
    "attempts_second_moment",
    "build_pool_plan",
    "capacity_from_subframes",
    "demand_summary",
    "dimension_capacity",
    "estimate_failure_prob",
    "expected_attempts",
    "failure_bound",
    "ks_distance",
    "q_function",
    "q_inverse",
    "rbs_per_report",
    "sample_attempts",
    "sample_demand",
    "sample_poisson",
    "simulate_interval",
    "wilson_interval",
]
