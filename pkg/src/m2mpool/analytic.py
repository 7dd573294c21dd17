"""Closed-form characterization of the shared-pool transmission demand.

Model: N devices report over a recurring interval.  Per interval a device
generates a random number of reports, U (Poisson with unit normalized load,
or exactly one).  Every report takes a geometrically distributed number of
transmission attempts with reception-failure probability p_e, truncated at
the retry limit L.  The first transmission of a device's first report rides
that device's preallocated resources; every other transmission (excess
reports and all retransmissions) must be served by a shared pool.

A device's shared-pool demand is therefore

    R_i = 0                if U_i = 0
    R_i = sum_j W_ij - 1   if U_i >= 1,

and the pool sees R = sum_i R_i.  With N large, R is treated as Gaussian and
characterized by its mean and variance alone.  This module provides those
moments, the scheduler-independent upper bound on the per-report failure
probability for a pool of capacity C transmissions, and the inverse problem:
the smallest C meeting a target failure probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import InfeasibleTargetError, ParameterError, UnsupportedArrivalError
from .numerics import q_function, q_inverse

_E_INV = math.exp(-1.0)


@dataclass(frozen=True)
class PoissonPerRI:
    """Poisson report arrivals; ``load`` is the mean report count per interval.

    The closed forms below hold only at load 1 (one expected report per
    interval); other loads are simulation-only.
    """

    load: float = 1.0

    def __post_init__(self) -> None:
        if not (self.load > 0.0 and math.isfinite(self.load)):
            raise ParameterError(f"arrival load must be positive and finite, got {self.load!r}")


@dataclass(frozen=True)
class OnePerRI:
    """Exactly one report per device per interval."""


ArrivalModel = Union[PoissonPerRI, OnePerRI]


@dataclass(frozen=True)
class SystemParams:
    """Full input to analysis and simulation."""

    n_devices: int
    p_e: float
    max_attempts: int
    arrival: ArrivalModel = PoissonPerRI()
    target_failure: float = 1e-3

    def __post_init__(self) -> None:
        if not isinstance(self.n_devices, int) or self.n_devices < 1:
            raise ParameterError(f"n_devices must be a positive integer, got {self.n_devices!r}")
        if not (0.0 <= self.p_e < 1.0):
            raise ParameterError(f"p_e must be in [0, 1), got {self.p_e!r}")
        if not isinstance(self.max_attempts, int) or self.max_attempts < 1:
            raise ParameterError(f"max_attempts must be a positive integer, got {self.max_attempts!r}")
        if not (0.0 < self.target_failure < 1.0):
            raise ParameterError(f"target_failure must be in (0, 1), got {self.target_failure!r}")
        if not isinstance(self.arrival, (PoissonPerRI, OnePerRI)):
            raise ParameterError(f"unknown arrival model: {self.arrival!r}")

    @property
    def failure_floor(self) -> float:
        """p_e^L, the failure probability no amount of capacity removes."""
        return self.p_e**self.max_attempts


@dataclass(frozen=True)
class DemandSummary:
    """Mean and variance of the per-interval shared-pool demand, in transmissions."""

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.mean < 0.0 or self.variance < 0.0 or not (
            math.isfinite(self.mean) and math.isfinite(self.variance)
        ):
            raise ParameterError(f"demand moments must be finite and non-negative: {self!r}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def attempts_pmf(k: int, p_e: float, max_attempts: int) -> float:
    """P[W = k] for the truncated-geometric attempt count.

    p_e^(k-1) (1 - p_e) below the cap; the cap point absorbs the whole
    geometric tail, P[W = L] = p_e^(L-1).
    """
    _check_pe_l(p_e, max_attempts)
    if not isinstance(k, int) or not 1 <= k <= max_attempts:
        raise ParameterError(f"k must be an integer in [1, {max_attempts}], got {k!r}")
    if k < max_attempts:
        return p_e ** (k - 1) * (1.0 - p_e)
    return p_e ** (max_attempts - 1)


def expected_attempts(p_e: float, max_attempts: int) -> float:
    """E[W] = (1 - p_e^L) / (1 - p_e), the truncated geometric series in closed form."""
    _check_pe_l(p_e, max_attempts)
    return (1.0 - p_e**max_attempts) / (1.0 - p_e)


def attempts_second_moment(p_e: float, max_attempts: int) -> float:
    """E[W^2] by direct summation of the L-term pmf (exact, no closed form needed)."""
    _check_pe_l(p_e, max_attempts)
    return sum(k * k * attempts_pmf(k, p_e, max_attempts) for k in range(1, max_attempts + 1))


def demand_summary(params: SystemParams) -> DemandSummary:
    """Moments of the shared-pool demand R for the given system.

    Unit-load Poisson arrivals: per device,

        E[R_i]   = E[W] - (1 - e^-1)
        Var[R_i] = ((2L-1) p^(L+1) - (2L+1) p^L + p + 1) / (1-p)^2
                   + e^-1 (1 - 2 E[W] - e^-1)

    One report per interval: R_i = W - 1 exactly, so the moments are the
    truncated-geometric ones shifted.  Both scale linearly with N because
    devices are independent and identically distributed.
    """
    p_e, cap = params.p_e, params.max_attempts
    e_w = expected_attempts(p_e, cap)
    if isinstance(params.arrival, OnePerRI):
        mean1 = e_w - 1.0
        var1 = attempts_second_moment(p_e, cap) - e_w * e_w
    else:
        if params.arrival.load != 1.0:
            raise UnsupportedArrivalError(
                f"closed forms need unit Poisson load, got {params.arrival.load!r}; "
                "use the simulator for other loads"
            )
        mean1 = e_w - (1.0 - _E_INV)
        var1 = _unit_poisson_demand_variance(p_e, cap)
    n = params.n_devices
    return DemandSummary(mean=n * mean1, variance=n * max(var1, 0.0))


def _unit_poisson_demand_variance(p_e: float, max_attempts: int) -> float:
    # the leading ratio is E[W^2] in closed form; kept in this shape so the
    # whole bracket mirrors the published dimensioning rule
    cap = max_attempts
    ratio = ((2 * cap - 1) * p_e ** (cap + 1) - (2 * cap + 1) * p_e**cap + p_e + 1.0) / (
        1.0 - p_e
    ) ** 2
    return ratio + _E_INV * (1.0 - 2.0 * expected_attempts(p_e, cap) - _E_INV)


def failure_bound(capacity: int, summary: DemandSummary, p_e: float, max_attempts: int) -> float:
    """Upper bound on the per-report failure probability at pool capacity C.

        P[failure] <= Q((C - mu) / sigma) (1 - p_e^L) + p_e^L

    The p_e^L term is the irreducible floor from reports that burn all L
    attempts; the Q term bounds the probability that total demand overflows
    the pool, which holds under any scheduling discipline.  A zero-variance
    summary degenerates to a step: p_e^L when C covers the mean, else 1.
    """
    _check_pe_l(p_e, max_attempts)
    if capacity < 0:
        raise ParameterError(f"capacity must be non-negative, got {capacity!r}")
    floor = p_e**max_attempts
    if summary.variance == 0.0:
        return floor if capacity >= summary.mean else 1.0
    z = (capacity - summary.mean) / summary.std
    return q_function(z) * (1.0 - floor) + floor


def dimension_capacity(params: SystemParams) -> int:
    """Smallest integer pool capacity whose failure bound meets the target.

    Closed form first (invert the Gaussian tail), then a local integer scan
    so that failure_bound(C) <= target < failure_bound(C - 1) holds exactly.
    """
    summary = demand_summary(params)
    floor = params.failure_floor
    eps = params.target_failure
    if eps <= floor:
        raise InfeasibleTargetError(
            f"target failure {eps:g} is at or below the floor p_e^L = {floor:g}; "
            "no capacity can reach it"
        )
    if summary.variance == 0.0:
        return max(0, math.ceil(summary.mean))
    cap = math.ceil(summary.mean + summary.std * q_inverse((eps - floor) / (1.0 - floor)))
    cap = max(0, cap)
    while cap > 0 and failure_bound(cap - 1, summary, params.p_e, params.max_attempts) <= eps:
        cap -= 1
    while failure_bound(cap, summary, params.p_e, params.max_attempts) > eps:
        cap += 1
    return cap


def _check_pe_l(p_e: float, max_attempts: int) -> None:
    if not (0.0 <= p_e < 1.0):
        raise ParameterError(f"p_e must be in [0, 1), got {p_e!r}")
    if not isinstance(max_attempts, int) or max_attempts < 1:
        raise ParameterError(f"max_attempts must be a positive integer, got {max_attempts!r}")
