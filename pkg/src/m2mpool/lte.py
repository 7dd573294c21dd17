"""Mapping reports and pool capacities onto the LTE uplink resource grid.

One resource block (RB) is the minimum uplink allocation: one subframe by
twelve subcarriers.  Y of the B RBs per subframe are reserved for machine
reporting, and the recurring pool spans X = X_P + X_C subframes: X_P carries
each device's preallocated first transmission, X_C carries the shared
capacity of C transmissions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import SystemParams
from .errors import InfeasibleGeometryError, ParameterError

QPSK_BITS_PER_RE = 2
QAM64_BITS_PER_RE = 6
# 12 subcarriers x 14 symbols = 168 resource elements per RB, minus 24 for
# reference signals; coding rate is not modeled
DEFAULT_DATA_RES_PER_RB = 144


@dataclass(frozen=True)
class LteProfile:
    """Static resource-grid and report parameters."""

    rbs_per_subframe_total: int
    m2m_rbs_per_subframe: int
    data_res_per_rb: int = DEFAULT_DATA_RES_PER_RB
    bits_per_re: int = QPSK_BITS_PER_RE
    report_size_bits: int = 800
    ri_subframes: int = 60_000
    subframe_seconds: float = 1e-3

    def __post_init__(self) -> None:
        for name in (
            "rbs_per_subframe_total",
            "m2m_rbs_per_subframe",
            "data_res_per_rb",
            "bits_per_re",
            "report_size_bits",
            "ri_subframes",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
        if self.m2m_rbs_per_subframe > self.rbs_per_subframe_total:
            raise ParameterError(
                f"m2m_rbs_per_subframe ({self.m2m_rbs_per_subframe}) exceeds the "
                f"subframe bandwidth ({self.rbs_per_subframe_total} RBs)"
            )
        if not (self.subframe_seconds > 0.0 and math.isfinite(self.subframe_seconds)):
            raise ParameterError(f"subframe_seconds must be positive, got {self.subframe_seconds!r}")


@dataclass(frozen=True)
class PoolPlan:
    """A dimensioned pool laid out on the grid."""

    rbs_per_report: int
    alpha: float
    capacity: int
    preallocated_subframes: int
    common_subframes: int
    total_subframes: int
    capacity_fraction: float
    worst_case_delay_seconds: float


def rbs_per_report(profile: LteProfile) -> int:
    """Resource blocks needed to carry one report at the profile's modulation."""
    bits_per_rb = profile.data_res_per_rb * profile.bits_per_re
    return -(-profile.report_size_bits // bits_per_rb)


def build_pool_plan(params: SystemParams, profile: LteProfile, capacity: int) -> PoolPlan:
    """Lay out a pool carrying N preallocated reports plus C shared transmissions.

    Preallocated and shared subframe counts are rounded up independently
    (physical allocation is whole subframes).  The capacity fraction counts
    the RBs actually consumed, r (N + C), against everything the system
    offers over one interval, B times the interval length, so it does not
    depend on how many RBs per subframe the pool happens to occupy.
    """
    if capacity < 0:
        raise ParameterError(f"capacity must be non-negative, got {capacity!r}")
    rbs = rbs_per_report(profile)
    y = profile.m2m_rbs_per_subframe
    if rbs > y:
        raise InfeasibleGeometryError(
            f"a report needs {rbs} RBs but only {y} are reserved per subframe"
        )
    preallocated = -(-params.n_devices * rbs // y)
    common = -(-capacity * rbs // y)
    total = preallocated + common
    if total > profile.ri_subframes:
        raise InfeasibleGeometryError(
            f"pool needs {total} subframes but the interval has only {profile.ri_subframes}"
        )
    fraction = (
        rbs * (params.n_devices + capacity) / (profile.rbs_per_subframe_total * profile.ri_subframes)
    )
    delay = (profile.ri_subframes + total) * profile.subframe_seconds
    return PoolPlan(
        rbs_per_report=rbs,
        alpha=rbs / y,
        capacity=capacity,
        preallocated_subframes=preallocated,
        common_subframes=common,
        total_subframes=total,
        capacity_fraction=fraction,
        worst_case_delay_seconds=delay,
    )


def capacity_from_subframes(common_subframes: int, profile: LteProfile, report_rbs: int) -> int:
    """Transmissions a shared pool of the given subframe count can carry."""
    if common_subframes < 0:
        raise ParameterError(f"common_subframes must be non-negative, got {common_subframes!r}")
    if report_rbs < 1:
        raise ParameterError(f"report_rbs must be positive, got {report_rbs!r}")
    return common_subframes * profile.m2m_rbs_per_subframe // report_rbs
