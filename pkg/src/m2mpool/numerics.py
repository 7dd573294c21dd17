"""Gaussian tail functions and reproducible sampling primitives.

Everything here is deterministic given an :class:`RngStream`, so simulation
replications can be farmed out to workers and still reduce to bit-identical
results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import ParameterError

_SQRT2 = math.sqrt(2.0)


def q_function(x: float) -> float:
    """Standard normal tail probability Q(x) = P[Z > x].

    Evaluated as erfc(x / sqrt(2)) / 2, which keeps full relative accuracy
    deep into the tail (reliability targets sit at 1e-3 and below).
    """
    if not math.isfinite(x):
        raise ParameterError(f"q_function requires finite x, got {x!r}")
    return 0.5 * math.erfc(x / _SQRT2)


def q_inverse(p: float) -> float:
    """Solve q_function(x) = p for 0 < p < 1.

    Bracketing bisection on [-40, 40] down to an interval width of 1e-13.
    Robustness beats speed here: dimensioning calls this once.
    """
    if not (0.0 < p < 1.0):
        raise ParameterError(f"q_inverse requires 0 < p < 1, got {p!r}")
    lo, hi = -40.0, 40.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RngStream:
    """One logical random stream, keyed by (master_seed, stream_index).

    Equal keys replay identical sequences on every run and under any thread
    schedule; distinct stream indices select statistically independent PCG64
    streams via seed-sequence spawn keys.  A stream owns mutable generator
    state, so keep each instance confined to a single worker.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.master_seed < 2**64):
            raise ParameterError(f"master_seed must be a 64-bit integer, got {self.master_seed!r}")
        if self.stream_index < 0:
            raise ParameterError(f"stream_index must be non-negative, got {self.stream_index!r}")

    @cached_property
    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(seq))


@lru_cache(maxsize=64)
def _poisson_cdf(mean: float) -> np.ndarray:
    # table extended until the truncated tail is below ~1e-18 (invisible at
    # double precision and at any realistic replication count)
    terms = [math.exp(-mean)]
    while terms[-1] > 1e-19 or len(terms) < 2 * mean + 10:
        terms.append(terms[-1] * mean / len(terms))
    return np.cumsum(terms)


def _poisson_draw(gen: np.random.Generator, mean: float, size: int) -> np.ndarray:
    cdf = _poisson_cdf(mean)
    return np.searchsorted(cdf, gen.random(size), side="right").astype(np.int64)


def poisson_counts(gen: np.random.Generator, mean: float, size: int) -> np.ndarray:
    """Poisson(mean) draws by inversion of the cumulative sum.

    Means above 500 are split additively across several inversion passes so
    the table head exp(-mean) never underflows.
    """
    if not (mean > 0.0 and math.isfinite(mean)):
        raise ParameterError(f"Poisson mean must be positive and finite, got {mean!r}")
    total = np.zeros(size, dtype=np.int64)
    while mean > 500.0:
        total += _poisson_draw(gen, 500.0, size)
        mean -= 500.0
    return total + _poisson_draw(gen, mean, size)


def sample_poisson(rng: RngStream, mean: float) -> int:
    """Draw one Poisson(mean) variate from the stream."""
    return int(poisson_counts(rng.generator, mean, 1)[0])


def leading_failure_counts(gen: np.random.Generator, p_e: float, size: int) -> np.ndarray:
    """Consecutive reception failures before a report's first success.

    Geometric, P[F = k] = p_e^k (1 - p_e), sampled by inversion from one
    uniform per draw.  Uncapped: callers apply their own retry limit.
    """
    _check_error_prob(p_e)
    if p_e == 0.0:
        return np.zeros(size, dtype=np.int64)
    u = gen.random(size)
    return np.floor(np.log1p(-u) / math.log(p_e)).astype(np.int64)


def sample_attempts(rng: RngStream, p_e: float, max_attempts: int) -> int:
    """Draw one report's attempt count: geometric in p_e, truncated at the cap.

    P[W = k] = p_e^(k-1) (1 - p_e) below the cap; the cap absorbs the whole
    remaining tail, P[W = L] = p_e^(L-1).
    """
    _check_max_attempts(max_attempts)
    f = leading_failure_counts(rng.generator, p_e, 1)[0]
    return int(min(f + 1, max_attempts))


def _check_error_prob(p_e: float) -> None:
    if not (0.0 <= p_e < 1.0):
        raise ParameterError(f"reception failure probability must be in [0, 1), got {p_e!r}")


def _check_max_attempts(max_attempts: int) -> None:
    if not isinstance(max_attempts, (int, np.integer)) or max_attempts < 1:
        raise ParameterError(f"max_attempts must be a positive integer, got {max_attempts!r}")
