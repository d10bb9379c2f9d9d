"""Closed-form landscape predictions.

Treats neighboring allocations' utilities as independent coin flips: a
random allocation beats any one neighbor with probability 1/2, so it is a
strict local optimum with probability lambda = 2**(-b) where b counts its
neighbors. From that follow the expected number of local optima, the chance
a local optimum is global, and a lower bound on the expected hop distance
to the nearest one. Exact rational arithmetic throughout; callers convert
to float at the edge.

The independence assumption need not hold for any concrete geometry, so
these are predictions to compare against the enumeration oracle, not
certified facts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Rational = Union[Fraction, int]


def branching_factor(num_sensors: int, num_states: int) -> int:
    """Neighbors of any allocation: each sensor can move to any other state."""
    if num_sensors < 0:
        raise ValueError("num_sensors must be non-negative")
    if num_states < 1:
        raise ValueError("num_states must be at least 1")
    return (num_states - 1) * num_sensors


def lambda_prediction(b: int) -> Fraction:
    """Probability that a random allocation beats all b neighbors: 2**(-b)."""
    if b < 0:
        raise ValueError("branching factor must be non-negative")
    return Fraction(1, 2**b)


def expected_local_optima(lam: Rational, total_allocations: int) -> Fraction:
    """Predicted count of strict local optima in a space of the given size."""
    if total_allocations < 0:
        raise ValueError("total_allocations must be non-negative")
    return Fraction(lam) * total_allocations


def pr_local_is_global(
    lam: Rational, total_allocations: int
) -> tuple[Fraction, bool]:
    """Chance that a local optimum is the global one: 1 over the expected
    local-optima count, clamped to 1. Returns (probability, clamped flag);
    the flag marks that the raw formula exceeded 1 (expected count below 1,
    where the prediction stops being a proper probability)."""
    expected = expected_local_optima(lam, total_allocations)
    if expected <= 0:
        raise ValueError("expected local-optima count must be positive")
    raw = 1 / expected
    if raw > 1:
        return Fraction(1), True
    return raw, False


def expected_distance_bound(b: int) -> float:
    """Lower bound on expected hops to the nearest local optimum:
    b * log_b(2). Only meaningful for b >= 2."""
    if b < 2:
        raise ValueError(f"distance bound requires branching factor >= 2, got {b}")
    return b * math.log(2) / math.log(b)


@dataclass(frozen=True)
class TheoryReport:
    """Bundle of all predictions for one problem size.

    ``pr_two_pow_minus_b`` carries the alternative closed form 2**(-b) for
    the local-is-global probability; it matches ``pr_local_is_global`` only
    when the space size equals 4**b-style identities, so both are reported.
    ``expected_distance`` is None when the branching factor is below 2.
    """

    num_sensors: int
    num_states: int
    branching_factor: int
    total_allocations: int
    lambda_: Fraction
    expected_local_optima: Fraction
    pr_local_is_global: Fraction
    pr_clamped: bool
    pr_two_pow_minus_b: Fraction
    expected_distance: Optional[float]


def theory_report(
    num_sensors: int,
    num_states: int,
    total_allocations: Optional[int] = None,
) -> TheoryReport:
    """Evaluate every prediction for a sensor count and per-sensor state
    count. The space size defaults to num_states**num_sensors but can be
    overridden to explore alternative size readings."""
    b = branching_factor(num_sensors, num_states)
    if total_allocations is None:
        total_allocations = num_states**num_sensors
    lam = lambda_prediction(b)
    expected = expected_local_optima(lam, total_allocations)
    pr, clamped = pr_local_is_global(lam, total_allocations)
    return TheoryReport(
        num_sensors=num_sensors,
        num_states=num_states,
        branching_factor=b,
        total_allocations=total_allocations,
        lambda_=lam,
        expected_local_optima=expected,
        pr_local_is_global=pr,
        pr_clamped=clamped,
        pr_two_pow_minus_b=lambda_prediction(b),
        expected_distance=expected_distance_bound(b) if b >= 2 else None,
    )


def theory_report_to_dict(report: TheoryReport) -> dict:
    """JSON-ready mapping; exact rationals become floats."""
    return {
        "num_sensors": report.num_sensors,
        "num_states": report.num_states,
        "branching_factor": report.branching_factor,
        "total_allocations": report.total_allocations,
        "lambda": float(report.lambda_),
        "expected_local_optima": float(report.expected_local_optima),
        "pr_local_is_global": float(report.pr_local_is_global),
        "pr_clamped": report.pr_clamped,
        "pr_two_pow_minus_b": float(report.pr_two_pow_minus_b),
        "expected_distance": report.expected_distance,
    }
