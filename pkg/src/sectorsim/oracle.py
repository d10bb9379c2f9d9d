"""Exhaustive ground truth for small instances.

Walks every allocation to find the exact optimum, count strict local
optima, and measure hop distances to them in the single-change neighbor
graph. Deliberately desk-scale: anything past the enumeration budget is
refused outright rather than sampled.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Union

from .model import Allocation, Scenario, Utility, global_utility, legal_states
from .search import is_local_optimum, neighbors

DEFAULT_BUDGET = 10_000_000


class EnumerationBudgetError(ValueError):
    """The allocation space is larger than the configured budget."""


@dataclass(frozen=True)
class OptimumResult:
    optimum_gu: Utility
    optimum_allocations: tuple[Allocation, ...]
    visited: int


@dataclass(frozen=True)
class LandscapeCensus:
    """Full survey of an allocation space."""

    total_allocations: int
    optimum_gu: Utility
    optimum_allocations: tuple[Allocation, ...]
    local_optima_count: int
    empirical_lambda: float
    local_optima: tuple[Allocation, ...]


def space_size(scenario: Scenario) -> int:
    return scenario.num_states**scenario.num_sensors


def _check_budget(scenario: Scenario, budget: int) -> int:
    size = space_size(scenario)
    if size > budget:
        raise EnumerationBudgetError(
            f"{scenario.num_states}^{scenario.num_sensors} = {size} allocations "
            f"exceeds the enumeration budget of {budget}"
        )
    return size


def _all_allocations(scenario: Scenario) -> Iterator[Allocation]:
    # lexicographic in canonical state order (sectors ascending, then off)
    return itertools.product(legal_states(scenario), repeat=scenario.num_sensors)


def enumerate_optimum(
    scenario: Scenario, budget: int = DEFAULT_BUDGET
) -> OptimumResult:
    """Exact global optimum by brute force, with every maximizer listed in
    enumeration order. Refuses spaces larger than the budget."""
    _check_budget(scenario, budget)
    best: Utility = None  # type: ignore[assignment]
    maximizers: list[Allocation] = []
    visited = 0
    for allocation in _all_allocations(scenario):
        visited += 1
        gu = global_utility(scenario, allocation)
        if best is None or gu > best:
            best = gu
            maximizers = [allocation]
        elif gu == best:
            maximizers.append(allocation)
    return OptimumResult(best, tuple(maximizers), visited)


def _gu_map(scenario: Scenario) -> dict[Allocation, Utility]:
    return {a: global_utility(scenario, a) for a in _all_allocations(scenario)}


def _strict_optima(
    scenario: Scenario, gus: dict[Allocation, Utility]
) -> list[Allocation]:
    optima = []
    for allocation, gu in gus.items():
        if all(gus[other] < gu for other in neighbors(scenario, allocation)):
            optima.append(allocation)
    return optima


def census(scenario: Scenario, budget: int = DEFAULT_BUDGET) -> LandscapeCensus:
    """Survey the whole space: optimum, maximizers, strict local optima and
    their empirical density."""
    size = _check_budget(scenario, budget)
    gus = _gu_map(scenario)
    optimum = max(gus.values()) if gus else 0
    maximizers = tuple(a for a in _all_allocations(scenario) if gus[a] == optimum)
    optima = _strict_optima(scenario, gus)
    return LandscapeCensus(
        total_allocations=size,
        optimum_gu=optimum,
        optimum_allocations=maximizers,
        local_optima_count=len(optima),
        empirical_lambda=len(optima) / size if size else 0.0,
        local_optima=tuple(optima),
    )


def shortest_distance_to_local_optimum(
    scenario: Scenario, from_allocation: Allocation, budget: int = DEFAULT_BUDGET
) -> Union[int, float]:
    """Hops in the neighbor graph from the given allocation to the nearest
    strict local optimum; math.inf when the space has none."""
    _check_budget(scenario, budget)
    gus = _gu_map(scenario)
    optima = set(_strict_optima(scenario, gus))
    if not optima:
        return math.inf
    if from_allocation in optima:
        return 0
    seen = {from_allocation}
    frontier = deque([(from_allocation, 0)])
    while frontier:
        node, dist = frontier.popleft()
        for other in neighbors(scenario, node):
            if other in seen:
                continue
            if other in optima:
                return dist + 1
            seen.add(other)
            frontier.append((other, dist + 1))
    return math.inf


def max_distance_to_local_optimum(
    scenario: Scenario, budget: int = DEFAULT_BUDGET
) -> Union[int, float]:
    """Largest shortest-distance over all allocations: multi-source breadth
    first search outward from every strict local optimum."""
    size = _check_budget(scenario, budget)
    gus = _gu_map(scenario)
    optima = _strict_optima(scenario, gus)
    if not optima:
        return math.inf if size else 0
    dist = {a: 0 for a in optima}
    frontier = deque(optima)
    farthest = 0
    while frontier:
        node = frontier.popleft()
        d = dist[node]
        for other in neighbors(scenario, node):
            if other not in dist:
                dist[other] = d + 1
                farthest = max(farthest, d + 1)
                frontier.append(other)
    return farthest


def census_report(scenario: Scenario, budget: int = DEFAULT_BUDGET) -> dict:
    """Census plus the worst-case hop distance, as a JSON-ready mapping.
    The distance is null when no strict local optimum exists."""
    result = census(scenario, budget)
    max_bfs = max_distance_to_local_optimum(scenario, budget)
    return {
        "total": result.total_allocations,
        "optimum_gu": result.optimum_gu,
        "optima_count": result.local_optima_count,
        "lambda_empirical": result.empirical_lambda,
        "max_bfs_distance": None if math.isinf(max_bfs) else max_bfs,
    }
