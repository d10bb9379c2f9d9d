"""Neighborhood structure and hill-climbing searches over allocations.

Two climbers operate on the same single-sensor-change neighborhood. The
global climber accepts any move that strictly raises global utility and is
guaranteed to terminate. The individual step optimizes one target's own
utility through one randomly chosen sensor; it can lower global utility,
which is the pathology the bidding protocol is meant to avoid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .model import (
    Allocation,
    Scenario,
    SensorState,
    Utility,
    coverage_count,
    default_start,
    global_utility,
    legal_states,
    target_utility,
    validate_allocation,
)

Seed = Union[int, np.random.Generator, np.random.SeedSequence]


def _as_generator(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class NeighborMove:
    """A single-sensor state change."""

    sensor_index: int
    new_state: SensorState


@dataclass(frozen=True)
class SearchOutcome:
    """Result of a hill-climbing run.

    ``gu_trace`` holds the global utility before any step and after each
    accepted (state-changing) step, so its length is ``steps + 1``.
    """

    final_allocation: Allocation
    gu_trace: tuple[Utility, ...]
    steps: int
    converged: bool


def apply_move(allocation: Allocation, move: NeighborMove) -> Allocation:
    return (
        allocation[: move.sensor_index]
        + (move.new_state,)
        + allocation[move.sensor_index + 1 :]
    )


def neighbor_moves(scenario: Scenario, allocation: Allocation) -> list[NeighborMove]:
    """All single-sensor changes, ordered by sensor index then state."""
    validate_allocation(scenario, allocation)
    states = legal_states(scenario)
    return [
        NeighborMove(s, state)
        for s in range(scenario.num_sensors)
        for state in states
        if state != allocation[s]
    ]


def neighbors(scenario: Scenario, allocation: Allocation) -> list[Allocation]:
    """All allocations differing from this one in exactly one sensor."""
    return [apply_move(allocation, m) for m in neighbor_moves(scenario, allocation)]


def is_local_optimum(scenario: Scenario, allocation: Allocation) -> bool:
    """Strictly better than every neighbor. Vacuously true with no sensors;
    an equal-utility neighbor disqualifies."""
    gu = global_utility(scenario, allocation)
    return all(
        global_utility(scenario, other) < gu
        for other in neighbors(scenario, allocation)
    )


def _consumer_utility(
    scenario: Scenario, allocation: Allocation, consumer_index: int
) -> Utility:
    f = coverage_count(scenario, allocation, consumer_index)
    return target_utility(scenario.utility, f)


def individual_hill_climb_step(
    scenario: Scenario,
    allocation: Allocation,
    consumer_index: int,
    rng_seed: Seed,
) -> Allocation:
    """One acting target redirects one random sensor for its own benefit.

    Picks a sensor uniformly at random; if any of that sensor's states
    strictly raises the target's own utility, sets the sensor to the
    maximizing state (ties to the lowest state in canonical order) and
    returns the new allocation. Otherwise the allocation is unchanged.
    """
    validate_allocation(scenario, allocation)
    if not 0 <= consumer_index < scenario.num_targets:
        raise IndexError(f"target index {consumer_index} out of range")
    if scenario.num_sensors == 0:
        return allocation
    rng = _as_generator(rng_seed)
    sensor = int(rng.integers(scenario.num_sensors))

    best_utility = _consumer_utility(scenario, allocation, consumer_index)
    best: Optional[Allocation] = None
    for state in legal_states(scenario):
        if state == allocation[sensor]:
            continue
        candidate = apply_move(allocation, NeighborMove(sensor, state))
        utility = _consumer_utility(scenario, candidate, consumer_index)
        if utility > best_utility:
            best_utility = utility
            best = candidate
    return allocation if best is None else best


def global_hill_climb(
    scenario: Scenario,
    start: Optional[Allocation] = None,
    rng_seed: Seed = 0,
) -> SearchOutcome:
    """First-improvement climb on global utility.

    Scans single-sensor moves in a freshly shuffled order each pass and
    accepts the first strict improvement. Stops when a full pass finds
    none. Strict increase over a finite space guarantees termination.
    """
    if start is None:
        start = default_start(scenario)
    validate_allocation(scenario, start)
    rng = _as_generator(rng_seed)

    current = start
    gu = global_utility(scenario, current)
    trace = [gu]
    # full (sensor, state) grid; moves landing on the current state are
    # skipped per pass, so every neighborhood stays reachable as it shifts
    moves = [
        NeighborMove(s, state)
        for s in range(scenario.num_sensors)
        for state in legal_states(scenario)
    ]
    while True:
        improved = False
        for idx in rng.permutation(len(moves)):
            move = moves[idx]
            if move.new_state == current[move.sensor_index]:
                continue
            candidate = apply_move(current, move)
            candidate_gu = global_utility(scenario, candidate)
            if candidate_gu > gu:
                current, gu = candidate, candidate_gu
                trace.append(gu)
                improved = True
                break
        if not improved:
            break
    return SearchOutcome(
        final_allocation=current,
        gu_trace=tuple(trace),
        steps=len(trace) - 1,
        converged=True,
    )


def _any_consumer_can_improve(scenario: Scenario, allocation: Allocation) -> bool:
    for c in range(scenario.num_targets):
        base = _consumer_utility(scenario, allocation, c)
        for move in neighbor_moves(scenario, allocation):
            candidate = apply_move(allocation, move)
            if _consumer_utility(scenario, candidate, c) > base:
                return True
    return False


def individual_hill_climb_run(
    scenario: Scenario,
    start: Optional[Allocation] = None,
    rng_seed: Seed = 0,
    max_steps: int = 100,
) -> SearchOutcome:
    """Drive repeated individual steps with random acting targets.

    Each step draws a target uniformly, then applies
    individual_hill_climb_step with a sensor drawn from the same stream.
    Stops early once no (target, sensor, state) change can raise any
    target's own utility; otherwise runs max_steps draws. The trace
    records utility after each state-changing step and may decrease.
    """
    if start is None:
        start = default_start(scenario)
    validate_allocation(scenario, start)
    rng = _as_generator(rng_seed)

    current = start
    trace = [global_utility(scenario, current)]
    converged = False
    if scenario.num_targets == 0 or scenario.num_sensors == 0:
        return SearchOutcome(current, tuple(trace), 0, True)
    for _ in range(max_steps):
        consumer = int(rng.integers(scenario.num_targets))
        updated = individual_hill_climb_step(scenario, current, consumer, rng)
        if updated != current:
            current = updated
            trace.append(global_utility(scenario, current))
        elif not _any_consumer_can_improve(scenario, current):
            converged = True
            break
    return SearchOutcome(current, tuple(trace), len(trace) - 1, converged)
