"""Distributed bidding protocol between targets and sensors.

Each round, every target sends a bid to its k nearest sensors asking them
to turn to the sector that would face it; every sensor then adopts the
sector with the highest aggregate demand among the bids it received, all
simultaneously. Rounds are synchronous; message loss is modeled by an
independent per-bid drop probability, which stands in for sensors deciding
before every bid has arrived. The run stops once no sensor has changed
state for a configured number of consecutive rounds, or at the round cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .model import (
    OFF,
    Allocation,
    Scenario,
    SensorState,
    Utility,
    global_utility,
    sees,
    target_utility,
    validate_allocation,
)
from .search import Seed, _as_generator

FIXED = "fixed"
MARGINAL = "marginal"


@dataclass(frozen=True)
class BidMessage:
    """One target's request that one sensor turn to one sector."""

    target_index: int
    sensor_index: int
    sector: SensorState
    amount: Utility

    def __post_init__(self) -> None:
        if self.sector == OFF or self.sector < 0:
            raise ValueError("bids name a sector, never the off state")
        if self.amount < 0:
            raise ValueError("bid amount must be non-negative")


@dataclass(frozen=True)
class BidPolicy:
    """How targets price their bids and how many sensors they talk to.

    ``fixed`` mode bids ``amount`` unconditionally; ``marginal`` mode bids
    the utility the target would gain if the sensor turned, computed from
    the target's partial view of the world (only its chosen neighbors'
    states are known; everyone else is assumed off).
    """

    mode: str = FIXED
    neighbor_count: int = 1
    amount: Utility = 1

    def __post_init__(self) -> None:
        if self.mode not in (FIXED, MARGINAL):
            raise ValueError(f"unknown bid mode {self.mode!r}")
        if self.neighbor_count < 1:
            raise ValueError("neighbor_count must be at least 1")
        if self.amount < 0:
            raise ValueError("fixed bid amount must be non-negative")


@dataclass(frozen=True)
class RoundConfig:
    max_rounds: int = 50
    quiescence_rounds: int = 3
    miss_probability: float = 0.0

    def __post_init__(self) -> None:
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if not 1 <= self.quiescence_rounds <= self.max_rounds:
            raise ValueError("need 1 <= quiescence_rounds <= max_rounds")
        if not 0.0 <= self.miss_probability <= 1.0:
            raise ValueError("miss_probability must be in [0, 1]")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    allocation: Allocation
    gu: Utility
    alpha: Optional[float]


@dataclass(frozen=True)
class RunTrace:
    """Round-by-round history of one protocol execution. Record 0 is the
    state before any bidding; one record follows per executed round."""

    records: tuple[RoundRecord, ...]
    converged: bool
    rounds_executed: int

    @property
    def final_allocation(self) -> Allocation:
        return self.records[-1].allocation

    @property
    def final_gu(self) -> Utility:
        return self.records[-1].gu

    @property
    def final_alpha(self) -> Optional[float]:
        return self.records[-1].alpha


def select_neighbors(scenario: Scenario, target_index: int, k: int) -> list[int]:
    """The k sensors nearest to the target, sorted by (distance, index)."""
    if not 0 <= target_index < scenario.num_targets:
        raise IndexError(f"target index {target_index} out of range")
    if not 1 <= k <= scenario.num_sensors:
        raise ValueError(
            f"neighbor count {k} outside [1, {scenario.num_sensors}]"
        )
    t = scenario.targets[target_index]
    ranked = sorted(
        range(scenario.num_sensors),
        key=lambda s: (
            math.hypot(scenario.sensors[s].x - t.x, scenario.sensors[s].y - t.y),
            s,
        ),
    )
    return ranked[:k]


def desired_sector(
    scenario: Scenario, sensor_index: int, target_index: int
) -> Optional[SensorState]:
    """The sector this sensor would need to face the target, or None when
    the target is out of range. A target at zero distance is faced by every
    sector; the lowest wins so the request is well defined."""
    for sector in range(scenario.geometry.num_sectors):
        if sees(scenario, sensor_index, sector, target_index):
            return sector
    return None


def _view_coverage(
    scenario: Scenario, view: Mapping[int, SensorState], target_index: int
) -> int:
    count = 0
    for sensor_index, state in view.items():
        if state != OFF and sees(scenario, sensor_index, state, target_index):
            count += 1
    return count


def compute_bid(
    scenario: Scenario,
    allocation_view: Mapping[int, SensorState],
    policy: BidPolicy,
    target_index: int,
    sensor_index: int,
) -> Optional[BidMessage]:
    """The bid one target sends one sensor, or None when no sector of that
    sensor can face the target.

    The view maps sensor index to state for the sensors the target knows
    about; in marginal mode the amount is the target's own utility gain if
    the addressee turned to the desired sector, with everyone outside the
    view treated as off, floored at zero.
    """
    sector = desired_sector(scenario, sensor_index, target_index)
    if sector is None:
        return None
    if policy.mode == FIXED:
        amount = policy.amount
    else:
        known = target_utility(
            scenario.utility, _view_coverage(scenario, allocation_view, target_index)
        )
        turned = dict(allocation_view)
        turned[sensor_index] = sector
        would_be = target_utility(
            scenario.utility, _view_coverage(scenario, turned, target_index)
        )
        amount = max(0, would_be - known)
    return BidMessage(
        target_index=target_index,
        sensor_index=sensor_index,
        sector=sector,
        amount=amount,
    )


def sensor_decide(
    current: SensorState, received: Sequence[BidMessage]
) -> SensorState:
    """Adopt the sector with the highest aggregate bid amount; keep the
    current state when no bids arrived; break ties to the lowest sector."""
    if not received:
        return current
    totals: dict[SensorState, Utility] = {}
    for bid in received:
        totals[bid.sector] = totals.get(bid.sector, 0) + bid.amount
    return min(totals, key=lambda sector: (-totals[sector], sector))


def _round_bids(
    scenario: Scenario,
    allocation: Allocation,
    policy: BidPolicy,
    neighbor_sets: Sequence[Sequence[int]],
) -> list[BidMessage]:
    """All bids of one round in canonical order: targets ascending, each
    target's addressees in (distance, index) order."""
    bids = []
    for target_index, neighbor_set in enumerate(neighbor_sets):
        view = {s: allocation[s] for s in neighbor_set}
        for sensor_index in neighbor_set:
            bid = compute_bid(scenario, view, policy, target_index, sensor_index)
            if bid is not None:
                bids.append(bid)
    return bids


def run_protocol(
    scenario: Scenario,
    start: Allocation,
    policy: BidPolicy,
    config: RoundConfig = RoundConfig(),
    rng_seed: Seed = 0,
    optimum_gu: Optional[Utility] = None,
) -> RunTrace:
    """Execute synchronous bidding rounds until quiescence or the cap.

    Per round: every target bids to its k nearest sensors, each bid is
    independently lost with miss_probability, and all sensors decide
    simultaneously. Alpha is recorded per round when a positive optimum is
    supplied, else left None.
    """
    validate_allocation(scenario, start)
    rng = _as_generator(rng_seed)
    neighbor_sets = [
        select_neighbors(scenario, t, policy.neighbor_count)
        for t in range(scenario.num_targets)
    ]

    def record(round_index: int, allocation: Allocation) -> RoundRecord:
        gu = global_utility(scenario, allocation)
        alpha = None
        if optimum_gu is not None and optimum_gu > 0:
            alpha = gu / optimum_gu
        return RoundRecord(round_index, allocation, gu, alpha)

    current = start
    records = [record(0, current)]
    quiet_streak = 0
    converged = False
    rounds_executed = 0
    fixed_bids = None
    if policy.mode == FIXED:
        # fixed bids ignore sensor states, so one computation serves all rounds
        fixed_bids = _round_bids(scenario, current, policy, neighbor_sets)

    for round_index in range(1, config.max_rounds + 1):
        bids = (
            fixed_bids
            if fixed_bids is not None
            else _round_bids(scenario, current, policy, neighbor_sets)
        )
        if config.miss_probability > 0.0:
            delivered = [
                b for b in bids if rng.random() >= config.miss_probability
            ]
        else:
            delivered = bids
        inboxes: dict[int, list[BidMessage]] = {}
        for bid in delivered:
            inboxes.setdefault(bid.sensor_index, []).append(bid)
        updated = tuple(
            sensor_decide(state, inboxes.get(s, ()))
            for s, state in enumerate(current)
        )
        rounds_executed = round_index
        quiet_streak = quiet_streak + 1 if updated == current else 0
        current = updated
        records.append(record(round_index, current))
        if quiet_streak >= config.quiescence_rounds:
            converged = True
            break

    return RunTrace(
        records=tuple(records),
        converged=converged,
        rounds_executed=rounds_executed,
    )


def gu_decrease_fraction(trace: RunTrace) -> float:
    """Fraction of executed rounds whose utility fell below the previous
    round's. Zero for a trace with no executed rounds."""
    if trace.rounds_executed == 0:
        return 0.0
    drops = sum(
        1
        for before, after in zip(trace.records, trace.records[1:])
        if after.gu < before.gu
    )
    return drops / trace.rounds_executed
