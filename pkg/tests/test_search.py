"""Tests for neighborhoods and the two hill climbers."""

import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectorsim.model import (
    OFF,
    Geometry,
    Point,
    Scenario,
    UtilityParams,
    coverage_count,
    global_utility,
    legal_states,
    load_scenario,
    target_utility,
)
from sectorsim.search import (
    NeighborMove,
    apply_move,
    global_hill_climb,
    individual_hill_climb_run,
    individual_hill_climb_step,
    is_local_optimum,
    neighbor_moves,
    neighbors,
)

DATA_DIR = Path(__file__).parent / "data"


def make_scenario(sensors, targets, off_allowed=False, k1=1, k2=10):
    return Scenario(
        sensors=tuple(Point(*p) for p in sensors),
        targets=tuple(Point(*p) for p in targets),
        utility=UtilityParams(k1=k1, k2=k2),
        off_allowed=off_allowed,
    )


def all_allocations(scenario):
    return itertools.product(legal_states(scenario), repeat=scenario.num_sensors)


class TestNeighbors:
    def test_single_sensor_with_off(self):
        sc = make_scenario([(0, 0)], [], off_allowed=True)
        assert len(neighbors(sc, (0,))) == 3

    def test_seven_sensors_no_off(self):
        sc = make_scenario([(float(i), 0.0) for i in range(7)], [])
        assert len(neighbors(sc, (0,) * 7)) == 14

    def test_no_sensors(self):
        sc = make_scenario([], [])
        assert neighbors(sc, ()) == []

    def test_each_neighbor_differs_in_exactly_one_slot(self):
        sc = make_scenario([(0, 0), (1, 0)], [], off_allowed=True)
        alloc = (0, 2)
        for other in neighbors(sc, alloc):
            diffs = sum(1 for a, b in zip(alloc, other) if a != b)
            assert diffs == 1

    @given(
        st.integers(0, 4),
        st.booleans(),
        st.integers(1, 4),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=80)
    def test_count_formula_and_symmetry(self, n, off, sectors, rnd):
        sc = Scenario(
            sensors=tuple(Point(float(i), 0.0) for i in range(n)),
            targets=(),
            geometry=Geometry(num_sectors=sectors),
            off_allowed=off,
        )
        states = legal_states(sc)
        alloc = tuple(rnd.choice(states) for _ in range(n))
        nbrs = neighbors(sc, alloc)
        m = len(states)
        assert len(nbrs) == (m - 1) * n
        assert len(set(nbrs)) == len(nbrs)
        for other in nbrs:
            assert alloc in neighbors(sc, other)


class TestIsLocalOptimum:
    def test_single_sensor_single_target(self):
        sc = make_scenario([(0, 0)], [(1, 1)], off_allowed=True)
        # enumerate all 4 allocations: GU is 9 for (0,) and 0 / -1 elsewhere
        gus = {a: global_utility(sc, a) for a in all_allocations(sc)}
        assert gus[(0,)] == 9 and max(gus.values()) == 9
        assert is_local_optimum(sc, (0,))
        for alloc in gus:
            if alloc != (0,):
                assert not is_local_optimum(sc, alloc)

    def test_tie_disqualifies(self):
        # no targets and off not allowed: every allocation has GU -k1
        sc = make_scenario([(0, 0)], [])
        for alloc in all_allocations(sc):
            assert not is_local_optimum(sc, alloc)

    def test_no_sensors_vacuously_true(self):
        sc = make_scenario([], [(1, 1)])
        assert is_local_optimum(sc, ())


class TestIndividualStep:
    def test_no_sensor_in_range_unchanged(self):
        sc = make_scenario([(0, 0)], [(9, 9)], off_allowed=True)
        for seed in range(5):
            assert individual_hill_climb_step(sc, (OFF,), 0, seed) == (OFF,)

    def test_sensor_turned_to_face_target(self):
        # lone sensor faces away; the step must aim it at the target's sector
        sc = make_scenario([(0, 0)], [(1, 1)])
        assert individual_hill_climb_step(sc, (1,), 0, 0) == (0,)

    def test_already_facing_unchanged(self):
        sc = make_scenario([(0, 0)], [(1, 1)])
        assert individual_hill_climb_step(sc, (0,), 0, 0) == (0,)

    def test_can_decrease_global_utility(self):
        # the acting target grabs a third watcher whose turn abandons a
        # solo-covered target: its own utility rises 10 -> 11 while global
        # utility falls 17 -> 8
        sc = load_scenario(str(DATA_DIR / "gu_decrease.json"))
        start = (0, 1, 2)
        assert global_utility(sc, start) == 17
        stepped = individual_hill_climb_step(sc, start, 0, 0)
        assert stepped == (0, 1, 0)
        assert global_utility(sc, stepped) == 8
        u_before = target_utility(sc.utility, coverage_count(sc, start, 0))
        u_after = target_utility(sc.utility, coverage_count(sc, stepped, 0))
        assert u_after > u_before

    @given(st.integers(0, 3), st.integers(0, 2**31))
    @settings(max_examples=60)
    def test_never_hurts_acting_consumer(self, layout, seed):
        rnd = np.random.default_rng(layout)
        sc = make_scenario(
            [tuple(rnd.uniform(0, 6, 2)) for _ in range(3)],
            [tuple(rnd.uniform(0, 6, 2)) for _ in range(2)],
            off_allowed=True,
        )
        states = legal_states(sc)
        alloc = tuple(states[i] for i in rnd.integers(len(states), size=3))
        consumer = int(rnd.integers(2))
        before = target_utility(sc.utility, coverage_count(sc, alloc, consumer))
        stepped = individual_hill_climb_step(sc, alloc, consumer, seed)
        after = target_utility(sc.utility, coverage_count(sc, stepped, consumer))
        assert after >= before

    def test_deterministic_given_seed(self):
        sc = load_scenario(str(DATA_DIR / "gu_decrease.json"))
        a = individual_hill_climb_step(sc, (0, 1, 2), 0, 7)
        b = individual_hill_climb_step(sc, (0, 1, 2), 0, 7)
        assert a == b


def random_small_scenario(seed, max_sensors=3, off_allowed=True):
    rnd = np.random.default_rng(seed)
    n_sensors = int(rnd.integers(1, max_sensors + 1))
    n_targets = int(rnd.integers(0, 4))
    return make_scenario(
        [tuple(rnd.uniform(0, 7, 2)) for _ in range(n_sensors)],
        [tuple(rnd.uniform(0, 7, 2)) for _ in range(n_targets)],
        off_allowed=off_allowed,
    )


class TestGlobalHillClimb:
    def test_start_at_local_optimum(self):
        sc = make_scenario([(0, 0)], [(1, 1)], off_allowed=True)
        out = global_hill_climb(sc, (0,), rng_seed=1)
        assert out.steps == 0
        assert out.final_allocation == (0,)
        assert out.gu_trace == (9,)
        assert out.converged

    def test_no_targets_converges_to_all_off(self):
        sc = make_scenario([(0, 0), (3, 0), (0, 3)], [], off_allowed=True)
        # all-off is the unique optimum: verify by full enumeration
        best = max(all_allocations(sc), key=lambda a: global_utility(sc, a))
        assert best == (OFF, OFF, OFF)
        for seed, start in enumerate([(0, 1, 2), (2, 2, 2), (OFF, 0, OFF)]):
            out = global_hill_climb(sc, start, rng_seed=seed)
            assert out.final_allocation == (OFF, OFF, OFF)
            assert out.gu_trace[-1] == 0

    def test_single_sensor_faces_target(self):
        sc = make_scenario([(0, 0)], [(1, 1)], off_allowed=True)
        out = global_hill_climb(sc, (OFF,), rng_seed=3)
        assert out.final_allocation == (0,)

    def test_trace_strictly_increasing_and_bounded(self):
        for seed in range(30):
            sc = random_small_scenario(seed)
            out = global_hill_climb(sc, rng_seed=seed)
            for a, b in zip(out.gu_trace, out.gu_trace[1:]):
                assert b > a
            assert out.steps == len(out.gu_trace) - 1
            assert out.steps < sc.num_states**sc.num_sensors
            assert out.converged

    def test_fixpoint_has_no_improving_neighbor(self):
        for seed in range(30):
            sc = random_small_scenario(seed)
            out = global_hill_climb(sc, rng_seed=seed)
            final_gu = global_utility(sc, out.final_allocation)
            assert final_gu == out.gu_trace[-1]
            for other in neighbors(sc, out.final_allocation):
                assert global_utility(sc, other) <= final_gu

    def test_moves_back_to_start_state_reachable(self):
        # the scan must include moves returning a sensor to its start state:
        # from (1,) the climb must find (0,) even though 0 was never left
        sc = make_scenario([(0, 0)], [(1, 1)])
        out = global_hill_climb(sc, (1,), rng_seed=0)
        assert out.final_allocation == (0,)

    def test_deterministic_given_seed(self):
        sc = random_small_scenario(42)
        a = global_hill_climb(sc, rng_seed=11)
        b = global_hill_climb(sc, rng_seed=11)
        assert a == b


class TestIndividualRun:
    def test_empty_worlds_converge_immediately(self):
        sc = make_scenario([(0, 0)], [], off_allowed=True)
        out = individual_hill_climb_run(sc, rng_seed=0)
        assert out.converged and out.steps == 0
        sc2 = make_scenario([], [(0, 0)])
        out2 = individual_hill_climb_run(sc2, rng_seed=0)
        assert out2.converged and out2.steps == 0

    def test_lone_pair_converges_to_facing(self):
        sc = make_scenario([(0, 0)], [(1, 1)])
        out = individual_hill_climb_run(sc, start=(1,), rng_seed=5)
        assert out.final_allocation == (0,)
        assert out.converged

    def test_trace_length_matches_steps(self):
        for seed in range(10):
            sc = random_small_scenario(seed, off_allowed=False)
            out = individual_hill_climb_run(sc, rng_seed=seed, max_steps=40)
            assert len(out.gu_trace) == out.steps + 1


class TestMoveAlgebra:
    def test_apply_move(self):
        assert apply_move((0, 1, 2), NeighborMove(1, OFF)) == (0, OFF, 2)

    def test_neighbor_moves_exclude_current(self):
        sc = make_scenario([(0, 0)], [], off_allowed=True)
        moves = neighbor_moves(sc, (2,))
        assert NeighborMove(0, 2) not in moves
        assert len(moves) == 3
