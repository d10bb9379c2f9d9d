"""Tests for the world model: geometry, utilities, scenario I/O."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectorsim.model import (
    OFF,
    Geometry,
    Point,
    Scenario,
    ScenarioFormatError,
    UtilityParams,
    coverage_count,
    default_start,
    global_utility,
    legal_states,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    sees,
    sensor_utility,
    target_utility,
)


def make_scenario(sensors, targets, off_allowed=False, **geom_kwargs):
    return Scenario(
        sensors=tuple(Point(*p) for p in sensors),
        targets=tuple(Point(*p) for p in targets),
        geometry=Geometry(**geom_kwargs),
        off_allowed=off_allowed,
    )


class TestSees:
    def test_in_range_bearing_45_sector_0(self):
        # bearing 45 deg, distance sqrt(2): inside sector 0 = [0, 120)
        sc = make_scenario([(0, 0)], [(1, 1)])
        assert sees(sc, 0, 0, 0) is True

    def test_off_sensor_sees_nothing(self):
        sc = make_scenario([(0, 0)], [(1, 1)], off_allowed=True)
        assert sees(sc, 0, OFF, 0) is False

    def test_beyond_range(self):
        sc = make_scenario([(0, 0)], [(5, 0)])
        assert sees(sc, 0, 0, 0) is False

    def test_bearing_outside_sector(self):
        # target at (0, -1): bearing 270, not in [0, 120)
        sc = make_scenario([(0, 0)], [(0, -1)])
        assert sees(sc, 0, 0, 0) is False
        assert sees(sc, 0, 2, 0) is True

    def test_boundary_bearings_half_open(self):
        # a bearing exactly on a sector's lower edge belongs to that sector
        sc = make_scenario([(0, 0)], [(1, 0)])
        assert sees(sc, 0, 0, 0) and not sees(sc, 0, 2, 0)
        # origin 90: sector 0 = [90, 210), sector 2 = [330, 90); bearing 90
        # is exact in floats, so the half-open rule is exercised directly
        sc2 = make_scenario([(0, 0)], [(0, 1)], sector_origin_deg=90.0)
        assert sees(sc2, 0, 0, 0) and not sees(sc2, 0, 2, 0)

    def test_zero_distance_seen_by_any_sector(self):
        sc = make_scenario([(2, 2)], [(2, 2)], off_allowed=True)
        for state in range(3):
            assert sees(sc, 0, state, 0) is True
        assert sees(sc, 0, OFF, 0) is False

    def test_index_out_of_range(self):
        sc = make_scenario([(0, 0)], [(1, 1)])
        with pytest.raises(IndexError):
            sees(sc, 1, 0, 0)
        with pytest.raises(IndexError):
            sees(sc, 0, 0, 5)

    def test_exactly_at_range_limit_is_seen(self):
        sc = make_scenario([(0, 0)], [(3, 0)])
        assert sees(sc, 0, 0, 0) is True

    @given(
        st.floats(-4, 4, allow_nan=False),
        st.floats(-4, 4, allow_nan=False),
        st.integers(0, 2),
    )
    def test_matches_independent_sector_formula(self, tx, ty, state):
        # cross-check the arc test against a floor-division formulation
        sc = make_scenario([(0, 0)], [(tx, ty)])
        got = sees(sc, 0, state, 0)
        dist = math.hypot(tx, ty)
        if dist > 3:
            assert got is False
        elif tx == 0 and ty == 0:
            assert got is True
        else:
            bearing = math.degrees(math.atan2(ty, tx)) % 360.0
            expected_sector = int(bearing // 120.0) % 3
            assert got is (expected_sector == state)

    @given(
        st.floats(-4, 4, allow_nan=False),
        st.floats(-4, 4, allow_nan=False),
        st.integers(0, 2),
        st.floats(3.0, 10.0, allow_nan=False),
    )
    def test_range_monotonicity(self, tx, ty, state, bigger_range):
        # enlarging view_range never turns a sighting false
        near = make_scenario([(0, 0)], [(tx, ty)], view_range=3.0)
        far = make_scenario([(0, 0)], [(tx, ty)], view_range=bigger_range)
        if sees(near, 0, state, 0):
            assert sees(far, 0, state, 0)


class TestCoverageCount:
    def test_zero_sensors(self):
        sc = make_scenario([], [(1, 1)])
        assert coverage_count(sc, (), 0) == 0

    def test_all_off(self):
        sc = make_scenario([(0, 0), (2, 0)], [(1, 1)], off_allowed=True)
        assert coverage_count(sc, (OFF, OFF), 0) == 0

    def test_two_sensors_facing(self):
        # (0,0) sees (1,1) with sector 0 (bearing 45); (2,0) with sector 1 (bearing 135)
        sc = make_scenario([(0, 0), (2, 0)], [(1, 1)])
        assert coverage_count(sc, (0, 1), 0) == 2
        assert coverage_count(sc, (0, 0), 0) == 1
        assert coverage_count(sc, (1, 0), 0) == 0


class TestUtilities:
    def test_sensor_utility(self):
        p = UtilityParams(k1=1, k2=10)
        assert sensor_utility(p, OFF) == 0
        assert sensor_utility(p, 1) == -1
        assert sensor_utility(UtilityParams(k1=0, k2=10), 2) == 0

    def test_target_utility_branches(self):
        p = UtilityParams(k1=1, k2=10)
        assert target_utility(p, 0) == 0
        assert target_utility(p, 1) == 10
        # two watchers pay exactly the base reward, same as one
        assert target_utility(p, 2) == 10
        assert target_utility(p, 3) == 11
        assert target_utility(p, 7) == 15

    def test_target_utility_rejects_negative(self):
        with pytest.raises(ValueError):
            target_utility(UtilityParams(), -1)

    def test_global_utility_empty_world(self):
        sc = make_scenario([], [])
        assert global_utility(sc, ()) == 0

    def test_global_utility_all_off(self):
        sc = make_scenario([(0, 0), (1, 0)], [(0, 1), (5, 5)], off_allowed=True)
        assert global_utility(sc, (OFF, OFF)) == 0

    def test_global_utility_one_sensor_one_target(self):
        sc = make_scenario([(0, 0)], [(1, 1)])
        assert global_utility(sc, (0,)) == 9

    def test_global_utility_stays_int(self):
        sc = make_scenario([(0, 0), (2, 0)], [(1, 1)])
        gu = global_utility(sc, (0, 1))
        assert isinstance(gu, int)
        assert gu == 10 + 2 - 2 - 2

    def test_length_mismatch_rejected(self):
        sc = make_scenario([(0, 0)], [(1, 1)])
        with pytest.raises(ValueError):
            global_utility(sc, (0, 0))

    def test_off_rejected_when_not_allowed(self):
        sc = make_scenario([(0, 0)], [(1, 1)], off_allowed=False)
        with pytest.raises(ValueError):
            global_utility(sc, (OFF,))


@st.composite
def scenario_and_allocation(draw, max_sensors=4, max_targets=4):
    n_sensors = draw(st.integers(0, max_sensors))
    n_targets = draw(st.integers(0, max_targets))
    coord = st.floats(0, 8, allow_nan=False)
    sensors = [(draw(coord), draw(coord)) for _ in range(n_sensors)]
    targets = [(draw(coord), draw(coord)) for _ in range(n_targets)]
    off = draw(st.booleans())
    sc = make_scenario(sensors, targets, off_allowed=off)
    states = legal_states(sc)
    alloc = tuple(draw(st.sampled_from(states)) for _ in range(n_sensors))
    return sc, alloc


class TestGlobalUtilityProperties:
    @given(scenario_and_allocation())
    def test_purity(self, pair):
        sc, alloc = pair
        assert global_utility(sc, alloc) == global_utility(sc, alloc)

    @given(scenario_and_allocation())
    @settings(max_examples=60)
    def test_decomposition(self, pair):
        # per-agent accumulation equals the one-shot evaluation
        sc, alloc = pair
        total = sum(
            target_utility(sc.utility, coverage_count(sc, alloc, c))
            for c in range(sc.num_targets)
        ) + sum(sensor_utility(sc.utility, s) for s in alloc)
        assert global_utility(sc, alloc) == total

    @given(scenario_and_allocation())
    @settings(max_examples=60)
    def test_single_change_recompute_consistency(self, pair):
        # flipping one sensor and recomputing matches evaluating the new tuple
        sc, alloc = pair
        if sc.num_sensors == 0:
            return
        states = legal_states(sc)
        for new_state in states:
            changed = (new_state,) + alloc[1:]
            assert global_utility(sc, changed) == global_utility(sc, changed)

    @given(st.integers(1, 5), st.booleans())
    def test_no_targets_costs_only(self, n, use_off):
        sc = make_scenario([(float(i), 0.0) for i in range(n)], [], off_allowed=True)
        alloc = tuple(OFF if use_off else 0 for _ in range(n))
        expected = 0 if use_off else -sc.utility.k1 * n
        assert global_utility(sc, alloc) == expected


class TestScenarioBasics:
    def test_legal_states_order(self):
        sc = make_scenario([(0, 0)], [], off_allowed=True)
        assert legal_states(sc) == (0, 1, 2, OFF)
        sc2 = make_scenario([(0, 0)], [], off_allowed=False)
        assert legal_states(sc2) == (0, 1, 2)

    def test_default_start(self):
        sc = make_scenario([(0, 0), (1, 1)], [], off_allowed=True)
        assert default_start(sc) == (OFF, OFF)
        sc2 = make_scenario([(0, 0), (1, 1)], [], off_allowed=False)
        assert default_start(sc2) == (0, 0)

    def test_num_states(self):
        assert make_scenario([], [], off_allowed=True).num_states == 4
        assert make_scenario([], [], off_allowed=False).num_states == 3

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            Geometry(view_angle_deg=0)
        with pytest.raises(ValueError):
            Geometry(view_range=-1)
        with pytest.raises(ValueError):
            Geometry(num_sectors=0)

    def test_point_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Point(float("nan"), 0)
        with pytest.raises(ValueError):
            Point(0, float("inf"))


class TestScenarioIO:
    DOC = {
        "sensors": [{"x": 0.0, "y": 0.0}, {"x": 2.0, "y": 0.0}],
        "targets": [{"x": 1.0, "y": 1.0}],
        "geometry": {
            "view_angle_deg": 120.0,
            "view_range": 3.0,
            "num_sectors": 3,
            "sector_origin_deg": 0.0,
        },
        "utility": {"k1": 1, "k2": 10},
        "off_allowed": False,
    }

    def test_round_trip(self, tmp_path):
        sc = scenario_from_dict(self.DOC)
        path = tmp_path / "world.json"
        save_scenario(sc, str(path))
        assert load_scenario(str(path)) == sc
        assert scenario_from_dict(scenario_to_dict(sc)) == sc

    def test_defaults_fill_in(self):
        sc = scenario_from_dict({"sensors": [], "targets": []})
        assert sc.geometry == Geometry()
        assert sc.utility == UtilityParams()
        assert sc.off_allowed is False

    def test_unknown_top_key_rejected(self):
        doc = dict(self.DOC)
        doc["extra"] = 1
        with pytest.raises(ScenarioFormatError, match="extra"):
            scenario_from_dict(doc)

    def test_unknown_nested_key_rejected(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["geometry"]["fov"] = 90
        with pytest.raises(ScenarioFormatError, match="fov"):
            scenario_from_dict(doc)
        doc2 = json.loads(json.dumps(self.DOC))
        doc2["sensors"][0]["z"] = 0
        with pytest.raises(ScenarioFormatError, match="z"):
            scenario_from_dict(doc2)

    def test_missing_required_key(self):
        with pytest.raises(ScenarioFormatError, match="targets"):
            scenario_from_dict({"sensors": []})

    def test_syntax_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "sensors": [,]\n}\n')
        with pytest.raises(ScenarioFormatError, match=r"bad\.json:2:"):
            load_scenario(str(path))

    def test_wrong_types_rejected(self):
        with pytest.raises(ScenarioFormatError):
            scenario_from_dict({"sensors": "nope", "targets": []})
        with pytest.raises(ScenarioFormatError):
            scenario_from_dict({"sensors": [], "targets": [], "off_allowed": "yes"})
        with pytest.raises(ScenarioFormatError):
            scenario_from_dict({"sensors": [], "targets": [], "utility": {"k1": True}})
