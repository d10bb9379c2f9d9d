"""World model for the sensor-sector allocation problem.

Sensors sit at fixed positions and can aim their view cone at one of
``num_sectors`` angular sectors (or be switched off, when allowed). Targets
are stationary points. A sensor that is on pays a running cost ``k1``; a
target pays out ``k2`` once at least one sensor sees it, plus one extra
utility unit per sensor beyond the second. The global utility of an
allocation is the sum of all sensor and target utilities.

Everything here is pure and immutable; ``Scenario`` is hashable so derived
geometry tables can be cached.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Union

Utility = Union[int, float]
SensorState = int
Allocation = tuple[SensorState, ...]

#: State value meaning "switched off". Sectors are numbered 0..num_sectors-1;
#: for ordering purposes (tie-breaks, enumeration) OFF sorts after all sectors.
OFF: SensorState = -1

#: Internal facing-table marker: target sits exactly on the sensor, so every
#: sector sees it.
_ANY_SECTOR: int = -2


class ScenarioFormatError(ValueError):
    """Raised when a scenario document violates the JSON schema."""


@dataclass(frozen=True)
class Point:
    """A position in the plane, in abstract length units."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Geometry:
    """View-cone geometry shared by every sensor.

    Sector ``s`` covers bearings in the half-open arc
    ``[sector_origin_deg + s * view_angle_deg, sector_origin_deg + (s+1) * view_angle_deg)``
    measured counter-clockwise from the positive x axis, modulo 360.
    """

    view_angle_deg: float = 120.0
    view_range: float = 3.0
    num_sectors: int = 3
    sector_origin_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.view_angle_deg <= 0:
            raise ValueError("view_angle_deg must be positive")
        if self.view_range <= 0:
            raise ValueError("view_range must be positive")
        if self.num_sectors < 1:
            raise ValueError("num_sectors must be at least 1")


@dataclass(frozen=True)
class UtilityParams:
    """Utility constants: k1 is the per-sensor running cost, k2 the base
    detection reward. Integer values keep all utilities exact."""

    k1: Utility = 1
    k2: Utility = 10

    def __post_init__(self) -> None:
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("utility constants must be non-negative")


@dataclass(frozen=True)
class Scenario:
    """Immutable world description: positions, geometry, utility constants.

    Sensor and target list indices are stable identifiers. ``off_allowed``
    controls whether OFF is part of each sensor's state domain.
    """

    sensors: tuple[Point, ...]
    targets: tuple[Point, ...]
    geometry: Geometry = Geometry()
    utility: UtilityParams = UtilityParams()
    off_allowed: bool = False

    @property
    def num_sensors(self) -> int:
        return len(self.sensors)

    @property
    def num_targets(self) -> int:
        return len(self.targets)

    @property
    def num_states(self) -> int:
        """Number of legal states per sensor."""
        return self.geometry.num_sectors + (1 if self.off_allowed else 0)


def legal_states(scenario: Scenario) -> tuple[SensorState, ...]:
    """All states a sensor may take, in canonical order (sectors ascending,
    then OFF). This order defines tie-breaking and enumeration order."""
    states = tuple(range(scenario.geometry.num_sectors))
    if scenario.off_allowed:
        states += (OFF,)
    return states


def default_start(scenario: Scenario) -> Allocation:
    """Canonical initial allocation: all off when allowed, else all sector 0."""
    state = OFF if scenario.off_allowed else 0
    return (state,) * scenario.num_sensors


def validate_allocation(scenario: Scenario, allocation: Allocation) -> None:
    if len(allocation) != scenario.num_sensors:
        raise ValueError(
            f"allocation has {len(allocation)} states for {scenario.num_sensors} sensors"
        )
    for state in allocation:
        if state == OFF:
            if not scenario.off_allowed:
                raise ValueError("off state not allowed in this scenario")
        elif not 0 <= state < scenario.geometry.num_sectors:
            raise ValueError(f"invalid sensor state {state}")


def _check_index(index: int, count: int, kind: str) -> None:
    if not 0 <= index < count:
        raise IndexError(f"{kind} index {index} out of range [0, {count})")


def sees(
    scenario: Scenario, sensor_index: int, state: SensorState, target_index: int
) -> bool:
    """Whether a sensor in the given state sees the target.

    True iff the sensor is not off, the target is within view_range, and the
    bearing from sensor to target falls in the state's sector arc. A target
    at zero distance has no bearing and counts as seen by any non-off state.
    """
    _check_index(sensor_index, scenario.num_sensors, "sensor")
    _check_index(target_index, scenario.num_targets, "target")
    if state == OFF:
        return False
    geom = scenario.geometry
    if not 0 <= state < geom.num_sectors:
        raise ValueError(f"invalid sensor state {state}")
    sensor = scenario.sensors[sensor_index]
    target = scenario.targets[target_index]
    dx = target.x - sensor.x
    dy = target.y - sensor.y
    if math.hypot(dx, dy) > geom.view_range:
        return False
    if dx == 0.0 and dy == 0.0:
        return True
    bearing = math.degrees(math.atan2(dy, dx)) % 360.0
    arc_start = (geom.sector_origin_deg + state * geom.view_angle_deg) % 360.0
    return (bearing - arc_start) % 360.0 < geom.view_angle_deg


@lru_cache(maxsize=256)
def _facing_table(scenario: Scenario) -> tuple[tuple[int, ...], ...]:
    """Per (sensor, target): the sector that sees the target, _ANY_SECTOR for
    a zero-distance pair, or -3 when no sector sees it. Derived from sees()."""
    table = []
    for s in range(scenario.num_sensors):
        row = []
        for c in range(scenario.num_targets):
            sp = scenario.sensors[s]
            tp = scenario.targets[c]
            if tp.x == sp.x and tp.y == sp.y:
                row.append(_ANY_SECTOR)
                continue
            facing = -3
            for sector in range(scenario.geometry.num_sectors):
                if sees(scenario, s, sector, c):
                    facing = sector
                    break
            row.append(facing)
        table.append(tuple(row))
    return tuple(table)


def coverage_count(
    scenario: Scenario, allocation: Allocation, target_index: int
) -> int:
    """Number of sensors that see the target under the allocation."""
    _check_index(target_index, scenario.num_targets, "target")
    validate_allocation(scenario, allocation)
    table = _facing_table(scenario)
    count = 0
    for s, state in enumerate(allocation):
        if state == OFF:
            continue
        facing = table[s][target_index]
        if facing == state or facing == _ANY_SECTOR:
            count += 1
    return count


def sensor_utility(params: UtilityParams, state: SensorState) -> Utility:
    """A running sensor pays k1; an off sensor pays nothing."""
    return 0 if state == OFF else -params.k1


def target_utility(params: UtilityParams, f: int) -> Utility:
    """Utility of a target seen by ``f`` sensors: 0 unseen, k2 when seen,
    plus one unit per sensor beyond the second."""
    if f < 0:
        raise ValueError("coverage count must be non-negative")
    if f == 0:
        return 0
    if f == 1:
        return params.k2
    return params.k2 + f - 2


def global_utility(scenario: Scenario, allocation: Allocation) -> Utility:
    """Sum of every agent's utility under the allocation."""
    validate_allocation(scenario, allocation)
    table = _facing_table(scenario)
    params = scenario.utility
    total: Utility = 0
    for c in range(scenario.num_targets):
        f = 0
        for s, state in enumerate(allocation):
            if state == OFF:
                continue
            facing = table[s][c]
            if facing == state or facing == _ANY_SECTOR:
                f += 1
        total += target_utility(params, f)
    on_count = sum(1 for state in allocation if state != OFF)
    return total - params.k1 * on_count


# --- scenario (de)serialization ---------------------------------------------

_TOP_KEYS = {"sensors", "targets", "geometry", "utility", "off_allowed"}
_GEOMETRY_KEYS = {"view_angle_deg", "view_range", "num_sectors", "sector_origin_deg"}
_UTILITY_KEYS = {"k1", "k2"}
_POINT_KEYS = {"x", "y"}


def _reject_unknown(mapping: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioFormatError(
            f"unknown key(s) {sorted(unknown)} in {where}; allowed: {sorted(allowed)}"
        )


def _parse_points(raw: object, where: str) -> tuple[Point, ...]:
    if not isinstance(raw, list):
        raise ScenarioFormatError(f"{where} must be an array of {{x, y}} objects")
    points = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ScenarioFormatError(f"{where}[{i}] must be an object with x and y")
        _reject_unknown(entry, _POINT_KEYS, f"{where}[{i}]")
        try:
            points.append(Point(float(entry["x"]), float(entry["y"])))
        except KeyError as exc:
            raise ScenarioFormatError(f"{where}[{i}] missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ScenarioFormatError(f"{where}[{i}]: {exc}") from None
    return tuple(points)


def _parse_number(raw: object, where: str) -> Utility:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ScenarioFormatError(f"{where} must be a number")
    return raw


def scenario_from_dict(doc: Mapping) -> Scenario:
    """Build a Scenario from a parsed JSON document. Unknown keys are
    rejected; geometry, utility and off_allowed fall back to defaults."""
    if not isinstance(doc, Mapping):
        raise ScenarioFormatError("scenario document must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "scenario")
    for required in ("sensors", "targets"):
        if required not in doc:
            raise ScenarioFormatError(f"scenario missing required key '{required}'")
    sensors = _parse_points(doc["sensors"], "sensors")
    targets = _parse_points(doc["targets"], "targets")

    geometry = Geometry()
    if "geometry" in doc:
        raw = doc["geometry"]
        if not isinstance(raw, Mapping):
            raise ScenarioFormatError("geometry must be an object")
        _reject_unknown(raw, _GEOMETRY_KEYS, "geometry")
        defaults = Geometry()
        try:
            geometry = Geometry(
                view_angle_deg=float(raw.get("view_angle_deg", defaults.view_angle_deg)),
                view_range=float(raw.get("view_range", defaults.view_range)),
                num_sectors=int(raw.get("num_sectors", defaults.num_sectors)),
                sector_origin_deg=float(
                    raw.get("sector_origin_deg", defaults.sector_origin_deg)
                ),
            )
        except (TypeError, ValueError) as exc:
            raise ScenarioFormatError(f"geometry: {exc}") from None

    utility = UtilityParams()
    if "utility" in doc:
        raw = doc["utility"]
        if not isinstance(raw, Mapping):
            raise ScenarioFormatError("utility must be an object")
        _reject_unknown(raw, _UTILITY_KEYS, "utility")
        defaults = UtilityParams()
        try:
            utility = UtilityParams(
                k1=_parse_number(raw.get("k1", defaults.k1), "utility.k1"),
                k2=_parse_number(raw.get("k2", defaults.k2), "utility.k2"),
            )
        except ValueError as exc:
            raise ScenarioFormatError(f"utility: {exc}") from None

    off_allowed = doc.get("off_allowed", False)
    if not isinstance(off_allowed, bool):
        raise ScenarioFormatError("off_allowed must be a boolean")

    return Scenario(
        sensors=sensors,
        targets=targets,
        geometry=geometry,
        utility=utility,
        off_allowed=off_allowed,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "sensors": [{"x": p.x, "y": p.y} for p in scenario.sensors],
        "targets": [{"x": p.x, "y": p.y} for p in scenario.targets],
        "geometry": {
            "view_angle_deg": scenario.geometry.view_angle_deg,
            "view_range": scenario.geometry.view_range,
            "num_sectors": scenario.geometry.num_sectors,
            "sector_origin_deg": scenario.geometry.sector_origin_deg,
        },
        "utility": {"k1": scenario.utility.k1, "k2": scenario.utility.k2},
        "off_allowed": scenario.off_allowed,
    }


def load_scenario(path: str) -> Scenario:
    """Load a scenario JSON file, reporting the line and column on syntax
    errors and the offending key path on schema errors."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from None
    try:
        return scenario_from_dict(doc)
    except ScenarioFormatError as exc:
        raise ScenarioFormatError(f"{path}: {exc}") from None


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")
