"""Communication sweep: seeded placements, protocol runs, aggregation.

A sweep draws random placements of sensors and targets, computes each
placement's exact optimum with the enumeration oracle, then runs the
bidding protocol for every neighbor count k and run index. The headline
statistic is the fraction of runs whose final utility ratio alpha reaches
1, which jumps sharply as k grows past the transition region.

Seeding is splittable: every placement and every (k, placement, run) cell
gets its own independent stream derived from the master seed, so results
are reproducible cell by cell regardless of execution order or worker
count, and the placement stream does not depend on how many runs are made.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .bidding import (
    FIXED,
    MARGINAL,
    BidPolicy,
    RoundConfig,
    RunTrace,
    run_protocol,
)
from .model import (
    Geometry,
    Point,
    Scenario,
    ScenarioFormatError,
    Utility,
    UtilityParams,
    default_start,
)
from .oracle import DEFAULT_BUDGET, enumerate_optimum

_ROLE_PLACEMENT = 0
_ROLE_RUN = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; identical configs give identical results."""

    num_sensors: int = 7
    num_targets: int = 7
    field_width: float = 10.0
    field_height: float = 10.0
    placements: int = 100
    runs_per_placement: int = 10
    neighbor_counts: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)
    master_seed: int = 0
    bid_mode: str = FIXED
    bid_amount: Utility = 1
    round_config: RoundConfig = RoundConfig()
    geometry: Geometry = Geometry()
    utility: UtilityParams = UtilityParams()
    off_allowed: bool = False
    enumeration_budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.num_sensors < 1:
            raise ValueError("num_sensors must be at least 1")
        if self.num_targets < 0:
            raise ValueError("num_targets must be non-negative")
        if self.placements < 1 or self.runs_per_placement < 1:
            raise ValueError("placements and runs_per_placement must be >= 1")
        if self.field_width <= 0 or self.field_height <= 0:
            raise ValueError("field dimensions must be positive")
        if not self.neighbor_counts:
            raise ValueError("neighbor_counts must not be empty")
        for k in self.neighbor_counts:
            if not 1 <= k <= self.num_sensors:
                raise ValueError(
                    f"neighbor count {k} outside [1, {self.num_sensors}]"
                )
        if self.bid_mode not in (FIXED, MARGINAL):
            raise ValueError(f"unknown bid mode {self.bid_mode!r}")

    def bid_policy(self, k: int) -> BidPolicy:
        return BidPolicy(mode=self.bid_mode, neighbor_count=k, amount=self.bid_amount)


@dataclass(frozen=True)
class CellResult:
    """Outcome of one (k, placement, run) protocol execution."""

    k: int
    placement_id: int
    run_id: int
    trace: RunTrace
    final_gu: Utility
    final_alpha: Optional[float]
    optimal: bool
    rounds: int
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    cells: tuple[CellResult, ...]
    placement_optima: tuple[Utility, ...]

    @property
    def excluded_placements(self) -> tuple[int, ...]:
        """Placements whose optimum is not positive; their alpha is undefined
        and they carry no weight in histograms or summary statistics."""
        return tuple(
            i for i, gu in enumerate(self.placement_optima) if gu <= 0
        )


@dataclass(frozen=True)
class SummaryRow:
    k: int
    mean_alpha: float
    frac_optimal: float
    q1: float
    median: float
    q3: float
    mean_rounds: float


def placement_seed(master_seed: int, placement_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        master_seed, spawn_key=(_ROLE_PLACEMENT, placement_index)
    )


def run_seed(
    master_seed: int, k: int, placement_index: int, run_index: int
) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        master_seed, spawn_key=(_ROLE_RUN, k, placement_index, run_index)
    )


def random_scenario(config: ExperimentConfig, placement_index: int) -> Scenario:
    """Placement positions drawn i.i.d. uniform over the field from a stream
    keyed by (master_seed, placement_index) only."""
    if not 0 <= placement_index < config.placements:
        raise IndexError(f"placement index {placement_index} out of range")
    rng = np.random.default_rng(placement_seed(config.master_seed, placement_index))
    def draw_points(count: int) -> tuple[Point, ...]:
        xs = rng.uniform(0.0, config.field_width, count)
        ys = rng.uniform(0.0, config.field_height, count)
        return tuple(Point(float(x), float(y)) for x, y in zip(xs, ys))

    sensors = draw_points(config.num_sensors)
    targets = draw_points(config.num_targets)
    return Scenario(
        sensors=sensors,
        targets=targets,
        geometry=config.geometry,
        utility=config.utility,
        off_allowed=config.off_allowed,
    )


def alpha(gu: Utility, optimum_gu: Utility) -> Optional[float]:
    """Utility ratio against the optimum; None when the optimum is not
    positive and the ratio is undefined."""
    if optimum_gu <= 0:
        return None
    return gu / optimum_gu


def _placement_cells(
    config: ExperimentConfig, placement_index: int
) -> tuple[int, Utility, list[CellResult]]:
    """All cells of one placement: the oracle runs once, the protocol runs
    for every (k, run) pair."""
    scenario = random_scenario(config, placement_index)
    optimum = enumerate_optimum(scenario, config.enumeration_budget).optimum_gu
    start = default_start(scenario)
    cells = []
    for k in config.neighbor_counts:
        policy = config.bid_policy(k)
        for run_index in range(config.runs_per_placement):
            trace = run_protocol(
                scenario,
                start,
                policy,
                config.round_config,
                rng_seed=np.random.default_rng(
                    run_seed(config.master_seed, k, placement_index, run_index)
                ),
                optimum_gu=optimum if optimum > 0 else None,
            )
            final_gu = trace.final_gu
            cells.append(
                CellResult(
                    k=k,
                    placement_id=placement_index,
                    run_id=run_index,
                    trace=trace,
                    final_gu=final_gu,
                    final_alpha=alpha(final_gu, optimum),
                    optimal=optimum > 0 and final_gu == optimum,
                    rounds=trace.rounds_executed,
                    converged=trace.converged,
                )
            )
    return placement_index, optimum, cells


def run_sweep(
    config: ExperimentConfig, workers: Optional[int] = None
) -> SweepResult:
    """Execute the full sweep. With workers > 1, placements are distributed
    over processes; the merge is ordered by (k, placement, run) so the
    result is identical however the work was scheduled."""
    by_placement: dict[int, tuple[Utility, list[CellResult]]] = {}
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, optimum, cells in pool.map(
                _placement_cells,
                [config] * config.placements,
                range(config.placements),
            ):
                by_placement[index] = (optimum, cells)
    else:
        for placement_index in range(config.placements):
            index, optimum, cells = _placement_cells(config, placement_index)
            by_placement[index] = (optimum, cells)

    optima = tuple(by_placement[i][0] for i in range(config.placements))
    merged = [
        cell
        for i in range(config.placements)
        for cell in by_placement[i][1]
    ]
    merged.sort(key=lambda c: (c.k, c.placement_id, c.run_id))
    return SweepResult(
        config=config, cells=tuple(merged), placement_optima=optima
    )


def _defined_cells(result: SweepResult, k: int) -> list[CellResult]:
    return [
        c for c in result.cells if c.k == k and c.final_alpha is not None
    ]


def summarize(result: SweepResult) -> list[SummaryRow]:
    """Per-k distribution of final alpha over the defined cells."""
    rows = []
    for k in result.config.neighbor_counts:
        cells = _defined_cells(result, k)
        if not cells:
            rows.append(SummaryRow(k, math.nan, math.nan, math.nan, math.nan,
                                   math.nan, math.nan))
            continue
        alphas = np.array([c.final_alpha for c in cells])
        q1, median, q3 = np.percentile(alphas, [25, 50, 75])
        rows.append(
            SummaryRow(
                k=k,
                mean_alpha=float(alphas.mean()),
                frac_optimal=sum(c.optimal for c in cells) / len(cells),
                q1=float(q1),
                median=float(median),
                q3=float(q3),
                mean_rounds=sum(c.rounds for c in cells) / len(cells),
            )
        )
    return rows


ALPHA_BIN_WIDTH = 0.05


def _alpha_bin(value: float) -> int:
    # half-open bins [edge, edge + width); a small nudge keeps exact edge
    # values (notably 1.0) in the bin they name despite float division
    return int(math.floor(value / ALPHA_BIN_WIDTH + 1e-9))


def histogram_rows(result: SweepResult) -> list[tuple[int, float, int]]:
    """(k, bin lower edge, count) for every occupied alpha bin."""
    rows = []
    for k in result.config.neighbor_counts:
        counts: dict[int, int] = {}
        for cell in _defined_cells(result, k):
            b = _alpha_bin(cell.final_alpha)
            counts[b] = counts.get(b, 0) + 1
        for b in sorted(counts):
            rows.append((k, b * ALPHA_BIN_WIDTH, counts[b]))
    return rows


def placement_rows(
    result: SweepResult,
) -> list[tuple[int, int, Optional[float], Optional[float]]]:
    """(k, placement, mean final alpha over runs, fraction optimal) with
    None marks for placements whose optimum is not positive."""
    runs = result.config.runs_per_placement
    rows = []
    for k in result.config.neighbor_counts:
        for p in range(result.config.placements):
            cells = [
                c for c in result.cells if c.k == k and c.placement_id == p
            ]
            if result.placement_optima[p] <= 0:
                rows.append((k, p, None, None))
                continue
            mean_alpha = sum(c.final_alpha for c in cells) / runs
            frac = sum(c.optimal for c in cells) / runs
            rows.append((k, p, mean_alpha, frac))
    return rows


# --- CSV and config serialization --------------------------------------------


def _format_utility(value: Utility) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.6f}"


def _format_alpha(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def write_traces_csv(result: SweepResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["placement_id", "run_id", "k", "round", "gu", "alpha"])
        for cell in result.cells:
            for rec in cell.trace.records:
                writer.writerow(
                    [
                        cell.placement_id,
                        cell.run_id,
                        cell.k,
                        rec.round,
                        _format_utility(rec.gu),
                        _format_alpha(rec.alpha),
                    ]
                )


def write_summary_csv(result: SweepResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["k", "mean_alpha", "frac_optimal", "q1", "median", "q3", "mean_rounds"]
        )
        for row in summarize(result):
            writer.writerow(
                [
                    row.k,
                    f"{row.mean_alpha:.6f}",
                    f"{row.frac_optimal:.6f}",
                    f"{row.q1:.6f}",
                    f"{row.median:.6f}",
                    f"{row.q3:.6f}",
                    f"{row.mean_rounds:.6f}",
                ]
            )


def write_histogram_csv(result: SweepResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "alpha_bin", "count"])
        for k, edge, count in histogram_rows(result):
            writer.writerow([k, f"{edge:.2f}", count])


def write_placement_summary_csv(result: SweepResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "placement_id", "mean_alpha", "frac_optimal"])
        for k, p, mean_alpha, frac in placement_rows(result):
            writer.writerow(
                [k, p, _format_alpha(mean_alpha), _format_alpha(frac)]
            )


_CONFIG_KEYS = {
    "num_sensors",
    "num_targets",
    "field_width",
    "field_height",
    "placements",
    "runs_per_placement",
    "neighbor_counts",
    "master_seed",
    "bid_mode",
    "bid_amount",
    "max_rounds",
    "quiescence_rounds",
    "miss_probability",
    "geometry",
    "utility",
    "off_allowed",
    "enumeration_budget",
}


def experiment_config_from_dict(doc: Mapping) -> ExperimentConfig:
    if not isinstance(doc, Mapping):
        raise ScenarioFormatError("experiment config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ScenarioFormatError(
            f"unknown key(s) {sorted(unknown)} in experiment config; "
            f"allowed: {sorted(_CONFIG_KEYS)}"
        )
    defaults = ExperimentConfig()
    geometry = defaults.geometry
    if "geometry" in doc:
        # reuse the scenario schema for the nested blocks
        from .model import scenario_from_dict

        probe = scenario_from_dict(
            {"sensors": [], "targets": [], "geometry": doc["geometry"]}
        )
        geometry = probe.geometry
    utility = defaults.utility
    if "utility" in doc:
        from .model import scenario_from_dict

        probe = scenario_from_dict(
            {"sensors": [], "targets": [], "utility": doc["utility"]}
        )
        utility = probe.utility
    try:
        round_config = RoundConfig(
            max_rounds=int(doc.get("max_rounds", defaults.round_config.max_rounds)),
            quiescence_rounds=int(
                doc.get("quiescence_rounds", defaults.round_config.quiescence_rounds)
            ),
            miss_probability=float(
                doc.get("miss_probability", defaults.round_config.miss_probability)
            ),
        )
        counts = doc.get("neighbor_counts", defaults.neighbor_counts)
        if not isinstance(counts, (list, tuple)):
            raise ValueError("neighbor_counts must be an array of integers")
        return ExperimentConfig(
            num_sensors=int(doc.get("num_sensors", defaults.num_sensors)),
            num_targets=int(doc.get("num_targets", defaults.num_targets)),
            field_width=float(doc.get("field_width", defaults.field_width)),
            field_height=float(doc.get("field_height", defaults.field_height)),
            placements=int(doc.get("placements", defaults.placements)),
            runs_per_placement=int(
                doc.get("runs_per_placement", defaults.runs_per_placement)
            ),
            neighbor_counts=tuple(int(k) for k in counts),
            master_seed=int(doc.get("master_seed", defaults.master_seed)),
            bid_mode=str(doc.get("bid_mode", defaults.bid_mode)),
            bid_amount=doc.get("bid_amount", defaults.bid_amount),
            round_config=round_config,
            geometry=geometry,
            utility=utility,
            off_allowed=bool(doc.get("off_allowed", defaults.off_allowed)),
            enumeration_budget=int(
                doc.get("enumeration_budget", defaults.enumeration_budget)
            ),
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"experiment config: {exc}") from None


def experiment_config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "num_sensors": config.num_sensors,
        "num_targets": config.num_targets,
        "field_width": config.field_width,
        "field_height": config.field_height,
        "placements": config.placements,
        "runs_per_placement": config.runs_per_placement,
        "neighbor_counts": list(config.neighbor_counts),
        "master_seed": config.master_seed,
        "bid_mode": config.bid_mode,
        "bid_amount": config.bid_amount,
        "max_rounds": config.round_config.max_rounds,
        "quiescence_rounds": config.round_config.quiescence_rounds,
        "miss_probability": config.round_config.miss_probability,
        "geometry": {
            "view_angle_deg": config.geometry.view_angle_deg,
            "view_range": config.geometry.view_range,
            "num_sectors": config.geometry.num_sectors,
            "sector_origin_deg": config.geometry.sector_origin_deg,
        },
        "utility": {"k1": config.utility.k1, "k2": config.utility.k2},
        "off_allowed": config.off_allowed,
        "enumeration_budget": config.enumeration_budget,
    }


def load_experiment_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from None
    try:
        return experiment_config_from_dict(doc)
    except ScenarioFormatError as exc:
        raise ScenarioFormatError(f"{path}: {exc}") from None


def save_experiment_config(config: ExperimentConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(experiment_config_to_dict(config), fh, indent=2)
        fh.write("\n")
