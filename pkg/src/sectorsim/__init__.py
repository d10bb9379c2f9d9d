"""Deterministic simulator for distributed sensor-sector allocation.

A set of fixed sensors each point a view cone at one of a few angular
sectors (or switch off); stationary targets reward coverage. The package
provides the utility model, two hill-climbing searches, a distributed
bidding protocol, an exhaustive optimum oracle, closed-form landscape
statistics, and a communication-sweep experiment harness with CSV and
figure output.
"""

__version__ = "0.1.0"

from .bidding import (
    FIXED,
    MARGINAL,
    BidMessage,
    BidPolicy,
    RoundConfig,
    RoundRecord,
    RunTrace,
    compute_bid,
    desired_sector,
    gu_decrease_fraction,
    run_protocol,
    select_neighbors,
    sensor_decide,
)
from .experiment import (
    CellResult,
    ExperimentConfig,
    SummaryRow,
    SweepResult,
    alpha,
    experiment_config_from_dict,
    experiment_config_to_dict,
    histogram_rows,
    load_experiment_config,
    placement_rows,
    random_scenario,
    run_sweep,
    save_experiment_config,
    summarize,
    write_histogram_csv,
    write_placement_summary_csv,
    write_summary_csv,
    write_traces_csv,
)
from .model import (
    OFF,
    Allocation,
    Geometry,
    Point,
    Scenario,
    ScenarioFormatError,
    SensorState,
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
from .oracle import (
    EnumerationBudgetError,
    LandscapeCensus,
    OptimumResult,
    census,
    census_report,
    enumerate_optimum,
    max_distance_to_local_optimum,
    shortest_distance_to_local_optimum,
    space_size,
)
from .search import (
    NeighborMove,
    SearchOutcome,
    apply_move,
    global_hill_climb,
    individual_hill_climb_run,
    individual_hill_climb_step,
    is_local_optimum,
    neighbor_moves,
    neighbors,
)
from .theory import (
    TheoryReport,
    branching_factor,
    expected_distance_bound,
    expected_local_optima,
    lambda_prediction,
    pr_local_is_global,
    theory_report,
    theory_report_to_dict,
)

__all__ = [
    "__version__",
    # model
    "OFF",
    "Allocation",
    "Geometry",
    "Point",
    "Scenario",
    "ScenarioFormatError",
    "SensorState",
    "UtilityParams",
    "coverage_count",
    "default_start",
    "global_utility",
    "legal_states",
    "load_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "sees",
    "sensor_utility",
    "target_utility",
    # search
    "NeighborMove",
    "SearchOutcome",
    "apply_move",
    "global_hill_climb",
    "individual_hill_climb_run",
    "individual_hill_climb_step",
    "is_local_optimum",
    "neighbor_moves",
    "neighbors",
    # oracle
    "EnumerationBudgetError",
    "LandscapeCensus",
    "OptimumResult",
    "census",
    "census_report",
    "enumerate_optimum",
    "max_distance_to_local_optimum",
    "shortest_distance_to_local_optimum",
    "space_size",
    # theory
    "TheoryReport",
    "branching_factor",
    "expected_distance_bound",
    "expected_local_optima",
    "lambda_prediction",
    "pr_local_is_global",
    "theory_report",
    "theory_report_to_dict",
    # bidding
    "FIXED",
    "MARGINAL",
    "BidMessage",
    "BidPolicy",
    "RoundConfig",
    "RoundRecord",
    "RunTrace",
    "compute_bid",
    "desired_sector",
    "gu_decrease_fraction",
    "run_protocol",
    "select_neighbors",
    "sensor_decide",
    # experiment
    "CellResult",
    "ExperimentConfig",
    "SummaryRow",
    "SweepResult",
    "alpha",
    "experiment_config_from_dict",
    "experiment_config_to_dict",
    "histogram_rows",
    "load_experiment_config",
    "placement_rows",
    "random_scenario",
    "run_sweep",
    "save_experiment_config",
    "summarize",
    "write_histogram_csv",
    "write_placement_summary_csv",
    "write_summary_csv",
    "write_traces_csv",
]
