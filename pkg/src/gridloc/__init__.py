"""Deterministic simulator and planning toolkit for graded-precision
localization on fixed-grid wireless sensor networks."""

from .engine import Scenario, ScenarioProfile, Trace, run_replicates, run_scenario
from .geometry import (
    GridConfig,
    Point2D,
    RegionModel,
    TimingPlan,
    connectivity_graph,
    derive_timing,
    fine_cnt_limit_bound,
    grid_positions,
    min_ntl_range,
    monte_carlo_analytical_mae,
    region_area_fraction,
    region_classify,
    theoretical_mae,
    verify_three_anchor_coverage,
)
from .localization import (
    EstimateMethod,
    LocationEstimate,
    NtlProfile,
    NtlState,
    TdoaErrorModel,
    candidate_set,
    centroid,
    dead_reckon_accumulate,
    ntl_update,
    tdoa_fix,
)
from .metrics import MetricsReport, compare_theory, compute_metrics, fgl_overhead
from .mobility import (
    MobilityConfig,
    SensorErrorModel,
    WalkState,
    advance_walk,
    sense_step,
)
from .radio import (
    BeaconTally,
    BernoulliDisk,
    DistanceDecay,
    IdealDisk,
    beacon_schedule,
    reception_decision,
    window_tally,
)
from .scenario import load_scenario, paper_default_scenario

__version__ = "0.1.0"

__all__ = [
    "BeaconTally",
    "BernoulliDisk",
    "DistanceDecay",
    "EstimateMethod",
    "GridConfig",
    "IdealDisk",
    "LocationEstimate",
    "MetricsReport",
    "MobilityConfig",
    "NtlProfile",
    "NtlState",
    "Point2D",
    "RegionModel",
    "Scenario",
    "ScenarioProfile",
    "SensorErrorModel",
    "TdoaErrorModel",
    "TimingPlan",
    "Trace",
    "WalkState",
    "advance_walk",
    "beacon_schedule",
    "candidate_set",
    "centroid",
    "compare_theory",
    "compute_metrics",
    "connectivity_graph",
    "dead_reckon_accumulate",
    "derive_timing",
    "fgl_overhead",
    "fine_cnt_limit_bound",
    "grid_positions",
    "load_scenario",
    "min_ntl_range",
    "monte_carlo_analytical_mae",
    "ntl_update",
    "paper_default_scenario",
    "reception_decision",
    "region_area_fraction",
    "region_classify",
    "run_replicates",
    "run_scenario",
    "sense_step",
    "tdoa_fix",
    "theoretical_mae",
    "verify_three_anchor_coverage",
    "window_tally",
]
