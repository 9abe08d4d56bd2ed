"""Cooperative sensor-network localization via connectivity-weighted SDR.

Pipeline: simulate a deployment and RSS-derived distance estimates
(:mod:`wsnloc.simulate`), assemble the relaxation (:mod:`wsnloc.sdr`),
solve it (:mod:`wsnloc.solver`), estimate positions end to end
(:mod:`wsnloc.estimator`), and benchmark methods over seeded Monte-Carlo
sweeps (:mod:`wsnloc.bench`).
"""

from .bench import (
    BoxStats,
    ExperimentConfig,
    ExperimentReport,
    SettingSummary,
    TrialRecord,
    boxplot_stats,
    rmse,
    run_experiment,
    trial_error,
    write_summary_csv,
    write_trials_csv,
)
from .estimator import METHODS, LocalizationResult, localize
from .network import (
    NeighborSets,
    Point2,
    Scenario,
    connectivity_measure,
    is_fully_connected,
    neighbor_sets,
    true_distance,
)
from .sdr import (
    ConicProblem,
    RegularizerSpec,
    anchor_selector,
    assemble_problem,
    connectivity_weight,
    pair_selector,
    quad_form,
    regularizer_spec,
)
from .simulate import (
    ChannelParams,
    Edge,
    MeasurementSet,
    fade_distance,
    generate_scenario,
    make_measurements,
    measured_neighbor_sets,
    measurement_rng,
    perturb_anchor,
    simulate_trial,
)
from .solver import (
    ConicSolution,
    SolverError,
    SolverOptions,
    extract_positions,
    solve,
    tightness,
)

__version__ = "0.1.0"

__all__ = [
    "BoxStats", "ChannelParams", "ConicProblem", "ConicSolution", "Edge",
    "ExperimentConfig", "ExperimentReport", "LocalizationResult", "METHODS",
    "MeasurementSet", "NeighborSets", "Point2", "RegularizerSpec", "Scenario",
    "SettingSummary", "SolverError", "SolverOptions", "TrialRecord",
    "anchor_selector", "assemble_problem", "boxplot_stats", "connectivity_measure",
    "connectivity_weight", "extract_positions", "fade_distance", "generate_scenario",
    "is_fully_connected", "localize", "make_measurements", "measured_neighbor_sets",
    "measurement_rng", "neighbor_sets", "pair_selector", "perturb_anchor",
    "quad_form", "regularizer_spec", "rmse", "run_experiment", "simulate_trial",
    "solve", "tightness", "trial_error", "true_distance", "write_summary_csv",
    "write_trials_csv",
]
