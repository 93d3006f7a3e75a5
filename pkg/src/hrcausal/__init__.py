"""Batched time-series causal discovery for human-robot spatial interaction.

The package simulates a goal-driven pedestrian sharing a room with a
patrolling robot, derives the interaction variables (speed, goal
distance, collision risk), and recovers their lagged causal structure
with PCMCI / F-PCMCI, including the data-requirement sweeps (sampling
frequency, time horizon, runtime) and a streaming batch pipeline.
"""

from .causalgraph import (
    CausalGraph,
    LaggedEdge,
    expected_hrsi_graph,
    from_text,
    read_graph,
    shd,
    to_dot,
    to_text,
    write_graph,
)
from .citest import (
    CITestConfig,
    CITestResult,
    distance_correlation,
    gp_regress,
    gpdc,
    kraskov_cmi,
    parcorr,
    shuffle_significance,
    transfer_entropy,
)
from .discovery import (
    DiscoveryConfig,
    ParentSet,
    mci,
    pc1_condition_selection,
    run_discovery,
    run_fpcmci,
    run_pcmci,
    te_feature_selection,
)
from .errors import (
    DataError,
    DegenerateDataError,
    IncompatibleGraphsError,
    IncompatibleTablesError,
    InsufficientDataError,
    NumericalError,
    ParseError,
)
from .features import compute_dg, compute_risk, compute_speed, trace_to_features
from .hrsim import AgentState, SimTrace, WorldConfig, avoidance, human_desired_speed
from .hrsim import run as run_simulation
from .hrsim import step, update_goal, write_raw_trace
from .pipeline import (
    PipelineConfig,
    PipelineSummary,
    ReplaySource,
    SimulateSource,
    collect,
    discovery_worker,
    load_pipeline_config,
    run_pipeline,
)
from .sweeps import SweepRow, SweepTable, aggregate, sweep_frequency, sweep_horizon
from .timeseries import (
    TimeSeriesBatch,
    interpolate_gaps,
    read_csv,
    slice_fraction,
    standardize,
    subsample,
    write_csv,
)

__version__ = "0.1.0"
