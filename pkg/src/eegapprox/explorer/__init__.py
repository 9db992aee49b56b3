"""Sweep (cluster, cores, frequency, level) configurations and extract
power/performance/accuracy Pareto fronts."""

from eegapprox.explorer.heartbeat import (
    ExtractionWorkload,
    HeartbeatPool,
    HeartbeatResult,
    run_heartbeat_harness,
)
from eegapprox.explorer.pareto import dominates, pareto_front, pareto_indices
from eegapprox.explorer.power import (
    DEFAULT_ANCHORS,
    DEFAULT_PARAMS,
    ClusterPower,
    PlatformConfig,
    PowerModelParams,
    calibrate_power,
    load_anchors,
    model_power,
)
from eegapprox.explorer.sweep import (
    CSV_FIELDS,
    SweepRecord,
    SweepSettings,
    default_platforms,
    format_sweep_csv,
    read_sweep_lines,
    run_sweep,
)

__all__ = [
    "CSV_FIELDS",
    "ClusterPower",
    "DEFAULT_ANCHORS",
    "DEFAULT_PARAMS",
    "ExtractionWorkload",
    "HeartbeatPool",
    "HeartbeatResult",
    "PlatformConfig",
    "PowerModelParams",
    "SweepRecord",
    "SweepSettings",
    "calibrate_power",
    "default_platforms",
    "dominates",
    "format_sweep_csv",
    "load_anchors",
    "model_power",
    "pareto_front",
    "pareto_indices",
    "read_sweep_lines",
    "run_heartbeat_harness",
    "run_sweep",
]
