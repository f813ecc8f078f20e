"""Capacity planning for an ISP access network: analytic load model,
scenario sweeps, upgrade thresholds and a simulation cross-check."""

from .model import (
    DelayBreakdown,
    ModelModes,
    NetworkConfig,
    PerformanceMetrics,
    ProcessingMode,
    QueueDelayMode,
    SaturationPolicy,
    ThroughputMode,
    evaluate_point,
)
from .scenario import (
    ComparisonResult,
    SweepResult,
    ThresholdCriteria,
    ThresholdReport,
    UpgradePlan,
    apply_upgrade,
    compare,
    find_threshold,
    sweep,
)

__all__ = [
    "ComparisonResult",
    "DelayBreakdown",
    "ModelModes",
    "NetworkConfig",
    "PerformanceMetrics",
    "ProcessingMode",
    "QueueDelayMode",
    "SaturationPolicy",
    "SweepResult",
    "ThresholdCriteria",
    "ThresholdReport",
    "ThroughputMode",
    "UpgradePlan",
    "apply_upgrade",
    "compare",
    "evaluate_point",
    "find_threshold",
    "sweep",
]
