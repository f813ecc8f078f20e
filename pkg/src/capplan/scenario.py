"""Upgrade plans, user-load sweeps, baseline/upgrade comparison and
upgrade-threshold detection."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .model import ModelModes, NetworkConfig, PerformanceMetrics, evaluate_point


@dataclass(frozen=True)
class UpgradePlan:
    """Adjustments applied to a baseline config.

    Bandwidth is given either as an absolute value or as a factor, never
    both.  ``queue_scale_factor`` multiplies the queue limit (rounded down).
    Use :meth:`none` for the identity plan and :meth:`paper` for the
    reference 1 Gbps / 5x queue upgrade.
    """

    bandwidth_bps: float | None = None
    bandwidth_factor: float | None = None
    queue_scale_factor: float = 5.0
    server_capacity_new_rps: float | None = None

    def __post_init__(self):
        if self.bandwidth_bps is not None and self.bandwidth_factor is not None:
            raise ValueError("upgrade plan: give bandwidth_bps or bandwidth_factor, not both")
        for name in ("bandwidth_bps", "bandwidth_factor", "server_capacity_new_rps"):
            value = getattr(self, name)
            if value is not None and not (_finite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")
        if not (_finite(self.queue_scale_factor) and self.queue_scale_factor >= 1):
            raise ValueError(f"queue_scale_factor must be >= 1, got {self.queue_scale_factor!r}")

    @classmethod
    def none(cls) -> "UpgradePlan":
        return cls(queue_scale_factor=1.0)

    @classmethod
    def paper(cls) -> "UpgradePlan":
        return cls(bandwidth_bps=1e9, queue_scale_factor=5.0)


@dataclass(frozen=True)
class ThresholdCriteria:
    max_total_delay_s: float | None = 0.1
    min_per_user_throughput_bps: float | None = 5e6
    min_fraction_of_max_throughput: float | None = None
    # extra criteria, no reference defaults
    max_utilization_pct: float | None = None
    max_queue_drops_pps: float | None = None
    max_server_drops_rps: float | None = None

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is not None and not (_finite(value) and value > 0):
                raise ValueError(f"{f.name} must be > 0, got {value!r}")
        if self.min_fraction_of_max_throughput is not None and self.min_fraction_of_max_throughput > 1:
            raise ValueError("min_fraction_of_max_throughput must be <= 1")


@dataclass(frozen=True)
class SweepResult:
    config: NetworkConfig
    modes: ModelModes
    points: tuple[PerformanceMetrics, ...]

    @property
    def n_range(self) -> tuple[int, int]:
        return self.points[0].n_users, self.points[-1].n_users

    def __len__(self):
        return len(self.points)

    def at(self, n: int) -> PerformanceMetrics:
        first = self.points[0].n_users
        if not first <= n <= self.points[-1].n_users:
            raise KeyError(n)
        return self.points[n - first]


@dataclass(frozen=True)
class ThresholdReport:
    first_violation: dict[str, int | None] = field(default_factory=dict)
    upgrade_required_at: int | None = None


@dataclass(frozen=True)
class ComparisonResult:
    baseline: SweepResult
    upgraded: SweepResult
    deltas: tuple[dict[str, float], ...]


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def apply_upgrade(config: NetworkConfig, plan: UpgradePlan | None) -> NetworkConfig:
    if plan is None:
        return config
    changes: dict = {}
    if plan.bandwidth_bps is not None:
        changes["bandwidth_bps"] = plan.bandwidth_bps
    elif plan.bandwidth_factor is not None:
        changes["bandwidth_bps"] = config.bandwidth_bps * plan.bandwidth_factor
    if plan.queue_scale_factor != 1:
        changes["queue_limit_packets"] = math.floor(config.queue_limit_packets * plan.queue_scale_factor)
    if plan.server_capacity_new_rps is not None:
        changes["server_capacity_rps"] = plan.server_capacity_new_rps
    if not changes:
        return config
    return dataclasses.replace(config, **changes)


def sweep(config: NetworkConfig, modes: ModelModes, n_from: int, n_to: int) -> SweepResult:
    for name, v in (("n_from", n_from), ("n_to", n_to)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ValueError(f"{name} must be an integer >= 0, got {v!r}")
    if n_from > n_to:
        raise ValueError(f"empty sweep range: n_from={n_from} > n_to={n_to}")
    points = tuple(evaluate_point(config, modes, n) for n in range(n_from, n_to + 1))
    return SweepResult(config=config, modes=modes, points=points)


def _violates(name: str, value: float, p: PerformanceMetrics, bandwidth_bps: float) -> bool:
    if name == "max_total_delay_s":
        # acceptance is strictly "delay < max"
        return p.delays.total_s >= value
    if name == "min_per_user_throughput_bps":
        return p.n_users > 0 and p.throughput_bps / p.n_users < value
    if name == "min_fraction_of_max_throughput":
        return p.throughput_bps < value * bandwidth_bps
    if name == "max_utilization_pct":
        return p.utilization_pct > value
    if name == "max_queue_drops_pps":
        return p.queue_drops_pps > value
    if name == "max_server_drops_rps":
        return p.server_drops_rps > value
    raise KeyError(name)


def find_threshold(result: SweepResult, criteria: ThresholdCriteria = ThresholdCriteria()) -> ThresholdReport:
    """First user count violating each active criterion (linear scan)."""
    if not result.points:
        raise ValueError("cannot search thresholds in an empty sweep")
    first: dict[str, int | None] = {}
    for f in dataclasses.fields(criteria):
        value = getattr(criteria, f.name)
        if value is None:
            continue
        first[f.name] = next(
            (p.n_users for p in result.points if _violates(f.name, value, p, result.config.bandwidth_bps)),
            None,
        )
    hits = [n for n in first.values() if n is not None]
    return ThresholdReport(first_violation=first, upgrade_required_at=min(hits) if hits else None)


def metric_values(p: PerformanceMetrics) -> dict[str, float]:
    """Flat numeric view of a metrics record, keyed by report column name."""
    d = p.delays
    return {
        "rho": p.rho,
        "r_total_rps": p.r_total_rps,
        "r_served_rps": p.r_served_rps,
        "d_queue_s": d.queue_s,
        "d_processing_s": d.processing_s,
        "d_transmission_s": d.transmission_s,
        "d_propagation_s": d.propagation_s,
        "d_total_s": d.total_s,
        "utilization_pct": p.utilization_pct,
        "throughput_bps": p.throughput_bps,
        "queue_drops_pps": p.queue_drops_pps,
        "server_drops_rps": p.server_drops_rps,
    }


def _delta(upgraded: float, baseline: float) -> float:
    if upgraded == baseline:
        # also covers inf - inf
        return 0.0
    return upgraded - baseline


def compare(baseline: SweepResult, upgraded: SweepResult) -> ComparisonResult:
    if not baseline.points or not upgraded.points:
        raise ValueError("cannot compare empty sweeps")
    if baseline.n_range != upgraded.n_range or len(baseline) != len(upgraded):
        raise ValueError(f"sweep ranges differ: {baseline.n_range} vs {upgraded.n_range}")
    deltas = []
    for b, u in zip(baseline.points, upgraded.points):
        bv, uv = metric_values(b), metric_values(u)
        deltas.append({k: _delta(uv[k], bv[k]) for k in bv})
    return ComparisonResult(baseline=baseline, upgraded=upgraded, deltas=tuple(deltas))
