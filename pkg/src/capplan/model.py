"""Analytic ISP link/server model: traffic intensity, delays, utilization,
throughput and drops for a single load point.

All rates are requests (== packets) per second, sizes in bits, delays in
seconds.  ``math.inf`` is a legal delay value (saturated queue).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

PAPER_BANDWIDTH_BPS = 100e6
PAPER_PACKET_SIZE_BITS = 1500 * 8
PAPER_USER_RATE_RPS = 417.0
PAPER_CAPACITY_USERS = 50
PAPER_PROPAGATION_SPEED_MPS = 2e8
PAPER_CABLE_LENGTH_M = 90.0
PAPER_QUEUE_LIMIT = 1000


class QueueDelayMode(str, enum.Enum):
    LITERAL_SECONDS = "literal-seconds"
    SERVICE_SCALED = "service-scaled"


class SaturationPolicy(str, enum.Enum):
    INFINITE = "infinite"
    CAPPED = "capped"


class ProcessingMode(str, enum.Enum):
    LITERAL = "literal"
    DISABLED = "disabled"


class ThroughputMode(str, enum.Enum):
    PAPER = "paper"
    CARRIED_CAPPED = "carried-capped"
    LITERAL_EQ9 = "literal-eq9"


@dataclass(frozen=True)
class NetworkConfig:
    """Physical and model constants.  Defaults are the reference ISP setup.

    ``server_capacity_rps`` defaults to ``server_capacity_users`` times the
    per-user request rate when left as ``None``.
    """

    bandwidth_bps: float = PAPER_BANDWIDTH_BPS
    packet_size_bits: float = PAPER_PACKET_SIZE_BITS
    per_user_request_rate_rps: float = PAPER_USER_RATE_RPS
    server_capacity_rps: float | None = None
    server_capacity_users: float = PAPER_CAPACITY_USERS
    propagation_speed_mps: float = PAPER_PROPAGATION_SPEED_MPS
    cable_length_m: float = PAPER_CABLE_LENGTH_M
    queue_limit_packets: int = PAPER_QUEUE_LIMIT

    def __post_init__(self):
        if self.server_capacity_rps is None:
            object.__setattr__(
                self,
                "server_capacity_rps",
                self.server_capacity_users * self.per_user_request_rate_rps,
            )
        self.validate()

    def validate(self) -> None:
        positive = (
            "bandwidth_bps",
            "packet_size_bits",
            "per_user_request_rate_rps",
            "server_capacity_rps",
            "propagation_speed_mps",
        )
        for name in positive:
            value = getattr(self, name)
            if not _is_real(value) or not value > 0 or math.isinf(value):
                raise ValueError(f"{name} must be a finite number > 0, got {value!r}")
        for name in ("cable_length_m", "server_capacity_users"):
            value = getattr(self, name)
            if not _is_real(value) or not value >= 0 or math.isinf(value):
                raise ValueError(f"{name} must be a finite number >= 0, got {value!r}")
        k = self.queue_limit_packets
        if isinstance(k, bool) or not isinstance(k, int) or k < 0:
            raise ValueError(f"queue_limit_packets must be an integer >= 0, got {k!r}")

    @property
    def service_time_s(self) -> float:
        return transmission_delay(self.packet_size_bits, self.bandwidth_bps)

    @property
    def link_capacity_pps(self) -> float:
        return self.bandwidth_bps / self.packet_size_bits


@dataclass(frozen=True)
class ModelModes:
    """Unit interpretation switches for the ambiguous equations."""

    queue_delay_mode: QueueDelayMode = QueueDelayMode.SERVICE_SCALED
    saturation_policy: SaturationPolicy = SaturationPolicy.INFINITE
    processing_mode: ProcessingMode = ProcessingMode.LITERAL
    throughput_mode: ThroughputMode = ThroughputMode.PAPER

    def __post_init__(self):
        # accept plain strings, store enum members
        for name, kind in (
            ("queue_delay_mode", QueueDelayMode),
            ("saturation_policy", SaturationPolicy),
            ("processing_mode", ProcessingMode),
            ("throughput_mode", ThroughputMode),
        ):
            value = getattr(self, name)
            try:
                object.__setattr__(self, name, kind(value))
            except ValueError:
                allowed = ", ".join(m.value for m in kind)
                raise ValueError(f"{name} must be one of {{{allowed}}}, got {value!r}") from None


@dataclass(frozen=True)
class DelayBreakdown:
    queue_s: float
    processing_s: float
    transmission_s: float
    propagation_s: float
    total_s: float | None = None

    def __post_init__(self):
        if self.total_s is None:
            object.__setattr__(
                self,
                "total_s",
                total_delay(self.queue_s, self.processing_s, self.transmission_s, self.propagation_s),
            )


@dataclass(frozen=True)
class PerformanceMetrics:
    n_users: int
    r_total_rps: float
    r_served_rps: float
    rho: float
    delays: DelayBreakdown
    utilization_pct: float
    throughput_bps: float
    queue_drops_pps: float
    server_drops_rps: float
    saturated: bool


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and not math.isnan(x)


def total_request_rate(r_user: float, n: int) -> float:
    return r_user * n


def traffic_intensity(packet_size_bits: float, r_total: float, bandwidth_bps: float) -> float:
    """Offered bit rate over link bandwidth."""
    return packet_size_bits * r_total / bandwidth_bps


def queuing_delay(rho: float, service_time_s: float, queue_limit: int, modes: ModelModes = ModelModes()) -> float:
    """Waiting time before transmission.

    Below saturation this is ``rho / (1 - rho)``, either taken as seconds
    verbatim or scaled by the per-packet service time (the M/M/1 mean wait).
    At ``rho >= 1`` the result is ``inf`` or, under the capped policy, the
    time to drain a full queue of ``queue_limit`` packets.
    """
    if rho >= 1:
        if modes.saturation_policy is SaturationPolicy.CAPPED:
            return queue_limit * service_time_s
        return math.inf
    ratio = rho / (1 - rho)
    if modes.queue_delay_mode is QueueDelayMode.LITERAL_SECONDS:
        return ratio
    return ratio * service_time_s


def processing_delay(r_served: float, capacity_rps: float, modes: ModelModes = ModelModes()) -> float:
    if modes.processing_mode is ProcessingMode.DISABLED:
        return 0.0
    return r_served / capacity_rps


def transmission_delay(packet_size_bits: float, bandwidth_bps: float) -> float:
    return packet_size_bits / bandwidth_bps


def propagation_delay(length_m: float, speed_mps: float) -> float:
    return length_m / speed_mps


def total_delay(queue_s: float, processing_s: float, transmission_s: float, propagation_s: float) -> float:
    # summation order is fixed so the total is reproducible bit for bit
    return queue_s + processing_s + transmission_s + propagation_s


def served_rate_and_server_drops(r_total: float, capacity_rps: float) -> tuple[float, float]:
    r_served = min(r_total, capacity_rps)
    return r_served, r_total - r_served


def server_utilization(r_served: float, capacity_rps: float) -> float:
    return r_served / capacity_rps * 100


def queue_drops(r_total: float, bandwidth_bps: float, packet_size_bits: float, queue_limit: int) -> float:
    """Excess arrivals over link capacity, clamped to ``[0, queue_limit]``."""
    return max(0.0, min(r_total - bandwidth_bps / packet_size_bits, float(queue_limit)))


def throughput(
    r_served: float,
    packet_size_bits: float,
    total_delay_s: float,
    bandwidth_bps: float,
    saturated: bool,
    modes: ModelModes = ModelModes(),
) -> float:
    """Delivered bit rate.

    ``paper``: carried load ``min(r_served*S, B)``, zero once saturated.
    ``carried-capped``: carried load regardless of saturation.
    ``literal-eq9``: ``r_served*S / total_delay_s`` (bits/s^2 as written).
    """
    offered_bps = r_served * packet_size_bits
    mode = modes.throughput_mode
    if mode is ThroughputMode.LITERAL_EQ9:
        if math.isinf(total_delay_s):
            return 0.0
        if total_delay_s == 0:
            return math.inf if offered_bps > 0 else 0.0
        return offered_bps / total_delay_s
    if mode is ThroughputMode.PAPER and saturated:
        return 0.0
    return min(offered_bps, bandwidth_bps)


def evaluate_point(config: NetworkConfig, modes: ModelModes, n: int) -> PerformanceMetrics:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be an integer >= 0, got {n!r}")
    S, B = config.packet_size_bits, config.bandwidth_bps
    capacity = config.server_capacity_rps

    r_total = total_request_rate(config.per_user_request_rate_rps, n)
    # per-user intensity times n keeps rho exactly linear in n
    rho = n * traffic_intensity(S, config.per_user_request_rate_rps, B)
    saturated = rho >= 1
    r_served, server_drops = served_rate_and_server_drops(r_total, capacity)

    service = transmission_delay(S, B)
    delays = DelayBreakdown(
        queue_s=queuing_delay(rho, service, config.queue_limit_packets, modes),
        processing_s=processing_delay(r_served, capacity, modes),
        transmission_s=service,
        propagation_s=propagation_delay(config.cable_length_m, config.propagation_speed_mps),
    )
    return PerformanceMetrics(
        n_users=n,
        r_total_rps=r_total,
        r_served_rps=r_served,
        rho=rho,
        delays=delays,
        utilization_pct=server_utilization(r_served, capacity),
        throughput_bps=throughput(r_served, S, delays.total_s, B, saturated, modes),
        queue_drops_pps=queue_drops(r_total, B, S, config.queue_limit_packets),
        server_drops_rps=server_drops,
        saturated=saturated,
    )
