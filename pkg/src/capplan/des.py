"""Discrete-event simulation of a single FIFO link queue with a finite
waiting room, used to check the analytic queueing delay and drop rate.

Arrivals are Poisson.  The packet in service does not count against the
queue capacity.  Events are processed in time order, and a departure due at
the same instant as an arrival is processed first.  Arrivals and service
draw from separate PCG64 streams spawned from the run seed.
"""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .model import NetworkConfig, QueueDelayMode, ModelModes, SaturationPolicy, queuing_delay

GENERATOR = "numpy.random.PCG64"


class ServiceDistribution(str, enum.Enum):
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class SimConfig:
    arrival_rate_rps: float
    mean_service_time_s: float = 1.2e-4
    service_distribution: ServiceDistribution = ServiceDistribution.EXPONENTIAL
    queue_capacity_packets: int = 1000
    warmup_arrivals: int | None = None  # None -> 10% of measured
    measured_arrivals: int = 1_000_000
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "service_distribution", ServiceDistribution(self.service_distribution))
        if not self.arrival_rate_rps > 0:
            raise ValueError("arrival_rate_rps must be > 0")
        if not self.mean_service_time_s > 0:
            raise ValueError("mean_service_time_s must be > 0")
        if self.queue_capacity_packets < 0:
            raise ValueError("queue_capacity_packets must be >= 0")
        if self.measured_arrivals <= 0:
            raise ValueError("measured_arrivals must be > 0")
        if self.warmup_arrivals is None:
            object.__setattr__(self, "warmup_arrivals", self.measured_arrivals // 10)
        elif self.warmup_arrivals < 0:
            raise ValueError("warmup_arrivals must be >= 0")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 bits")


@dataclass(frozen=True)
class SimStats:
    mean_wait_s: float
    mean_system_time_s: float
    drop_rate_pps: float
    drop_fraction: float
    observed_utilization: float
    sample_count: int
    # whole-run counters, warmup included
    arrivals: int = 0
    departures: int = 0
    drops: int = 0
    in_system_at_end: int = 0
    generator: str = GENERATOR


def _completion_epochs(rng: np.random.Generator, mean: float, chunk: int):
    """Endless increasing stream of potential service-completion times."""
    offset = 0.0
    while True:
        epochs = offset + np.cumsum(rng.exponential(mean, size=chunk))
        offset = float(epochs[-1])
        yield from epochs.tolist()


def simulate_queue(sim: SimConfig) -> SimStats:
    """Run one replication and return steady-state statistics.

    Statistics cover the measured arrivals only; the whole-run counters
    (``arrivals``, ``departures``, ``drops``, ``in_system_at_end``) are
    taken at the last arrival.
    """
    arrival_seq, service_seq = np.random.SeedSequence(sim.rng_seed).spawn(2)
    warmup = sim.warmup_arrivals
    total = warmup + sim.measured_arrivals
    arrivals = np.cumsum(
        np.random.Generator(np.random.PCG64(arrival_seq)).exponential(1.0 / sim.arrival_rate_rps, size=total)
    )
    service_rng = np.random.Generator(np.random.PCG64(service_seq))
    if sim.service_distribution is ServiceDistribution.EXPONENTIAL:
        return _run_memoryless(sim, arrivals, service_rng)
    return _run_fixed_service(sim, arrivals)


def _window(arrivals: np.ndarray, warmup: int) -> tuple[float, float]:
    t_start = float(arrivals[warmup - 1]) if warmup else 0.0
    return t_start, float(arrivals[-1])


def _overlap(a: float, b: float, lo: float, hi: float) -> float:
    return max(0.0, min(b, hi) - max(a, lo))


def _run_memoryless(sim: SimConfig, arrivals: np.ndarray, service_rng: np.random.Generator) -> SimStats:
    # Exponential service is driven by a Poisson clock of potential
    # completions (uniformization).  Runs that differ only in queue capacity
    # then share both event streams, which makes losses monotone in K.
    warmup = sim.warmup_arrivals
    t_start, t_end = _window(arrivals, warmup)
    clock = _completion_epochs(service_rng, sim.mean_service_time_s, 65536)
    next_completion = next(clock)
    max_in_system = sim.queue_capacity_packets + 1

    system: deque[tuple[float, bool]] = deque()  # (arrival time, measured), head in service
    head_start = 0.0
    busy_since = 0.0
    busy = 0.0
    drops = measured_drops = departures = 0
    wait_sum = system_sum = 0.0
    sample_count = 0

    def complete(t: float) -> None:
        nonlocal head_start, busy, departures, wait_sum, system_sum, sample_count
        arrived, measured = system.popleft()
        departures += 1
        if measured:
            wait_sum += head_start - arrived
            system_sum += t - arrived
            sample_count += 1
        if system:
            head_start = t
        else:
            busy += _overlap(busy_since, t, t_start, t_end)

    for i, t in enumerate(arrivals.tolist()):
        # completions at or before an arrival's timestamp go first
        while next_completion <= t:
            if system:
                complete(next_completion)
            next_completion = next(clock)
        if len(system) >= max_in_system:
            drops += 1
            measured_drops += i >= warmup
            continue
        if not system:
            head_start = busy_since = t
        system.append((t, i >= warmup))

    departures_at_end = departures
    in_system_at_end = len(system)
    if system:
        busy += _overlap(busy_since, t_end, t_start, t_end)
    # drain so every measured packet contributes its wait
    while system:
        t = next_completion
        arrived, measured = system.popleft()
        if measured:
            wait_sum += head_start - arrived
            system_sum += t - arrived
            sample_count += 1
        head_start = t
        next_completion = next(clock)

    return _stats(sim, t_start, t_end, wait_sum, system_sum, sample_count, measured_drops, busy,
                  departures_at_end, drops, in_system_at_end)


def _run_fixed_service(sim: SimConfig, arrivals: np.ndarray) -> SimStats:
    # FIFO on one transmitter: pending departures are already time-ordered
    warmup = sim.warmup_arrivals
    t_start, t_end = _window(arrivals, warmup)
    service = sim.mean_service_time_s
    max_in_system = sim.queue_capacity_packets + 1
    pending: deque[float] = deque()
    last_departure = 0.0
    drops = measured_drops = accepted = 0
    wait_sum = system_sum = busy = 0.0
    sample_count = 0

    for i, t in enumerate(arrivals.tolist()):
        while pending and pending[0] <= t:
            pending.popleft()
        if len(pending) >= max_in_system:
            drops += 1
            measured_drops += i >= warmup
            continue
        start = t if t > last_departure else last_departure
        last_departure = start + service
        pending.append(last_departure)
        accepted += 1
        busy += _overlap(start, last_departure, t_start, t_end)
        if i >= warmup:
            wait_sum += start - t
            system_sum += last_departure - t
            sample_count += 1

    while pending and pending[0] <= t_end:
        pending.popleft()
    return _stats(sim, t_start, t_end, wait_sum, system_sum, sample_count, measured_drops, busy,
                  accepted - len(pending), drops, len(pending))


def _stats(sim, t_start, t_end, wait_sum, system_sum, sample_count, measured_drops, busy,
           departures, drops, in_system_at_end) -> SimStats:
    duration = t_end - t_start
    return SimStats(
        mean_wait_s=wait_sum / sample_count if sample_count else 0.0,
        mean_system_time_s=system_sum / sample_count if sample_count else 0.0,
        drop_rate_pps=measured_drops / duration if duration > 0 else 0.0,
        drop_fraction=measured_drops / sim.measured_arrivals,
        observed_utilization=min(1.0, busy / duration) if duration > 0 else 0.0,
        sample_count=sample_count,
        arrivals=sim.warmup_arrivals + sim.measured_arrivals,
        departures=departures,
        drops=drops,
        in_system_at_end=in_system_at_end,
    )


@dataclass(frozen=True)
class QuantityCheck:
    name: str
    observed: float
    predicted: float | None
    rel_tolerance: float
    passed: bool | None  # None when there is no finite prediction

    @property
    def rel_error(self) -> float | None:
        if self.predicted is None:
            return None
        return abs(self.observed - self.predicted) / max(self.predicted, EPSILON)


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[QuantityCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)


EPSILON = 1e-12


def _check(name: str, observed: float, predicted: float | None, tol: float) -> QuantityCheck:
    if predicted is None or not math.isfinite(predicted):
        return QuantityCheck(name, observed, None, tol, None)
    ok = abs(observed - predicted) <= tol * max(predicted, EPSILON)
    return QuantityCheck(name, observed, predicted, tol, ok)


def validate_against_analytic(
    stats: SimStats,
    predicted_wait_s: float | None,
    predicted_drop_pps: float | None,
    rel_tolerance: float = 0.05,
) -> ValidationReport:
    """Compare simulated wait and drop rate with analytic predictions.

    An infinite or missing prediction is reported as skipped rather than
    failed.
    """
    if not rel_tolerance > 0:
        raise ValueError("rel_tolerance must be > 0")
    return ValidationReport(
        checks=(
            _check("mean_wait_s", stats.mean_wait_s, predicted_wait_s, rel_tolerance),
            _check("drop_rate_pps", stats.drop_rate_pps, predicted_drop_pps, rel_tolerance),
        )
    )


def analytic_predictions(config: NetworkConfig, n: int) -> tuple[float, float]:
    """(mean queueing wait, drop rate) the analytic model predicts for the
    link queue at ``n`` users.

    The wait always uses the service-scaled form, the only one in seconds;
    the drop rate is the excess over link capacity without the queue-limit
    clamp, which is what a finite buffer sheds in steady state.
    """
    lam = config.per_user_request_rate_rps * n
    rho = n * config.packet_size_bits * config.per_user_request_rate_rps / config.bandwidth_bps
    modes = ModelModes(queue_delay_mode=QueueDelayMode.SERVICE_SCALED, saturation_policy=SaturationPolicy.INFINITE)
    wait = queuing_delay(rho, config.service_time_s, config.queue_limit_packets, modes)
    drop = max(0.0, lam - config.link_capacity_pps)
    return wait, drop


def sim_config_for_load(
    config: NetworkConfig,
    n: int,
    *,
    seed: int,
    measured_arrivals: int = 200_000,
    service_distribution: ServiceDistribution = ServiceDistribution.EXPONENTIAL,
) -> SimConfig:
    if n <= 0:
        raise ValueError("the oracle needs at least one user to generate arrivals")
    return SimConfig(
        arrival_rate_rps=config.per_user_request_rate_rps * n,
        mean_service_time_s=config.service_time_s,
        service_distribution=service_distribution,
        queue_capacity_packets=config.queue_limit_packets,
        measured_arrivals=measured_arrivals,
        rng_seed=seed,
    )
