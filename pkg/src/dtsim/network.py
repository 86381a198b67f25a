"""Communication model: sync payloads, step timing, the compute-bound
condition, and average traffic.

Pseudo-gradients are 2 bytes per parameter before compression. The effective
link rate is min(up, down) since every replica both sends and receives during
the all-reduce. When a sync does not fit inside h local steps, the residue
serializes and stretches wall time by a uniform slowdown factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

PSEUDO_GRADIENT_BYTES = 2.0


@dataclass(frozen=True)
class NetworkConditions:
    bandwidth_up: float  # bits/s
    bandwidth_down: float  # bits/s
    rtt: float = 100.0  # round-trip time, ms

    def __post_init__(self):
        if self.bandwidth_up <= 0 or self.bandwidth_down <= 0:
            raise ValueError("bandwidth must be positive")
        if self.rtt < 0:
            raise ValueError("rtt must be >= 0")

    @classmethod
    def symmetric_mbps(cls, mbps: float, rtt_ms: float = 100.0) -> "NetworkConditions":
        return cls(bandwidth_up=mbps * 1e6, bandwidth_down=mbps * 1e6, rtt=rtt_ms)

    @property
    def link_rate(self) -> float:
        return min(self.bandwidth_up, self.bandwidth_down)


@dataclass(frozen=True)
class TrafficProfile:
    payload_bytes: float  # per sync per replica
    sync_wall_time: float  # s
    required_bandwidth: float  # bits/s needed to stay compute-bound
    average_traffic: float  # bits/s per node
    compute_bound: bool
    slowdown: float  # >= 1 multiplier on wall time


def sync_payload(n_params: float, compression: float) -> float:
    """Bytes exchanged per replica per sync after compression."""
    if compression < 1:
        raise ValueError("compression must be >= 1")
    return PSEUDO_GRADIENT_BYTES * n_params / compression


def step_time(n_params: float, tokens_per_step: float, node_flops: float, mfu: float) -> float:
    """Seconds per local optimizer step, from C = 6ND applied to one batch.

    node_flops is the full replica's throughput: in pipeline mode, the whole
    group's.
    """
    if not 0 < mfu <= 1:
        raise ValueError("mfu must be in (0, 1]")
    if n_params <= 0 or node_flops <= 0 or tokens_per_step < 0:
        raise ValueError("n_params and node_flops must be positive")
    return 6.0 * n_params * tokens_per_step / (node_flops * mfu)


def compute_bound_check(
    h: int, net: NetworkConditions, t_step: float, payload: float
) -> TrafficProfile:
    """Does a sync hide inside h local steps, and what traffic results?"""
    if h < 1:
        raise ValueError("h must be >= 1")
    if t_step <= 0:
        raise ValueError("t_step must be positive")
    payload_bits = payload * 8.0
    rtt_s = net.rtt / 1000.0
    sync_wall = payload_bits / net.link_rate + rtt_s
    budget = h * t_step
    compute_bound = sync_wall <= budget
    slowdown = max(1.0, sync_wall / budget)
    required = payload_bits / (budget - rtt_s) if budget > rtt_s else math.inf
    return TrafficProfile(
        payload_bytes=payload,
        sync_wall_time=sync_wall,
        required_bandwidth=required,
        average_traffic=payload_bits / (budget * slowdown),
        compute_bound=compute_bound,
        slowdown=slowdown,
    )


def latency_ratio(net: NetworkConditions, payload: float) -> float:
    """Transmission time of one sync payload over the round-trip time."""
    if net.rtt == 0:
        return math.inf
    transmission = payload * 8.0 / net.link_rate
    return transmission / (net.rtt / 1000.0)
