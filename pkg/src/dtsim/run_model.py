"""End-to-end scenario evaluation: one RunMetrics per RunConfig.

The chain is: nominal throughput (nodes x FLOP/s x MFU x time, stretched by
any communication slowdown), times the inefficiency factor eta for
local-equivalent compute, times the quality penalty chi for quality-adjusted
compute. Both identities hold bit-exactly on the returned metrics:

    c_local   = c_throughput * eta.eta
    c_quality = c_local * chi
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from . import network
from .catalog import NodeSpec, Precision, cluster_cost, max_model_params
from .efficiency import (
    DEFAULT_TOKENS_PER_STEP,
    DilocoConfig,
    EfficiencyBreakdown,
    EfficiencyParams,
    Mode,
    ScenarioMode,
    total_inefficiency,
)
from .errors import InfeasibleConfigError, UnboundedTimeError, UnpricedNodeError
from .network import NetworkConditions, TrafficProfile
from .scaling import (
    DEFAULT_R_OPT,
    ChinchillaParams,
    TrainedModel,
    overtraining_ratio,
    quality_penalty,
)

SECONDS_PER_DAY = 86400.0
DAYS_PER_YEAR = 365.25
GPU_HOURS_PER_FAILURE = 50000.0

DEFAULT_DURATION_DAYS = 740.0
DEFAULT_MFU = 0.40


@dataclass(frozen=True)
class GrowthRates:
    """Annual growth factors minus one, e.g. 0.5 for 1.5x per year."""

    g_h: float  # hardware efficiency
    g_s: float  # software efficiency
    g_i: float  # investment

    def __post_init__(self):
        if min(self.g_h, self.g_s, self.g_i) < 0:
            raise ValueError("growth rates must be >= 0")


def max_training_time(rates: GrowthRates) -> float:
    """Longest worthwhile training run, in days.

    A run longer than 1 / (sum of continuous growth rates) years is overtaken
    by a later start on better hardware, software, and budget.
    """
    total = (
        math.log1p(rates.g_h) + math.log1p(rates.g_s) + math.log1p(rates.g_i)
    )
    if total == 0:
        raise UnboundedTimeError("all growth rates are zero; no finite bound")
    return DAYS_PER_YEAR / total


def expected_hardware_failures(total_chips: int, duration_days: float) -> float:
    """Expected failure count at one failure per 50,000 chip-hours."""
    if total_chips < 0 or duration_days < 0:
        raise ValueError("inputs must be non-negative")
    return total_chips * duration_days * 24.0 / GPU_HOURS_PER_FAILURE


@dataclass(frozen=True)
class RunConfig:
    """A full training scenario."""

    node: NodeSpec
    n_nodes: int
    diloco: DilocoConfig
    net: NetworkConditions
    duration_days: float = DEFAULT_DURATION_DAYS
    mfu: float = DEFAULT_MFU
    precision: Precision = Precision.FP8
    model_params: float | str = "auto"  # parameter count, or memory-max
    scenario: ScenarioMode = ScenarioMode.EXPECTED
    tokens_per_step: float = DEFAULT_TOKENS_PER_STEP
    efficiency: EfficiencyParams | None = None  # None -> for_scenario(scenario)
    chinchilla: ChinchillaParams | None = None
    r_opt: float = DEFAULT_R_OPT
    label: str = ""

    def efficiency_params(self) -> EfficiencyParams:
        if self.efficiency is not None:
            return self.efficiency
        return EfficiencyParams.for_scenario(self.scenario)

    def chinchilla_params(self) -> ChinchillaParams:
        return self.chinchilla or ChinchillaParams()


@dataclass(frozen=True)
class RunMetrics:
    """Simulated outcome of one RunConfig."""

    c_throughput: float
    eta: EfficiencyBreakdown
    c_local: float
    chi: float
    c_quality: float
    d_tokens: float
    ot: float
    model_params: float
    replicas: int
    cost: float | None
    traffic: TrafficProfile
    expected_failures: float
    warnings: tuple[str, ...] = ()


class PointMetrics(NamedTuple):
    """Core numbers for one grid point, shared by simulate and the optimizer."""

    model_params: float
    replicas: int
    c_throughput: float
    breakdown: EfficiencyBreakdown
    c_local: float
    chi: float
    c_quality: float
    traffic: TrafficProfile


def resolve_replicas(mode: Mode, n_nodes: int, stages: int) -> int:
    """Model copies participating in the global average.

    Flat and hierarchical runs keep one copy per node; pipeline runs keep one
    per group of `stages` nodes.
    """
    if mode is Mode.PIPELINE:
        if n_nodes % stages != 0:
            raise InfeasibleConfigError(
                "pipeline-divisibility",
                f"n_nodes={n_nodes} not divisible by stages={stages}",
            )
        return n_nodes // stages
    return n_nodes


def evaluate_point(
    node: NodeSpec,
    n_nodes: int,
    diloco: DilocoConfig,
    net: NetworkConditions,
    duration_days: float,
    mfu: float,
    precision: Precision,
    model_params: float | str,
    tokens_per_step: float,
    eff: EfficiencyParams,
    chinchilla: ChinchillaParams,
    r_opt: float = DEFAULT_R_OPT,
) -> PointMetrics:
    """Evaluate one configuration point. Raises InfeasibleConfigError."""
    if n_nodes < 1:
        raise InfeasibleConfigError("n_nodes", f"n_nodes={n_nodes} must be >= 1")

    replicas = resolve_replicas(diloco.mode, n_nodes, diloco.stages)
    node_flops = node.node_flops(precision)  # raises on missing FP8
    group_flops = node_flops * diloco.stages
    group_hbm = node.node_hbm * diloco.stages

    mem_max = max_model_params(group_hbm, precision)
    if model_params == "auto":
        n_params = mem_max
    else:
        n_params = float(model_params)
        if n_params > mem_max:
            raise InfeasibleConfigError(
                "memory",
                f"model of {n_params:.3e} params exceeds the {group_hbm:.0f} GB"
                f" group limit of {mem_max:.3e} params at {precision.value}",
            )
    if n_params <= 0:
        raise InfeasibleConfigError("model", "model_params must be positive")

    t_step = network.step_time(n_params, tokens_per_step, group_flops, mfu)
    payload = network.sync_payload(n_params, diloco.compression)
    traffic = network.compute_bound_check(diloco.h, net, t_step, payload)

    diloco = replace(diloco, replicas=replicas)
    breakdown = total_inefficiency(diloco, n_params, eff, tokens_per_step)

    duration_s = duration_days * SECONDS_PER_DAY
    c_throughput = n_nodes * node_flops * mfu * duration_s / traffic.slowdown
    c_local = c_throughput * breakdown.eta
    model = TrainedModel(n_params=n_params, d_tokens=c_local / (6.0 * n_params))
    chi = quality_penalty(model, chinchilla)
    c_quality = c_local * chi
    return PointMetrics(
        model_params=n_params,
        replicas=replicas,
        c_throughput=c_throughput,
        breakdown=breakdown,
        c_local=c_local,
        chi=chi,
        c_quality=c_quality,
        traffic=traffic,
    )


def simulate(cfg: RunConfig) -> RunMetrics:
    """Evaluate a RunConfig into RunMetrics. Pure and deterministic."""
    if cfg.duration_days <= 0:
        raise InfeasibleConfigError("duration", "duration_days must be positive")

    point = evaluate_point(
        node=cfg.node,
        n_nodes=cfg.n_nodes,
        diloco=cfg.diloco,
        net=cfg.net,
        duration_days=cfg.duration_days,
        mfu=cfg.mfu,
        precision=cfg.precision,
        model_params=cfg.model_params,
        tokens_per_step=cfg.tokens_per_step,
        eff=cfg.efficiency_params(),
        chinchilla=cfg.chinchilla_params(),
        r_opt=cfg.r_opt,
    )

    warnings: list[str] = []
    if point.breakdown.clamped:
        warnings.append(
            "efficiency factor clamped: " + ", ".join(point.breakdown.clamped)
        )
    if not point.traffic.compute_bound:
        warnings.append(
            f"not compute-bound: sync takes {point.traffic.slowdown:.2f}x the"
            f" local-step budget; wall time stretched accordingly"
        )
    if cfg.diloco.groups is not None:
        outer, inner = cfg.diloco.groups
        if outer * inner != cfg.n_nodes:
            warnings.append(
                f"hierarchical groups {outer}x{inner} do not multiply out to"
                f" n_nodes={cfg.n_nodes}; divergence uses the node count"
            )

    try:
        cost = cluster_cost(cfg.node, cfg.n_nodes)
    except UnpricedNodeError:
        cost = None
        warnings.append(f"node {cfg.node.name!r} carries no price; cost omitted")

    model = TrainedModel(point.model_params, point.c_local / (6.0 * point.model_params))
    return RunMetrics(
        c_throughput=point.c_throughput,
        eta=point.breakdown,
        c_local=point.c_local,
        chi=point.chi,
        c_quality=point.c_quality,
        d_tokens=model.d_tokens,
        ot=overtraining_ratio(model, cfg.r_opt),
        model_params=point.model_params,
        replicas=point.replicas,
        cost=cost,
        traffic=point.traffic,
        expected_failures=expected_hardware_failures(
            cfg.node.chips_per_node * cfg.n_nodes, cfg.duration_days
        ),
        warnings=tuple(warnings),
    )
