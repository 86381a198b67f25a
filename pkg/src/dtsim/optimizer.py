"""Minimum-cost configuration search over an explicit grid.

The search space is the product of node type, mode, pipeline stages, node
count, inner-step count, and model size. Every point is evaluated through the
same code path as simulate(), feasibility-filtered (memory, node
registrability, the communication slowdown applied), and the cheapest point
reaching the target is returned under a deterministic tie-break: lower cost,
then fewer nodes, then smaller h, then smaller model, then mode order
(flat < hierarchical < pipeline), then fewer stages, then preset name.

Exhaustive enumeration with one lossless prune: within a node type and mode,
node counts are scanned in ascending order, so the scan stops as soon as the
hardware cost alone exceeds the incumbent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .catalog import (
    Catalog,
    NodeSpec,
    Precision,
    cluster_cost,
    default_catalog,
    max_model_params,
)
from .efficiency import DEFAULT_TOKENS_PER_STEP, DilocoConfig, EfficiencyParams, Mode, ScenarioMode
from .errors import InfeasibleConfigError, InfeasibleTargetError
from .network import NetworkConditions
from .policy import PolicyRegime, node_registrable
from .run_model import (
    DEFAULT_DURATION_DAYS,
    DEFAULT_MFU,
    RunConfig,
    RunMetrics,
    evaluate_point,
    simulate,
)
from .scaling import ChinchillaParams

MODE_ORDER = {Mode.FLAT: 0, Mode.HIERARCHICAL: 1, Mode.PIPELINE: 2}


def geometric_node_counts(lo: int = 1, hi: int = 10000, ratio: float = 1.05) -> tuple[int, ...]:
    """Deduplicated integer grid growing geometrically from lo to hi."""
    counts = []
    value = float(lo)
    while value <= hi:
        n = round(value)
        if not counts or n > counts[-1]:
            counts.append(n)
        value *= ratio
    if counts[-1] != hi:
        counts.append(hi)
    return tuple(counts)


def log_spaced_models(n_max: float, points: int) -> tuple[float, ...]:
    """Log-spaced model sizes from 1e9 up to exactly n_max."""
    if n_max <= 1e9:
        return (n_max,)
    lg0, lg1 = 9.0, math.log10(n_max)
    grid = [10 ** (lg0 + i * (lg1 - lg0) / (points - 1)) for i in range(points - 1)]
    grid.append(n_max)
    return tuple(grid)


@dataclass(frozen=True)
class SearchSpace:
    h_grid: tuple[int, ...] = tuple(range(1, 129))
    n_nodes_grid: tuple[int, ...] = field(default_factory=geometric_node_counts)
    model_points: int = 64
    modes: tuple[Mode, ...] = (Mode.FLAT, Mode.HIERARCHICAL)
    stage_grid: tuple[int, ...] = (1, 2, 4, 8)

    def __post_init__(self):
        for name, grid in (
            ("h_grid", self.h_grid),
            ("n_nodes_grid", self.n_nodes_grid),
            ("stage_grid", self.stage_grid),
        ):
            if not grid:
                raise ValueError(f"{name} must be non-empty")
            if list(grid) != sorted(grid):
                raise ValueError(f"{name} must be sorted")
        if not self.modes:
            raise ValueError("modes must be non-empty")


@dataclass(frozen=True)
class OptimizationRequest:
    target_metric: str  # "c_local" or "c_quality"
    target_value: float
    regime: PolicyRegime
    net: NetworkConditions
    duration_days: float = DEFAULT_DURATION_DAYS
    catalog_subset: tuple[NodeSpec, ...] | None = None
    grids: SearchSpace = field(default_factory=SearchSpace)
    scenario: ScenarioMode = ScenarioMode.EXPECTED
    mfu: float = DEFAULT_MFU
    tokens_per_step: float = DEFAULT_TOKENS_PER_STEP
    compression: float = 150.0
    chinchilla: ChinchillaParams | None = None
    efficiency: EfficiencyParams | None = None

    def __post_init__(self):
        if self.target_metric not in ("c_local", "c_quality"):
            raise ValueError("target_metric must be 'c_local' or 'c_quality'")
        if self.duration_days <= 0:
            raise ValueError("duration_days must be positive")

    def candidate_nodes(self, catalog: Catalog | None = None) -> list[NodeSpec]:
        """Priced presets that stay unregistered under the request's regime."""
        pool = (
            list(self.catalog_subset)
            if self.catalog_subset is not None
            else (catalog or default_catalog()).priced()
        )
        legal = [n for n in pool if not node_registrable(n, self.regime).registrable]
        return sorted(legal, key=lambda n: n.name)

    def efficiency_params(self) -> EfficiencyParams:
        return self.efficiency or EfficiencyParams.for_scenario(self.scenario)

    def chinchilla_params(self) -> ChinchillaParams:
        return self.chinchilla or ChinchillaParams()


@dataclass(frozen=True)
class OptimalConfig:
    config: RunConfig | None  # None only for a zero target
    metrics: RunMetrics | None
    cost: float
    binding_constraints: tuple[str, ...] = ()


def _node_precision(node: NodeSpec) -> Precision:
    # FP8 doubles throughput and packs more parameters per GB; always best
    # where the chip supports it.
    return Precision.FP8 if node.supports_fp8 else Precision.FP16


def candidate_points(req: OptimizationRequest, catalog: Catalog | None = None):
    """Yield (node, mode, stages, n_nodes, h, model) over the full grid.

    This is the grid *definition*; min_cost_config and any independent checker
    must agree on it. Pipeline entries read n_nodes_grid as replica counts.
    """
    space = req.grids
    for node in req.candidate_nodes(catalog):
        precision = _node_precision(node)
        for mode in space.modes:
            stage_list = (
                tuple(s for s in space.stage_grid if s > 1)
                if mode is Mode.PIPELINE
                else (1,)
            )
            for stages in stage_list:
                mem_max = max_model_params(node.node_hbm * stages, precision)
                models = log_spaced_models(mem_max, space.model_points)
                for count in space.n_nodes_grid:
                    n_nodes = count * stages if mode is Mode.PIPELINE else count
                    for h in space.h_grid:
                        for model in models:
                            yield node, mode, stages, n_nodes, h, model


def _build_config(req: OptimizationRequest, node, mode, stages, n_nodes, h, model) -> RunConfig:
    return RunConfig(
        node=node,
        n_nodes=n_nodes,
        diloco=DilocoConfig(
            h=h, compression=req.compression, mode=mode, stages=stages
        ),
        net=req.net,
        duration_days=req.duration_days,
        mfu=req.mfu,
        precision=_node_precision(node),
        model_params=model,
        scenario=req.scenario,
        tokens_per_step=req.tokens_per_step,
        efficiency=req.efficiency,
        chinchilla=req.chinchilla,
    )


def min_cost_config(req: OptimizationRequest, catalog: Catalog | None = None) -> OptimalConfig:
    """Cheapest grid point whose target metric reaches target_value."""
    if req.target_value <= 0:
        return OptimalConfig(config=None, metrics=None, cost=0.0,
                             binding_constraints=("zero-target",))

    space = req.grids
    eff = req.efficiency_params()
    chin = req.chinchilla_params()
    duration_s = req.duration_days * 86400.0
    best_key: tuple | None = None
    best: tuple | None = None  # (node, mode, stages, n_nodes, h, model)
    best_achieved = 0.0

    for node in req.candidate_nodes(catalog):
        precision = _node_precision(node)
        node_cost_unit = cluster_cost(node, 1)
        node_flops = node.node_flops(precision)
        for mode in space.modes:
            if mode is Mode.HIERARCHICAL and Mode.FLAT in space.modes:
                # identical metrics to flat at every grid point, and flat wins
                # the tie-break, so these points can never become the argmin
                continue
            stage_list = (
                tuple(s for s in space.stage_grid if s > 1)
                if mode is Mode.PIPELINE
                else (1,)
            )
            for stages in stage_list:
                mem_max = max_model_params(node.node_hbm * stages, precision)
                models = log_spaced_models(mem_max, space.model_points)
                for count in space.n_nodes_grid:
                    n_nodes = count * stages if mode is Mode.PIPELINE else count
                    cost = node_cost_unit * n_nodes
                    if best_key is not None and cost > best_key[0]:
                        break
                    # eta <= 1 and slowdown >= 1 bound the metric from above
                    if n_nodes * node_flops * req.mfu * duration_s < req.target_value:
                        continue
                    hit = None
                    for h in space.h_grid:
                        for model in models:
                            try:
                                point = evaluate_point(
                                    node=node,
                                    n_nodes=n_nodes,
                                    diloco=DilocoConfig(
                                        h=h,
                                        compression=req.compression,
                                        mode=mode,
                                        stages=stages,
                                    ),
                                    net=req.net,
                                    duration_days=req.duration_days,
                                    mfu=req.mfu,
                                    precision=precision,
                                    model_params=model,
                                    tokens_per_step=req.tokens_per_step,
                                    eff=eff,
                                    chinchilla=chin,
                                )
                            except InfeasibleConfigError:
                                continue
                            metric = (
                                point.c_local
                                if req.target_metric == "c_local"
                                else point.c_quality
                            )
                            if metric > best_achieved:
                                best_achieved = metric
                            if metric >= req.target_value:
                                hit = (h, model)
                                break
                        if hit:
                            break
                    if hit:
                        h, model = hit
                        key = (
                            cost,
                            n_nodes,
                            h,
                            model,
                            MODE_ORDER[mode],
                            stages,
                            node.name,
                        )
                        if best_key is None or key < best_key:
                            best_key = key
                            best = (node, mode, stages, n_nodes, h, model)
                        break  # larger counts of this (node, mode, stages) cost more

    if best is None:
        # both metrics are non-decreasing in node count at fixed (h, model),
        # so the grid's best achievable value sits at the largest count
        max_count = req.grids.n_nodes_grid[-1]
        for node in req.candidate_nodes(catalog):
            precision = _node_precision(node)
            for mode in space.modes:
                if mode is Mode.HIERARCHICAL and Mode.FLAT in space.modes:
                    continue
                stage_list = (
                    tuple(s for s in space.stage_grid if s > 1)
                    if mode is Mode.PIPELINE
                    else (1,)
                )
                for stages in stage_list:
                    mem_max = max_model_params(node.node_hbm * stages, precision)
                    models = log_spaced_models(mem_max, space.model_points)
                    n_nodes = max_count * stages if mode is Mode.PIPELINE else max_count
                    for h in space.h_grid:
                        for model in models:
                            try:
                                point = evaluate_point(
                                    node=node,
                                    n_nodes=n_nodes,
                                    diloco=DilocoConfig(
                                        h=h,
                                        compression=req.compression,
                                        mode=mode,
                                        stages=stages,
                                    ),
                                    net=req.net,
                                    duration_days=req.duration_days,
                                    mfu=req.mfu,
                                    precision=precision,
                                    model_params=model,
                                    tokens_per_step=req.tokens_per_step,
                                    eff=eff,
                                    chinchilla=chin,
                                )
                            except InfeasibleConfigError:
                                continue
                            metric = (
                                point.c_local
                                if req.target_metric == "c_local"
                                else point.c_quality
                            )
                            best_achieved = max(best_achieved, metric)
        raise InfeasibleTargetError(req.target_metric, req.target_value, best_achieved)

    node, mode, stages, n_nodes, h, model = best
    config = _build_config(req, node, mode, stages, n_nodes, h, model)
    metrics = simulate(config)  # round-trip validation through the full path
    binding = []
    mem_max = max_model_params(node.node_hbm * stages, _node_precision(node))
    if model == mem_max:
        binding.append("node-memory")
    if not metrics.traffic.compute_bound:
        binding.append("not-compute-bound")
    binding.append(f"regime:{req.regime.name}")
    return OptimalConfig(
        config=config,
        metrics=metrics,
        cost=metrics.cost if metrics.cost is not None else math.nan,
        binding_constraints=tuple(binding),
    )


@dataclass(frozen=True)
class SweepRow:
    bandwidth_mbps: float
    result: OptimalConfig | None
    error: str | None = None


def bandwidth_sweep(
    req: OptimizationRequest,
    bandwidths_mbps: list[float],
    catalog: Catalog | None = None,
) -> list[SweepRow]:
    """One min_cost_config per bandwidth, other constraints unchanged."""
    if not bandwidths_mbps:
        raise ValueError("bandwidths_mbps must be non-empty")
    rows = []
    for mbps in bandwidths_mbps:
        sub = replace(req, net=NetworkConditions.symmetric_mbps(mbps, req.net.rtt))
        try:
            rows.append(SweepRow(bandwidth_mbps=mbps, result=min_cost_config(sub, catalog)))
        except InfeasibleTargetError as exc:
            rows.append(SweepRow(bandwidth_mbps=mbps, result=None, error=str(exc)))
    return rows


@dataclass(frozen=True)
class CountermeasureComparison:
    baseline: OptimalConfig
    amended: OptimalConfig
    cost_ratio: float
    node_ratio: float
    baseline_max_node_model: float
    amended_max_node_model: float


def max_unregistered_node_model(
    regime: PolicyRegime,
    catalog: Catalog | None = None,
    nodes: list[NodeSpec] | None = None,
) -> float:
    """Largest per-node model trainable on any non-registrable preset."""
    pool = nodes if nodes is not None else (catalog or default_catalog()).priced()
    best = 0.0
    for node in pool:
        if node_registrable(node, regime).registrable:
            continue
        best = max(best, max_model_params(node.node_hbm, _node_precision(node)))
    return best


def countermeasure_impact(
    req: OptimizationRequest,
    baseline: PolicyRegime,
    amended: PolicyRegime,
    catalog: Catalog | None = None,
) -> CountermeasureComparison:
    """Cost and node-count impact of tightening a registration regime."""
    base = min_cost_config(replace(req, regime=baseline), catalog)
    tight = min_cost_config(replace(req, regime=amended), catalog)
    base_nodes = base.config.n_nodes if base.config else 0
    tight_nodes = tight.config.n_nodes if tight.config else 0
    return CountermeasureComparison(
        baseline=base,
        amended=tight,
        cost_ratio=tight.cost / base.cost if base.cost else math.inf,
        node_ratio=tight_nodes / base_nodes if base_nodes else math.inf,
        baseline_max_node_model=max_unregistered_node_model(
            baseline, catalog, list(req.catalog_subset) if req.catalog_subset else None
        ),
        amended_max_node_model=max_unregistered_node_model(
            amended, catalog, list(req.catalog_subset) if req.catalog_subset else None
        ),
    )
