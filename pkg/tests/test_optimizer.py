import random

import pytest

from dtsim.catalog import Precision, default_catalog, max_model_params
from dtsim.efficiency import DilocoConfig, Mode
from dtsim.errors import InfeasibleConfigError, InfeasibleTargetError
from dtsim.network import NetworkConditions
from dtsim.optimizer import (
    MODE_ORDER,
    OptimizationRequest,
    SearchSpace,
    bandwidth_sweep,
    countermeasure_impact,
    geometric_node_counts,
    log_spaced_models,
    max_unregistered_node_model,
    min_cost_config,
)
from dtsim.policy import node_registrable, regime_by_name
from dtsim.run_model import RunConfig, simulate

CATALOG = default_catalog()
SCHER = regime_by_name("scher")
AMENDED = regime_by_name("scher-amended")


def oracle_min_cost(req: OptimizationRequest):
    """Independent exhaustive enumeration: simulate every grid point and take
    the cheapest feasible one under the documented tie-break."""
    best_key, best = None, None
    nodes = [
        n
        for n in (req.catalog_subset or CATALOG.priced())
        if not node_registrable(n, req.regime).registrable
    ]
    for node in sorted(nodes, key=lambda n: n.name):
        precision = Precision.FP8 if node.supports_fp8 else Precision.FP16
        for mode in req.grids.modes:
            stage_list = (
                [s for s in req.grids.stage_grid if s > 1]
                if mode is Mode.PIPELINE
                else [1]
            )
            for stages in stage_list:
                models = log_spaced_models(
                    max_model_params(node.node_hbm * stages, precision),
                    req.grids.model_points,
                )
                for count in req.grids.n_nodes_grid:
                    n_nodes = count * stages if mode is Mode.PIPELINE else count
                    for h in req.grids.h_grid:
                        for model in models:
                            cfg = RunConfig(
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
                                scenario=req.scenario,
                                tokens_per_step=req.tokens_per_step,
                                efficiency=req.efficiency,
                                chinchilla=req.chinchilla,
                            )
                            try:
                                metrics = simulate(cfg)
                            except InfeasibleConfigError:
                                continue
                            value = (
                                metrics.c_local
                                if req.target_metric == "c_local"
                                else metrics.c_quality
                            )
                            if value < req.target_value:
                                continue
                            key = (
                                metrics.cost,
                                n_nodes,
                                h,
                                model,
                                MODE_ORDER[mode],
                                stages,
                                node.name,
                            )
                            if best_key is None or key < best_key:
                                best_key, best = key, cfg
    return best


def small_request(**overrides) -> OptimizationRequest:
    base = dict(
        target_metric="c_local",
        target_value=5e23,
        regime=SCHER,
        net=NetworkConditions.symmetric_mbps(100.0),
        catalog_subset=(CATALOG.lookup("16xH100"), CATALOG.lookup("50xA100")),
        grids=SearchSpace(
            h_grid=(1, 8, 32),
            n_nodes_grid=(1, 2, 4, 8, 16),
            model_points=4,
            modes=(Mode.FLAT,),
            stage_grid=(1, 2),
        ),
    )
    base.update(overrides)
    return OptimizationRequest(**base)


def assert_same_config(result, expected_cfg):
    got = result.config
    assert got.node.name == expected_cfg.node.name
    assert got.n_nodes == expected_cfg.n_nodes
    assert got.diloco.h == expected_cfg.diloco.h
    assert got.diloco.mode == expected_cfg.diloco.mode
    assert got.diloco.stages == expected_cfg.diloco.stages
    assert got.model_params == expected_cfg.model_params


def test_tiny_grid_matches_oracle_exactly():
    req = small_request()
    assert_same_config(min_cost_config(req, CATALOG), oracle_min_cost(req))


def test_randomized_requests_match_oracle():
    rng = random.Random(20260809)
    presets = [n.name for n in CATALOG.priced()]
    for trial in range(10):
        subset = tuple(
            CATALOG.lookup(name)
            for name in rng.sample(presets, k=rng.randint(1, 3))
        )
        modes = rng.choice(
            [(Mode.FLAT,), (Mode.FLAT, Mode.PIPELINE), (Mode.FLAT, Mode.HIERARCHICAL)]
        )
        req = small_request(
            target_metric=rng.choice(["c_local", "c_quality"]),
            target_value=rng.choice([1e23, 5e23, 2e24]),
            net=NetworkConditions.symmetric_mbps(rng.choice([30.0, 100.0, 1000.0])),
            catalog_subset=subset,
            grids=SearchSpace(
                h_grid=tuple(sorted(rng.sample(range(1, 65), k=3))),
                n_nodes_grid=tuple(sorted(rng.sample(range(1, 60), k=4))),
                model_points=3,
                modes=modes,
                stage_grid=(1, 2),
            ),
        )
        expected = oracle_min_cost(req)
        if expected is None:
            with pytest.raises(InfeasibleTargetError):
                min_cost_config(req, CATALOG)
        else:
            assert_same_config(min_cost_config(req, CATALOG), expected)


def test_zero_target_trivially_satisfied():
    result = min_cost_config(small_request(target_value=0.0), CATALOG)
    assert result.config is None
    assert result.cost == 0.0
    assert "zero-target" in result.binding_constraints


def test_infeasible_target_reports_best():
    req = small_request(target_value=1e30)
    with pytest.raises(InfeasibleTargetError) as err:
        min_cost_config(req, CATALOG)
    assert 0 < err.value.best_achieved < 1e30


def test_deterministic_and_order_invariant():
    req = small_request()
    a = min_cost_config(req, CATALOG)
    b = min_cost_config(req, CATALOG)
    assert_same_config(a, b.config)
    flipped = small_request(
        catalog_subset=(CATALOG.lookup("50xA100"), CATALOG.lookup("16xH100"))
    )
    c = min_cost_config(flipped, CATALOG)
    assert_same_config(a, c.config)


def test_result_passes_simulate_roundtrip():
    result = min_cost_config(small_request(), CATALOG)
    metrics = simulate(result.config)
    assert metrics.cost == result.cost
    assert metrics.c_local >= 5e23


def test_regime_filters_nodes():
    req = small_request(
        regime=AMENDED,
        catalog_subset=(CATALOG.lookup("50xA100"), CATALOG.lookup("16xH100")),
    )
    result = min_cost_config(req, CATALOG)
    assert result.config.node.name == "16xH100"
    assert not node_registrable(result.config.node, AMENDED).registrable


def test_tightening_constraints_never_cheaper():
    base = min_cost_config(small_request(), CATALOG)
    tighter_bw = min_cost_config(
        small_request(net=NetworkConditions.symmetric_mbps(10.0)), CATALOG
    )
    shorter = min_cost_config(small_request(duration_days=370.0), CATALOG)
    amended = min_cost_config(small_request(regime=AMENDED), CATALOG)
    for tightened in (tighter_bw, shorter, amended):
        assert tightened.cost >= base.cost - 1e-9


def test_bandwidth_sweep_monotone_small_grid():
    req = small_request(target_value=2e24)
    rows = bandwidth_sweep(req, [10.0, 30.0, 100.0, 1000.0], CATALOG)
    costs = [row.result.cost for row in rows]
    assert all(a >= b - 1e-9 for a, b in zip(costs, costs[1:]))


def test_countermeasure_identical_regimes():
    cmp = countermeasure_impact(small_request(), SCHER, SCHER, CATALOG)
    assert cmp.cost_ratio == pytest.approx(1.0)
    assert cmp.node_ratio == pytest.approx(1.0)


def test_max_unregistered_node_model():
    assert max_unregistered_node_model(SCHER, CATALOG) == pytest.approx(250e9)
    assert max_unregistered_node_model(AMENDED, CATALOG) == pytest.approx(1280e9 / 14.0)


def test_grid_helpers():
    counts = geometric_node_counts(1, 100)
    assert counts[0] == 1 and counts[-1] == 100
    assert list(counts) == sorted(set(counts))
    models = log_spaced_models(91.43e9, 64)
    assert len(models) == 64
    assert models[0] == pytest.approx(1e9)
    assert models[-1] == 91.43e9  # endpoint exact, not rounded through logs
    assert log_spaced_models(5e8, 64) == (5e8,)


def test_search_space_validation():
    with pytest.raises(ValueError):
        SearchSpace(h_grid=())
    with pytest.raises(ValueError):
        SearchSpace(n_nodes_grid=(4, 2))
    with pytest.raises(ValueError):
        OptimizationRequest(
            target_metric="cost",
            target_value=1.0,
            regime=SCHER,
            net=NetworkConditions.symmetric_mbps(100),
        )
