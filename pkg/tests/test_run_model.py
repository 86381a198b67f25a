from dataclasses import replace

import pytest

from dtsim.benchmarks import TABLE1
from dtsim.catalog import Precision, default_catalog
from dtsim.efficiency import DilocoConfig, Mode
from dtsim.errors import InfeasibleConfigError, UnboundedTimeError
from dtsim.network import NetworkConditions
from dtsim.run_model import (
    GrowthRates,
    RunConfig,
    expected_hardware_failures,
    max_training_time,
    simulate,
)

CATALOG = default_catalog()
NET_100 = NetworkConditions.symmetric_mbps(100.0)


def row1_config(**overrides) -> RunConfig:
    cfg = TABLE1[0].run_config(CATALOG)
    return replace(cfg, **overrides) if overrides else cfg


def test_max_training_time_anchors():
    assert max_training_time(GrowthRates(0.06, 0.50, 0.03)) == pytest.approx(740, abs=1)
    assert max_training_time(GrowthRates(0.37, 2.0, 2.5)) == pytest.approx(137, abs=3)


def test_max_training_time_zero_rates():
    with pytest.raises(UnboundedTimeError):
        max_training_time(GrowthRates(0.0, 0.0, 0.0))


def test_expected_failures_examples():
    assert expected_hardware_failures(16384, 54) == pytest.approx(424.67328)
    assert expected_hardware_failures(0, 54) == 0.0
    assert expected_hardware_failures(31250, 740) == pytest.approx(11100.0)


def test_simulate_reference_row():
    metrics = simulate(row1_config())
    assert metrics.c_local == pytest.approx(1.3e24, rel=0.05)
    assert metrics.cost == pytest.approx(1.61e6, rel=0.005)
    assert metrics.traffic.compute_bound


def test_identities_bit_exact():
    for row in TABLE1:
        metrics = simulate(row.run_config(CATALOG))
        assert metrics.c_local == metrics.c_throughput * metrics.eta.eta
        assert metrics.c_quality == metrics.c_local * metrics.chi
        assert metrics.c_local <= metrics.c_throughput
        assert metrics.c_quality <= metrics.c_local


def test_simulate_monotone_in_nodes_and_bandwidth():
    base = simulate(row1_config())
    more_nodes = simulate(row1_config(n_nodes=4))
    assert more_nodes.c_throughput >= base.c_throughput
    slow = simulate(row1_config(net=NetworkConditions.symmetric_mbps(1.0)))
    fast = simulate(row1_config(net=NetworkConditions.symmetric_mbps(1000.0)))
    assert slow.c_local <= base.c_local <= fast.c_local


def test_duration_halving_halves_throughput():
    base = simulate(row1_config())
    half = simulate(row1_config(duration_days=370.0))
    assert base.traffic.compute_bound and half.traffic.compute_bound
    assert half.c_throughput == pytest.approx(base.c_throughput / 2, rel=1e-12)


def test_zero_nodes_infeasible():
    with pytest.raises(InfeasibleConfigError) as err:
        simulate(row1_config(n_nodes=0))
    assert err.value.constraint == "n_nodes"


def test_fp8_on_16bit_chip_infeasible():
    cfg = row1_config(node=CATALOG.lookup("50xA100"), precision=Precision.FP8)
    with pytest.raises(InfeasibleConfigError) as err:
        simulate(cfg)
    assert err.value.constraint == "precision"


def test_model_too_large_names_memory():
    with pytest.raises(InfeasibleConfigError) as err:
        simulate(row1_config(model_params=200e9))
    assert err.value.constraint == "memory"


def test_auto_model_is_memory_max():
    metrics = simulate(row1_config(model_params="auto"))
    assert metrics.model_params == pytest.approx(1280e9 / 14.0)


def test_pipeline_divisibility():
    diloco = DilocoConfig(h=3, mode=Mode.PIPELINE, stages=2)
    with pytest.raises(InfeasibleConfigError) as err:
        simulate(row1_config(n_nodes=3, diloco=diloco))
    assert err.value.constraint == "pipeline-divisibility"
    metrics = simulate(row1_config(n_nodes=4, diloco=diloco, model_params="auto"))
    assert metrics.replicas == 2
    # a 2-stage group holds twice the per-node memory
    assert metrics.model_params == pytest.approx(2 * 1280e9 / 14.0)


def test_pipeline_rows_report_slowdown_warning():
    metrics = simulate(TABLE1[5].run_config(CATALOG))  # 2880-node pipeline row
    assert not metrics.traffic.compute_bound
    assert any("not compute-bound" in w for w in metrics.warnings)


def test_hier_group_mismatch_warning():
    metrics = simulate(TABLE1[3].run_config(CATALOG))  # 101 nodes, groups 8x12
    assert any("8x12" in w for w in metrics.warnings)
    assert metrics.replicas == 101


def test_unpriced_node_yields_cost_none():
    cfg = row1_config(node=CATALOG.lookup("TPU v5p pod"), precision=Precision.FP16)
    metrics = simulate(cfg)
    assert metrics.cost is None
    assert any("price" in w for w in metrics.warnings)


def test_growth_rates_validation():
    with pytest.raises(ValueError):
        GrowthRates(-0.1, 0.5, 0.03)
    with pytest.raises(ValueError):
        expected_hardware_failures(-1, 10)
