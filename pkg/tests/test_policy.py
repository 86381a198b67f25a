import pytest

from dtsim.catalog import ChipSpec, NodeSpec, default_catalog
from dtsim.policy import (
    PolicyRegime,
    builtin_regimes,
    compliance_report,
    model_threshold_violations,
    node_registrable,
    regime_by_name,
)

CATALOG = default_catalog()
SCHER = regime_by_name("scher")
AMENDED = regime_by_name("scher-amended")

SUB_THRESHOLD = [
    "50xA100",
    "49xAscend910B",
    "26xAscend910C",
    "57xTPUv4",
    "80xTPUv5e",
    "34xTPUv5p",
    "17xTPUv6e",
    "16xH100",
    "16xGH200",
    "17xTPUv6e-FP8",
]


def test_16xh100_at_threshold_not_registrable():
    node = CATALOG.lookup("16xH100")
    assert node.h100_equivalents == 16.0
    assert node.node_hbm == 1280.0
    result = node_registrable(node, AMENDED)
    assert not result.registrable
    assert result.binding_rule is None


def test_50xa100_memory_rule():
    node = CATALOG.lookup("50xA100")
    assert not node_registrable(node, SCHER).registrable
    result = node_registrable(node, AMENDED)
    assert result.registrable
    assert result.binding_rule == "memory"


def test_single_a100_never_registrable():
    node = NodeSpec("1xA100", ChipSpec("A100", flops16=312, hbm=80, price=7000), 1)
    for regime in builtin_regimes():
        assert not node_registrable(node, regime).registrable


def test_all_sub_threshold_presets_legal_under_scher():
    for name in SUB_THRESHOLD:
        assert not node_registrable(CATALOG.lookup(name), SCHER).registrable


def test_high_memory_presets_registrable_under_amendment():
    for name in ("50xA100", "49xAscend910B", "26xAscend910C", "34xTPUv5p"):
        result = node_registrable(CATALOG.lookup(name), AMENDED)
        assert result.registrable
        assert "memory" in result.binding_rule


def test_amendment_never_shrinks_registrable_set():
    for node in CATALOG:
        if node_registrable(node, SCHER).registrable:
            assert node_registrable(node, AMENDED).registrable


def test_registrable_monotone_in_chips():
    chip = ChipSpec("H100", flops16=990, hbm=80, price=25000)
    flags = [
        node_registrable(NodeSpec(f"{k}x", chip, k), AMENDED).registrable
        for k in range(1, 40)
    ]
    assert flags == sorted(flags)  # False..False True..True


def test_model_threshold_violations_examples():
    regime = PolicyRegime(
        name="three",
        model_flop_thresholds=(("a", 1e24), ("b", 1e25), ("c", 1e26)),
    )
    hit = model_threshold_violations(1.3e24, 1.3e24, regime)
    assert [v.label for v in hit] == ["a"]
    assert model_threshold_violations(0.0, 0.0, regime) == []
    all_hit = model_threshold_violations(1.0001e26, 5e25, regime)
    assert [v.label for v in all_hit] == ["a", "b", "c"]
    assert all_hit[2].exceeded_by_quality is False


def test_threshold_exactly_at_is_not_violation():
    regime = PolicyRegime(name="one", model_flop_thresholds=(("x", 1e25),))
    assert model_threshold_violations(1e25, 1e25, regime) == []


def test_builtin_regimes_constants():
    regimes = {r.name: r for r in builtin_regimes()}
    assert len(regimes) == 5
    assert regimes["scher"].node_compute_threshold == 16.0
    assert regimes["scher"].node_memory_threshold is None
    assert dict(regimes["scher"].model_flop_thresholds) == {
        "monitored-floor": 1e23,
        "ban": 1e24,
    }
    assert regimes["scher-amended"].node_memory_threshold == 1280.0
    assert regimes["eu-ai-act"].node_compute_threshold is None
    assert dict(regimes["eu-ai-act"].model_flop_thresholds) == {"gpai-systemic-risk": 1e25}
    assert dict(regimes["eo-14110"].model_flop_thresholds) == {"reporting": 1e26}
    assert regimes["eo-14110"].bio_flop_threshold == 1e23
    assert dict(regimes["sb-53"].model_flop_thresholds) == {"transparency": 1e26}


def test_bio_threshold_gated_by_flag():
    eo = regime_by_name("eo-14110")
    assert model_threshold_violations(1e24, 1e24, eo) == []
    hit = model_threshold_violations(1e24, 1e24, eo, bio_workload=True)
    assert [v.label for v in hit] == ["bio-sequence-reporting"]


def test_regime_by_name_unknown():
    with pytest.raises(KeyError):
        regime_by_name("nonexistent")


def test_compliance_report_narrative():
    node = CATALOG.lookup("50xA100")
    report = compliance_report(node, 1.3e24, 1.27e24, AMENDED)
    assert report.node.registrable
    assert [v.label for v in report.model_violations] == ["monitored-floor", "ban"]
    assert "50xA100" in report.narrative
    assert "registration" in report.narrative
