import pytest
from hypothesis import given, strategies as st

from dtsim.catalog import (
    Catalog,
    ChipSpec,
    NodeSpec,
    Precision,
    cluster_cost,
    default_catalog,
    h100_equivalents,
    max_model_params,
)
from dtsim.errors import UnknownPresetError, UnpricedNodeError

SUB_THRESHOLD_16BIT = {
    "50xA100": 15.76,
    "49xAscend910B": 15.84,
    "26xAscend910C": 15.76,
    "57xTPUv4": 15.83,
    "80xTPUv5e": 15.92,
    "34xTPUv5p": 15.76,
    "17xTPUv6e": 15.76,
}


@pytest.fixture(scope="module")
def catalog() -> Catalog:
    return default_catalog()


def test_h100_equivalence_reference_values(catalog):
    for name, expected in SUB_THRESHOLD_16BIT.items():
        node = catalog.lookup(name)
        assert round(node.h100_equivalents, 2) == expected


def test_h100_equivalence_examples(catalog):
    assert round(h100_equivalents(catalog.lookup("50xA100")), 2) == 15.76
    assert round(h100_equivalents(catalog.lookup("49xAscend910B")), 2) == 15.84
    one = NodeSpec("1xH100", ChipSpec("H100", flops16=990, hbm=80, price=25000), 1)
    assert one.h100_equivalents == pytest.approx(1.0)


def test_h100_equivalence_linear_in_chips():
    chip = ChipSpec("H100", flops16=990, hbm=80)
    a = NodeSpec("a", chip, 4).h100_equivalents
    b = NodeSpec("b", chip, 8).h100_equivalents
    assert b == pytest.approx(2 * a)


def test_all_sub_threshold_presets_at_or_below_16(catalog):
    for name in list(SUB_THRESHOLD_16BIT) + ["16xH100", "16xGH200", "17xTPUv6e-FP8"]:
        eq = catalog.lookup(name).h100_equivalents
        assert eq <= 16.0 * 1.003


def test_cluster_cost_examples(catalog):
    h100 = catalog.lookup("16xH100")
    assert cluster_cost(h100, 2) == pytest.approx(1_613_760.0)
    assert cluster_cost(h100, 0) == 0.0
    a100 = catalog.lookup("50xA100")
    assert cluster_cost(a100, 625) == pytest.approx(441_262_500.0)


def test_cluster_cost_markup_factor_exact():
    chip = ChipSpec("c", flops16=1000, hbm=100, price=1.0)
    node = NodeSpec("n", chip, 1)
    assert cluster_cost(node, 1) == pytest.approx(2.0172, abs=1e-12)


@given(n=st.integers(min_value=0, max_value=10000), price=st.floats(1.0, 1e5))
def test_cluster_cost_linear(n, price):
    node = NodeSpec("n", ChipSpec("c", flops16=990, hbm=80, price=price), 16)
    assert cluster_cost(node, n) == pytest.approx(n * cluster_cost(node, 1))


def test_cluster_cost_rejects_unpriced(catalog):
    pod = catalog.lookup("TPU v5p pod")
    with pytest.raises(UnpricedNodeError):
        cluster_cost(pod, 1)


def test_max_model_params_examples():
    assert max_model_params(1280, Precision.FP8) == pytest.approx(91.4285714e9, rel=1e-6)
    assert max_model_params(4000, Precision.FP16) == pytest.approx(250e9)
    assert max_model_params(2304, Precision.FP8) == pytest.approx(164.571428e9, rel=1e-6)


def test_max_model_params_monotone():
    assert max_model_params(2000, Precision.FP8) > max_model_params(1000, Precision.FP8)
    assert max_model_params(1280, Precision.FP16) < max_model_params(1280, Precision.FP8)


def test_max_model_params_custom_bytes():
    assert max_model_params(1400, Precision.FP16, bytes_per_param=14.0) == pytest.approx(1e11)


def test_lookup_preset_figures(catalog):
    h100 = catalog.lookup("16xH100")
    assert h100.chips_per_node == 16
    assert h100.node_flops(Precision.FP8) == pytest.approx(31.68e15)
    assert h100.node_flops(Precision.FP16) == pytest.approx(15.84e15)
    assert h100.node_hbm == pytest.approx(1280)
    assert h100.chip.price == 25000

    v5p = catalog.lookup("TPU v5p pod")
    assert v5p.chips_per_node == 8960
    assert v5p.node_flops(Precision.FP16) == pytest.approx(4112.64e15)
    assert v5p.node_hbm == pytest.approx(851_200)

    gb200 = catalog.lookup("GB200 NVL72")
    assert gb200.chips_per_node == 72
    assert gb200.node_flops(Precision.FP16) == pytest.approx(162.0e15)
    assert gb200.node_hbm == pytest.approx(13_824)


def test_lookup_unknown_preset_suggests(catalog):
    with pytest.raises(UnknownPresetError) as err:
        catalog.lookup("no-such-node")
    assert err.value.name == "no-such-node"
    with pytest.raises(UnknownPresetError) as err:
        catalog.lookup("16xH10")
    assert err.value.suggestion == "16xH100"


def test_register_custom_chip(catalog):
    cat = Catalog({n.name: n for n in catalog})
    node = NodeSpec("8xMI300", ChipSpec("MI300X", flops16=1307, hbm=192, price=15000), 8)
    cat.register(node)
    assert cat.lookup("8xMI300").node_hbm == pytest.approx(1536)
    with pytest.raises(ValueError):
        cat.register(node)


def test_chip_invariants():
    with pytest.raises(ValueError):
        ChipSpec("bad", flops16=0, hbm=80)
    with pytest.raises(ValueError):
        ChipSpec("bad", flops16=100, hbm=0)
    with pytest.raises(ValueError):
        ChipSpec("bad", flops16=100, hbm=80, price=-1)
    with pytest.raises(ValueError):
        ChipSpec("bad", flops16=100, flops8=50, hbm=80)
    with pytest.raises(ValueError):
        NodeSpec("bad", ChipSpec("c", flops16=100, hbm=80), 0)


def test_fp8_unsupported_raises(catalog):
    from dtsim.errors import InfeasibleConfigError

    with pytest.raises(InfeasibleConfigError):
        catalog.lookup("50xA100").node_flops(Precision.FP8)


def test_precision_parse():
    assert Precision.parse("bf16") is Precision.FP16
    assert Precision.parse("FP8") is Precision.FP8
    with pytest.raises(ValueError):
        Precision.parse("int4")


def test_catalog_env_var_override(tmp_path, monkeypatch):
    path = tmp_path / "alt.csv"
    path.write_text(
        "name,chips,flops16_tflops,flops8_tflops,hbm_gb,price_usd\n"
        "tiny,4,100,,32,1000\n"
    )
    monkeypatch.setenv("DTSIM_CATALOG", str(path))
    cat = Catalog.load()
    assert cat.names() == ["tiny"]
    assert cat.lookup("tiny").node_hbm == pytest.approx(128)
