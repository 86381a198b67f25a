"""Scenario files: flat `key = value` text with `#` comments.

Every recognized key is registered below with a parser; unknown keys are
rejected with the offending line number and the nearest valid key. An empty
file is a valid scenario: it describes the default run (two 16xH100 nodes,
FP8, 740 days, 100 Mbps symmetric).
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, replace

from .catalog import Catalog, ChipSpec, NodeSpec, Precision, default_catalog
from .efficiency import (
    DEFAULT_TOKENS_PER_STEP,
    DilocoConfig,
    EfficiencyParams,
    Mode,
    ScenarioMode,
)
from .errors import ScenarioParseError
from .network import NetworkConditions
from .optimizer import OptimizationRequest, SearchSpace, geometric_node_counts
from .policy import PolicyRegime, regime_by_name
from .run_model import DEFAULT_DURATION_DAYS, DEFAULT_MFU, RunConfig
from .scaling import DEFAULT_R_OPT, ChinchillaParams

DEFAULT_PRESET = "16xH100"
DEFAULT_N_NODES = 2
DEFAULT_H = 18


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_groups(text: str) -> tuple[int, int]:
    parts = text.lower().replace("x", " ").split()
    if len(parts) != 2:
        raise ValueError(f"expected OUTERxINNER, got {text!r}")
    return int(parts[0]), int(parts[1])


def _parse_thresholds(text: str) -> tuple[tuple[str, float], ...]:
    out = []
    for item in text.split(","):
        label, _, value = item.partition(":")
        if not value:
            raise ValueError(f"expected label:flops pairs, got {item!r}")
        out.append((label.strip(), float(value)))
    return tuple(out)


def _parse_list(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in _parse_list(text))


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(s) for s in _parse_list(text))


def _parse_model(text: str):
    return "auto" if text.strip().lower() == "auto" else float(text)


# key -> value parser. Values stay strings until build time for keys marked str.
KEY_PARSERS = {
    "node.preset": str,
    "node.chip_name": str,
    "node.chips": int,
    "node.flops16_tflops": float,
    "node.flops8_tflops": float,
    "node.hbm_gb": float,
    "node.price_usd": float,
    "run.n_nodes": int,
    "run.duration_days": float,
    "run.mfu": float,
    "run.precision": Precision.parse,
    "run.model_params": _parse_model,
    "run.label": str,
    "diloco.h": int,
    "diloco.compression": float,
    "diloco.mode": Mode.parse,
    "diloco.replicas": int,
    "diloco.groups": _parse_groups,
    "diloco.stages": int,
    "network.bandwidth_up_mbps": float,
    "network.bandwidth_down_mbps": float,
    "network.rtt_ms": float,
    "training.tokens_per_step": float,
    "efficiency.scenario": ScenarioMode.parse,
    "efficiency.alpha0": float,
    "efficiency.n_ref": float,
    "efficiency.kappa": float,
    "efficiency.gamma0": float,
    "efficiency.gamma_slope": float,
    "efficiency.sync_tokens_ref": float,
    "efficiency.sync_tokens_scale": float,
    "efficiency.f_act": float,
    "efficiency.eta_comp_150": float,
    "efficiency.floor": float,
    "chinchilla.E": float,
    "chinchilla.A": float,
    "chinchilla.B": float,
    "chinchilla.alpha": float,
    "chinchilla.beta": float,
    "scaling.r_opt": float,
    "policy.regime": str,
    "policy.node_compute_threshold": float,
    "policy.node_memory_threshold": float,
    "policy.model_flop_thresholds": _parse_thresholds,
    "policy.bio_workload": _parse_bool,
    "optimize.target_metric": str,
    "optimize.target_value": float,
    "optimize.h_grid_max": int,
    "optimize.n_nodes_max": int,
    "optimize.model_points": int,
    "optimize.modes": _parse_list,
    "optimize.stage_grid": _parse_int_list,
    "optimize.node_allowlist": _parse_list,
    "optimize.bandwidths_mbps": _parse_float_list,
}


@dataclass(frozen=True)
class ScenarioFile:
    """Parsed scenario: typed values keyed by the flat dotted names."""

    values: dict

    def get(self, key, default=None):
        return self.values.get(key, default)

    def __contains__(self, key) -> bool:
        return key in self.values


def parse_scenario(text: str) -> ScenarioFile:
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise ScenarioParseError(line_no, key or raw.strip(), "expected 'key = value'")
        if key not in KEY_PARSERS:
            close = difflib.get_close_matches(key, KEY_PARSERS, n=1, cutoff=0.5)
            hint = f"; did you mean {close[0]!r}?" if close else ""
            raise ScenarioParseError(line_no, key, f"unknown key{hint}")
        if not value:
            raise ScenarioParseError(line_no, key, "missing value")
        try:
            values[key] = KEY_PARSERS[key](value)
        except (ValueError, TypeError) as exc:
            raise ScenarioParseError(line_no, key, str(exc)) from None
    return ScenarioFile(values=values)


def load_scenario(path: str) -> ScenarioFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _node_from(sc: ScenarioFile, catalog: Catalog) -> NodeSpec:
    if "node.chips" in sc or "node.flops16_tflops" in sc:
        for required in ("node.chips", "node.flops16_tflops", "node.hbm_gb"):
            if required not in sc:
                raise ScenarioParseError(0, required, "required for a custom node")
        name = sc.get("node.chip_name", "custom")
        chip = ChipSpec(
            name=name,
            flops16=sc.get("node.flops16_tflops"),
            flops8=sc.get("node.flops8_tflops"),
            hbm=sc.get("node.hbm_gb") / sc.get("node.chips"),
            price=sc.get("node.price_usd"),
        )
        return NodeSpec(name=name, chip=chip, chips_per_node=sc.get("node.chips"))
    return catalog.lookup(sc.get("node.preset", DEFAULT_PRESET))


def _efficiency_from(sc: ScenarioFile, scenario: ScenarioMode) -> EfficiencyParams | None:
    overrides = {}
    for key, attr in (
        ("efficiency.alpha0", "alpha0"),
        ("efficiency.n_ref", "n_ref"),
        ("efficiency.kappa", "kappa"),
        ("efficiency.gamma0", "gamma0"),
        ("efficiency.gamma_slope", "gamma_slope"),
        ("efficiency.sync_tokens_ref", "sync_tokens_ref"),
        ("efficiency.sync_tokens_scale", "sync_tokens_scale"),
        ("efficiency.f_act", "f_act"),
        ("efficiency.floor", "floor"),
    ):
        if key in sc:
            overrides[attr] = sc.get(key)
    if "efficiency.eta_comp_150" in sc:
        overrides["eta_comp_table"] = ((1.0, 1.0), (150.0, sc.get("efficiency.eta_comp_150")))
    if not overrides:
        return None
    return EfficiencyParams.for_scenario(scenario, **overrides)


def _chinchilla_from(sc: ScenarioFile) -> ChinchillaParams | None:
    keys = ("chinchilla.E", "chinchilla.A", "chinchilla.B", "chinchilla.alpha", "chinchilla.beta")
    if not any(k in sc for k in keys):
        return None
    base = ChinchillaParams()
    return ChinchillaParams(
        E=sc.get("chinchilla.E", base.E),
        A=sc.get("chinchilla.A", base.A),
        B=sc.get("chinchilla.B", base.B),
        alpha=sc.get("chinchilla.alpha", base.alpha),
        beta=sc.get("chinchilla.beta", base.beta),
    )


def build_network(sc: ScenarioFile) -> NetworkConditions:
    return NetworkConditions(
        bandwidth_up=sc.get("network.bandwidth_up_mbps", 100.0) * 1e6,
        bandwidth_down=sc.get("network.bandwidth_down_mbps", 100.0) * 1e6,
        rtt=sc.get("network.rtt_ms", 100.0),
    )


def build_run_config(sc: ScenarioFile, catalog: Catalog | None = None) -> RunConfig:
    catalog = catalog or default_catalog()
    node = _node_from(sc, catalog)
    n_nodes = sc.get("run.n_nodes", DEFAULT_N_NODES)
    mode = sc.get("diloco.mode", Mode.FLAT)
    stages = sc.get("diloco.stages", 1)
    scenario = sc.get("efficiency.scenario", ScenarioMode.EXPECTED)
    diloco = DilocoConfig(
        h=sc.get("diloco.h", DEFAULT_H),
        compression=sc.get("diloco.compression", 150.0),
        mode=mode,
        groups=sc.get("diloco.groups"),
        stages=stages,
    )
    precision = sc.get(
        "run.precision",
        Precision.FP8 if node.supports_fp8 else Precision.FP16,
    )
    cfg = RunConfig(
        node=node,
        n_nodes=n_nodes,
        diloco=diloco,
        net=build_network(sc),
        duration_days=sc.get("run.duration_days", DEFAULT_DURATION_DAYS),
        mfu=sc.get("run.mfu", DEFAULT_MFU),
        precision=precision,
        model_params=sc.get("run.model_params", "auto"),
        scenario=scenario,
        tokens_per_step=sc.get("training.tokens_per_step", DEFAULT_TOKENS_PER_STEP),
        efficiency=_efficiency_from(sc, scenario),
        chinchilla=_chinchilla_from(sc),
        r_opt=sc.get("scaling.r_opt", DEFAULT_R_OPT),
        label=sc.get("run.label", ""),
    )
    declared = sc.get("diloco.replicas")
    if declared is not None:
        from .run_model import resolve_replicas

        derived = resolve_replicas(mode, n_nodes, stages)
        if declared != derived:
            raise ScenarioParseError(
                0,
                "diloco.replicas",
                f"declared {declared} but run.n_nodes and diloco.mode imply {derived}",
            )
    return cfg


def build_regime(sc: ScenarioFile) -> PolicyRegime:
    base = regime_by_name(sc.get("policy.regime", "scher"))
    overrides = {}
    if "policy.node_compute_threshold" in sc:
        overrides["node_compute_threshold"] = sc.get("policy.node_compute_threshold")
    if "policy.node_memory_threshold" in sc:
        overrides["node_memory_threshold"] = sc.get("policy.node_memory_threshold")
    if "policy.model_flop_thresholds" in sc:
        overrides["model_flop_thresholds"] = sc.get("policy.model_flop_thresholds")
    return replace(base, **overrides) if overrides else base


def build_optimization_request(
    sc: ScenarioFile, catalog: Catalog | None = None
) -> OptimizationRequest:
    catalog = catalog or default_catalog()
    space = SearchSpace()
    updates = {}
    if "optimize.h_grid_max" in sc:
        updates["h_grid"] = tuple(range(1, sc.get("optimize.h_grid_max") + 1))
    if "optimize.n_nodes_max" in sc:
        updates["n_nodes_grid"] = geometric_node_counts(hi=sc.get("optimize.n_nodes_max"))
    if "optimize.model_points" in sc:
        updates["model_points"] = sc.get("optimize.model_points")
    if "optimize.modes" in sc:
        updates["modes"] = tuple(Mode.parse(m) for m in sc.get("optimize.modes"))
    if "optimize.stage_grid" in sc:
        updates["stage_grid"] = sc.get("optimize.stage_grid")
    if updates:
        space = replace(space, **updates)

    subset = None
    if "optimize.node_allowlist" in sc:
        subset = tuple(catalog.lookup(name) for name in sc.get("optimize.node_allowlist"))

    scenario = sc.get("efficiency.scenario", ScenarioMode.EXPECTED)
    return OptimizationRequest(
        target_metric=sc.get("optimize.target_metric", "c_local"),
        target_value=sc.get("optimize.target_value", 1e25),
        regime=build_regime(sc),
        net=build_network(sc),
        duration_days=sc.get("run.duration_days", DEFAULT_DURATION_DAYS),
        catalog_subset=subset,
        grids=space,
        scenario=scenario,
        mfu=sc.get("run.mfu", DEFAULT_MFU),
        tokens_per_step=sc.get("training.tokens_per_step", DEFAULT_TOKENS_PER_STEP),
        compression=sc.get("diloco.compression", 150.0),
        chinchilla=_chinchilla_from(sc),
        efficiency=_efficiency_from(sc, scenario),
    )
