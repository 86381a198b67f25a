"""Cluster-registration thresholds, model-compute thresholds, and
configuration classification.

Thresholds are exceed-strict: a node at exactly the compute or memory
threshold is legal unregistered. Model-threshold checks use local-equivalent
FLOPs, since regulations count training compute; quality-adjusted FLOPs are
reported alongside for information.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import NodeSpec


@dataclass(frozen=True)
class PolicyRegime:
    name: str
    node_compute_threshold: float | None = None  # H100-equivalents
    node_memory_threshold: float | None = None  # GB of HBM
    model_flop_thresholds: tuple[tuple[str, float], ...] = ()
    bandwidth_cap: float | None = None  # bits/s
    bio_flop_threshold: float | None = None  # applies only to bio-sequence runs
    notes: str = ""

    def __post_init__(self):
        for value in (
            self.node_compute_threshold,
            self.node_memory_threshold,
            self.bandwidth_cap,
            self.bio_flop_threshold,
        ):
            if value is not None and value <= 0:
                raise ValueError("thresholds must be positive where present")
        for _, flop in self.model_flop_thresholds:
            if flop <= 0:
                raise ValueError("thresholds must be positive where present")


@dataclass(frozen=True)
class Registrability:
    registrable: bool
    binding_rule: str | None  # "compute", "memory", or "compute+memory"


@dataclass(frozen=True)
class ThresholdViolation:
    label: str
    threshold_flop: float
    exceeded_by_local: bool
    exceeded_by_quality: bool


@dataclass(frozen=True)
class ComplianceReport:
    regime: str
    node: Registrability
    model_violations: tuple[ThresholdViolation, ...]
    narrative: str


def node_registrable(node: NodeSpec, regime: PolicyRegime) -> Registrability:
    """A node is registrable iff it exceeds the compute OR memory threshold."""
    rules = []
    if (
        regime.node_compute_threshold is not None
        and node.h100_equivalents > regime.node_compute_threshold
    ):
        rules.append("compute")
    if (
        regime.node_memory_threshold is not None
        and node.node_hbm > regime.node_memory_threshold
    ):
        rules.append("memory")
    return Registrability(registrable=bool(rules), binding_rule="+".join(rules) or None)


def model_threshold_violations(
    c_local: float,
    c_quality: float,
    regime: PolicyRegime,
    bio_workload: bool = False,
) -> list[ThresholdViolation]:
    """Thresholds exceeded by c_local, with the c_quality verdict alongside."""
    if c_local < 0 or c_quality < 0:
        raise ValueError("compute must be non-negative")
    thresholds = list(regime.model_flop_thresholds)
    if bio_workload and regime.bio_flop_threshold is not None:
        thresholds.append(("bio-sequence-reporting", regime.bio_flop_threshold))
    return [
        ThresholdViolation(
            label=label,
            threshold_flop=flop,
            exceeded_by_local=True,
            exceeded_by_quality=c_quality > flop,
        )
        for label, flop in thresholds
        if c_local > flop
    ]


def compliance_report(
    node: NodeSpec,
    c_local: float,
    c_quality: float,
    regime: PolicyRegime,
    bio_workload: bool = False,
) -> ComplianceReport:
    reg = node_registrable(node, regime)
    violations = model_threshold_violations(c_local, c_quality, regime, bio_workload)
    parts = []
    if reg.registrable:
        parts.append(
            f"node {node.name!r} requires registration under {regime.name}"
            f" (binding rule: {reg.binding_rule})"
        )
    else:
        parts.append(f"node {node.name!r} is below {regime.name} registration thresholds")
    if violations:
        labels = ", ".join(
            f"{v.label} (>{v.threshold_flop:.0e} FLOP)" for v in violations
        )
        parts.append(f"run exceeds model thresholds: {labels}")
    else:
        parts.append("run exceeds no model-compute threshold in this regime")
    if regime.notes:
        parts.append(regime.notes)
    return ComplianceReport(
        regime=regime.name,
        node=reg,
        model_violations=tuple(violations),
        narrative="; ".join(parts),
    )


def builtin_regimes() -> list[PolicyRegime]:
    """The five named regimes with their published constants."""
    return [
        PolicyRegime(
            name="scher",
            node_compute_threshold=16.0,
            model_flop_thresholds=(("monitored-floor", 1e23), ("ban", 1e24)),
            notes="international agreement proposal: cluster registration above"
            " 16 H100-equivalents; pre-training ban above 1e24 FLOP",
        ),
        PolicyRegime(
            name="scher-amended",
            node_compute_threshold=16.0,
            node_memory_threshold=1280.0,
            model_flop_thresholds=(("monitored-floor", 1e23), ("ban", 1e24)),
            notes="scher plus a 1,280 GB HBM registration threshold, closing the"
            " high-memory-per-compute loophole",
        ),
        PolicyRegime(
            name="eu-ai-act",
            model_flop_thresholds=(("gpai-systemic-risk", 1e25),),
            notes="general-purpose models above 1e25 FLOP require safety"
            " evaluations and red-teaming",
        ),
        PolicyRegime(
            name="eo-14110",
            model_flop_thresholds=(("reporting", 1e26),),
            bio_flop_threshold=1e23,
            notes="reporting above 1e26 FLOP (1e23 for biological-sequence"
            " training); cluster reporting applied only to >=300 Gbit/s"
            " interconnect, which WAN-connected nodes never meet (not evaluated)",
        ),
        PolicyRegime(
            name="sb-53",
            model_flop_thresholds=(("transparency", 1e26),),
            notes="developer transparency and incident reporting above 1e26 FLOP",
        ),
    ]


def regime_by_name(name: str) -> PolicyRegime:
    for regime in builtin_regimes():
        if regime.name == name:
            return regime
    known = ", ".join(r.name for r in builtin_regimes())
    raise KeyError(f"unknown policy regime {name!r} (known: {known})")
