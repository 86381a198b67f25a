"""Result records and table emission.

A ResultRecord carries the headline table columns (target, node config,
nodes, mode, model, h, eta, C_local, chi, C_quality, OT, cost) plus traffic
and compliance fields. Emission is byte-stable: no timestamps, sorted JSON
keys, fixed column order. FLOP columns render in scientific notation with
two significant digits to match the table style; JSON serializes FLOP values
as decimal strings so clients do not lose precision.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

from .efficiency import Mode
from .policy import ComplianceReport, PolicyRegime, compliance_report
from .run_model import RunConfig, RunMetrics

COLUMNS = [
    "target",
    "node_config",
    "nodes",
    "mode",
    "model",
    "h",
    "eta",
    "c_local",
    "chi",
    "c_quality",
    "ot",
    "cost",
    "traffic_mbps",
    "compute_bound",
    "node_registrable",
    "model_violations",
]

FLOP_COLUMNS = {"c_local", "c_quality"}


@dataclass(frozen=True)
class ResultRecord:
    target: str
    node_config: str
    nodes: int
    mode: str
    model_params: float
    h: int
    eta: float
    c_local: float
    chi: float
    c_quality: float
    ot: float
    cost: float | None
    traffic_mbps: float
    compute_bound: bool
    regime: str | None = None
    node_registrable: bool | None = None
    model_violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @classmethod
    def from_metrics(
        cls,
        cfg: RunConfig,
        metrics: RunMetrics,
        target: str | None = None,
        regime: PolicyRegime | None = None,
        bio_workload: bool = False,
    ) -> "ResultRecord":
        compliance: ComplianceReport | None = None
        if regime is not None:
            compliance = compliance_report(
                cfg.node, metrics.c_local, metrics.c_quality, regime, bio_workload
            )
        return cls(
            target=target if target is not None else (cfg.label or "custom"),
            node_config=cfg.node.name,
            nodes=cfg.n_nodes,
            mode=_mode_label(cfg),
            model_params=metrics.model_params,
            h=cfg.diloco.h,
            eta=metrics.eta.eta,
            c_local=metrics.c_local,
            chi=metrics.chi,
            c_quality=metrics.c_quality,
            ot=metrics.ot,
            cost=metrics.cost,
            traffic_mbps=metrics.traffic.average_traffic / 1e6,
            compute_bound=metrics.traffic.compute_bound,
            regime=regime.name if regime else None,
            node_registrable=compliance.node.registrable if compliance else None,
            model_violations=tuple(
                v.label for v in compliance.model_violations
            )
            if compliance
            else (),
            warnings=metrics.warnings,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model_violations"] = list(self.model_violations)
        d["warnings"] = list(self.warnings)
        # decimal strings for FLOP-scale values: exact round-trip in JSON
        for key in ("c_local", "c_quality"):
            d[key] = repr(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        d = dict(d)
        for key in ("c_local", "c_quality"):
            d[key] = float(d[key])
        d["model_violations"] = tuple(d.get("model_violations", ()))
        d["warnings"] = tuple(d.get("warnings", ()))
        return cls(**d)


def _mode_label(cfg: RunConfig) -> str:
    if cfg.diloco.mode is Mode.FLAT:
        return "Flat"
    if cfg.diloco.mode is Mode.HIERARCHICAL:
        if cfg.diloco.groups:
            return f"Hier ({cfg.diloco.groups[0]}x{cfg.diloco.groups[1]})"
        return "Hier"
    replicas = cfg.n_nodes // cfg.diloco.stages
    return f"PP ({cfg.diloco.stages}x{replicas})"


def _fmt_model(params: float) -> str:
    return f"{params / 1e9:.0f}B"


def _fmt_flop(value: float) -> str:
    return f"{value:.1e}"


def _fmt_cost(value: float | None) -> str:
    if value is None:
        return "-"
    if value >= 1e9:
        return f"${value / 1e9:.2f}B"
    return f"${value / 1e6:.1f}M"


def _row_cells(r: ResultRecord) -> list[str]:
    return [
        r.target,
        r.node_config,
        str(r.nodes),
        r.mode,
        _fmt_model(r.model_params),
        str(r.h),
        f"{r.eta:.4f}",
        _fmt_flop(r.c_local),
        f"{r.chi:.4f}",
        _fmt_flop(r.c_quality),
        f"{r.ot:.1f}x",
        _fmt_cost(r.cost),
        f"{r.traffic_mbps:.1f}",
        "yes" if r.compute_bound else "no",
        "" if r.node_registrable is None else ("yes" if r.node_registrable else "no"),
        ";".join(r.model_violations),
    ]


def emit_table(records: list[ResultRecord], fmt: str = "text") -> bytes:
    """Render records deterministically in text, csv, json, or markdown."""
    if not records:
        raise ValueError("records must be non-empty")
    if fmt == "json":
        payload = json.dumps([r.to_dict() for r in records], sort_keys=True, indent=2)
        return payload.encode("utf-8")
    rows = [_row_cells(r) for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        writer.writerow(COLUMNS)
        writer.writerows(rows)
        return buf.getvalue().encode("utf-8")
    if fmt == "markdown":
        lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
        lines += ["| " + " | ".join(cells) + " |" for cells in rows]
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt == "text":
        widths = [
            max(len(COLUMNS[i]), max(len(row[i]) for row in rows))
            for i in range(len(COLUMNS))
        ]
        lines = [
            "  ".join(COLUMNS[i].ljust(widths[i]) for i in range(len(COLUMNS))),
            "  ".join("-" * w for w in widths),
        ]
        lines += [
            "  ".join(row[i].ljust(widths[i]) for i in range(len(COLUMNS)))
            for row in rows
        ]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r} (text, csv, json, markdown)")
