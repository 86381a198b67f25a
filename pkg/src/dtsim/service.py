"""JSON-over-HTTP service exposing the simulator to the web UI.

Endpoints: POST /simulate, POST /optimize, GET /catalog, GET /regimes,
GET /defaults. Requests are stateless; malformed bodies return 400 with
field-path diagnostics, infeasible configurations return 422 naming the
binding constraint. FLOP quantities are serialized as decimal strings.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .catalog import (
    BYTES_PER_PARAM,
    Catalog,
    ChipSpec,
    NodeSpec,
    Precision,
    default_catalog,
    max_model_params,
)
from .efficiency import DEFAULT_TOKENS_PER_STEP, DilocoConfig, Mode, ScenarioMode
from .errors import (
    DtsimError,
    InfeasibleConfigError,
    InfeasibleTargetError,
    UnknownPresetError,
)
from .network import NetworkConditions
from .optimizer import (
    OptimizationRequest,
    SearchSpace,
    geometric_node_counts,
    min_cost_config,
)
from .policy import builtin_regimes, compliance_report, regime_by_name
from .records import ResultRecord
from .run_model import DEFAULT_DURATION_DAYS, DEFAULT_MFU, RunConfig, simulate
from .scenario import DEFAULT_H, DEFAULT_N_NODES, DEFAULT_PRESET


class NodeIn(BaseModel):
    preset: str | None = None
    chip_name: str | None = None
    chips: int | None = Field(default=None, ge=1)
    flops16_tflops: float | None = Field(default=None, gt=0)
    flops8_tflops: float | None = None
    hbm_gb: float | None = Field(default=None, gt=0)
    price_usd: float | None = None

    def resolve(self, catalog: Catalog) -> NodeSpec:
        if self.preset:
            return catalog.lookup(self.preset)
        if self.chips is None or self.flops16_tflops is None or self.hbm_gb is None:
            raise InfeasibleConfigError(
                "node",
                "custom node needs chips, flops16_tflops, and hbm_gb (or a preset)",
            )
        name = self.chip_name or "custom"
        chip = ChipSpec(
            name=name,
            flops16=self.flops16_tflops,
            flops8=self.flops8_tflops,
            hbm=self.hbm_gb / self.chips,
            price=self.price_usd,
        )
        return NodeSpec(name=name, chip=chip, chips_per_node=self.chips)


class DilocoIn(BaseModel):
    h: int = Field(default=DEFAULT_H, ge=1)
    compression: float = Field(default=150.0, ge=1)
    mode: Literal["flat", "hierarchical", "pipeline"] = "flat"
    stages: int = Field(default=1, ge=1)
    groups: tuple[int, int] | None = None


class NetworkIn(BaseModel):
    bandwidth_up_mbps: float = Field(default=100.0, gt=0)
    bandwidth_down_mbps: float = Field(default=100.0, gt=0)
    rtt_ms: float = Field(default=100.0, ge=0)

    def resolve(self) -> NetworkConditions:
        return NetworkConditions(
            bandwidth_up=self.bandwidth_up_mbps * 1e6,
            bandwidth_down=self.bandwidth_down_mbps * 1e6,
            rtt=self.rtt_ms,
        )


class SimulateIn(BaseModel):
    node: NodeIn = Field(default_factory=lambda: NodeIn(preset=DEFAULT_PRESET))
    n_nodes: int = Field(default=DEFAULT_N_NODES, ge=0)
    diloco: DilocoIn = Field(default_factory=DilocoIn)
    network: NetworkIn = Field(default_factory=NetworkIn)
    duration_days: float = Field(default=DEFAULT_DURATION_DAYS, gt=0)
    mfu: float = Field(default=DEFAULT_MFU, gt=0, le=1)
    precision: Literal["fp16", "bf16", "fp8"] | None = None
    model_params: float | Literal["auto"] = "auto"
    scenario: Literal["optimistic", "expected", "conservative"] = "expected"
    tokens_per_step: float = Field(default=DEFAULT_TOKENS_PER_STEP, gt=0)
    regime: str | None = "scher"
    bio_workload: bool = False
    label: str = ""

    def resolve(self, catalog: Catalog) -> RunConfig:
        node = self.node.resolve(catalog)
        precision = (
            Precision.parse(self.precision)
            if self.precision
            else (Precision.FP8 if node.supports_fp8 else Precision.FP16)
        )
        return RunConfig(
            node=node,
            n_nodes=self.n_nodes,
            diloco=DilocoConfig(
                h=self.diloco.h,
                compression=self.diloco.compression,
                mode=Mode.parse(self.diloco.mode),
                groups=self.diloco.groups,
                stages=self.diloco.stages,
            ),
            net=self.network.resolve(),
            duration_days=self.duration_days,
            mfu=self.mfu,
            precision=precision,
            model_params=self.model_params,
            scenario=ScenarioMode.parse(self.scenario),
            tokens_per_step=self.tokens_per_step,
            label=self.label,
        )


class OptimizeIn(BaseModel):
    target_metric: Literal["c_local", "c_quality"] = "c_local"
    target_value: float
    regime: str = "scher"
    network: NetworkIn = Field(default_factory=NetworkIn)
    duration_days: float = Field(default=DEFAULT_DURATION_DAYS, gt=0)
    mfu: float = Field(default=DEFAULT_MFU, gt=0, le=1)
    scenario: Literal["optimistic", "expected", "conservative"] = "expected"
    tokens_per_step: float = Field(default=DEFAULT_TOKENS_PER_STEP, gt=0)
    compression: float = Field(default=150.0, ge=1)
    node_allowlist: list[str] | None = None
    modes: list[Literal["flat", "hierarchical", "pipeline"]] | None = None
    h_grid_max: int = Field(default=128, ge=1)
    n_nodes_max: int = Field(default=10000, ge=1)
    model_points: int = Field(default=64, ge=1)

    def resolve(self, catalog: Catalog) -> OptimizationRequest:
        space = SearchSpace(
            h_grid=tuple(range(1, self.h_grid_max + 1)),
            n_nodes_grid=geometric_node_counts(hi=self.n_nodes_max),
            model_points=self.model_points,
            modes=tuple(Mode.parse(m) for m in self.modes)
            if self.modes
            else (Mode.FLAT, Mode.HIERARCHICAL),
        )
        subset = (
            tuple(catalog.lookup(n) for n in self.node_allowlist)
            if self.node_allowlist
            else None
        )
        return OptimizationRequest(
            target_metric=self.target_metric,
            target_value=self.target_value,
            regime=regime_by_name(self.regime),
            net=self.network.resolve(),
            duration_days=self.duration_days,
            catalog_subset=subset,
            grids=space,
            scenario=ScenarioMode.parse(self.scenario),
            mfu=self.mfu,
            tokens_per_step=self.tokens_per_step,
            compression=self.compression,
        )


def _metrics_out(
    cfg: RunConfig, metrics, regime_name: str | None, bio_workload: bool = False
) -> dict:
    regime = regime_by_name(regime_name) if regime_name else None
    record = ResultRecord.from_metrics(
        cfg, metrics, target=cfg.label or None, regime=regime, bio_workload=bio_workload
    )
    out = record.to_dict()
    out.update(
        {
            "c_throughput": repr(metrics.c_throughput),
            "d_tokens": repr(metrics.d_tokens),
            "eta_breakdown": {
                "eta_h": metrics.eta.eta_h,
                "eta_comp": metrics.eta.eta_comp,
                "eta_rep": metrics.eta.eta_rep,
                "eta_act": metrics.eta.eta_act,
                "eta": metrics.eta.eta,
            },
            "replicas": metrics.replicas,
            "expected_failures": metrics.expected_failures,
            "traffic": {
                "payload_bytes": metrics.traffic.payload_bytes,
                "sync_wall_time_s": metrics.traffic.sync_wall_time,
                "required_bandwidth_bps": metrics.traffic.required_bandwidth,
                "average_traffic_bps": metrics.traffic.average_traffic,
                "compute_bound": metrics.traffic.compute_bound,
                "slowdown": metrics.traffic.slowdown,
            },
        }
    )
    if regime is not None:
        report = compliance_report(
            cfg.node, metrics.c_local, metrics.c_quality, regime, bio_workload
        )
        out["compliance"] = {
            "regime": report.regime,
            "node_registrable": report.node.registrable,
            "binding_rule": report.node.binding_rule,
            "model_violations": [
                {
                    "label": v.label,
                    "threshold_flop": repr(v.threshold_flop),
                    "exceeded_by_quality": v.exceeded_by_quality,
                }
                for v in report.model_violations
            ],
            "narrative": report.narrative,
        }
    return out


def create_app(catalog: Catalog | None = None) -> FastAPI:
    catalog = catalog or default_catalog()
    app = FastAPI(title="dtsim", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        fields = [
            {"loc": ".".join(str(part) for part in err["loc"]), "msg": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(
            status_code=400, content={"error": "invalid request body", "fields": fields}
        )

    @app.exception_handler(InfeasibleConfigError)
    async def infeasible_handler(request: Request, exc: InfeasibleConfigError):
        return JSONResponse(
            status_code=422,
            content={"error": str(exc), "constraint": exc.constraint},
        )

    @app.exception_handler(InfeasibleTargetError)
    async def target_handler(request: Request, exc: InfeasibleTargetError):
        return JSONResponse(
            status_code=422,
            content={"error": str(exc), "best_achieved": repr(exc.best_achieved)},
        )

    @app.exception_handler(DtsimError)
    async def dtsim_handler(request: Request, exc: DtsimError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/simulate")
    def simulate_endpoint(body: SimulateIn):
        cfg = body.resolve(catalog)
        metrics = simulate(cfg)
        return _metrics_out(cfg, metrics, body.regime, body.bio_workload)

    @app.post("/optimize")
    def optimize_endpoint(body: OptimizeIn):
        req = body.resolve(catalog)
        result = min_cost_config(req, catalog)
        if result.config is None:
            return {"cost": 0.0, "binding_constraints": list(result.binding_constraints)}
        out = _metrics_out(result.config, result.metrics, body.regime)
        out["binding_constraints"] = list(result.binding_constraints)
        return out

    @app.get("/catalog")
    def catalog_endpoint():
        rows = []
        for node in catalog:
            rows.append(
                {
                    "name": node.name,
                    "chips": node.chips_per_node,
                    "flops16_tflops": node.chip.flops16,
                    "flops8_tflops": node.chip.flops8,
                    "hbm_gb": node.node_hbm,
                    "price_usd_per_chip": node.chip.price,
                    "h100_equivalents": node.h100_equivalents,
                    "max_model_params": max_model_params(
                        node.node_hbm,
                        Precision.FP8 if node.supports_fp8 else Precision.FP16,
                    ),
                }
            )
        return {"presets": rows}

    @app.get("/regimes")
    def regimes_endpoint():
        return {
            "regimes": [
                {
                    "name": r.name,
                    "node_compute_threshold": r.node_compute_threshold,
                    "node_memory_threshold": r.node_memory_threshold,
                    "model_flop_thresholds": [
                        {"label": label, "flop": repr(flop)}
                        for label, flop in r.model_flop_thresholds
                    ],
                    "notes": r.notes,
                }
                for r in builtin_regimes()
            ]
        }

    @app.get("/defaults")
    def defaults_endpoint():
        return {
            "preset": DEFAULT_PRESET,
            "n_nodes": DEFAULT_N_NODES,
            "h": DEFAULT_H,
            "compression": 150.0,
            "duration_days": DEFAULT_DURATION_DAYS,
            "mfu": DEFAULT_MFU,
            "tokens_per_step": DEFAULT_TOKENS_PER_STEP,
            "bandwidth_mbps": 100.0,
            "rtt_ms": 100.0,
            "scenario": "expected",
            "regime": "scher",
            "bytes_per_param": BYTES_PER_PARAM,
        }

    return app


def serve(port: int, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="info")
