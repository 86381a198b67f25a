"""Command-line interface.

Subcommands: simulate <scenario>, optimize <scenario>, table <table1|table2>,
serve --port N. Exit codes: 0 success, 2 scenario parse error, 3 infeasible
configuration or unreachable target.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .benchmarks import BENCHMARK_TABLES
from .catalog import Catalog
from .efficiency import ScenarioMode
from .errors import (
    DtsimError,
    InfeasibleConfigError,
    InfeasibleTargetError,
    ScenarioParseError,
    UnknownPresetError,
)
from .network import NetworkConditions
from .optimizer import min_cost_config
from .policy import regime_by_name
from .records import ResultRecord, emit_table
from .run_model import simulate
from .scenario import (
    ScenarioFile,
    build_optimization_request,
    build_regime,
    build_run_config,
    load_scenario,
)
from .service import serve

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtsim",
        description="Distributed-training feasibility, cost, and compliance simulator",
    )
    parser.add_argument("--catalog", help="path to a catalog CSV (or set DTSIM_CATALOG)")
    parser.add_argument(
        "--format",
        choices=["text", "csv", "json", "markdown"],
        default="text",
        help="output format",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument(
            "--scenario-mode",
            choices=["optimistic", "expected", "conservative"],
            help="override the efficiency scenario mode",
        )
        p.add_argument("--duration-days", type=float, help="override the run duration")
        p.add_argument("--regime", help="policy regime for compliance columns")

    sim = sub.add_parser("simulate", help="evaluate one scenario file")
    sim.add_argument("scenario", help="path to a scenario file")
    common(sim)

    opt = sub.add_parser("optimize", help="minimum-cost search from a scenario file")
    opt.add_argument("scenario", help="path to a scenario file")
    common(opt)
    opt.add_argument("--target-metric", choices=["c_local", "c_quality"])
    opt.add_argument("--target-value", type=float)
    opt.add_argument("--bandwidth-mbps", type=float, help="symmetric bandwidth override")
    opt.add_argument("--nodes", help="comma-separated preset allowlist")

    tab = sub.add_parser("table", help="regenerate a reference result table")
    tab.add_argument("preset", choices=sorted(BENCHMARK_TABLES))
    common(tab)

    srv = sub.add_parser("serve", help="run the JSON-over-HTTP service")
    srv.add_argument("--port", type=int, default=8351)
    srv.add_argument("--host", default="127.0.0.1")
    return parser


def _emit(records, fmt: str) -> None:
    sys.stdout.buffer.write(emit_table(records, fmt))
    sys.stdout.buffer.flush()


def _scenario_with_overrides(args) -> ScenarioFile:
    sc = load_scenario(args.scenario)
    values = dict(sc.values)
    if args.scenario_mode:
        values["efficiency.scenario"] = ScenarioMode.parse(args.scenario_mode)
    if args.duration_days:
        values["run.duration_days"] = args.duration_days
    if args.regime:
        values["policy.regime"] = args.regime
    return ScenarioFile(values=values)


def _cmd_simulate(args, catalog) -> int:
    sc = _scenario_with_overrides(args)
    cfg = build_run_config(sc, catalog)
    metrics = simulate(cfg)
    record = ResultRecord.from_metrics(
        cfg,
        metrics,
        regime=build_regime(sc),
        bio_workload=sc.get("policy.bio_workload", False),
    )
    _emit([record], args.format)
    return EXIT_OK


def _cmd_optimize(args, catalog) -> int:
    sc = _scenario_with_overrides(args)
    values = dict(sc.values)
    if args.target_metric:
        values["optimize.target_metric"] = args.target_metric
    if args.target_value is not None:
        values["optimize.target_value"] = args.target_value
    if args.nodes:
        values["optimize.node_allowlist"] = tuple(
            s.strip() for s in args.nodes.split(",") if s.strip()
        )
    sc = ScenarioFile(values=values)
    req = build_optimization_request(sc, catalog)
    if args.bandwidth_mbps:
        req = replace(
            req, net=NetworkConditions.symmetric_mbps(args.bandwidth_mbps, req.net.rtt)
        )
    result = min_cost_config(req, catalog)
    if result.config is None:
        print("target <= 0: satisfied by the empty configuration at cost $0")
        return EXIT_OK
    record = ResultRecord.from_metrics(
        result.config,
        result.metrics,
        target=f"{req.target_metric}>={req.target_value:.1e}",
        regime=req.regime,
    )
    _emit([record], args.format)
    return EXIT_OK


def _cmd_table(args, catalog) -> int:
    regime = regime_by_name(args.regime) if args.regime else None
    records = []
    for row in BENCHMARK_TABLES[args.preset]:
        overrides = {}
        if args.scenario_mode:
            overrides["scenario"] = ScenarioMode.parse(args.scenario_mode)
        if args.duration_days:
            overrides["duration_days"] = args.duration_days
        cfg = row.run_config(catalog, **overrides)
        metrics = simulate(cfg)
        records.append(
            ResultRecord.from_metrics(cfg, metrics, target=row.label, regime=regime)
        )
    _emit(records, args.format)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        catalog = Catalog.load(args.catalog) if args.catalog else None
        if args.command == "simulate":
            return _cmd_simulate(args, catalog)
        if args.command == "optimize":
            return _cmd_optimize(args, catalog)
        if args.command == "table":
            return _cmd_table(args, catalog)
        if args.command == "serve":
            serve(port=args.port, host=args.host)
            return EXIT_OK
    except ScenarioParseError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InfeasibleConfigError, InfeasibleTargetError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UnknownPresetError, DtsimError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
