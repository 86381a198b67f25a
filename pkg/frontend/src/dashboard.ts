/** DOM construction and rendering for the what-if dashboard. */

import type { CatalogPreset, ComplianceOut, RegimeOut, SimulateResponse } from "./api.js";
import * as fmt from "./format.js";
import { PRESET_SCENARIOS, RANGES, UiScenario } from "./scenario.js";
import { MetricDelta } from "./state.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

interface ControlSpec {
  label: string;
  field: keyof UiScenario;
  kind: "number" | "select";
  min?: number;
  max?: number;
  step?: number;
  options?: string[];
}

const ETA_FACTORS: { key: keyof SimulateResponse["eta_breakdown"]; label: string }[] = [
  { key: "eta_h", label: "sync interval" },
  { key: "eta_comp", label: "compression" },
  { key: "eta_rep", label: "replica divergence" },
  { key: "eta_act", label: "activations" },
];

export interface Controls {
  root: HTMLElement;
  read(): Partial<UiScenario>;
  write(s: UiScenario): void;
  setInvalid(fieldPath: string, message: string | null): void;
}

export function buildControls(
  presets: CatalogPreset[],
  regimes: RegimeOut[],
  initial: UiScenario,
  onEdit: () => void,
  onLoadPreset: (name: string) => void,
): Controls {
  const specs: ControlSpec[] = [
    { label: "node preset", field: "preset", kind: "select", options: presets.map((p) => p.name) },
    { label: "nodes", field: "nNodes", kind: "number", min: RANGES.nNodes.min, max: RANGES.nNodes.max, step: 1 },
    { label: "inner steps h", field: "h", kind: "number", min: RANGES.h.min, max: RANGES.h.max, step: 1 },
    { label: "compression", field: "compression", kind: "number", min: RANGES.compression.min, max: RANGES.compression.max },
    { label: "mode", field: "mode", kind: "select", options: ["flat", "hierarchical", "pipeline"] },
    { label: "pipeline stages", field: "stages", kind: "select", options: RANGES.stages.map(String) },
    { label: "model params (or auto)", field: "modelParams", kind: "number" },
    { label: "bandwidth up (Mbps)", field: "bandwidthUpMbps", kind: "number", min: RANGES.bandwidthMbps.min, max: RANGES.bandwidthMbps.max },
    { label: "bandwidth down (Mbps)", field: "bandwidthDownMbps", kind: "number", min: RANGES.bandwidthMbps.min, max: RANGES.bandwidthMbps.max },
    { label: "RTT (ms)", field: "rttMs", kind: "number", min: RANGES.rttMs.min, max: RANGES.rttMs.max },
    { label: "duration (days)", field: "durationDays", kind: "number", min: RANGES.durationDays.min, max: RANGES.durationDays.max },
    { label: "MFU", field: "mfu", kind: "number", min: RANGES.mfu.min, max: RANGES.mfu.max, step: 0.01 },
    { label: "tokens per step", field: "tokensPerStep", kind: "number", min: 1 },
    { label: "scenario mode", field: "scenario", kind: "select", options: ["optimistic", "expected", "conservative"] },
    { label: "policy regime", field: "regime", kind: "select", options: regimes.map((r) => r.name) },
  ];

  const root = el("form", "controls");
  root.addEventListener("submit", (e) => e.preventDefault());
  const inputs = new Map<keyof UiScenario, HTMLInputElement | HTMLSelectElement>();
  const errors = new Map<string, HTMLElement>();

  const presetRow = el("label", "control");
  presetRow.append(el("span", "control-label", "load preset scenario"));
  const presetSelect = el("select");
  presetSelect.append(el("option", undefined, "—"));
  for (const name of Object.keys(PRESET_SCENARIOS)) {
    presetSelect.append(el("option", undefined, name));
  }
  presetSelect.addEventListener("change", () => {
    if (presetSelect.value !== "—") onLoadPreset(presetSelect.value);
  });
  presetRow.append(presetSelect);
  root.append(presetRow);

  for (const spec of specs) {
    const row = el("label", "control");
    row.append(el("span", "control-label", spec.label));
    let input: HTMLInputElement | HTMLSelectElement;
    if (spec.kind === "select") {
      input = el("select");
      for (const option of spec.options ?? []) {
        input.append(el("option", undefined, option));
      }
    } else {
      input = el("input");
      input.type = "text";
      input.inputMode = "decimal";
      if (spec.min !== undefined) input.dataset.min = String(spec.min);
      if (spec.max !== undefined) input.dataset.max = String(spec.max);
    }
    input.name = spec.field;
    input.addEventListener("change", onEdit);
    input.addEventListener("input", () => setError(spec.field, null));
    inputs.set(spec.field, input);
    row.append(input);
    const err = el("span", "control-error");
    errors.set(spec.field, err);
    row.append(err);
    root.append(row);
  }

  function setError(field: string, message: string | null): void {
    const node = errors.get(field);
    if (node) node.textContent = message ?? "";
  }

  function read(): Partial<UiScenario> {
    const out: Record<string, unknown> = {};
    for (const [field, input] of inputs) {
      const raw = input.value.trim();
      if (field === "modelParams") {
        out[field] = raw === "auto" || raw === "" ? "auto" : Number(raw);
        continue;
      }
      if (input instanceof HTMLSelectElement) {
        out[field] = field === "stages" ? Number(raw) : raw;
        continue;
      }
      out[field] = Number(raw);
    }
    return out as Partial<UiScenario>;
  }

  function write(s: UiScenario): void {
    for (const [field, input] of inputs) {
      input.value = String(s[field]);
    }
  }

  write(initial);
  return {
    root,
    read,
    write,
    setInvalid: (fieldPath, message) => {
      // service 400 locs look like body.diloco.h; last segment maps to a control
      const leaf = fieldPath.split(".").pop() ?? fieldPath;
      const byBody: Record<string, keyof UiScenario> = {
        n_nodes: "nNodes",
        h: "h",
        compression: "compression",
        stages: "stages",
        model_params: "modelParams",
        bandwidth_up_mbps: "bandwidthUpMbps",
        bandwidth_down_mbps: "bandwidthDownMbps",
        rtt_ms: "rttMs",
        duration_days: "durationDays",
        mfu: "mfu",
        tokens_per_step: "tokensPerStep",
        preset: "preset",
      };
      setError(byBody[leaf] ?? leaf, message);
    },
  };
}

export function renderMetrics(container: HTMLElement, resp: SimulateResponse): void {
  container.replaceChildren();
  const rows: [string, string][] = [
    ["C_local", fmt.flops(resp.c_local)],
    ["C_quality", fmt.flops(resp.c_quality)],
    ["C_throughput", fmt.flops(resp.c_throughput)],
    ["eta", fmt.ratio(resp.eta)],
    ["chi", fmt.ratio(resp.chi)],
    ["model", fmt.params(resp.model_params)],
    ["training tokens", fmt.tokens(resp.d_tokens)],
    ["overtraining", fmt.times(resp.ot)],
    ["cost", fmt.cost(resp.cost)],
    ["traffic per node", fmt.mbps(resp.traffic.average_traffic_bps)],
    ["sync wall time", fmt.seconds(resp.traffic.sync_wall_time_s)],
    ["compute-bound", resp.compute_bound ? "yes" : `no (${fmt.times(resp.traffic.slowdown)} slowdown)`],
    ["replicas", String(resp.replicas)],
    ["expected hardware failures", resp.expected_failures.toFixed(0)],
  ];
  const table = el("dl", "metrics");
  for (const [label, value] of rows) {
    table.append(el("dt", undefined, label));
    table.append(el("dd", undefined, value));
  }
  container.append(table);
  if (resp.warnings.length > 0) {
    const list = el("ul", "warnings");
    for (const warning of resp.warnings) list.append(el("li", undefined, warning));
    container.append(list);
  }
}

export function renderEtaBreakdown(container: HTMLElement, resp: SimulateResponse): void {
  container.replaceChildren(el("h3", undefined, "inefficiency factors"));
  for (const factor of ETA_FACTORS) {
    const value = resp.eta_breakdown[factor.key];
    const row = el("div", "eta-row");
    row.append(el("span", "eta-label", `${factor.label} (${factor.key})`));
    const bar = el("div", "eta-bar");
    const fill = el("div", "eta-fill");
    fill.style.width = `${Math.max(1, value * 100)}%`;
    bar.append(fill);
    row.append(bar);
    row.append(el("span", "eta-value", fmt.ratio(value)));
    container.append(row);
  }
  const total = el("div", "eta-row eta-total");
  total.append(el("span", "eta-label", "eta (product)"));
  total.append(el("span", "eta-value", fmt.ratio(resp.eta_breakdown.eta)));
  container.append(total);
}

export function renderCompliance(container: HTMLElement, compliance?: ComplianceOut): void {
  container.replaceChildren(el("h3", undefined, "compliance"));
  if (!compliance) {
    container.append(el("p", undefined, "no regime selected"));
    return;
  }
  const badges = el("div", "badges");
  const node = el(
    "span",
    `badge ${compliance.node_registrable ? "badge-bad" : "badge-good"}`,
    compliance.node_registrable
      ? `node registrable (${compliance.binding_rule})`
      : "node below registration thresholds",
  );
  badges.append(node);
  for (const violation of compliance.model_violations) {
    badges.append(
      el(
        "span",
        "badge badge-bad",
        `${violation.label} > ${violation.threshold_flop} FLOP`,
      ),
    );
  }
  if (compliance.model_violations.length === 0) {
    badges.append(el("span", "badge badge-good", "no model threshold exceeded"));
  }
  container.append(badges);
  container.append(el("p", "narrative", compliance.narrative));
}

export function renderComparison(
  container: HTMLElement,
  deltas: MetricDelta[] | null,
): void {
  container.replaceChildren(el("h3", undefined, "comparison"));
  if (!deltas) {
    container.append(el("p", undefined, "pin the current scenario to compare"));
    return;
  }
  const table = el("table", "compare");
  const head = el("tr");
  for (const cell of ["metric", "live", "pinned", "delta"]) {
    head.append(el("th", undefined, cell));
  }
  table.append(head);
  for (const row of deltas) {
    const tr = el("tr");
    tr.append(el("td", undefined, row.label));
    tr.append(el("td", undefined, row.live));
    tr.append(el("td", undefined, row.pinned));
    tr.append(el("td", undefined, row.delta));
    table.append(tr);
  }
  container.append(table);
}

export function renderError(container: HTMLElement, message: string | null): void {
  container.textContent = message ?? "";
  container.classList.toggle("visible", message !== null);
}

export interface RegimeImpactView {
  root: HTMLElement;
  target: HTMLInputElement;
  run: HTMLButtonElement;
  status: HTMLElement;
  result: HTMLElement;
}

/** Panel comparing the minimum evasion cost under the current regime against
 * the memory-amended one, via two optimizer runs. */
export function buildRegimeImpactPanel(): RegimeImpactView {
  const root = el("section", "pane");
  root.append(el("h3", undefined, "regime impact (optimizer)"));
  const row = el("div", "actions");
  const target = el("input");
  target.type = "text";
  target.value = "1e25";
  target.title = "quality-adjusted compute target, FLOP";
  const run = el("button", undefined, "compare current regime vs scher-amended");
  row.append(target, run);
  const status = el("div", "narrative");
  const result = el("div");
  root.append(row, status, result);
  return { root, target, run, status, result };
}

export function renderRegimeImpact(
  view: RegimeImpactView,
  impact: {
    baselineCost: number;
    amendedCost: number;
    costRatio: number;
    baselineNodes: number;
    amendedNodes: number;
    nodeRatio: number;
  } | null,
  labels: { baseline: string; amended: string },
): void {
  view.result.replaceChildren();
  if (!impact) {
    view.result.append(el("p", "narrative", "comparison unavailable (unpriced or empty result)"));
    return;
  }
  const table = el("table", "compare");
  const head = el("tr");
  for (const cell of ["", labels.baseline, labels.amended, "ratio"]) {
    head.append(el("th", undefined, cell));
  }
  table.append(head);
  const costRow = el("tr");
  costRow.append(el("td", undefined, "min cost"));
  costRow.append(el("td", undefined, fmt.cost(impact.baselineCost)));
  costRow.append(el("td", undefined, fmt.cost(impact.amendedCost)));
  costRow.append(el("td", undefined, `${impact.costRatio.toFixed(2)}x`));
  table.append(costRow);
  const nodeRow = el("tr");
  nodeRow.append(el("td", undefined, "nodes"));
  nodeRow.append(el("td", undefined, String(impact.baselineNodes)));
  nodeRow.append(el("td", undefined, String(impact.amendedNodes)));
  nodeRow.append(el("td", undefined, `${impact.nodeRatio.toFixed(2)}x`));
  table.append(nodeRow);
  view.result.append(table);
}
