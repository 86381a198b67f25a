/** The editable what-if scenario, its defaults, the mapping onto the
 * service's /simulate body, and a URL-fragment codec so scenarios are
 * shareable links. */

import type { SimulateBody } from "./api.js";

export interface UiScenario {
  preset: string;
  nNodes: number;
  h: number;
  compression: number;
  mode: "flat" | "hierarchical" | "pipeline";
  stages: number;
  modelParams: number | "auto";
  bandwidthUpMbps: number;
  bandwidthDownMbps: number;
  rttMs: number;
  durationDays: number;
  mfu: number;
  tokensPerStep: number;
  scenario: "optimistic" | "expected" | "conservative";
  regime: string;
}

export const DEFAULT_SCENARIO: UiScenario = {
  preset: "16xH100",
  nNodes: 2,
  h: 18,
  compression: 150,
  mode: "flat",
  stages: 1,
  modelParams: "auto",
  bandwidthUpMbps: 100,
  bandwidthDownMbps: 100,
  rttMs: 100,
  durationDays: 740,
  mfu: 0.4,
  tokensPerStep: 524288,
  scenario: "expected",
  regime: "scher",
};

/** Ranges mirror the optimizer's default search space. */
export const RANGES = {
  nNodes: { min: 1, max: 10000 },
  h: { min: 1, max: 128 },
  compression: { min: 1, max: 1000 },
  stages: [1, 2, 4, 8],
  bandwidthMbps: { min: 1, max: 10000 },
  rttMs: { min: 0, max: 1000 },
  durationDays: { min: 1, max: 1500 },
  mfu: { min: 0.05, max: 1.0 },
} as const;

export function toSimulateBody(s: UiScenario): SimulateBody {
  return {
    node: { preset: s.preset },
    n_nodes: s.nNodes,
    diloco: { h: s.h, compression: s.compression, mode: s.mode, stages: s.stages },
    network: {
      bandwidth_up_mbps: s.bandwidthUpMbps,
      bandwidth_down_mbps: s.bandwidthDownMbps,
      rtt_ms: s.rttMs,
    },
    duration_days: s.durationDays,
    mfu: s.mfu,
    model_params: s.modelParams,
    scenario: s.scenario,
    tokens_per_step: s.tokensPerStep,
    regime: s.regime,
  };
}

// short keys keep fragments readable; one entry per scenario field
const FRAGMENT_KEYS: [keyof UiScenario, string][] = [
  ["preset", "p"],
  ["nNodes", "n"],
  ["h", "h"],
  ["compression", "c"],
  ["mode", "m"],
  ["stages", "s"],
  ["modelParams", "mp"],
  ["bandwidthUpMbps", "bu"],
  ["bandwidthDownMbps", "bd"],
  ["rttMs", "rtt"],
  ["durationDays", "d"],
  ["mfu", "mfu"],
  ["tokensPerStep", "tps"],
  ["scenario", "sc"],
  ["regime", "rg"],
];

export function encodeFragment(s: UiScenario): string {
  const params = new URLSearchParams();
  for (const [field, short] of FRAGMENT_KEYS) {
    params.set(short, String(s[field]));
  }
  return params.toString();
}

export function decodeFragment(fragment: string): UiScenario {
  const params = new URLSearchParams(fragment.replace(/^#/, ""));
  const out: UiScenario = { ...DEFAULT_SCENARIO };
  for (const [field, short] of FRAGMENT_KEYS) {
    const raw = params.get(short);
    if (raw === null) continue;
    const current = DEFAULT_SCENARIO[field];
    if (field === "modelParams") {
      out.modelParams = raw === "auto" ? "auto" : Number(raw);
    } else if (typeof current === "number") {
      const value = Number(raw);
      if (Number.isFinite(value)) (out as unknown as Record<string, unknown>)[field] = value;
    } else {
      (out as unknown as Record<string, unknown>)[field] = raw;
    }
  }
  return out;
}

/** Mirror of the scenario-file syntax used by the CLI, for export. */
export function toScenarioFileText(s: UiScenario): string {
  const lines = [
    `node.preset = ${s.preset}`,
    `run.n_nodes = ${s.nNodes}`,
    `run.model_params = ${s.modelParams}`,
    `run.duration_days = ${s.durationDays}`,
    `run.mfu = ${s.mfu}`,
    `diloco.h = ${s.h}`,
    `diloco.compression = ${s.compression}`,
    `diloco.mode = ${s.mode}`,
    `network.bandwidth_up_mbps = ${s.bandwidthUpMbps}`,
    `network.bandwidth_down_mbps = ${s.bandwidthDownMbps}`,
    `network.rtt_ms = ${s.rttMs}`,
    `training.tokens_per_step = ${s.tokensPerStep}`,
    `efficiency.scenario = ${s.scenario}`,
    `policy.regime = ${s.regime}`,
  ];
  if (s.mode === "pipeline") lines.splice(8, 0, `diloco.stages = ${s.stages}`);
  return lines.join("\n") + "\n";
}

export const PRESET_SCENARIOS: Record<string, Partial<UiScenario>> = {
  "Table 1 row 1 (1e24)": { preset: "16xH100", nNodes: 2, h: 18, modelParams: 91e9 },
  "Table 1 row 3 (1e25)": { preset: "16xGH200", nNodes: 34, h: 19, modelParams: 160e9 },
  "Llama 3.1-405B scale": {
    preset: "50xA100",
    nNodes: 625,
    h: 19,
    mode: "hierarchical",
    modelParams: 250e9,
  },
  "8-stage pipeline (conservative)": {
    preset: "16xH100",
    nNodes: 16,
    h: 3,
    mode: "pipeline",
    stages: 8,
    scenario: "conservative",
  },
};
