/** Request sequencing and comparison state. Pure logic, covered by tests. */

import type { SimulateResponse } from "./api.js";
import type { UiScenario } from "./scenario.js";

/** Last-write-wins gate: an in-flight simulate is superseded by the latest
 * edit. Each issue() invalidates all earlier tokens and aborts their fetch. */
export class RequestSequencer {
  private current = 0;
  private controller: AbortController | null = null;

  issue(): { token: number; signal: AbortSignal } {
    this.controller?.abort();
    this.controller = new AbortController();
    this.current += 1;
    return { token: this.current, signal: this.controller.signal };
  }

  isCurrent(token: number): boolean {
    return token === this.current;
  }
}

export interface PinnedScenario {
  scenario: UiScenario;
  response: SimulateResponse;
}

/** Comparison is limited to one pinned scenario next to the live one. */
export class ComparisonState {
  pinned: PinnedScenario | null = null;

  pin(scenario: UiScenario, response: SimulateResponse): void {
    this.pinned = { scenario: { ...scenario }, response };
  }

  clear(): void {
    this.pinned = null;
  }

  /** The scenario-mode selector applies to both sides of a comparison: when
   * the live mode changes, the pinned side must be re-simulated under it.
   * Returns the scenario to re-post, or null if already aligned. */
  needsRealign(liveMode: UiScenario["scenario"]): UiScenario | null {
    if (!this.pinned || this.pinned.scenario.scenario === liveMode) return null;
    return { ...this.pinned.scenario, scenario: liveMode };
  }

  realign(scenario: UiScenario, response: SimulateResponse): void {
    if (this.pinned) this.pinned = { scenario: { ...scenario }, response };
  }
}

/** Cost and node-count impact of switching policy regimes, from two
 * optimizer responses (amended relative to baseline). */
export interface RegimeImpact {
  baselineCost: number;
  amendedCost: number;
  costRatio: number;
  baselineNodes: number;
  amendedNodes: number;
  nodeRatio: number;
}

export function regimeImpact(
  baseline: { cost: number | null; nodes: number },
  amended: { cost: number | null; nodes: number },
): RegimeImpact | null {
  if (baseline.cost === null || amended.cost === null || baseline.cost === 0) {
    return null;
  }
  if (baseline.nodes === 0) return null;
  return {
    baselineCost: baseline.cost,
    amendedCost: amended.cost,
    costRatio: amended.cost / baseline.cost,
    baselineNodes: baseline.nodes,
    amendedNodes: amended.nodes,
    nodeRatio: amended.nodes / baseline.nodes,
  };
}

export interface MetricDelta {
  label: string;
  live: string;
  pinned: string;
  delta: string;
}

export function metricDeltas(
  live: SimulateResponse,
  pinned: SimulateResponse,
  fmt: {
    flops: (s: string) => string;
    cost: (c: number | null) => string;
    ratio: (v: number, d?: number) => string;
    times: (v: number) => string;
    mbps: (v: number) => string;
    delta: (a: number, b: number) => string;
  },
): MetricDelta[] {
  return [
    {
      label: "C_local",
      live: fmt.flops(live.c_local),
      pinned: fmt.flops(pinned.c_local),
      delta: fmt.delta(Number(live.c_local), Number(pinned.c_local)),
    },
    {
      label: "C_quality",
      live: fmt.flops(live.c_quality),
      pinned: fmt.flops(pinned.c_quality),
      delta: fmt.delta(Number(live.c_quality), Number(pinned.c_quality)),
    },
    {
      label: "eta",
      live: fmt.ratio(live.eta),
      pinned: fmt.ratio(pinned.eta),
      delta: fmt.delta(live.eta, pinned.eta),
    },
    {
      label: "chi",
      live: fmt.ratio(live.chi),
      pinned: fmt.ratio(pinned.chi),
      delta: fmt.delta(live.chi, pinned.chi),
    },
    {
      label: "overtraining",
      live: fmt.times(live.ot),
      pinned: fmt.times(pinned.ot),
      delta: fmt.delta(live.ot, pinned.ot),
    },
    {
      label: "cost",
      live: fmt.cost(live.cost),
      pinned: fmt.cost(pinned.cost),
      delta:
        live.cost !== null && pinned.cost !== null
          ? fmt.delta(live.cost, pinned.cost)
          : "n/a",
    },
    {
      label: "traffic",
      live: fmt.mbps(live.traffic.average_traffic_bps),
      pinned: fmt.mbps(pinned.traffic.average_traffic_bps),
      delta: fmt.delta(
        live.traffic.average_traffic_bps,
        pinned.traffic.average_traffic_bps,
      ),
    },
  ];
}
