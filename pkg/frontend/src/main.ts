/** Dashboard bootstrap: every edit posts the scenario to the service and
 * re-renders from the response; the UI computes nothing itself. */

import { ApiClient, ServiceError, SimulateResponse } from "./api.js";
import {
  Controls,
  buildControls,
  buildRegimeImpactPanel,
  el,
  renderCompliance,
  renderComparison,
  renderError,
  renderEtaBreakdown,
  renderMetrics,
  renderRegimeImpact,
} from "./dashboard.js";
import * as fmt from "./format.js";
import {
  DEFAULT_SCENARIO,
  PRESET_SCENARIOS,
  UiScenario,
  decodeFragment,
  encodeFragment,
  toScenarioFileText,
  toSimulateBody,
} from "./scenario.js";
import { ComparisonState, RequestSequencer, metricDeltas, regimeImpact } from "./state.js";

const serviceUrl =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8351";

const api = new ApiClient(serviceUrl);
const sequencer = new RequestSequencer();
const comparison = new ComparisonState();

let scenario: UiScenario = { ...DEFAULT_SCENARIO };
let lastResponse: SimulateResponse | null = null;
let controls: Controls;

const banner = el("div", "banner");
const metricsPane = el("section", "pane");
const etaPane = el("section", "pane");
const compliancePane = el("section", "pane");
const comparePane = el("section", "pane");
const inlineError = el("div", "inline-error");

async function refresh(): Promise<void> {
  const { token, signal } = sequencer.issue();
  window.location.hash = encodeFragment(scenario);
  try {
    const response = await api.simulate(toSimulateBody(scenario), signal);
    if (!sequencer.isCurrent(token)) return; // superseded by a newer edit
    lastResponse = response;
    renderError(banner, null);
    renderError(inlineError, null);
    renderMetrics(metricsPane, response);
    renderEtaBreakdown(etaPane, response);
    renderCompliance(compliancePane, response.compliance);
    const stale = comparison.needsRealign(scenario.scenario);
    if (stale) {
      // the scenario-mode selector governs both sides of a comparison
      const repinned = await api.simulate(toSimulateBody(stale), signal);
      if (!sequencer.isCurrent(token)) return;
      comparison.realign(stale, repinned);
    }
    renderComparePanel();
  } catch (error) {
    if (!sequencer.isCurrent(token)) return;
    if (error instanceof ServiceError) {
      if (error.status === 422) {
        // infeasible configuration: show the binding constraint inline
        renderError(
          inlineError,
          `infeasible [${error.detail.constraint ?? "constraint"}]: ${error.detail.error}`,
        );
      } else {
        for (const field of error.detail.fields ?? []) {
          controls.setInvalid(field.loc, field.msg);
        }
        renderError(inlineError, error.detail.error);
      }
    } else if ((error as Error).name !== "AbortError") {
      renderError(banner, `simulator service unreachable at ${serviceUrl} — is "dtsim serve" running?`);
    }
  }
}

function renderComparePanel(): void {
  if (comparison.pinned && lastResponse) {
    renderComparison(
      comparePane,
      metricDeltas(lastResponse, comparison.pinned.response, fmt),
    );
  } else {
    renderComparison(comparePane, null);
  }
}

function onEdit(): void {
  scenario = { ...scenario, ...controls.read() };
  void refresh();
}

function loadPreset(name: string): void {
  const overrides = PRESET_SCENARIOS[name];
  if (!overrides) return;
  scenario = { ...DEFAULT_SCENARIO, ...overrides };
  controls.write(scenario);
  void refresh();
}

async function boot(): Promise<void> {
  document.title = "distributed-training what-if dashboard";
  const root = document.getElementById("app") ?? document.body;
  root.replaceChildren();
  root.append(banner);

  try {
    const [catalog, regimes] = await Promise.all([api.catalog(), api.regimes()]);
    scenario = decodeFragment(window.location.hash);
    controls = buildControls(catalog.presets, regimes.regimes, scenario, onEdit, loadPreset);
  } catch {
    renderError(banner, `simulator service unreachable at ${serviceUrl} — is "dtsim serve" running?`);
    return;
  }

  const layout = el("div", "layout");
  const left = el("div", "column");
  left.append(controls.root);

  const actions = el("div", "actions");
  const pinButton = el("button", undefined, "pin for comparison");
  pinButton.addEventListener("click", () => {
    if (lastResponse) {
      comparison.pin(scenario, lastResponse);
      renderComparePanel();
    }
  });
  const clearButton = el("button", undefined, "clear pin");
  clearButton.addEventListener("click", () => {
    comparison.clear();
    renderComparePanel();
  });
  const exportButton = el("button", undefined, "copy scenario file");
  exportButton.addEventListener("click", () => {
    void navigator.clipboard.writeText(toScenarioFileText(scenario));
  });
  actions.append(pinButton, clearButton, exportButton);
  left.append(actions, inlineError);

  const impactView = buildRegimeImpactPanel();
  impactView.run.addEventListener("click", async () => {
    const target = Number(impactView.target.value);
    if (!Number.isFinite(target) || target <= 0) {
      impactView.status.textContent = "target must be a positive FLOP count";
      return;
    }
    impactView.status.textContent = "running the optimizer under both regimes…";
    impactView.run.disabled = true;
    try {
      const common = {
        target_metric: "c_quality" as const,
        target_value: target,
        network: toSimulateBody(scenario).network,
        duration_days: scenario.durationDays,
        scenario: scenario.scenario,
      };
      const [baseline, amended] = await Promise.all([
        api.optimize({ ...common, regime: scenario.regime }),
        api.optimize({ ...common, regime: "scher-amended" }),
      ]);
      renderRegimeImpact(
        impactView,
        regimeImpact(
          { cost: baseline.cost, nodes: baseline.nodes },
          { cost: amended.cost, nodes: amended.nodes },
        ),
        { baseline: scenario.regime, amended: "scher-amended" },
      );
      impactView.status.textContent = "";
    } catch (error) {
      impactView.status.textContent =
        error instanceof ServiceError ? error.detail.error : "optimizer request failed";
    } finally {
      impactView.run.disabled = false;
    }
  });

  const right = el("div", "column");
  right.append(metricsPane, etaPane, compliancePane, comparePane, impactView.root);
  layout.append(left, right);
  root.append(layout);

  window.addEventListener("hashchange", () => {
    scenario = decodeFragment(window.location.hash);
    controls.write(scenario);
    void refresh();
  });

  await refresh();
}

void boot();
