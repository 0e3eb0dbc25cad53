/** Browser wiring: restores the session from the URL, renders the editors,
 * and keeps the results strip in sync with the service through debounced,
 * sequence-gated /whatif calls. All display logic lives in view.ts. */

import { ApiError, RiskGapClient, type ModelOverride, type ModelResponse } from "./api.js";
import { debounce, SequenceGate } from "./latest.js";
import {
  decodeSession,
  DEFAULT_SESSION,
  encodeSession,
  renormalizePercents,
  toFractions,
  type SessionState,
} from "./state.js";
import {
  renderAllocationEditor,
  renderBanner,
  renderMetricTable,
  renderParameterPanel,
  renderResultsStrip,
  type MetricColumn,
} from "./view.js";

const METRIC_IDS = [
  "var",
  "euclid",
  "quad:identity",
  "quad:linear",
  "quad:coupled",
  "quad:distance",
  "quad:asym",
  "kl",
];

const query = new URLSearchParams(window.location.search);
const apiBase = query.get("api") ?? "http://127.0.0.1:8000";
const client = new RiskGapClient(apiBase);
const gate = new SequenceGate();

let state: SessionState = structuredClone(
  decodeSession(window.location.search) ?? DEFAULT_SESSION,
);
let override: ModelOverride | null = null;
let alphaOverride: number | null = null;
let baseModel: ModelResponse | null = null;

const el = {
  banner: document.getElementById("banner")!,
  editors: document.getElementById("editors")!,
  marketValue: document.getElementById("market-value") as HTMLInputElement,
  results: document.getElementById("results")!,
  requestError: document.getElementById("request-error")!,
  metrics: document.getElementById("metrics")!,
  parameters: document.getElementById("parameters")!,
  addCandidate: document.getElementById("add-candidate")!,
  compare: document.getElementById("compare-metrics")!,
};

function renderEditors(): void {
  const parts = [renderAllocationEditor("profile", "Stated profile", state.profile)];
  state.candidates.forEach((weights, i) => {
    parts.push(
      renderAllocationEditor(
        `candidate-${i}`,
        `Candidate ${i + 1}`,
        weights,
        state.candidates.length > 1,
      ),
    );
  });
  el.editors.innerHTML = parts.join("");
  el.marketValue.value = String(state.marketValue);
}

function allocationFor(kind: string): number[] | null {
  if (kind === "profile") return state.profile;
  const match = /^candidate-(\d+)$/.exec(kind);
  if (!match) return null;
  return state.candidates[Number(match[1])] ?? null;
}

function syncUrl(): void {
  const encoded = encodeSession(state);
  const api = query.get("api");
  const suffix = api ? `&api=${encodeURIComponent(api)}` : "";
  window.history.replaceState(null, "", `?${encoded}${suffix}`);
}

function clearBanner(): void {
  el.banner.innerHTML = "";
}

function showUnreachable(): void {
  el.banner.innerHTML = renderBanner(`Service at ${apiBase} is unreachable.`);
  el.banner.querySelector("[data-action=retry]")?.addEventListener("click", () => {
    clearBanner();
    void bootstrap();
  });
}

function highlightField(field: string | null): void {
  el.parameters
    .querySelectorAll("input.invalid")
    .forEach((input) => input.classList.remove("invalid"));
  if (!field) return;
  const name = field.split(/[.[]/, 1)[0] ?? field;
  el.parameters
    .querySelectorAll(`input[data-field="${name}"]`)
    .forEach((input) => input.classList.add("invalid"));
}

async function refreshNow(): Promise<void> {
  const seq = gate.next();
  try {
    const body = {
      profile: toFractions(state.profile),
      candidates: state.candidates.map((c) => toFractions(c)),
      market_value: state.marketValue,
      ...(alphaOverride !== null ? { alpha: alphaOverride } : {}),
      ...(override !== null ? { model_override: override } : {}),
    };
    const response = await client.whatif(body);
    if (!gate.accept(seq)) return;
    clearBanner();
    highlightField(null);
    el.requestError.textContent = "";
    el.results.innerHTML = renderResultsStrip(state, response);
  } catch (err) {
    if (!gate.accept(seq)) return;
    if (err instanceof ApiError) {
      el.requestError.textContent = err.message;
      highlightField(err.field);
    } else {
      showUnreachable();
    }
  }
}

const refresh = debounce(() => void refreshNow(), 150);

async function compareMetrics(): Promise<void> {
  const base = {
    profile: toFractions(state.profile),
    candidates: state.candidates.map((c) => toFractions(c)),
  };
  const columns: MetricColumn[] = [];
  let gaps: number[] = [];
  for (const metric of METRIC_IDS) {
    try {
      const response = await client.metrics({ ...base, metric });
      columns.push({ metric, response });
      if (metric === "var") gaps = response.values;
    } catch (err) {
      const note = err instanceof ApiError ? `omitted: ${err.message}` : "omitted: request failed";
      columns.push({ metric, response: null, note });
    }
  }
  el.metrics.innerHTML = renderMetricTable(columns, gaps);
}

function bindEvents(): void {
  el.editors.addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const kind = input.dataset.alloc;
    if (!kind) return;
    const weights = allocationFor(kind);
    if (!weights) return;
    weights[Number(input.dataset.bucket)] = Math.max(Number(input.value) || 0, 0);
    try {
      const committed = renormalizePercents(weights);
      committed.forEach((w, i) => {
        weights[i] = w;
      });
    } catch {
      return; // leave raw weights until they become renormalizable
    }
    renderEditors();
    syncUrl();
    refresh();
  });

  el.marketValue.addEventListener("change", () => {
    const value = Number(el.marketValue.value);
    if (Number.isFinite(value) && value >= 0) {
      state.marketValue = value;
      syncUrl();
      refresh();
    }
  });

  el.addCandidate.addEventListener("click", () => {
    state.candidates.push([...state.profile]);
    renderEditors();
    syncUrl();
    refresh();
  });

  el.editors.addEventListener("click", (event) => {
    const button = event.target as HTMLElement;
    const kind = button.dataset.remove;
    if (!kind || state.candidates.length <= 1) return;
    const match = /^candidate-(\d+)$/.exec(kind);
    if (!match) return;
    state.candidates.splice(Number(match[1]), 1);
    renderEditors();
    syncUrl();
    refresh();
  });

  el.compare.addEventListener("click", () => void compareMetrics());

  el.parameters.addEventListener("change", () => {
    if (!baseModel) return;
    const read = (field: string, i: number, j?: number): number => {
      const selector =
        j === undefined
          ? `input[data-field="${field}"][data-i="${i}"]`
          : `input[data-field="${field}"][data-i="${i}"][data-j="${j}"]`;
      const input = el.parameters.querySelector<HTMLInputElement>(selector);
      return Number(input?.value ?? 0);
    };
    override = {
      mu: baseModel.mu.map((_, i) => read("mu", i)),
      sigma: baseModel.sigma.map((_, i) => read("sigma", i)),
      rho: baseModel.rho.map((row, i) => row.map((_, j) => read("rho", i, j))),
    };
    const alphaInput = el.parameters.querySelector<HTMLInputElement>('input[data-field="alpha"]');
    const alpha = Number(alphaInput?.value);
    alphaOverride = Number.isFinite(alpha) ? alpha : null;
    refresh();
  });
}

async function bootstrap(): Promise<void> {
  renderEditors();
  syncUrl();
  try {
    baseModel = await client.model();
  } catch {
    showUnreachable();
    return;
  }
  el.parameters.innerHTML = renderParameterPanel(baseModel);
  await refreshNow();
}

bindEvents();
void bootstrap();
