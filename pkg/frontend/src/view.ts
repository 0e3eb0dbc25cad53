/** HTML renderers: pure functions from state and service responses to markup
 * strings, so every displayed number is testable without a browser. The DOM
 * wiring in main.ts only injects these strings and binds events. */

import type { MetricsResponse, ModelResponse, WhatIfResponse } from "./api.js";
import {
  bpsInteger,
  cad,
  classificationLabel,
  deltaDollars,
  metricValueText,
  percentFromBps,
  signedPercentFromBps,
} from "./format.js";
import { BUCKETS, type SessionState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Results strip: profile VaR line, one row per candidate, and the model
 * fingerprint the numbers are traceable to. */
export function renderResultsStrip(state: SessionState, response: WhatIfResponse): string {
  const profileDollars =
    response.profile_var_dollars === null
      ? ""
      : ` — a 1-in-${Math.round(1 / response.alpha)} year loss of ` +
        `<span class="cad">${cad(response.profile_var_dollars)}</span>` +
        ` on ${cad(state.marketValue)}`;
  const rows: string[] = [];
  for (const [i, result] of response.candidates.entries()) {
    const badge = escapeHtml(result.classification);
    const dollars =
      result.var_dollars === null ? "—" : `<span class="cad">${cad(result.var_dollars)}</span>`;
    const gapDollars = `<span class="cad">${cad(
      deltaDollars(state.marketValue, result.discrepancy_bps),
    )}</span>`;
    rows.push(
      `<tr class="candidate-row" data-candidate="${i}">` +
        `<td>Candidate ${i + 1}</td>` +
        `<td class="num">${bpsInteger(result.portfolio_var_bps)}</td>` +
        `<td class="num">${percentFromBps(result.portfolio_var_bps)}</td>` +
        `<td class="num gap">${signedPercentFromBps(result.discrepancy_bps)}</td>` +
        `<td><span class="badge ${badge}">${escapeHtml(
          classificationLabel(result.classification),
        )}</span></td>` +
        `<td class="num">${dollars}</td>` +
        `<td class="num">${gapDollars}</td>` +
        `</tr>`,
    );
  }
  return (
    `<p class="model-line">model <code class="fingerprint">${escapeHtml(
      response.model_fingerprint,
    )}</code> · α = ${response.alpha}</p>` +
    `<p class="profile-line">Profile VaR <strong>${bpsInteger(response.profile_var_bps)}</strong>` +
    ` (${percentFromBps(response.profile_var_bps)})${profileDollars}</p>` +
    `<table class="results-table"><thead><tr>` +
    `<th></th><th>VaR</th><th>VaR %</th><th>Gap</th><th></th>` +
    `<th>Loss $</th><th>Gap $</th>` +
    `</tr></thead><tbody>${rows.join("")}</tbody></table>`
  );
}

/** Five-bucket weight editor for the profile or one candidate. */
export function renderAllocationEditor(
  kind: string,
  label: string,
  percents: readonly number[],
  removable = false,
): string {
  const inputs = BUCKETS.map((bucket, i) => {
    const value = percents[i] ?? 0;
    return (
      `<label class="bucket"><span>${bucket}</span>` +
      `<input type="number" min="0" max="100" step="any" ` +
      `data-alloc="${kind}" data-bucket="${i}" value="${round2(value)}"></label>`
    );
  }).join("");
  const sum = percents.reduce((a, b) => a + b, 0);
  const remove = removable
    ? `<button type="button" class="remove" data-remove="${kind}">remove</button>`
    : "";
  return (
    `<fieldset class="allocation" data-editor="${kind}">` +
    `<legend>${escapeHtml(label)}${remove}</legend>${inputs}` +
    `<span class="sum" data-sum="${kind}">Σ ${round2(sum)}%</span></fieldset>`
  );
}

function round2(value: number): string {
  return value.toFixed(2);
}

/** Editable market-parameter panel (μ, σ, ρ, α) with the end-of-rejection
 * field names matching what the service reports on 400s. */
export function renderParameterPanel(model: ModelResponse): string {
  const muRow = vectorRow("mu", "μ %", model.mu);
  const sigmaRow = vectorRow("sigma", "σ %", model.sigma);
  const rhoRows = model.rho
    .map((row, i) => {
      const cells = row
        .map(
          (value, j) =>
            `<input type="number" step="any" data-field="rho" ` +
            `data-i="${i}" data-j="${j}" value="${value}">`,
        )
        .join("");
      return `<div class="rho-row">${cells}</div>`;
    })
    .join("");
  return (
    `<div class="param-grid">${muRow}${sigmaRow}` +
    `<div class="param-row"><span class="param-label">ρ</span>` +
    `<div class="rho-grid" data-field-group="rho">${rhoRows}</div></div>` +
    `<div class="param-row"><span class="param-label">α</span>` +
    `<input type="number" step="any" min="0" max="0.5" data-field="alpha" ` +
    `value="${model.alpha}"></div>` +
    `<p class="param-error" data-param-error hidden></p></div>`
  );
}

function vectorRow(field: string, label: string, values: readonly number[]): string {
  const cells = values
    .map(
      (value, i) =>
        `<input type="number" step="any" data-field="${field}" data-i="${i}" value="${value}">`,
    )
    .join("");
  return (
    `<div class="param-row"><span class="param-label">${label}</span>` +
    `<div data-field-group="${field}">${cells}</div></div>`
  );
}

// Metric values closer than this (relative) count as indistinguishable and
// risk gaps farther apart than this (bps) as genuinely different — the same
// thresholds the engine's own pathology report uses.
const VALUE_RTOL = 1e-9;
const GAP_ATOL_BPS = 0.5;

function valuesClose(a: number, b: number): boolean {
  return Math.abs(a - b) <= VALUE_RTOL * Math.max(Math.abs(a), Math.abs(b));
}

function rankOrder(keys: readonly number[]): number[] {
  return keys
    .map((key, i) => [key, i] as const)
    .sort((x, y) => x[0] - y[0] || x[1] - y[1])
    .map(([, i]) => i);
}

/** Does a metric's ordering or collapsing disagree with the VaR risk gaps?
 * (Display-side comparison of two service-provided columns.) */
export function metricDisagrees(values: readonly number[], gapsBps: readonly number[]): boolean {
  if (values.length !== gapsBps.length || values.length < 2) return false;
  const byValue = rankOrder(values);
  const byGap = rankOrder(gapsBps.map(Math.abs));
  if (byValue.some((v, i) => v !== byGap[i])) return true;
  for (let i = 0; i < values.length; i += 1) {
    for (let j = i + 1; j < values.length; j += 1) {
      if (
        valuesClose(values[i]!, values[j]!) &&
        Math.abs(gapsBps[i]! - gapsBps[j]!) > GAP_ATOL_BPS
      ) {
        return true;
      }
    }
  }
  return false;
}

export interface MetricColumn {
  metric: string;
  /** null when the service rejected the metric id. */
  response: MetricsResponse | null;
  note?: string;
}

/** Comparison table: one row per metric, one column per candidate, rows that
 * disagree with the VaR gaps marked. `gapsBps` is the "var" metric column. */
export function renderMetricTable(
  columns: readonly MetricColumn[],
  gapsBps: readonly number[],
): string {
  const header = gapsBps.map((_, i) => `<th>Candidate ${i + 1}</th>`).join("");
  const rows = columns
    .map((column) => {
      const name = escapeHtml(column.metric);
      if (column.response === null) {
        const note = escapeHtml(column.note ?? "unavailable");
        return (
          `<tr class="unavailable" data-metric="${name}">` +
          `<th>${name}</th><td colspan="${gapsBps.length}">${note}</td></tr>`
        );
      }
      const flagged = column.metric !== "var" && metricDisagrees(column.response.values, gapsBps);
      const cells = column.response.values
        .map((value) => `<td class="num">${metricValueText(value)}</td>`)
        .join("");
      const mark = flagged ? `<td class="note">disagrees with VaR ranking</td>` : `<td></td>`;
      return (
        `<tr class="${flagged ? "flagged" : "agrees"}" data-metric="${name}">` +
        `<th>${name}</th>${cells}${mark}</tr>`
      );
    })
    .join("");
  return (
    `<table class="metric-table"><thead><tr><th>metric</th>${header}<th></th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

/** Full-width error banner with a retry control. */
export function renderBanner(message: string): string {
  return (
    `<div class="banner" role="alert">${escapeHtml(message)} ` +
    `<button type="button" data-action="retry">Retry</button></div>`
  );
}
