import { describe, expect, it } from "vitest";

import type { MetricsResponse, ModelResponse, WhatIfResponse } from "../src/api.js";
import { DEFAULT_SESSION } from "../src/state.js";
import {
  escapeHtml,
  metricDisagrees,
  renderAllocationEditor,
  renderBanner,
  renderMetricTable,
  renderParameterPanel,
  renderResultsStrip,
  type MetricColumn,
} from "../src/view.js";

import alignedFixture from "./fixtures/whatif_aligned_reference.json";
import identityFixture from "./fixtures/metrics_identity_reference.json";
import modelFixture from "./fixtures/model_reference.json";
import quadLinearFixture from "./fixtures/metrics_quadlinear_reference.json";
import varFixture from "./fixtures/metrics_var_reference.json";
import whatifFixture from "./fixtures/whatif_reference.json";

const whatif = whatifFixture as WhatIfResponse;
const aligned = alignedFixture as WhatIfResponse;
const model = modelFixture as ModelResponse;
const quadLinear = quadLinearFixture as MetricsResponse;
const identity = identityFixture as MetricsResponse;
const varMetric = varFixture as MetricsResponse;

// Values the default screen is expected to display, within ±0.03 of a
// percentage point of what the strip actually shows.
const REFERENCE_SCREEN = {
  profilePct: 10.91,
  candidatePcts: [-0.23, 31.18],
  gapPcts: [-11.14, 20.27],
  tolerance: 0.03 + 1e-9,
};

describe("results strip for the default screen", () => {
  const html = renderResultsStrip(DEFAULT_SESSION, whatif);

  it("shows the service's numbers at display precision", () => {
    expect(html).toContain("1089 bps");
    expect(html).toContain("10.89%");
    expect(html).toContain("-22 bps");
    expect(html).toContain("-0.22%");
    expect(html).toContain("3118 bps");
    expect(html).toContain("31.18%");
    expect(html).toContain("-11.11%");
    expect(html).toContain("+20.28%");
  });

  it("matches the reference screen within three hundredths of a percent", () => {
    const profilePct = Number((whatif.profile_var_bps / 100).toFixed(2));
    expect(Math.abs(profilePct - REFERENCE_SCREEN.profilePct)).toBeLessThanOrEqual(
      REFERENCE_SCREEN.tolerance,
    );
    whatif.candidates.forEach((candidate, i) => {
      const pct = Number((candidate.portfolio_var_bps / 100).toFixed(2));
      const gap = Number((candidate.discrepancy_bps / 100).toFixed(2));
      expect(Math.abs(pct - REFERENCE_SCREEN.candidatePcts[i]!)).toBeLessThanOrEqual(
        REFERENCE_SCREEN.tolerance,
      );
      expect(Math.abs(gap - REFERENCE_SCREEN.gapPcts[i]!)).toBeLessThanOrEqual(
        REFERENCE_SCREEN.tolerance,
      );
    });
  });

  it("labels the gaps with under/over badges", () => {
    expect(html).toContain("under-risked");
    expect(html).toContain("over-risked");
  });

  it("shows dollar impact from the service response", () => {
    expect(html).toContain("$12,327.03");
    expect(html).toContain("-$246.18");
    expect(html).toContain("$35,275.86");
    expect(html).toContain("$113,147.00");
  });

  it("keeps the model fingerprint visible", () => {
    expect(html).toContain(`<code class="fingerprint">${whatif.model_fingerprint}</code>`);
    expect(whatif.model_fingerprint).toMatch(/^[0-9a-f]{16}$/);
  });

  it("is identical after a URL-state reload of the same session", () => {
    const reloaded = renderResultsStrip(
      structuredClone(DEFAULT_SESSION),
      structuredClone(whatif),
    );
    expect(reloaded).toBe(html);
  });
});

describe("aligned candidate", () => {
  it("gets a zero gap and an aligned badge", () => {
    const html = renderResultsStrip(
      { ...DEFAULT_SESSION, candidates: [[0, 100, 0, 0, 0]] },
      aligned,
    );
    expect(html).toContain("+0.00%");
    expect(html).toContain(">aligned<");
  });
});

describe("metric comparison table", () => {
  const gaps = varMetric.values;
  const columns: MetricColumn[] = [
    { metric: "var", response: varMetric },
    { metric: "quad:linear", response: quadLinear },
  ];

  it("shows the exact weighted quadratic values", () => {
    const html = renderMetricTable(columns, gaps);
    expect(html).toContain("49280");
    expect(html).toContain("45380");
  });

  it("flags the quadratic metric for ranking against VaR backwards", () => {
    // Candidate 2 scores lower (45380 < 49280) but its risk gap is larger.
    expect(Math.abs(gaps[1]!)).toBeGreaterThan(Math.abs(gaps[0]!));
    expect(metricDisagrees(quadLinear.values, gaps)).toBe(true);
    const html = renderMetricTable(columns, gaps);
    expect(html).toContain('<tr class="flagged" data-metric="quad:linear">');
    expect(html).toContain('<tr class="agrees" data-metric="var">');
    expect(html).toContain("disagrees with VaR ranking");
  });

  it("flags identity equidistance against unequal VaR gaps", () => {
    // One-hot Low and one-hot High sit at the same identity distance from a
    // Low-Medium profile, while their VaR gaps differ by thousands of bps.
    const [a, b] = identity.values;
    expect(a).toBe(b);
    expect(metricDisagrees(identity.values, [-1111.2278519820538, 2028.2310899455751])).toBe(
      true,
    );
  });

  it("treats identical candidates as agreement, not pathology", () => {
    expect(metricDisagrees([7, 7], [100, 100])).toBe(false);
    expect(metricDisagrees([1, 2, 3], [-10, 20, -30])).toBe(false);
  });

  it("renders unknown metrics as an omission note", () => {
    const html = renderMetricTable(
      [{ metric: "quad:bogus", response: null, note: "omitted: unknown metric" }],
      gaps,
    );
    expect(html).toContain('<tr class="unavailable" data-metric="quad:bogus">');
    expect(html).toContain("omitted: unknown metric");
  });
});

describe("parameter panel and chrome", () => {
  it("renders every market parameter as an editable input", () => {
    const html = renderParameterPanel(model);
    for (const value of model.mu) expect(html).toContain(`value="${value}"`);
    for (const value of model.sigma) expect(html).toContain(`value="${value}"`);
    expect(html).toContain('data-field="alpha"');
    expect((html.match(/data-field="rho"/g) ?? []).length).toBe(25);
  });

  it("renders allocation editors with a live sum readout", () => {
    const html = renderAllocationEditor("profile", "Stated profile", [0, 100, 0, 0, 0]);
    expect(html).toContain("Low-Medium");
    expect(html).toContain('value="100.00"');
    expect(html).toContain("Σ 100.00%");
  });

  it("renders an unreachable-service banner with a retry control", () => {
    const html = renderBanner("Service at http://127.0.0.1:8000 is unreachable.");
    expect(html).toContain('role="alert"');
    expect(html).toContain('data-action="retry"');
    expect(html).toContain("unreachable");
  });

  it("escapes untrusted text", () => {
    expect(escapeHtml('<b a="1">&x</b>')).toBe("&lt;b a=&quot;1&quot;&gt;&amp;x&lt;/b&gt;");
  });
});
