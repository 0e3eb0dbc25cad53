/** Session state: everything needed to reproduce a calculator screen.
 * Weights are held as percents; the wire always carries fractions. State is
 * shareable as a URL query string with an exact number round-trip. */

export const BUCKETS = ["Low", "Low-Medium", "Medium", "Medium-High", "High"] as const;
export const N_BUCKETS = 5;

export interface SessionState {
  /** Percent weights, five per allocation. */
  profile: number[];
  /** At least one candidate portfolio, percent weights. */
  candidates: number[][];
  marketValue: number;
}

/** Starting screen: a Low-Medium profile compared against all-Low and
 * all-High portfolios on a 113,147 CAD account. */
export const DEFAULT_SESSION: SessionState = {
  profile: [0, 100, 0, 0, 0],
  candidates: [
    [100, 0, 0, 0, 0],
    [0, 0, 0, 0, 100],
  ],
  marketValue: 113_147,
};

export class StateError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "StateError";
  }
}

/** Scale committed weights so they sum to exactly 100. Sub-nanopercent
 * negative input dust is clamped to zero; real negatives are errors. */
export function renormalizePercents(weights: readonly number[]): number[] {
  if (weights.length !== N_BUCKETS) {
    throw new StateError(`allocation needs ${N_BUCKETS} weights, got ${weights.length}`);
  }
  const clamped = weights.map((w, i) => {
    if (!Number.isFinite(w)) throw new StateError(`weight ${i} is not a number`);
    if (w < -1e-9) throw new StateError(`weight ${i} is negative: ${w}`);
    return Math.max(w, 0);
  });
  const sum = clamped.reduce((a, b) => a + b, 0);
  if (sum <= 0) throw new StateError("weights sum to zero");
  return clamped.map((w) => (w * 100) / sum);
}

/** Fractions summing to 1 for the wire. */
export function toFractions(percents: readonly number[]): number[] {
  const sum = percents.reduce((a, b) => a + b, 0);
  if (sum <= 0) throw new StateError("weights sum to zero");
  return percents.map((w) => w / sum);
}

/** Encode a session as a query string (numbers survive exactly). */
export function encodeSession(state: SessionState): string {
  const params = new URLSearchParams();
  params.set("p", state.profile.map(String).join(","));
  params.set("c", state.candidates.map((c) => c.map(String).join(",")).join(";"));
  params.set("mv", String(state.marketValue));
  return params.toString();
}

/** Inverse of encodeSession. Returns null on anything malformed so callers
 * can fall back to the default screen. */
export function decodeSession(query: string): SessionState | null {
  const params = new URLSearchParams(query);
  const rawProfile = params.get("p");
  const rawCandidates = params.get("c");
  const rawMarketValue = params.get("mv");
  if (rawProfile === null || rawCandidates === null || rawMarketValue === null) {
    return null;
  }
  const profile = parseWeights(rawProfile);
  if (profile === null) return null;
  const candidates: number[][] = [];
  for (const part of rawCandidates.split(";")) {
    const weights = parseWeights(part);
    if (weights === null) return null;
    candidates.push(weights);
  }
  if (candidates.length < 1) return null;
  const marketValue = Number(rawMarketValue);
  if (!Number.isFinite(marketValue) || marketValue < 0) return null;
  return { profile, candidates, marketValue };
}

function parseWeights(text: string): number[] | null {
  const parts = text.split(",").map(Number);
  if (parts.length !== N_BUCKETS) return null;
  if (parts.some((v) => !Number.isFinite(v) || v < 0)) return null;
  return parts;
}
