import { describe, expect, it } from "vitest";

import {
  BUCKETS,
  DEFAULT_SESSION,
  decodeSession,
  encodeSession,
  N_BUCKETS,
  renormalizePercents,
  StateError,
  toFractions,
  type SessionState,
} from "../src/state.js";

describe("renormalization on commit", () => {
  it("turns (30, 30, 30, 0, 0) into thirds displayed as 33.33", () => {
    const committed = renormalizePercents([30, 30, 30, 0, 0]);
    expect(committed.map((w) => w.toFixed(2))).toEqual([
      "33.33",
      "33.33",
      "33.33",
      "0.00",
      "0.00",
    ]);
    expect(committed.reduce((a, b) => a + b, 0)).toBeCloseTo(100, 9);
  });

  it("sends fractions summing to 1", () => {
    const fractions = toFractions(renormalizePercents([30, 30, 30, 0, 0]));
    const sum = fractions.reduce((a, b) => a + b, 0);
    expect(Math.abs(sum - 1)).toBeLessThan(1e-12);
    expect(fractions[0]).toBeCloseTo(1 / 3, 12);
  });

  it("keeps already-normalized weights unchanged", () => {
    expect(renormalizePercents([0, 100, 0, 0, 0])).toEqual([0, 100, 0, 0, 0]);
  });

  it("rejects bad commits", () => {
    expect(() => renormalizePercents([0, 0, 0, 0, 0])).toThrow(StateError);
    expect(() => renormalizePercents([10, 20, 30])).toThrow(StateError);
    expect(() => renormalizePercents([-5, 25, 30, 25, 25])).toThrow(StateError);
    expect(() => renormalizePercents([NaN, 25, 25, 25, 25])).toThrow(StateError);
    expect(() => toFractions([0, 0, 0, 0, 0])).toThrow(StateError);
  });

  it("clamps sub-nanopercent negative dust", () => {
    const committed = renormalizePercents([-1e-12, 50, 50, 0, 0]);
    expect(committed[0]).toBe(0);
  });
});

describe("URL session state", () => {
  const fancy: SessionState = {
    profile: [12.5, 37.5, 100 / 3, 100 / 6, 0.123456789],
    candidates: [
      [0, 0, 0, 0, 100],
      [20, 20, 20, 20, 20],
    ],
    marketValue: 113147.55,
  };

  it("round-trips exactly, including awkward floats", () => {
    expect(decodeSession(encodeSession(fancy))).toEqual(fancy);
    expect(decodeSession(encodeSession(DEFAULT_SESSION))).toEqual(DEFAULT_SESSION);
  });

  it("accepts a leading question mark, as in location.search", () => {
    expect(decodeSession(`?${encodeSession(fancy)}`)).toEqual(fancy);
  });

  it("ignores unrelated params while decoding", () => {
    const query = `${encodeSession(fancy)}&api=${encodeURIComponent("http://x:8000")}`;
    expect(decodeSession(query)).toEqual(fancy);
  });

  it("returns null for missing or malformed state", () => {
    expect(decodeSession("")).toBeNull();
    expect(decodeSession("p=1,0,0,0,0")).toBeNull();
    expect(decodeSession("p=1,0,0,0&c=1,0,0,0,0&mv=1")).toBeNull();
    expect(decodeSession("p=1,0,0,0,oops&c=1,0,0,0,0&mv=1")).toBeNull();
    expect(decodeSession("p=1,0,0,0,0&c=1,0,0,0,0&mv=-5")).toBeNull();
    expect(decodeSession("p=-1,0,0,0,0&c=1,0,0,0,0&mv=1")).toBeNull();
  });
});

describe("default screen", () => {
  it("is the two-candidate layout on a 113,147 CAD account", () => {
    expect(BUCKETS).toHaveLength(N_BUCKETS);
    expect(DEFAULT_SESSION.profile).toEqual([0, 100, 0, 0, 0]);
    expect(DEFAULT_SESSION.candidates).toEqual([
      [100, 0, 0, 0, 0],
      [0, 0, 0, 0, 100],
    ]);
    expect(DEFAULT_SESSION.marketValue).toBe(113_147);
  });
});
