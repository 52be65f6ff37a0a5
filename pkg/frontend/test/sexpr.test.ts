import { describe, expect, it } from "vitest";

import { prettyFormula } from "../src/sexpr.js";

const LONG =
  "(forall (v0 v1 v2) (or (not (rel lt v0 v1)) (not (rel lt v0 v2)) (not (rel lt v1 v2))))";

describe("prettyFormula", () => {
  it("leaves short formulas on one line", () => {
    expect(prettyFormula("(rel lt x y)")).toBe("(rel lt x y)");
  });

  it("wraps long formulas and keeps the quantifier's variable list on its line", () => {
    const pretty = prettyFormula(LONG, 40);
    const lines = pretty.split("\n");
    expect(lines.length).toBeGreaterThan(1);
    expect(lines[0]).toBe("(forall (v0 v1 v2)");
    expect(lines.slice(1).every((l) => l.startsWith("  "))).toBe(true);
  });

  it("preserves the token stream exactly", () => {
    const tokens = (s: string) =>
      s.replace(/\(/g, " ( ").replace(/\)/g, " ) ").split(/\s+/).filter(Boolean);
    expect(tokens(prettyFormula(LONG, 30))).toEqual(tokens(LONG));
  });

  it("rejects unbalanced text", () => {
    expect(() => prettyFormula("(and (rel R x y)")).toThrow(/unbalanced/);
    expect(() => prettyFormula("(rel R x y))")).toThrow(/trailing|unbalanced/);
  });
});
