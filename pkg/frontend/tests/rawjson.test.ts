// The raw-literal scanner is what makes byte-exact metric display
// possible; these tests pin it against real server bytes, including the
// cases where JavaScript's own number formatting would disagree.

import { describe, expect, it } from "vitest";

import { rawLiteral, scanRawLiterals } from "../src/rawjson.js";
import type { AnalysisReport } from "../src/types.js";
import { fixtureText } from "./helpers.js";

describe("scanRawLiterals on captured server bytes", () => {
  const text = fixtureText("report_default.json");
  const raw = scanRawLiterals(text);
  const doc = JSON.parse(text) as AnalysisReport;

  it("records 17-digit literals that String() would shorten", () => {
    expect(rawLiteral(raw, "config.rho")).toBe("0.10000000000000001");
    expect(String(doc.config.rho)).toBe("0.1"); // the trap being avoided
    expect(rawLiteral(raw, "config.tau")).toBe("0.20000000000000001");
  });

  it("resolves paths through objects and arrays", () => {
    expect(rawLiteral(raw, "group.size")).toBe("400");
    expect(rawLiteral(raw, "tree.split.threshold")).toBe("2.0264941453933716");
    expect(rawLiteral(raw, "selection.0.feature")).toBe("7");
    expect(Number(rawLiteral(raw, "modes.0.er"))).toBe(doc.modes[0]!.er);
  });

  it("covers every numeric field in the document", () => {
    const walk = (value: unknown, path: (string | number)[]): void => {
      if (typeof value === "number") {
        const literal = rawLiteral(raw, path.join("."));
        expect(Number(literal)).toBe(value);
      } else if (Array.isArray(value)) {
        value.forEach((item, i) => walk(item, [...path, i]));
      } else if (value !== null && typeof value === "object") {
        for (const [key, item] of Object.entries(value)) {
          walk(item, [...path, key]);
        }
      }
    };
    walk(doc, []);
  });

  it("every recorded literal is a substring of the source bytes", () => {
    for (const literal of raw.values()) {
      expect(text.includes(literal)).toBe(true);
    }
  });
});

describe("scanRawLiterals corner cases", () => {
  it("is not confused by braces or escapes inside strings", () => {
    const tricky = '{"a":"x{\\"] , 5","b":[1.50,2e-3,-0.0625]}';
    const raw = scanRawLiterals(tricky);
    expect(raw.get("b.0")).toBe("1.50");
    expect(raw.get("b.1")).toBe("2e-3");
    expect(raw.get("b.2")).toBe("-0.0625");
    expect(raw.has("a")).toBe(false);
  });

  it("handles nested containers, booleans, and null", () => {
    const raw = scanRawLiterals('{"a":{"b":[{"c":7}]},"d":true,"e":null}');
    expect(raw.get("a.b.0.c")).toBe("7");
    expect(raw.size).toBe(1);
  });

  it("rejects trailing garbage", () => {
    expect(() => scanRawLiterals('{"a":1} extra')).toThrow(SyntaxError);
  });

  it("rejects truncated documents", () => {
    expect(() => scanRawLiterals('{"a":')).toThrow(SyntaxError);
  });

  it("rawLiteral throws on unknown paths instead of guessing", () => {
    const raw = scanRawLiterals('{"a":1}');
    expect(() => rawLiteral(raw, "missing")).toThrow(/no raw literal/);
  });
});
