import { describe, expect, it } from "vitest";

import { fmt3, fmtDelta, fmtPct, halfUpFixed } from "../src/format.js";

describe("halfUpFixed", () => {
  it("matches the server's three-decimal table rendering", () => {
    // value/expectation pairs lifted from rendered guideline artifacts
    const cases: Array<[number, string]> = [
      [1.2089841719604064, "1.209"],
      [0.409429323846603, "0.409"],
      [0.8999999999999999, "0.900"],
      [0.7140882962394612, "0.714"],
      [0.9987591101705643, "0.999"],
      [0.2, "0.200"],
      [0.8499589135937664, "0.850"],
      [0.5580094397090123, "0.558"],
      [0.021957561141760756, "0.022"],
      [0.8323851139547924, "0.832"],
    ];
    for (const [x, want] of cases) expect(halfUpFixed(x, 3)).toBe(want);
  });

  it("rounds ties away from zero on the decimal representation", () => {
    expect(halfUpFixed(0.0005, 3)).toBe("0.001");
    expect(halfUpFixed(1.0005, 3)).toBe("1.001");
    expect(halfUpFixed(-0.0005, 3)).toBe("-0.001");
    expect(halfUpFixed(2.5, 0)).toBe("3");
    expect(halfUpFixed(-2.5, 0)).toBe("-3");
  });

  it("carries across the decimal point", () => {
    expect(halfUpFixed(0.9999, 3)).toBe("1.000");
    expect(halfUpFixed(9.9995, 3)).toBe("10.000");
    expect(halfUpFixed(99.95, 0)).toBe("100");
  });

  it("handles scientific notation and extreme magnitudes", () => {
    expect(halfUpFixed(2.1e-8, 3)).toBe("0.000");
    expect(halfUpFixed(6e-4, 3)).toBe("0.001");
    expect(halfUpFixed(1e21, 0)).toBe("1".padEnd(22, "0"));
    expect(halfUpFixed(0, 3)).toBe("0.000");
  });

  it("pads short fractions instead of rounding", () => {
    expect(halfUpFixed(60, 0)).toBe("60");
    expect(halfUpFixed(0.9, 3)).toBe("0.900");
    expect(halfUpFixed(18.114135230679395, 0)).toBe("18");
  });
});

describe("wrappers", () => {
  it("renders null as n/a", () => {
    expect(fmt3(null)).toBe("n/a");
    expect(fmtPct(null)).toBe("n/a");
  });

  it("renders percents at whole numbers", () => {
    expect(fmtPct(18.114135230679395)).toBe("18%");
    expect(fmtPct(60.0)).toBe("60%");
    expect(fmtPct(95.0)).toBe("95%");
  });

  it("signs deltas explicitly", () => {
    expect(fmtDelta(0.10612)).toBe("+0.106");
    expect(fmtDelta(-0.10612)).toBe("-0.106");
    expect(fmtDelta(0)).toBe("0.000");
  });
});
