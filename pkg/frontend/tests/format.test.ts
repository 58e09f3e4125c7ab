import { describe, expect, it } from "vitest";
import { belief, cost, escapeHtml, gain, pct, score } from "../src/format.js";

describe("pct", () => {
  it("rounds to one decimal", () => {
    expect(pct(0.5834605503220761)).toBe("58.3%");
    expect(pct(0.03369089543801436)).toBe("3.4%");
  });

  it("covers the endpoints", () => {
    expect(pct(0)).toBe("0.0%");
    expect(pct(1)).toBe("100.0%");
  });
});

describe("belief", () => {
  it("keeps four decimals", () => {
    expect(belief(0.9663091045619856)).toBe("0.9663");
    expect(belief(1)).toBe("1.0000");
  });
});

describe("gain", () => {
  it("labels bits at three decimals", () => {
    expect(gain(1.0)).toBe("1.000 bits");
    expect(gain(0.25013)).toBe("0.250 bits");
  });
});

describe("cost", () => {
  it("drops the fraction for whole costs", () => {
    expect(cost(3)).toBe("3");
    expect(cost(1.0)).toBe("1");
  });

  it("keeps two decimals otherwise", () => {
    expect(cost(2.5)).toBe("2.50");
  });
});

describe("score", () => {
  it("keeps three decimals", () => {
    expect(score(0.5)).toBe("0.500");
  });
});

describe("escapeHtml", () => {
  it("escapes markup characters", () => {
    expect(escapeHtml('<b a="c">&</b>')).toBe("&lt;b a=&quot;c&quot;&gt;&amp;&lt;/b&gt;");
  });

  it("escapes the ampersand first", () => {
    expect(escapeHtml("&lt;")).toBe("&amp;lt;");
  });
});
