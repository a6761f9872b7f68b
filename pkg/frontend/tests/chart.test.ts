// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { chartView, renderChart } from "../src/chart.js";
import { LABEL_ORDER } from "../src/types.js";

const UNIFORM = Object.fromEntries(LABEL_ORDER.map((l) => [l, 1 / 7]));

function probs(overrides: Record<string, number>): Record<string, number> {
  return { ...UNIFORM, ...overrides };
}

describe("chartView", () => {
  it("produces seven bars in fixed label order", () => {
    const view = chartView(UNIFORM);
    expect(view.bars.map((b) => b.label)).toEqual([...LABEL_ORDER]);
  });

  it("uniform distribution gives seven equal full-height bars", () => {
    const view = chartView(UNIFORM);
    expect(view.bars).toHaveLength(7);
    for (const bar of view.bars) {
      expect(bar.height).toBeCloseTo(1.0, 12);
      expect(bar.valueText).toBe("0.143");
    }
  });

  it("one-hot joy gives a single full bar", () => {
    const oneHot = Object.fromEntries(LABEL_ORDER.map((l) => [l, l === "joy" ? 1 : 0]));
    const view = chartView(oneHot);
    const joy = view.bars.find((b) => b.label === "joy")!;
    expect(joy.height).toBe(1);
    expect(joy.isMax).toBe(true);
    for (const bar of view.bars.filter((b) => b.label !== "joy")) {
      expect(bar.height).toBe(0);
    }
  });

  it("heights are normalized to the max probability", () => {
    const view = chartView(probs({ joy: 0.4, anger: 0.2, neutral: 0.1 }));
    const joy = view.bars.find((b) => b.label === "joy")!;
    const anger = view.bars.find((b) => b.label === "anger")!;
    expect(joy.height).toBe(1);
    expect(anger.height).toBeCloseTo(0.5, 12);
  });

  it("caption reports the probability sum to two decimals", () => {
    const view = chartView(UNIFORM);
    expect(view.caption).toBe("probabilities sum to 1.00");
  });

  it("missing label throws for the error state", () => {
    const partial: Record<string, number> = { ...UNIFORM };
    delete partial.fear;
    expect(() => chartView(partial)).toThrow(/fear/);
  });

  it("marks exactly the argmax bar", () => {
    const view = chartView(probs({ sadness: 0.9 }));
    expect(view.bars.filter((b) => b.isMax).map((b) => b.label)).toEqual(["sadness"]);
  });
});

describe("renderChart", () => {
  it("renders seven bar rows in fixed order with an accessible alt text", () => {
    const root = document.createElement("div");
    renderChart(root, chartView(UNIFORM));
    const rows = [...root.querySelectorAll(".bar-row")];
    expect(rows.map((r) => r.getAttribute("data-label"))).toEqual([...LABEL_ORDER]);
    expect(root.getAttribute("aria-label")).toContain("anger 0.143");
    expect(root.querySelector(".chart-caption")?.textContent).toContain("1.00");
  });

  it("displayed values sum to 1 within 0.01", () => {
    const root = document.createElement("div");
    renderChart(root, chartView(probs({ joy: 0.142856 })));
    const shown = [...root.querySelectorAll(".bar-value")].map((el) =>
      parseFloat(el.textContent ?? "0"),
    );
    const sum = shown.reduce((a, b) => a + b, 0);
    expect(Math.abs(sum - 1.0)).toBeLessThanOrEqual(0.01);
  });
});
