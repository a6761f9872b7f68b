import { LABEL_ORDER } from "./types.js";

export interface Bar {
  label: string;
  value: number;
  /** bar length as a fraction of the largest probability, in [0, 1] */
  height: number;
  valueText: string;
  isMax: boolean;
}

export interface ChartView {
  bars: Bar[];
  caption: string;
  altText: string;
}

/**
 * View-model for the probability chart: seven bars in fixed label order,
 * heights normalized to the maximum probability, values shown to three
 * decimals. Throws when a label is missing so the caller can render an
 * error state instead of a misleading chart.
 */
export function chartView(probabilities: Record<string, number>): ChartView {
  for (const label of LABEL_ORDER) {
    if (typeof probabilities[label] !== "number") {
      throw new Error(`probability for '${label}' missing from response`);
    }
  }
  const values = LABEL_ORDER.map((label) => probabilities[label]);
  const max = Math.max(...values);
  const sum = values.reduce((a, b) => a + b, 0);
  const maxIndex = values.indexOf(max);
  const bars: Bar[] = LABEL_ORDER.map((label, i) => ({
    label,
    value: values[i],
    height: max > 0 ? values[i] / max : 0,
    valueText: values[i].toFixed(3),
    isMax: i === maxIndex,
  }));
  return {
    bars,
    caption: `probabilities sum to ${sum.toFixed(2)}`,
    altText: bars.map((b) => `${b.label} ${b.valueText}`).join(", "),
  };
}

export function renderChart(root: HTMLElement, view: ChartView): void {
  root.innerHTML = view.bars
    .map(
      (bar) => `
      <div class="bar-row${bar.isMax ? " bar-row-max" : ""}" data-label="${bar.label}">
        <span class="bar-label">${bar.label}</span>
        <span class="bar-track"><span class="bar-fill" style="width:${(
          bar.height * 100
        ).toFixed(1)}%"></span></span>
        <span class="bar-value">${bar.valueText}</span>
      </div>`,
    )
    .join("");
  const caption = document.createElement("p");
  caption.className = "chart-caption";
  caption.textContent = view.caption;
  root.appendChild(caption);
  root.setAttribute("role", "img");
  root.setAttribute("aria-label", view.altText);
}
