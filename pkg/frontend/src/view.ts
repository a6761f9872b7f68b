import { chartView, renderChart } from "./chart.js";
import type { UiState } from "./types.js";

export interface ViewElements {
  result: HTMLElement;
  chart: HTMLElement;
  errorBanner: HTMLElement;
  submitButton: HTMLButtonElement;
}

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Render one state snapshot into the two columns and the error banner. */
export function render(els: ViewElements, state: UiState): void {
  els.submitButton.disabled = state.pending;
  els.errorBanner.hidden = !state.error;
  els.errorBanner.textContent = state.error ?? "";

  if (state.pending) {
    els.result.innerHTML = `<p class="placeholder">analyzing&hellip;</p>`;
    return;
  }
  const response = state.lastResponse;
  if (!response) {
    els.result.innerHTML =
      `<p class="placeholder">Type a sentence and press Analyze to see ` +
      `its emotion and the per-class probabilities.</p>`;
    els.chart.innerHTML = "";
    els.chart.removeAttribute("role");
    return;
  }
  els.result.innerHTML = `
    <blockquote class="echoed-text">${escapeHtml(response.text)}</blockquote>
    <div class="verdict">
      <span class="verdict-emoji">${response.emoji}</span>
      <span class="verdict-label">${escapeHtml(response.label)}</span>
    </div>
    <p class="meta">model ${escapeHtml(response.model_name)} &middot; ${response.elapsed_ms.toFixed(
      0,
    )} ms</p>`;
  try {
    renderChart(els.chart, chartView(response.probabilities));
  } catch (err) {
    els.chart.innerHTML = `<p class="chart-error">cannot render chart: ${escapeHtml(
      String(err),
    )}</p>`;
  }
}
