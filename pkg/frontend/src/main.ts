import { UiStore } from "./state.js";
import { render } from "./view.js";

function required<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const store = new UiStore();

const input = required<HTMLTextAreaElement>("text-input");
const form = required<HTMLFormElement>("predict-form");
const els = {
  result: required<HTMLElement>("result-panel"),
  chart: required<HTMLElement>("chart-panel"),
  errorBanner: required<HTMLElement>("error-banner"),
  submitButton: required<HTMLButtonElement>("submit-button"),
};

input.addEventListener("input", () => store.setInput(input.value));
form.addEventListener("submit", (event) => {
  event.preventDefault();
  void store.submit();
});

store.subscribe((state) => render(els, state));
