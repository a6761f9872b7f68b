import { PredictionError, predictText } from "./api.js";
import type { PredictResponse, UiState } from "./types.js";
import { initialState } from "./types.js";

type Listener = (state: UiState) => void;

/** Single store serializing all updates; at most one request in flight. */
export class UiStore {
  private state: UiState = { ...initialState };
  private listeners: Listener[] = [];
  private predict: (text: string) => Promise<PredictResponse>;

  constructor(predict: (text: string) => Promise<PredictResponse> = predictText) {
    this.predict = predict;
  }

  getState(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.state);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(partial: Partial<UiState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setInput(text: string): void {
    this.set({ inputText: text });
  }

  /**
   * Submit the current input. Empty input and double submission while a
   * request is pending are no-ops, so at most one request is in flight.
   */
  async submit(): Promise<void> {
    const text = this.state.inputText;
    if (!text.trim() || this.state.pending) {
      return;
    }
    this.set({ pending: true, error: null });
    try {
      const response = await this.predict(text);
      this.set({ pending: false, lastResponse: response, error: null });
    } catch (err) {
      const message =
        err instanceof PredictionError ? `${err.code}: ${err.message}` : String(err);
      // keep inputText and any previous result; only surface the error
      this.set({ pending: false, error: message });
    }
  }
}
