export const LABEL_ORDER = [
  "anger",
  "disgust",
  "fear",
  "joy",
  "sadness",
  "surprise",
  "neutral",
] as const;

export type EmotionLabel = (typeof LABEL_ORDER)[number];

export interface PredictResponse {
  text: string;
  label: string;
  emoji: string;
  probabilities: Record<string, number>;
  elapsed_ms: number;
  model_name: string;
  empty_input?: boolean;
}

export interface ApiError {
  error: { code: string; message: string };
}

export interface UiState {
  inputText: string;
  lastResponse: PredictResponse | null;
  pending: boolean;
  error: string | null;
}

export const initialState: UiState = {
  inputText: "",
  lastResponse: null,
  pending: false,
  error: null,
};
