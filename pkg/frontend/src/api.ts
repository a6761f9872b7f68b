import type { ApiError, PredictResponse } from "./types.js";

// Same-origin /api by default; override before the bundle loads with
// `window.EKMANLAB_API_BASE = "http://host:port/api"`.
declare global {
  interface Window {
    EKMANLAB_API_BASE?: string;
  }
}

export function apiBase(): string {
  if (typeof window !== "undefined" && window.EKMANLAB_API_BASE) {
    return window.EKMANLAB_API_BASE;
  }
  return "/api";
}

export class PredictionError extends Error {
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

export async function predictText(
  text: string,
  fetchImpl: typeof fetch = fetch,
): Promise<PredictResponse> {
  let response: Response;
  try {
    response = await fetchImpl(`${apiBase()}/predict`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  } catch (err) {
    throw new PredictionError("network_error", `service unreachable: ${err}`);
  }
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const apiErr = body as ApiError | null;
    throw new PredictionError(
      apiErr?.error?.code ?? `http_${response.status}`,
      apiErr?.error?.message ?? `request failed with status ${response.status}`,
    );
  }
  return body as PredictResponse;
}

export async function getHealth(fetchImpl: typeof fetch = fetch): Promise<unknown> {
  const response = await fetchImpl(`${apiBase()}/health`);
  return response.json();
}

export async function getModelInfo(fetchImpl: typeof fetch = fetch): Promise<unknown> {
  const response = await fetchImpl(`${apiBase()}/model`);
  return response.json();
}
