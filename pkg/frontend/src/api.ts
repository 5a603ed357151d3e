/** Thin client for the choralegen session API; fetch is injectable for tests. */

import type { GenerationRequest, ModelInfo, ScoreDocument } from "./types.js";

export class ApiError extends Error {
  status: number;
  violations: string[];

  constructor(status: number, message: string, violations: string[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.violations = violations;
  }
}

export interface CreateSessionResponse {
  session_id: string;
  score: ScoreDocument;
}

export interface GenerateResponse {
  score: ScoreDocument;
  seed: number;
}

export interface ScoreResponse {
  score: ScoreDocument;
  undo_depth: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private base: string;
  private fetcher: FetchLike;

  constructor(baseUrl: string, fetcher: FetchLike = (input, init) => fetch(input, init)) {
    this.base = baseUrl.replace(/\/$/, "") + "/v1";
    this.fetcher = fetcher;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetcher(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let violations: string[] = [];
      let message = `${response.status}`;
      try {
        const payload = await response.json();
        if (Array.isArray(payload.violations)) {
          violations = payload.violations.map(String);
          message = violations.join("; ");
        } else if (payload.detail) {
          message = String(payload.detail);
        }
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, message, violations);
    }
    return (await response.json()) as T;
  }

  createSessionFromLength(length: number, seed?: number): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", { length, seed });
  }

  createSessionFromMusicXml(musicxmlBase64: string): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", { musicxml_base64: musicxmlBase64 });
  }

  getScore(sessionId: string): Promise<ScoreResponse> {
    return this.request("GET", `/sessions/${sessionId}/score`);
  }

  generate(sessionId: string, request: GenerationRequest): Promise<GenerateResponse> {
    return this.request("POST", `/sessions/${sessionId}/generate`, request);
  }

  undo(sessionId: string): Promise<ScoreResponse> {
    return this.request("POST", `/sessions/${sessionId}/undo`);
  }

  modelInfo(): Promise<ModelInfo> {
    return this.request("GET", "/model");
  }

  exportUrl(sessionId: string, format: "musicxml" | "midi"): string {
    return `${this.base}/sessions/${sessionId}/export?format=${format}`;
  }
}
