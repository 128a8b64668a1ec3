/** Thin fetch client for the session service; no retries, no caching. */

import type {
  CreateSessionRequest,
  CreateSessionResponse,
  SessionState,
  TraceResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && body.detail !== undefined) {
        detail =
          typeof body.detail === "string"
            ? body.detail
            : JSON.stringify(body.detail);
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

function join(base: string, path: string): string {
  return base.replace(/\/+$/, "") + path;
}

export function createSession(
  base: string,
  body: CreateSessionRequest,
): Promise<CreateSessionResponse> {
  return request(join(base, "/sessions"), {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export function getState(base: string, sessionId: string): Promise<SessionState> {
  return request(join(base, `/sessions/${encodeURIComponent(sessionId)}`));
}

export function submitLabel(
  base: string,
  sessionId: string,
  pointIndex: number,
  classValue: number,
): Promise<SessionState> {
  return request(
    join(base, `/sessions/${encodeURIComponent(sessionId)}/labels`),
    {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ point_index: pointIndex, class: classValue }),
    },
  );
}

export function getTrace(base: string, sessionId: string): Promise<TraceResponse> {
  return request(
    join(base, `/sessions/${encodeURIComponent(sessionId)}/trace`),
  );
}
