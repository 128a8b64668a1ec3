/** Shared loader for the recorded service payloads under fixtures/. */

import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import type {
  CreateSessionRequest,
  CreateSessionResponse,
  SessionState,
  TraceResponse,
} from "../src/types.js";

export interface StepRecord {
  point_index: number;
  class: number;
  state: SessionState;
}

export interface SessionRecord {
  create_request: CreateSessionRequest;
  create_response: CreateSessionResponse;
  initial_state: SessionState;
  steps: StepRecord[];
  trace: TraceResponse;
}

export interface ErrorRecord {
  status: number;
  body: { detail: string };
}

function load<T>(name: string): T {
  // Resolved from the package root (where vitest runs) rather than from
  // import.meta.url, which the DOM test environment rewrites.
  const path = resolve(process.cwd(), "tests", "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export function loadRecord(name: string): SessionRecord {
  return load<SessionRecord>(name);
}

export function loadErrors(): Record<string, ErrorRecord> {
  return load<Record<string, ErrorRecord>>("errors");
}

/** Every state a record passed through, in order. */
export function allStates(record: SessionRecord): SessionState[] {
  return [record.initial_state, ...record.steps.map((s) => s.state)];
}
