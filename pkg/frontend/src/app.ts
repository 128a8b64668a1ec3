/** Session controller: holds the last payload and the request-in-flight flag.
 *
 * All state transitions go through the service; the controller's only jobs
 * are validating form input before the first request, keeping exactly one
 * request in flight, and re-rendering from each fresh payload.
 */

import { ApiError } from "./api.js";
import type {
  CreateSessionRequest,
  CreateSessionResponse,
  SessionState,
  TraceResponse,
} from "./types.js";
import { renderError, renderSession, type Handlers } from "./render.js";
import { toView, type SessionView } from "./view.js";

export interface ApiLike {
  createSession(base: string, body: CreateSessionRequest): Promise<CreateSessionResponse>;
  getState(base: string, sessionId: string): Promise<SessionState>;
  submitLabel(
    base: string,
    sessionId: string,
    pointIndex: number,
    classValue: number,
  ): Promise<SessionState>;
  getTrace(base: string, sessionId: string): Promise<TraceResponse>;
}

export interface StartInputs {
  base: string;
  legendType: "binary" | "majority";
  targetClasses: number[];
  threshold: number;
  alpha: number;
  side: number;
  classCount: number;
  nMax: number;
  seed: number;
  imageUrl: string | null;
}

/** Pre-flight form validation; returns an inline error message or null. */
export function validateInputs(inputs: StartInputs): string | null {
  if (!(inputs.alpha > 0 && inputs.alpha < 1)) {
    return "alpha must be strictly between 0 and 1";
  }
  if (!Number.isInteger(inputs.side) || inputs.side < 2) {
    return "unit side must be an integer of at least 2";
  }
  if (!Number.isInteger(inputs.classCount) || inputs.classCount < 2) {
    return "class count must be an integer of at least 2";
  }
  if (!Number.isInteger(inputs.nMax) || inputs.nMax < 1) {
    return "point budget must be a positive integer";
  }
  if (inputs.legendType === "binary") {
    if (inputs.targetClasses.length === 0) {
      return "binary legends need at least one target class";
    }
    if (!(inputs.threshold > 0 && inputs.threshold <= 1)) {
      return "threshold must be in (0, 1]";
    }
  }
  return null;
}

export function toCreateRequest(inputs: StartInputs): CreateSessionRequest {
  return {
    legend:
      inputs.legendType === "binary"
        ? {
            type: "binary",
            classes: inputs.targetClasses,
            threshold: inputs.threshold,
          }
        : { type: "majority" },
    alpha: inputs.alpha,
    n_max: inputs.nMax,
    unit: { side: inputs.side },
    class_count: inputs.classCount,
    seed: inputs.seed,
    image_url: inputs.imageUrl,
  };
}

export interface ControllerDeps {
  api: ApiLike;
  sessionRoot: HTMLElement;
  errorRoot: HTMLElement;
  /** Called after a session is created or restored, e.g. to update the URL. */
  onSession?: (base: string, sessionId: string) => void;
}

export class SessionController {
  private view: SessionView | null = null;
  private busy = false;
  private base = "";
  private readonly handlers: Handlers;

  constructor(private readonly deps: ControllerDeps) {
    this.handlers = { onLabel: (classValue) => void this.label(classValue) };
  }

  get currentView(): SessionView | null {
    return this.view;
  }

  get pending(): boolean {
    return this.busy;
  }

  private show(state: SessionState): void {
    this.view = toView(state);
    renderError(this.deps.errorRoot, null);
    renderSession(this.deps.sessionRoot, this.view, this.handlers, this.busy);
  }

  private fail(error: unknown): void {
    const message =
      error instanceof ApiError
        ? error.detail
        : error instanceof Error
          ? error.message
          : String(error);
    renderError(this.deps.errorRoot, message);
  }

  async start(inputs: StartInputs): Promise<boolean> {
    const problem = validateInputs(inputs);
    if (problem !== null) {
      renderError(this.deps.errorRoot, problem);
      return false;
    }
    if (this.busy) {
      return false;
    }
    this.busy = true;
    try {
      const created = await this.deps.api.createSession(
        inputs.base,
        toCreateRequest(inputs),
      );
      this.base = inputs.base;
      const state = await this.deps.api.getState(inputs.base, created.session_id);
      this.busy = false;
      this.show(state);
      this.deps.onSession?.(inputs.base, created.session_id);
      return true;
    } catch (error) {
      this.busy = false;
      this.fail(error);
      return false;
    }
  }

  async restore(base: string, sessionId: string): Promise<boolean> {
    if (this.busy) {
      return false;
    }
    this.busy = true;
    try {
      const state = await this.deps.api.getState(base, sessionId);
      this.base = base;
      this.busy = false;
      this.show(state);
      this.deps.onSession?.(base, sessionId);
      return true;
    } catch (error) {
      this.busy = false;
      this.fail(error);
      return false;
    }
  }

  /** Label the pending point; ignored while a request is in flight. */
  async label(classValue: number): Promise<boolean> {
    const view = this.view;
    if (this.busy || view === null || !view.active || view.nextPoint === null) {
      return false;
    }
    this.busy = true;
    renderSession(this.deps.sessionRoot, view, this.handlers, this.busy);
    try {
      const state = await this.deps.api.submitLabel(
        this.base,
        view.state.session_id,
        view.nextPoint.index,
        classValue,
      );
      this.busy = false;
      this.show(state);
      return true;
    } catch (error) {
      this.busy = false;
      renderSession(this.deps.sessionRoot, view, this.handlers, this.busy);
      this.fail(error);
      return false;
    }
  }
}
