// @vitest-environment jsdom
/** DOM and controller tests: rendered attributes carry exact payload
 * values, labeling keeps one request in flight, stopped sessions lock the
 * controls, and bad form input never reaches the network.
 */

import { describe, expect, it, vi } from "vitest";

import { ApiError } from "../src/api.js";
import {
  SessionController,
  toCreateRequest,
  validateInputs,
  type ApiLike,
  type StartInputs,
} from "../src/app.js";
import { renderSession } from "../src/render.js";
import { toView } from "../src/view.js";
import type { SessionState } from "../src/types.js";
import { loadErrors, loadRecord } from "./helpers.js";

const RECORD = loadRecord("binary_session");
const MAJORITY = loadRecord("majority_session");
const ERRORS = loadErrors();
const BASE = "http://service.test:8000";

const MID_STATE = RECORD.steps[2]!.state;
const FINAL_STATE = RECORD.steps[RECORD.steps.length - 1]!.state;

const INPUTS: StartInputs = {
  base: BASE,
  legendType: "binary",
  targetClasses: [1],
  threshold: 0.5,
  alpha: 0.1,
  side: 12,
  classCount: 3,
  nMax: 30,
  seed: 4,
  imageUrl: null,
};

function roots() {
  return {
    sessionRoot: document.createElement("div"),
    errorRoot: document.createElement("div"),
  };
}

function attr(root: HTMLElement, selector: string, name: string): string | null {
  const node = root.querySelector(selector);
  expect(node, `missing ${selector}`).not.toBeNull();
  return (node as HTMLElement).getAttribute(name);
}

/** Minimal ApiLike double that records calls and replays fixture states. */
class FakeApi implements ApiLike {
  createCalls: unknown[] = [];
  labelCalls: { pointIndex: number; classValue: number }[] = [];
  stateQueue: SessionState[] = [];
  labelResult: () => Promise<SessionState> = () =>
    Promise.reject(new Error("labelResult not configured"));

  async createSession(_base: string, body: unknown) {
    this.createCalls.push(body);
    return RECORD.create_response;
  }

  async getState(_base: string, _sessionId: string) {
    const state = this.stateQueue.shift();
    if (!state) throw new Error("no queued state");
    return state;
  }

  submitLabel(_base: string, _sessionId: string, pointIndex: number, classValue: number) {
    this.labelCalls.push({ pointIndex, classValue });
    return this.labelResult();
  }

  async getTrace(_base: string, _sessionId: string) {
    return RECORD.trace;
  }
}

describe("rendered attributes mirror the payload", () => {
  it("binds progress, class rows, interval, and crosshair to payload values", () => {
    const { sessionRoot } = roots();
    renderSession(sessionRoot, toView(MID_STATE), { onLabel: () => {} }, false);

    expect(attr(sessionRoot, '[data-test="status"]', "class"))
      .toContain("status");
    expect(sessionRoot.querySelector('[data-test="status"]')!.textContent)
      .toBe(MID_STATE.status);
    expect(attr(sessionRoot, '[data-test="progress"]', "data-labeled"))
      .toBe(String(MID_STATE.n_used));
    expect(attr(sessionRoot, '[data-test="progress"]', "data-cap"))
      .toBe(String(MID_STATE.n_max));
    expect(sessionRoot.querySelector('[data-test="progress"]')!.textContent)
      .toBe(`${MID_STATE.n_used} / ${MID_STATE.n_max} points`);

    const rows = sessionRoot.querySelectorAll('[data-test="class-row"]');
    expect(rows.length).toBe(MID_STATE.tallies.length);
    rows.forEach((row, i) => {
      expect(row.getAttribute("data-tally")).toBe(String(MID_STATE.tallies[i]));
      expect(row.getAttribute("data-proportion"))
        .toBe(String(MID_STATE.proportions[i]));
    });

    const ci = MID_STATE.ci as { lower: number; upper: number };
    expect(attr(sessionRoot, '[data-test="ci-band"]', "data-lower"))
      .toBe(String(ci.lower));
    expect(attr(sessionRoot, '[data-test="ci-band"]', "data-upper"))
      .toBe(String(ci.upper));
    expect(attr(sessionRoot, '[data-test="threshold-tick"]', "data-value"))
      .toBe("0.5");

    const pending = MID_STATE.proposed_points.find((p) => p.class === undefined)!;
    expect(attr(sessionRoot, '[data-test="crosshair"]', "data-x"))
      .toBe(String(pending.x));
    expect(attr(sessionRoot, '[data-test="crosshair"]', "data-y"))
      .toBe(String(pending.y));

    const labeled = MID_STATE.proposed_points.filter((p) => p.class !== undefined);
    const dots = sessionRoot.querySelectorAll('[data-test="labeled-point"]');
    expect(dots.length).toBe(labeled.length);
    dots.forEach((dot, i) => {
      expect(dot.getAttribute("data-index")).toBe(String(labeled[i]!.index));
      expect(dot.getAttribute("data-class")).toBe(String(labeled[i]!.class));
    });
  });

  it("renders one interval per class for majority sessions", () => {
    const { sessionRoot } = roots();
    const state = MAJORITY.steps[MAJORITY.steps.length - 1]!.state;
    renderSession(sessionRoot, toView(state), { onLabel: () => {} }, false);

    const bands = sessionRoot.querySelectorAll('[data-test="ci-band"]');
    const intervals = state.ci as { lower: number; upper: number }[];
    expect(bands.length).toBe(intervals.length);
    bands.forEach((band, i) => {
      expect(band.getAttribute("data-lower")).toBe(String(intervals[i]!.lower));
      expect(band.getAttribute("data-upper")).toBe(String(intervals[i]!.upper));
    });
    const ticks = sessionRoot.querySelectorAll('[data-test="estimate-tick"]');
    ticks.forEach((tick, i) => {
      expect(tick.getAttribute("data-value")).toBe(String(state.proportions[i]));
    });
  });

  it("keeps buttons enabled only while the session is active and idle", () => {
    const { sessionRoot } = roots();
    const buttons = () =>
      [...sessionRoot.querySelectorAll('[data-test="class-button"]')] as
        HTMLButtonElement[];

    renderSession(sessionRoot, toView(MID_STATE), { onLabel: () => {} }, false);
    expect(buttons().every((b) => !b.disabled)).toBe(true);

    renderSession(sessionRoot, toView(MID_STATE), { onLabel: () => {} }, true);
    expect(buttons().every((b) => b.disabled)).toBe(true);

    renderSession(sessionRoot, toView(FINAL_STATE), { onLabel: () => {} }, false);
    expect(buttons().every((b) => b.disabled)).toBe(true);
  });

  it("shows the final banner with the payload's label, count, and alpha", () => {
    const { sessionRoot } = roots();
    renderSession(sessionRoot, toView(FINAL_STATE), { onLabel: () => {} }, false);

    expect(attr(sessionRoot, '[data-test="banner"]', "data-status"))
      .toBe(FINAL_STATE.status);
    expect(attr(sessionRoot, '[data-test="banner"]', "data-value"))
      .toBe(String(FINAL_STATE.final_label!.value));
    expect(attr(sessionRoot, '[data-test="banner"]', "data-n-used"))
      .toBe(String(FINAL_STATE.n_used));
    expect(attr(sessionRoot, '[data-test="banner"]', "data-alpha"))
      .toBe(String(FINAL_STATE.alpha));
  });

  it("shows no banner while the session is active", () => {
    const { sessionRoot } = roots();
    renderSession(sessionRoot, toView(MID_STATE), { onLabel: () => {} }, false);
    expect(sessionRoot.querySelector('[data-test="banner"]')).toBeNull();
  });
});

describe("controller request discipline", () => {
  it("keeps exactly one label request in flight", async () => {
    const api = new FakeApi();
    const { sessionRoot, errorRoot } = roots();
    const controller = new SessionController({ api, sessionRoot, errorRoot });

    api.stateQueue.push(MID_STATE);
    expect(await controller.restore(BASE, MID_STATE.session_id)).toBe(true);

    let release!: (state: SessionState) => void;
    api.labelResult = () => new Promise((resolve) => { release = resolve; });

    const first = controller.label(1);
    expect(controller.pending).toBe(true);
    const buttons = [...sessionRoot.querySelectorAll(
      '[data-test="class-button"]')] as HTMLButtonElement[];
    expect(buttons.every((b) => b.disabled)).toBe(true);

    expect(await controller.label(0)).toBe(false);
    expect(api.labelCalls.length).toBe(1);

    release(RECORD.steps[3]!.state);
    expect(await first).toBe(true);
    expect(controller.pending).toBe(false);
    expect(attr(sessionRoot, '[data-test="progress"]', "data-labeled"))
      .toBe(String(RECORD.steps[3]!.state.n_used));
  });

  it("labels the service-proposed point when a class button is clicked", async () => {
    const api = new FakeApi();
    const { sessionRoot, errorRoot } = roots();
    const controller = new SessionController({ api, sessionRoot, errorRoot });

    api.stateQueue.push(MID_STATE);
    await controller.restore(BASE, MID_STATE.session_id);
    api.labelResult = async () => RECORD.steps[3]!.state;

    const pending = MID_STATE.proposed_points.find((p) => p.class === undefined)!;
    const button = sessionRoot.querySelector(
      '[data-test="class-button"][data-class="1"]') as HTMLButtonElement;
    button.click();
    await vi.waitFor(() => expect(api.labelCalls.length).toBe(1));

    expect(api.labelCalls[0]).toEqual({
      pointIndex: pending.index,
      classValue: 1,
    });
  });

  it("refuses to label once the session has stopped", async () => {
    const api = new FakeApi();
    const { sessionRoot, errorRoot } = roots();
    const controller = new SessionController({ api, sessionRoot, errorRoot });

    api.stateQueue.push(FINAL_STATE);
    await controller.restore(BASE, FINAL_STATE.session_id);

    expect(await controller.label(1)).toBe(false);
    expect(api.labelCalls.length).toBe(0);
  });

  it("shows the service rejection inline and unlocks the controls", async () => {
    const api = new FakeApi();
    const { sessionRoot, errorRoot } = roots();
    const controller = new SessionController({ api, sessionRoot, errorRoot });

    api.stateQueue.push(MID_STATE);
    await controller.restore(BASE, MID_STATE.session_id);
    const recorded = ERRORS.label_after_stop!;
    api.labelResult = () =>
      Promise.reject(new ApiError(recorded.status, recorded.body.detail));

    expect(await controller.label(1)).toBe(false);
    expect(controller.pending).toBe(false);
    const error = errorRoot.querySelector('[data-test="error"]');
    expect(error).not.toBeNull();
    expect(error!.textContent).toBe(recorded.body.detail);
    const buttons = [...sessionRoot.querySelectorAll(
      '[data-test="class-button"]')] as HTMLButtonElement[];
    expect(buttons.every((b) => !b.disabled)).toBe(true);
  });

  it("restores a session from its identifier alone", async () => {
    const api = new FakeApi();
    const { sessionRoot, errorRoot } = roots();
    const seen: string[] = [];
    const controller = new SessionController({
      api, sessionRoot, errorRoot,
      onSession: (_base, id) => seen.push(id),
    });

    api.stateQueue.push(FINAL_STATE);
    expect(await controller.restore(BASE, FINAL_STATE.session_id)).toBe(true);
    expect(seen).toEqual([FINAL_STATE.session_id]);
    expect(attr(sessionRoot, '[data-test="banner"]', "data-status"))
      .toBe(FINAL_STATE.status);
  });
});

describe("form validation happens before any request", () => {
  it("rejects an out-of-range alpha inline without calling the service", async () => {
    const api = new FakeApi();
    const { sessionRoot, errorRoot } = roots();
    const controller = new SessionController({ api, sessionRoot, errorRoot });

    expect(await controller.start({ ...INPUTS, alpha: 1.5 })).toBe(false);
    expect(api.createCalls.length).toBe(0);
    const error = errorRoot.querySelector('[data-test="error"]');
    expect(error!.textContent).toBe("alpha must be strictly between 0 and 1");
  });

  it("accepts the fixture's own inputs and reproduces its request body", () => {
    expect(validateInputs(INPUTS)).toBeNull();
    expect(toCreateRequest(INPUTS)).toEqual({
      ...RECORD.create_request,
      image_url: null,
    });
  });

  it("flags the other malformed inputs", () => {
    expect(validateInputs({ ...INPUTS, side: 1 })).toMatch(/side/);
    expect(validateInputs({ ...INPUTS, classCount: 1 })).toMatch(/class count/);
    expect(validateInputs({ ...INPUTS, nMax: 0 })).toMatch(/budget/);
    expect(validateInputs({ ...INPUTS, targetClasses: [] })).toMatch(/target/);
    expect(validateInputs({ ...INPUTS, threshold: 0 })).toMatch(/threshold/);
    expect(validateInputs({ ...INPUTS, legendType: "majority", targetClasses: [] }))
      .toBeNull();
  });

  it("starting a session renders the first proposed point", async () => {
    const api = new FakeApi();
    const { sessionRoot, errorRoot } = roots();
    const seen: string[] = [];
    const controller = new SessionController({
      api, sessionRoot, errorRoot,
      onSession: (_base, id) => seen.push(id),
    });

    api.stateQueue.push(RECORD.initial_state);
    expect(await controller.start(INPUTS)).toBe(true);
    expect(api.createCalls).toEqual([{ ...RECORD.create_request, image_url: null }]);
    expect(seen).toEqual([RECORD.initial_state.session_id]);

    const firstPoint = RECORD.initial_state.proposed_points[0]!;
    expect(attr(sessionRoot, '[data-test="crosshair"]', "data-x"))
      .toBe(String(firstPoint.x));
    expect(attr(sessionRoot, '[data-test="crosshair"]', "data-y"))
      .toBe(String(firstPoint.y));
  });
});
