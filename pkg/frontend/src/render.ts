/** DOM rendering of a SessionView.
 *
 * Rendering is a full rebuild of the session panel on every new payload —
 * the view is small enough that diffing would be noise.  Elements that show
 * a statistic carry a `data-value` attribute with the exact payload value,
 * which is what the contract tests read.
 */

import { fmt, type SessionView } from "./view.js";

export const PALETTE = [
  "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
  "#aa3377", "#bbbbbb", "#997700", "#332288", "#cc6644",
];

export function classColor(classValue: number): string {
  return PALETTE[classValue % PALETTE.length]!;
}

export interface Handlers {
  onLabel: (classValue: number) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function pct(fraction: number): string {
  return `${fraction * 100}%`;
}

function renderUnit(doc: Document, view: SessionView): HTMLElement {
  const { state } = view;
  const unit = el(doc, "div", { class: "unit", "data-test": "unit" });
  unit.style.setProperty("--side", String(state.side));
  if (state.image_url) {
    unit.style.backgroundImage = `url(${state.image_url})`;
    unit.setAttribute("data-image", state.image_url);
  }
  for (const point of view.labeledPoints) {
    const dot = el(doc, "div", {
      class: "point labeled",
      "data-test": "labeled-point",
      "data-index": String(point.index),
      "data-class": String(point.class),
      title: `point ${point.index}: class ${point.class}`,
    });
    dot.style.left = pct(point.x);
    dot.style.top = pct(point.y);
    dot.style.background = classColor(point.class!);
    unit.append(dot);
  }
  if (view.nextPoint) {
    const cross = el(doc, "div", {
      class: "point crosshair",
      "data-test": "crosshair",
      "data-index": String(view.nextPoint.index),
      "data-x": String(view.nextPoint.x),
      "data-y": String(view.nextPoint.y),
    });
    cross.style.left = pct(view.nextPoint.x);
    cross.style.top = pct(view.nextPoint.y);
    unit.append(cross);
  }
  return unit;
}

function renderClassControls(
  doc: Document,
  view: SessionView,
  handlers: Handlers,
  busy: boolean,
): HTMLElement {
  const wrap = el(doc, "div", { class: "classes" });
  for (const row of view.classRows) {
    const button = el(doc, "button", {
      class: "class-button",
      "data-test": "class-button",
      "data-class": String(row.classValue),
    }, [`class ${row.classValue}`]);
    button.style.borderColor = classColor(row.classValue);
    button.disabled = !view.active || busy;
    button.addEventListener("click", () => handlers.onLabel(row.classValue));

    const bar = el(doc, "div", { class: "bar" });
    const fill = el(doc, "div", {
      class: "fill",
      "data-test": "proportion-bar",
      "data-class": String(row.classValue),
    });
    fill.style.width = pct(row.proportion);
    fill.style.background = classColor(row.classValue);
    bar.append(fill);

    const stats = el(doc, "span", {
      class: "row-stats",
      "data-test": "class-row",
      "data-class": String(row.classValue),
      "data-tally": String(row.tally),
      "data-proportion": String(row.proportion),
    }, [`${row.tally} pts · ${fmt(row.proportion)}`]);

    wrap.append(el(doc, "div", { class: "class-row" }, [button, bar, stats]));
  }
  return wrap;
}

function renderCiBands(doc: Document, view: SessionView): HTMLElement {
  const wrap = el(doc, "div", { class: "ci-bands" });
  for (const band of view.ciBands) {
    const track = el(doc, "div", { class: "ci-track" });
    const fill = el(doc, "div", { class: "ci-fill" });
    fill.style.left = pct(band.lower);
    fill.style.width = pct(band.upper - band.lower);
    track.append(fill);
    if (band.threshold !== undefined) {
      const tick = el(doc, "div", {
        class: "tick threshold",
        "data-test": "threshold-tick",
        "data-value": String(band.threshold),
      });
      tick.style.left = pct(band.threshold);
      track.append(tick);
    }
    if (band.estimate !== undefined) {
      const tick = el(doc, "div", {
        class: "tick estimate",
        "data-test": "estimate-tick",
        "data-value": String(band.estimate),
      });
      tick.style.left = pct(band.estimate);
      track.append(tick);
    }
    const row = el(doc, "div", {
      class: "ci-row",
      "data-test": "ci-band",
      "data-caption": band.caption,
      "data-lower": String(band.lower),
      "data-upper": String(band.upper),
    }, [
      el(doc, "span", { class: "ci-caption" }, [band.caption]),
      track,
      el(doc, "span", { class: "ci-text" },
        [`[${fmt(band.lower)}, ${fmt(band.upper)}]`]),
    ]);
    wrap.append(row);
  }
  return wrap;
}

export function renderSession(
  root: HTMLElement,
  view: SessionView,
  handlers: Handlers,
  busy: boolean,
): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  const header = el(doc, "div", { class: "session-header" }, [
    el(doc, "span", {
      class: `status status-${view.state.status.toLowerCase()}`,
      "data-test": "status",
    }, [view.state.status]),
    el(doc, "span", {
      class: "progress",
      "data-test": "progress",
      "data-labeled": String(view.progress.labeled),
      "data-cap": String(view.progress.cap),
    }, [`${view.progress.labeled} / ${view.progress.cap} points`]),
  ]);
  root.append(header);

  root.append(renderUnit(doc, view));
  root.append(renderClassControls(doc, view, handlers, busy));
  root.append(renderCiBands(doc, view));

  if (view.banner) {
    root.append(el(doc, "div", {
      class: "banner",
      "data-test": "banner",
      "data-status": view.banner.statusWord,
      "data-value": String(view.banner.value),
      "data-tie": String(view.banner.tieFlag),
      "data-n-used": String(view.banner.nUsed),
      "data-alpha": String(view.banner.alpha),
    }, [
      `${view.banner.statusWord}: label ${view.banner.value}` +
      `${view.banner.tieFlag ? " (tie)" : ""} after ${view.banner.nUsed}` +
      ` points at alpha ${view.banner.alpha}`,
    ]));
  }
}

export function renderError(root: HTMLElement, message: string | null): void {
  const doc = root.ownerDocument;
  root.replaceChildren();
  if (message !== null) {
    root.append(el(doc, "div", {
      class: "error",
      "data-test": "error",
      role: "alert",
    }, [message]));
  }
}
