/** Pure mapping from the last server payload to what the page displays.
 *
 * Every numeric field below is copied from the payload unchanged — the view
 * layer only selects and arranges values.  Anything that looks like a
 * statistic (proportions, interval endpoints, counts) must be traceable to
 * a payload field by identity, which is what the contract tests check.
 */

import type {
  IntervalPayload,
  ProposedPoint,
  SessionState,
} from "./types.js";

export interface CiBand {
  /** Row caption, e.g. "target share" or "class 2". */
  caption: string;
  lower: number;
  upper: number;
  /** Binary legends: the decision threshold to draw as a marker. */
  threshold?: number;
  /** Majority legends: the class's point estimate from the payload. */
  estimate?: number;
}

export interface ClassRow {
  classValue: number;
  tally: number;
  proportion: number;
}

export interface Banner {
  statusWord: "Completed" | "Capped";
  value: boolean | number;
  tieFlag: boolean;
  nUsed: number;
  alpha: number;
}

export interface SessionView {
  /** The payload this view was derived from, verbatim. */
  state: SessionState;
  active: boolean;
  /** The point awaiting a label (crosshair), if any. */
  nextPoint: ProposedPoint | null;
  /** Already-labeled points, each carrying its class. */
  labeledPoints: ProposedPoint[];
  /** Progress counter: labeled points out of the session cap. */
  progress: { labeled: number; cap: number };
  classRows: ClassRow[];
  ciBands: CiBand[];
  banner: Banner | null;
}

export function toView(state: SessionState): SessionView {
  const pending = state.proposed_points.filter((p) => p.class === undefined);
  const labeled = state.proposed_points.filter((p) => p.class !== undefined);

  const classRows: ClassRow[] = state.tallies.map((tally, classValue) => ({
    classValue,
    tally,
    proportion: state.proportions[classValue] ?? 0,
  }));

  let ciBands: CiBand[];
  if (Array.isArray(state.ci)) {
    ciBands = state.ci.map((interval, classValue) => ({
      caption: `class ${classValue}`,
      lower: interval.lower,
      upper: interval.upper,
      estimate: state.proportions[classValue],
    }));
  } else {
    const interval: IntervalPayload = state.ci;
    ciBands = [
      {
        caption: "target share",
        lower: interval.lower,
        upper: interval.upper,
        threshold:
          state.legend.type === "binary" ? state.legend.threshold : undefined,
      },
    ];
  }

  const banner: Banner | null =
    state.final_label === null || state.status === "Active"
      ? null
      : {
          statusWord: state.status,
          value: state.final_label.value,
          tieFlag: state.final_label.tie_flag,
          nUsed: state.n_used,
          alpha: state.alpha,
        };

  return {
    state,
    active: state.status === "Active",
    nextPoint: pending.length > 0 ? pending[0]! : null,
    labeledPoints: labeled,
    progress: { labeled: state.n_used, cap: state.n_max },
    classRows,
    ciBands,
    banner,
  };
}

/** Fixed-precision text for a payload number; display-only. */
export function fmt(value: number, digits = 3): string {
  return value.toFixed(digits);
}
