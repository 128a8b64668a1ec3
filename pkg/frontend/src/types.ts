/** Wire types of the session service, mirrored verbatim.
 *
 * Every statistic shown in the UI comes from these payloads unchanged; the
 * client adds presentation state but never computes proportions, intervals,
 * or stop decisions itself.
 */

export interface BinaryLegend {
  type: "binary";
  classes: number[];
  threshold: number;
}

export interface MajorityLegend {
  type: "majority";
}

export type Legend = BinaryLegend | MajorityLegend;

export interface ProposedPoint {
  index: number;
  /** Fractional coordinates of the point inside the unit, in [0, 1). */
  x: number;
  y: number;
  /** Present once the point has been labeled. */
  class?: number;
}

export interface IntervalPayload {
  lower: number;
  upper: number;
}

export interface FinalLabel {
  value: boolean | number;
  tie_flag: boolean;
}

export type SessionStatus = "Active" | "Completed" | "Capped";

export interface SessionState {
  session_id: string;
  status: SessionStatus;
  legend: Legend;
  alpha: number;
  n_init: number;
  n_max: number;
  class_count: number;
  side: number;
  image_url: string | null;
  n_used: number;
  tallies: number[];
  proportions: number[];
  /** One interval for binary legends, one per class for majority. */
  ci: IntervalPayload | IntervalPayload[];
  proposed_points: ProposedPoint[];
  final_label: FinalLabel | null;
}

export interface CreateSessionResponse {
  session_id: string;
  proposed_points: ProposedPoint[];
}

export interface CreateSessionRequest {
  legend: Legend;
  alpha: number;
  n_init?: number;
  n_max?: number;
  unit?: { side: number };
  image_url?: string | null;
  class_count?: number;
  seed?: number;
}

export interface TraceDecision {
  status: string;
  label?: FinalLabel;
  intervals: IntervalPayload[];
}

export interface TraceEntry {
  n: number;
  tallies: number[];
  decision: TraceDecision;
}

export interface TraceResponse {
  trace: TraceEntry[];
}
