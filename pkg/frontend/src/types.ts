/** Wire types for the /v1 HTTP API. */

export interface EncodedImage {
  format: string; // "P4" portable bitmap
  base64: string;
}

export interface TrialSummary {
  id: number;
  condition: string;
  n_segments: number;
  angle_deg: number;
}

export interface Segment {
  /** Stable id assigned by the server (symbol position in the base string). */
  id: number;
  /** Endpoints in normalized [0,1]^2 coordinates, y pointing up. */
  start: [number, number];
  end: [number, number];
}

export interface TrialDetail {
  id: number;
  condition: string;
  n_segments: number;
  observed: { depth: number; image: EncodedImage }[];
  segments: Segment[];
}

export interface ScoreResult {
  segment_accuracy: number;
  exact_visual_match: boolean;
  image: EncodedImage;
}

export interface Prediction extends ScoreResult {
  assignment: boolean[];
  seed: number;
  n_steps: number;
}

/** A user action on the toggle interface. */
export type Action =
  | { kind: "toggle"; index: number }
  | { kind: "all_on" }
  | { kind: "all_off" };
