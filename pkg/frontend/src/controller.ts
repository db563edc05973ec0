/** Trial session logic, kept free of the DOM so it is testable.
 *
 * Actions apply optimistically to local state.  At most one submission is
 * in flight; each carries a sequence number and a response is discarded
 * when a newer action has already superseded it.  Server errors surface
 * as a banner message; network failures keep the local state intact so
 * the user can retry.
 */

import { ApiClient, ApiError } from "./api";
import { applyAction, initialAssignment } from "./state";
import type { Action, Prediction, ScoreResult, TrialDetail } from "./types";

export interface PanelState {
  assignment: boolean[];
  /** Last server-confirmed result, with the sequence number it scored. */
  result: { seq: number; score: ScoreResult } | null;
  prediction: Prediction | null;
  error: string | null;
  busy: boolean;
}

export class TrialController {
  private seq = 0;
  private inFlight = false;
  readonly state: PanelState;

  constructor(
    private readonly api: ApiClient,
    readonly trial: TrialDetail,
    private readonly session?: string,
    private readonly onChange: () => void = () => {},
  ) {
    this.state = {
      assignment: initialAssignment(trial.n_segments),
      result: null,
      prediction: null,
      error: null,
      busy: false,
    };
  }

  apply(action: Action): void {
    this.seq += 1;
    this.state.assignment = applyAction(this.state.assignment, action);
    this.state.error = null;
    this.onChange();
  }

  /** Post the current assignment for scoring; resolves when settled. */
  async submit(): Promise<void> {
    if (this.inFlight) return; // one in-flight submission at a time
    const snapshotSeq = this.seq;
    const snapshot = this.state.assignment.slice();
    this.inFlight = true;
    this.state.busy = true;
    this.onChange();
    try {
      const score = await this.api.submitResponse(
        this.trial.id,
        snapshot,
        this.session,
      );
      // discard a stale response: the user kept editing meanwhile
      if (this.seq === snapshotSeq) {
        this.state.result = { seq: snapshotSeq, score };
        this.state.error = null;
      }
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.error = err.detail;
      } else {
        this.state.error = "network error - your toggles are kept; retry";
      }
    } finally {
      this.inFlight = false;
      this.state.busy = false;
      this.onChange();
    }
  }

  async fetchPrediction(seed = 0): Promise<void> {
    try {
      this.state.prediction = await this.api.getPrediction(this.trial.id, seed);
      this.state.error = null;
    } catch (err) {
      this.state.error =
        err instanceof ApiError ? err.detail : "network error fetching prediction";
    }
    this.onChange();
  }
}
