import { ApiClient, DecideOutcome } from "./api.js";
import type { ConflictJson, Decision, DecisionState, LogEntry, SessionState } from "./types.js";

/** Click cycling for the tri-state decision control: undecided -> selected
 * -> deselected -> undecided. Forced features cycle from what the user
 * would mean: selecting a forced-selected feature pins it, anything else
 * starts at select. */
export function nextDecision(current: DecisionState): Decision {
  switch (current) {
    case "user-selected":
      return "deselect";
    case "user-deselected":
      return "undecide";
    default:
      return "select";
  }
}

export interface ControllerView {
  state: SessionState;
  /** Set while a rejected or flagged conflict should be on screen. */
  conflict: ConflictJson | null;
  /** The decision that produced the conflict, for the undo button. */
  offending: LogEntry | null;
}

/** Owns one configurator session: serializes decisions, discards stale
 * responses by sequence number, keeps the decision log for replay/undo. */
export class SessionController {
  private sessionId: string;
  private view: ControllerView;
  private log: LogEntry[] = [];
  private sequence = 0;
  private applied = 0;

  private constructor(private readonly api: ApiClient, state: SessionState) {
    this.sessionId = state.session_id;
    this.view = { state, conflict: state.conflict, offending: null };
  }

  static async start(api: ApiClient, model: string): Promise<SessionController> {
    return new SessionController(api, await api.createSession(model));
  }

  get current(): ControllerView {
    return this.view;
  }

  get decisionLog(): readonly LogEntry[] {
    return this.log;
  }

  /** Apply one decision; resolves to the view after the server answered.
   * A response that was overtaken by a newer decision is discarded. */
  async decide(feature: string, decision: Decision): Promise<ControllerView> {
    const ticket = ++this.sequence;
    const outcome = await this.api.decide(this.sessionId, feature, decision);
    if (ticket <= this.applied) {
      return this.view; // stale: a newer decision already landed
    }
    this.applied = ticket;
    this.absorb(outcome, { feature, decision });
    return this.view;
  }

  private absorb(outcome: DecideOutcome, entry: LogEntry): void {
    if (!outcome.applied) {
      // Rejected with 409: server state is unchanged, show the would-be
      // conflict and offer to drop the attempted decision.
      this.view = { state: outcome.state, conflict: outcome.conflict, offending: entry };
      return;
    }
    this.log.push(entry);
    this.view = {
      state: outcome.state,
      conflict: outcome.state.conflict,
      offending: outcome.state.conflict ? entry : null,
    };
  }

  /** Undo the decision that caused the conflict panel. For a rejected
   * decision nothing was applied, so dismissing is enough; for a retained
   * conflict the last log entry is replayed away in a fresh session. */
  async undoConflict(): Promise<ControllerView> {
    if (this.view.conflict === null) {
      return this.view;
    }
    if (this.view.state.conflict === null) {
      this.view = { state: this.view.state, conflict: null, offending: null };
      return this.view;
    }
    return this.replay(this.log.slice(0, -1));
  }

  /** Rebuild a session from a decision log; state is a pure function of the
   * log, so this reproduces it exactly. */
  async replay(entries: readonly LogEntry[]): Promise<ControllerView> {
    let state = await this.api.createSession(this.view.state.model);
    this.sessionId = state.session_id;
    this.log = [];
    for (const entry of entries) {
      const outcome = await this.api.decide(this.sessionId, entry.feature, entry.decision);
      if (outcome.applied) {
        state = outcome.state;
        this.log.push(entry);
      }
    }
    this.sequence = ++this.applied;
    this.view = { state, conflict: state.conflict, offending: null };
    return this.view;
  }
}
