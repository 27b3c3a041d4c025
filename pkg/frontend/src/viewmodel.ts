// Client-side view of the session. Holds only what the server sent; the
// UI never recomputes fixture math locally.

import { BoundaryMsg, StateMessage, TICK_PERIOD } from "./protocol.js";

export const STALE_AFTER_MS = 500;

export type ConnectionStatus = "connecting" | "open" | "degraded" | "closed";

export interface TrialSummary {
  outcome: string;
  completionTime: number;
  attempts: number;
}

export class TrialHud {
  attempts = 0;
  outcome: string | null = null;
  completionTime: number | null = null;
  elapsed = 0;
  private prevButton = false;
  private prevOutcome: string | null = null;

  // Mirrors the server's counter: a button rising edge counts as an
  // attempt while no outcome was latched before the tick; a press that
  // lands on the same tick as a hazard failure was not evaluated.
  onState(msg: StateMessage): void {
    if (this.outcome === null) {
      this.elapsed = msg.t + TICK_PERIOD;
    }
    const button = msg.input?.button ?? false;
    const edge = button && !this.prevButton;
    if (edge && this.prevOutcome === null && msg.outcome !== "fail_hazard_contact") {
      this.attempts += 1;
    }
    if (msg.outcome !== null && this.outcome === null) {
      this.outcome = msg.outcome;
      this.completionTime = msg.t + TICK_PERIOD;
    }
    this.prevButton = button;
    this.prevOutcome = msg.outcome;
  }

  summary(): TrialSummary | null {
    if (this.outcome === null || this.completionTime === null) return null;
    return { outcome: this.outcome, completionTime: this.completionTime, attempts: this.attempts };
  }

  reset(): void {
    this.attempts = 0;
    this.outcome = null;
    this.completionTime = null;
    this.elapsed = 0;
    this.prevButton = false;
    this.prevOutcome = null;
  }
}

export class ViewModel {
  latest: StateMessage | null = null;
  connection: ConnectionStatus = "connecting";
  lastStateAtMs = -Infinity;
  readonly hud = new TrialHud();
  lastError: string | null = null;

  applyState(msg: StateMessage, nowMs: number): void {
    this.latest = msg;
    this.lastStateAtMs = nowMs;
    this.hud.onState(msg);
  }

  // the boundary handed to the renderer is the last received message
  // value, identically; no local adjustment ever happens here
  boundaryForRender(): BoundaryMsg | null {
    return this.latest === null ? null : this.latest.boundary;
  }

  isStale(nowMs: number): boolean {
    return this.connection === "open" && nowMs - this.lastStateAtMs > STALE_AFTER_MS;
  }

  reset(): void {
    this.hud.reset();
  }
}
