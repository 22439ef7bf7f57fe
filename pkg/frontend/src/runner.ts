// The test loop state machine.  All verdicts and timing authority live on
// the server; this class only sequences requests, runs the local countdown
// for auto-submission, and mirrors server state for rendering.

import { ApiClient } from "./api.js";
import type { StateSummary, TrialInfo } from "./types.js";

export type Phase = "idle" | "showing" | "answered" | "finished" | "error";

export interface ViewState {
  phase: Phase;
  trial: TrialInfo | null;
  state: StateSummary | null;
  lastCorrect: boolean | null;
  lastTimeout: boolean;
  levelChanged: boolean;
  remainingMs: number;
  error: string | null;
}

export interface Clock {
  setTimeout(fn: () => void, ms: number): number;
  clearTimeout(id: number): void;
}

export interface RunnerOptions {
  onChange: (view: ViewState) => void;
  clock?: Clock;
  verdictHoldMs?: number;
  countdownStepMs?: number;
}

const realClock: Clock = {
  setTimeout: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  clearTimeout: (id) => clearTimeout(id),
};

export class TestRunner {
  private view: ViewState = {
    phase: "idle",
    trial: null,
    state: null,
    lastCorrect: null,
    lastTimeout: false,
    levelChanged: false,
    remainingMs: 0,
    error: null,
  };
  private sessionId: string | null = null;
  private clock: Clock;
  private deadlineTimer: number | null = null;
  private tickTimer: number | null = null;
  private holdMs: number;
  private stepMs: number;
  private inFlight = false;
  private retryAction: (() => Promise<void>) | null = null;

  constructor(private readonly api: ApiClient, private readonly opts: RunnerOptions) {
    this.clock = opts.clock ?? realClock;
    this.holdMs = opts.verdictHoldMs ?? 600;
    this.stepMs = opts.countdownStepMs ?? 100;
  }

  snapshot(): ViewState {
    return { ...this.view };
  }

  private publish(patch: Partial<ViewState>) {
    this.view = { ...this.view, ...patch };
    this.opts.onChange(this.snapshot());
  }

  private fail(action: () => Promise<void>, err: unknown) {
    // keep local state untouched; the banner offers a retry of the same call
    this.retryAction = action;
    this.publish({ phase: "error", error: err instanceof Error ? err.message : String(err) });
  }

  async retry(): Promise<void> {
    const action = this.retryAction;
    if (!action) return;
    this.retryAction = null;
    try {
      await action();
    } catch (err) {
      this.fail(action, err);
    }
  }

  async start(): Promise<void> {
    const action = async () => {
      const created = await this.api.createSession();
      this.sessionId = created.session_id;
      this.publish({ state: created.state });
      await this.nextTrial();
    };
    try {
      await action();
    } catch (err) {
      this.fail(action, err);
    }
  }

  private async nextTrial(): Promise<void> {
    const action = async () => {
      if (!this.sessionId) return;
      const trial = await this.api.fetchTrial(this.sessionId);
      this.publish({
        phase: "showing",
        trial,
        lastCorrect: null,
        lastTimeout: false,
        levelChanged: false,
        remainingMs: trial.deadline_ms,
        error: null,
      });
      this.armCountdown(trial.deadline_ms);
    };
    try {
      await action();
    } catch (err) {
      this.fail(action, err);
    }
  }

  private armCountdown(deadlineMs: number) {
    this.disarmCountdown();
    this.deadlineTimer = this.clock.setTimeout(() => {
      void this.submit(null); // deadline expiry: auto-submit as timeout
    }, deadlineMs);
    const tick = () => {
      if (this.view.phase !== "showing") return;
      const remaining = Math.max(0, this.view.remainingMs - this.stepMs);
      this.publish({ remainingMs: remaining });
      if (remaining > 0) {
        this.tickTimer = this.clock.setTimeout(tick, this.stepMs);
      }
    };
    this.tickTimer = this.clock.setTimeout(tick, this.stepMs);
  }

  private disarmCountdown() {
    if (this.deadlineTimer !== null) this.clock.clearTimeout(this.deadlineTimer);
    if (this.tickTimer !== null) this.clock.clearTimeout(this.tickTimer);
    this.deadlineTimer = null;
    this.tickTimer = null;
  }

  answerDigit(digit: number): void {
    if (this.view.phase !== "showing" || this.inFlight) return;
    void this.submit(digit);
  }

  private async submit(digit: number | null): Promise<void> {
    if (!this.sessionId || this.view.trial === null || this.inFlight) return;
    this.disarmCountdown();
    this.inFlight = true;
    const action = async () => {
      if (!this.sessionId) return;
      const result = await this.api.postAnswer(this.sessionId, digit);
      this.publish({
        phase: "answered",
        trial: null,
        state: result.state,
        lastCorrect: result.correct,
        lastTimeout: result.timeout,
        levelChanged: result.level_changed,
        remainingMs: 0,
      });
      if (result.state.status === "active") {
        this.clock.setTimeout(() => void this.nextTrial(), this.holdMs);
      } else {
        this.publish({ phase: "finished" });
      }
    };
    try {
      await action();
    } catch (err) {
      this.fail(action, err);
    } finally {
      this.inFlight = false;
    }
  }
}
