// A miniature in-memory implementation of the service wire format, just
// enough to drive the runner through levels in tests.

import type { RecordInfo, StateSummary, TrialInfo } from "../src/types.js";

function displayRow(level: number, records: RecordInfo[], score: number): string {
  const slots: string[] = [];
  for (let i = 0; i < 7; i++) {
    slots.push(i < records.length ? `${records[i].label}/${records[i].mean_int}` : "0/0");
  }
  return `(${level}) ${slots.join(" ")} <${score.toFixed(8)}>`;
}

export class MockServer {
  level = 3;
  streak = 0;
  clockMs = 0;
  records: RecordInfo[] = [];
  drawLog: number[] = [];
  status: "active" | "completed" = "active";
  trial: TrialInfo | null = null;
  trialIndex = 0;
  failNextRequest = false;
  private numerosities: number[];

  constructor(numerosities: number[] = []) {
    this.numerosities = numerosities;
  }

  private nextNumerosity(): number {
    if (this.numerosities.length > 0) {
      return this.numerosities.shift()!;
    }
    return this.trialIndex % this.level;
  }

  private score(): number {
    return this.records.reduce(
      (acc, r) => acc + ((r.mean + 1) * (r.level + 1)) / r.clock_ms, 0);
  }

  state(): StateSummary {
    return {
      level: this.level,
      streak: this.streak,
      clock_ms: this.clockMs,
      status: this.status,
      score: this.score(),
      display: displayRow(this.level, this.records, this.score()),
      ms_row: this.records.map((r) => r.clock_ms).join(" "),
      records: [...this.records],
    };
  }

  issueTrial(): TrialInfo {
    if (this.trial) return this.trial;
    const n = this.nextNumerosity();
    const positions: [number, number][] = Array.from({ length: n }, (_, i) => [
      -0.8 + (1.6 * i) / Math.max(1, n - 1 || 1),
      0,
    ]);
    this.trial = {
      trial_index: this.trialIndex++,
      positions,
      deadline_ms: 3000,
      level: this.level,
      streak: this.streak,
    };
    return this.trial;
  }

  answer(digit: number | null) {
    if (!this.trial) throw new Error("409: no outstanding trial");
    const numerosity = this.trial.positions.length;
    this.trial = null;
    this.clockMs += 500;
    const timeout = digit === null;
    const correct = !timeout && digit === numerosity;
    let levelChanged = false;
    let record: RecordInfo | null = null;
    if (correct) {
      this.streak += 1;
      this.drawLog.push(numerosity);
      if (this.streak >= 10) {
        const mean = this.drawLog.reduce((a, b) => a + b, 0) / this.drawLog.length;
        record = {
          level: this.level,
          label: this.level + 1,
          mean,
          mean_int: Math.floor(mean),
          clock_ms: this.clockMs,
        };
        this.records.push(record);
        levelChanged = true;
        this.streak = 0;
        this.drawLog = [];
        if (this.level >= 10) this.status = "completed";
        else this.level += 1;
      }
    } else {
      this.streak = 0;
      this.drawLog = [];
    }
    return {
      correct,
      timeout,
      level_changed: levelChanged,
      record,
      elapsed_ms: 500,
      state: this.state(),
    };
  }

  /** A FetchLike closed over this server. */
  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    if (this.failNextRequest) {
      this.failNextRequest = false;
      throw new Error("network unreachable");
    }
    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      });
    if (url.endsWith("/api/sessions") && init?.method === "POST") {
      return json({
        session_id: "mock1",
        created_at: 0,
        answer_window_ms: 3000,
        state: this.state(),
      });
    }
    if (url.includes("/trial")) return json(this.issueTrial());
    if (url.includes("/answer")) {
      const body = JSON.parse(String(init?.body)) as { digit: number | null };
      try {
        return json(this.answer(body.digit));
      } catch {
        return json({ detail: "no outstanding trial" }, 409);
      }
    }
    if (url.includes("/report")) return json(this.state());
    if (url.includes("/aggregate")) return json({ rows: [] });
    return json({ detail: "not found" }, 404);
  };
}

/** Drain pending microtasks so fetch/json promise chains settle. */
export async function flush(rounds = 20): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await Promise.resolve();
  }
}

export class FakeClock {
  private now = 0;
  private nextId = 1;
  private timers = new Map<number, { at: number; fn: () => void }>();

  setTimeout = (fn: () => void, ms: number): number => {
    const id = this.nextId++;
    this.timers.set(id, { at: this.now + ms, fn });
    return id;
  };

  clearTimeout = (id: number): void => {
    this.timers.delete(id);
  };

  async advance(ms: number): Promise<void> {
    const target = this.now + ms;
    for (;;) {
      const due = [...this.timers.entries()]
        .filter(([, t]) => t.at <= target)
        .sort((a, b) => a[1].at - b[1].at)[0];
      if (!due) break;
      const [id, timer] = due;
      this.timers.delete(id);
      this.now = timer.at;
      timer.fn();
      await flush(); // let promise chains settle between timers
    }
    this.now = target;
  }
}
