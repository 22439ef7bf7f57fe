// Wire types for the smnist service JSON API.

export interface RecordInfo {
  level: number;
  label: number;
  mean: number;
  mean_int: number;
  clock_ms: number;
}

export interface StateSummary {
  level: number;
  streak: number;
  clock_ms: number;
  status: "active" | "completed" | "ended";
  score: number;
  display: string;
  ms_row: string;
  records: RecordInfo[];
}

export interface SessionCreated {
  session_id: string;
  created_at: number;
  answer_window_ms: number;
  state: StateSummary;
}

export interface TrialInfo {
  trial_index: number;
  positions: [number, number][];
  deadline_ms: number;
  level: number;
  streak: number;
}

export interface AnswerResult {
  correct: boolean;
  timeout: boolean;
  level_changed: boolean;
  record: RecordInfo | null;
  elapsed_ms: number;
  state: StateSummary;
}

export interface AggregateRow {
  label: number;
  measured: number;
  measured_int: number;
  theoretical: number;
  n: number;
}

export interface AggregateTable {
  rows: AggregateRow[];
}
