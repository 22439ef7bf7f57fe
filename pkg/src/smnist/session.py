"""Live subitizing-test state machine: trials, streaks, levels, scoring.

A session starts at level 3, where a trial shows 0..2 dots.  Ten consecutive
correct answers at a level emit a level-change record (mean of the ten
numerosities, cumulative milliseconds) and advance the level; any wrong or
late answer resets the streak.  Completing level 10 finishes the session.

The heuristic score is sum((l_i + 1) * (i + 1) / s_i) over records, with i
the level at which the streak completed, l_i the streak's mean numerosity
and s_i the cumulative session milliseconds at the change.
"""

import hashlib
import math
import random
from dataclasses import dataclass, field

ACTIVE = "active"
COMPLETED = "completed"
ENDED = "ended"


@dataclass(frozen=True)
class SessionConfig:
    start_level: int = 3
    max_level: int = 10
    streak_target: int = 10
    answer_window_ms: int = 3000
    dot_radius: float = 0.05       # disc radius is 1.0
    min_separation: float = 0.2    # between dot centers: two diameters

    def __post_init__(self):
        if self.start_level < 3 or self.max_level < self.start_level:
            raise ValueError("levels must satisfy 3 <= start <= max")
        if self.streak_target <= 0 or self.answer_window_ms <= 0:
            raise ValueError("streak target and answer window must be positive")


@dataclass(frozen=True)
class Trial:
    index: int
    numerosity: int
    positions: tuple          # (x, y) pairs inside the unit disc
    deadline_ms: int


@dataclass(frozen=True)
class LevelChangeRecord:
    level: int                # level at which the streak completed (3, 4, ...)
    mean_numerosity: float    # l_i: mean of the ten streak numerosities
    mean_int: int             # integer part of l_i
    clock_ms: int             # s_i: cumulative session ms at the change

    @property
    def label(self) -> int:
        # a record for level i is displayed as reaching level i+1
        return self.level + 1


@dataclass(frozen=True)
class Verdict:
    correct: bool
    timeout: bool
    level_changed: bool
    record: LevelChangeRecord | None
    level: int
    streak: int
    status: str


def _derived_rng(seed: int, *scope) -> random.Random:
    tag = ":".join(str(s) for s in (seed,) + scope).encode()
    return random.Random(int.from_bytes(hashlib.blake2b(tag, digest_size=8).digest(), "big"))


class Session:
    """Single-player session; one writer, sequential calls."""

    def __init__(self, config: SessionConfig = SessionConfig(), seed: int = 0):
        self.config = config
        self.seed = seed
        self.level = config.start_level
        self.streak = 0
        self.clock_ms = 0
        self.draw_log: list = []
        self.records: list = []
        self.status = ACTIVE
        self.trial: Trial | None = None
        self.trials_issued = 0

    def next_trial(self) -> Trial:
        """Sample numerosity uniform over {0..level-1} and dot positions."""
        if self.status != ACTIVE:
            raise ValueError(f"cannot issue a trial on a {self.status} session")
        if self.trial is not None:
            raise ValueError("a trial is already outstanding")
        rng = _derived_rng(self.seed, "trial", self.trials_issued)
        n = rng.randrange(self.level)
        trial = Trial(
            index=self.trials_issued,
            numerosity=n,
            positions=place_dots(n, rng, self.config),
            deadline_ms=self.config.answer_window_ms,
        )
        self.begin_trial(trial)
        return trial

    def begin_trial(self, trial: Trial):
        """Install an externally built trial (used by log replay)."""
        if self.status != ACTIVE:
            raise ValueError(f"cannot issue a trial on a {self.status} session")
        if self.trial is not None:
            raise ValueError("a trial is already outstanding")
        if not 0 <= trial.numerosity < self.level:
            raise ValueError(
                f"numerosity {trial.numerosity} impossible at level {self.level}")
        self.trial = trial
        self.trials_issued = max(self.trials_issued, trial.index + 1)

    def submit_answer(self, digit, elapsed_ms: int) -> Verdict:
        """Judge the outstanding trial; late or wrong answers reset the streak."""
        if self.trial is None:
            raise ValueError("no outstanding trial")
        if digit is not None and (not isinstance(digit, int) or not 0 <= digit <= 9):
            raise ValueError(f"malformed digit {digit!r}")
        if elapsed_ms < 0:
            raise ValueError("negative elapsed time")

        trial, self.trial = self.trial, None
        self.clock_ms += elapsed_ms
        timeout = elapsed_ms > trial.deadline_ms
        correct = (not timeout) and digit == trial.numerosity

        record = None
        level_changed = False
        if correct:
            self.streak += 1
            self.draw_log.append(trial.numerosity)
            if self.streak >= self.config.streak_target:
                mean = sum(self.draw_log) / len(self.draw_log)
                record = LevelChangeRecord(
                    level=self.level,
                    mean_numerosity=mean,
                    mean_int=math.floor(mean),
                    clock_ms=self.clock_ms,
                )
                self.records.append(record)
                level_changed = True
                self.streak = 0
                self.draw_log = []
                if self.level >= self.config.max_level:
                    self.status = COMPLETED
                else:
                    self.level += 1
        else:
            self.streak = 0
            self.draw_log = []

        return Verdict(
            correct=correct,
            timeout=timeout,
            level_changed=level_changed,
            record=record,
            level=self.level,
            streak=self.streak,
            status=self.status,
        )

    def end(self):
        if self.status == ACTIVE:
            self.status = ENDED
            self.trial = None

    def score(self) -> float:
        return heuristic_score(self.records)

    def display_row(self) -> str:
        return display_row(self.level, self.records, self.score(),
                           self.config.start_level, self.config.max_level)

    def ms_row(self) -> str:
        return " ".join(str(r.clock_ms) for r in self.records)

    def state_snapshot(self) -> dict:
        return {
            "level": self.level,
            "streak": self.streak,
            "clock_ms": self.clock_ms,
            "draw_log": list(self.draw_log),
            "status": self.status,
            "records": [record_to_dict(r) for r in self.records],
            "trials_issued": self.trials_issued,
            "outstanding": None if self.trial is None else trial_to_dict(self.trial),
        }


def place_dots(n: int, rng: random.Random, config: SessionConfig):
    """n dot centers in the unit disc, pairwise at least min_separation apart."""
    max_r = 1.0 - config.dot_radius
    min_sep2 = config.min_separation ** 2
    out = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 100000:
            raise RuntimeError(f"cannot place {n} dots with the configured geometry")
        x = rng.uniform(-max_r, max_r)
        y = rng.uniform(-max_r, max_r)
        if x * x + y * y > max_r * max_r:
            continue
        if any((x - a) ** 2 + (y - b) ** 2 < min_sep2 for a, b in out):
            continue
        out.append((x, y))
    return tuple(out)


def heuristic_score(records) -> float:
    """Gamification value: sum of (l_i + 1)(i + 1) / s_i over records."""
    return sum(
        (r.mean_numerosity + 1.0) * (r.level + 1.0) / r.clock_ms for r in records
    )


def theoretical_mean(level_label: int) -> float:
    """Expected streak mean under uniform draws when reaching `level_label`."""
    if level_label < 4:
        raise ValueError(f"level labels start at 4, got {level_label}")
    return (level_label - 2) / 2


def display_row(level, records, score, start_level=3, max_level=10) -> str:
    """The status line: "(level) 4/0 5/1 ... 0/0 <score>", 8 fraction digits.

    One slot per level label start_level+1 .. max_level; labels not yet
    reached show the 0/0 placeholder.
    """
    slots = []
    for i, label in enumerate(range(start_level + 1, max_level + 1)):
        if i < len(records):
            slots.append(f"{records[i].label}/{records[i].mean_int}")
        else:
            slots.append("0/0")
    return f"({level}) " + " ".join(slots) + f" <{score:.8f}>"


# ---------------------------------------------------------------------------
# cross-session aggregation


@dataclass(frozen=True)
class AggregateRow:
    label: int            # level label L (record level + 1)
    measured: float       # mean of the fractional streak means l_i
    measured_int: float   # mean of the integer parts (the displayed values)
    theoretical: float    # (L - 2) / 2
    sessions: int


def aggregate(record_lists) -> list:
    """Per level label: measured vs theoretical streak means across sessions."""
    by_label: dict = {}
    for records in record_lists:
        for r in records:
            by_label.setdefault(r.label, []).append(r)
    rows = []
    for label in sorted(by_label):
        rs = by_label[label]
        rows.append(AggregateRow(
            label=label,
            measured=sum(r.mean_numerosity for r in rs) / len(rs),
            measured_int=sum(r.mean_int for r in rs) / len(rs),
            theoretical=theoretical_mean(label),
            sessions=len(rs),
        ))
    return rows


def aggregate_csv(rows) -> str:
    lines = ["level_label,measured,theoretical,n"]
    for r in rows:
        lines.append(f"{r.label},{r.measured:.6f},{r.theoretical:.6f},{r.sessions}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# event log: one JSON-serializable dict per event; replay rebuilds the state


def trial_to_dict(t: Trial) -> dict:
    return {
        "index": t.index,
        "numerosity": t.numerosity,
        "positions": [[x, y] for x, y in t.positions],
        "deadline_ms": t.deadline_ms,
    }


def trial_from_dict(d: dict) -> Trial:
    return Trial(
        index=d["index"],
        numerosity=d["numerosity"],
        positions=tuple((x, y) for x, y in d["positions"]),
        deadline_ms=d["deadline_ms"],
    )


def record_to_dict(r: LevelChangeRecord) -> dict:
    return {
        "level": r.level,
        "label": r.label,
        "mean": r.mean_numerosity,
        "mean_int": r.mean_int,
        "clock_ms": r.clock_ms,
    }


def created_event(config: SessionConfig, seed: int) -> dict:
    return {
        "event": "created",
        "seed": seed,
        "config": {
            "start_level": config.start_level,
            "max_level": config.max_level,
            "streak_target": config.streak_target,
            "answer_window_ms": config.answer_window_ms,
            "dot_radius": config.dot_radius,
            "min_separation": config.min_separation,
        },
    }


def trial_event(trial: Trial) -> dict:
    return {"event": "trial", **trial_to_dict(trial)}


def answer_event(digit, elapsed_ms: int, verdict: Verdict) -> dict:
    return {
        "event": "answer",
        "digit": digit,
        "elapsed_ms": elapsed_ms,
        "correct": verdict.correct,
        "timeout": verdict.timeout,
        "level": verdict.level,
        "streak": verdict.streak,
        "status": verdict.status,
    }


def level_change_event(record: LevelChangeRecord) -> dict:
    return {"event": "level_change", **record_to_dict(record)}


def ended_event() -> dict:
    return {"event": "ended"}


class ReplayError(ValueError):
    """Event log disagrees with the recomputed session state."""


def replay_events(events) -> Session:
    """Reconstruct a session by replaying its event log through the engine."""
    session = None
    for e in events:
        kind = e.get("event")
        if kind == "created":
            c = e["config"]
            session = Session(SessionConfig(**c), seed=e.get("seed", 0))
        elif session is None:
            raise ReplayError("log does not start with a created event")
        elif kind == "trial":
            session.begin_trial(trial_from_dict(e))
        elif kind == "answer":
            verdict = session.submit_answer(e["digit"], e["elapsed_ms"])
            for field_name in ("correct", "timeout", "level", "streak", "status"):
                if e[field_name] != getattr(verdict, field_name):
                    raise ReplayError(
                        f"answer event disagrees on {field_name}: "
                        f"logged {e[field_name]!r}, replayed {getattr(verdict, field_name)!r}")
        elif kind == "level_change":
            if not session.records or record_to_dict(session.records[-1]) != {
                "level": e["level"], "label": e["label"], "mean": e["mean"],
                "mean_int": e["mean_int"], "clock_ms": e["clock_ms"],
            }:
                raise ReplayError("level_change event disagrees with replayed record")
        elif kind == "ended":
            session.end()
    if session is None:
        raise ReplayError("empty event log")
    return session


# ---------------------------------------------------------------------------
# synthetic players


def simulate_session(seed: int, capacity: float = math.inf, reaction_ms: int = 800,
                     max_trials: int = 500,
                     config: SessionConfig = SessionConfig()) -> tuple:
    """One synthetic player: answers correctly iff numerosity <= capacity,
    otherwise guesses a uniform digit.  Returns (session, events)."""
    session = Session(config, seed=seed)
    behavior = _derived_rng(seed, "behavior")
    events = [created_event(config, seed)]
    for _ in range(max_trials):
        if session.status != ACTIVE:
            break
        trial = session.next_trial()
        events.append(trial_event(trial))
        if trial.numerosity <= capacity:
            digit = trial.numerosity
        else:
            digit = behavior.randrange(10)
        elapsed = max(1, int(behavior.uniform(0.75, 1.25) * reaction_ms))
        verdict = session.submit_answer(digit, elapsed)
        events.append(answer_event(digit, elapsed, verdict))
        if verdict.record is not None:
            events.append(level_change_event(verdict.record))
    if session.status == ACTIVE:
        session.end()
        events.append(ended_event())
    return session, events


def simulate_many(players: int, capacity: float = math.inf, reaction_ms: int = 800,
                  seed: int = 0, max_trials: int = 500,
                  config: SessionConfig = SessionConfig()) -> list:
    """Independent synthetic sessions; returns (session, events) pairs."""
    return [
        simulate_session(seed + i, capacity, reaction_ms, max_trials, config)
        for i in range(players)
    ]
