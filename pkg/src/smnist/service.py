"""HTTP facade: live sessions, cross-session aggregates, dataset downloads.

Sessions persist as append-only JSON-lines event logs under the data
directory; every event is flushed to the log before the response is sent,
and replaying a log reconstructs the session exactly (crash-restart safety).
The server clock is the timing authority: answers are timed from the moment
the trial was issued to the moment the answer request arrives.
"""

import json
import secrets
import threading
import time
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from . import session as eng

SESSIONS_SUBDIR = "sessions"


class SessionStore:
    """Live sessions plus their on-disk event logs; one lock per session."""

    def __init__(self, data_dir, config: eng.SessionConfig):
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / SESSIONS_SUBDIR
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self._live: dict = {}
        self._issued_at: dict = {}
        self._lock = threading.Lock()
        self._locks: dict = {}

    def _log_path(self, session_id: str) -> Path:
        if not session_id.isalnum():
            raise KeyError(session_id)
        return self.sessions_dir / f"{session_id}.jsonl"

    def lock(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self) -> tuple:
        session_id = secrets.token_hex(8)
        seed = secrets.randbits(32)
        session = eng.Session(self.config, seed=seed)
        with self.lock(session_id):
            self._live[session_id] = session
            self.append_event(session_id, eng.created_event(self.config, seed))
        return session_id, session

    def get(self, session_id: str) -> eng.Session:
        """Live session, or replay of its log after a restart."""
        session = self._live.get(session_id)
        if session is not None:
            return session
        try:
            path = self._log_path(session_id)
        except KeyError:
            raise KeyError(session_id) from None
        if not path.exists():
            raise KeyError(session_id)
        events = [json.loads(line) for line in path.read_text().splitlines() if line]
        session = eng.replay_events(events)
        self._live[session_id] = session
        if session.trial is not None:
            # the original issue instant is lost across restarts: restart the window
            self._issued_at[session_id] = time.monotonic()
        return session

    def append_event(self, session_id: str, event: dict):
        with self._log_path(session_id).open("a") as f:
            f.write(json.dumps(event) + "\n")
            f.flush()

    def all_records(self) -> list:
        """Level-change records per persisted session, straight from the logs."""
        out = []
        for path in sorted(self.sessions_dir.glob("*.jsonl")):
            records = []
            for line in path.read_text().splitlines():
                if not line:
                    continue
                e = json.loads(line)
                if e.get("event") == "level_change":
                    records.append(eng.LevelChangeRecord(
                        level=e["level"], mean_numerosity=e["mean"],
                        mean_int=e["mean_int"], clock_ms=e["clock_ms"]))
            out.append(records)
        return out


def _session_summary(session: eng.Session) -> dict:
    return {
        "level": session.level,
        "streak": session.streak,
        "clock_ms": session.clock_ms,
        "status": session.status,
        "score": session.score(),
        "display": session.display_row(),
        "ms_row": session.ms_row(),
        "records": [eng.record_to_dict(r) for r in session.records],
    }


def create_app(data_dir, answer_window_ms: int = 3000, datasets_dir=None,
               webui_dir=None) -> FastAPI:
    config = eng.SessionConfig(answer_window_ms=answer_window_ms)
    store = SessionStore(data_dir, config)
    app = FastAPI(title="smnist service")
    app.state.store = store

    def fetch(session_id: str) -> eng.Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")

    @app.post("/api/sessions")
    def create_session():
        session_id, session = store.create()
        return {
            "session_id": session_id,
            "created_at": time.time(),
            "answer_window_ms": config.answer_window_ms,
            "state": _session_summary(session),
        }

    @app.get("/api/sessions/{session_id}/trial")
    def get_trial(session_id: str):
        with store.lock(session_id):
            session = fetch(session_id)
            if session.status != eng.ACTIVE:
                raise HTTPException(status_code=409,
                                    detail=f"session is {session.status}")
            if session.trial is None:
                trial = session.next_trial()
                store._issued_at[session_id] = time.monotonic()
                store.append_event(session_id, eng.trial_event(trial))
            else:
                trial = session.trial  # idempotent refresh of the open trial
            return {
                "trial_index": trial.index,
                "positions": [[x, y] for x, y in trial.positions],
                "deadline_ms": trial.deadline_ms,
                "level": session.level,
                "streak": session.streak,
            }

    @app.post("/api/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: dict = Body(...)):
        if "digit" not in body:
            raise HTTPException(status_code=400, detail="missing digit")
        digit = body["digit"]
        if digit is not None and (isinstance(digit, bool) or not isinstance(digit, int)
                                  or not 0 <= digit <= 9):
            raise HTTPException(status_code=400, detail=f"malformed digit {digit!r}")
        with store.lock(session_id):
            session = fetch(session_id)
            if session.trial is None:
                raise HTTPException(status_code=409, detail="no outstanding trial")
            issued = store._issued_at.get(session_id, time.monotonic())
            elapsed_ms = max(1, int((time.monotonic() - issued) * 1000))
            verdict = session.submit_answer(digit, elapsed_ms)
            store.append_event(session_id, eng.answer_event(digit, elapsed_ms, verdict))
            if verdict.record is not None:
                store.append_event(session_id, eng.level_change_event(verdict.record))
            return {
                "correct": verdict.correct,
                "timeout": verdict.timeout,
                "level_changed": verdict.level_changed,
                "record": None if verdict.record is None
                else eng.record_to_dict(verdict.record),
                "elapsed_ms": elapsed_ms,
                "state": _session_summary(session),
            }

    @app.get("/api/sessions/{session_id}/report")
    def get_report(session_id: str):
        with store.lock(session_id):
            session = fetch(session_id)
            return _session_summary(session)

    @app.get("/api/aggregate")
    def get_aggregate():
        rows = eng.aggregate(store.all_records())
        return {
            "rows": [
                {
                    "label": r.label,
                    "measured": r.measured,
                    "measured_int": r.measured_int,
                    "theoretical": r.theoretical,
                    "n": r.sessions,
                }
                for r in rows
            ]
        }

    if datasets_dir is not None:
        datasets_root = Path(datasets_dir).resolve()

        @app.get("/api/datasets/{name}/{filename}")
        def get_dataset_file(name: str, filename: str):
            path = (datasets_root / name / filename).resolve()
            if not path.is_relative_to(datasets_root) or not path.is_file():
                raise HTTPException(status_code=404, detail="no such dataset file")
            return FileResponse(path)

    if webui_dir is not None and Path(webui_dir).is_dir():
        app.mount("/", StaticFiles(directory=webui_dir, html=True), name="webui")

    return app


def run(data_dir, port: int = 8000, host: str = "127.0.0.1",
        answer_window_ms: int = 3000, datasets_dir=None, webui_dir=None):
    import uvicorn

    app = create_app(data_dir, answer_window_ms=answer_window_ms,
                     datasets_dir=datasets_dir, webui_dir=webui_dir)
    uvicorn.run(app, host=host, port=port)
