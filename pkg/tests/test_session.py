import math

import pytest
from hypothesis import given, strategies as st

from smnist import session as eng
from smnist.session import (
    LevelChangeRecord,
    Session,
    SessionConfig,
    Trial,
    aggregate,
    aggregate_csv,
    display_row,
    heuristic_score,
    place_dots,
    replay_events,
    simulate_many,
    simulate_session,
    theoretical_mean,
)


def _feed_streak(session, draws, elapsed=500):
    verdict = None
    for i, d in enumerate(draws):
        positions = tuple((0.05 + 0.11 * k, 0.0) for k in range(d))
        session.begin_trial(Trial(index=session.trials_issued, numerosity=d,
                                  positions=positions, deadline_ms=3000))
        verdict = session.submit_answer(d, elapsed)
    return verdict


def test_worked_streak_example():
    s = Session()
    draws = [0, 0, 2, 1, 1, 1, 0, 1, 2, 1]
    verdict = _feed_streak(s, draws)
    assert verdict.level_changed
    record = s.records[0]
    assert record.mean_numerosity == pytest.approx(0.9)
    assert record.mean_int == 0
    assert record.label == 4
    assert s.level == 4 and s.streak == 0


def test_nine_correct_then_wrong_resets():
    s = Session()
    _feed_streak(s, [0, 1, 2, 0, 1, 2, 0, 1, 2])
    assert s.streak == 9
    s.begin_trial(Trial(index=99, numerosity=2,
                        positions=((0.1, 0), (0.3, 0)), deadline_ms=3000))
    verdict = s.submit_answer(1, 500)
    assert not verdict.correct
    assert s.streak == 0 and not s.records and s.draw_log == []


def test_correct_answer_after_deadline_is_wrong():
    s = Session(SessionConfig(answer_window_ms=1000))
    s.begin_trial(Trial(index=0, numerosity=1, positions=((0.1, 0),), deadline_ms=1000))
    verdict = s.submit_answer(1, 1500)
    assert verdict.timeout and not verdict.correct
    assert s.streak == 0


def test_trial_numerosity_stays_below_level():
    s = Session(seed=123)
    for _ in range(300):
        t = s.next_trial()
        assert 0 <= t.numerosity <= s.level - 1 == 2
        s.submit_answer((t.numerosity + 1) % 10, 100)  # keep level at 3


def test_level_10_draws_up_to_nine():
    s = Session(SessionConfig(start_level=10), seed=5)
    seen = set()
    for _ in range(500):
        t = s.next_trial()
        seen.add(t.numerosity)
        s.submit_answer(None, 100)
    assert seen == set(range(10))


def test_level_4_frequencies_are_uniform():
    s = Session(SessionConfig(start_level=4), seed=11)
    counts = [0, 0, 0, 0]
    n = 100000
    for _ in range(n):
        t = s.next_trial()
        counts[t.numerosity] += 1
        s.trial = None  # skip answering; only the draw matters
    for c in counts:
        assert abs(c / n - 0.25) < 0.01


def test_dot_geometry_constraints():
    cfg = SessionConfig()
    import random

    rng = random.Random(3)
    for n in range(10):
        pts = place_dots(n, rng, cfg)
        assert len(pts) == n
        for x, y in pts:
            assert math.hypot(x, y) <= 1.0 - cfg.dot_radius + 1e-12
        for i in range(n):
            for j in range(i + 1, n):
                dx = pts[i][0] - pts[j][0]
                dy = pts[i][1] - pts[j][1]
                assert math.hypot(dx, dy) >= cfg.min_separation - 1e-12


def test_completing_level_10_finishes_session():
    s, _ = simulate_session(seed=1, capacity=math.inf, max_trials=10000)
    assert s.status == eng.COMPLETED
    assert s.level == 10
    assert [r.level for r in s.records] == list(range(3, 11))
    assert [r.label for r in s.records] == list(range(4, 12))
    # records carry strictly increasing clocks and integer parts of means
    clocks = [r.clock_ms for r in s.records]
    assert clocks == sorted(clocks) and len(set(clocks)) == len(clocks)
    for r in s.records:
        assert r.mean_int == math.floor(r.mean_numerosity)
        assert 0 <= r.mean_numerosity <= r.level - 1


def test_next_trial_guards():
    s = Session()
    s.next_trial()
    with pytest.raises(ValueError):
        s.next_trial()  # one outstanding trial at a time
    s.end()
    with pytest.raises(ValueError):
        s.next_trial()  # ended sessions issue no trials
    assert s.status == eng.ENDED


def test_submit_guards():
    s = Session()
    with pytest.raises(ValueError):
        s.submit_answer(3, 100)  # no outstanding trial
    s.next_trial()
    with pytest.raises(ValueError):
        s.submit_answer(17, 100)
    with pytest.raises(ValueError):
        s.submit_answer("3", 100)
    with pytest.raises(ValueError):
        s.submit_answer(3, -5)


def test_heuristic_score_empty_and_hand_value():
    assert heuristic_score([]) == 0.0
    record = LevelChangeRecord(level=3, mean_numerosity=1.0, mean_int=1, clock_ms=5000)
    assert heuristic_score([record]) == pytest.approx(2 * 4 / 5000)
    assert heuristic_score([record]) == pytest.approx(0.0016)


def test_score_increases_when_time_decreases():
    slow = [LevelChangeRecord(3, 1.0, 1, 5000), LevelChangeRecord(4, 2.0, 2, 9000)]
    fast = [LevelChangeRecord(3, 1.0, 1, 5000), LevelChangeRecord(4, 2.0, 2, 8000)]
    assert heuristic_score(fast) > heuristic_score(slow)


def test_theoretical_mean_values():
    assert theoretical_mean(4) == 1.0
    assert theoretical_mean(10) == 4.0
    assert theoretical_mean(6) == 2.0
    with pytest.raises(ValueError):
        theoretical_mean(3)


def test_display_row_reference_shape():
    records = [
        LevelChangeRecord(3, 0.9, 0, 4000),
        LevelChangeRecord(4, 1.5, 1, 9000),
        LevelChangeRecord(5, 2.2, 2, 15000),
        LevelChangeRecord(6, 2.9, 2, 21000),
        LevelChangeRecord(7, 2.4, 2, 30000),
        LevelChangeRecord(8, 2.8, 2, 41000),
    ]
    score = heuristic_score(records)
    row = display_row(9, records, score)
    assert row == f"(9) 4/0 5/1 6/2 7/2 8/2 9/2 0/0 <{score:.8f}>"
    fresh = display_row(3, [], 0.0)
    assert fresh == "(3) 0/0 0/0 0/0 0/0 0/0 0/0 0/0 <0.00000000>"


def test_aggregate_empty_and_single_session():
    assert aggregate([]) == []
    records = [LevelChangeRecord(3, 0.9, 0, 1000), LevelChangeRecord(4, 1.9, 1, 2000)]
    rows = aggregate([records])
    assert [(r.label, r.measured_int) for r in rows] == [(4, 0.0), (5, 1.0)]
    assert rows[0].theoretical == 1.0 and rows[1].theoretical == 1.5


def test_aggregate_csv_columns():
    records = [LevelChangeRecord(3, 0.9, 0, 1000)]
    text = aggregate_csv(aggregate([records]))
    lines = text.strip().splitlines()
    assert lines[0] == "level_label,measured,theoretical,n"
    assert lines[1].startswith("4,0.9")


@given(st.integers(0, 2 ** 31), st.sampled_from([2, 3, 4, math.inf]))
def test_replay_reconstructs_state(seed, capacity):
    session, events = simulate_session(seed=seed, capacity=capacity, max_trials=60)
    replayed = replay_events(events)
    assert replayed.state_snapshot() == session.state_snapshot()


def test_replay_rejects_tampered_log():
    _, events = simulate_session(seed=4, capacity=math.inf, max_trials=30)
    tampered = [dict(e) for e in events]
    for e in tampered:
        if e["event"] == "answer" and e["correct"]:
            e["correct"] = False
            break
    with pytest.raises(eng.ReplayError):
        replay_events(tampered)


def test_capacity_limited_sessions_fall_short_at_high_labels():
    results = simulate_many(60, capacity=4, seed=77, max_trials=400)
    rows = aggregate([s.records for s, _ in results])
    by_label = {r.label: r for r in rows}
    for label, row in by_label.items():
        if label >= 7 and row.sessions >= 10:
            assert row.measured < row.theoretical
