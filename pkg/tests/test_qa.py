"""Quality-pipeline tests.

`oracle_edit_distance` is an exhaustive alignment search (branch and
bound over all insert/delete/substitute paths) kept deliberately
independent of the dynamic program in `qa`; the equivalence suite
compares the two exactly.
"""

from __future__ import annotations

import random
from datetime import datetime

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from audio_annotator import qa
from audio_annotator.clock import ManualClock, to_storage
from audio_annotator.errors import ServiceError
from audio_annotator.models import Assignment, DataPoint, Project, Segment, User
from audio_annotator.store import Database


def oracle_edit_distance(ref: list[str], hyp: list[str]) -> int:
    """Minimum unit-cost edits by exhaustive search over alignments."""
    best = len(ref) + len(hyp)  # delete everything, insert everything

    def walk(i: int, j: int, cost: int) -> None:
        nonlocal best
        # Any completion still needs at least the length imbalance.
        if cost + abs((len(ref) - i) - (len(hyp) - j)) >= best:
            return
        if i == len(ref) and j == len(hyp):
            best = cost
            return
        if i < len(ref) and j < len(hyp):
            walk(i + 1, j + 1, cost + (0 if ref[i] == hyp[j] else 1))
        if i < len(ref):
            walk(i + 1, j, cost + 1)
        if j < len(hyp):
            walk(i, j + 1, cost + 1)

    walk(0, 0, 0)
    return best


# -- word_error_rate ------------------------------------------------------

def test_wer_identical_is_zero():
    assert qa.word_error_rate(["a", "b", "c"], ["a", "b", "c"]) == 0.0


def test_wer_worked_example_two_deletions():
    ref = ["the", "cat", "sat", "on", "the", "mat"]
    hyp = ["the", "cat", "sat", "mat"]
    assert oracle_edit_distance(ref, hyp) == 2
    assert qa.edit_distance(ref, hyp) == 2
    assert qa.word_error_rate(ref, hyp) == pytest.approx(2 / 6, abs=1e-12)


def test_wer_full_substitution():
    assert qa.word_error_rate(["a", "b", "c"], ["x", "y", "z"]) == 1.0


def test_wer_can_exceed_one():
    ref, hyp = ["a"], ["a", "b", "c"]
    assert oracle_edit_distance(ref, hyp) == 2
    assert qa.word_error_rate(ref, hyp) == 2.0


def test_wer_empty_reference_rejected():
    with pytest.raises(ServiceError) as exc:
        qa.word_error_rate([], ["a"])
    assert exc.value.code == "ERR_EMPTY_REFERENCE"


def test_wer_empty_hypothesis_deletes_everything():
    assert qa.word_error_rate(["a", "b"], []) == 1.0


def test_edit_distance_matches_oracle_randomized():
    rng = random.Random(20240610)
    alphabet = ["a", "b", "c"]
    for _ in range(300):
        ref = [rng.choice(alphabet) for _ in range(rng.randint(1, 8))]
        hyp = [rng.choice(alphabet) for _ in range(rng.randint(0, 8))]
        assert qa.edit_distance(ref, hyp) == oracle_edit_distance(ref, hyp)


@given(
    st.lists(st.sampled_from("abc"), min_size=1, max_size=8),
    st.lists(st.sampled_from("abc"), min_size=0, max_size=8),
)
@settings(max_examples=200)
def test_wer_bounds_property(ref, hyp):
    rate = qa.word_error_rate(ref, hyp)
    assert 0.0 <= rate <= (len(ref) + len(hyp)) / len(ref)


@given(st.lists(st.sampled_from("abc"), min_size=1, max_size=8))
def test_wer_self_is_zero(tokens):
    assert qa.word_error_rate(tokens, tokens) == 0.0


@given(
    st.integers(min_value=1, max_value=8).flatmap(
        lambda n: st.tuples(
            st.lists(st.sampled_from("abc"), min_size=n, max_size=n),
            st.lists(st.sampled_from("abc"), min_size=n, max_size=n),
        )
    )
)
def test_error_count_symmetric_for_equal_lengths(pair):
    ref, hyp = pair
    assert qa.edit_distance(ref, hyp) == qa.edit_distance(hyp, ref)


# -- tokenize -------------------------------------------------------------

def test_tokenize_collapses_whitespace_and_casefolds():
    assert qa.tokenize("The  cat") == ["the", "cat"]


def test_tokenize_empty():
    assert qa.tokenize("") == []


def test_tokenize_unicode_words_kept_whole():
    assert qa.tokenize("नमस्ते 😀") == ["नमस्ते", "😀"]


def test_tokenize_keeps_punctuation():
    assert qa.tokenize("stop. go!") == ["stop.", "go!"]


def test_tokenize_no_casefold():
    assert qa.tokenize("The Cat", casefold=False) == ["The", "Cat"]


def test_tokenize_splits_on_unicode_whitespace():
    # no-break space and ideographic space are whitespace too
    assert qa.tokenize("a b　c") == ["a", "b", "c"]


# -- plan_overlap ---------------------------------------------------------

def test_plan_overlap_twenty_percent_of_ten():
    plan = qa.plan_overlap(list(range(10)), ["ann1", "ann2"], 0.2)
    assert len(plan.shared) == 2
    assert len(plan.a_only) == 4
    assert len(plan.b_only) == 4


def test_plan_overlap_zero_fraction():
    plan = qa.plan_overlap(list(range(10)), ["u", "v"], 0.0)
    assert plan.shared == []
    assert len(plan.a_only) + len(plan.b_only) == 10


def test_plan_overlap_ceil_and_uneven_split():
    plan = qa.plan_overlap(list(range(7)), ["u", "v"], 0.2)
    assert len(plan.shared) == 2  # ceil(1.4)
    assert sorted([len(plan.a_only), len(plan.b_only)], reverse=True) == [3, 2]


def test_plan_overlap_full_fraction():
    plan = qa.plan_overlap(list(range(5)), ["u", "v"], 1.0)
    assert len(plan.shared) == 5
    assert plan.a_only == [] and plan.b_only == []


def test_plan_overlap_deterministic_for_seed():
    ids = list(range(20))
    p1 = qa.plan_overlap(ids, ["u", "v"], 0.3, seed=7)
    p2 = qa.plan_overlap(ids, ["u", "v"], 0.3, seed=7)
    assert (p1.shared, p1.a_only, p1.b_only) == (p2.shared, p2.a_only, p2.b_only)


def test_plan_overlap_bad_fraction():
    for p in (-0.1, 1.5):
        with pytest.raises(ServiceError) as exc:
            qa.plan_overlap([1, 2, 3], ["u", "v"], p)
        assert exc.value.code == "ERR_BAD_FRACTION"


def test_plan_overlap_empty_list_rejected():
    with pytest.raises(ValueError):
        qa.plan_overlap([], ["u", "v"], 0.2)


def test_plan_overlap_partition_exhaustive_small_cases():
    for n in range(1, 51):
        ids = list(range(n))
        for tenths in range(0, 11):
            p = tenths / 10
            plan = qa.plan_overlap(ids, ["u", "v"], p)
            parts = [plan.shared, plan.a_only, plan.b_only]
            combined = sorted(x for part in parts for x in part)
            assert combined == ids  # disjoint union is the input
            expected_shared = -((-tenths * n) // 10)  # ceil(p*n) in integers
            assert len(plan.shared) == expected_shared
            assert abs(len(plan.a_only) - len(plan.b_only)) <= 1


# -- assemble_transcript (store-backed) -----------------------------------

@pytest.fixture()
def seeded_db(tmp_path):
    db = Database(f"sqlite:///{tmp_path}/qa.db")
    clock = ManualClock()
    now = to_storage(clock())
    with db.session() as s:
        user = User(
            username="t1", credential_digest="x", role="annotator", created_at=now
        )
        project = Project(name="p", api_key="0" * 64, created_at=now)
        s.add_all([user, project])
        s.flush()
        dp = DataPoint(
            project_id=project.id,
            original_filename="a.wav",
            stored_name="ab" * 16 + ".wav",
            format="wav",
            duration_ms=60_000,
            created_at=now,
        )
        s.add(dp)
        s.flush()
        assignment = Assignment(
            datapoint_id=dp.id, user_id=user.id, updated_at=now
        )
        s.add(assignment)
        s.flush()
        ids = {"assignment": assignment.id}
    return db, ids, now


def _add_segments(db, assignment_id, rows, now):
    with db.session() as s:
        for start, end, text in rows:
            s.add(
                Segment(
                    assignment_id=assignment_id,
                    start_ms=start,
                    end_ms=end,
                    transcription=text,
                    created_at=now,
                    updated_at=now,
                )
            )


def test_assemble_orders_by_start(seeded_db):
    db, ids, now = seeded_db
    _add_segments(db, ids["assignment"], [(1000, 2000, "world"), (0, 1000, "hello")], now)
    assert qa.assemble_transcript(db, ids["assignment"]) == "hello world"


def test_assemble_skips_empty_transcriptions(seeded_db):
    db, ids, now = seeded_db
    _add_segments(db, ids["assignment"], [(0, 1000, ""), (1000, 2000, "ok")], now)
    assert qa.assemble_transcript(db, ids["assignment"]) == "ok"


def test_assemble_empty_assignment_is_empty_string(seeded_db):
    db, ids, _ = seeded_db
    assert qa.assemble_transcript(db, ids["assignment"]) == ""


def test_assemble_unknown_assignment(seeded_db):
    db, _, _ = seeded_db
    with pytest.raises(ServiceError) as exc:
        qa.assemble_transcript(db, 99_999)
    assert exc.value.code == "ERR_NOT_FOUND"


def test_assemble_invariant_under_insertion_order(seeded_db):
    db, ids, now = seeded_db
    rows = [(2000, 3000, "c"), (0, 500, "a"), (500, 2000, "b")]
    for perm in ([0, 1, 2], [2, 1, 0], [1, 2, 0]):
        with db.session() as s:
            s.query(Segment).delete()
        _add_segments(db, ids["assignment"], [rows[i] for i in perm], now)
        assert qa.assemble_transcript(db, ids["assignment"]) == "a b c"
