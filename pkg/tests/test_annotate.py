import json

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from mrcsplit.annotate import (
    RELATION_LABELS,
    SKILL_LABELS,
    VALIDITY_LABELS,
    AnnotationRecord,
    AnnotationTask,
    correlate_labels,
    label_distribution,
    pearson_r,
    sample_for_annotation,
    validate_record,
)
from mrcsplit.corpus import QuestionStyle
from mrcsplit.errors import (
    DegenerateVector,
    EmptyRecords,
    LengthMismatch,
    SubsetTooSmall,
    UnknownTaskId,
)
from mrcsplit.partition import SubsetAssignment

from conftest import DATA, make_dataset, make_item


def load_fixture_records(name):
    out = []
    for line in (DATA / name).read_text().splitlines():
        wrapper = json.loads(line)
        out.append((wrapper["record"], wrapper["reason"]))
    return out


def test_fixture_valid_records_all_pass():
    rows = load_fixture_records("annotation_records_valid.jsonl")
    assert len(rows) == 20
    for record, reason in rows:
        assert validate_record(record) == [], reason


def test_fixture_invalid_records_all_fail():
    rows = load_fixture_records("annotation_records_invalid.jsonl")
    assert len(rows) == 20
    for record, reason in rows:
        assert validate_record(record), reason


def test_validate_record_rejects_non_dict():
    assert validate_record("nope") == ["record must be an object"]


def test_record_round_trip():
    body = {
        "task_id": "t1",
        "annotator_id": "a1",
        "timestamp": "2026-08-20T12:00:00Z",
        "validity": "valid",
        "skill": "knowledge",
        "multi_sentence": True,
        "relation": "none",
    }
    record = AnnotationRecord.from_record(body)
    assert record.to_record() == body
    with pytest.raises(ValueError):
        AnnotationRecord.from_record({**body, "skill": None})


def test_minimal_record_omits_unset_fields():
    record = AnnotationRecord("t", "a", "now", "unsolvable")
    assert record.to_record() == {
        "task_id": "t",
        "annotator_id": "a",
        "timestamp": "now",
        "validity": "unsolvable",
    }


# ---------------------------------------------------------------------------
# stratified sampling and blinding


def sample_inputs(n_items=20):
    items = [
        make_item(
            f"i{k:02d}",
            f"The specimen {k} was found in {1900 + k}. It is kept elsewhere.",
            f"When was specimen {k} found?",
            answers=(str(1900 + k),),
        )
        for k in range(n_items)
    ]
    dataset = make_dataset(items, dataset_id="samp")
    assignments = [
        SubsetAssignment(
            item_id=f"i{k:02d}",
            subset="easy" if k < n_items // 2 else "hard",
            k2_score=1.0 if k < n_items // 2 else 0.0,
            answer_in_most_similar=k < n_items // 2,
            zero_overlap=False,
        )
        for k in range(n_items)
    ]
    return assignments, dataset


def test_sampling_is_deterministic_and_stratified():
    assignments, dataset = sample_inputs()
    tasks1, hidden1 = sample_for_annotation(assignments, dataset, 5, seed=11)
    tasks2, hidden2 = sample_for_annotation(assignments, dataset, 5, seed=11)
    assert [t.task_id for t in tasks1] == [t.task_id for t in tasks2]
    assert hidden1 == hidden2
    assert len(tasks1) == 10
    subsets = [hidden1[t.task_id]["subset"] for t in tasks1]
    assert subsets.count("easy") == 5 and subsets.count("hard") == 5
    # shuffled together, not easy-block then hard-block
    tasks3, _ = sample_for_annotation(assignments, dataset, 5, seed=12)
    assert [t.task_id for t in tasks1] != [t.task_id for t in tasks3]


def test_sampling_rejects_small_subsets():
    assignments, dataset = sample_inputs()
    with pytest.raises(SubsetTooSmall):
        sample_for_annotation(assignments, dataset, 11, seed=1)


def test_task_payload_is_blinded():
    assignments, dataset = sample_inputs()
    tasks, hidden = sample_for_annotation(assignments, dataset, 5, seed=3)
    item_ids = {a.item_id for a in assignments}
    for task in tasks:
        payload = task.payload()
        assert set(payload) == {"task_id", "style", "context", "question", "golds"}
        blob = json.dumps(payload)
        assert "subset" not in blob
        assert "k2_score" not in blob
        assert not any(item_id in blob for item_id in item_ids)
    # the hidden join, kept separately, carries exactly the blinded fields
    for join in hidden.values():
        assert set(join) == {"item_id", "subset", "k2_score"}


def test_mc_task_carries_correct_option_as_gold():
    items = [
        make_item(
            f"m{k}",
            "The sky is blue. Grass is green.",
            f"Question {k}?",
            options=("blue", "green"),
            correct=k % 2,
        )
        for k in range(4)
    ]
    dataset = make_dataset(items, style=QuestionStyle.MULTIPLE_CHOICE, dataset_id="mc")
    assignments = [
        SubsetAssignment(f"m{k}", "easy" if k < 2 else "hard", float(k < 2), k < 2, False)
        for k in range(4)
    ]
    tasks, hidden = sample_for_annotation(assignments, dataset, 2, seed=5)
    for task in tasks:
        assert task.golds == (task.options[task.correct_index],)
        payload = task.payload()
        assert payload["options"] == list(task.options)
        assert AnnotationTask.from_payload(payload) == task


# ---------------------------------------------------------------------------
# label distributions


def rec(task_id, validity, skill=None, multi=None, relation=None):
    return AnnotationRecord(task_id, "a1", "2026-08-20T00:00:00Z", validity, skill, multi, relation)


def test_label_distribution_hand_case():
    records = [
        rec("e1", "valid", "word_matching", False),
        rec("e2", "valid", "knowledge", True, "coreference"),
        rec("e3", "unsolvable"),
        rec("e4", "ambiguous"),
        rec("h1", "unsolvable"),
    ]
    subsets = {"e1": "easy", "e2": "easy", "e3": "easy", "e4": "easy", "h1": "hard"}
    table = label_distribution(records, subsets)

    easy = table["easy"]
    assert (easy["n"], easy["n_valid"], easy["n_multi"]) == (4, 2, 1)
    assert easy["validity"] == {
        "unsolvable": 25.0,
        "single_candidate": 0.0,
        "ambiguous": 25.0,
        "valid": 50.0,
    }
    assert easy["skill"]["word_matching"] == 50.0
    assert easy["skill"]["knowledge"] == 50.0
    assert easy["multi_sentence"] == 50.0
    assert easy["relation_over_valid"]["coreference"] == 50.0
    assert easy["relation_over_multi"]["coreference"] == 100.0

    hard = table["hard"]
    assert hard["n"] == 1 and hard["n_valid"] == 0
    assert all(v is None for v in hard["skill"].values())
    assert hard["multi_sentence"] is None
    assert all(v is None for v in hard["relation_over_multi"].values())


def test_label_distribution_guards():
    with pytest.raises(EmptyRecords):
        label_distribution([], {})
    with pytest.raises(UnknownTaskId):
        label_distribution([rec("ghost", "valid", "knowledge", False)], {})


record_strategy = st.builds(
    lambda v, s, m, r: (v, s, m, r),
    st.sampled_from(VALIDITY_LABELS),
    st.sampled_from(SKILL_LABELS),
    st.booleans(),
    st.sampled_from(RELATION_LABELS),
)


@settings(max_examples=40)
@given(st.lists(record_strategy, min_size=1, max_size=25), st.data())
def test_validity_rows_sum_to_100(prototypes, data):
    records = []
    subsets = {}
    for i, (validity, skill, multi, relation) in enumerate(prototypes):
        task_id = f"t{i}"
        if validity == "valid":
            records.append(rec(task_id, validity, skill, multi, relation if multi else None))
        else:
            records.append(rec(task_id, validity))
        subsets[task_id] = data.draw(st.sampled_from(["easy", "hard"]))
    table = label_distribution(records, subsets)
    for subset in ("easy", "hard"):
        block = table[subset]
        if block["n"] == 0:
            continue
        assert sum(block["validity"].values()) == pytest.approx(100.0, abs=0.1)


# ---------------------------------------------------------------------------
# correlation


def test_pearson_identical_vectors():
    xs = [0.1, 0.5, 0.9, 0.2, 0.7]
    result = pearson_r(xs, xs)
    assert result.r == 1.0
    assert result.p == 0.0
    assert result.n == 5


def test_pearson_sign_flip_is_exact():
    xs = [1.0, 0.0, 1.0, 0.0, 1.0, 1.0]
    ys = [0.9, 0.1, 0.8, 0.4, 0.6, 0.7]
    plain = pearson_r(xs, ys)
    flipped = pearson_r(xs, [-v for v in ys])
    assert flipped.r == -plain.r
    assert flipped.p == plain.p


def test_pearson_affine_invariance():
    xs = [1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]
    ys = [0.9, 0.1, 0.8, 0.4, 0.6, 0.7, 0.2]
    base = pearson_r(xs, ys)
    scaled = pearson_r(xs, [2.5 * v + 3.0 for v in ys])
    assert scaled.r == pytest.approx(base.r, rel=1e-12)
    assert scaled.p == pytest.approx(base.p, rel=1e-9)


def test_pearson_analytic_matches_scipy():
    rng = np.random.default_rng(42)
    for _ in range(20):
        xs = rng.random(12)
        ys = rng.random(12)
        ours = pearson_r(xs, ys)
        reference = scipy.stats.pearsonr(xs, ys)
        assert ours.r == pytest.approx(reference.statistic, rel=1e-12)
        assert ours.p == pytest.approx(reference.pvalue, rel=1e-9)


def test_pearson_permutation_deterministic_and_bounded():
    rng = np.random.default_rng(0)
    xs, ys = rng.random(30), rng.random(30)
    a = pearson_r(xs, ys, method="permutation", permutations=2000, seed=9)
    b = pearson_r(xs, ys, method="permutation", permutations=2000, seed=9)
    assert a == b
    assert 1 / 2001 <= a.p <= 1.0
    c = pearson_r(xs, ys, method="permutation", permutations=2000, seed=10)
    assert c.method == "permutation"


def test_pearson_guards():
    with pytest.raises(DegenerateVector):
        pearson_r([1.0, 1.0, 1.0], [0.1, 0.2, 0.3])
    with pytest.raises(LengthMismatch):
        pearson_r([1.0, 2.0], [0.1, 0.2])
    with pytest.raises(LengthMismatch):
        pearson_r([1.0, 2.0, 3.0], [0.1, 0.2])
    with pytest.raises(ValueError):
        pearson_r([1.0, 2.0, 3.0], [0.1, 0.2, 0.3], method="bootstrap")


def correlation_fixture():
    records = []
    hidden = {}
    item_scores = {}
    # valid items score high, unsolvable items score low; knowledge shows
    # up only once so some labels stay informative and none degenerate
    plan = [
        ("valid", "word_matching", False, None, 0.9),
        ("valid", "word_matching", False, None, 0.8),
        ("valid", "knowledge", True, "coreference", 0.7),
        ("valid", "paraphrasing", True, "none", 0.6),
        ("unsolvable", None, None, None, 0.1),
        ("ambiguous", None, None, None, 0.2),
        ("single_candidate", None, None, None, 0.3),
    ]
    for i, (validity, skill, multi, relation, score) in enumerate(plan):
        task_id = f"t{i}"
        records.append(rec(task_id, validity, skill, multi, relation))
        hidden[task_id] = {"item_id": f"i{i}", "subset": "easy", "k2_score": 1.0}
        item_scores[f"i{i}"] = score
    return records, hidden, item_scores


def test_correlate_labels_row_structure():
    records, hidden, item_scores = correlation_fixture()
    rows = correlate_labels(records, hidden, item_scores)
    labels = [row["label"] for row in rows]
    assert labels == (
        [f"validity:{v}" for v in VALIDITY_LABELS]
        + [f"skill:{s}" for s in SKILL_LABELS]
        + ["multi_sentence"]
        + [f"relation:{r}" for r in RELATION_LABELS]
    )
    by_label = {row["label"]: row for row in rows}
    assert by_label["validity:valid"]["n"] == 7
    assert by_label["validity:valid"]["r"] > 0.8
    assert by_label["skill:word_matching"]["n"] == 4
    # no annotator used math_logic, so its indicator is constant
    assert by_label["skill:math_logic"]["r"] is None
    assert "note" in by_label["skill:math_logic"]


def test_correlate_labels_validity_indicator_value():
    records, hidden, item_scores = correlation_fixture()
    rows = {row["label"]: row for row in correlate_labels(records, hidden, item_scores)}
    flags = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    scores = [0.9, 0.8, 0.7, 0.6, 0.1, 0.2, 0.3]
    expected = pearson_r(flags, scores)
    assert rows["validity:valid"]["r"] == expected.r
    assert rows["validity:valid"]["p"] == expected.p


def test_correlate_labels_guards():
    records, hidden, item_scores = correlation_fixture()
    with pytest.raises(EmptyRecords):
        correlate_labels([], hidden, item_scores)
    with pytest.raises(UnknownTaskId):
        correlate_labels(records, {}, item_scores)
    with pytest.raises(UnknownTaskId):
        correlate_labels(records, hidden, {})
