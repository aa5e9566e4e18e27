import csv
import io
import json
from fractions import Fraction

import pytest

from mrcsplit.annotate import label_distribution
from mrcsplit.corpus import QuestionStyle
from mrcsplit.errors import CoverageGap
from mrcsplit.heuristics import profile_dataset
from mrcsplit.predictions import EvaluationResult
from mrcsplit.report import (
    build_report,
    build_rows,
    dataset_stats,
    render_csv,
    render_jsonl,
    render_text,
    round2,
)
from mrcsplit.textproc import cached_sentences, tokenize

from test_annotate import rec


def test_round2_banker_rounding():
    assert round2(0.125) == "0.12"
    assert round2(0.135) == "0.14"
    assert round2(2.675) == "2.68"
    assert round2(0.005) == "0.00"
    assert round2(0.015) == "0.02"


def test_round2_types():
    assert round2(7) == "7"
    assert round2(50.0) == "50.00"
    assert round2(Fraction(1, 3)) == "0.33"
    assert round2(Fraction(1, 8)) == "0.12"
    assert round2(57.142857142857146) == "57.14"


def test_dataset_stats_against_direct_sums(synthetic):
    profiles = {p.item_id: p for p in profile_dataset(synthetic)}
    stats = dataset_stats(synthetic, profiles)
    n = len(synthetic.items)
    assert stats.n_questions == n
    assert stats.avg_context_tokens == pytest.approx(
        sum(len(tokenize(i.context_text)) for i in synthetic.items) / n
    )
    assert stats.avg_question_tokens == pytest.approx(
        sum(len(tokenize(i.question_text)) for i in synthetic.items) / n
    )
    assert stats.avg_context_sentences == pytest.approx(
        sum(len(cached_sentences(i.context_text)) for i in synthetic.items) / n
    )
    assert stats.pct_ans_in_sim == 55.0
    assert stats.pct_solved_k2 is None
    assert stats.hard_pct is None


def test_dataset_stats_requires_profile_coverage(synthetic):
    with pytest.raises(CoverageGap):
        dataset_stats(synthetic, {})


def fixture_inputs(synthetic):
    profiles = {p.item_id: p for p in profile_dataset(synthetic)}
    stats = dataset_stats(synthetic, profiles, solved_k2=0.35, hard_fraction=0.3)
    evaluations = [
        EvaluationResult(
            "synthetic40", "full", "scripted", QuestionStyle.EXTRACTION,
            {"s00": {"em": 1.0, "f1": 1.0}},
            {"em": 0.475, "f1": 0.4875},
        ),
        EvaluationResult(
            "synthetic40", "k2", "scripted", QuestionStyle.EXTRACTION,
            {"s00": {"em": 1.0, "f1": 1.0}},
            {"em": 0.35, "f1": 0.35},
        ),
    ]
    subset_result = {
        "easy": {"count": 28, "aggregates": {"em": 16 / 28, "f1": 16 / 28}},
        "hard": {"count": 12, "aggregates": {"em": 0.25, "f1": 0.25}},
    }
    records = [
        rec("t0", "valid", "word_matching", False),
        rec("t1", "unsolvable"),
        rec("t2", "valid", "knowledge", True, "causal"),
    ]
    distribution = label_distribution(
        records, {"t0": "easy", "t1": "easy", "t2": "hard"}
    )
    correlations = [
        {"label": "validity:valid", "n": 3, "r": 0.5, "p": 0.25},
        {"label": "skill:math_logic", "n": 2, "r": None, "p": None, "note": "constant"},
    ]
    return stats, evaluations, subset_result, distribution, correlations


def test_row_order_and_keys(synthetic):
    stats, evaluations, subset_result, distribution, correlations = fixture_inputs(synthetic)
    rows = build_rows(stats, evaluations, subset_result, distribution, correlations)
    sections = [r.section for r in rows]
    assert sections == sorted(sections, key=["stats", "scores", "subsets", "annotation", "correlation"].index)
    keys = [r.row for r in rows if r.section == "scores"]
    # full sorts before k2 regardless of dict insertion order
    assert keys == ["full:scripted:em", "full:scripted:f1", "k2:scripted:em", "k2:scripted:f1"]
    stats_rows = {r.row: r.display for r in rows if r.section == "stats"}
    assert stats_rows["n_questions"] == "40"
    assert stats_rows["pct_ans_in_sim"] == "55.00"
    assert stats_rows["pct_solved_k2"] == "35.00"


def test_scores_are_percentages(synthetic):
    stats, evaluations, *_ = fixture_inputs(synthetic)
    rows = build_rows(stats, evaluations)
    by_key = {r.row: r for r in rows}
    assert by_key["full:scripted:em"].display == "47.50"
    assert by_key["k2:scripted:em"].display == "35.00"


def test_empty_subset_renders_na(synthetic):
    stats, *_ = fixture_inputs(synthetic)
    subset_result = {
        "easy": {"count": 3, "aggregates": {"em": 1.0, "f1": 1.0}},
        "hard": {"count": 0, "aggregates": None},
    }
    rows = build_rows(stats, subset_result=subset_result)
    by_key = {r.row: r for r in rows}
    assert by_key["hard:count"].display == "0"
    assert by_key["hard:aggregate"].display == "n/a (0 items)"
    assert by_key["hard:aggregate"].value is None


def test_cross_format_values_identical(synthetic):
    report = build_report(
        *fixture_inputs(synthetic)[:1],
        {"tool": "mrcsplit", "created_at": 0},
        *fixture_inputs(synthetic)[1:],
    )
    jsonl_lines = report["jsonl"].strip().split("\n")
    assert "_provenance" in jsonl_lines[0]
    structured = [json.loads(line) for line in jsonl_lines[1:]]

    csv_body = [
        line for line in report["csv"].splitlines() if not line.startswith("#")
    ]
    parsed = list(csv.DictReader(io.StringIO("\n".join(csv_body))))
    assert len(parsed) == len(structured)
    for csv_row, json_row in zip(parsed, structured):
        assert csv_row["section"] == json_row["section"]
        assert csv_row["row"] == json_row["row"]
        if json_row["value"] is None:
            assert csv_row["value"] == ""
        else:
            assert float(csv_row["value"]) == float(json_row["value"])
        assert csv_row["display"] == json_row["display"]

    # every display string shows up verbatim in the text rendering
    for json_row in structured:
        assert json_row["display"] in report["text"]


def test_render_deterministic(synthetic):
    inputs = fixture_inputs(synthetic)
    provenance = {"tool": "mrcsplit", "created_at": 0, "stopword_sha256": "abc"}
    first = build_report(inputs[0], provenance, *inputs[1:])
    second = build_report(inputs[0], provenance, *inputs[1:])
    assert first == second


def test_provenance_renders_in_all_formats(synthetic):
    stats, *_ = fixture_inputs(synthetic)
    rows = build_rows(stats)
    provenance = {"created_at": 0, "tool": "mrcsplit"}
    assert "# created_at = 0" in render_text(rows, provenance)
    assert render_csv(rows, provenance).startswith("# created_at = 0\n# tool = mrcsplit\n")
    first = json.loads(render_jsonl(rows, provenance).split("\n", 1)[0])
    assert first == {"_provenance": {"created_at": 0, "tool": "mrcsplit"}}
