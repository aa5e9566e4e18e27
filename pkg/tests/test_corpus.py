import json

import pytest

from mrcsplit.corpus import (
    QuestionStyle,
    export_dataset,
    ingest_extraction,
    ingest_multiple_choice,
    item_flags,
    item_to_record,
    load_canonical,
    record_to_item,
    validate,
)
from mrcsplit.errors import EmptyDataset, MalformedFile, SchemaViolation

from conftest import make_dataset, make_item


def squad_payload():
    return {
        "version": "1.1",
        "data": [
            {
                "title": "Sony",
                "paragraphs": [
                    {
                        "context": "Hackers got in. They stole data.",
                        "qas": [
                            {
                                "id": "q1",
                                "question": "Who got in?",
                                "answers": [
                                    {"text": "Hackers", "answer_start": 0},
                                    {"text": "Hackers", "answer_start": 0},
                                ],
                            },
                            {
                                "id": "q2",
                                "question": "What was stolen?",
                                "answers": [{"text": "data", "answer_start": 27}],
                            },
                        ],
                    }
                ],
            }
        ],
    }


def test_squad_ingest_maps_fields(tmp_path):
    src = tmp_path / "dev.json"
    src.write_text(json.dumps(squad_payload()))
    ds = ingest_extraction(src, "squad_json", dataset_id="mini", epoch=0)
    assert ds.dataset_id == "mini"
    assert ds.style is QuestionStyle.EXTRACTION
    assert [i.item_id for i in ds.items] == ["q1", "q2"]
    assert ds.items[0].gold_answers == ("Hackers", "Hackers")
    assert ds.items[0].meta == {"title": "Sony"}
    assert ds.items[1].context_text == "Hackers got in. They stole data."
    assert ds.provenance.adapter == "squad_json"
    assert ds.provenance.ingested_at == 0


def test_squad_ingest_rejects_answerless_by_default(tmp_path):
    payload = squad_payload()
    payload["data"][0]["paragraphs"][0]["qas"][0]["answers"] = []
    src = tmp_path / "dev.json"
    src.write_text(json.dumps(payload))
    with pytest.raises(SchemaViolation):
        ingest_extraction(src, "squad_json", epoch=0)
    ds = ingest_extraction(src, "squad_json", drop_empty_answers=True, epoch=0)
    assert [i.item_id for i in ds.items] == ["q2"]


def test_squad_ingest_empty_file_errors(tmp_path):
    src = tmp_path / "dev.json"
    src.write_text(json.dumps({"data": []}))
    with pytest.raises(EmptyDataset):
        ingest_extraction(src, "squad_json", epoch=0)
    src.write_text("{not json")
    with pytest.raises(MalformedFile):
        ingest_extraction(src, "squad_json", epoch=0)


def test_ingest_preserves_order_and_text(tmp_path):
    # ids deliberately out of sorted order; text carries odd spacing that
    # must survive untouched
    payload = squad_payload()
    qas = payload["data"][0]["paragraphs"][0]["qas"]
    qas[0]["id"], qas[1]["id"] = "zz", "aa"
    payload["data"][0]["paragraphs"][0]["context"] = "Two  spaces.  Kept."
    src = tmp_path / "dev.json"
    src.write_text(json.dumps(payload))
    ds = ingest_extraction(src, "squad_json", epoch=0)
    assert [i.item_id for i in ds.items] == ["zz", "aa"]
    assert ds.items[0].context_text == "Two  spaces.  Kept."


def test_round_trip_extraction(tmp_path, sony):
    out = tmp_path / "copy.jsonl"
    export_dataset(sony, out, header={"dataset_id": sony.dataset_id, "created_at": 0})
    again = load_canonical(out)
    assert again.dataset_id == sony.dataset_id
    assert again.style is sony.style
    assert again.items == sony.items


def test_round_trip_multiple_choice(tmp_path):
    item = make_item(
        "m1",
        "The sky is blue. The grass is green.",
        "What color is the sky?",
        options=("blue", "green", "red"),
        correct=0,
        meta={"variant": "full"},
    )
    ds = make_dataset([item], style=QuestionStyle.MULTIPLE_CHOICE, dataset_id="mc")
    out = tmp_path / "mc.jsonl"
    export_dataset(ds, out, header={"dataset_id": "mc", "created_at": 0})
    again = load_canonical(out)
    assert again.style is QuestionStyle.MULTIPLE_CHOICE
    assert again.items == ds.items


def test_record_round_trip_keeps_extra_fields():
    record = {
        "id": "x1",
        "style": "extraction",
        "context": "Some context.",
        "question": "Some question?",
        "answers": ["context"],
        "source_row": 17,
    }
    item = record_to_item(dict(record), QuestionStyle.EXTRACTION, "line 1")
    assert item.extra_fields == {"source_row": 17}
    assert item_to_record(item, QuestionStyle.EXTRACTION)["source_row"] == 17
    with pytest.raises(SchemaViolation):
        record_to_item(dict(record), QuestionStyle.EXTRACTION, "line 1", strict=True)


def test_record_to_item_style_checks():
    base = {
        "id": "x",
        "style": "extraction",
        "context": "c",
        "question": "q",
        "answers": ["c"],
    }
    with pytest.raises(SchemaViolation):
        record_to_item({**base, "style": "multiple_choice"}, QuestionStyle.EXTRACTION, "l")
    with pytest.raises(SchemaViolation):
        record_to_item({**base, "options": ["a", "b"]}, QuestionStyle.EXTRACTION, "l")
    with pytest.raises(SchemaViolation):
        record_to_item({**base, "answers": "c"}, QuestionStyle.EXTRACTION, "l")


def test_mc_record_constraints():
    base = {
        "id": "m",
        "style": "multiple_choice",
        "context": "c",
        "question": "q",
        "options": ["yes", "no"],
        "correct": 0,
    }
    assert record_to_item(dict(base), QuestionStyle.MULTIPLE_CHOICE, "l").correct_index == 0
    with pytest.raises(SchemaViolation):
        record_to_item({**base, "correct": 2}, QuestionStyle.MULTIPLE_CHOICE, "l")
    with pytest.raises(SchemaViolation):
        record_to_item({**base, "options": ["yes"]}, QuestionStyle.MULTIPLE_CHOICE, "l")
    with pytest.raises(SchemaViolation):
        # "Yes" and "yes" collide after answer normalization
        record_to_item({**base, "options": ["yes", "Yes."]}, QuestionStyle.MULTIPLE_CHOICE, "l")
    with pytest.raises(SchemaViolation):
        record_to_item({**base, "answers": ["yes"]}, QuestionStyle.MULTIPLE_CHOICE, "l")


def test_item_flags_gold_not_in_context():
    bad = make_item("b", "The answer is here.", "Where?", answers=("absent",))
    good = make_item("g", "The answer is here.", "Where?", answers=("here",))
    assert item_flags(bad, QuestionStyle.EXTRACTION) == ("gold_not_in_context",)
    assert item_flags(good, QuestionStyle.EXTRACTION) == ()


def test_validate_clean_dataset(sony):
    report = validate(sony)
    assert report.ok
    assert not report.has_errors


def test_validate_duplicate_ids():
    item = make_item("dup", "Context here.", "Q?", answers=("here",))
    report = validate(make_dataset([item, item]))
    assert report.has_errors
    assert [i.code for i in report] == ["duplicate_item_id"]
    assert report.issues[0].positions == (0, 1)


def test_validate_warns_on_gold_not_in_context():
    item = make_item("w", "Context here.", "Q?", answers=("elsewhere",))
    report = validate(make_dataset([item]))
    assert not report.ok
    assert not report.has_errors
    assert [i.code for i in report] == ["gold_not_in_context"]


def test_validate_mc_issues():
    item = make_item("m", "c", "q", options=("one",), correct=3)
    report = validate(make_dataset([item], style=QuestionStyle.MULTIPLE_CHOICE))
    codes = {i.code for i in report}
    assert codes == {"too_few_options", "bad_correct_index"}


def test_load_canonical_requires_header_id(tmp_path, sony):
    # a canonical file without a provenance header still loads, with the
    # dataset id derived from the file name
    lines = [
        json.dumps(item_to_record(item, sony.style) | {"style": "extraction"})
        for item in sony.items
    ]
    bare = tmp_path / "bare.jsonl"
    bare.write_text("\n".join(lines) + "\n")
    ds = load_canonical(bare)
    assert ds.dataset_id == "bare"
    assert len(ds) == 1
