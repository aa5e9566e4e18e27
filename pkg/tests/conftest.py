import json
from pathlib import Path

import pytest

from mrcsplit.corpus import (
    CanonicalItem,
    Dataset,
    IngestInfo,
    QuestionStyle,
    load_canonical,
)

DATA = Path(__file__).parent / "data"
SYNTH = DATA / "synthetic"


def make_item(
    item_id,
    context,
    question,
    answers=(),
    options=(),
    correct=None,
    meta=None,
):
    return CanonicalItem(
        item_id=item_id,
        context_text=context,
        question_text=question,
        gold_answers=tuple(answers),
        options=tuple(options),
        correct_index=correct,
        meta=dict(meta or {}),
    )


def make_dataset(items, style=QuestionStyle.EXTRACTION, dataset_id="toy"):
    return Dataset(
        dataset_id=dataset_id,
        style=style,
        items=tuple(items),
        provenance=IngestInfo(source="memory", adapter="test", ingested_at=0),
    )


@pytest.fixture
def sony():
    return load_canonical(DATA / "sony_hack.jsonl")


@pytest.fixture
def synthetic():
    return load_canonical(SYNTH / "dataset.jsonl")


@pytest.fixture(scope="session")
def synthetic_expected():
    return json.loads((SYNTH / "expected.json").read_text())
