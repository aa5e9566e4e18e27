"""Loading and scoring externally produced model predictions.

Models are trained and run elsewhere; they exchange predictions with
this tool through a flat id-to-answer map (the SQuAD convention) plus a
small header naming the dataset, variant, and system. Alignment is by
bit-exact item id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import provenance as prov
from .corpus import Dataset, QuestionStyle
from .errors import (
    KindMismatch,
    MalformedFile,
    MissingPredictions,
    UnknownItemIds,
    VariantMismatch,
)
from .heuristics import VARIANTS
from .metrics import DEFAULT_BETA, score_item

METRICS_BY_STYLE = {
    QuestionStyle.EXTRACTION: ("em", "f1"),
    QuestionStyle.DESCRIPTION: ("rouge_l",),
    QuestionStyle.MULTIPLE_CHOICE: ("accuracy",),
}


@dataclass(frozen=True)
class PredictionSet:
    dataset_id: str
    variant: str  # one of VARIANTS
    system_name: str
    answers: dict  # item_id -> str or option index
    missing: tuple[str, ...] = ()  # dataset ids with no prediction


@dataclass(frozen=True)
class EvaluationResult:
    dataset_id: str
    variant: str
    system_name: str
    style: QuestionStyle
    per_item: dict  # item_id -> {metric: fraction in [0, 1]}
    aggregates: dict = field(default_factory=dict)  # metric -> mean fraction
    missing: tuple[str, ...] = ()


def dataset_variant(dataset: Dataset) -> str:
    """The variant tag shared by every item (absent meta means `full`)."""
    tags = {item.meta.get("variant", "full") for item in dataset.items}
    if len(tags) > 1:
        raise VariantMismatch(f"dataset mixes variants {sorted(tags)}")
    return next(iter(tags)) if tags else "full"


def load_predictions(
    path,
    dataset: Dataset,
    expected_variant: str | None = None,
    strict: bool = False,
) -> PredictionSet:
    """Parse a prediction file and align it with the dataset.

    Unknown ids are always an error. Missing ids are recorded and later
    scored 0, unless strict mode is on.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFile(f"{path}: {exc}") from exc
    if not isinstance(payload, dict) or "predictions" not in payload:
        raise MalformedFile(f"{path}: expected an object with a 'predictions' map")
    header = payload.get("header")
    if not isinstance(header, dict):
        raise MalformedFile(f"{path}: missing 'header' object")
    answers = payload["predictions"]
    if not isinstance(answers, dict):
        raise MalformedFile(f"{path}: 'predictions' must map item ids to answers")

    variant = header.get("variant", "full")
    if variant not in VARIANTS:
        raise MalformedFile(f"{path}: unknown variant {variant!r}")
    if expected_variant is not None and variant != expected_variant:
        raise VariantMismatch(
            f"{path}: prediction file is for variant {variant!r}, "
            f"expected {expected_variant!r}"
        )
    header_dataset = header.get("dataset_id")
    if header_dataset is not None and header_dataset != dataset.dataset_id:
        raise VariantMismatch(
            f"{path}: prediction file is for dataset {header_dataset!r}, "
            f"not {dataset.dataset_id!r}"
        )

    known = dataset.item_map()
    unknown = sorted(set(answers) - set(known))
    if unknown:
        raise UnknownItemIds(unknown)
    want_index = dataset.style is QuestionStyle.MULTIPLE_CHOICE
    for item_id, value in answers.items():
        if want_index:
            if isinstance(value, bool) or not isinstance(value, int):
                raise KindMismatch(
                    f"prediction for {item_id!r} must be an option index"
                )
        elif not isinstance(value, str):
            raise KindMismatch(f"prediction for {item_id!r} must be a string")

    missing = tuple(item.item_id for item in dataset.items if item.item_id not in answers)
    if missing and strict:
        raise MissingPredictions(list(missing))
    return PredictionSet(
        dataset_id=dataset.dataset_id,
        variant=variant,
        system_name=str(header.get("system", "unknown")),
        answers=dict(answers),
        missing=missing,
    )


def evaluate(
    dataset: Dataset,
    preds: PredictionSet,
    beta: float = DEFAULT_BETA,
) -> EvaluationResult:
    """Score every dataset item; absent predictions count as 0 on every
    metric. Aggregates are plain arithmetic means over all items."""
    if preds.variant != dataset_variant(dataset):
        raise VariantMismatch(
            f"predictions carry variant {preds.variant!r} but the dataset "
            f"is variant {dataset_variant(dataset)!r}"
        )
    metrics = METRICS_BY_STYLE[dataset.style]
    per_item = {}
    for item in dataset.items:
        if item.item_id in preds.answers:
            scores = score_item(item, preds.answers[item.item_id], dataset.style, beta)
        else:
            scores = {metric: 0.0 for metric in metrics}
        per_item[item.item_id] = scores
    n = len(dataset.items)
    aggregates = {
        metric: sum(scores[metric] for scores in per_item.values()) / n
        for metric in metrics
    }
    return EvaluationResult(
        dataset_id=dataset.dataset_id,
        variant=preds.variant,
        system_name=preds.system_name,
        style=dataset.style,
        per_item=per_item,
        aggregates=aggregates,
        missing=preds.missing,
    )


def write_scores(path, evaluation: EvaluationResult, header: dict) -> None:
    """Per-item score file: provenance line, then one {id, metric...}
    record per dataset item in dataset order."""
    full_header = dict(header)
    full_header.update(
        dataset_id=evaluation.dataset_id,
        variant=evaluation.variant,
        system=evaluation.system_name,
        style=evaluation.style.value,
        missing=len(evaluation.missing),
    )
    prov.write_jsonl(
        path,
        ({"id": item_id, **scores} for item_id, scores in evaluation.per_item.items()),
        provenance=full_header,
    )


def read_scores(path) -> tuple[dict, EvaluationResult]:
    """Inverse of write_scores; aggregates are recomputed from the rows."""
    header, records = prov.read_jsonl(path)
    if header is None or "style" not in header:
        raise MalformedFile(f"{path}: score file lacks a provenance header with style")
    per_item = {}
    for record in records:
        item_id = record.pop("id", None)
        if item_id is None:
            raise MalformedFile(f"{path}: score record without an id")
        per_item[item_id] = {k: float(v) for k, v in record.items()}
    if not per_item:
        raise MalformedFile(f"{path}: score file has no records")
    metrics = next(iter(per_item.values())).keys()
    n = len(per_item)
    aggregates = {
        metric: sum(scores[metric] for scores in per_item.values()) / n
        for metric in metrics
    }
    evaluation = EvaluationResult(
        dataset_id=str(header.get("dataset_id", "unknown")),
        variant=str(header.get("variant", "full")),
        system_name=str(header.get("system", "unknown")),
        style=QuestionStyle.from_tag(header["style"]),
        per_item=per_item,
        aggregates=aggregates,
    )
    return header, evaluation
