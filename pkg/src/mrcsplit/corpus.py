"""Dataset ingestion into one canonical, validated record format.

Two adapters exist: SQuAD-style nested JSON and the canonical line-record
format (one JSON object per line with fields id/style/context/question/
answers or options+correct/meta). Everything else is expected to be
converted to canonical form by user-owned scripts. Ingest never rewrites
text: context and question strings are byte-equal to the source.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field

from .errors import EmptyDataset, MalformedFile, SchemaViolation, WrongStyle
from .textproc import normalize_answer
from . import provenance as prov


class QuestionStyle(enum.Enum):
    EXTRACTION = "extraction"
    DESCRIPTION = "description"
    MULTIPLE_CHOICE = "multiple_choice"

    @classmethod
    def from_tag(cls, tag: str) -> "QuestionStyle":
        for style in cls:
            if style.value == tag:
                return style
        raise SchemaViolation(f"unknown style {tag!r}")


_CANONICAL_FIELDS = {"id", "style", "context", "question", "answers", "options", "correct", "meta"}


@dataclass(frozen=True)
class CanonicalItem:
    item_id: str
    context_text: str
    question_text: str
    gold_answers: tuple[str, ...] = ()
    options: tuple[str, ...] = ()
    correct_index: int | None = None
    meta: dict = field(default_factory=dict)
    extra_fields: dict = field(default_factory=dict)


@dataclass(frozen=True)
class IngestInfo:
    source: str
    adapter: str
    ingested_at: int


@dataclass(frozen=True)
class Dataset:
    dataset_id: str
    style: QuestionStyle
    items: tuple[CanonicalItem, ...]
    provenance: IngestInfo

    def item_map(self) -> dict[str, CanonicalItem]:
        return {item.item_id: item for item in self.items}

    def __len__(self) -> int:
        return len(self.items)


def item_flags(item: CanonicalItem, style: QuestionStyle) -> tuple[str, ...]:
    """Derived per-item flags; gold_not_in_context marks extraction items
    where some gold answer is not a verbatim (case-sensitive) substring of
    the context. Such items are kept visible, never dropped."""
    if (
        style is QuestionStyle.EXTRACTION
        and item.gold_answers
        and any(gold not in item.context_text for gold in item.gold_answers)
    ):
        return ("gold_not_in_context",)
    return ()


# ---------------------------------------------------------------------------
# canonical line-record format


def item_to_record(item: CanonicalItem, style: QuestionStyle) -> dict:
    record: dict = {
        "id": item.item_id,
        "style": style.value,
        "context": item.context_text,
        "question": item.question_text,
    }
    if style is QuestionStyle.MULTIPLE_CHOICE:
        record["options"] = list(item.options)
        record["correct"] = item.correct_index
    else:
        record["answers"] = list(item.gold_answers)
    if item.meta:
        record["meta"] = dict(item.meta)
    record.update(item.extra_fields)
    return record


def _require(record: dict, key: str, kind, where: str):
    if key not in record:
        raise SchemaViolation(f"missing field {key!r}", path=where)
    value = record[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaViolation(f"field {key!r} must be {kind.__name__}", path=where)
    return value


def _parse_meta(record: dict, where: str) -> dict:
    meta = record.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaViolation("field 'meta' must be an object", path=where)
    for key, value in meta.items():
        if not isinstance(key, str) or not isinstance(value, str):
            raise SchemaViolation("meta entries must map string to string", path=where)
    return dict(meta)


def record_to_item(record: dict, style: QuestionStyle, where: str, strict: bool = False) -> CanonicalItem:
    item_id = _require(record, "id", str, where)
    context = _require(record, "context", str, where)
    question = _require(record, "question", str, where)
    tag = _require(record, "style", str, where)
    if QuestionStyle.from_tag(tag) is not style:
        raise SchemaViolation(f"record style {tag!r} does not match dataset style {style.value!r}", path=where)
    meta = _parse_meta(record, where)
    extras = {k: v for k, v in record.items() if k not in _CANONICAL_FIELDS}
    if extras and strict:
        raise SchemaViolation(f"unknown fields under --strict: {sorted(extras)}", path=where)

    if style is QuestionStyle.MULTIPLE_CHOICE:
        if "answers" in record:
            raise SchemaViolation("field 'answers' not allowed for multiple_choice", path=where)
        options = _require(record, "options", list, where)
        if not all(isinstance(opt, str) for opt in options):
            raise SchemaViolation("options must be strings", path=where)
        if len(options) < 2:
            raise SchemaViolation("multiple_choice needs at least 2 options", path=where)
        correct = _require(record, "correct", int, where)
        if not 0 <= correct < len(options):
            raise SchemaViolation(
                f"correct index {correct} out of range for {len(options)} options", path=where
            )
        normalized = [normalize_answer(opt) for opt in options]
        if len(set(normalized)) != len(normalized):
            raise SchemaViolation("options not pairwise distinct after answer normalization", path=where)
        return CanonicalItem(
            item_id=item_id,
            context_text=context,
            question_text=question,
            options=tuple(options),
            correct_index=correct,
            meta=meta,
            extra_fields=extras,
        )

    if "options" in record or "correct" in record:
        raise SchemaViolation(f"options/correct not allowed for style {style.value!r}", path=where)
    answers = record.get("answers")
    if answers is not None:
        if not isinstance(answers, list) or not all(isinstance(a, str) for a in answers):
            raise SchemaViolation("field 'answers' must be an array of strings", path=where)
    return CanonicalItem(
        item_id=item_id,
        context_text=context,
        question_text=question,
        gold_answers=tuple(answers or ()),
        meta=meta,
        extra_fields=extras,
    )


def _iter_lines(path):
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise MalformedFile(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedFile(f"{path}:{lineno}: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise MalformedFile(f"{path}:{lineno}: expected one JSON object per line")
            yield lineno, obj


def read_canonical_file(path):
    """All records of a canonical file, the provenance header split off."""
    header = None
    records = []
    for lineno, obj in _iter_lines(path):
        if lineno == 1 and set(obj) == {"_provenance"}:
            header = obj["_provenance"]
            continue
        records.append((lineno, obj))
    return header, records


def _dataset_id_for(path, header, dataset_id):
    if dataset_id:
        return dataset_id
    if header and header.get("dataset_id"):
        return header["dataset_id"]
    name = str(path).rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0]


def _ingest_canonical(path, style, dataset_id, strict, drop_empty_answers, epoch):
    header, raw = read_canonical_file(path)
    if style is None:
        tag = header.get("style") if header else None
        if tag is None and raw:
            tag = raw[0][1].get("style")
        if tag is None:
            raise SchemaViolation("cannot determine dataset style", path=str(path))
        style = QuestionStyle.from_tag(tag)
    items = []
    dropped = 0
    for lineno, record in raw:
        where = f"{path}:{lineno}"
        if (
            drop_empty_answers
            and style is not QuestionStyle.MULTIPLE_CHOICE
            and not record.get("answers")
        ):
            dropped += 1
            continue
        item = record_to_item(record, style, where, strict=strict)
        if style is not QuestionStyle.MULTIPLE_CHOICE and not item.gold_answers:
            raise SchemaViolation(
                "empty answers (use --drop-empty-answers to skip such records)", path=where
            )
        items.append(item)
    if not items:
        raise EmptyDataset(f"{path}: no items" + (f" ({dropped} dropped)" if dropped else ""))
    info = IngestInfo(
        source=str(path),
        adapter="jsonl_canonical",
        ingested_at=int(epoch if epoch is not None else time.time()),
    )
    return Dataset(_dataset_id_for(path, header, dataset_id), style, tuple(items), info), dropped


def _ingest_squad_json(path, dataset_id, drop_empty_answers, epoch):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise MalformedFile(f"cannot open {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{path}: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("data"), list):
        raise SchemaViolation("expected top-level object with a 'data' array", path=str(path))

    items = []
    dropped = 0
    for ai, article in enumerate(data["data"]):
        title = article.get("title", "")
        for pi, paragraph in enumerate(article.get("paragraphs", [])):
            where = f"data[{ai}].paragraphs[{pi}]"
            context = paragraph.get("context")
            if not isinstance(context, str):
                raise SchemaViolation("missing 'context'", path=where)
            for qi, qa in enumerate(paragraph.get("qas", [])):
                qwhere = f"{where}.qas[{qi}]"
                qid = qa.get("id")
                question = qa.get("question")
                if not isinstance(qid, str):
                    raise SchemaViolation("missing 'id'", path=qwhere)
                if not isinstance(question, str):
                    raise SchemaViolation("missing 'question'", path=qwhere)
                answers = qa.get("answers")
                if not isinstance(answers, list):
                    raise SchemaViolation("missing 'answers'", path=qwhere)
                texts = []
                for an in answers:
                    text = an.get("text") if isinstance(an, dict) else None
                    if not isinstance(text, str):
                        raise SchemaViolation("answer without 'text'", path=qwhere)
                    texts.append(text)
                if not texts:
                    if drop_empty_answers:
                        dropped += 1
                        continue
                    raise SchemaViolation("question has no answers", path=qwhere)
                meta = {"title": title} if title else {}
                items.append(
                    CanonicalItem(
                        item_id=qid,
                        context_text=context,
                        question_text=question,
                        gold_answers=tuple(texts),
                        meta=meta,
                    )
                )
    if not items:
        raise EmptyDataset(f"{path}: no items")
    info = IngestInfo(
        source=str(path),
        adapter="squad_json",
        ingested_at=int(epoch if epoch is not None else time.time()),
    )
    name = dataset_id or str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return Dataset(name, QuestionStyle.EXTRACTION, tuple(items), info), dropped


def ingest_extraction(
    path,
    fmt: str,
    *,
    dataset_id: str | None = None,
    style: QuestionStyle = QuestionStyle.EXTRACTION,
    strict: bool = False,
    drop_empty_answers: bool = False,
    epoch: int | None = None,
) -> Dataset:
    """Ingest an extraction-style (or, with style switched, description-style)
    dataset. Gold answers are preserved verbatim, one item per question."""
    if style is QuestionStyle.MULTIPLE_CHOICE:
        raise WrongStyle("use ingest_multiple_choice for multiple_choice datasets")
    if fmt == "squad_json":
        if style is not QuestionStyle.EXTRACTION:
            raise WrongStyle("squad_json input is extraction style")
        dataset, _ = _ingest_squad_json(path, dataset_id, drop_empty_answers, epoch)
        return dataset
    if fmt == "jsonl_canonical":
        dataset, _ = _ingest_canonical(path, style, dataset_id, strict, drop_empty_answers, epoch)
        return dataset
    raise MalformedFile(f"unknown format {fmt!r}")


def ingest_multiple_choice(
    path,
    fmt: str = "jsonl_canonical",
    *,
    dataset_id: str | None = None,
    strict: bool = False,
    epoch: int | None = None,
) -> Dataset:
    if fmt != "jsonl_canonical":
        raise MalformedFile(f"unknown format {fmt!r} for multiple choice")
    dataset, _ = _ingest_canonical(
        path, QuestionStyle.MULTIPLE_CHOICE, dataset_id, strict, False, epoch
    )
    return dataset


def load_canonical(path, *, strict: bool = False, epoch: int | None = None) -> Dataset:
    """Load a canonical file of any style (style read from header/records)."""
    dataset, _ = _ingest_canonical(path, None, None, strict, False, epoch)
    return dataset


def export_dataset(dataset: Dataset, path, header: dict | None = None) -> None:
    """Write the canonical line-record file; the header always carries
    dataset_id and style so round-trips preserve them."""
    full_header = dict(header or {})
    full_header.setdefault("dataset_id", dataset.dataset_id)
    full_header.setdefault("style", dataset.style.value)
    prov.write_jsonl(
        path,
        (item_to_record(item, dataset.style) for item in dataset.items),
        provenance=full_header,
    )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    code: str
    message: str
    item_ids: tuple[str, ...] = ()
    positions: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    @property
    def has_errors(self) -> bool:
        return any(issue.severity == "error" for issue in self.issues)

    def __iter__(self):
        return iter(self.issues)

    def __len__(self) -> int:
        return len(self.issues)


def validate(dataset: Dataset) -> ValidationReport:
    """Deterministic invariant report; empty iff all invariants hold and no
    flags are set. Never mutates the dataset."""
    issues: list[ValidationIssue] = []

    seen: dict[str, int] = {}
    for pos, item in enumerate(dataset.items):
        if item.item_id in seen:
            issues.append(
                ValidationIssue(
                    "error",
                    "duplicate_item_id",
                    f"item id {item.item_id!r} appears at positions {seen[item.item_id]} and {pos}",
                    (item.item_id,),
                    (seen[item.item_id], pos),
                )
            )
        else:
            seen[item.item_id] = pos

    for pos, item in enumerate(dataset.items):
        if dataset.style is QuestionStyle.MULTIPLE_CHOICE:
            if len(item.options) < 2:
                issues.append(
                    ValidationIssue("error", "too_few_options", "fewer than 2 options", (item.item_id,), (pos,))
                )
            if item.correct_index is None or not 0 <= item.correct_index < len(item.options):
                issues.append(
                    ValidationIssue("error", "bad_correct_index", f"correct index {item.correct_index!r} out of range", (item.item_id,), (pos,))
                )
            normalized = [normalize_answer(opt) for opt in item.options]
            if len(set(normalized)) != len(normalized):
                issues.append(
                    ValidationIssue("error", "duplicate_options", "options collide after answer normalization", (item.item_id,), (pos,))
                )
            if item.gold_answers:
                issues.append(
                    ValidationIssue("error", "answers_on_multiple_choice", "multiple_choice item carries answers", (item.item_id,), (pos,))
                )
        else:
            if not item.gold_answers:
                issues.append(
                    ValidationIssue("error", "no_gold_answers", "item has no gold answers", (item.item_id,), (pos,))
                )
            if "gold_not_in_context" in item_flags(item, dataset.style):
                issues.append(
                    ValidationIssue(
                        "warning",
                        "gold_not_in_context",
                        "a gold answer is not a verbatim substring of the context",
                        (item.item_id,),
                        (pos,),
                    )
                )
    return ValidationReport(tuple(issues))
