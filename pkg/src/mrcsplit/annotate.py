"""Blinded annotation: stratified sampling, label schema, distributions,
and label-score correlation.

Annotators see a task payload (context, question, gold answer, options)
and nothing else; which subset an item came from and how models scored
it live in a separate hidden join that only the `unblind` command reads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .corpus import Dataset, QuestionStyle
from .errors import (
    DegenerateVector,
    EmptyRecords,
    LengthMismatch,
    SubsetTooSmall,
    UnknownTaskId,
)

VALIDITY_LABELS = ("unsolvable", "single_candidate", "ambiguous", "valid")
SKILL_LABELS = ("word_matching", "paraphrasing", "knowledge", "meta_whole", "math_logic")
RELATION_LABELS = ("coreference", "causal", "spatial_temporal", "none")
SUBSETS = ("easy", "hard")

DEFAULT_PERMUTATIONS = 10_000

# wire fields of an annotation record; anything else is rejected
RECORD_FIELDS = {
    "task_id",
    "annotator_id",
    "timestamp",
    "validity",
    "skill",
    "multi_sentence",
    "relation",
    "note",
}


@dataclass(frozen=True)
class AnnotationTask:
    """What the annotator is shown. Deliberately excludes the item id,
    subset, and any model score."""

    task_id: str
    style: str
    context: str
    question: str
    golds: tuple[str, ...]
    options: tuple[str, ...] = ()
    correct_index: int | None = None

    def payload(self) -> dict:
        body = {
            "task_id": self.task_id,
            "style": self.style,
            "context": self.context,
            "question": self.question,
            "golds": list(self.golds),
        }
        if self.options:
            body["options"] = list(self.options)
            body["correct_index"] = self.correct_index
        return body

    @staticmethod
    def from_payload(body: dict) -> "AnnotationTask":
        return AnnotationTask(
            task_id=body["task_id"],
            style=body["style"],
            context=body["context"],
            question=body["question"],
            golds=tuple(body["golds"]),
            options=tuple(body.get("options", ())),
            correct_index=body.get("correct_index"),
        )


@dataclass(frozen=True)
class AnnotationRecord:
    task_id: str
    annotator_id: str
    timestamp: str  # ISO-8601, client-supplied
    validity: str
    skill: str | None = None
    multi_sentence: bool | None = None
    relation: str | None = None
    note: str | None = None

    def to_record(self) -> dict:
        body = {
            "task_id": self.task_id,
            "annotator_id": self.annotator_id,
            "timestamp": self.timestamp,
            "validity": self.validity,
        }
        if self.skill is not None:
            body["skill"] = self.skill
        if self.multi_sentence is not None:
            body["multi_sentence"] = self.multi_sentence
        if self.relation is not None:
            body["relation"] = self.relation
        if self.note is not None:
            body["note"] = self.note
        return body

    @staticmethod
    def from_record(body: dict) -> "AnnotationRecord":
        violations = validate_record(body)
        if violations:
            raise ValueError("; ".join(violations))
        return AnnotationRecord(
            task_id=body["task_id"],
            annotator_id=body["annotator_id"],
            timestamp=body["timestamp"],
            validity=body["validity"],
            skill=body.get("skill"),
            multi_sentence=body.get("multi_sentence"),
            relation=body.get("relation"),
            note=body.get("note"),
        )


def validate_record(body: dict) -> list[str]:
    """All schema violations in a submitted record, empty when clean.

    Rules: validity is always required; skill and multi_sentence appear
    exactly on valid items; relation appears exactly when multi_sentence
    is true (and `none` is itself a legal relation).
    """
    violations = []
    if not isinstance(body, dict):
        return ["record must be an object"]
    for extra in sorted(set(body) - RECORD_FIELDS):
        violations.append(f"unknown field {extra!r}")
    for field in ("task_id", "annotator_id", "timestamp"):
        value = body.get(field)
        if not isinstance(value, str) or not value.strip():
            violations.append(f"{field} must be a non-empty string")

    validity = body.get("validity")
    if validity not in VALIDITY_LABELS:
        violations.append(
            f"validity must be one of {', '.join(VALIDITY_LABELS)}"
        )
    is_valid = validity == "valid"

    skill = body.get("skill")
    if skill is not None and skill not in SKILL_LABELS:
        violations.append(f"skill must be one of {', '.join(SKILL_LABELS)}")
    if is_valid and skill is None:
        violations.append("valid items need exactly one skill")
    if not is_valid and skill is not None:
        violations.append("skill is only annotated on valid items")

    multi = body.get("multi_sentence")
    if multi is not None and not isinstance(multi, bool):
        violations.append("multi_sentence must be a boolean")
    if is_valid and multi is None:
        violations.append("valid items need the multi_sentence flag")
    if not is_valid and multi is not None:
        violations.append("multi_sentence is only annotated on valid items")

    relation = body.get("relation")
    if relation is not None and relation not in RELATION_LABELS:
        violations.append(f"relation must be one of {', '.join(RELATION_LABELS)}")
    if multi is True and relation is None:
        violations.append("multi-sentence items need a relation (none is allowed)")
    if multi is not True and relation is not None:
        violations.append("relation is only annotated on multi-sentence items")

    note = body.get("note")
    if note is not None and not isinstance(note, str):
        violations.append("note must be a string")
    return violations


def sample_for_annotation(
    assignments: list,
    dataset: Dataset,
    n_per_subset: int,
    seed: int,
) -> tuple[list[AnnotationTask], dict]:
    """Draw n items per subset uniformly without replacement and shuffle
    the combined order, all from one seeded generator.

    Returns (tasks, hidden) where hidden maps task_id to the unblinding
    join {item_id, subset, k2_score}; callers must keep the two apart.
    """
    item_map = dataset.item_map()
    by_subset = {subset: [] for subset in SUBSETS}
    for assignment in assignments:
        by_subset[assignment.subset].append(assignment)
    rng = random.Random(seed)
    chosen = []
    for subset in SUBSETS:
        pool = by_subset[subset]
        if len(pool) < n_per_subset:
            raise SubsetTooSmall(
                f"subset {subset!r} has {len(pool)} items, need {n_per_subset}"
            )
        chosen.extend(rng.sample(pool, n_per_subset))
    rng.shuffle(chosen)

    tasks = []
    hidden = {}
    seen_ids = set()
    for assignment in chosen:
        while True:
            task_id = f"t{rng.getrandbits(64):016x}"
            if task_id not in seen_ids:
                seen_ids.add(task_id)
                break
        item = item_map[assignment.item_id]
        tasks.append(
            AnnotationTask(
                task_id=task_id,
                style=dataset.style.value,
                context=item.context_text,
                question=item.question_text,
                golds=item.gold_answers
                if dataset.style is not QuestionStyle.MULTIPLE_CHOICE
                else (item.options[item.correct_index],),
                options=item.options,
                correct_index=item.correct_index,
            )
        )
        hidden[task_id] = {
            "item_id": assignment.item_id,
            "subset": assignment.subset,
            "k2_score": assignment.k2_score,
        }
    return tasks, hidden


def _percent_block(counts: dict, denominator: int, labels) -> dict:
    if denominator == 0:
        return {label: None for label in labels}
    return {label: 100.0 * counts.get(label, 0) / denominator for label in labels}


def label_distribution(records: list, task_subsets: dict) -> dict:
    """Per-subset label percentages in the fixed table row order.

    Validity rows are over all annotated items of the subset; skill and
    multi-sentence rows are over the valid items; relation rows are
    reported against both the valid and the multi-sentence denominator
    since the convention is ambiguous.
    """
    if not records:
        raise EmptyRecords("no annotation records to summarize")
    grouped = {subset: [] for subset in SUBSETS}
    for record in records:
        subset = task_subsets.get(record.task_id)
        if subset is None:
            raise UnknownTaskId(f"record references unknown task {record.task_id!r}")
        grouped.setdefault(subset, []).append(record)

    table = {}
    for subset, rows in grouped.items():
        n = len(rows)
        validity_counts = {}
        skill_counts = {}
        relation_counts = {}
        n_valid = 0
        n_multi = 0
        for record in rows:
            validity_counts[record.validity] = validity_counts.get(record.validity, 0) + 1
            if record.validity == "valid":
                n_valid += 1
                skill_counts[record.skill] = skill_counts.get(record.skill, 0) + 1
                if record.multi_sentence:
                    n_multi += 1
                    relation_counts[record.relation] = (
                        relation_counts.get(record.relation, 0) + 1
                    )
        table[subset] = {
            "n": n,
            "n_valid": n_valid,
            "n_multi": n_multi,
            "validity": _percent_block(validity_counts, n, VALIDITY_LABELS),
            "skill": _percent_block(skill_counts, n_valid, SKILL_LABELS),
            "multi_sentence": (100.0 * n_multi / n_valid) if n_valid else None,
            "relation_over_valid": _percent_block(
                relation_counts, n_valid, RELATION_LABELS
            ),
            "relation_over_multi": _percent_block(
                relation_counts, n_multi, RELATION_LABELS
            ),
        }
    return table


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p: float
    n: int
    method: str  # "analytic" | "permutation"


def pearson_r(
    labels,
    scores,
    method: str = "analytic",
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> CorrelationResult:
    """Sample Pearson correlation with a two-sided p-value.

    Analytic p uses the exact t-distribution tail via the regularized
    incomplete beta function; the permutation mode shuffles the score
    vector with a seeded generator and reports (hits + 1) / (N + 1).
    """
    xs = np.asarray(labels, dtype=float)
    ys = np.asarray(scores, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise LengthMismatch(
            f"paired vectors required, got shapes {xs.shape} and {ys.shape}"
        )
    n = xs.size
    if n < 3:
        raise LengthMismatch(f"need at least 3 paired observations, got {n}")
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    sx2 = float(xc @ xc)
    sy2 = float(yc @ yc)
    if sx2 == 0.0 or sy2 == 0.0:
        raise DegenerateVector("correlation undefined for a constant vector")
    denom = float(np.sqrt(sx2 * sy2))
    r = float(xc @ yc) / denom
    r = max(-1.0, min(1.0, r))

    if method == "analytic":
        df = n - 2
        r2 = r * r
        if r2 >= 1.0:
            p = 0.0
        else:
            t2 = r2 * df / (1.0 - r2)
            p = float(betainc(df / 2.0, 0.5, df / (df + t2)))
        return CorrelationResult(r=r, p=p, n=n, method="analytic")
    if method == "permutation":
        rng = np.random.default_rng(seed)
        permuted = rng.permuted(
            np.tile(yc, (permutations, 1)), axis=1
        )
        perm_rs = (permuted @ xc) / denom
        hits = int(np.sum(np.abs(perm_rs) >= abs(r) - 1e-12))
        p = (hits + 1) / (permutations + 1)
        return CorrelationResult(r=r, p=p, n=n, method="permutation")
    raise ValueError(f"unknown p-value method {method!r}")


def correlate_labels(
    records: list,
    hidden: dict,
    item_scores: dict,
    method: str = "analytic",
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> list[dict]:
    """One correlation row per label: the 0/1 label indicator against
    the items' full-question scores.

    Validity labels range over all annotated items; skill, multi-
    sentence, and relation labels range over the valid items only, since
    they are undefined elsewhere. Degenerate vectors (a label nobody or
    everybody used) yield r = None rows instead of errors.
    """
    if not records:
        raise EmptyRecords("no annotation records to correlate")
    pairs = []
    for record in records:
        join = hidden.get(record.task_id)
        if join is None:
            raise UnknownTaskId(f"record references unknown task {record.task_id!r}")
        item_id = join["item_id"]
        if item_id not in item_scores:
            raise UnknownTaskId(f"no full-variant score for item {item_id!r}")
        pairs.append((record, float(item_scores[item_id])))

    valid_pairs = [(r, s) for r, s in pairs if r.validity == "valid"]
    rows = []

    def add_row(label: str, sub_pairs, indicator) -> None:
        scores = [s for _, s in sub_pairs]
        flags = [1.0 if indicator(r) else 0.0 for r, _ in sub_pairs]
        row = {"label": label, "n": len(sub_pairs)}
        try:
            result = pearson_r(flags, scores, method, permutations, seed)
            row["r"] = result.r
            row["p"] = result.p
        except (DegenerateVector, LengthMismatch) as exc:
            row["r"] = None
            row["p"] = None
            row["note"] = str(exc)
        rows.append(row)

    for label in VALIDITY_LABELS:
        add_row(f"validity:{label}", pairs, lambda r, lab=label: r.validity == lab)
    for label in SKILL_LABELS:
        add_row(f"skill:{label}", valid_pairs, lambda r, lab=label: r.skill == lab)
    add_row("multi_sentence", valid_pairs, lambda r: r.multi_sentence is True)
    for label in RELATION_LABELS:
        add_row(
            f"relation:{label}", valid_pairs, lambda r, lab=label: r.relation == lab
        )
    return rows
