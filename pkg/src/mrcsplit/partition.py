"""Easy/hard dataset partition from k=2 scores and similarity profiles.

An item is hard exactly when its k=2 score is not positive and its
answer does not appear in the most similar sentence; everything else is
easy. The partition is descriptive: nothing is removed, items are only
labeled so reports can break scores down by subset.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Dataset, QuestionStyle
from .errors import CoverageGap, VariantMismatch, WrongStyle
from .heuristics import SimilarityProfile
from .predictions import EvaluationResult

SOLVED_THRESHOLD = 0.5  # inclusive


@dataclass(frozen=True)
class SubsetAssignment:
    item_id: str
    subset: str  # "easy" | "hard"
    k2_score: float
    answer_in_most_similar: bool
    zero_overlap: bool

    def to_record(self) -> dict:
        return {
            "id": self.item_id,
            "subset": self.subset,
            "evidence": {
                "k2_score": self.k2_score,
                "answer_in_most_similar": self.answer_in_most_similar,
                "zero_overlap": self.zero_overlap,
            },
        }

    @staticmethod
    def from_record(record: dict) -> "SubsetAssignment":
        evidence = record["evidence"]
        return SubsetAssignment(
            item_id=record["id"],
            subset=record["subset"],
            k2_score=float(evidence["k2_score"]),
            answer_in_most_similar=bool(evidence["answer_in_most_similar"]),
            zero_overlap=bool(evidence["zero_overlap"]),
        )


def partition(
    dataset: Dataset,
    k2_scores: dict,
    profiles: dict,
    scores_variant: str = "k2",
) -> tuple[list[SubsetAssignment], float]:
    """Assign every item to easy or hard; returns (assignments,
    hard_fraction). k2_scores maps item_id to the style's primary score
    for the k=2 variant; profiles maps item_id to SimilarityProfile."""
    if scores_variant != "k2":
        raise VariantMismatch(
            f"partition needs k2-variant scores, got {scores_variant!r}"
        )
    missing_scores = [i.item_id for i in dataset.items if i.item_id not in k2_scores]
    if missing_scores:
        raise CoverageGap(f"no k2 score for items {missing_scores[:5]}")
    missing_profiles = [i.item_id for i in dataset.items if i.item_id not in profiles]
    if missing_profiles:
        raise CoverageGap(f"no similarity profile for items {missing_profiles[:5]}")

    assignments = []
    hard = 0
    for item in dataset.items:
        score = float(k2_scores[item.item_id])
        profile: SimilarityProfile = profiles[item.item_id]
        is_hard = score <= 0.0 and not profile.answer_in_most_similar
        if is_hard:
            hard += 1
        assignments.append(
            SubsetAssignment(
                item_id=item.item_id,
                subset="hard" if is_hard else "easy",
                k2_score=score,
                answer_in_most_similar=profile.answer_in_most_similar,
                zero_overlap=profile.zero_overlap,
            )
        )
    return assignments, hard / len(dataset.items)


def solved_ratio_k2(
    style: QuestionStyle,
    k2_scores: dict,
    threshold: float = SOLVED_THRESHOLD,
) -> float:
    """Fraction of items whose k=2 score reaches the threshold
    (inclusive). The 0.5 cut only makes sense for span/text scores, so
    multiple choice is rejected."""
    if style is QuestionStyle.MULTIPLE_CHOICE:
        raise WrongStyle("solved ratio is defined for extraction and description only")
    if not k2_scores:
        raise CoverageGap("no k2 scores supplied")
    solved = sum(1 for score in k2_scores.values() if score >= threshold)
    return solved / len(k2_scores)


def subset_evaluate(
    assignments: list,
    evaluation: EvaluationResult,
) -> dict:
    """Aggregate full-variant scores separately over easy and hard items.

    Returns {"easy": {"count": n, "aggregates": {...} | None}, "hard":
    ...}; an empty subset gets aggregates None rather than a fabricated
    zero.
    """
    if evaluation.variant != "full":
        raise VariantMismatch(
            f"subset aggregates need full-variant scores, got {evaluation.variant!r}"
        )
    missing = [a.item_id for a in assignments if a.item_id not in evaluation.per_item]
    if missing:
        raise CoverageGap(f"no full-variant score for items {missing[:5]}")

    by_subset = {"easy": [], "hard": []}
    for assignment in assignments:
        by_subset[assignment.subset].append(evaluation.per_item[assignment.item_id])
    result = {}
    for subset, rows in by_subset.items():
        if not rows:
            result[subset] = {"count": 0, "aggregates": None}
            continue
        metrics = rows[0].keys()
        result[subset] = {
            "count": len(rows),
            "aggregates": {
                metric: sum(row[metric] for row in rows) / len(rows)
                for metric in metrics
            },
        }
    return result
