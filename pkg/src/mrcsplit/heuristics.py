"""The two filtering heuristics and their derived dataset variants.

First heuristic: keep only the first k question tokens (k in {1, 2, 4})
and see how well an external model still scores. Second heuristic: find
the context sentence with the largest stemmed, stopword-free unigram
overlap with the question and check whether the answer lives there.

Both operate purely per item; dataset-level wrappers tag the outputs
with `meta.variant` / `meta.parent_id` so downstream stages can refuse
to mix variants.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .corpus import CanonicalItem, Dataset, QuestionStyle
from .errors import (
    EmptyContext,
    EmptyQuestion,
    EmptyTarget,
    MissingProjection,
)
from .metrics import DEFAULT_BETA, rouge_l_from_tokens
from .textproc import (
    SentenceSpan,
    StopwordList,
    cached_sentences,
    content_terms,
    default_stopwords,
    normalize_answer,
    tokenize,
)

# How duplicated terms are counted when scoring question/sentence overlap.
# sentence-count: sum of sentence-side occurrences of each distinct
#   question term (a term the sentence repeats counts every time).
# min-count: multiset intersection, capped by the question's own counts.
OVERLAP_MODES = ("sentence-count", "min-count")
DEFAULT_OVERLAP_MODE = "sentence-count"

VARIANTS = ("full", "k1", "k2", "k4", "sim_only")

# Span projection searches spans up to gold length plus this slack.
PROJECTION_SLACK = 8


@dataclass(frozen=True)
class SimilarityProfile:
    item_id: str
    per_sentence_overlap: tuple[int, ...]
    most_similar_index: int
    answer_in_most_similar: bool
    zero_overlap: bool  # all overlaps were 0; index 0 is a placeholder

    def to_record(self) -> dict:
        return {
            "id": self.item_id,
            "overlaps": list(self.per_sentence_overlap),
            "most_similar_index": self.most_similar_index,
            "answer_in_most_similar": self.answer_in_most_similar,
            "zero_overlap": self.zero_overlap,
        }

    @staticmethod
    def from_record(record: dict) -> "SimilarityProfile":
        return SimilarityProfile(
            item_id=record["id"],
            per_sentence_overlap=tuple(int(x) for x in record["overlaps"]),
            most_similar_index=int(record["most_similar_index"]),
            answer_in_most_similar=bool(record["answer_in_most_similar"]),
            zero_overlap=bool(record["zero_overlap"]),
        )


@dataclass(frozen=True)
class SpanProjection:
    item_id: str
    token_start: int
    token_end: int  # exclusive
    rouge_value: float
    no_lexical_anchor: bool  # target shares no token with the context

    def to_record(self) -> dict:
        return {
            "id": self.item_id,
            "token_start": self.token_start,
            "token_end": self.token_end,
            "rouge_value": self.rouge_value,
            "no_lexical_anchor": self.no_lexical_anchor,
        }

    @staticmethod
    def from_record(record: dict) -> "SpanProjection":
        return SpanProjection(
            item_id=record["id"],
            token_start=int(record["token_start"]),
            token_end=int(record["token_end"]),
            rouge_value=float(record["rouge_value"]),
            no_lexical_anchor=bool(record["no_lexical_anchor"]),
        )


def truncate_question(item: CanonicalItem, k: int) -> CanonicalItem:
    """Replace the question with its first k tokens.

    The new text is the original sliced at the end offset of token k, so
    the model-facing string is untouched up to the cut (no detokenization
    artifacts). Questions with at most k tokens pass through unchanged.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    tokens = tokenize(item.question_text)
    if not tokens:
        raise EmptyQuestion(f"item {item.item_id} has an empty question")
    if len(tokens) <= k:
        return item
    cut = tokens[k - 1].end
    return dataclasses.replace(item, question_text=item.question_text[:cut])


def sentence_overlaps(
    item: CanonicalItem,
    sentences: list[SentenceSpan] | None = None,
    stopwords: StopwordList | None = None,
    mode: str = DEFAULT_OVERLAP_MODE,
) -> list[int]:
    """Unigram overlap between the question and each context sentence.

    Terms are stemmed and stopword-free on both sides. An all-stopword
    question yields all zeros.
    """
    if mode not in OVERLAP_MODES:
        raise ValueError(f"unknown overlap mode {mode!r}")
    if sentences is None:
        sentences = cached_sentences(item.context_text)
    if stopwords is None:
        stopwords = default_stopwords()
    question_bag = content_terms(tokenize(item.question_text), stopwords)
    overlaps = []
    for sentence in sentences:
        sentence_bag = content_terms(sentence.tokens, stopwords)
        if mode == "sentence-count":
            overlap = sum(sentence_bag[term] for term in question_bag)
        else:
            overlap = sum(
                min(count, sentence_bag[term]) for term, count in question_bag.items()
            )
        overlaps.append(overlap)
    return overlaps


def answer_in_sentence(
    item: CanonicalItem,
    sentence: SentenceSpan,
    style: QuestionStyle,
    projection: SpanProjection | None = None,
) -> bool:
    """Does the (projected) answer live in this sentence?

    Extraction compares normalized token sequences: true iff some gold's
    sequence occurs contiguously in the sentence's. A gold that
    normalizes to nothing is vacuously contained. Description and
    multiple choice use the projected gold span instead and test token
    range intersection, so a span straddling a boundary belongs to both
    sentences.
    """
    if style is QuestionStyle.EXTRACTION:
        sentence_tokens = normalize_answer(sentence_text(item, sentence)).split()
        for gold in item.gold_answers:
            needle = normalize_answer(gold).split()
            if not needle:
                return True
            width = len(needle)
            for start in range(len(sentence_tokens) - width + 1):
                if sentence_tokens[start : start + width] == needle:
                    return True
        return False
    if projection is None:
        raise MissingProjection(
            f"item {item.item_id}: {style.value} containment needs a span projection"
        )
    sent_start = sentence.token_offset
    sent_end = sentence.token_offset + len(sentence.tokens)
    return projection.token_start < sent_end and sent_start < projection.token_end


def sentence_text(item: CanonicalItem, sentence: SentenceSpan) -> str:
    return item.context_text[sentence.start : sentence.end]


def most_similar(
    item: CanonicalItem,
    style: QuestionStyle,
    sentences: list[SentenceSpan] | None = None,
    stopwords: StopwordList | None = None,
    mode: str = DEFAULT_OVERLAP_MODE,
    projection: SpanProjection | None = None,
) -> SimilarityProfile:
    """Pick the most similar sentence (earliest wins ties) and test
    answer containment there. Zero overlap everywhere still yields index
    0 but is flagged so downstream consumers can discount it."""
    if sentences is None:
        sentences = cached_sentences(item.context_text)
    if not sentences:
        raise EmptyContext(f"item {item.item_id} has no context sentences")
    overlaps = sentence_overlaps(item, sentences, stopwords, mode)
    best = max(overlaps)
    index = overlaps.index(best)
    contained = answer_in_sentence(item, sentences[index], style, projection)
    return SimilarityProfile(
        item_id=item.item_id,
        per_sentence_overlap=tuple(overlaps),
        most_similar_index=index,
        answer_in_most_similar=contained,
        zero_overlap=best == 0,
    )


def project_gold_span(
    item: CanonicalItem,
    target: str,
    beta: float = DEFAULT_BETA,
    max_len: int | None = None,
) -> SpanProjection:
    """Exhaustively find the context token span with the highest Rouge-L
    against the target.

    Ties prefer the earliest start, then the shortest span. max_len
    defaults to target length + 8; pass 0 for an unbounded search. A
    target sharing no token with the context gets the degenerate span
    (0, min(max_len, n)) and the no_lexical_anchor flag.
    """
    context_tokens = [t.surface.lower() for t in tokenize(item.context_text)]
    if not context_tokens:
        raise EmptyContext(f"item {item.item_id} has an empty context")
    target_tokens = [t.surface.lower() for t in tokenize(target)]
    if not target_tokens:
        raise EmptyTarget(f"item {item.item_id} has an empty projection target")
    n = len(context_tokens)
    m = len(target_tokens)
    if max_len is None:
        max_len = m + PROJECTION_SLACK
    if max_len == 0:
        max_len = n
    if max_len < 1:
        raise ValueError("max_len must be >= 1 (or 0 for unbounded)")

    best_value = 0.0
    best_span: tuple[int, int] | None = None
    beta2 = beta**2
    for start in range(n):
        # grow the span one token at a time, updating the LCS DP row
        # incrementally so each start costs O(max_len * m)
        prev = [0] * (m + 1)
        limit = min(n, start + max_len)
        for end in range(start + 1, limit + 1):
            token = context_tokens[end - 1]
            curr = [0]
            for j in range(1, m + 1):
                if token == target_tokens[j - 1]:
                    curr.append(prev[j - 1] + 1)
                else:
                    curr.append(max(prev[j], curr[j - 1]))
            prev = curr
            lcs = prev[m]
            if lcs == 0:
                continue
            precision = lcs / (end - start)
            recall = lcs / m
            value = (1 + beta2) * precision * recall / (recall + beta2 * precision)
            # strict > in scan order keeps the earliest-then-shortest winner
            if value > best_value:
                best_value = value
                best_span = (start, end)

    if best_span is None:
        return SpanProjection(
            item_id=item.item_id,
            token_start=0,
            token_end=min(max_len, n),
            rouge_value=0.0,
            no_lexical_anchor=True,
        )
    return SpanProjection(
        item_id=item.item_id,
        token_start=best_span[0],
        token_end=best_span[1],
        rouge_value=best_value,
        no_lexical_anchor=False,
    )


def projection_targets(item: CanonicalItem, style: QuestionStyle) -> tuple[str, ...]:
    if style is QuestionStyle.MULTIPLE_CHOICE:
        return (item.options[item.correct_index],)
    return item.gold_answers


def project_item(
    item: CanonicalItem,
    style: QuestionStyle,
    beta: float = DEFAULT_BETA,
    max_len: int | None = None,
) -> SpanProjection:
    """Best projection over the item's targets (all golds for
    description, the correct option for multiple choice); ties keep the
    first target's span."""
    best: SpanProjection | None = None
    for target in projection_targets(item, style):
        projection = project_gold_span(item, target, beta, max_len)
        if best is None or projection.rouge_value > best.rouge_value + 1e-12:
            best = projection
    if best is None:
        raise EmptyTarget(f"item {item.item_id} has no projection target")
    return best


def sim_only_context(
    item: CanonicalItem,
    profile: SimilarityProfile,
    sentences: list[SentenceSpan] | None = None,
) -> CanonicalItem:
    """Replace the context with just the most similar sentence.

    Answers that disappear with the rest of the context are not an
    error; the exported record simply fails the gold-in-context check,
    mirroring how models were scored wrong on such items.
    """
    if profile.item_id != item.item_id:
        raise ValueError(
            f"profile {profile.item_id} does not belong to item {item.item_id}"
        )
    if sentences is None:
        sentences = cached_sentences(item.context_text)
    sentence = sentences[profile.most_similar_index]
    return dataclasses.replace(item, context_text=sentence_text(item, sentence))


def _as_variant(item: CanonicalItem, variant: str) -> CanonicalItem:
    meta = dict(item.meta)
    meta["variant"] = variant
    meta.setdefault("parent_id", item.item_id)
    return dataclasses.replace(item, meta=meta)


def truncate_dataset(dataset: Dataset, k: int) -> Dataset:
    items = tuple(
        _as_variant(truncate_question(item, k), f"k{k}") for item in dataset.items
    )
    return dataclasses.replace(dataset, items=items)


def profile_dataset(
    dataset: Dataset,
    stopwords: StopwordList | None = None,
    mode: str = DEFAULT_OVERLAP_MODE,
    beta: float = DEFAULT_BETA,
    max_len: int | None = None,
    projections: dict[str, SpanProjection] | None = None,
) -> list[SimilarityProfile]:
    """Similarity profiles for every item, computing span projections on
    the fly for styles that need them (unless supplied)."""
    needs_projection = dataset.style is not QuestionStyle.EXTRACTION
    profiles = []
    for item in dataset.items:
        projection = None
        if needs_projection:
            if projections is not None:
                projection = projections.get(item.item_id)
                if projection is None:
                    raise MissingProjection(f"no projection for item {item.item_id}")
            else:
                projection = project_item(item, dataset.style, beta, max_len)
        profiles.append(
            most_similar(item, dataset.style, None, stopwords, mode, projection)
        )
    return profiles


def sim_only_dataset(
    dataset: Dataset, profiles: dict[str, SimilarityProfile]
) -> Dataset:
    items = []
    for item in dataset.items:
        profile = profiles.get(item.item_id)
        if profile is None:
            raise MissingProjection(f"no similarity profile for item {item.item_id}")
        items.append(_as_variant(sim_only_context(item, profile), "sim_only"))
    return dataclasses.replace(dataset, items=tuple(items))
