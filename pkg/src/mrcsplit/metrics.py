"""Style-appropriate scoring: exact match, token F1, Rouge-L, accuracy.

EM/F1 follow the SQuAD official-script semantics (answer normalization,
bag-of-token overlap, max over golds). Rouge-L follows the MS MARCO
script: raw lowercased tokens, LCS-based F-measure with beta defaulting
to 1.2. All values are fractions in [0, 1]; reports multiply by 100.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import CanonicalItem, QuestionStyle
from .errors import EmptyGolds, IndexOutOfRange, KindMismatch, WrongStyle
from .textproc import normalize_answer, tokenize

DEFAULT_BETA = 1.2

PRIMARY_METRIC = {
    QuestionStyle.EXTRACTION: "f1",
    QuestionStyle.DESCRIPTION: "rouge_l",
    QuestionStyle.MULTIPLE_CHOICE: "accuracy",
}


@dataclass(frozen=True)
class Score:
    metric: str  # "em" | "f1" | "rouge_l" | "accuracy"
    value: float


def exact_match(pred: str, golds) -> Score:
    """1 iff the normalized prediction equals some normalized gold."""
    golds = list(golds)
    if not golds:
        raise EmptyGolds("exact_match needs at least one gold answer")
    norm_pred = normalize_answer(pred)
    hit = any(norm_pred == normalize_answer(gold) for gold in golds)
    return Score("em", 1.0 if hit else 0.0)


def _f1_single(pred_bag: Counter, pred_len: int, gold: str) -> float:
    # two empty bags count as a perfect match so an exact-match hit can
    # never score below 1 on F1; the reference scorer returns 0 here
    gold_tokens = normalize_answer(gold).split()
    if pred_len == 0 and not gold_tokens:
        return 1.0
    common = sum((pred_bag & Counter(gold_tokens)).values())
    if common == 0:
        return 0.0
    # 2PR/(P+R) with P=c/|pred|, R=c/|gold| reduces to one exact division
    return 2 * common / (pred_len + len(gold_tokens))


def token_f1(pred: str, golds) -> Score:
    """Bag-of-normalized-tokens F1, max over golds."""
    golds = list(golds)
    if not golds:
        raise EmptyGolds("token_f1 needs at least one gold answer")
    pred_tokens = normalize_answer(pred).split()
    pred_bag = Counter(pred_tokens)
    best = max(_f1_single(pred_bag, len(pred_tokens), gold) for gold in golds)
    return Score("f1", best)


def rouge_tokens(text: str) -> list[str]:
    """Rouge-L operates on raw lowercased tokens; answer normalization is
    deliberately not applied here."""
    return [token.surface.lower() for token in tokenize(text)]


def lcs_length(xs, ys) -> int:
    """Longest common subsequence length, O(len(xs) * len(ys)) rolling rows."""
    if not xs or not ys:
        return 0
    if len(ys) > len(xs):
        xs, ys = ys, xs
    prev = [0] * (len(ys) + 1)
    for x in xs:
        curr = [0]
        for j, y in enumerate(ys, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l_from_tokens(pred_tokens, gold_tokens, beta: float = DEFAULT_BETA) -> float:
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    lcs = lcs_length(pred_tokens, gold_tokens)
    if lcs == 0:
        return 0.0
    precision = lcs / len(pred_tokens)
    recall = lcs / len(gold_tokens)
    return (1 + beta**2) * precision * recall / (recall + beta**2 * precision)


def rouge_l(pred: str, gold: str, beta: float = DEFAULT_BETA) -> Score:
    if beta <= 0:
        raise ValueError("beta must be positive")
    return Score("rouge_l", rouge_l_from_tokens(rouge_tokens(pred), rouge_tokens(gold), beta))


def accuracy(predicted_index: int, item: CanonicalItem) -> Score:
    if item.correct_index is None or not item.options:
        raise WrongStyle("accuracy applies to multiple_choice items only")
    if not 0 <= predicted_index < len(item.options):
        raise IndexOutOfRange(
            f"predicted index {predicted_index} out of range for {len(item.options)} options"
        )
    return Score("accuracy", 1.0 if predicted_index == item.correct_index else 0.0)


def score_item(
    item: CanonicalItem,
    prediction,
    style: QuestionStyle,
    beta: float = DEFAULT_BETA,
) -> dict[str, float]:
    """Score one prediction under the style's metrics.

    Extraction reports both em and f1 (f1 is primary); description reports
    rouge_l against the best gold; multiple choice reports accuracy.
    """
    if style is QuestionStyle.MULTIPLE_CHOICE:
        if isinstance(prediction, bool) or not isinstance(prediction, int):
            raise KindMismatch("multiple_choice predictions are option indices")
        return {"accuracy": accuracy(prediction, item).value}
    if not isinstance(prediction, str):
        raise KindMismatch(f"{style.value} predictions are strings")
    if style is QuestionStyle.EXTRACTION:
        return {
            "em": exact_match(prediction, item.gold_answers).value,
            "f1": token_f1(prediction, item.gold_answers).value,
        }
    if not item.gold_answers:
        raise EmptyGolds("description item has no gold answers")
    best = max(rouge_l(prediction, gold, beta).value for gold in item.gold_answers)
    return {"rouge_l": best}
