"""Dataset statistics and the tabular analysis report.

The report renders the same numeric content three ways (aligned text,
CSV, line-delimited records) with every number rounded once, to two
decimals, half-even. Percentages are computed on exact counts before
rounding so no error compounds.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

from .annotate import RELATION_LABELS, SKILL_LABELS, SUBSETS, VALIDITY_LABELS
from .corpus import Dataset
from .errors import CoverageGap
from .textproc import cached_sentences, tokenize

SCORE_VARIANT_ORDER = ("full", "k1", "k2", "k4", "sim_only")


@dataclass(frozen=True)
class DatasetStats:
    n_questions: int
    avg_context_tokens: float
    avg_question_tokens: float
    avg_context_sentences: float
    pct_ans_in_sim: float
    pct_solved_k2: float | None = None
    hard_pct: float | None = None


def dataset_stats(
    dataset: Dataset,
    profiles: dict,
    solved_k2: float | None = None,
    hard_fraction: float | None = None,
) -> DatasetStats:
    """Corpus-level statistics; score-dependent fields stay None when no
    predictions were supplied."""
    missing = [i.item_id for i in dataset.items if i.item_id not in profiles]
    if missing:
        raise CoverageGap(f"no similarity profile for items {missing[:5]}")
    n = len(dataset.items)
    context_tokens = 0
    question_tokens = 0
    sentences = 0
    in_sim = 0
    for item in dataset.items:
        context_tokens += len(tokenize(item.context_text))
        question_tokens += len(tokenize(item.question_text))
        sentences += len(cached_sentences(item.context_text))
        if profiles[item.item_id].answer_in_most_similar:
            in_sim += 1
    return DatasetStats(
        n_questions=n,
        avg_context_tokens=context_tokens / n,
        avg_question_tokens=question_tokens / n,
        avg_context_sentences=sentences / n,
        pct_ans_in_sim=100.0 * in_sim / n,
        pct_solved_k2=None if solved_k2 is None else 100.0 * solved_k2,
        hard_pct=None if hard_fraction is None else 100.0 * hard_fraction,
    )


def round2(value) -> str:
    """One rounding step to two decimals, banker's rounding."""
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        dec = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        dec = Decimal(repr(float(value)))
    return str(dec.quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class ReportRow:
    section: str
    row: str  # stable machine key
    label: str  # human-readable row name
    value: float | int | None
    display: str


def _row(section: str, key: str, label: str, value, na: str = "n/a") -> ReportRow:
    if value is None:
        return ReportRow(section, key, label, None, na)
    display = round2(value)
    parsed = int(display) if isinstance(value, int) else float(display)
    return ReportRow(section, key, label, parsed, display)


def build_rows(
    stats: DatasetStats,
    evaluations: list | None = None,
    subset_result: dict | None = None,
    distribution: dict | None = None,
    correlations: list | None = None,
) -> list[ReportRow]:
    """Flatten everything into the fixed row order. Score aggregates
    arrive as fractions and are shown x100 like the stats percentages."""
    rows = [
        _row("stats", "n_questions", "questions", stats.n_questions),
        _row("stats", "avg_context_tokens", "avg context tokens", stats.avg_context_tokens),
        _row("stats", "avg_question_tokens", "avg question tokens", stats.avg_question_tokens),
        _row("stats", "avg_context_sentences", "avg context sentences", stats.avg_context_sentences),
        _row("stats", "pct_ans_in_sim", "% answer in most similar sentence", stats.pct_ans_in_sim),
        _row("stats", "pct_solved_k2", "% solved with first 2 question tokens", stats.pct_solved_k2),
        _row("stats", "hard_pct", "% hard subset", stats.hard_pct),
    ]

    for evaluation in sorted(
        evaluations or [],
        key=lambda e: (SCORE_VARIANT_ORDER.index(e.variant), e.system_name),
    ):
        for metric, value in evaluation.aggregates.items():
            rows.append(
                _row(
                    "scores",
                    f"{evaluation.variant}:{evaluation.system_name}:{metric}",
                    f"{evaluation.variant} questions, {evaluation.system_name}, {metric}",
                    100.0 * value,
                )
            )

    if subset_result is not None:
        for subset in SUBSETS:
            block = subset_result[subset]
            if block["aggregates"] is None:
                rows.append(
                    _row(
                        "subsets",
                        f"{subset}:count",
                        f"{subset} subset size",
                        block["count"],
                    )
                )
                rows.append(
                    ReportRow(
                        "subsets",
                        f"{subset}:aggregate",
                        f"{subset} subset aggregate",
                        None,
                        "n/a (0 items)",
                    )
                )
                continue
            rows.append(
                _row("subsets", f"{subset}:count", f"{subset} subset size", block["count"])
            )
            for metric, value in block["aggregates"].items():
                rows.append(
                    _row(
                        "subsets",
                        f"{subset}:{metric}",
                        f"{subset} subset {metric}",
                        100.0 * value,
                    )
                )

    if distribution is not None:
        for subset in SUBSETS:
            if subset not in distribution:
                continue
            block = distribution[subset]
            rows.append(
                _row("annotation", f"{subset}:n", f"{subset} annotated items", block["n"])
            )
            for label in VALIDITY_LABELS:
                rows.append(
                    _row(
                        "annotation",
                        f"{subset}:validity:{label}",
                        f"{subset} validity {label}",
                        block["validity"][label],
                    )
                )
            for label in SKILL_LABELS:
                rows.append(
                    _row(
                        "annotation",
                        f"{subset}:skill:{label}",
                        f"{subset} skill {label}",
                        block["skill"][label],
                    )
                )
            rows.append(
                _row(
                    "annotation",
                    f"{subset}:multi_sentence",
                    f"{subset} multi-sentence reasoning",
                    block["multi_sentence"],
                )
            )
            for label in RELATION_LABELS:
                rows.append(
                    _row(
                        "annotation",
                        f"{subset}:relation:{label}",
                        f"{subset} relation {label} (of valid)",
                        block["relation_over_valid"][label],
                    )
                )
            for label in RELATION_LABELS:
                rows.append(
                    _row(
                        "annotation",
                        f"{subset}:relation_multi:{label}",
                        f"{subset} relation {label} (of multi-sentence)",
                        block["relation_over_multi"][label],
                    )
                )

    for corr in correlations or []:
        key = corr["label"].replace(":", "_")
        rows.append(
            _row("correlation", f"{key}:n", f"{corr['label']} n", corr["n"])
        )
        rows.append(
            _row("correlation", f"{key}:r", f"{corr['label']} r", corr.get("r"))
        )
        rows.append(
            _row("correlation", f"{key}:p", f"{corr['label']} p", corr.get("p"))
        )
    return rows


def render_text(rows: list, provenance: dict) -> str:
    out = ["dataset analysis report", "=" * 23, ""]
    for key in sorted(provenance):
        out.append(f"# {key} = {provenance[key]}")
    section = None
    width = max(len(r.label) for r in rows) + 2
    for row in rows:
        if row.section != section:
            section = row.section
            out.append("")
            out.append(f"[{section}]")
        out.append(f"  {row.label.ljust(width)}{row.display}")
    out.append("")
    return "\n".join(out)


def render_csv(rows: list, provenance: dict) -> str:
    buffer = io.StringIO()
    for key in sorted(provenance):
        buffer.write(f"# {key} = {provenance[key]}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["section", "row", "label", "value", "display"])
    for row in rows:
        writer.writerow(
            [
                row.section,
                row.row,
                row.label,
                "" if row.value is None else row.display,
                row.display,
            ]
        )
    return buffer.getvalue()


def render_jsonl(rows: list, provenance: dict) -> str:
    lines = [json.dumps({"_provenance": provenance}, ensure_ascii=False, sort_keys=True)]
    for row in rows:
        lines.append(
            json.dumps(
                {
                    "section": row.section,
                    "row": row.row,
                    "label": row.label,
                    "value": row.value,
                    "display": row.display,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"


def build_report(
    stats: DatasetStats,
    provenance: dict,
    evaluations: list | None = None,
    subset_result: dict | None = None,
    distribution: dict | None = None,
    correlations: list | None = None,
) -> dict:
    """All three renderings of the same rows; keys text, csv, jsonl."""
    rows = build_rows(stats, evaluations, subset_result, distribution, correlations)
    return {
        "text": render_text(rows, provenance),
        "csv": render_csv(rows, provenance),
        "jsonl": render_jsonl(rows, provenance),
    }
