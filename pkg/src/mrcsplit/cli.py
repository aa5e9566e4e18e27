"""Command-line entry point binding the pipeline stages together.

Stages communicate through files so external model inference can happen
between them: export a truncated variant, run a model elsewhere, bring
its prediction file back for scoring. Every artifact starts with a
provenance line echoing the effective config; `--epoch` freezes the
timestamp so reruns are byte-identical.

Exit codes: 0 success, 1 tool error (machine-readable record on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import provenance as prov
from .annotate import (
    AnnotationRecord,
    correlate_labels,
    label_distribution,
    sample_for_annotation,
    validate_record,
)
from .corpus import (
    QuestionStyle,
    export_dataset,
    ingest_extraction,
    ingest_multiple_choice,
    item_flags,
    load_canonical,
    validate,
)
from .errors import (
    CoverageGap,
    MalformedFile,
    SchemaViolation,
    ToolError,
    UnknownTaskId,
    VariantMismatch,
)
from .heuristics import (
    DEFAULT_OVERLAP_MODE,
    OVERLAP_MODES,
    SimilarityProfile,
    SpanProjection,
    profile_dataset,
    project_item,
    sim_only_dataset,
    truncate_dataset,
)
from .metrics import DEFAULT_BETA, PRIMARY_METRIC
from .partition import (
    SOLVED_THRESHOLD,
    SubsetAssignment,
    partition,
    solved_ratio_k2,
    subset_evaluate,
)
from .predictions import (
    dataset_variant,
    evaluate,
    load_predictions,
    read_scores,
    write_scores,
)
from .report import build_report, dataset_stats, round2
from .server import create_server, load_tasks
from .textproc import default_stopwords, load_stopwords

STYLE_TAGS = tuple(style.value for style in QuestionStyle)


def _print_json(payload) -> None:
    sys.stdout.write(
        json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    )


def _stopwords(args):
    path = getattr(args, "stopwords", None)
    return load_stopwords(path) if path else default_stopwords()


def _pct(value: float | None):
    return None if value is None else float(round2(100.0 * value))


def _carry_merge_keys(header: dict, *input_headers) -> dict:
    for source in input_headers:
        if not source:
            continue
        for key in ("stopword_sha256", "overlap_mode"):
            if key in source:
                header.setdefault(key, source[key])
    return header


def _load_profiles(path):
    header, records = prov.read_jsonl(path)
    profiles = {}
    for record in records:
        profile = SimilarityProfile.from_record(record)
        profiles[profile.item_id] = profile
    if not profiles:
        raise MalformedFile(f"{path}: no similarity profiles")
    return header, profiles


def _load_projections(path):
    header, records = prov.read_jsonl(path)
    projections = {}
    for record in records:
        projection = SpanProjection.from_record(record)
        projections[projection.item_id] = projection
    return header, projections


def _load_assignments(path):
    header, records = prov.read_jsonl(path)
    assignments = [SubsetAssignment.from_record(record) for record in records]
    if not assignments:
        raise MalformedFile(f"{path}: no subset assignments")
    return header, assignments


def _load_records(path):
    header, rows = prov.read_jsonl(path)
    records = []
    for row in rows:
        violations = validate_record(row)
        if violations:
            raise SchemaViolation(
                f"{path}: invalid annotation record for task "
                f"{row.get('task_id')!r}: {'; '.join(violations)}"
            )
        records.append(AnnotationRecord.from_record(row))
    return header, records


def _load_hidden(path):
    header, rows = prov.read_jsonl(path)
    hidden = {row["task_id"]: row for row in rows}
    if not hidden:
        raise MalformedFile(f"{path}: empty unblinding join")
    return header, hidden


def _metric_scores(evaluation, metric: str | None) -> tuple[str, dict]:
    chosen = metric or PRIMARY_METRIC[evaluation.style]
    sample = next(iter(evaluation.per_item.values()))
    if chosen not in sample:
        raise CoverageGap(
            f"score file has no {chosen!r} column (has {sorted(sample)})"
        )
    return chosen, {i: scores[chosen] for i, scores in evaluation.per_item.items()}


def _chunks(items, n_chunks: int):
    size = max(1, (len(items) + n_chunks - 1) // n_chunks)
    for lo in range(0, len(items), size):
        yield items[lo : lo + size]


def _profile_chunk(sub_items, dataset, stopword_path, mode, beta, max_len, projections):
    sub = dataclasses.replace(dataset, items=tuple(sub_items))
    stopwords = load_stopwords(stopword_path) if stopword_path else default_stopwords()
    return profile_dataset(sub, stopwords, mode, beta, max_len, projections)


def _project_chunk(sub_items, style_tag, beta, max_len):
    style = QuestionStyle.from_tag(style_tag)
    return [project_item(item, style, beta, max_len) for item in sub_items]


def _parallel_map(worker, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return worker(list(items))
    out = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for chunk_result in pool.map(worker, _chunks(list(items), jobs * 4)):
            out.extend(chunk_result)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args) -> int:
    style = QuestionStyle.from_tag(args.style)
    if style is QuestionStyle.MULTIPLE_CHOICE:
        dataset = ingest_multiple_choice(
            args.input,
            args.format,
            dataset_id=args.dataset_id,
            strict=args.strict,
            epoch=args.epoch,
        )
    else:
        dataset = ingest_extraction(
            args.input,
            args.format,
            dataset_id=args.dataset_id,
            style=style,
            strict=args.strict,
            drop_empty_answers=args.drop_empty_answers,
            epoch=args.epoch,
        )
    header = prov.make_provenance(
        "ingest", epoch=args.epoch, source=str(args.input), format=args.format
    )
    export_dataset(dataset, args.output, header)
    _print_json(
        {
            "dataset_id": dataset.dataset_id,
            "style": dataset.style.value,
            "items": len(dataset),
        }
    )
    return 0


def cmd_validate(args) -> int:
    dataset = load_canonical(args.input, strict=args.strict)
    issue_report = validate(dataset)
    _print_json(
        {
            "ok": issue_report.ok,
            "errors": sum(1 for i in issue_report if i.severity == "error"),
            "warnings": sum(1 for i in issue_report if i.severity == "warning"),
            "issues": [
                {
                    "severity": i.severity,
                    "code": i.code,
                    "message": i.message,
                    "item_ids": list(i.item_ids),
                    "positions": list(i.positions),
                }
                for i in issue_report
            ],
        }
    )
    return 1 if issue_report.has_errors else 0


def cmd_stats(args) -> int:
    dataset = load_canonical(args.input)
    profile_header, profiles = _load_profiles(args.profiles)
    headers = [(str(args.profiles), profile_header)]
    solved = None
    hard_fraction = None
    if args.k2_scores:
        score_header, evaluation = read_scores(args.k2_scores)
        headers.append((str(args.k2_scores), score_header))
        if score_header.get("variant") != "k2":
            raise VariantMismatch(
                f"{args.k2_scores}: solved ratio needs k2-variant scores, "
                f"got {score_header.get('variant')!r}"
            )
        _, scores = _metric_scores(evaluation, args.metric)
        solved = solved_ratio_k2(dataset.style, scores, args.threshold)
    if args.assignments:
        assign_header, assignments = _load_assignments(args.assignments)
        headers.append((str(args.assignments), assign_header))
        hard_fraction = sum(1 for a in assignments if a.subset == "hard") / len(
            assignments
        )
    prov.check_merge_compatible(headers)
    stats = dataset_stats(dataset, profiles, solved, hard_fraction)
    _print_json(
        {
            "dataset_id": dataset.dataset_id,
            "style": dataset.style.value,
            "n_questions": stats.n_questions,
            "avg_context_tokens": stats.avg_context_tokens,
            "avg_question_tokens": stats.avg_question_tokens,
            "avg_context_sentences": stats.avg_context_sentences,
            "pct_ans_in_sim": stats.pct_ans_in_sim,
            "pct_solved_k2": stats.pct_solved_k2,
            "hard_pct": stats.hard_pct,
        }
    )
    return 0


def cmd_truncate(args) -> int:
    dataset = load_canonical(args.input)
    variant = f"k{args.k}"
    out = truncate_dataset(dataset, args.k)
    header = prov.make_provenance(
        "truncate", epoch=args.epoch, k=args.k, variant=variant
    )
    export_dataset(out, args.output, header)
    _print_json({"items": len(out), "variant": variant})
    return 0


def cmd_similar(args) -> int:
    dataset = load_canonical(args.input)
    stopwords = _stopwords(args)
    projections = None
    projection_header = None
    if args.projections:
        projection_header, projections = _load_projections(args.projections)
    worker = partial(
        _profile_chunk,
        dataset=dataset,
        stopword_path=args.stopwords,
        mode=args.overlap_mode,
        beta=args.beta,
        max_len=args.max_len,
        projections=projections,
    )
    profiles = _parallel_map(worker, dataset.items, args.jobs)
    header = prov.make_provenance(
        "similar",
        epoch=args.epoch,
        stopword_sha256=stopwords.sha256,
        overlap_mode=args.overlap_mode,
        beta=args.beta,
        max_len=args.max_len,
        dataset_id=dataset.dataset_id,
    )
    _carry_merge_keys(header, projection_header)
    prov.write_jsonl(args.output, (p.to_record() for p in profiles), header)
    _print_json(
        {
            "items": len(profiles),
            "answer_in_most_similar": sum(
                1 for p in profiles if p.answer_in_most_similar
            ),
            "zero_overlap": sum(1 for p in profiles if p.zero_overlap),
        }
    )
    return 0


def cmd_project(args) -> int:
    dataset = load_canonical(args.input)
    max_len = 0 if args.unbounded else args.max_len
    worker = partial(
        _project_chunk,
        style_tag=dataset.style.value,
        beta=args.beta,
        max_len=max_len,
    )
    projections = _parallel_map(worker, dataset.items, args.jobs)
    header = prov.make_provenance(
        "project",
        epoch=args.epoch,
        beta=args.beta,
        max_len="unbounded" if args.unbounded else args.max_len,
        dataset_id=dataset.dataset_id,
    )
    prov.write_jsonl(args.output, (p.to_record() for p in projections), header)
    _print_json(
        {
            "items": len(projections),
            "no_lexical_anchor": sum(1 for p in projections if p.no_lexical_anchor),
        }
    )
    return 0


def cmd_sim_only(args) -> int:
    dataset = load_canonical(args.input)
    profile_header, profiles = _load_profiles(args.profiles)
    out = sim_only_dataset(dataset, profiles)
    header = prov.make_provenance("sim-only", epoch=args.epoch, variant="sim_only")
    _carry_merge_keys(header, profile_header)
    export_dataset(out, args.output, header)
    lost = sum(
        1 for item in out.items if "gold_not_in_context" in item_flags(item, out.style)
    )
    _print_json({"items": len(out), "gold_not_in_context": lost})
    return 0


def cmd_evaluate(args) -> int:
    dataset = load_canonical(args.input)
    expected = dataset_variant(dataset)
    preds = load_predictions(args.predictions, dataset, expected, args.strict)
    evaluation = evaluate(dataset, preds, args.beta)
    header = prov.make_provenance("evaluate", epoch=args.epoch, beta=args.beta)
    write_scores(args.output, evaluation, header)
    _print_json(
        {
            "dataset_id": evaluation.dataset_id,
            "variant": evaluation.variant,
            "system": evaluation.system_name,
            "aggregates": {
                metric: _pct(value) for metric, value in evaluation.aggregates.items()
            },
            "missing": len(evaluation.missing),
        }
    )
    return 0


def cmd_solved_ratio(args) -> int:
    header, evaluation = read_scores(args.scores)
    if header.get("variant") != "k2":
        raise VariantMismatch(
            f"{args.scores}: solved ratio is defined on k2-variant scores, "
            f"got {header.get('variant')!r}"
        )
    metric, scores = _metric_scores(evaluation, args.metric)
    ratio = solved_ratio_k2(evaluation.style, scores, args.threshold)
    _print_json(
        {
            "metric": metric,
            "threshold": args.threshold,
            "solved_pct": _pct(ratio),
            "items": len(scores),
        }
    )
    return 0


def cmd_partition(args) -> int:
    dataset = load_canonical(args.input)
    score_header, evaluation = read_scores(args.k2_scores)
    profile_header, profiles = _load_profiles(args.profiles)
    prov.check_merge_compatible(
        [(str(args.k2_scores), score_header), (str(args.profiles), profile_header)]
    )
    metric, k2_scores = _metric_scores(evaluation, args.hard_metric)
    assignments, hard_fraction = partition(
        dataset, k2_scores, profiles, scores_variant=score_header.get("variant", "full")
    )
    header = prov.make_provenance(
        "partition", epoch=args.epoch, hard_metric=metric
    )
    _carry_merge_keys(header, profile_header, score_header)
    prov.write_jsonl(args.output, (a.to_record() for a in assignments), header)
    _print_json(
        {
            "hard_pct": _pct(hard_fraction),
            "easy": sum(1 for a in assignments if a.subset == "easy"),
            "hard": sum(1 for a in assignments if a.subset == "hard"),
            "hard_metric": metric,
        }
    )
    return 0


def cmd_subset_eval(args) -> int:
    dataset = load_canonical(args.input)
    assign_header, assignments = _load_assignments(args.assignments)
    preds = load_predictions(args.predictions, dataset, "full", args.strict)
    evaluation = evaluate(dataset, preds, args.beta)
    result = subset_evaluate(assignments, evaluation)
    del assign_header
    _print_json(
        {
            subset: {
                "count": block["count"],
                "aggregates": None
                if block["aggregates"] is None
                else {m: _pct(v) for m, v in block["aggregates"].items()},
            }
            for subset, block in result.items()
        }
    )
    return 0


def cmd_sample(args) -> int:
    dataset = load_canonical(args.input)
    assign_header, assignments = _load_assignments(args.assignments)
    tasks, hidden = sample_for_annotation(assignments, dataset, args.n, args.seed)
    task_header = prov.make_provenance(
        "sample", epoch=args.epoch, sample_size=args.n, seed=args.seed
    )
    prov.write_jsonl(args.output, (t.payload() for t in tasks), task_header)
    hidden_header = prov.make_provenance(
        "sample", epoch=args.epoch, sample_size=args.n, seed=args.seed, hidden=True
    )
    _carry_merge_keys(hidden_header, assign_header)
    prov.write_jsonl(
        args.hidden,
        ({"task_id": task_id, **join} for task_id, join in hidden.items()),
        hidden_header,
    )
    _print_json({"tasks": len(tasks), "per_subset": args.n})
    return 0


def cmd_serve(args) -> int:
    tasks = load_tasks(args.tasks)
    header = prov.make_provenance("serve", epoch=args.epoch, tasks=len(tasks))
    server = create_server(
        tasks,
        args.store,
        host=args.host,
        port=args.port,
        allow_export=args.allow_export,
        ui_dir=args.ui_dir,
        lease_seconds=args.lease_seconds,
        header=header,
    )
    host, port = server.server_address[:2]
    sys.stderr.write(f"serving {len(tasks)} tasks on http://{host}:{port}\n")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_correlate(args) -> int:
    record_header, records = _load_records(args.records)
    hidden_header, hidden = _load_hidden(args.hidden)
    score_header, evaluation = read_scores(args.scores)
    if score_header.get("variant", "full") != "full":
        raise VariantMismatch(
            f"{args.scores}: correlation uses full-variant scores, "
            f"got {score_header.get('variant')!r}"
        )
    prov.check_merge_compatible(
        [
            (str(args.records), record_header),
            (str(args.hidden), hidden_header),
            (str(args.scores), score_header),
        ]
    )
    metric, item_scores = _metric_scores(evaluation, args.metric)
    rows = correlate_labels(
        records, hidden, item_scores, method=args.method,
        permutations=args.permutations, seed=args.seed,
    )
    if args.cross_check and args.method == "analytic":
        perm_rows = correlate_labels(
            records, hidden, item_scores, method="permutation",
            permutations=args.permutations, seed=args.seed,
        )
        for row, perm in zip(rows, perm_rows):
            row["p_perm"] = perm["p"]
    if args.output:
        header = prov.make_provenance(
            "correlate",
            epoch=args.epoch,
            metric=metric,
            method=args.method,
            permutations=args.permutations,
            seed=args.seed,
        )
        _carry_merge_keys(header, record_header, hidden_header, score_header)
        prov.write_jsonl(args.output, rows, header)
    _print_json({"metric": metric, "rows": rows})
    return 0


def cmd_report(args) -> int:
    dataset = load_canonical(args.input)
    profile_header, profiles = _load_profiles(args.profiles)
    headers = [(str(args.profiles), profile_header)]

    evaluations = []
    for path in args.scores or []:
        score_header, evaluation = read_scores(path)
        headers.append((str(path), score_header))
        evaluations.append(evaluation)

    solved = None
    k2_eval = next((e for e in evaluations if e.variant == "k2"), None)
    if k2_eval is not None and dataset.style is not QuestionStyle.MULTIPLE_CHOICE:
        _, scores = _metric_scores(k2_eval, args.metric)
        solved = solved_ratio_k2(dataset.style, scores, args.threshold)

    hard_fraction = None
    subset_result = None
    assignments = None
    if args.assignments:
        assign_header, assignments = _load_assignments(args.assignments)
        headers.append((str(args.assignments), assign_header))
        hard_fraction = sum(1 for a in assignments if a.subset == "hard") / len(
            assignments
        )
        full_eval = next((e for e in evaluations if e.variant == "full"), None)
        if full_eval is not None:
            subset_result = subset_evaluate(assignments, full_eval)

    distribution = None
    correlations = None
    if args.records and args.hidden:
        record_header, records = _load_records(args.records)
        hidden_header, hidden = _load_hidden(args.hidden)
        headers.append((str(args.records), record_header))
        headers.append((str(args.hidden), hidden_header))
        distribution = label_distribution(
            records, {task_id: join["subset"] for task_id, join in hidden.items()}
        )
        full_eval = next((e for e in evaluations if e.variant == "full"), None)
        if full_eval is not None:
            _, item_scores = _metric_scores(full_eval, args.metric)
            correlations = correlate_labels(
                records, hidden, item_scores, method="analytic"
            )

    prov.check_merge_compatible(headers)
    stats = dataset_stats(dataset, profiles, solved, hard_fraction)
    header = prov.make_provenance(
        "report",
        epoch=args.epoch,
        dataset_id=dataset.dataset_id,
        style=dataset.style.value,
        threshold=args.threshold,
        answer_normalization="ascii punctuation plus unicode category P*",
    )
    _carry_merge_keys(header, *(h for _, h in headers))
    rendered = build_report(
        stats, header, evaluations, subset_result, distribution, correlations
    )
    written = []
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for suffix, key in (("txt", "text"), ("csv", "csv"), ("jsonl", "jsonl")):
        path = out_dir / f"report.{suffix}"
        path.write_text(rendered[key], encoding="utf-8")
        written.append(str(path))
    _print_json({"written": written})
    return 0


def cmd_unblind(args) -> int:
    record_header, records = _load_records(args.records)
    hidden_header, hidden = _load_hidden(args.hidden)
    joined = []
    for record in records:
        join = hidden.get(record.task_id)
        if join is None:
            raise UnknownTaskId(
                f"record references unknown task {record.task_id!r}"
            )
        row = dict(join)
        row.update(record.to_record())
        joined.append(row)
    header = prov.make_provenance("unblind", epoch=args.epoch)
    _carry_merge_keys(header, record_header, hidden_header)
    prov.write_jsonl(args.output, joined, header)
    _print_json({"records": len(joined)})
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrcsplit",
        description=(
            "Split reading comprehension datasets into easy and hard "
            "subsets, score external predictions, and run a blinded "
            "annotation study."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--epoch", type=int, default=None,
                       help="freeze provenance timestamps to this Unix time")
        return p

    p = add("ingest", cmd_ingest, "convert a source dataset to the canonical format")
    p.add_argument("--input", required=True)
    p.add_argument("--format", required=True, choices=["squad_json", "jsonl_canonical"])
    p.add_argument("--style", default="extraction", choices=list(STYLE_TAGS))
    p.add_argument("--dataset-id", default=None)
    p.add_argument("--output", required=True)
    p.add_argument("--strict", action="store_true",
                   help="reject unknown record fields instead of preserving them")
    p.add_argument("--drop-empty-answers", action="store_true")

    p = add("validate", cmd_validate, "check canonical-file invariants")
    p.add_argument("--input", required=True)
    p.add_argument("--strict", action="store_true")

    p = add("stats", cmd_stats, "dataset statistics (token/sentence averages, answer-in-sim rate)")
    p.add_argument("--input", required=True)
    p.add_argument("--profiles", required=True, help="similarity profile file from `similar`")
    p.add_argument("--k2-scores", default=None, help="score file from `evaluate` on the k2 variant")
    p.add_argument("--assignments", default=None, help="assignment file from `partition`")
    p.add_argument("--metric", default=None)
    p.add_argument("--threshold", type=float, default=SOLVED_THRESHOLD)

    p = add("truncate", cmd_truncate, "export the first-k-tokens question variant")
    p.add_argument("--input", required=True)
    p.add_argument("--k", required=True, type=int, choices=[1, 2, 4])
    p.add_argument("--output", required=True)

    p = add("similar", cmd_similar, "per-sentence question overlap and most-similar sentence")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--stopwords", default=None, help="alternative stopword file")
    p.add_argument("--overlap-mode", default=DEFAULT_OVERLAP_MODE, choices=list(OVERLAP_MODES))
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--max-len", type=int, default=None,
                   help="span search cap for styles that need gold projection")
    p.add_argument("--projections", default=None, help="precomputed projection file from `project`")
    p.add_argument("--jobs", type=int, default=1)

    p = add("project", cmd_project, "gold answer span projection by best Rouge-L")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--unbounded", action="store_true", help="search all span lengths")
    p.add_argument("--jobs", type=int, default=1)

    p = add("sim-only", cmd_sim_only, "export the variant whose context is only the most similar sentence")
    p.add_argument("--input", required=True)
    p.add_argument("--profiles", required=True)
    p.add_argument("--output", required=True)

    p = add("evaluate", cmd_evaluate, "score an external prediction file against a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--output", required=True, help="per-item score file")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--strict", action="store_true",
                   help="fail when any item has no prediction")

    p = add("solved-ratio", cmd_solved_ratio, "fraction of items with k2 score at or above the threshold")
    p.add_argument("--scores", required=True, help="score file from `evaluate` on the k2 variant")
    p.add_argument("--threshold", type=float, default=SOLVED_THRESHOLD)
    p.add_argument("--metric", default=None)

    p = add("partition", cmd_partition, "assign every item to the easy or hard subset")
    p.add_argument("--input", required=True)
    p.add_argument("--k2-scores", required=True, help="score file from `evaluate` on the k2 variant")
    p.add_argument("--profiles", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--hard-metric", default=None, choices=["em", "f1", "rouge_l", "accuracy"],
                   help="score column for the not-positive test (default: style primary)")

    p = add("subset-eval", cmd_subset_eval, "aggregate full-question scores over easy and hard subsets")
    p.add_argument("--input", required=True)
    p.add_argument("--assignments", required=True)
    p.add_argument("--predictions", required=True, help="full-variant prediction file")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--strict", action="store_true")

    p = add("sample", cmd_sample, "draw a blinded stratified annotation sample")
    p.add_argument("--input", required=True)
    p.add_argument("--assignments", required=True)
    p.add_argument("--n", type=int, default=30, help="items per subset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True, help="blinded task file")
    p.add_argument("--hidden", required=True, help="unblinding join, keep away from annotators")

    p = add("serve", cmd_serve, "run the annotation collection server")
    p.add_argument("--tasks", required=True)
    p.add_argument("--store", required=True, help="append-only record log")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--allow-export", action="store_true")
    p.add_argument("--ui-dir", default=None, help="serve this directory at / for the browser UI")
    p.add_argument("--lease-seconds", type=float, default=30 * 60)

    p = add("correlate", cmd_correlate, "Pearson correlation between labels and full-question scores")
    p.add_argument("--records", required=True, help="annotation record log")
    p.add_argument("--hidden", required=True)
    p.add_argument("--scores", required=True, help="score file from `evaluate` on the full variant")
    p.add_argument("--metric", default=None)
    p.add_argument("--method", default="analytic", choices=["analytic", "permutation"])
    p.add_argument("--permutations", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cross-check", action="store_true",
                   help="also report a permutation p for every row")
    p.add_argument("--output", default=None)

    p = add("report", cmd_report, "render the analysis report (text, csv, jsonl)")
    p.add_argument("--input", required=True)
    p.add_argument("--profiles", required=True)
    p.add_argument("--scores", nargs="*", default=[], help="score files from `evaluate` (any variants)")
    p.add_argument("--assignments", default=None)
    p.add_argument("--records", default=None)
    p.add_argument("--hidden", default=None)
    p.add_argument("--metric", default=None)
    p.add_argument("--threshold", type=float, default=SOLVED_THRESHOLD)
    p.add_argument("--output-dir", required=True)

    p = add("unblind", cmd_unblind, "join annotation records with their subset and item ids")
    p.add_argument("--records", required=True)
    p.add_argument("--hidden", required=True)
    p.add_argument("--output", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolError as exc:
        sys.stderr.write(
            json.dumps(
                {"error": type(exc).__name__, "message": str(exc)},
                ensure_ascii=False,
                sort_keys=True,
            )
            + "\n"
        )
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
