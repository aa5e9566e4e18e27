"""Provenance headers for every artifact the pipeline writes.

Each line-record artifact starts with a single line whose only key is
``_provenance``; readers treat it as file metadata, not a record. The
header pins everything that affects downstream numbers (stopword-file
hash, overlap mode, beta, thresholds, seeds) plus a timestamp that can be
frozen with --epoch for byte-identical reruns.
"""

from __future__ import annotations

import json
import time

from .errors import MalformedFile, ProvenanceMismatch

TOOL_NAME = "mrcsplit"
TOOL_VERSION = "0.1.0"

# Keys that must agree when artifacts are merged into one report.
_MERGE_KEYS = ("stopword_sha256", "overlap_mode")


def make_provenance(command: str, *, epoch: int | None = None, **fields) -> dict:
    header = {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "created_at": int(epoch if epoch is not None else time.time()),
        "command": command,
    }
    for key, value in fields.items():
        if value is not None:
            header[key] = value
    return header


def dumps_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False)


def write_jsonl(path, records, provenance: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if provenance is not None:
            fh.write(dumps_record({"_provenance": provenance}) + "\n")
        for record in records:
            fh.write(dumps_record(record) + "\n")


def read_jsonl(path) -> tuple[dict | None, list[dict]]:
    """Read a line-record file, splitting off the provenance header if present."""
    provenance = None
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedFile(f"{path}:{lineno}: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise MalformedFile(f"{path}:{lineno}: expected an object per line")
            if lineno == 1 and set(obj) == {"_provenance"}:
                provenance = obj["_provenance"]
                continue
            records.append(obj)
    return provenance, records


def check_merge_compatible(headers) -> None:
    """Refuse to merge artifacts whose stopword hash or overlap mode disagree."""
    seen: dict[str, tuple[str, object]] = {}
    for source, header in headers:
        if not header:
            continue
        for key in _MERGE_KEYS:
            if key not in header:
                continue
            if key in seen and seen[key][1] != header[key]:
                first_src, first_val = seen[key]
                raise ProvenanceMismatch(
                    f"{key} differs between inputs: "
                    f"{first_src}={first_val!r} vs {source}={header[key]!r}"
                )
            seen.setdefault(key, (source, header[key]))
