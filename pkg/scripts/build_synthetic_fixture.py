#!/usr/bin/env python3
"""Regenerate the bundled 40-item synthetic fixture.

The fixture exercises the full pipeline with scripted fake predictions
whose subset aggregates are known by construction:

  items 0-13   k2 prediction correct  (solved ratio 14/40 = 35%)
  items 0-7, 14-27   answer placed in the most similar sentence (22/40)
  items 28-39  neither -> the hard subset (12/40 = 30%)
  full prediction correct on 0-9, 14-19, 28-30 (19 items)
      easy aggregate 16/28, hard aggregate 3/12

Deterministic, no RNG; rerunning must reproduce the committed files
byte for byte (a test checks this).
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

DEFAULT_OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic"

SOLVED_K2 = set(range(0, 14))
IN_SIM = set(range(0, 8)) | set(range(14, 28))
FULL_CORRECT = set(range(0, 10)) | set(range(14, 20)) | set(range(28, 31))
N = 40
WRONG = "zzz qqq"


def make_item(i: int) -> dict:
    subject = f"velder{i}"
    year = str(1900 + i)
    if i in IN_SIM:
        # question vocabulary concentrates in the sentence holding the answer
        context = (
            f"The {subject} catalog stores records about regional plants. "
            f"The famous {subject} specimen was found in {year}. "
            f"Collectors admired it greatly."
        )
    else:
        # question vocabulary concentrates in the first sentence, answer in the second
        context = (
            f"The {subject} catalog stores records about the famous {subject} specimen. "
            f"The specimen was located in {year} by chance. "
            f"Collectors admired it greatly."
        )
    return {
        "id": f"s{i:02d}",
        "style": "extraction",
        "context": context,
        "question": f"When was the famous {subject} specimen found?",
        "answers": [year],
        "meta": {},
    }


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    OUT = parser.parse_args(argv).out
    OUT.mkdir(parents=True, exist_ok=True)
    items = [make_item(i) for i in range(N)]

    header = {
        "_provenance": {
            "dataset_id": "synthetic40",
            "style": "extraction",
            "tool": "mrcsplit",
            "version": "0.1.0",
            "created_at": 0,
            "command": "ingest",
            "source": "scripts/build_synthetic_fixture.py",
        }
    }
    with open(OUT / "dataset.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for item in items:
            fh.write(json.dumps(item, ensure_ascii=False) + "\n")

    def prediction_file(correct: set, variant: str) -> dict:
        return {
            "header": {"dataset_id": "synthetic40", "variant": variant, "system": "scripted"},
            "predictions": {
                item["id"]: (item["answers"][0] if i in correct else WRONG)
                for i, item in enumerate(items)
            },
        }

    with open(OUT / "preds_full.json", "w", encoding="utf-8") as fh:
        json.dump(prediction_file(FULL_CORRECT, "full"), fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(OUT / "preds_k2.json", "w", encoding="utf-8") as fh:
        json.dump(prediction_file(SOLVED_K2, "k2"), fh, indent=1, sort_keys=True)
        fh.write("\n")

    hard = [i for i in range(N) if i not in SOLVED_K2 and i not in IN_SIM]
    easy = [i for i in range(N) if i not in hard]
    expected = {
        "n_questions": N,
        "pct_ans_in_sim": 100.0 * len(IN_SIM) / N,
        "solved_pct": 100.0 * len(SOLVED_K2) / N,
        "hard_pct": 100.0 * len(hard) / N,
        "easy_count": len(easy),
        "hard_count": len(hard),
        "full_em_pct": 100.0 * len(FULL_CORRECT) / N,
        "easy_em_pct": 100.0 * len(FULL_CORRECT & set(easy)) / len(easy),
        "hard_em_pct": 100.0 * len(FULL_CORRECT & set(hard)) / len(hard),
        "hard_ids": [f"s{i:02d}" for i in hard],
        "in_sim_ids": [f"s{i:02d}" for i in sorted(IN_SIM)],
    }
    with open(OUT / "expected.json", "w", encoding="utf-8") as fh:
        json.dump(expected, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote fixture to {OUT}")
    print(json.dumps(expected, indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
