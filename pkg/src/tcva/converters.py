"""Convert public benchmark layouts into tcva dataset lines.

The converters take records that were already loaded (e.g. from a
HuggingFace export or the original JSON release) and yield dicts in the
dataset line format, keeping the raw Likert value together with its range
so :func:`tcva.harness.load_dataset` normalizes it.
"""
from __future__ import annotations

import json
from pathlib import Path
from statistics import fmean
from typing import Iterable, Iterator

SUMMEVAL_QUESTION = "Summarize the key information of the article."


def _mean_rating(value) -> float:
    if isinstance(value, (list, tuple)):
        return fmean(float(v) for v in value)
    return float(value)


def summeval_records(rows: Iterable[dict], dimension: str = "consistency") -> Iterator[dict]:
    """SummEval rows in the ``mteb/summeval`` layout.

    Each row holds one article (``text``) with parallel lists
    ``machine_summaries`` and per-dimension ratings on a 1-5 scale. Every
    machine summary becomes one sample; the article is its only context.
    Use ``dimension="consistency"`` for faithfulness and ``"relevance"`` for
    relevancy.
    """
    for row in rows:
        summaries = row["machine_summaries"]
        ratings = row[dimension]
        if len(summaries) != len(ratings):
            raise ValueError(f"row {row.get('id')}: summaries and {dimension} ratings differ in length")
        for j, (summary, rating) in enumerate(zip(summaries, ratings)):
            if not str(summary).strip():
                continue
            yield {
                "id": f"{row['id']}-{j}",
                "question": SUMMEVAL_QUESTION,
                "answer": summary,
                "contexts": [row["text"]],
                "human_score": _mean_rating(rating),
                "likert_range": [1, 5],
            }


def usr_records(
    dialogues: Iterable[dict],
    dimension: str = "Maintains Context",
    likert_range: tuple[float, float] = (1, 3),
    prefix: str = "usr",
) -> Iterator[dict]:
    """USR release layout: dialogues with ``context``, ``fact`` and ``responses``.

    Annotator ratings for ``dimension`` are averaged. The dialogue history is
    the question and the knowledge fact (if any) the context.
    """
    for i, dialogue in enumerate(dialogues):
        fact = str(dialogue.get("fact") or "").strip()
        contexts = [fact] if fact else []
        history = str(dialogue.get("context", "")).strip()
        for j, resp in enumerate(dialogue["responses"]):
            text = str(resp.get("response", "")).strip()
            if not text:
                continue
            yield {
                "id": f"{prefix}-{i}-{j}",
                "question": history,
                "answer": text,
                "contexts": contexts,
                "human_score": _mean_rating(resp[dimension]),
                "likert_range": list(likert_range),
            }


def write_jsonl(records: Iterable[dict], path: str | Path) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
            n += 1
    return n
