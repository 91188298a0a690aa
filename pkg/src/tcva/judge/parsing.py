"""Tolerant parsing of judge replies.

Judges are asked for a bare JSON object, but replies often arrive wrapped in
prose or markdown fences. The first JSON object carrying the expected key is
used.
"""
from __future__ import annotations

import json
import logging
from typing import Iterator

from ..aggregation import VerdictLevel
from ..errors import JudgeParseError

log = logging.getLogger(__name__)

_decoder = json.JSONDecoder()


def iter_json_objects(raw: str) -> Iterator[dict]:
    pos = raw.find("{")
    while pos != -1:
        try:
            obj, end = _decoder.raw_decode(raw, pos)
        except json.JSONDecodeError:
            pos = raw.find("{", pos + 1)
            continue
        if isinstance(obj, dict):
            yield obj
        pos = raw.find("{", end)


def _first_with(raw: str, *keys: str) -> dict | None:
    for obj in iter_json_objects(raw):
        if any(k in obj for k in keys):
            return obj
    return None


def parse_judge_response(raw: str) -> tuple[VerdictLevel, str]:
    """Return ``(level, reasoning)`` from a verdict reply.

    Raises :class:`JudgeParseError` when no payload with a recognizable
    level is found. Empty reasoning is logged, not rejected.
    """
    level, reasoning, _ = parse_verdict_payload(raw)
    return level, reasoning


def parse_verdict_payload(raw: str) -> tuple[VerdictLevel, str, str | None]:
    obj = _first_with(raw, "verdict", "level")
    if obj is None:
        raise JudgeParseError("no JSON verdict payload in judge reply", raw=raw)
    value = obj.get("verdict", obj.get("level"))
    try:
        level = VerdictLevel.parse(value)
    except ValueError:
        raise JudgeParseError(f"unrecognized verdict level {value!r}", raw=raw) from None
    reasoning = str(obj.get("reasoning") or obj.get("reason") or "").strip()
    if not reasoning:
        log.warning("judge returned verdict %s without reasoning", level.value)
    excerpt = obj.get("context_excerpt")
    excerpt = str(excerpt).strip() if excerpt else None
    return level, reasoning, excerpt or None


def parse_claims_response(raw: str) -> list[str]:
    obj = _first_with(raw, "claims", "statements")
    if obj is None:
        raise JudgeParseError("no JSON claims payload in judge reply", raw=raw)
    items = obj.get("claims", obj.get("statements"))
    if not isinstance(items, list):
        raise JudgeParseError("claims payload is not a list", raw=raw)
    out = []
    for item in items:
        if isinstance(item, dict):
            item = item.get("text") or item.get("statement") or ""
        text = str(item).strip()
        if text:
            out.append(text)
    return out
