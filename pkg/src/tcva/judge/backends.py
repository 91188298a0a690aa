"""Judge backends.

A backend turns a :class:`JudgeRequest` into the judge's raw text reply.
Requests carry both the rendered chat messages (for real models) and the
structured sample/claim (so deterministic mocks need not parse prompts).
"""
from __future__ import annotations

import abc
import json
import os
import re
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping

import httpx

from ..aggregation import VerdictLevel
from ..errors import JudgeError, JudgeTransportError
from .types import Claim, EvaluationSample, MetricConfig

EXTRACT = "extract"
VERDICT = "verdict"


@dataclass(frozen=True)
class JudgeRequest:
    kind: str  # EXTRACT or VERDICT
    messages: list[dict]
    sample: EvaluationSample
    config: MetricConfig
    claim: Claim | None = None
    attempt: int = 0


class JudgeBackend(abc.ABC):
    model_id: str

    @abc.abstractmethod
    def complete(self, request: JudgeRequest) -> str:
        """Return the judge's raw reply text."""


_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")
_WORD = re.compile(r"[a-z0-9]+")
_STOPWORDS = frozenset(
    "the a an and or of to in on at for with by from is are was were be been "
    "it its this that these those as may can also there their they he she "
    "has have had not but".split()
)


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_END.split(text.strip()) if s.strip()]


def _content_words(text: str) -> set[str]:
    return {w for w in _WORD.findall(text.lower()) if w not in _STOPWORDS and len(w) > 2}


def overlap_level(claim: str, reference: str) -> tuple[VerdictLevel, float]:
    """Map the share of the claim's content words found in ``reference`` to a level."""
    words = _content_words(claim)
    if not words:
        return VerdictLevel.MOSTLY, 1.0
    share = len(words & _content_words(reference)) / len(words)
    if share >= 0.9:
        level = VerdictLevel.FULLY
    elif share >= 0.7:
        level = VerdictLevel.MOSTLY
    elif share >= 0.45:
        level = VerdictLevel.PARTIALLY
    elif share >= 0.15:
        level = VerdictLevel.MINOR
    else:
        level = VerdictLevel.NONE
    return level, share


class ScriptedJudge(JudgeBackend):
    """Deterministic offline judge.

    ``claims`` maps sample ids to the claim list to return; other samples are
    split into sentences. ``levels`` maps claim text to a verdict level, or is
    a callable ``(claim_text, sample) -> level``; unmapped claims are graded by
    content-word overlap with the contexts (faithfulness) or with the question
    (any other metric). Holds no mutable state, so it is safe to share across
    threads.
    """

    def __init__(
        self,
        claims: Mapping[str, list[str]] | None = None,
        levels: "Mapping[str, VerdictLevel | str] | Callable | None" = None,
        model_id: str = "scripted-mock-v1",
    ):
        self.claims = dict(claims or {})
        self.levels = levels if callable(levels) else dict(levels or {})
        self.model_id = model_id

    def complete(self, request: JudgeRequest) -> str:
        if request.kind == EXTRACT:
            claims = self.claims.get(request.sample.id)
            if claims is None:
                claims = split_sentences(request.sample.answer)
            return json.dumps({"claims": list(claims)})
        return json.dumps(self._verdict(request.claim.text, request.sample, request.config))

    def _verdict(self, text: str, sample: EvaluationSample, config: MetricConfig) -> dict:
        if config.metric_name == "faithfulness":
            passages = list(sample.contexts)
        else:
            passages = [sample.question]
        best = max(passages, key=lambda p: overlap_level(text, p)[1], default="")
        if callable(self.levels):
            level = VerdictLevel.parse(self.levels(text, sample))
            reasoning = "scripted verdict"
        elif text in self.levels:
            level = VerdictLevel.parse(self.levels[text])
            reasoning = "scripted verdict"
        else:
            level, share = overlap_level(text, " ".join(passages))
            reasoning = f"{share:.0%} of the statement's content words occur in the reference"
        return {"context_excerpt": best, "reasoning": reasoning, "verdict": level.value.lower()}


class CountingJudge(JudgeBackend):
    """Wraps a backend and tallies calls per request kind."""

    def __init__(self, inner: JudgeBackend):
        self.inner = inner
        self.model_id = inner.model_id
        self.calls: Counter = Counter()
        self._lock = threading.Lock()

    def complete(self, request: JudgeRequest) -> str:
        with self._lock:
            self.calls[request.kind] += 1
        return self.inner.complete(request)

    @property
    def total(self) -> int:
        return sum(self.calls.values())


@dataclass
class ChatCompletionJudge(JudgeBackend):
    """Judge served by an OpenAI-compatible ``/chat/completions`` endpoint.

    The API key is read from the environment variable named by
    ``api_key_env`` at call time; it is never stored in config files.
    """

    model_id: str
    endpoint: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    json_mode: bool = True
    client: httpx.Client | None = field(default=None, repr=False)

    def _client(self) -> httpx.Client:
        if self.client is None:
            self.client = httpx.Client(timeout=self.timeout)
        return self.client

    def complete(self, request: JudgeRequest) -> str:
        body = {"model": self.model_id, "messages": request.messages, "temperature": 0}
        if self.json_mode:
            body["response_format"] = {"type": "json_object"}
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        url = self.endpoint.rstrip("/") + "/chat/completions"
        try:
            resp = self._client().post(url, json=body, headers=headers)
        except httpx.HTTPError as exc:
            raise JudgeTransportError(f"request to {url} failed: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise JudgeTransportError(f"{url} returned HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise JudgeError(f"{url} returned HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise JudgeTransportError(f"malformed completion body from {url}") from exc
