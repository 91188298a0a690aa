"""Claim extraction and per-claim verdicts, with retries and caching."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar

from ..errors import ContractViolation, ExtractionError, JudgeError, JudgeParseError, JudgeTransportError
from . import prompts
from .backends import EXTRACT, VERDICT, JudgeBackend, JudgeRequest
from .cache import VerdictCache
from .parsing import parse_claims_response, parse_verdict_payload
from .types import CachedEvaluation, Claim, EvaluationSample, MetricConfig, VerdictRecord

log = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class RetryPolicy:
    attempts: int = 3
    base_delay: float = 0.5
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False, compare=False)

    def wait(self, attempt: int) -> None:
        if self.base_delay > 0:
            self.sleep(self.base_delay * 2**attempt)


DEFAULT_RETRY = RetryPolicy()


def _ask(
    judge: JudgeBackend,
    request: JudgeRequest,
    parse: Callable[[str], T],
    policy: RetryPolicy,
) -> T:
    """Call the judge, retrying transport and parse failures.

    A parse failure re-asks with the bad reply and a format reminder appended.
    """
    messages = request.messages
    last_exc: JudgeError | None = None
    for attempt in range(policy.attempts):
        req = JudgeRequest(
            request.kind, messages, request.sample, request.config, request.claim, attempt
        )
        try:
            raw = judge.complete(req)
        except JudgeTransportError as exc:
            log.warning("judge transport error (attempt %d): %s", attempt + 1, exc)
            last_exc = exc
        else:
            try:
                return parse(raw)
            except JudgeParseError as exc:
                log.warning("unparseable judge reply (attempt %d): %s", attempt + 1, exc)
                last_exc = exc
                messages = prompts.with_format_reminder(request.messages, raw)
        if attempt + 1 < policy.attempts:
            policy.wait(attempt)
    assert last_exc is not None
    raise last_exc


def extract_claims(
    sample: EvaluationSample,
    config: MetricConfig,
    judge: JudgeBackend,
    policy: RetryPolicy = DEFAULT_RETRY,
) -> list[Claim]:
    """Decompose ``sample.answer`` into at most ``config.max_claims`` claims.

    Over-long lists are truncated by index rather than re-asked.
    """
    if not sample.answer.strip():
        raise ContractViolation(f"sample {sample.id!r} has an empty answer")
    request = JudgeRequest(EXTRACT, prompts.extraction_messages(sample, config), sample, config)
    raw_holder: list[str] = []

    def parse(raw: str) -> list[str]:
        raw_holder.append(raw)
        return parse_claims_response(raw)

    texts = _ask(judge, request, parse, policy)
    if not texts:
        raise ExtractionError(
            f"judge extracted no claims for sample {sample.id!r}", raw=raw_holder[-1]
        )
    return [Claim(i, t) for i, t in enumerate(texts[: config.max_claims])]


def assign_verdict(
    claim: Claim,
    sample: EvaluationSample,
    config: MetricConfig,
    judge: JudgeBackend,
    policy: RetryPolicy = DEFAULT_RETRY,
) -> VerdictRecord:
    request = JudgeRequest(
        VERDICT, prompts.verdict_messages(claim, sample, config), sample, config, claim
    )
    level, reasoning, excerpt = _ask(judge, request, parse_verdict_payload, policy)
    return VerdictRecord(claim, level, reasoning, excerpt)


def cache_key(sample_id: str, config: MetricConfig, judge: JudgeBackend) -> tuple[str, str, str, str]:
    return (sample_id, config.metric_name, judge.model_id, prompts.prompt_version(config))


def _judge_sample(sample, config, judge, policy) -> CachedEvaluation:
    claims = extract_claims(sample, config, judge, policy)
    verdicts = [assign_verdict(c, sample, config, judge, policy) for c in claims]
    return CachedEvaluation(
        sample_id=sample.id,
        metric_name=config.metric_name,
        claims=claims,
        verdicts=verdicts,
        judge_model_id=judge.model_id,
        prompt_version=prompts.prompt_version(config),
    )


def evaluate_sample(
    sample: EvaluationSample,
    config: MetricConfig,
    judge: JudgeBackend,
    cache: VerdictCache,
    policy: RetryPolicy = DEFAULT_RETRY,
) -> CachedEvaluation:
    """Return cached claims+verdicts for ``sample``, judging it on a miss.

    Failures propagate and nothing is persisted for the sample.
    """
    key = cache_key(sample.id, config, judge)
    with cache.key_lock(key):
        hit = cache.get(key)
        if hit is not None:
            return hit
        entry = _judge_sample(sample, config, judge, policy)
        cache.put(entry)
        return entry


@dataclass(frozen=True)
class SampleOutcome:
    sample_id: str
    evaluation: CachedEvaluation | None
    cache_hit: bool = False
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.evaluation is not None


def evaluate_dataset(
    samples: Sequence[EvaluationSample],
    config: MetricConfig,
    judge: JudgeBackend,
    cache: VerdictCache,
    parallelism: int = 1,
    policy: RetryPolicy = DEFAULT_RETRY,
) -> list[SampleOutcome]:
    """Evaluate every sample, up to ``parallelism`` at a time.

    Judge failures are captured per sample instead of aborting the run.
    New cache entries are written in dataset order regardless of
    parallelism, so the cache file is reproducible.
    """
    if parallelism < 1:
        raise ContractViolation("parallelism must be >= 1")
    ids = [s.id for s in samples]
    if len(set(ids)) != len(ids):
        raise ContractViolation("sample ids must be unique")

    def work(sample: EvaluationSample) -> SampleOutcome:
        key = cache_key(sample.id, config, judge)
        hit = cache.get(key)
        if hit is not None:
            return SampleOutcome(sample.id, hit, cache_hit=True)
        try:
            with cache.key_lock(key):
                entry = _judge_sample(sample, config, judge, policy)
        except JudgeError as exc:
            log.error("sample %s failed: %s", sample.id, exc)
            return SampleOutcome(sample.id, None, error=f"{type(exc).__name__}: {exc}")
        return SampleOutcome(sample.id, entry)

    outcomes = []
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [pool.submit(work, s) for s in samples]
        for fut in futures:
            outcome = fut.result()
            if outcome.ok and not outcome.cache_hit:
                cache.put(outcome.evaluation)
            outcomes.append(outcome)
    return outcomes
