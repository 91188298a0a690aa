"""Claim extraction and five-level verdicts from a pluggable judge."""

from .backends import (
    ChatCompletionJudge,
    CountingJudge,
    JudgeBackend,
    JudgeRequest,
    ScriptedJudge,
    split_sentences,
)
from .cache import VerdictCache
from .parsing import parse_claims_response, parse_judge_response
from .pipeline import (
    RetryPolicy,
    SampleOutcome,
    assign_verdict,
    cache_key,
    evaluate_dataset,
    evaluate_sample,
    extract_claims,
)
from .prompts import prompt_version
from .types import (
    CachedEvaluation,
    Claim,
    EvaluationSample,
    MetricConfig,
    VerdictRecord,
)

__all__ = [
    "CachedEvaluation",
    "ChatCompletionJudge",
    "Claim",
    "CountingJudge",
    "EvaluationSample",
    "JudgeBackend",
    "JudgeRequest",
    "MetricConfig",
    "RetryPolicy",
    "SampleOutcome",
    "ScriptedJudge",
    "VerdictCache",
    "VerdictRecord",
    "assign_verdict",
    "cache_key",
    "evaluate_dataset",
    "evaluate_sample",
    "extract_claims",
    "parse_claims_response",
    "parse_judge_response",
    "prompt_version",
    "split_sentences",
]
