from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..aggregation import VerdictLevel
from ..errors import ContractViolation

DEFAULT_MAX_CLAIMS = 8

DEFAULT_CRITERIA = {
    "faithfulness": (
        "The statement must be supported by the retrieval context. Judge only "
        "against the context, not against general world knowledge."
    ),
    "relevancy": (
        "The statement must help answer the user's question. Factually true "
        "but off-topic statements are not relevant."
    ),
}


@dataclass(frozen=True)
class EvaluationSample:
    id: str
    question: str
    answer: str
    contexts: tuple[str, ...] = ()
    human_score: float | None = None

    def __post_init__(self):
        if not self.id:
            raise ContractViolation("sample id must be nonempty")
        if not self.answer or not self.answer.strip():
            raise ContractViolation(f"sample {self.id!r} has an empty answer")
        object.__setattr__(self, "contexts", tuple(self.contexts))
        if self.human_score is not None and not 0.0 <= self.human_score <= 1.0:
            raise ContractViolation(
                f"sample {self.id!r}: human_score {self.human_score} not in [0, 1]"
            )

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "question": self.question,
            "answer": self.answer,
            "contexts": list(self.contexts),
        }
        if self.human_score is not None:
            d["human_score"] = self.human_score
        return d


@dataclass(frozen=True)
class MetricConfig:
    metric_name: str = "faithfulness"
    criteria_text: str | None = None
    max_claims: int = DEFAULT_MAX_CLAIMS
    temperature: float = 0.5

    def __post_init__(self):
        if not 1 <= self.max_claims <= 50:
            raise ContractViolation(f"max_claims must be in [1, 50], got {self.max_claims}")
        if self.criteria_text is None:
            try:
                text = DEFAULT_CRITERIA[self.metric_name]
            except KeyError:
                raise ContractViolation(
                    f"no built-in criteria for metric {self.metric_name!r}; "
                    "pass criteria_text explicitly"
                ) from None
            object.__setattr__(self, "criteria_text", text)


@dataclass(frozen=True)
class Claim:
    index: int
    text: str

    def to_dict(self) -> dict:
        return {"index": self.index, "text": self.text}


@dataclass(frozen=True)
class VerdictRecord:
    claim: Claim
    level: VerdictLevel
    reasoning: str
    grounding_excerpt: str | None = None

    def to_dict(self) -> dict:
        return {
            "claim": self.claim.to_dict(),
            "level": self.level.value,
            "reasoning": self.reasoning,
            "grounding_excerpt": self.grounding_excerpt,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerdictRecord":
        return cls(
            claim=Claim(**d["claim"]),
            level=VerdictLevel.parse(d["level"]),
            reasoning=d.get("reasoning", ""),
            grounding_excerpt=d.get("grounding_excerpt"),
        )


@dataclass(frozen=True)
class CachedEvaluation:
    """Claims and verdicts for one (sample, metric, judge, prompt) key."""

    sample_id: str
    metric_name: str
    claims: tuple[Claim, ...]
    verdicts: tuple[VerdictRecord, ...]
    judge_model_id: str
    prompt_version: str
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def __post_init__(self):
        object.__setattr__(self, "claims", tuple(self.claims))
        object.__setattr__(self, "verdicts", tuple(self.verdicts))
        if not self.claims or len(self.claims) != len(self.verdicts):
            raise ContractViolation(
                f"{self.sample_id}: need |claims| == |verdicts| >= 1, got "
                f"{len(self.claims)} and {len(self.verdicts)}"
            )

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.sample_id, self.metric_name, self.judge_model_id, self.prompt_version)

    @property
    def levels(self) -> list[VerdictLevel]:
        return [v.level for v in self.verdicts]

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "metric_name": self.metric_name,
            "claims": [c.to_dict() for c in self.claims],
            "verdicts": [v.to_dict() for v in self.verdicts],
            "judge_model_id": self.judge_model_id,
            "prompt_version": self.prompt_version,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CachedEvaluation":
        return cls(
            sample_id=d["sample_id"],
            metric_name=d["metric_name"],
            claims=tuple(Claim(**c) for c in d["claims"]),
            verdicts=tuple(VerdictRecord.from_dict(v) for v in d["verdicts"]),
            judge_model_id=d["judge_model_id"],
            prompt_version=d["prompt_version"],
            created_at=d.get("created_at", ""),
        )
