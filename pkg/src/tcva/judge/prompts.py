"""Prompt templates for claim extraction and five-level verdicts.

Templates are plain ``str.format`` strings. ``prompt_version`` hashes every
template together with the metric criteria, so editing any of them
invalidates cached verdicts.
"""
from __future__ import annotations

import hashlib

from .types import Claim, EvaluationSample, MetricConfig

EXTRACTION_SYSTEM = """\
You decompose an AI system's answer into atomic statements for evaluation.
Rules:
- One statement per sentence of the answer. Do not split a sentence into
  fragments and do not merge sentences.
- Return at most {max_claims} statements. If the answer has more sentences,
  keep the first {max_claims}.
- Each statement must be self-contained and stay close to the answer's
  wording. Do not add facts that are not in the answer.
Reply with a single JSON object and nothing else:
{{"claims": ["<statement 1>", "<statement 2>", ...]}}
"""

EXTRACTION_USER = """\
Question:
{question}

Retrieval context:
{contexts}

Answer to decompose:
{answer}
"""

VERDICT_SYSTEM = """\
You judge one atomic statement taken from an AI system's answer.
Evaluation criteria:
{criteria}

Work in this order:
1. Locate the passage of the context (or question) most relevant to the
   statement and copy it into "context_excerpt". Use "" if nothing relates.
2. Compare the statement with that passage and explain in "reasoning".
3. Choose exactly one verdict:
   - "fully": the statement is fully supported. A paraphrase of the
     supporting text is still "fully", not "mostly".
   - "mostly": supported by the facts, with small changes of wording or
     structure that slightly alter emphasis.
   - "partially": roughly half supported, half added by the AI system,
     but still relevant.
   - "minor": not confirmed, though some phrases or words appear in the
     context.
   - "none": reserved for direct contradictions or a complete absence of
     related information.
Reply with a single JSON object and nothing else:
{{"context_excerpt": "...", "reasoning": "...", "verdict": "fully|mostly|partially|minor|none"}}
"""

VERDICT_USER = """\
Question:
{question}

Retrieval context:
{contexts}

Full answer:
{answer}

Statement to judge:
{claim}
"""

FORMAT_REMINDER = """\
Your previous reply could not be parsed. Reply again with ONLY the JSON
object described in the instructions: no prose, no markdown fences.
"""

TEMPLATES = (EXTRACTION_SYSTEM, EXTRACTION_USER, VERDICT_SYSTEM, VERDICT_USER, FORMAT_REMINDER)


def prompt_version(config: MetricConfig) -> str:
    h = hashlib.sha256()
    for part in (*TEMPLATES, config.criteria_text or "", str(config.max_claims)):
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()[:16]


def _format_contexts(contexts) -> str:
    if not contexts:
        return "(none)"
    return "\n".join(f"[{i + 1}] {c}" for i, c in enumerate(contexts))


def extraction_messages(sample: EvaluationSample, config: MetricConfig) -> list[dict]:
    return [
        {"role": "system", "content": EXTRACTION_SYSTEM.format(max_claims=config.max_claims)},
        {
            "role": "user",
            "content": EXTRACTION_USER.format(
                question=sample.question,
                contexts=_format_contexts(sample.contexts),
                answer=sample.answer,
            ),
        },
    ]


def verdict_messages(claim: Claim, sample: EvaluationSample, config: MetricConfig) -> list[dict]:
    return [
        {"role": "system", "content": VERDICT_SYSTEM.format(criteria=config.criteria_text)},
        {
            "role": "user",
            "content": VERDICT_USER.format(
                question=sample.question,
                contexts=_format_contexts(sample.contexts),
                answer=sample.answer,
                claim=claim.text,
            ),
        },
    ]


def with_format_reminder(messages: list[dict], bad_reply: str) -> list[dict]:
    return [
        *messages,
        {"role": "assistant", "content": bad_reply},
        {"role": "user", "content": FORMAT_REMINDER},
    ]
