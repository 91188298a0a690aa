"""Baseline aggregators and ablations over stored verdicts.

Nothing here talks to a judge: every function works on verdicts that were
already collected, so sweeps over temperatures, weight schemes and
ablation variants cost no extra judge calls.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .aggregation import (
    DEFAULT,
    EvaluationScore,
    TemperatureMapping,
    VerdictLevel,
    WeightScheme,
    score_weights,
)
from .errors import ConfigError, EmptyInputError
from .judge.types import CachedEvaluation

_YES_NO = {"yes": 1, "no": 0}
_TERNARY = {"yes": Fraction(1), "unsure": Fraction(1, 2), "no": Fraction(0)}


def _norm(label) -> str:
    if label is True:
        return "yes"
    if label is False:
        return "no"
    return str(label).strip().lower()


def binary_fraction_score(verdicts: Iterable, exact: bool = False) -> "float | Fraction":
    """Share of ``Yes`` verdicts among ``Yes``/``No`` verdicts.

    >>> binary_fraction_score(["yes", "yes", "yes", "no"])
    0.75
    """
    labels = [_norm(v) for v in verdicts]
    if not labels:
        raise EmptyInputError("binary_fraction_score needs at least one verdict")
    try:
        hits = sum(_YES_NO[v] for v in labels)
    except KeyError as exc:
        raise ValueError(f"binary verdicts must be Yes/No, got {exc.args[0]!r}") from None
    score = Fraction(hits, len(labels))
    return score if exact else hits / len(labels)


def ternary_mean_score(
    verdicts: Iterable, exclude_unsure: bool = False, exact: bool = False
) -> "float | Fraction":
    """Arithmetic mean of Yes=1, Unsure=0.5, No=0.

    With ``exclude_unsure`` the Unsure verdicts are dropped from both the
    numerator and the denominator instead.
    """
    labels = [_norm(v) for v in verdicts]
    if not labels:
        raise EmptyInputError("ternary_mean_score needs at least one verdict")
    bad = [v for v in labels if v not in _TERNARY]
    if bad:
        raise ValueError(f"ternary verdicts must be Yes/Unsure/No, got {bad[0]!r}")
    if exclude_unsure:
        labels = [v for v in labels if v != "unsure"]
        if not labels:
            raise EmptyInputError("every verdict is Unsure; score undefined")
    score = sum((_TERNARY[v] for v in labels), Fraction(0)) / len(labels)
    return score if exact else float(score)


def collapse_to_binary(verdicts: Sequence["VerdictLevel | str"]) -> list[float]:
    """Fully/Mostly -> 1.0, everything else -> 0.0."""
    levels = [VerdictLevel.parse(v) for v in verdicts]
    if not levels:
        raise EmptyInputError("collapse_to_binary needs at least one verdict")
    return [1.0 if lvl >= VerdictLevel.MOSTLY else 0.0 for lvl in levels]


class Variant(enum.Enum):
    FULL_TCVA = "FullTCVA"  # A
    NO_PENALTY = "NoPenalty"  # B
    ARITHMETIC_MEAN = "ArithmeticMean"  # C
    BINARY_VERDICTS = "BinaryVerdicts"  # D

    @property
    def letter(self) -> str:
        return "ABCD"[list(Variant).index(self)]


@dataclass(frozen=True)
class AblationConfig:
    variant: Variant = Variant.FULL_TCVA
    temperature: float = 0.5
    scheme: WeightScheme = DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        TemperatureMapping(self.temperature)


def score_levels(levels: Sequence[VerdictLevel], config: AblationConfig) -> EvaluationScore:
    if not levels:
        raise EmptyInputError("no verdicts to aggregate")
    # the None tally always comes from the original five-level verdicts
    n_none = sum(lvl is VerdictLevel.NONE for lvl in levels)
    variant = config.variant
    if variant is Variant.BINARY_VERDICTS:
        weights = collapse_to_binary(levels)
    else:
        weights = [config.scheme.weights[lvl] for lvl in levels]
    return score_weights(
        weights,
        n_none,
        config.temperature,
        p=1.0 if variant is Variant.ARITHMETIC_MEAN else None,
        penalize=variant is not Variant.NO_PENALTY,
        scheme_name=config.scheme.name,
    )


def run_ablation(cached: CachedEvaluation, config: AblationConfig) -> EvaluationScore:
    return score_levels(cached.levels, config)


def reaggregate_sweep(
    cache: Sequence[CachedEvaluation],
    temperatures: Sequence[float],
    schemes: Sequence[WeightScheme],
    variant: Variant = Variant.FULL_TCVA,
) -> dict[tuple[str, float, str], EvaluationScore]:
    """Score every cached sample at every (temperature, scheme) pair.

    Returns a dict keyed by ``(sample_id, temperature, scheme_name)`` in
    sample-major, temperature, scheme order.
    """
    if not temperatures:
        raise ConfigError("temperature list is empty")
    if not schemes:
        raise ConfigError("weight scheme list is empty")
    if not cache:
        raise EmptyInputError("no cached evaluations to re-aggregate")
    for t in temperatures:
        TemperatureMapping(t)
    out = {}
    for entry in cache:
        levels = entry.levels
        for t in temperatures:
            for scheme in schemes:
                cfg = AblationConfig(variant, t, scheme)
                out[(entry.sample_id, t, scheme.name)] = score_levels(levels, cfg)
    return out


@dataclass(frozen=True)
class ScoreRow:
    sample_id: str
    temperature: float
    scheme: str
    variant: str
    raw_score: float
    penalty_factor: float
    final_score: float

    @classmethod
    def from_score(cls, sample_id: str, score: EvaluationScore, variant: "Variant | str") -> "ScoreRow":
        return cls(
            sample_id=sample_id,
            temperature=score.temperature,
            scheme=score.scheme or "",
            variant=Variant(variant).value,
            raw_score=score.raw_score,
            penalty_factor=score.penalty_factor,
            final_score=score.final_score,
        )

    @property
    def method(self) -> str:
        return f"{self.variant}/{self.scheme}/T={self.temperature:g}"


SCORE_COLUMNS = [f.name for f in fields(ScoreRow)]


def sweep_rows(matrix: dict, variant: Variant = Variant.FULL_TCVA) -> list[ScoreRow]:
    return [ScoreRow.from_score(sid, score, variant) for (sid, _, _), score in matrix.items()]


def write_scores_csv(rows: Iterable[ScoreRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SCORE_COLUMNS)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in
                             (getattr(row, c) for c in SCORE_COLUMNS)])
    return path


def read_scores_csv(path: str | Path) -> list[ScoreRow]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = set(SCORE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{path}: missing columns {sorted(missing)}")
        return [
            ScoreRow(
                sample_id=r["sample_id"],
                temperature=float(r["temperature"]),
                scheme=r["scheme"],
                variant=r["variant"],
                raw_score=float(r["raw_score"]),
                penalty_factor=float(r["penalty_factor"]),
                final_score=float(r["final_score"]),
            )
            for r in reader
        ]
