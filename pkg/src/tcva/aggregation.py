"""Temperature-controlled verdict aggregation.

Verdict levels are mapped to weights, the temperature is mapped linearly to
the exponent of a generalized (Hölder) power mean, and the power mean of the
weights is multiplied by an adaptive penalty for the fraction of ``None``
verdicts::

    p(T)   = p_min + (T - T_min) / (T_max - T_min) * (p_max - p_min)
    score  = M_p(w_1, ..., w_m)
    final  = score * (1 - n_none / m) ** (1.5 - T)

Everything in this module is a pure function of its arguments.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ContractViolation,
    EmptyInputError,
    InvalidWeightScheme,
    TemperatureRangeError,
)

EPSILON = 1e-9
GEOMETRIC_BRANCH_TOL = 1e-12

T_MIN = 0.1
T_MAX = 1.0
P_MIN = -8.0
P_MAX = 12.25


class VerdictLevel(enum.Enum):
    """Five ordered verdict levels, strongest first."""

    FULLY = "Fully"
    MOSTLY = "Mostly"
    PARTIALLY = "Partially"
    MINOR = "Minor"
    NONE = "None"

    @property
    def rank(self) -> int:
        # 4 for Fully down to 0 for None
        return len(_LEVEL_ORDER) - 1 - _LEVEL_ORDER.index(self)

    def __lt__(self, other):
        if not isinstance(other, VerdictLevel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other):
        if not isinstance(other, VerdictLevel):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other):
        if not isinstance(other, VerdictLevel):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other):
        if not isinstance(other, VerdictLevel):
            return NotImplemented
        return self.rank >= other.rank

    @classmethod
    def parse(cls, text: "str | VerdictLevel") -> "VerdictLevel":
        """Case-insensitive lookup by level name, e.g. ``"MOSTLY"``."""
        if isinstance(text, VerdictLevel):
            return text
        key = str(text).strip().lower()
        for level in cls:
            if level.value.lower() == key:
                return level
        raise ValueError(f"unknown verdict level {text!r}")


_LEVEL_ORDER = (
    VerdictLevel.FULLY,
    VerdictLevel.MOSTLY,
    VerdictLevel.PARTIALLY,
    VerdictLevel.MINOR,
    VerdictLevel.NONE,
)
LEVELS = _LEVEL_ORDER


@dataclass(frozen=True)
class WeightScheme:
    """Assignment of a weight in [0, 1] to each verdict level.

    Validated on construction: Fully weighs 1.0, None weighs 0.0 and the
    weights strictly decrease along the level order.
    """

    name: str
    weights: Mapping[VerdictLevel, float]

    def __post_init__(self):
        missing = [lvl for lvl in LEVELS if lvl not in self.weights]
        if missing:
            raise InvalidWeightScheme(
                f"scheme {self.name!r} lacks weights for {[m.value for m in missing]}"
            )
        values = [float(self.weights[lvl]) for lvl in LEVELS]
        if values[0] != 1.0 or values[-1] != 0.0:
            raise InvalidWeightScheme(
                f"scheme {self.name!r} must map Fully to 1.0 and None to 0.0"
            )
        if any(a <= b for a, b in zip(values, values[1:])):
            raise InvalidWeightScheme(
                f"scheme {self.name!r} weights must strictly decrease: {values}"
            )
        object.__setattr__(self, "weights", dict(zip(LEVELS, values)))

    @classmethod
    def from_values(cls, name: str, values: Sequence[float]) -> "WeightScheme":
        """Build from five weights listed Fully -> None."""
        if len(values) != len(LEVELS):
            raise InvalidWeightScheme(f"expected 5 weights, got {len(values)}")
        return cls(name, dict(zip(LEVELS, values)))

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.weights[lvl] for lvl in LEVELS)


DEFAULT = WeightScheme.from_values("Default", (1.0, 0.9, 0.7, 0.3, 0.0))
LINEAR = WeightScheme.from_values("Linear", (1.0, 0.75, 0.5, 0.25, 0.0))
AGGRESSIVE = WeightScheme.from_values("Aggressive", (1.0, 0.95, 0.8, 0.1, 0.0))
CONSERVATIVE = WeightScheme.from_values("Conservative", (1.0, 0.8, 0.5, 0.2, 0.0))

SCHEMES = {s.name: s for s in (DEFAULT, LINEAR, AGGRESSIVE, CONSERVATIVE)}


def get_scheme(name: str) -> WeightScheme:
    for key, scheme in SCHEMES.items():
        if key.lower() == name.strip().lower():
            return scheme
    raise KeyError(f"unknown weight scheme {name!r}; known: {sorted(SCHEMES)}")


def weight_of(level: VerdictLevel, scheme: WeightScheme = DEFAULT) -> float:
    return scheme.weights[VerdictLevel.parse(level)]


@dataclass(frozen=True)
class TemperatureMapping:
    temperature: float
    t_min: float = T_MIN
    t_max: float = T_MAX
    p_min: float = P_MIN
    p_max: float = P_MAX

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ContractViolation("t_min must be smaller than t_max")
        t = self.temperature
        if not (isinstance(t, (int, float)) and self.t_min <= t <= self.t_max):
            raise TemperatureRangeError(t, self.t_min, self.t_max)

    @property
    def p(self) -> float:
        return temperature_to_p(self)


def _as_mapping(temperature: "float | TemperatureMapping") -> TemperatureMapping:
    if isinstance(temperature, TemperatureMapping):
        return temperature
    return TemperatureMapping(temperature)


def temperature_to_p(mapping: "TemperatureMapping | float") -> float:
    """Linear interpolation of the temperature onto [p_min, p_max].

    >>> temperature_to_p(0.5)
    1.0
    """
    m = _as_mapping(mapping)
    frac = (m.temperature - m.t_min) / (m.t_max - m.t_min)
    return m.p_min + frac * (m.p_max - m.p_min)


def power_mean(weights: Iterable[float], p: float) -> float:
    """Generalized power mean of ``weights`` with exponent ``p``.

    For ``p < 0`` zero weights are replaced by ``EPSILON``; for
    ``|p| < 1e-12`` the geometric mean of ``max(w, EPSILON)`` is returned.
    ``p = -inf`` and ``p = +inf`` select the minimum and maximum.

    The result is clipped to the range spanned by the (guarded) weights,
    which is a subset of [0, 1].
    """
    w = np.asarray(list(weights), dtype=float)
    if w.size == 0:
        raise EmptyInputError("power_mean needs at least one weight")
    if np.any((w < 0.0) | (w > 1.0)) or np.any(np.isnan(w)):
        raise ContractViolation(f"weights must lie in [0, 1], got {w.tolist()}")
    if math.isnan(p):
        raise ContractViolation("p must not be NaN")
    if p == math.inf:
        return float(w.max())
    if p == -math.inf:
        return float(w.min())

    if abs(p) < GEOMETRIC_BRANCH_TOL:
        guarded = np.maximum(w, EPSILON)
        value = math.exp(math.fsum(np.log(guarded)) / w.size)
    else:
        guarded = np.maximum(w, EPSILON) if p < 0 else w
        # log-domain form of (mean(w**p))**(1/p); fsum keeps it order independent
        with np.errstate(divide="ignore"):
            logs = np.log(guarded)
        shifted = math.fsum(np.expm1(p * logs)) / w.size
        value = math.exp(math.log1p(shifted) / p) if shifted > -1.0 else 0.0
    lo, hi = float(guarded.min()), float(guarded.max())
    return min(max(value, lo), hi)


def none_penalty_factor(n_none: int, m: int, temperature: float) -> float:
    """``(1 - n_none/m) ** (1.5 - T)``."""
    if m <= 0:
        raise EmptyInputError("cannot penalise an empty verdict list")
    if not 0 <= n_none <= m:
        raise ContractViolation(f"n_none={n_none} must lie in [0, m={m}]")
    t = _as_mapping(temperature).temperature
    return (1.0 - n_none / m) ** (1.5 - t)


@dataclass(frozen=True)
class EvaluationScore:
    raw_score: float
    none_fraction: float
    penalty_exponent: float
    penalty_factor: float
    final_score: float
    p_used: float
    weights_used: tuple[float, ...] = field(default_factory=tuple)
    claim_count: int = 0
    temperature: float | None = None
    scheme: str | None = None


def score_weights(
    weights: Sequence[float],
    n_none: int,
    temperature: "float | TemperatureMapping",
    *,
    p: float | None = None,
    penalize: bool = True,
    scheme_name: str | None = None,
) -> EvaluationScore:
    """Power mean plus None-penalty over already-mapped weights.

    ``p`` overrides the temperature-derived exponent (the penalty still uses
    the temperature); ``penalize=False`` fixes the penalty factor at 1.
    """
    mapping = _as_mapping(temperature)
    weights = tuple(float(x) for x in weights)
    m = len(weights)
    if m == 0:
        raise EmptyInputError("cannot aggregate an empty verdict list")
    p_used = temperature_to_p(mapping) if p is None else float(p)
    raw = power_mean(weights, p_used)
    alpha = 1.5 - mapping.temperature
    factor = none_penalty_factor(n_none, m, mapping.temperature) if penalize else 1.0
    return EvaluationScore(
        raw_score=raw,
        none_fraction=n_none / m,
        penalty_exponent=alpha,
        penalty_factor=factor,
        final_score=raw * factor,
        p_used=p_used,
        weights_used=weights,
        claim_count=m,
        temperature=mapping.temperature,
        scheme=scheme_name,
    )


def aggregate(
    verdicts: Iterable["VerdictLevel | str"],
    temperature: "float | TemperatureMapping" = 0.5,
    scheme: WeightScheme = DEFAULT,
) -> EvaluationScore:
    """Aggregate a list of verdicts into a final score at ``temperature``.

    >>> aggregate(["Fully", "Fully", "Fully", "None"], 0.5).final_score
    0.5625
    """
    levels = [VerdictLevel.parse(v) for v in verdicts]
    if not levels:
        raise EmptyInputError("cannot aggregate an empty verdict list")
    weights = [scheme.weights[lvl] for lvl in levels]
    n_none = sum(lvl is VerdictLevel.NONE for lvl in levels)
    return score_weights(weights, n_none, temperature, scheme_name=scheme.name)
