import math

import pytest

from tcva.aggregation import (
    AGGRESSIVE,
    CONSERVATIVE,
    DEFAULT,
    EPSILON,
    LEVELS,
    LINEAR,
    TemperatureMapping,
    VerdictLevel,
    WeightScheme,
    aggregate,
    get_scheme,
    none_penalty_factor,
    power_mean,
    temperature_to_p,
    weight_of,
)
from tcva.errors import (
    ContractViolation,
    EmptyInputError,
    InvalidWeightScheme,
    TemperatureRangeError,
)

F, M, P, MI, N = LEVELS


def test_five_levels_in_order():
    assert len(set(VerdictLevel)) == 5
    assert F > M > P > MI > N
    assert sorted([N, F, MI, P, M], reverse=True) == [F, M, P, MI, N]


@pytest.mark.parametrize("text", ["fully", "FULLY", " Fully "])
def test_level_parse_case_insensitive(text):
    assert VerdictLevel.parse(text) is F


def test_level_parse_rejects_unknown():
    with pytest.raises(ValueError):
        VerdictLevel.parse("unsure")


def test_weight_of_examples():
    assert weight_of(F, DEFAULT) == 1.0
    assert weight_of(P, LINEAR) == 0.5
    for scheme in (DEFAULT, LINEAR, AGGRESSIVE, CONSERVATIVE):
        assert weight_of(N, scheme) == 0.0


def test_named_schemes():
    assert DEFAULT.as_tuple() == (1.0, 0.9, 0.7, 0.3, 0.0)
    assert LINEAR.as_tuple() == (1.0, 0.75, 0.5, 0.25, 0.0)
    assert AGGRESSIVE.as_tuple() == (1.0, 0.95, 0.8, 0.1, 0.0)
    assert CONSERVATIVE.as_tuple() == (1.0, 0.8, 0.5, 0.2, 0.0)
    assert get_scheme("linear") is LINEAR


@pytest.mark.parametrize(
    "values",
    [(0.9, 0.9, 0.7, 0.3, 0.0), (1.0, 0.9, 0.7, 0.3, 0.1), (1.0, 0.7, 0.9, 0.3, 0.0), (1.0, 0.9, 0.7, 0.3)],
)
def test_invalid_schemes_rejected(values):
    with pytest.raises(InvalidWeightScheme):
        WeightScheme.from_values("bad", values)


@pytest.mark.parametrize(
    "t, p", [(0.1, -8.0), (0.3, -3.5), (0.5, 1.0), (0.7, 5.5), (0.9, 10.0), (1.0, 12.25)]
)
def test_temperature_to_p(t, p):
    assert temperature_to_p(TemperatureMapping(t)) == pytest.approx(p, abs=1e-12)
    assert TemperatureMapping(t).p == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.09, 1.01, 1.2, -1])
def test_temperature_out_of_range(t):
    with pytest.raises(TemperatureRangeError) as exc:
        temperature_to_p(t)
    assert exc.value.temperature == t
    assert repr(t) in str(exc.value)


def test_custom_mapping_bounds():
    m = TemperatureMapping(0.5, p_min=-4.0, p_max=4.0)
    assert m.p == pytest.approx(-4.0 + (0.4 / 0.9) * 8.0)


# reference values for w = [1.0, 0.9, 0.7]
REFERENCE_P = [(-10, 0.773), (-5, 0.809), (-2, 0.838), (-1, 0.848), (0, 0.857),
           (1, 0.867), (2, 0.876), (5, 0.899), (10, 0.925)]


@pytest.mark.parametrize("p, expected", REFERENCE_P)
def test_power_mean_reference_rows(p, expected):
    assert power_mean([1.0, 0.9, 0.7], p) == pytest.approx(expected, abs=1e-3)


def test_power_mean_infinite_modes():
    assert power_mean([1.0, 0.9, 0.7], -math.inf) == 0.7
    assert power_mean([1.0, 0.9, 0.7], math.inf) == 1.0


@pytest.mark.parametrize("x", [0.0, 0.3, 0.7, 0.9, 1.0, 0.123456789])
@pytest.mark.parametrize("p", [-8.0, -1.0, 0.0, 1.0, 3.3, 12.25])
def test_power_mean_singleton(x, p):
    # zero is lifted to epsilon by the guard whenever p <= 0
    expected = EPSILON if (x == 0.0 and p <= 0) else x
    assert power_mean([x], p) == expected


def test_power_mean_zero_weight_negative_p():
    # w~ = [1, 1e-9]: ((1 + 1e18) / 2) ** (-1/2) = 1 / sqrt(5e17 + 0.5)
    expected = 1.0 / math.sqrt(5e17 + 0.5)
    value = power_mean([1.0, 0.0], -2)
    assert value <= 2e-9
    assert value == pytest.approx(expected, rel=1e-9)


def test_power_mean_zero_weight_positive_p_unguarded():
    # for p >= 0 zeros enter unmodified: ((1 + 0) / 2) ** (1/2)
    assert power_mean([1.0, 0.0], 2) == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert power_mean([0.0, 0.0], 3) == 0.0


def test_geometric_branch_uses_epsilon():
    assert power_mean([1.0, 0.0], 0.0) == pytest.approx(math.sqrt(EPSILON), rel=1e-9)


def test_geometric_branch_threshold():
    w = [0.3, 0.9, 1.0]
    geo = math.exp(sum(map(math.log, w)) / 3)
    assert power_mean(w, 5e-13) == pytest.approx(geo, abs=1e-12)
    assert abs(power_mean(w, 1e-9) - geo) < 1e-6


def test_power_mean_errors():
    with pytest.raises(EmptyInputError):
        power_mean([], 1.0)
    with pytest.raises(ContractViolation):
        power_mean([1.2], 1.0)
    with pytest.raises(ContractViolation):
        power_mean([0.5], math.nan)


def test_none_penalty_examples():
    assert none_penalty_factor(0, 7, 0.3) == 1.0
    assert none_penalty_factor(5, 5, 0.9) == 0.0
    assert none_penalty_factor(1, 4, 0.5) == 0.75
    # alpha = 1.4 at T = 0.1
    assert none_penalty_factor(1, 2, 0.1) == pytest.approx(0.5**1.4)


def test_none_penalty_errors():
    with pytest.raises(EmptyInputError):
        none_penalty_factor(0, 0, 0.5)
    with pytest.raises(ContractViolation):
        none_penalty_factor(5, 4, 0.5)
    with pytest.raises(TemperatureRangeError):
        none_penalty_factor(1, 4, 1.5)


@pytest.mark.parametrize("t", [0.1, 0.35, 0.5, 1.0])
def test_aggregate_all_fully(t):
    assert aggregate([F, F, F], t).final_score == 1.0


def test_aggregate_three_fully_one_none():
    # raw = (1+1+1+0)/4 = 0.75, penalty = (1 - 1/4) ** 1.0 = 0.75
    score = aggregate([F, F, F, N], 0.5, DEFAULT)
    assert score.raw_score == pytest.approx(0.75, abs=1e-12)
    assert score.penalty_factor == 0.75
    assert score.final_score == pytest.approx(0.5625, abs=1e-12)


def test_aggregate_reference_row():
    score = aggregate(["Fully", "Mostly", "Partially"], 0.5)
    assert score.penalty_factor == 1.0
    assert score.final_score == pytest.approx(0.867, abs=1e-3)


def test_aggregate_provenance():
    score = aggregate([F, MI, N, N, P], 0.3, LINEAR)
    assert score.claim_count == 5
    assert score.none_fraction == 2 / 5
    assert score.weights_used == (1.0, 0.25, 0.0, 0.0, 0.5)
    assert score.p_used == pytest.approx(-3.5)
    assert score.penalty_exponent == pytest.approx(1.2)
    assert score.final_score == pytest.approx(score.raw_score * score.penalty_factor, abs=1e-12)
    assert score.scheme == "Linear"
    assert score.temperature == 0.3


def test_aggregate_errors():
    with pytest.raises(EmptyInputError):
        aggregate([], 0.5)
    with pytest.raises(TemperatureRangeError):
        aggregate([F], 1.2)
