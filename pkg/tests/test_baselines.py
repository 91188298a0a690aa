from fractions import Fraction

import pytest

from tcva.aggregation import CONSERVATIVE, DEFAULT, LEVELS, LINEAR, SCHEMES, aggregate
from tcva.baselines import (
    AblationConfig,
    ScoreRow,
    Variant,
    binary_fraction_score,
    collapse_to_binary,
    read_scores_csv,
    reaggregate_sweep,
    run_ablation,
    score_levels,
    sweep_rows,
    ternary_mean_score,
    write_scores_csv,
)
from tcva.errors import ConfigError, EmptyInputError, TemperatureRangeError
from tcva.judge import CachedEvaluation, Claim, VerdictRecord

F, M, P, MI, N = LEVELS


def cached(sample_id, levels):
    claims = [Claim(i, f"c{i}") for i in range(len(levels))]
    verdicts = [VerdictRecord(c, lvl, "r") for c, lvl in zip(claims, levels)]
    return CachedEvaluation(sample_id, "faithfulness", claims, verdicts, "m", "v")


def test_binary_examples():
    assert binary_fraction_score(["Yes", "Yes", "Yes", "No"]) == 0.75
    assert binary_fraction_score(["yes", "yes", "no"], exact=True) == Fraction(2, 3)
    assert binary_fraction_score([True, True]) == 1.0


def test_binary_errors():
    with pytest.raises(EmptyInputError):
        binary_fraction_score([])
    with pytest.raises(ValueError):
        binary_fraction_score(["yes", "unsure"])


def test_ternary_examples():
    assert ternary_mean_score(["Yes", "Unsure", "No"]) == 0.5
    assert ternary_mean_score(["Unsure", "Unsure"]) == 0.5
    assert ternary_mean_score(["yes", "yes", "yes", "no"], exact=True) == Fraction(3, 4)
    assert ternary_mean_score(["yes", "unsure", "no"], exclude_unsure=True) == 0.5
    assert ternary_mean_score(["yes", "unsure"], exclude_unsure=True) == 1.0


def test_ternary_errors():
    with pytest.raises(EmptyInputError):
        ternary_mean_score([])
    with pytest.raises(EmptyInputError):
        ternary_mean_score(["unsure"], exclude_unsure=True)
    with pytest.raises(ValueError):
        ternary_mean_score(["maybe"])


def test_binary_equals_mean_of_collapsed():
    labels = ["yes", "no", "no", "yes", "yes"]
    weights = [1 if v == "yes" else 0 for v in labels]
    assert binary_fraction_score(labels, exact=True) == Fraction(sum(weights), len(weights))


def test_collapse():
    assert collapse_to_binary([F, M]) == [1.0, 1.0]
    assert collapse_to_binary(["Partially", "Minor", "None"]) == [0.0, 0.0, 0.0]
    with pytest.raises(EmptyInputError):
        collapse_to_binary([])


def test_variant_letters():
    assert [v.letter for v in Variant] == ["A", "B", "C", "D"]
    assert Variant("NoPenalty") is Variant.NO_PENALTY


def test_ablation_examples():
    entry = cached("s", [F, F, F, N])
    a = run_ablation(entry, AblationConfig(Variant.FULL_TCVA, 0.5))
    b = run_ablation(entry, AblationConfig(Variant.NO_PENALTY, 0.5))
    assert a.final_score == pytest.approx(0.5625, abs=1e-12)
    assert b.final_score == pytest.approx(0.75, abs=1e-12)
    assert b.penalty_factor == 1.0
    d = run_ablation(cached("t", [F, M, P]), AblationConfig(Variant.BINARY_VERDICTS, 0.5))
    assert d.final_score == pytest.approx(2 / 3, abs=1e-12)


def test_full_variant_matches_aggregate():
    levels = [F, MI, N, P, M]
    for t in (0.1, 0.4, 0.8):
        for scheme in SCHEMES.values():
            assert score_levels(levels, AblationConfig(Variant.FULL_TCVA, t, scheme)) == aggregate(levels, t, scheme)


def test_arithmetic_mean_ignores_temperature():
    levels = [F, MI, P]
    scores = {t: score_levels(levels, AblationConfig(Variant.ARITHMETIC_MEAN, t)).raw_score for t in (0.1, 0.9)}
    assert scores[0.1] == scores[0.9] == pytest.approx((1 + 0.3 + 0.7) / 3)


def test_binary_variant_penalty_from_original_nones():
    levels = [F, P, MI, N]
    for t in (0.2, 0.6):
        a = score_levels(levels, AblationConfig(Variant.FULL_TCVA, t))
        d = score_levels(levels, AblationConfig(Variant.BINARY_VERDICTS, t))
        assert d.penalty_factor == a.penalty_factor
        assert d.none_fraction == 0.25


def test_ablation_config_rejects_bad_temperature():
    with pytest.raises(TemperatureRangeError):
        AblationConfig(Variant.FULL_TCVA, 1.2)


def test_sweep_shape_and_order():
    cache = [cached("a", [F, F]), cached("b", [N, MI, P])]
    temps = [0.2, 0.3, 0.5, 0.7, 0.9]
    schemes = list(SCHEMES.values())
    matrix = reaggregate_sweep(cache, temps, schemes)
    assert len(matrix) == 2 * 5 * 4
    keys = list(matrix)
    assert keys[0] == ("a", 0.2, "Default") and keys[-1] == ("b", 0.9, "Conservative")
    assert all(matrix[("a", t, s.name)].final_score == 1.0 for t in temps for s in schemes)


def test_sweep_degenerate_cell_is_plain_aggregate():
    entry = cached("a", [F, MI, N])
    matrix = reaggregate_sweep([entry], [0.3], [LINEAR])
    assert matrix == {("a", 0.3, "Linear"): aggregate(entry.levels, 0.3, LINEAR)}


def test_sweep_errors():
    entry = cached("a", [F])
    with pytest.raises(ConfigError):
        reaggregate_sweep([entry], [], [DEFAULT])
    with pytest.raises(ConfigError):
        reaggregate_sweep([entry], [0.5], [])
    with pytest.raises(EmptyInputError):
        reaggregate_sweep([], [0.5], [DEFAULT])
    with pytest.raises(TemperatureRangeError):
        reaggregate_sweep([entry], [0.05], [DEFAULT])


def test_scores_csv_roundtrip(tmp_path):
    matrix = reaggregate_sweep([cached("a", [F, MI, N]), cached("b", [P])], [0.3, 0.7], [DEFAULT, CONSERVATIVE])
    rows = sweep_rows(matrix)
    path = write_scores_csv(rows, tmp_path / "out" / "scores.csv")
    assert path.read_text().splitlines()[0] == (
        "sample_id,temperature,scheme,variant,raw_score,penalty_factor,final_score"
    )
    assert read_scores_csv(path) == rows
    assert rows[0].method == "FullTCVA/Default/T=0.3"


def test_read_scores_csv_missing_columns(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("sample_id,final_score\na,0.5\n")
    with pytest.raises(ConfigError):
        read_scores_csv(p)


def test_score_row_from_score():
    row = ScoreRow.from_score("z", aggregate([F, N], 0.5), "NoPenalty")
    assert row.variant == "NoPenalty" and row.scheme == "Default"
