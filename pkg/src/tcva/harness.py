"""Reproducible evaluation runs: dataset IO, run configuration and commands.

Each ``cmd_*`` function is the library form of one CLI subcommand. They
write plain files into the configured output directory and also return
their results for programmatic use.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import yaml

from . import stats
from .aggregation import TemperatureMapping, aggregate, get_scheme
from .baselines import (
    AblationConfig,
    ScoreRow,
    Variant,
    read_scores_csv,
    reaggregate_sweep,
    run_ablation,
    sweep_rows,
    write_scores_csv,
)
from .errors import (
    AlignmentError,
    CacheMissError,
    ConfigError,
    ContractViolation,
    DatasetError,
    DegenerateBootstrapError,
    TemperatureRangeError,
    UndefinedCorrelationError,
)
from .judge import (
    CachedEvaluation,
    ChatCompletionJudge,
    EvaluationSample,
    JudgeBackend,
    MetricConfig,
    RetryPolicy,
    ScriptedJudge,
    VerdictCache,
    evaluate_dataset,
    prompt_version,
)

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURES = (0.2, 0.3, 0.5, 0.7, 0.9)
MOCK_MODEL_ID = "scripted-mock-v1"

# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


def _parse_sample(rec, lineno: int) -> EvaluationSample:
    if not isinstance(rec, dict):
        raise DatasetError("expected a JSON object", line=lineno)
    for name in ("id", "question", "answer"):
        if name not in rec:
            raise DatasetError(f"missing required field {name!r}", line=lineno)
        if not isinstance(rec[name], str):
            raise DatasetError(f"field {name!r} must be a string", line=lineno)
    if not rec["id"]:
        raise DatasetError("field 'id' is empty", line=lineno)
    if not rec["answer"].strip():
        raise DatasetError("field 'answer' is empty", line=lineno)
    contexts = rec.get("contexts", [])
    if not isinstance(contexts, list) or not all(isinstance(c, str) for c in contexts):
        raise DatasetError("field 'contexts' must be an array of strings", line=lineno)

    score = rec.get("human_score")
    if score is not None:
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise DatasetError("field 'human_score' must be a number", line=lineno)
        score = float(score)
        likert = rec.get("likert_range")
        if likert is not None:
            if (
                not isinstance(likert, list)
                or len(likert) != 2
                or not all(isinstance(v, (int, float)) for v in likert)
                or not likert[0] < likert[1]
            ):
                raise DatasetError("field 'likert_range' must be [low, high] with low < high", line=lineno)
            lo, hi = likert
            if not lo <= score <= hi:
                raise DatasetError(f"human_score {score} outside likert_range {likert}", line=lineno)
            score = (score - lo) / (hi - lo)
        elif not 0.0 <= score <= 1.0:
            raise DatasetError(
                f"human_score {score} outside [0, 1]; declare likert_range for raw ratings",
                line=lineno,
            )
    return EvaluationSample(
        id=rec["id"],
        question=rec["question"],
        answer=rec["answer"],
        contexts=tuple(contexts),
        human_score=score,
    )


def load_dataset(path: str | Path) -> list[EvaluationSample]:
    """Read a JSON Lines dataset, one sample per line.

    Human scores given with a ``likert_range`` are rescaled to [0, 1].
    """
    samples: list[EvaluationSample] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"malformed JSON ({exc.msg})", line=lineno) from None
            sample = _parse_sample(rec, lineno)
            if sample.id in seen:
                raise DatasetError(
                    f"duplicate id {sample.id!r} (first on line {seen[sample.id]})", line=lineno
                )
            seen[sample.id] = lineno
            samples.append(sample)
    if not samples:
        raise DatasetError(f"{path}: dataset is empty")
    return samples


def write_dataset(samples: Sequence[EvaluationSample], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for s in samples:
            f.write(json.dumps(s.to_dict(), ensure_ascii=False) + "\n")
    return path


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class JudgeConfig:
    backend: str = "mock"  # "mock" or "remote"
    model: str | None = None
    endpoint: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    script: str | None = None  # mock only: JSON with "claims"/"levels" maps
    timeout: float = 60.0

    def __post_init__(self):
        if self.backend not in ("mock", "remote"):
            raise ConfigError(f"judge backend must be 'mock' or 'remote', got {self.backend!r}")
        if self.backend == "remote" and not self.model:
            raise ConfigError("remote judge needs a model id")

    @property
    def model_id(self) -> str:
        if self.backend == "remote":
            return self.model
        return self.model or MOCK_MODEL_ID


@dataclass
class RunConfig:
    dataset_path: str | None = None
    metric_name: str = "faithfulness"
    criteria_text: str | None = None
    max_claims: int = 8
    temperatures: tuple[float, ...] = DEFAULT_TEMPERATURES
    scheme_name: str = "Default"
    judge: JudgeConfig = field(default_factory=JudgeConfig)
    seed: int = 0
    parallelism: int = 1
    cache_path: str | None = None
    output_dir: str = "tcva-out"
    n_resamples: int = 10_000
    retry_attempts: int = 3
    retry_base_delay: float = 0.5

    def __post_init__(self):
        if isinstance(self.judge, dict):
            self.judge = JudgeConfig(**self.judge)
        self.temperatures = tuple(float(t) for t in self.temperatures)
        for t in self.temperatures:
            try:
                TemperatureMapping(t)
            except TemperatureRangeError as exc:
                raise ConfigError(str(exc)) from None
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        try:
            get_scheme(self.scheme_name)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        self.metric_config()  # validates metric name / criteria / max_claims

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a mapping")
        judge = data.get("judge") or {}
        if "api_key" in data or "api_key" in judge:
            raise ConfigError(f"{path}: API keys belong in an environment variable (api_key_env)")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(f"{path}: {exc}") from None

    def metric_config(self) -> MetricConfig:
        try:
            return MetricConfig(self.metric_name, self.criteria_text, self.max_claims)
        except ContractViolation as exc:
            raise ConfigError(str(exc)) from None

    def resolved_cache_path(self) -> Path:
        if self.cache_path:
            return Path(self.cache_path)
        if not self.dataset_path:
            raise ConfigError("dataset_path is required")
        ds = Path(self.dataset_path)
        return ds.with_name(f"{ds.stem}.{self.metric_name}.verdicts.jsonl")

    def retry_policy(self) -> RetryPolicy:
        return RetryPolicy(self.retry_attempts, self.retry_base_delay)

    def snapshot(self) -> dict:
        d = asdict(self)
        d["temperatures"] = list(self.temperatures)
        return d


def build_judge(config: JudgeConfig) -> JudgeBackend:
    if config.backend == "remote":
        return ChatCompletionJudge(
            config.model, config.endpoint, config.api_key_env, timeout=config.timeout
        )
    claims, levels = {}, {}
    if config.script:
        with open(config.script, encoding="utf-8") as f:
            script = json.load(f)
        claims, levels = script.get("claims", {}), script.get("levels", {})
    return ScriptedJudge(claims, levels, model_id=config.model_id)


def _require_dataset(config: RunConfig) -> list[EvaluationSample]:
    if not config.dataset_path:
        raise ConfigError("dataset_path is required")
    return load_dataset(config.dataset_path)


def _out(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@dataclass
class EvaluateResult:
    rows: list[ScoreRow]
    manifest: dict
    scores_path: Path
    manifest_path: Path


def cmd_evaluate(config: RunConfig, judge: JudgeBackend | None = None) -> EvaluateResult:
    """Judge every sample (or reuse the cache) and score it at each temperature."""
    samples = _require_dataset(config)
    metric = config.metric_config()
    judge = judge or build_judge(config.judge)
    scheme = get_scheme(config.scheme_name)
    cache = VerdictCache(config.resolved_cache_path())

    outcomes = evaluate_dataset(
        samples, metric, judge, cache, config.parallelism, config.retry_policy()
    )
    rows = []
    for o in outcomes:
        if not o.ok:
            continue
        for t in config.temperatures:
            score = aggregate(o.evaluation.levels, t, scheme)
            rows.append(ScoreRow.from_score(o.sample_id, score, Variant.FULL_TCVA))

    out = _out(config)
    scores_path = write_scores_csv(rows, out / "scores.csv")
    status = {
        o.sample_id: ("failed" if not o.ok else "cached" if o.cache_hit else "judged")
        for o in outcomes
    }
    manifest = {
        "command": "evaluate",
        "config": config.snapshot(),
        "seed": config.seed,
        "prompt_version": prompt_version(metric),
        "judge_model_id": judge.model_id,
        "cache_path": str(config.resolved_cache_path()),
        "counts": {
            "samples": len(samples),
            "judged": sum(v == "judged" for v in status.values()),
            "cached": sum(v == "cached" for v in status.values()),
            "failed": sum(v == "failed" for v in status.values()),
            "scores": len(rows),
        },
        "samples": status,
        "failures": {o.sample_id: o.error for o in outcomes if not o.ok},
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    (out / "summary.txt").write_text(_evaluate_summary(rows, manifest), encoding="utf-8")
    return EvaluateResult(rows, manifest, scores_path, manifest_path)


def _evaluate_summary(rows: list[ScoreRow], manifest: dict) -> str:
    by_t = defaultdict(list)
    for r in rows:
        by_t[r.temperature].append(r.final_score)
    c = manifest["counts"]
    lines = [
        f"samples: {c['samples']}  judged: {c['judged']}  cached: {c['cached']}  failed: {c['failed']}",
        f"judge: {manifest['judge_model_id']}  prompt_version: {manifest['prompt_version']}",
        "",
        f"{'T':>5}  {'mean final score':>16}",
    ]
    for t in sorted(by_t):
        vals = by_t[t]
        lines.append(f"{t:>5.2f}  {math.fsum(vals) / len(vals):>16.4f}")
    return "\n".join(lines) + "\n"


def load_cached(config: RunConfig) -> list[CachedEvaluation]:
    """Cached evaluations for the configured dataset/metric/judge/prompt key."""
    samples = _require_dataset(config)
    metric = config.metric_config()
    version = prompt_version(metric)
    model_id = config.judge.model_id
    path = config.resolved_cache_path()
    key_desc = (
        f"metric={metric.metric_name!r}, judge_model_id={model_id!r}, "
        f"prompt_version={version!r}"
    )
    if not path.exists():
        raise CacheMissError(
            f"no verdict cache at {path} (expected entries for {key_desc}); run 'evaluate' first",
            key=(metric.metric_name, model_id, version),
        )
    cache = VerdictCache(path)
    found = []
    for s in samples:
        entry = cache.get((s.id, metric.metric_name, model_id, version))
        if entry is not None:
            found.append(entry)
    if not found:
        raise CacheMissError(
            f"{path} has no entries for {key_desc}; run 'evaluate' with this configuration first",
            key=(metric.metric_name, model_id, version),
        )
    if len(found) < len(samples):
        log.warning("%d of %d samples have no cached verdicts and are skipped",
                    len(samples) - len(found), len(samples))
    return found


def cmd_reaggregate(
    config: RunConfig,
    temperatures: Sequence[float] | None = None,
    schemes: Sequence[str] | None = None,
    variant: Variant = Variant.FULL_TCVA,
) -> list[ScoreRow]:
    """Re-score cached verdicts over temperature x scheme; never calls a judge."""
    temps = list(config.temperatures if temperatures is None else temperatures)
    names = [config.scheme_name] if schemes is None else list(schemes)
    if not temps:
        raise ConfigError("temperature override list is empty")
    if not names:
        raise ConfigError("scheme override list is empty")
    try:
        scheme_objs = [get_scheme(n) for n in names]
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    for t in temps:
        try:
            TemperatureMapping(t)
        except TemperatureRangeError as exc:
            raise ConfigError(str(exc)) from None
    cached = load_cached(config)
    rows = sweep_rows(reaggregate_sweep(cached, temps, scheme_objs, variant), variant)
    write_scores_csv(rows, _out(config) / "reaggregate.csv")
    return rows


ABLATION_TABLE_COLUMNS = [
    "sample_id", "temperature", "scheme", "A", "B", "C", "D", "delta_B", "delta_C", "delta_D",
]


def cmd_ablate(
    config: RunConfig,
    temperatures: Sequence[float] | None = None,
    scheme: str | None = None,
) -> list[dict]:
    """Run ablation configs A-D on cached verdicts.

    Writes ``ablation_scores.csv`` (long format, readable by ``cmd_stats``)
    and ``ablation_table.csv`` with one row per sample and temperature.
    """
    temps = list(config.temperatures if temperatures is None else temperatures)
    if not temps:
        raise ConfigError("temperature override list is empty")
    try:
        scheme_obj = get_scheme(scheme or config.scheme_name)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    cached = load_cached(config)
    long_rows, table = [], []
    for entry in cached:
        for t in temps:
            finals = {}
            for variant in Variant:
                score = run_ablation(entry, AblationConfig(variant, t, scheme_obj))
                long_rows.append(ScoreRow.from_score(entry.sample_id, score, variant))
                finals[variant.letter] = score.final_score
            table.append({
                "sample_id": entry.sample_id,
                "temperature": t,
                "scheme": scheme_obj.name,
                **finals,
                **{f"delta_{k}": finals[k] - finals["A"] for k in "BCD"},
            })
    out = _out(config)
    write_scores_csv(long_rows, out / "ablation_scores.csv")
    with open(out / "ablation_table.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, ABLATION_TABLE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in table:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return table


STATS_COLUMNS = [
    "method", "variant", "scheme", "temperature", "n", "spearman", "kendall", "mae",
    "ci_low", "ci_high", "delta_vs_baseline", "p_value", "best_temperature",
]


def _human_scores(annotations_path) -> dict[str, float]:
    return {
        s.id: s.human_score
        for s in load_dataset(annotations_path)
        if s.human_score is not None
    }


def _read_baseline(path) -> dict[str, float]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        cols = set(reader.fieldnames or ())
        score_col = "final_score" if "final_score" in cols else "score"
        if "sample_id" not in cols or score_col not in cols:
            raise ConfigError(f"{path}: baseline needs 'sample_id' and 'final_score' (or 'score') columns")
        group_cols = [c for c in ("variant", "scheme", "temperature") if c in cols]
        out, groups = {}, set()
        for r in reader:
            groups.add(tuple(r[c] for c in group_cols))
            out[r["sample_id"]] = float(r[score_col])
    if len(groups) > 1:
        raise ConfigError(f"{path}: baseline file holds {len(groups)} methods; keep exactly one")
    return out


def _nan_if_undefined(fn, *args) -> float:
    try:
        return float(fn(*args))
    except UndefinedCorrelationError:
        return math.nan


def cmd_stats(
    scores_path: str | Path,
    annotations_path: str | Path,
    baseline_path: str | Path | None = None,
    output_dir: str | Path = "tcva-out",
    seed: int = 0,
    n_resamples: int = 10_000,
    n_jobs: int = 1,
) -> list[dict]:
    """Correlate every method in a score table with human annotations.

    A method is one (variant, scheme, temperature) group of rows. With a
    baseline file, each method also gets a paired bootstrap test against it.
    """
    rows = read_scores_csv(scores_path)
    human = _human_scores(annotations_path)
    methods: dict[tuple, dict[str, float]] = defaultdict(dict)
    for r in rows:
        methods[(r.variant, r.scheme, r.temperature)][r.sample_id] = r.final_score
    all_ids = {r.sample_id for r in rows}
    unmatched = all_ids - set(human)
    if unmatched:
        raise AlignmentError("score ids without human annotations", unmatched)

    baseline = None
    if baseline_path is not None:
        baseline = _read_baseline(baseline_path)
        missing = all_ids - set(baseline)
        if missing:
            raise AlignmentError("score ids missing from the baseline", missing)
        methods[("baseline", "", math.nan)] = {i: baseline[i] for i in sorted(all_ids)}

    report = []
    for (variant, scheme, temp), by_id in methods.items():
        ids = sorted(by_id)
        m = [by_id[i] for i in ids]
        h = [human[i] for i in ids]
        row = {
            "method": "baseline" if variant == "baseline" else f"{variant}/{scheme}/T={temp:g}",
            "variant": variant,
            "scheme": scheme,
            "temperature": temp,
            "n": len(ids),
            "spearman": _nan_if_undefined(stats.spearman_rho, m, h),
            "kendall": _nan_if_undefined(stats.kendall_tau, m, h),
            "mae": stats.mae(m, h),
            "ci_low": math.nan,
            "ci_high": math.nan,
            "delta_vs_baseline": math.nan,
            "p_value": math.nan,
            "best_temperature": "",
        }
        if len(ids) >= 2 and not math.isnan(row["spearman"]):
            try:
                ci = stats.bootstrap_ci(
                    stats.PairedScores(m, h, ids), stats.spearman_rho, n_resamples,
                    seed=seed, n_jobs=n_jobs,
                )
                row["ci_low"], row["ci_high"] = ci.ci_low, ci.ci_high
            except DegenerateBootstrapError as exc:
                log.warning("%s: %s", row["method"], exc)
        if baseline is not None and variant != "baseline" and len(ids) >= 2:
            b = [baseline[i] for i in ids]
            try:
                test = stats.paired_bootstrap_test(
                    m, b, h, stats.spearman_rho, n_resamples, seed=seed, n_jobs=n_jobs
                )
                row["delta_vs_baseline"], row["p_value"] = test.delta, test.p_value
            except (UndefinedCorrelationError, DegenerateBootstrapError) as exc:
                log.warning("%s vs baseline: %s", row["method"], exc)
        report.append(row)

    best: dict[tuple, dict] = {}
    for row in report:
        if row["variant"] == "baseline" or math.isnan(row["spearman"]):
            continue
        group = (row["variant"], row["scheme"])
        if group not in best or row["spearman"] > best[group]["spearman"]:
            best[group] = row
    for row in best.values():
        row["best_temperature"] = "*"

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "stats.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, STATS_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in report:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    (out / "stats_summary.txt").write_text(format_stats_summary(report), encoding="utf-8")
    return report


def format_stats_summary(report: list[dict]) -> str:
    head = f"{'method':<34} {'n':>4} {'rho':>7} {'tau':>7} {'MAE':>7} {'95% CI':>17} {'delta':>7} {'p':>6}"
    lines = [head, "-" * len(head)]

    def fmt(v, spec):
        return "-" if isinstance(v, float) and math.isnan(v) else format(v, spec)

    for r in report:
        ci = "-" if math.isnan(r["ci_low"]) else f"[{r['ci_low']:.3f}, {r['ci_high']:.3f}]"
        lines.append(
            f"{r['method'] + (' *' if r['best_temperature'] else ''):<34} {r['n']:>4} "
            f"{fmt(r['spearman'], '.3f'):>7} {fmt(r['kendall'], '.3f'):>7} {fmt(r['mae'], '.3f'):>7} "
            f"{ci:>17} {fmt(r['delta_vs_baseline'], '+.3f'):>7} {fmt(r['p_value'], '.3f'):>6}"
        )
    lines.append("")
    lines.append("* best temperature (highest Spearman rho) per variant and scheme")
    return "\n".join(lines) + "\n"


def cmd_sample(
    dataset_path: str | Path,
    out_path: str | Path,
    per_bin: int,
    n_bins: int = 5,
    seed: int = 0,
) -> list[EvaluationSample]:
    """Write a stratified subset plus a ``.bins.json`` summary next to it."""
    samples = load_dataset(dataset_path)
    unscored = [s.id for s in samples if s.human_score is None]
    if unscored:
        raise DatasetError(
            f"stratified sampling needs human scores; {len(unscored)} samples lack one "
            f"(first: {unscored[0]!r})"
        )
    chosen = stats.stratified_sample(samples, per_bin, n_bins, seed)
    out_path = write_dataset(chosen, out_path)
    available = stats.assign_bins([s.human_score for s in samples], n_bins)
    drawn = stats.assign_bins([s.human_score for s in chosen], n_bins)
    summary = {
        "seed": seed,
        "n_bins": n_bins,
        "per_bin": per_bin,
        "bins": [
            {
                "low": b / n_bins,
                "high": (b + 1) / n_bins,
                "available": int((available == b).sum()),
                "drawn": int((drawn == b).sum()),
            }
            for b in range(n_bins)
        ],
        "total": len(chosen),
    }
    out_path.with_suffix(".bins.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return chosen


def cmd_plot(stats_path: str | Path, out_path: str | Path) -> Path:
    """Spearman rho against temperature, one line per variant/scheme."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(stats_path, newline="", encoding="utf-8") as f:
        report = list(csv.DictReader(f))
    fig, ax = plt.subplots(figsize=(6, 4))
    lines = defaultdict(list)
    for r in report:
        if r["variant"] == "baseline":
            ax.axhline(float(r["spearman"]), linestyle="--", color="grey", label="baseline")
        else:
            lines[(r["variant"], r["scheme"])].append((float(r["temperature"]), float(r["spearman"])))
    for (variant, scheme), pts in sorted(lines.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"{variant}/{scheme}")
    ax.set_xlabel("temperature T")
    ax.set_ylabel("Spearman rho vs human")
    ax.legend(fontsize="small")
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def with_overrides(config: RunConfig, **overrides) -> RunConfig:
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})
