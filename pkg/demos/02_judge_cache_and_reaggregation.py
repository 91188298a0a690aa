"""
Judging once, scoring many times
================================

The expensive part of an evaluation is the judge. This demo runs the
offline scripted judge over the bundled 20-sample fixture, stores every
claim and verdict in a cache, and then re-scores the cache at other
temperatures and schemes without a single extra judge call.

Run with ``python3 demos/02_judge_cache_and_reaggregation.py``.
"""

import tempfile
from pathlib import Path

from tcva import SCHEMES, reaggregate_sweep
from tcva.baselines import AblationConfig, Variant, run_ablation
from tcva.harness import RunConfig, cmd_evaluate, load_cached
from tcva.judge import CountingJudge, ScriptedJudge

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "data" / "fixture20.jsonl"
work = Path(tempfile.mkdtemp(prefix="tcva-demo-"))

# ## First pass: the judge does its work
#
# CountingJudge wraps the backend and tallies calls by kind: one claim
# extraction per sample and one verdict per claim.

judge = CountingJudge(ScriptedJudge())
config = RunConfig(
    dataset_path=str(FIXTURE),
    cache_path=str(work / "verdicts.jsonl"),
    output_dir=str(work / "out"),
    retry_base_delay=0.0,
)
result = cmd_evaluate(config, judge=judge)
print("judge calls:", dict(judge.calls))
print("manifest counts:", result.manifest["counts"])

# One cached entry, verdict by verdict.

entry = load_cached(config)[0]
for v in entry.verdicts:
    print(f"  [{v.level.value:<9}] {v.claim.text}")

# ## Second pass: the cache answers
#
# Running evaluate again hits the cache for every sample.

again = cmd_evaluate(config, judge=judge)
print("judge calls after rerun:", dict(judge.calls), "| cached:", again.manifest["counts"]["cached"])

# ## Sweeping temperature and scheme
#
# 20 samples x 5 temperatures x 4 schemes = 400 scores, computed from the
# stored verdicts alone.

matrix = reaggregate_sweep(load_cached(config), [0.2, 0.3, 0.5, 0.7, 0.9], list(SCHEMES.values()))
print(len(matrix), "scores; judge calls still", dict(judge.calls))

# ## Ablations
#
# The four variants differ only in how stored verdicts are combined.

for variant in Variant:
    s = run_ablation(entry, AblationConfig(variant, 0.3))
    print(f"{variant.letter} {variant.value:<15} {s.final_score:.4f}")

print("outputs in", work)
