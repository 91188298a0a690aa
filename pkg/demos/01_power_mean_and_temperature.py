"""
Power means and the temperature knob
====================================

A walk through the aggregation core: how a single number T slides the
score between "judge by the weakest claim" and "judge by the strongest".
Run with ``python3 demos/01_power_mean_and_temperature.py``.
"""

import math

import numpy as np

from tcva import DEFAULT, SCHEMES, aggregate, power_mean, temperature_to_p

# Three claims graded Fully, Mostly and Partially under the default scheme.
w = [1.0, 0.9, 0.7]

# ## The exponent p
#
# p = -inf picks the minimum, p = 0 the geometric mean, p = 1 the plain
# average and p = +inf the maximum.

for p in (-math.inf, -10, -2, 0, 1, 2, 10, math.inf):
    print(f"p = {p:>5}: {power_mean(w, p):.4f}")

# ## Temperature instead of p
#
# T lives in [0.1, 1.0] and maps linearly onto p in [-8, 12.25]. T = 0.5
# lands exactly on p = 1, so the middle setting is the familiar average.

for t in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
    print(f"T = {t:.1f} -> p = {temperature_to_p(t):+.2f}")

# ## Unsupported claims
#
# A None verdict has weight zero. On top of that the score is multiplied by
# (1 - share of None) ** (1.5 - T), so low temperatures punish it harder.

verdicts = ["Fully", "Fully", "Fully", "None"]
for t in (0.2, 0.5, 0.9):
    s = aggregate(verdicts, t)
    print(f"T = {t}: raw {s.raw_score:.4f} x penalty {s.penalty_factor:.4f} = {s.final_score:.4f}")

# ## Weight schemes
#
# The same verdicts read differently under each scheme. Linear spaces the
# levels evenly; Aggressive rewards near-misses and punishes Minor.

mixed = ["Fully", "Mostly", "Partially", "Minor"]
for name, scheme in SCHEMES.items():
    print(f"{name:<13}", " ".join(f"{aggregate(mixed, t, scheme).final_score:.3f}" for t in (0.2, 0.5, 0.9)))

# ## A quick sweep
#
# Score curves over the full temperature range for a few verdict mixes.

grid = np.round(np.linspace(0.1, 1.0, 10), 2)
for mix in (["Fully", "Minor"], ["Mostly"] * 3 + ["None"], ["Partially", "Partially", "Fully"]):
    curve = [aggregate(mix, float(t), DEFAULT).final_score for t in grid]
    print(f"{'/'.join(mix):<32}", " ".join(f"{v:.2f}" for v in curve))
