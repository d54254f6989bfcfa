"""Best constants of the redundancy inequalities over a seeded suite.

The scalar form carries the exact constant 4; the matrix form comes in two
testing shapes plus a corollary operator shape whose constants can pick up
a dimensional factor (at most 4d through the trace relaxation).  The suite
below records the observed maxima, which sit far under the ceilings.
"""

import numpy as np

from carlab import red_constants, sred_constant
from carlab.constructions import random_instance

by_d = {}
for seed in range(80):
    d = 1 + seed % 4
    inst = random_instance(depth=5, d=d, seed=seed, cond_cap=1e4)
    s = sred_constant(inst.w, inst.sseq)
    c1, c2, c3 = red_constants(inst.w, inst.mseq)
    row = by_d.setdefault(d, {"sred": 0.0, "red": 0.0})
    row["sred"] = max(row["sred"], s)
    row["red"] = max(row["red"], max(c1, c2, c3))

print(f"{'d':>2} {'max sred':>10} {'ceiling':>8} {'max red':>10} {'ceiling':>8}")
for d, row in sorted(by_d.items()):
    print(f"{d:>2} {row['sred']:>10.4f} {4.0:>8.1f} {row['red']:>10.4f} {4.0 * d:>8.1f}")

print()
print("c2 and c3 agree by the substitution e = <W>_K^1/2 f; on one instance:")
inst = random_instance(depth=4, d=3, seed=7, cond_cap=1e4)
c1, c2, c3 = red_constants(inst.w, inst.mseq)
print(f"  c1 = {c1:.6f}, c2 = {c2:.6f}, c3 = {c3:.6f}, |c2 - c3| = {abs(c2 - c3):.2e}")
