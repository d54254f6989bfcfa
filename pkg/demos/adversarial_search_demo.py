"""Hill-climbing search for bad instances under the intensity constraint.

The search climbs over leaf spectra, leaf rotations and sequence weights,
renormalizing the Carleson intensity to 1 at every step.  For the
norm-form objective the counterexample family member at the conditioning
cap is a feasible point, so the climb starts there and the best value
lands on sqrt(cap); for the scalar redundancy objective nothing the search
finds can cross the proven ceiling of 4.
"""

import math

from carlab import adversarial_search

print("-- norm-form bilinear ratio, cap 1e4 --")
out = adversarial_search(depth=3, d=2, seed=0, objective="bet_norm_ratio",
                         budget=3000, cond_cap=1e4)
print(f"best ratio          {out['best_value']:.4f}")
print(f"sqrt of best c2     {math.sqrt(out['best_c2']):.4f}")
print(f"ratio / sqrt(c2)    {out['best_over_sqrt_c2']:.6f}")
print(f"a2 of best weight   {out['best_a2']:.6f}")
print("best-so-far trace:", [round(h["best_objective"], 2) for h in out["history"][:6]], "...")

print()
print("-- scalar redundancy ratio, d = 1 --")
out = adversarial_search(depth=3, d=1, seed=0, objective="sred_ratio",
                         budget=3000, cond_cap=1e4)
print(f"best constant found {out['best_value']:.4f}  (ceiling 4)")
