"""Weight characteristics and Carleson intensities on small examples.

Walks through the quantities that grade a matrix weight: the A2
characteristic (joint degeneracy of the averages of W and W^-1), the
conditioning number (pointwise eccentricity), the Carleson intensity of a
cube-indexed sequence, and the weighted testing constant that couples the
two.  Ends with the testing-vector probes that certify the testing
constant from below.
"""

import numpy as np

from carlab import (
    MatrixSequence,
    ROOT,
    StepField,
    a2_characteristic,
    c2_conditioning,
    carleson_equivalents,
    carleson_intensity,
    cubes,
    necessity_probe,
    wcet_testing_constant,
)
from carlab.constructions import random_instance

print("-- scalar weight with leaves (1, 3) --")
w = StepField(np.array([1.0, 3.0]))
print("a2 =", a2_characteristic(w), "(classical <w><1/w> at the root: 2 * 2/3)")
print("c2 =", c2_conditioning(w), "(pointwise condition number of a scalar is 1)")

print()
print("-- two-leaf matrix weight with different eccentricities --")
leaves = np.stack([np.diag([1.0, 0.5]), np.diag([4.0, 0.1])])
wm = StepField(leaves)
print("a2 =", round(a2_characteristic(wm), 6))
print("c2 =", c2_conditioning(wm), "(the worse leaf: 4 / 0.1)")

print()
print("-- Carleson sequences on a depth-2 tree --")
alpha = {q: q.measure for q in cubes(2)}
from carlab import ScalarSequence

seq = ScalarSequence(2, alpha)
print("alpha_Q = |Q| everywhere: intensity =", carleson_intensity(seq), "(one per level)")
mseq = MatrixSequence(2, 2, {ROOT: np.eye(2)})
op, tr = carleson_equivalents(mseq)
print("identity at the root: matrix intensity", carleson_intensity(mseq),
      "op-norm", op, "trace", tr)

print()
print("-- weighted testing constant and its probes --")
inst = random_instance(depth=4, d=2, seed=1, cond_cap=1e3)
testing = wcet_testing_constant(inst.w, inst.mseq)
print("testing constant:", round(testing, 6))
rng = np.random.default_rng(0)
best = 0.0
for q in cubes(4):
    for _ in range(20):
        e = rng.standard_normal(2)
        e /= np.linalg.norm(e)
        best = max(best, necessity_probe(inst.w, inst.mseq, q, e))
print("best of 620 random probes:", round(best, 6), "(never exceeds the constant)")
