"""Brute-force oracles: independent computations of the quantities under
test, by direct enumeration over cubes and leaves.  Deliberately slow and
structure-free so they share no code path with the library."""

import numpy as np


def enum_cubes(depth):
    return [(k, p) for k in range(depth + 1) for p in range(1 << k)]


def enum_descendants(level, pos, depth):
    out = []
    for k in range(level, depth + 1):
        shift = k - level
        out.extend((k, p) for p in range(pos << shift, (pos + 1) << shift))
    return out


def leaf_range(level, pos, depth):
    shift = depth - level
    return pos << shift, (pos + 1) << shift


def brute_average(values, level, pos, depth):
    lo, hi = leaf_range(level, pos, depth)
    total = values[lo]
    for i in range(lo + 1, hi):
        total = total + values[i]
    return total / (hi - lo)


def brute_scalar_intensity(entries, depth):
    """sup_K |K|^-1 sum_{Q in D(K)} alpha_Q by full enumeration."""
    best = 0.0
    for level, pos in enum_cubes(depth):
        total = sum(entries.get(q, 0.0) for q in enum_descendants(level, pos, depth))
        best = max(best, total * (1 << level))
    return best


def brute_matrix_intensity(entries, depth, d):
    best = 0.0
    for level, pos in enum_cubes(depth):
        total = np.zeros((d, d))
        for q in enum_descendants(level, pos, depth):
            if q in entries:
                total = total + entries[q]
        best = max(best, float(np.linalg.eigvalsh(total)[-1]) * (1 << level))
    return best


def brute_scalar_a2(leaves):
    """sup_Q <w>_Q <w^-1>_Q for a scalar weight, the classical formula."""
    n = len(leaves)
    depth = n.bit_length() - 1
    inv = [1.0 / v for v in leaves]
    best = 0.0
    for level, pos in enum_cubes(depth):
        lo, hi = leaf_range(level, pos, depth)
        wq = sum(leaves[lo:hi]) / (hi - lo)
        vq = sum(inv[lo:hi]) / (hi - lo)
        best = max(best, wq * vq)
    return best


def brute_choquet_level_form(fvals, weights, grid=None):
    """Riemann staircase of mu({F > lambda}) on an explicit lambda grid.

    With the grid containing all distinct F values the result is exact.
    """
    positive = sorted(set(v for v in fvals if v > 0.0))
    total = 0.0
    prev = 0.0
    for v in positive:
        mu = sum(w for fv, w in zip(fvals, weights) if fv > prev + 1e-300)
        # mu is constant on (prev, v): measure of {F > lambda} for lambda just above prev
        mu = sum(w for fv, w in zip(fvals, weights) if fv >= v)
        total += (v - prev) * mu
        prev = v
    return total


def rank_one_inner_value(a, b):
    """<A q_f, q_g> for A = (a+b)(a+b)*/2, q_f = b, q_g = a, by expansion.

    A b = (a+b) <a+b, b> / 2 and <a+b, a> = 1 for orthonormal a, b, so the
    value is 1/2 exactly.
    """
    s = a + b
    return 0.5 * float(np.dot(s, b)) * float(np.dot(s, a))
