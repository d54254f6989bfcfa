"""Best-constant verification of the redundancy inequalities.

The scalar-sequence redundancy bound carries the exact constant 4; its
matrix-sequence generalization comes in two conjugated testing forms plus a
corollary operator form.  Everything here returns best constants (suprema
of sandwiched eigenvalues over all cubes), never booleans; inputs are
required to have Carleson intensity at most 1 so the reported constants
carry no hidden intensity factor.
"""

from __future__ import annotations

import numpy as np

from . import matrices
from .characteristics import (
    MatrixSequence,
    ScalarSequence,
    carleson_intensity,
    subtree_sums,
)
from .dyadic import DyadicIndex, check_index
from .errors import DimensionMismatchError, PreconditionError

INTENSITY_SLACK = 1e-9


def _check_intensity(seq):
    intensity = carleson_intensity(seq)
    if intensity > 1.0 + INTENSITY_SLACK:
        raise PreconditionError(
            f"redundancy bounds assume Carleson intensity <= 1, got {intensity}"
        )


def sred_constant(w, alpha):
    """Best constant in sum alpha_Q <W^-1>_Q^-1 <= C |K| <W>_K.

    sup over K of lambda_max(<W>_K^-1/2 [|K|^-1 sum_{Q in D(K)}
    alpha_Q <W^-1>_Q^-1] <W>_K^-1/2); the theory puts C <= 4 whenever the
    intensity of alpha is at most 1.
    """
    w = w.as_matrix()
    if not isinstance(alpha, ScalarSequence):
        raise DimensionMismatchError("sred_constant expects a scalar sequence")
    if alpha.depth != w.depth:
        raise DimensionMismatchError("sequence and weight live on different trees")
    _check_intensity(alpha)
    if len(alpha) == 0:
        return 0.0
    wavg = w.pyramid()
    vavg = w.inverse().pyramid()
    alev = alpha.dense_levels(dtype=wavg[0].dtype)
    terms = []
    for k in range(w.depth + 1):
        vinv = matrices.spd_power_stack(vavg[k], -1.0, context=lambda i, k=k: DyadicIndex(k, i))
        terms.append(alev[k][:, None, None] * vinv)
    acc = subtree_sums(terms)
    best = -np.inf
    for k in range(w.depth + 1):
        roots = matrices.spd_power_stack(wavg[k], -0.5, context=lambda i, k=k: DyadicIndex(k, i))
        sandwich = roots @ acc[k] @ roots
        best = max(best, float(matrices.lambda_max_stack(sandwich).max()) * (1 << k))
    return best


def red_constants(w, bseq):
    """Best constants (c1, c2, c3) of the matrix redundancy statements.

    With R_K = <W>_K^-1/2 and P_Q = <W^-1>_Q^-1/2:

    * c1 bounds |K|^-1 sum_Q  P_Q R_K B_Q R_K P_Q  against the identity,
    * c2 bounds |K|^-1 sum_Q  R_K P_Q B_Q P_Q R_K  against the identity,
    * c3 bounds |K|^-1 sum_Q  P_Q B_Q P_Q          against <W>_K.

    c1 and c2 are assembled summand by summand exactly as the quadratic
    forms read; c3 accumulates the K-independent conjugations over the tree
    and sandwiches once per K (which is also why c2 and c3 agree up to
    rounding: the substitution e = <W>_K^1/2 f maps one onto the other).
    """
    w = w.as_matrix()
    if not isinstance(bseq, MatrixSequence):
        raise DimensionMismatchError("red_constants expects a matrix sequence")
    if bseq.depth != w.depth or bseq.d != w.d:
        raise DimensionMismatchError("sequence and weight are incompatible")
    _check_intensity(bseq)
    if len(bseq) == 0:
        return 0.0, 0.0, 0.0
    wavg = w.pyramid()
    vavg = w.inverse().pyramid()
    dtype = wavg[0].dtype
    depth = w.depth

    # Per-cube conjugations that do not involve K.
    support = sorted(bseq.entries)
    pbp = {}
    for q in support:
        p_q = matrices.spd_power(vavg[q.level][q.position], -0.5)
        pbp[q] = p_q @ bseq.entries[q].astype(dtype) @ p_q

    # c3: accumulate P_Q B_Q P_Q, sandwich with <W>_K^-1/2 once per cube K.
    levels = [np.zeros((1 << k, w.d, w.d), dtype=dtype) for k in range(depth + 1)]
    for q in support:
        levels[q.level][q.position] = pbp[q]
    acc = subtree_sums(levels)
    c3 = -np.inf
    for k in range(depth + 1):
        roots = matrices.spd_power_stack(wavg[k], -0.5, context=lambda i, k=k: DyadicIndex(k, i))
        sandwich = roots @ acc[k] @ roots
        c3 = max(c3, float(matrices.lambda_max_stack(sandwich).max()) * (1 << k))

    # c1, c2: both conjugation orders depend on (K, Q) jointly.
    c1 = c2 = -np.inf
    for k in range(depth + 1):
        roots_k = matrices.spd_power_stack(wavg[k], -0.5, context=lambda i, k=k: DyadicIndex(k, i))
        for pos in range(1 << k):
            kcube = DyadicIndex(k, pos)
            r_k = roots_k[pos]
            sum1 = np.zeros((w.d, w.d), dtype=dtype)
            sum2 = np.zeros((w.d, w.d), dtype=dtype)
            touched = False
            for q in support:
                if not kcube.contains(q):
                    continue
                touched = True
                p_q = matrices.spd_power(vavg[q.level][q.position], -0.5)
                inner = r_k @ bseq.entries[q].astype(dtype) @ r_k
                sum1 += p_q @ inner @ p_q
                sum2 += r_k @ pbp[q] @ r_k
            if not touched:
                continue
            scale = 1 << k
            c1 = max(c1, float(matrices.lambda_max_stack(sum1[None])[0]) * scale)
            c2 = max(c2, float(matrices.lambda_max_stack(sum2[None])[0]) * scale)
    return c1, c2, c3


def red_quadratic_form(w, bseq, k, e, order="corollary"):
    """One testing quadratic form of the matrix redundancy statement.

    ``order`` selects the summand shape:

    * "first":     <B_Q R_K P_Q e, R_K P_Q e>
    * "second":    <B_Q P_Q R_K e, P_Q R_K e>
    * "corollary": <B_Q P_Q f, P_Q f> with f = e taken literally

    summed over Q in D(K) and divided by |K|.  Used to verify that the
    substitution e = <W>_K^1/2 f turns the second form into the corollary.
    """
    w = w.as_matrix()
    k = check_index(k, w.depth)
    e = np.asarray(e, dtype=float)
    wavg = w.pyramid()
    vavg = w.inverse().pyramid()
    r_k = matrices.spd_power(wavg[k.level][k.position], -0.5)
    total = 0.0
    for q, b in bseq.items():
        if not k.contains(q):
            continue
        p_q = matrices.spd_power(vavg[q.level][q.position], -0.5)
        if order == "first":
            x = r_k @ (p_q @ e)
        elif order == "second":
            x = p_q @ (r_k @ e)
        elif order == "corollary":
            x = p_q @ e
        else:
            raise ValueError(f"unknown order {order!r}")
        total += max(float(x @ (b @ x)), 0.0)
    return total / k.measure
