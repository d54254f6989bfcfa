"""Embedding sums and the proof machinery around them.

Covers the weighted embedding sum, both bilinear sums (inner-product and
norm form), the weighted maximal function, the cube functional F with its
Choquet-integral identity, and the pointwise product of two maximal
functions.  Sums iterate the sparse sequence support; per-cube averages
come from the cached field pyramids.
"""

from __future__ import annotations

import numpy as np

from . import matrices
from .characteristics import MatrixSequence, ScalarSequence
from .dyadic import StepField, check_index
from .errors import DimensionMismatchError, SingularMatrixError


def _vector_field(f):
    if f.kind == "matrix":
        raise DimensionMismatchError("expected a scalar or vector field")
    return f.as_vector()


def _weight(w):
    if w.kind == "vector":
        raise DimensionMismatchError("a weight must be a scalar or matrix field")
    return w.as_matrix()


def _check_shapes(w, *fields):
    for f in fields:
        if f.depth != w.depth:
            raise DimensionMismatchError("fields live on different trees")
        if f.d != w.d:
            raise DimensionMismatchError(f"dimension mismatch: weight d={w.d}, field d={f.d}")


def weighted_l2_norm(f, w=None):
    """L2(W) norm of a vector field; plain L2 norm when ``w`` is None."""
    f = _vector_field(f)
    if w is None:
        sq = np.einsum("ki,ki->k", f.values, f.values)
    else:
        w = _weight(w)
        _check_shapes(w, f)
        sq = np.einsum("ki,kij,kj->k", f.values, w.values, f.values)
    meas = sq.dtype.type(2.0) ** (-f.depth)
    return float(np.sqrt(sq.sum() * meas))


def _halfweighted_averages(w, f, sign):
    """Pyramid of <W^{sign/2} f>: the half-weighted averages of f."""
    wh = w.power(0.5 * sign)
    vals = np.einsum("kij,kj->ki", wh.values, f.values)
    return StepField(vals).pyramid()


def _apply_inverse_average(avg_pyramid, q, rhs):
    """<.>_Q^-1 applied to ``rhs`` by spectral calculus on the average at Q."""
    m = avg_pyramid[q.level][q.position]
    try:
        return matrices.spd_apply_power(m, -1.0, rhs)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            "singular average in embedding sum", lambda_min=exc.lambda_min, cube=q
        ) from exc


def _entry_quadratic(a, v):
    """<A v, v> with tiny negative round-off clamped to zero."""
    return max(float(v @ (a @ v)), 0.0)


def cet_sum(w, seq, f):
    """Embedding sum sum_Q ||A_Q^1/2 <W^1/2 f>_Q||^2 over the sequence support."""
    w, f = _weight(w), _vector_field(f)
    _check_shapes(w, f)
    if seq.depth != w.depth:
        raise DimensionMismatchError("sequence and fields live on different trees")
    havg = _halfweighted_averages(w, f, +1)
    total = 0.0
    for q, a in seq.items():
        v = havg[q.level][q.position]
        if isinstance(seq, MatrixSequence):
            total += _entry_quadratic(a, v)
        else:
            total += a * float(v @ v)
    return float(total)


def bet_norm_sum(w, seq, f, g):
    """Norm-form bilinear sum.

    sum_Q ||A_Q^1/2 <W>_Q^-1 <W^1/2 f>_Q|| * ||A_Q^1/2 <W^-1>_Q^-1 <W^-1/2 g>_Q||;
    scalar sequences specialize to alpha_Q times the product of plain norms.
    """
    w, f, g = _weight(w), _vector_field(f), _vector_field(g)
    _check_shapes(w, f, g)
    if seq.depth != w.depth:
        raise DimensionMismatchError("sequence and fields live on different trees")
    havg = _halfweighted_averages(w, f, +1)
    gavg = _halfweighted_averages(w, g, -1)
    wavg = w.pyramid()
    winvavg = w.inverse().pyramid()
    total = 0.0
    for q, a in seq.items():
        u = _apply_inverse_average(wavg, q, havg[q.level][q.position])
        v = _apply_inverse_average(winvavg, q, gavg[q.level][q.position])
        if isinstance(seq, MatrixSequence):
            total += np.sqrt(_entry_quadratic(a, u)) * np.sqrt(_entry_quadratic(a, v))
        else:
            total += a * float(np.sqrt((u @ u) * (v @ v)))
    return float(total)


def bet_inner_sum(w, seq, f, g):
    """Inner-product bilinear sum.

    sum_Q |<A_Q <W>_Q^-1 <W^1/2 f>_Q, <W^-1>_Q^-1 <W^-1/2 g>_Q>|; scalar
    sequences contribute alpha_Q |<u, v>|.
    """
    w, f, g = _weight(w), _vector_field(f), _vector_field(g)
    _check_shapes(w, f, g)
    if seq.depth != w.depth:
        raise DimensionMismatchError("sequence and fields live on different trees")
    havg = _halfweighted_averages(w, f, +1)
    gavg = _halfweighted_averages(w, g, -1)
    wavg = w.pyramid()
    winvavg = w.inverse().pyramid()
    total = 0.0
    for q, a in seq.items():
        u = _apply_inverse_average(wavg, q, havg[q.level][q.position])
        v = _apply_inverse_average(winvavg, q, gavg[q.level][q.position])
        if isinstance(seq, MatrixSequence):
            total += abs(float((a @ u) @ v))
        else:
            total += a * abs(float(u @ v))
    return float(total)


def bet_cube_functional(w, f, g):
    """The cube functional F driving the level-set argument.

    F(Q) = ||<W>_Q^-1 <W^1/2 f>_Q|| * ||<W^-1>_Q^-1 <W^-1/2 g>_Q|| for every
    cube of the tree, returned as a dict.
    """
    w, f, g = _weight(w), _vector_field(f), _vector_field(g)
    _check_shapes(w, f, g)
    havg = _halfweighted_averages(w, f, +1)
    gavg = _halfweighted_averages(w, g, -1)
    wavg = w.pyramid()
    winvavg = w.inverse().pyramid()
    out = {}
    for k in range(w.depth + 1):
        ru = matrices.spd_power_stack(wavg[k], -1.0)
        rv = matrices.spd_power_stack(winvavg[k], -1.0)
        u = np.einsum("kij,kj->ki", ru, havg[k])
        v = np.einsum("kij,kj->ki", rv, gavg[k])
        nu = np.sqrt(np.einsum("ki,ki->k", u, u))
        nv = np.sqrt(np.einsum("ki,ki->k", v, v))
        for p in range(1 << k):
            out[check_index((k, p), w.depth)] = float(nu[p] * nv[p])
    return out


def maximal_function(w, f):
    """Weighted maximal function as a scalar field on the leaves.

    M_W f(x) = sup over cubes Q containing x of
    ||W^1/2(x) <W>_Q^-1 <W^1/2 f>_Q||, exact on the finite tree.
    """
    w, f = _weight(w), _vector_field(f)
    _check_shapes(w, f)
    havg = _halfweighted_averages(w, f, +1)
    wavg = w.pyramid()
    wh = w.power(0.5)
    n = w.n_leaves
    best = None
    for k in range(w.depth + 1):
        inv = matrices.spd_power_stack(wavg[k], -1.0, context=lambda i, k=k: (k, i))
        u = np.einsum("kij,kj->ki", inv, havg[k])
        u_leaf = np.repeat(u, n >> k, axis=0)
        y = np.einsum("kij,kj->ki", wh.values, u_leaf)
        norms = np.sqrt(np.einsum("ki,ki->k", y, y))
        best = norms if best is None else np.maximum(best, norms)
    return StepField(best)


def phi_product(w, f, g):
    """Pointwise product M_W f * M_{W^-1} g as a scalar field."""
    w = _weight(w)
    mf = maximal_function(w, f)
    mg = maximal_function(w.inverse(), g)
    return StepField(mf.values * mg.values)


def choquet_integral(seq, functional):
    """Both sides of the Choquet identity for a cube functional.

    Returns (sum_form, level_form): the direct sum sum_Q F(Q) alpha_Q and
    the exact staircase integral of lambda -> mu({F > lambda}), where mu
    weights cube collections by alpha.  The two agree to rounding because F
    takes finitely many values.
    """
    if not isinstance(seq, ScalarSequence):
        raise DimensionMismatchError("the Choquet measure is a scalar sequence")
    pairs = []
    for q, fval in functional.items():
        fval = float(fval)
        if fval < 0.0:
            raise DimensionMismatchError(f"cube functional is negative at {q}: {fval}")
        pairs.append((fval, seq.get(q)))
    sum_form = float(sum(fv * av for fv, av in pairs))

    positive = sorted((fv, av) for fv, av in pairs if fv > 0.0)
    level_form = 0.0
    if positive:
        values = np.array([fv for fv, _ in positive])
        weights = np.array([av for _, av in positive])
        # mu({F >= v_i}) via suffix sums over the sorted distinct values.
        distinct, start = np.unique(values, return_index=True)
        suffix = np.cumsum(weights[::-1])[::-1]
        mu_at_least = suffix[start]
        prev = 0.0
        for v, mu in zip(distinct, mu_at_least):
            level_form += (v - prev) * mu
            prev = v
    return sum_form, float(level_form)
