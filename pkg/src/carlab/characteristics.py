"""Weight characteristics and Carleson intensities.

All the "<=" conditions of the theory are exposed here as best-constant
computations: suprema of generalized Rayleigh quotients over every cube of
the tree, computed exhaustively (trees are small, and exactness removes a
source of test flakiness).  Boolean verdicts belong to the caller.
"""

from __future__ import annotations

import numpy as np

from . import matrices
from .dyadic import DyadicIndex, check_index
from .errors import DimensionMismatchError, SingularMatrixError


class ScalarSequence:
    """Cube-indexed non-negative scalars, sparse with default zero."""

    def __init__(self, depth, entries=()):
        self.depth = int(depth)
        items = dict(entries).items() if isinstance(entries, dict) else entries
        self.entries = {}
        for q, value in items:
            q = check_index(q, self.depth)
            value = float(value)
            if value < 0.0:
                raise DimensionMismatchError(f"negative sequence entry {value} at {q}")
            if value != 0.0:
                self.entries[q] = value

    def get(self, q, default=0.0):
        return self.entries.get(DyadicIndex(*q), default)

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)

    def scaled(self, factor):
        return ScalarSequence(self.depth, {q: v * factor for q, v in self.entries.items()})

    def dense_levels(self, dtype=np.float64):
        levels = [np.zeros(1 << k, dtype=dtype) for k in range(self.depth + 1)]
        for q, v in self.entries.items():
            levels[q.level][q.position] = v
        return levels

    def to_json(self):
        return {
            "depth": self.depth,
            "d": 1,
            "values": [
                {"level": q.level, "position": q.position, "value": v}
                for q, v in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            int(obj["depth"]),
            [
                (DyadicIndex(int(e["level"]), int(e["position"])), float(e["value"]))
                for e in obj["values"]
            ],
        )


class MatrixSequence:
    """Cube-indexed positive semidefinite d x d matrices, sparse with default zero."""

    PSD_TOL = 1e-12

    def __init__(self, depth, d, entries=()):
        self.depth = int(depth)
        self.d = int(d)
        items = dict(entries).items() if isinstance(entries, dict) else entries
        self.entries = {}
        for q, m in items:
            q = check_index(q, self.depth)
            m = matrices.as_symmetric(m)
            if m.shape != (self.d, self.d):
                raise DimensionMismatchError(
                    f"entry at {q} has shape {m.shape}, expected {(self.d, self.d)}"
                )
            lmin = float(matrices.eigvalsh_stack(m[None])[0, 0])
            if lmin < -self.PSD_TOL:
                raise SingularMatrixError(f"sequence entry at {q} is not PSD", lambda_min=lmin)
            if np.any(m != 0.0):
                self.entries[q] = m

    def get(self, q, default=None):
        q = DyadicIndex(*q)
        if q in self.entries:
            return self.entries[q]
        return np.zeros((self.d, self.d)) if default is None else default

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)

    def scaled(self, factor):
        return MatrixSequence(
            self.depth, self.d, {q: m * factor for q, m in self.entries.items()}
        )

    def dense_levels(self, dtype=None):
        if dtype is None:
            dtype = np.result_type(np.float64, *(m.dtype for m in self.entries.values()))
        levels = [np.zeros((1 << k, self.d, self.d), dtype=dtype) for k in range(self.depth + 1)]
        for q, m in self.entries.items():
            levels[q.level][q.position] = m
        return levels

    def to_json(self):
        return {
            "depth": self.depth,
            "d": self.d,
            "values": [
                {
                    "level": q.level,
                    "position": q.position,
                    "value": [float(x) for x in m.reshape(-1)],
                }
                for q, m in sorted(self.entries.items(), key=lambda kv: kv[0])
            ],
        }

    @classmethod
    def from_json(cls, obj):
        d = int(obj["d"])
        return cls(
            int(obj["depth"]),
            d,
            [
                (
                    DyadicIndex(int(e["level"]), int(e["position"])),
                    np.asarray(e["value"], dtype=float).reshape(d, d),
                )
                for e in obj["values"]
            ],
        )


# ---------------------------------------------------------------------------
# Tree accumulation: acc[k][p] = sum of the per-cube quantity over D((k, p)).
# ---------------------------------------------------------------------------

def subtree_sums(levels):
    acc = [np.array(lv, copy=True) for lv in levels]
    for k in range(len(levels) - 2, -1, -1):
        acc[k] += acc[k + 1][0::2] + acc[k + 1][1::2]
    return acc


def _weight_field(w):
    if w.kind == "vector":
        raise DimensionMismatchError("a weight must be a scalar or matrix field")
    return w.as_matrix()


def _check_spd_levels(levels, what="average"):
    """Smallest eigenvalue guard before conjugating by inverse powers."""
    for k, lv in enumerate(levels):
        lmins = matrices.lambda_min_stack(lv)
        worst = int(np.argmin(lmins))
        if float(lmins[worst]) <= matrices.SPD_REJECT:
            raise SingularMatrixError(
                f"singular weight {what}",
                lambda_min=float(lmins[worst]),
                cube=DyadicIndex(k, worst),
            )


def carleson_intensity(seq):
    """Best constant in the Carleson condition of a cube-indexed sequence.

    sup over K of lambda_max(|K|^-1 sum_{Q in D(K)} A_Q); for scalar
    sequences the inner quantity is just the scalar sum.
    """
    if len(seq) == 0:
        return 0.0
    acc = subtree_sums(seq.dense_levels())
    best = -np.inf
    for k, a in enumerate(acc):
        tops = matrices.lambda_max_stack(a) if a.ndim == 3 else a
        best = max(best, float(tops.max()) * (1 << k))
    return best


def carleson_equivalents(seq):
    """Operator-norm and trace intensities of a matrix Carleson sequence.

    Returns (op_norm_intensity, trace_intensity).  Together with
    ``carleson_intensity`` these realize the equivalence of the three
    Carleson conditions at the cost of dimensional constants:

        matrix <= op <= trace <= d * matrix.
    """
    if not isinstance(seq, MatrixSequence):
        raise DimensionMismatchError("carleson_equivalents expects a matrix sequence")
    op_levels = [np.zeros(1 << k) for k in range(seq.depth + 1)]
    tr_levels = [np.zeros(1 << k) for k in range(seq.depth + 1)]
    for q, m in seq.items():
        op_levels[q.level][q.position] = matrices.operator_norm(m)
        tr_levels[q.level][q.position] = float(np.trace(m))
    op_acc = subtree_sums(op_levels)
    tr_acc = subtree_sums(tr_levels)
    op_best = max(float(a.max()) * (1 << k) for k, a in enumerate(op_acc))
    tr_best = max(float(a.max()) * (1 << k) for k, a in enumerate(tr_acc))
    if len(seq) == 0:
        return 0.0, 0.0
    return op_best, tr_best


def wcet_testing_constant(w, seq):
    """Best constant of the weighted testing condition.

    sup over K of lambda_max(<W>_K^-1/2 S_K <W>_K^-1/2) with
    S_K = |K|^-1 sum_{Q in D(K)} <W>_Q A_Q <W>_Q.  Scalar sequences embed
    as alpha_Q * identity.
    """
    w = _weight_field(w)
    if seq.depth != w.depth:
        raise DimensionMismatchError("sequence and weight live on different trees")
    if len(seq) == 0:
        return 0.0
    wavg = w.pyramid()
    _check_spd_levels(wavg)
    dtype = wavg[0].dtype
    if isinstance(seq, MatrixSequence):
        if seq.d != w.d:
            raise DimensionMismatchError("sequence and weight dimensions differ")
        alev = seq.dense_levels(dtype=dtype)
        terms = [wavg[k] @ alev[k] @ wavg[k] for k in range(w.depth + 1)]
    else:
        alev = seq.dense_levels(dtype=dtype)
        terms = [alev[k][:, None, None] * (wavg[k] @ wavg[k]) for k in range(w.depth + 1)]
    acc = subtree_sums(terms)
    best = -np.inf
    for k in range(w.depth + 1):
        roots = matrices.spd_power_stack(wavg[k], -0.5, context=lambda i, k=k: DyadicIndex(k, i))
        sandwich = roots @ acc[k] @ roots
        best = max(best, float(matrices.lambda_max_stack(sandwich).max()) * (1 << k))
    return best


def a2_characteristic(w):
    """Matrix A2 characteristic: sup_Q ||<W>_Q^1/2 <W^-1>_Q^1/2||_op^2.

    Always >= 1; computed as lambda_max(<W^-1>^1/2 <W> <W^-1>^1/2), which
    needs one eigendecomposition per cube instead of two.
    """
    w = _weight_field(w)
    wavg = w.pyramid()
    winvavg = w.inverse().pyramid()
    _check_spd_levels(wavg)
    best = -np.inf
    for k in range(w.depth + 1):
        roots = matrices.spd_power_stack(
            winvavg[k], 0.5, context=lambda i, k=k: DyadicIndex(k, i)
        )
        sandwich = roots @ wavg[k] @ roots
        best = max(best, float(matrices.lambda_max_stack(sandwich).max()))
    return best


def c2_conditioning(w):
    """Conditioning number of the weight: sup over leaves of lmax/lmin.

    The pointwise condition number kappa(W(x)), supped over the tree's
    leaves; identically 1 for d = 1.
    """
    w = _weight_field(w)
    vals = matrices.eigvalsh_stack(w.values)
    lmin = vals[..., 0]
    worst = int(np.argmin(lmin))
    if float(lmin[worst]) <= 0.0:
        raise SingularMatrixError(
            "weight leaf is not SPD",
            lambda_min=float(lmin[worst]),
            cube=DyadicIndex(w.depth, worst),
        )
    return float((vals[..., -1] / lmin).max())
