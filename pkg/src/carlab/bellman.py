"""Numerical certification of the redundancy Bellman function.

The function is B(U, V, m) = U - (m+1)^-1 V^-1 on the domain
1 <= V^1/2 U V^1/2, 0 <= m <= 1.  This module evaluates it, measures its
midpoint-concavity and m-derivative margins in the PSD order, and runs the
one-step dyadic dynamics inequality whose telescoped form is the scalar
redundancy bound with constant 4.

Concavity is certified by midpoint sampling, not symbolically: the
perfect-square Hessian argument is a proof device, while the testable
statement is midpoint concavity on the convex domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrices
from .characteristics import carleson_intensity, subtree_sums
from .dyadic import DyadicIndex, ROOT, check_index, descendants
from .errors import DimensionMismatchError, DomainError, PreconditionError

DOMAIN_TOL = 1e-10
M_TOL = 1e-9


@dataclass(frozen=True)
class BellmanPoint:
    """Admissible triple (U, V, m); membership is checked on construction."""

    u: np.ndarray
    v: np.ndarray
    m: float

    def __post_init__(self):
        u = matrices.as_symmetric(self.u)
        v = matrices.as_symmetric(self.v)
        if u.shape != v.shape:
            raise DimensionMismatchError(f"U and V differ in shape: {u.shape} vs {v.shape}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "m", float(self.m))
        margins = self.domain_margins()
        if margins["psd"] < -DOMAIN_TOL or margins["m"] < -M_TOL:
            raise DomainError("point outside the Bellman domain", margins=margins)

    @property
    def d(self):
        return self.u.shape[0]

    def domain_margins(self):
        """Signed slack of each domain constraint (negative = violated)."""
        root = matrices.spd_power(self.v, 0.5)
        eye = np.eye(self.d, dtype=root.dtype)
        sandwich = root @ self.u @ root
        return {
            "psd": matrices.psd_gap(sandwich, eye),
            "m": min(self.m, 1.0 - self.m),
        }


def bellman_eval(p):
    """Matrix value B(U, V, m) = U - (m+1)^-1 V^-1."""
    vinv = matrices.spd_power(p.v, -1.0)
    return matrices.as_symmetric(p.u - vinv / (p.m + 1.0))


def bellman_concavity_gap(p0, p1):
    """Midpoint-concavity margin psd_gap(B(midpoint), (B(p0)+B(p1))/2).

    The domain is convex (operator convexity of inversion), so the midpoint
    is admissible; constructing it re-asserts membership.
    """
    if p0.d != p1.d:
        raise DimensionMismatchError("points have different dimensions")
    mid = BellmanPoint((p0.u + p1.u) / 2, (p0.v + p1.v) / 2, (p0.m + p1.m) / 2)
    avg = (bellman_eval(p0) + bellman_eval(p1)) / 2
    return matrices.psd_gap(bellman_eval(mid), avg)


def bellman_dm_derivative(p):
    """Analytic m-derivative (m+1)^-2 V^-1 (the finite-difference oracle)."""
    return matrices.spd_power(p.v, -1.0) / (p.m + 1.0) ** 2


def bellman_dm_gap(p, h=1e-5):
    """Margin of the forward m-difference quotient against V^-1 / 4.

    Exact calculus gives dB/dm = (m+1)^-2 V^-1 >= V^-1 / 4 on 0 <= m <= 1;
    the forward quotient undershoots by O(h), so callers allow a slack
    proportional to h.
    """
    if not 0.0 < h <= 1e-4:
        raise PreconditionError(f"step h must lie in (0, 1e-4], got {h}")
    shifted = BellmanPoint(p.u, p.v, p.m + h)
    quotient = (bellman_eval(shifted) - bellman_eval(p)) / h
    vinv = matrices.spd_power(p.v, -1.0)
    return matrices.psd_gap(quotient, vinv / 4.0)


def bellman_second_derivative(p, dv, dm):
    """Second derivative of t -> B(U, V + t dV, m + t dm) at t = 0.

    Equals -2 [ (m+1)^-3 dm^2 V^-1 + (m+1)^-2 dm V^-1 dV V^-1
               + (m+1)^-1 V^-1 dV V^-1 dV V^-1 ],
    a positive multiple of the quadratic form certifying concavity.
    """
    dv = matrices.as_symmetric(dv)
    vinv = matrices.spd_power(p.v, -1.0)
    s = 1.0 / (p.m + 1.0)
    vdv = vinv @ dv @ vinv
    out = -2.0 * (s**3 * dm * dm * vinv + s**2 * dm * vdv + s * vdv @ dv @ vinv)
    return matrices.symmetrize(out)


# ---------------------------------------------------------------------------
# Dyadic dynamics: data (U_K, V_K, m_K) from a weight and scalar sequence.
# ---------------------------------------------------------------------------

def _dyadic_data(w, alpha):
    w = w.as_matrix()
    if alpha.depth != w.depth:
        raise DimensionMismatchError("sequence and weight live on different trees")
    intensity = carleson_intensity(alpha)
    if intensity > 1.0 + 1e-9:
        raise PreconditionError(
            f"dynamics requires Carleson intensity <= 1, got {intensity}"
        )
    uavg = w.pyramid()
    vavg = w.inverse().pyramid()
    m_levels = subtree_sums(alpha.dense_levels())
    for k in range(w.depth + 1):
        m_levels[k] = m_levels[k] * (1 << k)
    return w, uavg, vavg, m_levels


def dyadic_point(w, alpha, k):
    """BellmanPoint (<W>_K, <W^-1>_K, |K|^-1 sum_{Q in D(K)} alpha_Q).

    Matrix Jensen guarantees <W>_K >= <W^-1>_K^-1, so generated points are
    always admissible; construction asserts this instead of repairing.
    """
    w, uavg, vavg, m_levels = _dyadic_data(w, alpha)
    k = check_index(k, w.depth)
    return BellmanPoint(
        uavg[k.level][k.position], vavg[k.level][k.position], float(m_levels[k.level][k.position])
    )


def _cube_certificate(uavg, vavg, m_levels, alpha, k, depth):
    """Matrix slack of the one-step dynamics inequality at cube ``k``.

    Non-leaf: |K| B(K) - V_K^-1 alpha_K / 4 - |K-| B(K-) - |K+| B(K+).
    Leaf:     |L| B(L) - V_L^-1 alpha_L / 4 - |L| B(U_L, V_L, 0).
    """
    pk = BellmanPoint(uavg[k.level][k.position], vavg[k.level][k.position],
                      float(m_levels[k.level][k.position]))
    vinv = matrices.spd_power(pk.v, -1.0)
    ak = alpha.get(k)
    lhs = k.measure * bellman_eval(pk) - 0.25 * ak * vinv
    if k.level == depth:
        rest = k.measure * bellman_eval(BellmanPoint(pk.u, pk.v, 0.0))
    else:
        rest = np.zeros_like(lhs)
        for child in (k.left, k.right):
            pc = BellmanPoint(
                uavg[child.level][child.position],
                vavg[child.level][child.position],
                float(m_levels[child.level][child.position]),
            )
            rest = rest + child.measure * bellman_eval(pc)
    return matrices.symmetrize(lhs - rest)


def bellman_dynamics_gap(w, alpha, k):
    """PSD margin of the one-step dynamics inequality at a non-leaf cube."""
    w, uavg, vavg, m_levels = _dyadic_data(w, alpha)
    k = check_index(k, w.depth)
    if k.level == w.depth:
        raise PreconditionError("dynamics step needs a non-leaf cube")
    cert = _cube_certificate(uavg, vavg, m_levels, alpha, k, w.depth)
    return matrices.psd_gap(cert, np.zeros_like(cert))


def dynamics_gaps(w, alpha):
    """Dynamics margins for every non-leaf cube, as a dict."""
    w, uavg, vavg, m_levels = _dyadic_data(w, alpha)
    out = {}
    for k in range(w.depth):
        for p in range(1 << k):
            q = DyadicIndex(k, p)
            cert = _cube_certificate(uavg, vavg, m_levels, alpha, q, w.depth)
            out[q] = matrices.psd_gap(cert, np.zeros_like(cert))
    return out


def telescoping_certificate(w, alpha, k=ROOT):
    """Two assemblies of the telescoped dynamics identity below cube ``k``.

    Returns (direct, accumulated, min_gap):

    * direct       = |K| B(K) - 1/4 sum_{Q in D(K)} alpha_Q <W^-1>_Q^-1
                     - sum_{leaves L in K} |L| B(U_L, V_L, 0)
    * accumulated  = sum of the per-cube certificates over D(K)
    * min_gap      = smallest PSD margin among those certificates.

    The two matrices agree exactly in exact arithmetic; since every
    certificate is PSD and B >= 0, the identity telescopes into
    sum alpha_Q <W^-1>_Q^-1 <= 4 |K| <W>_K, the redundancy bound.
    """
    wm, uavg, vavg, m_levels = _dyadic_data(w, alpha)
    k = check_index(k, wm.depth)
    depth = wm.depth

    accumulated = None
    min_gap = np.inf
    sred_sum = None
    leaf_tail = None
    for q in descendants(k, depth):
        cert = _cube_certificate(uavg, vavg, m_levels, alpha, q, depth)
        accumulated = cert if accumulated is None else accumulated + cert
        min_gap = min(min_gap, matrices.psd_gap(cert, np.zeros_like(cert)))
        aq = alpha.get(q)
        if aq:
            term = aq * matrices.spd_power(vavg[q.level][q.position], -1.0)
            sred_sum = term if sred_sum is None else sred_sum + term
        if q.level == depth:
            pt = BellmanPoint(uavg[depth][q.position], vavg[depth][q.position], 0.0)
            tail = q.measure * bellman_eval(pt)
            leaf_tail = tail if leaf_tail is None else leaf_tail + tail

    pk = BellmanPoint(
        uavg[k.level][k.position], vavg[k.level][k.position],
        float(m_levels[k.level][k.position]),
    )
    d = wm.d
    if sred_sum is None:
        sred_sum = np.zeros((d, d))
    direct = k.measure * bellman_eval(pk) - 0.25 * sred_sum - leaf_tail
    return matrices.symmetrize(direct), matrices.symmetrize(accumulated), float(min_gap)


# ---------------------------------------------------------------------------
# Random admissible points for the sampling certificates.
# ---------------------------------------------------------------------------

def random_domain_point(d, rng, cond_cap=1e4, boundary_fraction=0.3):
    """Seeded random point of the Bellman domain.

    V is a random SPD matrix with condition at most ``cond_cap``; U sits at
    V^-1 plus a PSD bump, landing exactly on the boundary with the given
    probability so the size bound is exercised where it is tight.
    """
    from .constructions import random_spd

    v = random_spd(d, rng, cond_cap)
    vinv = matrices.spd_power(v, -1.0)
    if rng.uniform() < boundary_fraction:
        u = vinv
    else:
        u = vinv + rng.uniform(0.0, 2.0) * random_spd(d, rng, min(cond_cap, 1e2))
    return BellmanPoint(u, v, float(rng.uniform(0.0, 1.0)))


def matrix_parameter_probe(d=2, n_pairs=2000, seed=0):
    """Experimental probe of U - V^-1/2 (M + 1)^-1 V^-1/2 with matrix M.

    Whether this candidate is concave is an open question; the probe samples
    midpoint gaps on the analogous domain (U >= V^-1, 0 <= M <= 1) and
    reports statistics.  Output is informational only and is never asserted
    by the acceptance suite.
    """
    from .constructions import random_orthogonal, random_spd

    rng = np.random.default_rng(seed)

    def sample():
        v = random_spd(d, rng, 1e3)
        u = matrices.spd_power(v, -1.0) + rng.uniform(0.0, 1.5) * random_spd(d, rng, 1e2)
        q = random_orthogonal(d, rng)
        mm = (q * rng.uniform(0.0, 1.0, size=d)) @ q.T
        return u, v, matrices.as_symmetric(mm)

    def value(u, v, mm):
        vr = matrices.spd_power(v, -0.5)
        core = matrices.spd_power(mm + np.eye(d), -1.0)
        return matrices.as_symmetric(u - vr @ core @ vr)

    gaps = np.empty(n_pairs)
    for i in range(n_pairs):
        u0, v0, m0 = sample()
        u1, v1, m1 = sample()
        mid = value((u0 + u1) / 2, (v0 + v1) / 2, (m0 + m1) / 2)
        avg = (value(u0, v0, m0) + value(u1, v1, m1)) / 2
        gaps[i] = matrices.psd_gap(mid, avg)
    return {
        "pairs": n_pairs,
        "min_gap": float(gaps.min()),
        "mean_gap": float(gaps.mean()),
        "negative_fraction": float((gaps < -1e-10).mean()),
    }
