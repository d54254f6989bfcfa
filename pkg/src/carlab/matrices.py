"""Dense symmetric matrix primitives: spectra, SPD powers, PSD-order margins.

The symmetric eigendecomposition is the single primitive here; operator
norms, fractional powers and order comparisons all derive from it.
Matrices are small (d <= 8), so robustness wins over raw speed.

Two precision regimes coexist:

* float64 arrays go through LAPACK (``np.linalg.eigh``), including stacked
  batches, which is what the randomized suites use;
* longdouble arrays go through a cyclic Jacobi solver implemented below,
  because LAPACK has no extended-precision path.  Extended precision is
  needed where acceptance tolerances sit below the ``eps * cond`` floor of
  double arithmetic (condition numbers up to 1e8 appear in the
  counterexample sweep).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NumericError, SingularMatrixError

# Construction-time asymmetry rejection (relative to the largest entry).
SYM_REJECT_RTOL = 1e-9
# Eigenvalue floor below which negative powers are refused.
SPD_REJECT = 1e-12
# Tolerated negative part under the square root (clamped to zero).
PSD_CLAMP = 1e-12

ALLOWED_POWERS = (0.5, -0.5, -1.0)


def as_symmetric(m, rtol=SYM_REJECT_RTOL):
    """Return the symmetrized copy (M + M^T)/2 of a square matrix.

    Rejects input whose asymmetric part exceeds ``rtol`` relative to the
    largest entry; silent symmetrization of genuinely asymmetric data would
    hide bugs upstream.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.abs(m).max())
    if scale > 0.0:
        asym = float(np.abs(m - m.T).max())
        if asym > rtol * scale:
            raise DimensionMismatchError(
                f"matrix is not symmetric: |M - M^T| = {asym:.3e} vs scale {scale:.3e}"
            )
    return (m + m.T) / 2


def symmetrize(m):
    """(M + M^T)/2 with no asymmetry check.

    For matrices produced by symmetric arithmetic (differences, products of
    symmetric factors), whose asymmetry is rounding noise that can exceed
    any relative threshold when the result is near zero.
    """
    m = np.asarray(m)
    return (m + m.swapaxes(-1, -2)) / 2


def _jacobi_eigh(a, max_sweeps=60):
    """Cyclic Jacobi eigendecomposition in the dtype of ``a``.

    Returns (eigenvalues ascending, eigenvector columns), like
    ``np.linalg.eigh``.  Used for longdouble input; convergence for the
    d <= 8 matrices seen here takes a handful of sweeps.
    """
    a = np.array(a, copy=True)
    n = a.shape[0]
    dt = a.dtype
    v = np.eye(n, dtype=dt)
    if n == 1:
        return np.array([a[0, 0]], dtype=dt), v
    eps = np.finfo(dt).eps
    one = dt.type(1.0)
    for _ in range(max_sweeps):
        offd = np.abs(a - np.diag(np.diag(a))).max()
        scale = max(np.abs(a).max(), np.finfo(dt).tiny)
        if offd <= eps * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 0.01 * eps * scale:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau == 0.0:
                    t = one
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(one + tau * tau))
                c = one / np.sqrt(one + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise NumericError("Jacobi eigensolver did not converge")
    order = np.argsort(np.diag(a), kind="stable")
    return np.diag(a)[order].copy(), v[:, order].copy()


def eigh_sym(m):
    """Eigendecomposition of a symmetric matrix, dispatched on dtype.

    float64 goes to LAPACK; longdouble goes to the Jacobi solver so that
    extended precision is preserved end to end.
    """
    m = np.asarray(m)
    if m.dtype == np.longdouble:
        return _jacobi_eigh(m)
    try:
        return np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise NumericError(f"eigendecomposition failed: {exc}") from exc


def spectrum(m):
    """Eigenvalues of a symmetric matrix in descending order."""
    m = as_symmetric(m)
    vals, _ = eigh_sym(m)
    return vals[::-1].copy()


def operator_norm(m):
    """Operator (spectral) norm of a symmetric matrix."""
    vals = spectrum(m)
    return float(max(abs(vals[0]), abs(vals[-1])))


def spd_power(m, p):
    """Fractional power of an SPD matrix by spectral calculus.

    ``p`` must be one of 1/2, -1/2, -1.  Tiny negative eigenvalues are
    clamped to zero under the square root; negative powers refuse input
    whose smallest eigenvalue is at or below ``SPD_REJECT``.
    """
    if p not in ALLOWED_POWERS:
        raise ValueError(f"power must be one of {ALLOWED_POWERS}, got {p}")
    m = as_symmetric(m)
    vals, vecs = eigh_sym(m)
    lmin = float(vals[0])
    if p < 0:
        if lmin <= SPD_REJECT:
            raise SingularMatrixError("matrix not SPD under negative power", lambda_min=lmin)
    else:
        if lmin < -PSD_CLAMP:
            raise SingularMatrixError("matrix not PSD under square root", lambda_min=lmin)
        vals = np.clip(vals, 0.0, None)
    out = (vecs * vals ** m.dtype.type(p)) @ vecs.T
    return (out + out.T) / 2


def spd_apply_power(m, p, x):
    """Apply ``m ** p`` to vector(s) ``x`` without forming the power matrix."""
    if p not in ALLOWED_POWERS:
        raise ValueError(f"power must be one of {ALLOWED_POWERS}, got {p}")
    m = np.asarray(m)
    vals, vecs = eigh_sym(m)
    lmin = float(vals[0])
    if p < 0 and lmin <= SPD_REJECT:
        raise SingularMatrixError("matrix not SPD under negative power", lambda_min=lmin)
    if p > 0:
        vals = np.clip(vals, 0.0, None)
    return vecs @ ((vals ** m.dtype.type(p)) * (vecs.T @ x))


def psd_gap(a, b):
    """Smallest eigenvalue of a - b: the margin of a >= b in the PSD order.

    Margins, not booleans, so the caller owns the threshold.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = symmetrize(a - b)
    vals, _ = eigh_sym(diff)
    return float(vals[0])


# ---------------------------------------------------------------------------
# Stacked helpers.  Leading axes are batch axes; float64 batches go through
# LAPACK in one call, longdouble batches loop over the Jacobi solver.
# ---------------------------------------------------------------------------

def _is_longdouble(a):
    return a.dtype == np.longdouble


def eigvalsh_stack(mats):
    """Ascending eigenvalues of a stack of symmetric matrices."""
    mats = np.asarray(mats)
    if not _is_longdouble(mats):
        try:
            return np.linalg.eigvalsh(mats)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise NumericError(f"eigendecomposition failed: {exc}") from exc
    flat = mats.reshape(-1, mats.shape[-2], mats.shape[-1])
    out = np.empty(flat.shape[:2], dtype=mats.dtype)
    for i, m in enumerate(flat):
        out[i], _ = _jacobi_eigh(m)
    return out.reshape(mats.shape[:-1])


def lambda_max_stack(mats):
    """Largest eigenvalue of each matrix in a stack."""
    return eigvalsh_stack(mats)[..., -1]


def lambda_min_stack(mats):
    """Smallest eigenvalue of each matrix in a stack."""
    return eigvalsh_stack(mats)[..., 0]


def spd_power_stack(mats, p, context=None):
    """``spd_power`` over a stack of SPD matrices.

    ``context`` is used to name the offending cube in errors when the stack
    holds per-cube averages: it maps flat batch index -> cube.
    """
    if p not in ALLOWED_POWERS:
        raise ValueError(f"power must be one of {ALLOWED_POWERS}, got {p}")
    mats = np.asarray(mats)
    flat = mats.reshape(-1, mats.shape[-2], mats.shape[-1])
    if _is_longdouble(mats):
        out = np.empty_like(flat)
        for i, m in enumerate(flat):
            vals, vecs = _jacobi_eigh(m)
            out[i] = _power_from_factors(vals, vecs, p, i, context, mats.dtype)
        return out.reshape(mats.shape)
    try:
        vals, vecs = np.linalg.eigh(flat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    lmin = vals[:, 0]
    if p < 0 and lmin.size and lmin.min() <= SPD_REJECT:
        i = int(np.argmin(lmin))
        raise SingularMatrixError(
            "singular average under negative power",
            lambda_min=float(lmin[i]),
            cube=None if context is None else context(i),
        )
    if p > 0:
        vals = np.clip(vals, 0.0, None)
    out = np.einsum("kij,kj,klj->kil", vecs, vals**p, vecs)
    out = (out + out.transpose(0, 2, 1)) / 2
    return out.reshape(mats.shape)


def _power_from_factors(vals, vecs, p, index, context, dtype):
    lmin = float(vals[0])
    if p < 0 and lmin <= SPD_REJECT:
        raise SingularMatrixError(
            "singular average under negative power",
            lambda_min=lmin,
            cube=None if context is None else context(index),
        )
    if p > 0:
        vals = np.clip(vals, 0.0, None)
    out = (vecs * vals ** dtype.type(p)) @ vecs.T
    return (out + out.T) / 2
