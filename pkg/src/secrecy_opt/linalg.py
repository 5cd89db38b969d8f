"""Complex matrix utilities and the joint two-matrix factorization.

Everything here treats zero-column matrices as first-class values: products
with them are zero-column, their span is {0} and their rank is 0.  All rank
decisions derive from one relative singular-value threshold so that the
dimension bookkeeping of the factorization stays internally consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError

#: Singular values below ``DEFAULT_RANK_TOL * sigma_max`` count as zero.
DEFAULT_RANK_TOL = 1e-9


def _as_complex(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D array, got shape {a.shape}")
    return a.astype(complex, copy=False)


def numeric_rank(a, tol: float = DEFAULT_RANK_TOL,
                 scale: float | None = None) -> int:
    """Number of singular values above ``tol`` relative to the largest one.

    ``scale`` overrides the reference magnitude; pass the norm of a related
    matrix to make a roundoff-level matrix count as zero.
    """
    a = _as_complex(a)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    ref = sv[0] if scale is None else scale
    if sv.size == 0 or ref <= 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * ref))


def null_space_basis(a, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the (right) null space of ``a``.

    Returns an ``n x (n - rank(a))`` matrix; a zero-column matrix when ``a``
    has full column rank.
    """
    a = _as_complex(a)
    m, n = a.shape
    if m == 0 or n == 0 or not np.any(a):
        return np.eye(n, dtype=complex)
    _, sv, vh = np.linalg.svd(a)
    r = int(np.count_nonzero(sv > tol * sv[0])) if sv[0] > 0 else 0
    return vh[r:].conj().T


def orthonormal_complement(q: np.ndarray, dim: int) -> np.ndarray:
    """Complete the orthonormal columns of ``q`` (``dim x k``) to a basis of
    C^dim; returns the ``dim x (dim-k)`` complement."""
    k = q.shape[1]
    if k == 0:
        return np.eye(dim, dtype=complex)
    if k == dim:
        return np.zeros((dim, 0), dtype=complex)
    full, _ = np.linalg.qr(np.hstack([q, np.eye(dim, dtype=complex)]).astype(complex))
    return full[:, k:dim]


def subspace_dims_oracle(h, g, tol: float = DEFAULT_RANK_TOL):
    """Dimensions (k, p, r, s) of the joint column geometry of ``h`` and ``g``
    computed purely from ranks:

    - k: rank of the stacked matrix [h g]
    - p: dim of the part of span(g) orthogonal to span(h)
    - r: dim of the part of span(h) orthogonal to span(g)
    - s: dim of the intersection span(h) & span(g)
    """
    h = _as_complex(h)
    g = _as_complex(g)
    if h.shape[0] != g.shape[0]:
        raise DimensionMismatchError(
            f"row counts differ: {h.shape[0]} vs {g.shape[0]}"
        )
    k = numeric_rank(np.hstack([h, g]), tol)
    rh = numeric_rank(h, tol)
    rg = numeric_rank(g, tol)
    return k, k - rh, k - rg, rh + rg - k


def span_contained(a, b, tol: float = DEFAULT_RANK_TOL,
                   scale: float | None = None) -> bool:
    """True iff span(a) is contained in span(b) at the rank tolerance.

    All ranks are measured against one common ``scale`` (defaulting to the
    spectral norm of the stacked matrix) so that roundoff-level columns do
    not register as independent directions.
    """
    a = _as_complex(a)
    b = _as_complex(b)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"row counts differ: {a.shape[0]} vs {b.shape[0]}"
        )
    joint = np.hstack([a, b])
    if scale is None:
        scale = float(np.linalg.norm(joint, 2)) if joint.size else 0.0
    return (numeric_rank(joint, tol, scale=scale)
            == numeric_rank(b, tol, scale=scale))


def span_intersection_trivial(a, b, tol: float = DEFAULT_RANK_TOL,
                              scale: float | None = None) -> bool:
    """True iff span(a) and span(b) intersect only at the origin, with all
    ranks measured against one common ``scale`` as in :func:`span_contained`."""
    a = _as_complex(a)
    b = _as_complex(b)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"row counts differ: {a.shape[0]} vs {b.shape[0]}"
        )
    stacked = np.hstack([a, b])
    if scale is None:
        scale = float(np.linalg.norm(stacked, 2)) if stacked.size else 0.0
    joint = numeric_rank(stacked, tol, scale=scale)
    return joint == (numeric_rank(a, tol, scale=scale)
                     + numeric_rank(b, tol, scale=scale))


@dataclass
class GsvdResult:
    """Joint factorization of two matrices sharing a row space.

    For inputs h (N x M) and g (N x K):

        h @ psi1 == x @ d1.conj().T        g @ psi2 == x @ d2.conj().T

    with psi1, psi2 unitary, x full column rank N x k, and the generalized
    diagonal blocks

        d1 = [I_r  0   0 ]        d2 = [0  0   0  ]
             [0    S1  0 ]             [0  S2  0  ]
             [0    0   0 ]             [0  0   I_p]

    where the column blocks have widths (r, s, p), S1 and S2 are strictly
    positive diagonals and d1^H d1 + d2^H d2 = I.  Columns inside the s-block
    are ordered by descending S1 diagonal.
    """

    psi1: np.ndarray
    psi2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    x: np.ndarray
    k: int
    r: int
    s: int
    p: int
    s1_diag: np.ndarray = field(default_factory=lambda: np.zeros(0))
    s2_diag: np.ndarray = field(default_factory=lambda: np.zeros(0))


def gsvd_transform(h, g, tol: float = DEFAULT_RANK_TOL) -> GsvdResult:
    """Joint factorization of (h, g) exposing private/common column subspaces.

    Built from an orthonormal factorization of the stacked conjugate
    transposes followed by a cosine-sine split of the orthonormal blocks;
    columns are then arranged into (r, s, p) order so downstream slicing
    formulas apply directly.
    """
    h = _as_complex(h)
    g = _as_complex(g)
    if h.shape[0] != g.shape[0]:
        raise DimensionMismatchError(
            f"row counts differ: {h.shape[0]} vs {g.shape[0]}"
        )
    n = h.shape[0]
    m = h.shape[1]
    kk = g.shape[1]

    c = np.vstack([h.conj().T, g.conj().T])  # (m + kk) x n
    k, p, r, s = subspace_dims_oracle(h, g, tol)

    if k == 0:
        return GsvdResult(
            psi1=np.eye(m, dtype=complex),
            psi2=np.eye(kk, dtype=complex),
            d1=np.zeros((m, 0), dtype=complex),
            d2=np.zeros((kk, 0), dtype=complex),
            x=np.zeros((n, 0), dtype=complex),
            k=0, r=0, s=0, p=0,
        )

    u, sv, vh = np.linalg.svd(c, full_matrices=False)
    z = u[:, :k]                      # orthonormal columns of the row space
    t = sv[:k, None] * vh[:k]         # k x n, full row rank
    z1 = z[:m]
    z2 = z[m:]

    # Cosine-sine split: the right singular basis of z2 diagonalizes
    # z2^H z2 exactly, so the columns of z1 @ w are orthogonal as well.
    if kk == 0:
        w = np.eye(k, dtype=complex)
        svals = np.zeros(k)
    else:
        _, s2v, v2h = np.linalg.svd(z2)
        svals = np.zeros(k)
        svals[: s2v.size] = s2v
        order = np.argsort(svals, kind="stable")  # ascending sine
        svals = svals[order]
        w = v2h.conj().T[:, order]

    z1w = z1 @ w
    z2w = z2 @ w
    cvals = np.linalg.norm(z1w, axis=0) if m else np.zeros(k)

    # psi1: normalized nonzero columns of z1 @ w (first r + s), completed.
    lead1 = z1w[:, : r + s] / cvals[: r + s]
    psi1 = np.hstack([lead1, orthonormal_complement(lead1, m)])

    # psi2: null-space completion first, then the s- and p-block columns.
    lead2 = z2w[:, r:] / svals[r:] if k > r else np.zeros((kk, 0), dtype=complex)
    psi2 = np.hstack([orthonormal_complement(lead2, kk), lead2])

    d1 = np.zeros((m, k), dtype=complex)
    for j in range(r + s):
        d1[j, j] = cvals[j]
    d2 = np.zeros((kk, k), dtype=complex)
    for j in range(r, k):
        d2[kk - (k - r) + (j - r), j] = svals[j]

    return GsvdResult(
        psi1=psi1,
        psi2=psi2,
        d1=d1,
        d2=d2,
        x=t.conj().T @ w,
        k=k, r=r, s=s, p=p,
        s1_diag=cvals[r: r + s].copy(),
        s2_diag=svals[r: r + s].copy(),
    )
