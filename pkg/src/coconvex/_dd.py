"""Pure numpy double-description clip step (fallback kernel).

A polytope is carried as a vertex array ``V`` (k, n) and a bit-packed
incidence array ``I`` (k, W) of uint64 words: bit ``j`` of row ``i`` is set
when vertex ``i`` lies on the boundary of halfspace ``j``.
"""
import numpy as np

OK, REDUNDANT, NO_INTERIOR = 0, 1, 2


def _popcount(words):
    return np.bitwise_count(words).sum(axis=-1)


def clip(V, I, a, b, col, ndim, eps):
    """Intersect the polytope (V, I) with ``{x : a·x <= b}``.

    Returns ``(V2, I2, status)``.  ``status`` is ``REDUNDANT`` when no vertex
    is cut (the new plane only marks incidences) and ``NO_INTERIOR`` when no
    vertex lies strictly inside; in the latter case ``V2`` and ``I2`` hold only
    the vertices on the plane.
    """
    s = V @ a - b
    plus = s > eps
    minus = s < -eps
    zero = ~(plus | minus)
    word, bit = divmod(col, 64)
    mask = np.uint64(1) << np.uint64(bit)

    I2 = I.copy()
    I2[zero, word] |= mask
    if not plus.any():
        return V, I2, REDUNDANT
    if not minus.any():
        return V[zero], I2[zero], NO_INTERIOR

    P = np.flatnonzero(plus)
    M = np.flatnonzero(minus)
    new_v, new_i = [], []
    for i in P:
        Z = I[i] & I[M]
        cand = _popcount(Z) >= ndim - 1
        if not cand.any():
            continue
        Zc = Z[cand]
        Mc = M[cand]
        # adjacent iff only i and j carry every bit of Z
        cover = np.all((I[None, :, :] & Zc[:, None, :]) == Zc[:, None, :], axis=2)
        adj = cover.sum(axis=1) == 2
        if not adj.any():
            continue
        j = Mc[adj]
        lam = (s[j] / (s[j] - s[i]))[:, None]
        new_v.append(V[j] + lam * (V[i] - V[j]))
        zi = Zc[adj].copy()
        zi[:, word] |= mask
        new_i.append(zi)

    keep = ~plus
    if new_v:
        V2 = np.vstack([V[keep]] + new_v)
        I2 = np.vstack([I2[keep]] + new_i)
    else:
        V2, I2 = V[keep], I2[keep]
    return np.ascontiguousarray(V2), np.ascontiguousarray(I2), OK
