"""Chained pseudo-distance over a finite point set."""

from __future__ import annotations

import numpy as np


def quotient_metric(points, F, chain_length: int | None = None) -> np.ndarray:
    """Smallest sum of ``F`` along chains of at most ``chain_length`` hops.

    ``F`` is either a callable ``F(p, q)`` or a precomputed square table.
    With the default ``chain_length = n - 1`` this is the all-pairs shortest
    path of the ``F``-graph, which satisfies the triangle inequality.
    """
    n = len(points)
    if callable(F):
        T = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                T[i, j] = T[j, i] = F(points[i], points[j])
    else:
        T = np.array(F, dtype=float)
        if T.shape != (n, n):
            raise ValueError("table shape does not match the number of points")
    if np.any(T < 0) or not np.allclose(T, T.T, rtol=0, atol=0) or np.any(np.diag(T) != 0):
        raise ValueError("F must be symmetric, nonnegative and vanish on the diagonal")
    hops = n - 1 if chain_length is None else int(chain_length)
    d = T.copy()
    for _ in range(max(hops - 1, 0)):
        nxt = np.minimum(d, np.min(d[:, :, None] + T[None, :, :], axis=1))
        if np.array_equal(nxt, d):
            break
        d = nxt
    return d
