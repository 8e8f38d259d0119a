"""Small matrix helpers over the jet algebra."""

from __future__ import annotations

import numpy as np

from .jets import Jet
from .rational import GaussianRational


def _inverse_exact(m: np.ndarray) -> np.ndarray:
    n = m.shape[-1]
    a = np.array(m, dtype=object)
    inv = np.empty_like(a)
    inv[...] = GaussianRational(0)
    for i in range(n):
        inv[..., i, i] = GaussianRational(1)
    flat_a = a.reshape(-1, n, n)
    flat_i = inv.reshape(-1, n, n)
    for b in range(flat_a.shape[0]):
        A, X = flat_a[b], flat_i[b]
        for col in range(n):
            piv = next((r for r in range(col, n) if A[r, col] != 0), None)
            if piv is None:
                raise np.linalg.LinAlgError("singular matrix")
            if piv != col:
                A[[col, piv]] = A[[piv, col]]
                X[[col, piv]] = X[[piv, col]]
            p = A[col, col]
            A[col] = [v / p for v in A[col]]
            X[col] = [v / p for v in X[col]]
            for r in range(n):
                if r != col and A[r, col] != 0:
                    f = A[r, col]
                    A[r] = [u - f * v for u, v in zip(A[r], A[col])]
                    X[r] = [u - f * v for u, v in zip(X[r], X[col])]
    return flat_i.reshape(m.shape)


def inverse_constant(m: np.ndarray, exact: bool = False) -> np.ndarray:
    """Inverse of a (batched) square matrix of plain scalars."""
    if exact:
        return _inverse_exact(m)
    return np.linalg.inv(m)


def matrix_inverse(m: Jet) -> Jet:
    """Inverse of a matrix jet by a Neumann series around its constant term."""
    s = m.space
    inv0 = inverse_constant(m.value, s.exact)
    c0 = Jet.constant(s, inv0)
    t = c0 @ m - Jet.constant(s, np.broadcast_to(np.eye(m.tail[-1]), m.tail))
    ident = Jet.constant(s, np.broadcast_to(np.eye(m.tail[-1]), m.tail))
    r = ident
    for _ in range(s.xorder + s.xiorder):
        r = ident - t @ r
    return r @ c0
