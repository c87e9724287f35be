"""Row reduction and nullspaces over the prime field F_p."""

from __future__ import annotations

import numpy as np


def rref_mod_p(mat, p: int):
    """Reduced row echelon form of ``mat`` over F_p.

    Returns ``(R, pivots)`` where ``pivots`` lists the pivot column of each
    nonzero row of ``R``.
    """
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    inverses = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        nz = np.flatnonzero(a[row:, col])
        if len(nz) == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
        a[row] = (a[row] * inverses[a[row, col]]) % p
        factors = a[:, col].copy()
        factors[row] = 0
        hit = np.flatnonzero(factors)
        if len(hit):
            a[hit] = (a[hit] - np.outer(factors[hit], a[row])) % p
        pivots.append(col)
        row += 1
    return a[:row], pivots


def nullspace_mod_p(mat, p: int) -> np.ndarray:
    """Basis (as rows) of {x : mat @ x = 0 mod p}, one vector per free column."""
    mat = np.asarray(mat, dtype=np.int64)
    cols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    reduced, pivots = rref_mod_p(mat, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-reduced[i, f]) % p
    return basis


def rank_mod_p(mat, p: int) -> int:
    mat = np.asarray(mat, dtype=np.int64)
    if mat.size == 0:
        return 0
    return len(rref_mod_p(mat, p)[1])
