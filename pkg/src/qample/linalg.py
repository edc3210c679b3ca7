"""Exact rank and kernel computations over Q and over prime fields.

Matrices are plain nested sequences of Python ints (or integer numpy arrays).
``p=None`` means the rationals; a prime ``p`` means F_p.  All work is
delegated to FLINT, which keeps integers exact.
"""

from __future__ import annotations

from collections.abc import Sequence

import flint
import numpy as np

Matrix = Sequence[Sequence[int]]


def _shape(rows) -> tuple[int, int]:
    if isinstance(rows, np.ndarray):
        if rows.ndim != 2:
            raise ValueError("expected a 2-d array")
        return rows.shape
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    return nrows, ncols


def _flat(rows) -> list[int]:
    if isinstance(rows, np.ndarray):
        return [int(x) for x in rows.ravel()]
    return [int(x) for row in rows for x in row]


def to_flint(rows, p: int | None = None, ncols: int | None = None):
    nr, nc = _shape(rows)
    if ncols is not None:
        nc = ncols if nr == 0 else nc
    if p is None:
        return flint.fmpz_mat(nr, nc, _flat(rows))
    return flint.nmod_mat(nr, nc, [x % p for x in _flat(rows)], p)


def rank(rows, p: int | None = None) -> int:
    nr, nc = _shape(rows)
    if nr == 0 or nc == 0:
        return 0
    return to_flint(rows, p).rank()


def nullspace(rows, ncols: int | None = None, p: int | None = None) -> list[list[int]]:
    """Basis of ``{x : M x = 0}``.

    Over Q the basis vectors are integral.  Over F_p entries are reduced
    representatives in ``[0, p)``.  ``ncols`` is needed when ``rows`` is empty.
    """
    nr, nc = _shape(rows)
    if nr == 0:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    if nc == 0:
        return []
    X, nullity = to_flint(rows, p).nullspace()
    basis = []
    for k in range(nullity):
        col = [int(X[i, k]) for i in range(nc)]
        if p is None:
            col = _primitive(col)
        basis.append(col)
    return basis


def _primitive(v: list[int]) -> list[int]:
    from math import gcd

    g = 0
    for x in v:
        g = gcd(g, x)
    if g > 1:
        v = [x // g for x in v]
    return v


def det(rows) -> int:
    nr, nc = _shape(rows)
    if nr != nc:
        raise ValueError("determinant of a non-square matrix")
    if nr == 0:
        return 1
    return int(to_flint(rows).det())


def solve_unimodular(rows, rhs: Sequence[int]) -> list[int]:
    """Solve ``M x = rhs`` for square ``M`` with determinant +-1."""
    M = to_flint(rows)
    n = M.nrows()
    b = flint.fmpz_mat(n, 1, [int(x) for x in rhs])
    x = M.solve(b)
    return [int(x[i, 0]) for i in range(n)]


def inverse_unimodular(rows) -> list[list[int]]:
    M = to_flint(rows)
    inv = M.inv()  # fmpq_mat
    n = M.nrows()
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            e = inv[i, j]
            if e.q != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(e.p))
        out.append(row)
    return out


def homology_dims(boundaries: Sequence, dims: Sequence[int], p: int | None = None) -> list[int]:
    """Homology of a chain complex ``C_0 <- C_1 <- ... <- C_k``.

    ``boundaries[i]`` is the matrix of ``C_{i+1} -> C_i`` (shape
    ``dims[i] x dims[i+1]``).  Returns ``[dim H_0, ..., dim H_k]``.
    """
    ranks = [rank(b, p) if dims[i] and dims[i + 1] else 0 for i, b in enumerate(boundaries)]
    out = []
    for i, d in enumerate(dims):
        into = ranks[i] if i < len(ranks) else 0
        outof = ranks[i - 1] if i >= 1 else 0
        out.append(d - outof - into)
    return out


def left_kernel(rows, nrows: int, p: int | None = None) -> list[list[int]]:
    """Basis of ``{v : v M = 0}`` for an ``nrows``-row matrix."""
    nr, nc = _shape(rows)
    if nr == 0:
        return []
    if nc == 0:
        return [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    return nullspace(to_flint(rows, p).transpose().tolist(), ncols=nrows, p=p)


def pivot_rows(rows, p: int | None = None) -> list[int]:
    """Indices of the rows chosen greedily (top to bottom) to form a basis of the row span."""
    nr, nc = _shape(rows)
    if nr == 0 or nc == 0:
        return []
    T = to_flint(rows, p).transpose()
    if p is None:
        R, _den, rk = T.rref()
    else:
        R, rk = T.rref()
    out = []
    for r in range(rk):
        for c in range(nr):
            if R[r, c] != 0:
                out.append(c)
                break
    return out
