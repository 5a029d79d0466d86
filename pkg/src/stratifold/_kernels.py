"""Gaussian elimination over GF(p).

Each kernel has a numba-compiled loop version and a vectorized numpy version.
The numba path is used when numba imports and ``STRATIFOLD_NUMBA`` is not set
to ``0``; both paths return identical results.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

USE_NUMBA = njit is not None and os.environ.get("STRATIFOLD_NUMBA", "1") != "0"

_BIT_WEIGHTS = np.left_shift(np.uint64(1), np.arange(64, dtype=np.uint64))


def pack_rows(data: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix into little-endian uint64 words, one row per row."""
    rows, cols = data.shape
    words = (cols + 63) // 64
    padded = np.zeros((rows, words * 64), dtype=np.uint64)
    padded[:, :cols] = data & 1
    return (padded.reshape(rows, words, 64) * _BIT_WEIGHTS).sum(axis=2, dtype=np.uint64)


# -- GF(2), packed rows --------------------------------------------------


def _rank_gf2_loops(rows, n_cols):
    rows = rows.copy()
    n_rows = rows.shape[0]
    n_words = rows.shape[1]
    rank = 0
    one = np.uint64(1)
    for col in range(n_cols):
        if rank == n_rows:
            break
        w = col // 64
        mask = one << np.uint64(col % 64)
        pivot = -1
        for r in range(rank, n_rows):
            if rows[r, w] & mask:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for k in range(n_words):
                tmp = rows[rank, k]
                rows[rank, k] = rows[pivot, k]
                rows[pivot, k] = tmp
        for r in range(rank + 1, n_rows):
            if rows[r, w] & mask:
                for k in range(w, n_words):
                    rows[r, k] ^= rows[rank, k]
        rank += 1
    return rank


def _rank_gf2_numpy(rows, n_cols):
    rows = rows.copy()
    n_rows = rows.shape[0]
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        w = col // 64
        mask = np.uint64(1) << np.uint64(col % 64)
        hits = np.flatnonzero(rows[rank:, w] & mask)
        if hits.size == 0:
            continue
        pivot = rank + hits[0]
        if pivot != rank:
            rows[[rank, pivot]] = rows[[pivot, rank]]
        below = rank + 1 + np.flatnonzero(rows[rank + 1 :, w] & mask)
        rows[below] ^= rows[rank]
        rank += 1
    return rank


# -- GF(p), dense rows ---------------------------------------------------


def _rref_gfp_loops(data, p):
    m = data.copy()
    n_rows, n_cols = m.shape
    pivots = np.full(n_rows, -1, dtype=np.int64)
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = -1
        for r in range(rank, n_rows):
            if m[r, col] % p != 0:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for k in range(n_cols):
                tmp = m[rank, k]
                m[rank, k] = m[pivot, k]
                m[pivot, k] = tmp
        # inverse by Fermat; p is tiny so a loop is exact and cheap
        a = m[rank, col] % p
        inv = 1
        for _ in range(p - 2):
            inv = (inv * a) % p
        for k in range(n_cols):
            m[rank, k] = (m[rank, k] * inv) % p
        for r in range(n_rows):
            if r != rank:
                f = m[r, col] % p
                if f != 0:
                    for k in range(n_cols):
                        m[r, k] = (m[r, k] - f * m[rank, k]) % p
        pivots[rank] = col
        rank += 1
    return m, pivots[:rank]


def _rref_gfp_numpy(data, p):
    m = data.copy() % p
    n_rows, n_cols = m.shape
    pivots = []
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        hits = np.flatnonzero(m[rank:, col])
        if hits.size == 0:
            continue
        pivot = rank + hits[0]
        if pivot != rank:
            m[[rank, pivot]] = m[[pivot, rank]]
        inv = pow(int(m[rank, col]), p - 2, p)
        m[rank] = (m[rank] * inv) % p
        factors = m[:, col].copy()
        factors[rank] = 0
        m = (m - np.outer(factors, m[rank])) % p
        pivots.append(col)
        rank += 1
    return m, np.asarray(pivots, dtype=np.int64)


if USE_NUMBA:
    _rank_gf2 = njit(cache=True)(_rank_gf2_loops)
    _rref_gfp = njit(cache=True)(_rref_gfp_loops)
else:
    _rank_gf2 = _rank_gf2_numpy
    _rref_gfp = _rref_gfp_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def rank_gf2(data: np.ndarray) -> int:
    data = np.asarray(data, dtype=np.int64)
    if data.size == 0:
        return 0
    return int(_rank_gf2(pack_rows(data), data.shape[1]))


def rref_gfp(data: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form mod ``p`` and its pivot columns."""
    data = np.ascontiguousarray(np.asarray(data, dtype=np.int64) % p)
    if data.size == 0:
        return data, np.zeros(0, dtype=np.int64)
    return _rref_gfp(data, p)


def rank_gfp(data: np.ndarray, p: int) -> int:
    if p == 2:
        return rank_gf2(data)
    return len(rref_gfp(data, p)[1])


def nullspace_gfp(data: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : data @ x = 0 mod p}``, one row per free column."""
    data = np.asarray(data, dtype=np.int64)
    n_cols = data.shape[1]
    reduced, pivots = rref_gfp(data, p)
    pivot_list = [int(c) for c in pivots]
    free = [c for c in range(n_cols) if c not in set(pivot_list)]
    basis = np.zeros((len(free), n_cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, c in enumerate(pivot_list):
            basis[i, c] = (-reduced[r, f]) % p
    return basis
