import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from stratifold import _kernels
from strategies import naive_rank

numba = pytest.importorskip("numba")
rank_gf2_jit = numba.njit(_kernels._rank_gf2_loops)
rref_jit = numba.njit(_kernels._rref_gfp_loops)


def matrices(p):
    shapes = hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=30)
    return hnp.arrays(np.int64, shapes, elements=st.integers(0, p - 1))


def test_random_matrices_against_naive_elimination():
    rng = np.random.default_rng(5)
    for trial in range(1000):
        p = (2, 3)[trial % 2]
        r, c = rng.integers(1, 31, size=2)
        density = rng.uniform(0.05, 0.9)
        m = (rng.random((r, c)) < density) * rng.integers(1, p, size=(r, c))
        assert _kernels.rank_gfp(m, p) == naive_rank(m.tolist(), p)


@given(matrices(2))
def test_gf2_paths_agree(m):
    packed = _kernels.pack_rows(m)
    expected = naive_rank(m.tolist(), 2)
    assert _kernels._rank_gf2_numpy(packed, m.shape[1]) == expected
    assert rank_gf2_jit(packed, m.shape[1]) == expected


@given(matrices(3))
def test_gf3_paths_agree(m):
    a, pa = _kernels._rref_gfp_numpy(m, 3)
    b, pb = rref_jit(m.copy(), 3)
    assert np.array_equal(a, b) and np.array_equal(pa, pb)
    assert len(pa) == naive_rank(m.tolist(), 3)


def test_wide_rows_cross_word_boundary():
    m = np.zeros((3, 130), dtype=np.int64)
    m[0, 0] = m[0, 129] = 1
    m[1, 64] = m[1, 129] = 1
    m[2, 0] = m[2, 64] = 1
    assert _kernels.rank_gf2(m) == 2


@pytest.mark.parametrize("p", [2, 3, 5])
@given(data=st.data())
def test_nullspace_annihilates(p, data):
    m = data.draw(matrices(p))
    basis = _kernels.nullspace_gfp(m, p)
    assert len(basis) == m.shape[1] - naive_rank(m.tolist(), p)
    if len(basis):
        assert not ((m @ basis.T) % p).any()
        assert naive_rank(basis.tolist(), p) == len(basis)


def test_edge_cases():
    assert _kernels.rank_gfp(np.zeros((0, 0), dtype=np.int64), 2) == 0
    assert _kernels.rank_gfp(np.zeros((4, 4), dtype=np.int64), 3) == 0
    assert _kernels.rank_gfp(np.eye(3, dtype=np.int64), 2) == 3
    assert _kernels.rank_gfp(np.eye(3, dtype=np.int64) * 3, 3) == 0


@pytest.mark.parametrize("flag, expected", [("0", "numpy"), ("1", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, STRATIFOLD_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from stratifold import _kernels; print(_kernels.backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected
