import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hankel_schatten.hankel import (SVD_LIMIT, BlockMatrix, HankelOperator, antidiagonal_sums, d_power,
                                    gamma_tilde_11, hankel_matrix, hankel_matvec_fft, operator_norm_power,
                                    p_hank_paper, p_hank_windowed, schatten_norm, singular_values, tp_matrix,
                                    trace_pairing)
from hankel_schatten.series import FormalSeries

from conftest import series

INF = math.inf
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


def unit(m, j, k):
    E = np.zeros((m, m), dtype=complex)
    E[j, k] = 1.0
    return E


# ---- construction


def test_hankel_matrix_examples():
    assert np.array_equal(hankel_matrix(FormalSeries.monomial(0), m=3).entries, unit(3, 0, 0))
    assert np.array_equal(hankel_matrix(FormalSeries.monomial(1), m=2).entries, SWAP)
    A = hankel_matrix(FormalSeries.monomial(1), 1.0, 0.0, 2).entries
    assert np.array_equal(A, [[0, 1], [2, 0]])


def test_block_layout_round_trip():
    g = np.random.default_rng(0)
    blocks = g.standard_normal((3, 3, 2, 2))
    B = BlockMatrix.from_blocks(blocks)
    assert np.array_equal(B.to_blocks(), blocks)
    assert np.array_equal(B.block(1, 2), blocks[1, 2])
    assert B.entries[1 * 2 + 0, 2 * 2 + 1] == blocks[1, 2, 0, 1]


def test_block_hankel_blocks():
    f = FormalSeries(np.random.default_rng(1).standard_normal((5, 2, 2)))
    H = hankel_matrix(f, 0.5, -0.2, 3)
    for j in range(3):
        for k in range(3):
            expected = (1 + j) ** 0.5 * (1 + k) ** -0.2 * f.coeff(j + k)
            assert np.allclose(H.block(j, k), expected)


def test_block_matrix_validation():
    with pytest.raises(ValueError):
        BlockMatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        BlockMatrix(np.zeros((3, 3)), d=2)


# ---- singular values and Schatten norms


def test_singular_values_examples():
    assert np.allclose(singular_values(np.eye(3)), [1, 1, 1])
    assert np.allclose(singular_values(SWAP), [1, 1])
    u, v = np.array([1.0, 2.0, 2.0]), np.array([3.0, 0.0, 4.0])
    assert np.allclose(singular_values(np.outer(u, v)), [15.0, 0.0, 0.0], atol=1e-12)


def test_schatten_examples():
    assert schatten_norm(np.eye(2), 2.0) == pytest.approx(math.sqrt(2))
    assert schatten_norm(SWAP, 4.0) == pytest.approx(2 ** 0.25)
    for p in (1.0, 1.5, 3.0, INF):
        assert schatten_norm(hankel_matrix(FormalSeries.monomial(0), m=5), p) == pytest.approx(1.0)


def test_schatten_rejects_small_p_and_large_size():
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), 0.5)
    with pytest.raises(ValueError):
        singular_values(np.zeros((SVD_LIMIT + 1, SVD_LIMIT + 1)))


@given(series(max_degree=20), st.floats(1.0, 8.0), st.floats(1.0, 8.0))
def test_schatten_monotone_in_p(f, p, q):
    p, q = min(p, q), max(p, q)
    A = hankel_matrix(f, 0.3, 0.1)
    assert schatten_norm(A, p) >= schatten_norm(A, q) * (1 - 1e-12)
    assert schatten_norm(A, q) >= schatten_norm(A, INF) * (1 - 1e-12)


# ---- FFT mat-vec and power iteration


def test_matvec_examples():
    assert np.allclose(hankel_matvec_fft([1, 2, 3], [1, 1]), [3, 5])
    assert np.allclose(hankel_matvec_fft([0, 0, 0], [1, 2]), [0, 0])
    assert np.allclose(hankel_matvec_fft([1, 0, 0], [0, 1]), [0, 0])


@pytest.mark.parametrize("m", list(range(1, 65)) + [1000, 4096])
def test_matvec_matches_dense(m):
    g = np.random.default_rng(m)
    c = g.standard_normal(2 * m - 1) + 1j * g.standard_normal(2 * m - 1)
    x = g.standard_normal(m) + 1j * g.standard_normal(m)
    j = np.arange(m)
    dense = c[j[:, None] + j[None, :]] @ x
    assert np.linalg.norm(hankel_matvec_fft(c, x) - dense) <= 1e-10 * np.linalg.norm(dense)


def test_matvec_several_right_hand_sides_and_real_output():
    g = np.random.default_rng(5)
    c, X = g.standard_normal(9), g.standard_normal((5, 3))
    Y = hankel_matvec_fft(c, X)
    assert Y.shape == (5, 3) and not np.iscomplexobj(Y)
    j = np.arange(5)
    assert np.allclose(Y, c[j[:, None] + j[None, :]] @ X)


def test_hankel_operator_adjoint():
    g = np.random.default_rng(9)
    op = HankelOperator(g.standard_normal(15) + 1j * g.standard_normal(15), 8)
    A = op.todense()
    x = g.standard_normal(8) + 1j * g.standard_normal(8)
    assert np.allclose(op.matvec(x), A @ x)
    assert np.allclose(op.rmatvec(x), A.conj().T @ x)


@pytest.mark.parametrize("A, expected", [(np.eye(4), 1.0), (SWAP, 1.0), (np.diag([3.0, 1.0]), 3.0)])
def test_power_iteration_examples(A, expected):
    assert operator_norm_power(A, tol=1e-12) == pytest.approx(expected, rel=1e-6)


@given(series(max_degree=30), st.integers(0, 1000))
def test_power_iteration_is_lower_bound(f, seed):
    A = hankel_matrix(f).entries
    top = singular_values(A)[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        est = operator_norm_power(A, iters=50, seed=seed)
    assert est <= top * (1 + 1e-12)


def test_power_iteration_warns_at_cap():
    A = np.diag([1.0, 0.999999, 0.5])
    with pytest.warns(RuntimeWarning):
        operator_norm_power(A, iters=3, tol=1e-15)


# ---- projections


def test_p_hank_paper_examples():
    out = p_hank_paper(unit(1, 0, 0))
    assert np.array_equal(out.entries, [[1]])
    out = p_hank_paper(unit(2, 0, 1)).entries
    expected = np.zeros((3, 3))
    expected[0, 1] = expected[1, 0] = 0.5
    assert np.allclose(out, expected)


@given(series(max_degree=6))
def test_p_hank_paper_keeps_complete_antidiagonals(f):
    m = 7
    A = hankel_matrix(f, m=m)
    out = p_hank_paper(A).to_blocks()
    sums = antidiagonal_sums(A)
    for n in range(m):
        assert np.allclose(out[n, 0], f.coeff(n))
    assert np.allclose(sums[:m, 0, 0], f.padded(m)[:, 0, 0] * (np.arange(m) + 1))


def test_p_hank_windowed_examples():
    out = p_hank_windowed(unit(2, 0, 1)).entries
    assert np.allclose(out, 0.5 * SWAP)
    assert np.allclose(p_hank_windowed(unit(2, 1, 1)).entries, unit(2, 1, 1))
    H = hankel_matrix(FormalSeries(np.arange(1.0, 10.0)), m=5)
    assert np.allclose(p_hank_windowed(H).entries, H.entries)


@given(st.integers(1, 12), st.integers(0, 10 ** 6), st.sampled_from([1, 2]))
def test_p_hank_windowed_idempotent(m, seed, d):
    g = np.random.default_rng(seed)
    A = BlockMatrix(g.standard_normal((m * d, m * d)) + 1j * g.standard_normal((m * d, m * d)), d)
    once = p_hank_windowed(A)
    assert np.allclose(p_hank_windowed(once).entries, once.entries, atol=1e-12)


@given(st.integers(1, 12), st.integers(0, 10 ** 6))
def test_p_hank_paper_is_frobenius_contraction(m, seed):
    g = np.random.default_rng(seed)
    A = g.standard_normal((m, m)) + 1j * g.standard_normal((m, m))
    assert schatten_norm(p_hank_paper(A), 2) <= schatten_norm(A, 2) * (1 + 1e-10)


# ---- weights, T_p and the duality matrix


def test_d_power_examples():
    assert np.array_equal(d_power(3, 0.0).entries, np.eye(3))
    assert np.allclose(d_power(2, 1.0).entries, np.diag([1.0, 0.5]))
    assert np.allclose(np.diag(d_power(4, 0.5).entries), (1.0 + np.arange(4)) ** -0.5)
    assert np.allclose(d_power(2, 1.0, d=2).entries, np.diag([1, 1, 0.5, 0.5]))


def test_tp_matrix_examples():
    assert np.allclose(tp_matrix(FormalSeries.monomial(0), 0.4, 0.2, 3.0, 3).entries, unit(3, 0, 0))
    assert np.allclose(tp_matrix(FormalSeries.monomial(1), 1.0, 1.0, INF, 2).entries, 0.5 * SWAP)


@given(series(max_degree=10), st.floats(0, 1.5), st.floats(1, 6))
def test_tp_matrix_symmetric(f, a, p):
    T = tp_matrix(f, a, a, p, 8).entries
    assert np.allclose(T, T.T)


def test_gamma_tilde_examples():
    assert np.allclose(gamma_tilde_11(FormalSeries.monomial(0), 0.7, 1.3, 2).entries, unit(2, 0, 0))
    assert np.allclose(gamma_tilde_11(FormalSeries.monomial(1), 0.0, 0.0, 2).entries, 2 * SWAP)
    g = FormalSeries(np.arange(1.0, 6.0))
    assert np.allclose(gamma_tilde_11(2 * g, 0.3, 0.1, 3).entries, 2 * gamma_tilde_11(g, 0.3, 0.1, 3).entries)


def test_trace_pairing_examples():
    assert trace_pairing(unit(2, 0, 0), unit(2, 0, 0)) == 1
    assert trace_pairing(unit(2, 0, 1), unit(2, 1, 0)) == 0
    assert trace_pairing(np.eye(2), np.eye(2)) == 2
    with pytest.raises(ValueError):
        trace_pairing(np.eye(2), np.eye(3))
