import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decaysum import bounds, decay
from decaysum.errors import DimensionError, DomainError, SizeGuardError
from decaysum.toeplitz import (
    DENSE_LIMIT,
    ToeplitzFactor,
    build_block_factor,
    build_factor,
    counting_harmonic_cap,
    counting_norm_cap,
    lower_toeplitz,
    mf_matrix,
    reconstruct_mf,
    symbol_product,
    toeplitz_matvec,
)


def naive_matvec(col, x):
    T = len(x)
    return np.array([sum(col[t - i] * x[i] for i in range(t + 1)) for t in range(T)])


def test_build_factor_examples():
    np.testing.assert_allclose(build_factor(decay.constant(), 3).first_column, [1, 0.5, 0.375])
    np.testing.assert_allclose(build_factor(decay.polynomial(1), 2).first_column, [1, 0.25])
    assert build_factor(decay.polynomial(3), 1).first_column.tolist() == [1.0]


def test_matvec_examples():
    ident = ToeplitzFactor([1.0, 0.0, 0.0])
    assert toeplitz_matvec(ident, [3.0, -1.0, 2.0]).tolist() == [3.0, -1.0, 2.0]
    ones = ToeplitzFactor(np.ones(4))
    assert toeplitz_matvec(ones, [1.0, 2.0, 3.0, 4.0]).tolist() == [1.0, 3.0, 6.0, 10.0]
    # applying the counting square root twice to e_1 gives the all-ones column
    L = build_factor(decay.constant(), 6)
    e1 = np.eye(6)[0]
    np.testing.assert_allclose(toeplitz_matvec(L, toeplitz_matvec(L, e1)), np.ones(6), atol=1e-15)


def test_matvec_shape_error():
    with pytest.raises(DimensionError):
        toeplitz_matvec(ToeplitzFactor([1.0, 0.5]), [1.0, 2.0, 3.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40))
def test_matvec_matches_naive(x):
    L = build_factor(decay.polynomial(1), len(x))
    np.testing.assert_allclose(toeplitz_matvec(L, x), naive_matvec(L.first_column, x), atol=1e-12)
    np.testing.assert_allclose(toeplitz_matvec(L, x), L.dense() @ np.asarray(x), atol=1e-12)


@pytest.mark.parametrize("f,T", [(decay.polynomial(1), 64), (decay.exponential(1.5), 128), (decay.constant(), 100)])
def test_reconstruct(f, T):
    err = np.max(np.abs(reconstruct_mf(build_factor(f, T)) - mf_matrix(f, T)))
    assert err <= 1e-9


def test_reconstruct_trivial_horizon():
    assert reconstruct_mf(build_factor(decay.polynomial(2), 1)).tolist() == [[1.0]]


def test_mf_matrix_layout():
    M = mf_matrix(decay.polynomial(1), 3)
    np.testing.assert_allclose(M, [[1, 0, 0], [0.5, 1, 0], [1 / 3, 0.5, 1]])


def test_size_guard():
    with pytest.raises(SizeGuardError):
        lower_toeplitz(np.zeros(DENSE_LIMIT + 1))


def test_column_norm_is_upper_bound():
    for f in (decay.polynomial(1), decay.exponential(1.25), decay.constant()):
        L = build_factor(f, 500)
        assert L.column_norm**2 == pytest.approx(bounds.gamma2_upper_bound(f, 500), rel=1e-14)
        assert L.prefix_norms_sq()[-1] == pytest.approx(L.column_norm**2, rel=1e-14)
        # max row norm of L equals max column norm for Toeplitz factors
        D = L.dense()
        assert np.max(np.linalg.norm(D, axis=1)) == pytest.approx(L.column_norm, rel=1e-12)
        assert np.max(np.linalg.norm(D, axis=0)) == pytest.approx(L.column_norm, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=1, max_size=25),
    st.lists(st.floats(-2, 2), min_size=1, max_size=25),
)
def test_symbol_product_law(a, b):
    T = min(len(a), len(b))
    A = lower_toeplitz(a[:T])
    B = lower_toeplitz(b[:T])
    np.testing.assert_allclose(A @ B, lower_toeplitz(symbol_product(a, b)), atol=1e-12)
    np.testing.assert_allclose(A @ B, B @ A, atol=1e-12)


class TestBlockFactor:
    def test_layout_w2_T5(self):
        B = build_block_factor(2, 5)
        assert B.block_count == 3 and B.tail_size == 1
        assert B.block_sizes() == [2, 2, 1]
        expected = np.array(
            [
                [1, 0, 0, 0, 0],
                [0.5, 1, 0, 0, 0],
                [0, 0, 1, 0, 0],
                [0, 0, 0.5, 1, 0],
                [0, 0, 0, 0, 1],
            ]
        )
        np.testing.assert_allclose(B.dense(), expected)

    def test_full_window_is_toeplitz_factor(self):
        B = build_block_factor(9, 9)
        np.testing.assert_array_equal(B.dense(), build_factor(decay.constant(), 9).dense())

    @pytest.mark.parametrize("w,T", [(1, 7), (3, 10), (4, 8), (7, 512), (512, 512)])
    def test_squared_is_blockwise_prefix_sums(self, w, T):
        B = build_block_factor(w, T)
        x = np.random.default_rng(w * T).normal(size=T)
        got = B.matvec(B.matvec(x))
        expected = np.concatenate([np.cumsum(x[s : s + w]) for s in range(0, T, w)])
        np.testing.assert_allclose(got, expected, atol=1e-10)
        if T <= 64:
            np.testing.assert_allclose(B.dense() @ x, B.matvec(x), atol=1e-12)

    @pytest.mark.parametrize("w", [1, 2, 5, 16, 31])
    def test_log_cap_small_windows(self, w):
        assert build_block_factor(w, w).column_norm ** 2 <= counting_norm_cap(w)

    @pytest.mark.parametrize("w", [32, 100, 1000, 4096])
    def test_log_cap_breaks_for_larger_windows(self, w):
        # the log(w)/pi + 2/w form undershoots once 2/w drops below ~0.066
        assert build_block_factor(w, w).column_norm ** 2 > counting_norm_cap(w)

    @pytest.mark.parametrize("w", [1, 2, 5, 16, 32, 100, 1000, 4096])
    def test_harmonic_cap(self, w):
        n2 = build_block_factor(w, w).column_norm ** 2
        assert n2 <= counting_harmonic_cap(w)
        assert n2 >= 1 + math.log(w) / math.pi

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            build_block_factor(0, 5)
        with pytest.raises(DomainError):
            build_block_factor(6, 5)
        with pytest.raises(DomainError):
            build_factor(decay.sliding_window(3), 5)
        with pytest.raises(DimensionError):
            build_block_factor(2, 4).matvec(np.ones(3))
