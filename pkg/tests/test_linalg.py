import random

import pytest

from supertroesch.linalg import (
    FpMatrix,
    ShapeMismatchError,
    hstack,
    invert,
    matmul,
    matpow,
)
from supertroesch.superspace import rho


def random_matrix(rng, p, rows, cols, sparse=False, density=0.5):
    m = FpMatrix.zeros(p, rows, cols, sparse=sparse)
    for i in range(rows):
        for j in range(cols):
            if rng.random() < density:
                m.set(i, j, rng.randrange(1, p))
    return m


def test_rank_empty_and_identity():
    assert FpMatrix.zeros(3, 0, 0).rank() == 0
    assert FpMatrix.identity(3, 3).rank() == 3


def test_rank_one_by_one():
    # the differential of the one-dimensional purely odd degree-0 piece
    m = FpMatrix.from_rows(3, [[1]])
    assert m.rank() == 1


def test_solve_identity():
    m = FpMatrix.identity(5, 2)
    assert m.solve([3, 4]) == [3, 4]


def test_kernel_of_zero_map():
    m = FpMatrix.zeros(3, 1, 1)
    assert m.kernel_basis().cols == 1


def test_matpow_rho_is_nilpotent():
    for p in (3, 5):
        m = rho(p, 1, 0).matrix
        assert not matpow(m, p - 1).is_zero()
        assert matpow(m, p).is_zero()


def test_shape_mismatch_reports_both_shapes():
    a = FpMatrix.zeros(3, 2, 3)
    b = FpMatrix.zeros(3, 2, 3)
    with pytest.raises(ShapeMismatchError) as exc:
        matmul(a, b)
    assert "(2, 3)" in str(exc.value)


def test_rank_nullity_and_image_rank():
    rng = random.Random(7)
    for _ in range(200):
        p = rng.choice((3, 5, 7))
        rows = rng.randrange(0, 6)
        cols = rng.randrange(0, 6)
        m = random_matrix(rng, p, rows, cols)
        r = m.rank()
        ker = m.kernel_basis()
        img = m.image_basis()
        assert r + ker.cols == cols
        assert img.cols == r
        assert img.rank() == r
        if ker.cols:
            assert matmul(m, ker).is_zero()


def test_matmul_associative():
    rng = random.Random(11)
    for _ in range(200):
        p = rng.choice((3, 5))
        a = random_matrix(rng, p, rng.randrange(1, 5), rng.randrange(1, 5))
        b = random_matrix(rng, p, a.cols, rng.randrange(1, 5))
        c = random_matrix(rng, p, b.cols, rng.randrange(1, 5))
        assert matmul(matmul(a, b), c) == matmul(a, matmul(b, c))


def test_dense_sparse_agree():
    rng = random.Random(13)
    for _ in range(200):
        p = rng.choice((3, 5, 7))
        rows = rng.randrange(0, 6)
        cols = rng.randrange(0, 6)
        d = random_matrix(rng, p, rows, cols, sparse=False)
        s = d.to_sparse()
        assert d.rank() == s.rank()
        assert d.kernel_basis().to_dense() == s.kernel_basis().to_dense()
        assert d.image_basis().to_dense() == s.image_basis().to_dense()
        b = [rng.randrange(p) for _ in range(rows)]
        xd = d.solve(b)
        xs = s.solve(b)
        assert xd == xs


def test_solve_inconsistent_returns_none():
    m = FpMatrix.from_rows(3, [[1, 1], [1, 1]])
    assert m.solve([1, 2]) is None
    assert m.solve([1, 1]) is not None


def test_invert_round_trip():
    rng = random.Random(17)
    found = 0
    for _ in range(100):
        p = rng.choice((3, 5))
        m = random_matrix(rng, p, 3, 3, density=0.8)
        inv = invert(m)
        if inv is not None:
            found += 1
            assert matmul(m, inv) == FpMatrix.identity(p, 3)
            assert matmul(inv, m) == FpMatrix.identity(p, 3)
    assert found > 10


def test_hstack_ranks():
    a = FpMatrix.from_rows(3, [[1], [0]])
    b = FpMatrix.from_rows(3, [[0], [1]])
    assert hstack([a, b]).rank() == 2
