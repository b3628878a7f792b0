import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkjoin_bounds.maxplus import (
    EPS,
    MaxPlusMatrix,
    diag,
    identity,
    mat_oplus,
    mat_otimes,
    mat_power,
    norm,
    null,
    oplus,
    otimes,
    scalar_power,
    scale,
    standard_pattern,
)

from oracles import naive_matmul

# integer-valued entries keep every sum exact, so laws can be checked with ==
values = st.one_of(st.just(EPS), st.integers(-60, 60).map(float))
finite = st.integers(-60, 60).map(float)


def matrices(rows, cols, elements=values):
    return st.lists(st.lists(elements, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        MaxPlusMatrix
    )


square = st.integers(1, 5).flatmap(lambda n: matrices(n, n))
same_shape_pair = st.tuples(st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda s: st.tuples(matrices(*s), matrices(*s))
)
chain_pair = st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda s: st.tuples(matrices(s[0], s[1]), matrices(s[1], s[2]))
)


class TestScalars:
    def test_oplus_examples(self):
        assert oplus(3, 5) == 5
        assert oplus(7.5, EPS) == 7.5
        assert oplus(EPS, -2) == -2
        assert oplus(2.5, 2.5) == 2.5

    def test_otimes_examples(self):
        assert otimes(3, 5) == 8
        assert otimes(4.25, 0) == 4.25
        assert otimes(7, EPS) == EPS
        assert otimes(EPS, EPS) == EPS

    def test_rejects_positive_infinity_and_nan(self):
        with pytest.raises(ValueError):
            oplus(math.inf, 1)
        with pytest.raises(ValueError):
            otimes(math.nan, 1)

    def test_scalar_power(self):
        assert scalar_power(3, 0) == 0
        assert scalar_power(3, 4) == 12
        assert scalar_power(EPS, 2) == EPS
        assert scalar_power(EPS, 0) == 0


@given(values, values, values)
def test_semiring_laws(x, y, z):
    assert oplus(oplus(x, y), z) == oplus(x, oplus(y, z))
    assert otimes(otimes(x, y), z) == otimes(x, otimes(y, z))
    assert oplus(x, y) == oplus(y, x)
    assert otimes(x, y) == otimes(y, x)
    assert otimes(x, oplus(y, z)) == oplus(otimes(x, y), otimes(x, z))
    assert oplus(x, x) == x
    assert oplus(x, EPS) == x
    assert otimes(x, 0) == x
    assert otimes(x, EPS) == EPS


class TestMatrix:
    def test_construction_checks(self):
        with pytest.raises(ValueError):
            MaxPlusMatrix([[1, math.inf]])
        with pytest.raises(ValueError):
            MaxPlusMatrix([1, 2])
        m = MaxPlusMatrix([[1, EPS], [EPS, 2]])
        assert m.shape == (2, 2)
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5

    def test_oplus_example(self):
        x = MaxPlusMatrix([[1, EPS], [EPS, 2]])
        y = MaxPlusMatrix([[0, 3], [EPS, EPS]])
        assert mat_oplus(x, y) == MaxPlusMatrix([[1, 3], [EPS, 2]])
        assert x | null(2) == x
        assert x | x == x

    def test_oplus_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mat_oplus(null(2), null(3))

    def test_otimes_identity_and_null(self):
        x = MaxPlusMatrix([[1, EPS, 3], [0, 2, EPS], [EPS, EPS, -1]])
        assert identity(3) @ x == x
        assert x @ identity(3) == x
        assert (null(3) @ x).is_null()

    def test_otimes_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mat_otimes(null(2, 3), null(2, 3))

    def test_otimes_matches_triple_loop(self):
        rng = random.Random(7)
        for _ in range(50):
            x = [[EPS if rng.random() < 0.3 else rng.uniform(-5, 5) for _ in range(4)] for _ in range(4)]
            y = [[EPS if rng.random() < 0.3 else rng.uniform(-5, 5) for _ in range(4)] for _ in range(4)]
            got = mat_otimes(MaxPlusMatrix(x), MaxPlusMatrix(y))
            # only additions and comparisons, so bitwise agreement is expected
            assert got.tolist() == naive_matmul(x, y)

    def test_rectangular_product(self):
        x = MaxPlusMatrix([[0, 1, EPS]])
        y = MaxPlusMatrix([[2], [2], [7]])
        assert mat_otimes(x, y) == MaxPlusMatrix([[3]])

    def test_power_basics(self):
        x = MaxPlusMatrix([[1, 2], [EPS, 0]])
        assert mat_power(x, 0) == identity(2)
        assert mat_power(x, 1) == x
        assert x**3 == x @ x @ x
        with pytest.raises(ValueError):
            mat_power(null(2, 3), 2)

    def test_power_by_squaring_matches_repeated_product(self):
        rng = np.random.default_rng(3)
        a = rng.integers(-5, 6, size=(4, 4)).astype(float)
        a[rng.random((4, 4)) < 0.3] = EPS
        x = MaxPlusMatrix(a)
        acc = identity(4)
        for q in range(1, 12):
            acc = acc @ x
            assert mat_power(x, q) == acc

    def test_fig1_adjacency_nilpotent(self):
        g = np.full((5, 5), EPS)
        for i, j in [(1, 3), (1, 4), (2, 4), (3, 5), (4, 5)]:
            g[i - 1, j - 1] = 0
        g = MaxPlusMatrix(g)
        assert not mat_power(g, 2).is_null()
        assert mat_power(g, 3).is_null()

    def test_norm(self):
        assert norm(null(3)) == EPS
        assert norm(MaxPlusMatrix([[1, 4], [EPS, 2]])) == 4

    def test_diag(self):
        assert diag([0, 0, 0]) == identity(3)
        d = diag([2, -1, 5])
        assert norm(d) == 5
        assert d <= MaxPlusMatrix(np.where(identity(3).entries == 0, 5.0, EPS))

    def test_diag_product(self):
        a, b = [1.5, -2.0, 3.0], [0.25, 4.0, EPS]
        prod = diag(a) @ diag(b)
        assert prod.tolist() == naive_matmul(diag(a).tolist(), diag(b).tolist())
        assert prod == diag([1.75, 2.0, EPS])

    def test_transpose_and_repr(self):
        x = MaxPlusMatrix([[1, EPS]])
        assert x.T.shape == (2, 1)
        assert "ε" in repr(x)

    def test_scale_requires_positive(self):
        with pytest.raises(ValueError):
            scale(identity(2), 0)
        assert scale(diag([1, EPS]), 2) == diag([2, EPS])


@given(square, st.integers(0, 5))
def test_idempotent_power_expansion(x, q):
    n = x.rows
    lhs = mat_power(identity(n) | x, q)
    rhs = identity(n)
    for i in range(1, q + 1):
        rhs = rhs | mat_power(x, i)
    assert lhs == rhs


@given(same_shape_pair)
def test_norm_of_sum(pair):
    x, y = pair
    assert norm(x | y) == oplus(norm(x), norm(y))


@given(chain_pair)
def test_norm_of_product(pair):
    x, y = pair
    assert norm(x @ y) <= otimes(norm(x), norm(y))


@given(square, finite)
def test_norm_commutes_with_otimes_scalar(x, c):
    cx = MaxPlusMatrix(np.where(x.entries == EPS, EPS, x.entries + c))
    assert norm(cx) == otimes(c, norm(x))


@given(square, st.integers(1, 9).map(float))
def test_conventional_scaling(x, c):
    assert norm(scale(x, c)) == (EPS if norm(x) == EPS else c * norm(x))


@given(square)
def test_bounded_by_norm_times_pattern(x):
    g = standard_pattern(x)
    bound = MaxPlusMatrix(np.where(g.entries == EPS, EPS, g.entries + norm(x)))
    assert x <= bound


@settings(max_examples=50)
@given(same_shape_pair)
def test_null_is_oplus_neutral(pair):
    x, _ = pair
    assert x | null(*x.shape) == x
