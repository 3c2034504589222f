from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bannai_ito.linalg import SparseRatMatrix, bracket, format_rational, kron, parse_rational

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def square(n):
    return st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=n, max_size=n).map(
        SparseRatMatrix.from_dense)


def dense_kron(a, b):
    A, B = a.to_dense(), b.to_dense()
    out = []
    for i in range(len(A)):
        for k in range(len(B)):
            out.append([A[i][j] * B[k][l] for j in range(len(A[0])) for l in range(len(B[0]))])
    return out


def dense_mul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def test_kron_identities():
    assert kron(SparseRatMatrix.identity(2), SparseRatMatrix.identity(3)) == SparseRatMatrix.identity(6)


def test_kron_parity_square():
    p = SparseRatMatrix.diag([1, -1])
    assert kron(p, p) == SparseRatMatrix.diag([1, -1, -1, 1])


@given(square(2), square(2))
def test_kron_matches_dense_definition(a, b):
    assert kron(a, b).to_dense() == dense_kron(a, b)


def test_kron_rectangular_shape():
    a = SparseRatMatrix.from_dense([[1, 2, 3]])
    b = SparseRatMatrix.from_dense([[1], [Fraction(1, 2)]])
    assert kron(a, b).shape == (2, 3)
    assert kron(a, b).to_dense() == dense_kron(a, b)


@given(square(3))
def test_self_commutator_vanishes(a):
    assert bracket("commutator", a, a).is_zero()


@given(square(3))
def test_anticommutator_with_identity(a):
    assert bracket("anticommutator", SparseRatMatrix.identity(3), a) == a * 2


def test_unit_commutator():
    e12 = SparseRatMatrix(2, 2, {0: {1: 1}})
    e21 = SparseRatMatrix(2, 2, {1: {0: 1}})
    assert bracket("commutator", e12, e21) == SparseRatMatrix.diag([1, -1])


def test_bracket_dimension_mismatch():
    with pytest.raises(ValueError):
        bracket("commutator", SparseRatMatrix.identity(2), SparseRatMatrix.identity(3))
    with pytest.raises(ValueError):
        bracket("lie", SparseRatMatrix.identity(2), SparseRatMatrix.identity(2))


@settings(max_examples=30)
@given(square(3), square(3), square(3))
def test_jacobi_identity(a, b, c):
    def com(x, y):
        return bracket("commutator", x, y)

    total = com(a, com(b, c)) + com(b, com(c, a)) + com(c, com(a, b))
    assert total.is_zero()


@given(square(3), square(3))
def test_matmul_matches_dense(a, b):
    assert (a @ b).to_dense() == dense_mul(a.to_dense(), b.to_dense())


@given(square(3), square(3))
def test_exact_add_sub_round_trip(a, b):
    assert (a + b) - b == a


@given(square(3), square(3))
def test_no_stored_zeros(a, b):
    for m in (a + b, a - a, a @ b, kron(a, b), a * 0):
        assert all(v != 0 for _, _, v in m.items())


def test_zero_entries_dropped_on_construction():
    m = SparseRatMatrix(2, 2, {0: {0: 0, 1: Fraction(1, 3)}, 1: {1: 0}})
    assert m.nnz == 1
    assert m == SparseRatMatrix(2, 2, {0: {1: Fraction(2, 6)}})


def test_rational_format_and_parse():
    assert format_rational(Fraction(3, 1)) == "3"
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert parse_rational("4/6") == Fraction(2, 3)
    assert parse_rational("-2") == -2
    x = parse_rational(Fraction(6, -4))
    assert x.denominator > 0 and x == Fraction(-3, 2)
    with pytest.raises(TypeError):
        parse_rational(0.5)
    with pytest.raises(ValueError):
        parse_rational("0.5")


def test_json_round_trip_and_layout():
    m = SparseRatMatrix(2, 3, {1: {2: Fraction(-1, 2)}, 0: {1: 3}})
    obj = m.to_json_obj()
    assert obj == {"rows": 2, "cols": 3, "entries": [[0, 1, "3"], [1, 2, "-1/2"]]}
    assert SparseRatMatrix.from_json(m.to_json()) == m


def test_submatrix_and_transpose():
    m = SparseRatMatrix.from_dense([[1, 2, 0], [0, 3, 4], [5, 0, 6]])
    assert m.submatrix([0, 2], [0, 2]).to_dense() == [[1, 0], [5, 6]]
    assert m.T.to_dense() == [[1, 0, 5], [2, 3, 0], [0, 4, 6]]
