import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tools.artri.errors import DimensionMismatchError, FieldMismatchError
from tools.artri.linalg import Field, Matrix, in_span, is_invertible, kernel, rank, rref, solve, span_rank

Q = Field.rationals()
F5 = Field.gf(5)


@st.composite
def matrices(draw, field, max_dim=4):
    n = draw(st.integers(1, max_dim))
    m = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(st.integers(-3, 3), min_size=m, max_size=m), min_size=n, max_size=n))
    return Matrix.from_rows(field, rows)


def test_rank_kernel_small():
    m = Matrix.from_rows(Q, [[1, 2], [2, 4]])
    assert rank(m) == 1
    k = kernel(m)
    assert k == Matrix.from_rows(Q, [[-2], [1]])
    assert (m @ k).is_zero()


def test_kernel_of_identity_is_empty():
    k = kernel(Matrix.identity(Q, 3))
    assert k.shape == (3, 0)


def test_solve_consistent_and_inconsistent():
    m = Matrix.from_rows(Q, [[1, 2], [2, 4]])
    x = solve(m, Matrix.from_rows(Q, [[1], [2]]))
    assert x is not None
    assert m @ x == Matrix.from_rows(Q, [[1], [2]])
    assert solve(m, Matrix.from_rows(Q, [[1], [3]])) is None


def test_inverse():
    m = Matrix.from_rows(Q, [[2, 1], [1, 1]])
    assert m.inverse() == Matrix.from_rows(Q, [[1, -1], [-1, 2]])
    assert Matrix.from_rows(Q, [[1, 2], [2, 4]]).inverse() is None
    assert Matrix.from_rows(Q, [[1, 2]]).inverse() is None


def test_rref_pivots():
    red, pivots, r = rref(Matrix.from_rows(Q, [[0, 2, 4], [1, 1, 1]]))
    assert pivots == [0, 1]
    assert r == 2
    assert red == Matrix.from_rows(Q, [[1, 0, -1], [0, 1, 2]])


def test_prime_field_arithmetic():
    assert F5(3) * F5(2) == 1
    assert Field.gf(7)("1/2") == 4
    assert F5.one / F5(2) == 3
    assert F5(7) == F5(2)
    assert Matrix.from_rows(F5, [[2, 0], [0, 3]]).inverse() == Matrix.from_rows(F5, [[3, 0], [0, 2]])


def test_field_parse():
    assert Field.parse("rational").name == "rational"
    assert Field.parse("prime:5") == F5
    assert Field.parse("GF(7)").prime == 7
    with pytest.raises(ValueError):
        Field.parse("reals")
    with pytest.raises(ValueError):
        Field.gf(4)


def test_format():
    assert Q.format(Q("-1/2")) == "-1/2"
    assert Q.format(Q(3)) == "3"
    assert Q.format(-2) == "-2"
    assert F5.format(F5(-1)) == "4"


def test_mixing_fields_raises():
    with pytest.raises(FieldMismatchError):
        F5(Field.gf(7)(1))
    with pytest.raises(FieldMismatchError):
        F5(Q("1/2"))
    with pytest.raises(FieldMismatchError):
        Matrix.from_rows(Q, [[1]]) + Matrix.from_rows(F5, [[1]])
    with pytest.raises(FieldMismatchError):
        Q(F5(1))


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionMismatchError):
        Matrix.from_rows(Q, [[1, 2]]) @ Matrix.from_rows(Q, [[1, 2]])
    with pytest.raises(DimensionMismatchError):
        solve(Matrix.identity(Q, 2), Matrix.from_rows(Q, [[1]]))
    with pytest.raises(DimensionMismatchError):
        Matrix(Q, [[1, 2], [3]])


def test_span_helpers():
    vs = [[Q(1), Q(0), Q(1)], [Q(0), Q(1), Q(1)]]
    assert span_rank(Q, vs, 3) == 2
    assert in_span(Q, vs, [Q(2), Q(3), Q(5)])
    assert not in_span(Q, vs, [Q(0), Q(0), Q(1)])
    assert in_span(Q, [], [Q(0), Q(0)])
    assert is_invertible(Matrix.identity(F5, 2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([Q, F5]).flatmap(matrices))
def test_rank_nullity(m):
    k = kernel(m)
    assert rank(m) + k.ncols == m.ncols
    assert (m @ k).is_zero()
    assert rank(k) == k.ncols


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([Q, F5]).flatmap(matrices))
def test_rref_idempotent(m):
    red = rref(m)[0]
    assert rref(red)[0] == red


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_solve_finds_preimage(data):
    field = data.draw(st.sampled_from([Q, F5]))
    m = data.draw(matrices(field))
    x = Matrix.from_rows(field, [[data.draw(st.integers(-3, 3))] for _ in range(m.ncols)])
    b = m @ x
    sol = solve(m, b)
    assert sol is not None
    assert m @ sol == b
