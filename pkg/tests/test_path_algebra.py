import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import linear_algebra, monomial_relations, path_survives, pm
from tools.artri.errors import InadmissibleRelationError, NotFiniteDimensionalError, PreconditionError
from tools.artri.linalg import Field, Matrix
from tools.artri.path_algebra import (AlgebraElement, Arrow, Path, ProjMap, Quiver, Relation, build_algebra,
                                      factor_through, relation)

Q = Field.rationals()


def test_a3_basis(a3):
    assert a3.dimension == 6
    assert a3.nilpotency == 3
    assert {p.label() for p in a3.basis} == {"e1", "e2", "e3", "a", "b", "b a"}


def test_gamma_dimension(gamma):
    assert gamma.dimension == 14
    assert gamma.path("alpha", "beta", "gamma", "delta").is_zero()
    assert not gamma.path("alpha", "beta", "gamma").is_zero()
    assert not gamma.path("beta", "gamma", "delta").is_zero()


def test_multiplication_is_left_to_right(a3):
    assert a3.arrow("b") * a3.arrow("a") == a3.path("b", "a")
    assert (a3.arrow("a") * a3.arrow("b")).is_zero()
    assert a3.e("2") * a3.arrow("a") == a3.arrow("a")
    assert a3.arrow("a") * a3.e("1") == a3.arrow("a")
    assert (a3.e("1") * a3.arrow("a")).is_zero()


def test_commutativity_relation():
    q = Quiver(["1", "2", "3", "4"], [Arrow("a", "1", "2"), Arrow("b", "2", "4"),
                                      Arrow("c", "1", "3"), Arrow("d", "3", "4")])
    alg = build_algebra(q, [relation(q, (1, ["a", "b"]), (-1, ["c", "d"]))])
    assert alg.dimension == 9
    assert alg.path("a", "b") == alg.path("c", "d")
    assert not alg.path("a", "b").is_zero()


def test_loop_needs_a_relation():
    q = Quiver(["1"], [Arrow("x", "1", "1")])
    with pytest.raises(NotFiniteDimensionalError):
        build_algebra(q, [], max_len=4)
    alg = build_algebra(q, [relation(q, (1, ["x", "x"]))])
    assert alg.dimension == 2
    assert not q.is_acyclic()


def test_inadmissible_relations():
    q = Quiver(["1", "2", "3"], [Arrow("a", "3", "2"), Arrow("b", "2", "1"), Arrow("c", "3", "1")])
    with pytest.raises(InadmissibleRelationError):
        relation(q, (1, ["a", "b"]), (-1, ["c"]))
    with pytest.raises(InadmissibleRelationError):
        Relation(()).validate()
    q2 = Quiver(["1", "2", "3", "4"], [Arrow("a", "4", "3"), Arrow("b", "3", "2"), Arrow("c", "3", "1")])
    with pytest.raises(InadmissibleRelationError):
        relation(q2, (1, ["a", "b"]), (1, ["a", "c"]))


def test_quiver_validation():
    with pytest.raises(PreconditionError):
        Quiver(["1", "2"], [Arrow("e", "1", "2")])
    with pytest.raises(PreconditionError):
        Quiver(["1", "2"], [Arrow("a", "1", "2"), Arrow("a", "2", "1")])
    with pytest.raises(PreconditionError):
        Quiver(["1", "1"], [])
    with pytest.raises(PreconditionError):
        Quiver(["1"], [Arrow("a", "1", "9")])
    q = Quiver(["1", "2"], [Arrow("a", "2", "1")])
    with pytest.raises(PreconditionError):
        Path.of(q, ["a", "a"])


def test_blocks(a3):
    assert len(a3.hom_proj("1", "3")) == 1
    assert a3.hom_proj("3", "1") == []
    assert a3.in_block(a3.path("b", "a"), "3", "1")
    assert not a3.in_block(a3.arrow("b"), "2", "1")
    assert a3.is_arrow_class(a3.arrow("a"))
    assert not a3.is_arrow_class(a3.path("b", "a"))


def test_projmap_composition(a3):
    f = pm(a3, ["1"], ["2"], "[a]")
    g = pm(a3, ["2"], ["3"], "[b]")
    assert g @ f == pm(a3, ["1"], ["3"], "[b a]")
    assert (ProjMap.identity(a3, ["2"]) @ f) == f
    assert f.is_radical()
    assert not ProjMap.identity(a3, ["1", "2"]).is_radical()


def test_projmap_validate_rejects_foreign_entries(a3):
    bad = ProjMap(a3, ["1"], ["2"], [[a3.arrow("b")]])
    with pytest.raises(PreconditionError):
        bad.validate()


def test_at_vertex(a3):
    f = pm(a3, ["1"], ["2"], "[a]")
    assert f.at_vertex("1") == Matrix.from_rows(Q, [[1]])
    assert f.at_vertex("2").shape == (1, 0)
    assert f.scalar_matrix() == Matrix.from_rows(Q, [[0]])


def test_factor_through(a3):
    g = pm(a3, ["2"], ["3"], "[b]")
    h = pm(a3, ["1"], ["3"], "[b a]")
    x = factor_through(g, h)
    assert x is not None
    assert g @ x == h
    assert factor_through(pm(a3, ["1"], ["3"], "[b a]"), pm(a3, ["2"], ["3"], "[b]")) is None


def test_opposite(a3):
    op = a3.opposite()
    assert op.dimension == 6
    assert op.opposite() is a3
    assert a3.to_opposite(a3.path("b", "a")) == op.path("a", "b")


def test_fingerprint_depends_on_field(a3):
    other = build_algebra(a3.quiver, [], field=Field.gf(5))
    assert other.fingerprint() != a3.fingerprint()
    assert a3.fingerprint() == build_algebra(a3.quiver, []).fingerprint()


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_associativity(gamma, data):
    def draw():
        coeffs = data.draw(st.lists(st.integers(-2, 2), min_size=gamma.dimension, max_size=gamma.dimension))
        return AlgebraElement(gamma, [gamma.field(c) for c in coeffs])
    x, y, z = draw(), draw(), draw()
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


def _expected_linear_dimension(n, rels):
    """Trivial paths plus every path j -> i avoiding the relation segments."""
    return n + sum(path_survives(rels, j, i) for j in range(2, n + 1) for i in range(1, j))


@settings(max_examples=40, deadline=None)
@given(monomial_relations())
def test_monomial_linear_dimension(case):
    n, rels = case
    alg = linear_algebra(n, rels)
    assert alg.dimension == _expected_linear_dimension(n, rels)


def test_multiply_matches_operator(gamma):
    x = gamma.arrow("alpha") + gamma.arrow("beta")
    y = gamma.arrow("beta") + gamma.arrow("gamma")
    assert gamma.multiply(x, y) == x * y
    assert gamma.multiply(gamma.e("1"), gamma.e("2")).is_zero()


def test_radical_layers_a3(a3):
    assert len(a3.radical_layer(0)) == 6
    assert {a3.basis[i].label() for i in a3.radical_layer(1)} == {"a", "b", "b a"}
    assert [a3.basis[i].label() for i in a3.radical_layer(2)] == ["b a"]
    assert a3.radical_layer(3) == ()
