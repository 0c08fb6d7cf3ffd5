import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chain_map, pm, two_term
from tools.artri.complexes import (ProjComplex, compose, cone, direct_sum, dual, find_isomorphism, hom_K,
                                   homology_dims, homotopic, identity, invert_projmap, is_isomorphic,
                                   is_null_homotopic, is_split_epi_K, is_split_mono_K, minimize, shift,
                                   shift_map, signature, stalk, standard_triangle, unit_inverse, zero_complex)
from tools.artri.errors import DimensionMismatchError, PreconditionError
from tools.artri.path_algebra import Arrow, ProjMap, Quiver, build_algebra, relation


def test_signatures(a3):
    x = two_term(a3, ["1"], ["2"], "[a]")
    assert signature(x) == "(P1-P2)[0]"
    assert signature(stalk(a3, ["1"], 0)) == "P1[0]"
    assert signature(stalk(a3, ["1"], 1)) == "P1[-1]"
    assert signature(stalk(a3, ["2", "1"], 0)) == "(P1+P2)[0]"
    assert signature(zero_complex(a3)) == "0"
    assert signature(two_term(a3, ["1"], ["3"], "[b a]", degree=0)) == "(P1-P3)[-1]"


def test_signature_needs_minimal(a3):
    x = two_term(a3, ["1"], ["1"], "[e(1)]")
    with pytest.raises(PreconditionError):
        signature(x)


def test_shift(a3):
    x = two_term(a3, ["1"], ["2"], "[a]")
    assert signature(shift(x, 1)) == "(P1-P2)[1]"
    assert shift(x, 1).d(-2) == pm(a3, ["1"], ["2"], "[-a]")
    assert shift(shift(x, 3), -3) == x
    assert shift(x, 2).d(-3) == x.d(-1)


def test_differentials_must_match_cells(a3):
    with pytest.raises(DimensionMismatchError):
        ProjComplex(a3, {-1: ["1"], 0: ["3"]}, {-1: pm(a3, ["1"], ["2"], "[a]")})


def test_check_detects_nonzero_square(a3):
    bad = ProjComplex(a3, {-1: ["1"], 0: ["2"], 1: ["3"]},
                      {-1: pm(a3, ["1"], ["2"], "[a]"), 0: pm(a3, ["2"], ["3"], "[b]")})
    assert not bad.check()
    assert two_term(a3, ["1"], ["2"], "[a]").check()


def test_cone_of_projective_map(a3, a3_stalks):
    f = chain_map(a3_stalks["1"], a3_stalks["2"], {0: "[a]"})
    assert f.is_chain_map()
    c, t_f, p_f = cone(f)
    assert c.check()
    assert signature(c) == "(P1-P2)[0]"
    assert t_f.is_chain_map()
    assert p_f.is_chain_map()
    assert compose(p_f, t_f).is_zero()
    t = standard_triangle(f)
    assert (t.X, t.Y, t.u) == (f.source, f.target, f)
    assert signature(t.Z) == "(P1-P2)[0]"
    assert compose(t.w, t.v).is_zero()


def test_minimize_contractible(a3, a3_stalks):
    c = cone(identity(a3_stalks["1"]))[0]
    m = minimize(c)
    assert m.complex.is_zero()
    assert signature(m.complex) == "0"
    assert m.steps == 1
    assert m.homotopy.witnesses(identity(c), compose(m.psi, m.phi))


def test_minimize_keeps_a_minimal_complex(a3):
    x = two_term(a3, ["1"], ["3"], "[b a]")
    m = minimize(x)
    assert m.complex == x
    assert m.steps == 0


def test_minimize_cancels_a_unit_block(gamma):
    x = ProjComplex(gamma, {-1: ["1", "4"], 0: ["4"]}, {-1: pm(gamma, ["1", "4"], ["4"], "[beta gamma delta, e(4)]")})
    assert x.check()
    m = minimize(x)
    assert signature(m.complex) == "P1[1]"
    assert compose(m.phi, m.psi) == identity(m.complex)
    assert m.homotopy.witnesses(identity(x), compose(m.psi, m.phi))


def test_hom_k_dimensions(a3, a3_stalks):
    s = a3_stalks
    assert hom_K(s["1"], s["2"]).dimension == 1
    assert hom_K(s["1"], s["3"]).dimension == 1
    assert hom_K(s["3"], s["1"]).dimension == 0
    assert hom_K(s["3"], s["3"]).dimension == 1
    assert hom_K(s["1"], stalk(a3, ["1"], -1)).dimension == 0
    res_s2 = two_term(a3, ["1"], ["2"], "[a]")
    assert hom_K(res_s2, s["2"]).dimension == 0
    assert hom_K(s["2"], res_s2).dimension == 1


def test_null_homotopic_map(a3, a3_stalks):
    res_s2 = two_term(a3, ["1"], ["2"], "[a]")
    f = chain_map(a3_stalks["1"], res_s2, {0: "[a]"})
    assert f.is_chain_map()
    assert is_null_homotopic(f)
    s = homotopic(f, f.scale(0))
    assert s is not None
    assert s.witnesses(f, f.scale(0))
    assert hom_K(a3_stalks["1"], res_s2).is_zero_class(f)


def test_shift_map_commutes_with_composition(a3, a3_stalks):
    f = chain_map(a3_stalks["1"], a3_stalks["2"], {0: "[a]"})
    g = chain_map(a3_stalks["2"], a3_stalks["3"], {0: "[b]"})
    assert shift_map(compose(g, f), 1) == compose(shift_map(g, 1), shift_map(f, 1))


def test_direct_sum(a3, a3_stalks):
    total, incs, projs = direct_sum([a3_stalks["1"], two_term(a3, ["1"], ["2"], "[a]")])
    assert total.rank() == 3
    assert total.check()
    for i, p in zip(incs, projs):
        assert compose(p, i) == identity(i.source)
    with pytest.raises(PreconditionError):
        direct_sum([])


def test_unit_inverse_in_loop_algebra():
    q = Quiver(["1"], [Arrow("x", "1", "1")])
    alg = build_algebra(q, [relation(q, (1, ["x", "x", "x"]))])
    u = alg.e("1") + alg.arrow("x")
    assert unit_inverse(u) * u == alg.e("1")
    assert u * unit_inverse(u) == alg.e("1")
    with pytest.raises(PreconditionError):
        unit_inverse(alg.arrow("x"))


def test_invert_projmap(a3):
    m = pm(a3, ["1", "2"], ["1", "2"], "[2*e(1), 0; a, e(2)]")
    inv = invert_projmap(m)
    assert inv is not None
    assert m @ inv == ProjMap.identity(a3, ["1", "2"])
    assert inv @ m == ProjMap.identity(a3, ["1", "2"])
    assert invert_projmap(pm(a3, ["1"], ["2"], "[a]")) is None


def test_homology_of_a_resolution(a3):
    res_s2 = two_term(a3, ["1"], ["2"], "[a]")
    assert homology_dims(res_s2) == {0: {"2": 1}}
    assert homology_dims(shift(res_s2, 1)) == {-1: {"2": 1}}


def test_dual_is_involutive(a3):
    x = two_term(a3, ["1"], ["2"], "[a]")
    d = dual(x)
    assert d.alg is a3.opposite()
    assert d.check()
    assert dual(d) == x


def test_isomorphism_up_to_scalars(a3):
    x = two_term(a3, ["1"], ["2"], "[a]")
    y = two_term(a3, ["1"], ["2"], "[2*a]")
    iso = find_isomorphism(x, y)
    assert iso is not None
    assert compose(iso.backward, iso.forward).is_chain_map()
    assert not is_isomorphic(x, two_term(a3, ["1"], ["3"], "[b a]"))


def test_split_checks(a3, a3_stalks):
    f = chain_map(a3_stalks["1"], a3_stalks["2"], {0: "[a]"})
    assert not is_split_mono_K(f)
    assert not is_split_epi_K(f)
    assert is_split_mono_K(identity(a3_stalks["2"]))
    _, incs, projs = direct_sum([a3_stalks["1"], a3_stalks["2"]])
    assert is_split_mono_K(incs[1])
    assert is_split_epi_K(projs[0])


_A3_COMPLEXES = [
    ("stalk", "1"), ("stalk", "2"), ("stalk", "3"),
    ("two", ["1"], ["2"], "[a]"), ("two", ["2"], ["3"], "[b]"), ("two", ["1"], ["3"], "[b a]"),
]


def _build(alg, spec):
    if spec[0] == "stalk":
        return stalk(alg, [spec[1]], 0)
    return two_term(alg, spec[1], spec[2], spec[3])


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_cones_of_random_maps(a3, data):
    x = _build(a3, data.draw(st.sampled_from(_A3_COMPLEXES)))
    y = _build(a3, data.draw(st.sampled_from(_A3_COMPLEXES)))
    if x == y and data.draw(st.booleans()):
        f = identity(x)
    else:
        h = hom_K(x, y)
        f = h.combination([data.draw(st.integers(-2, 2)) for _ in h.basis])
    c, t_f, p_f = cone(f)
    assert c.check()
    assert t_f.is_chain_map() and p_f.is_chain_map()
    m = minimize(c)
    assert m.complex.is_minimal()
    assert m.complex.check()
    assert compose(m.phi, m.psi) == identity(m.complex)
    assert m.homotopy.witnesses(identity(c), compose(m.psi, m.phi))
