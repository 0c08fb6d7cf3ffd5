import pytest

from tools.artri.complexes import homology_dims, is_module_complex, is_null_homotopic, lift_map, signature
from tools.artri.errors import InfiniteGlobalDimensionError, PreconditionError
from tools.artri.linalg import Matrix
from tools.artri.path_algebra import Arrow, Quiver, build_algebra, relation
from tools.artri.quiver_rep import (Representation, ar_translate_mod, global_dimension, hom_rep,
                                    is_isomorphic_rep, min_proj_resolution, projective_cover,
                                    projective_dimension, resolve, standard_module, top_and_radical)


def test_standard_modules_a3(a3):
    assert standard_module(a3, "P", "1").dim_vector() == (1, 0, 0)
    assert standard_module(a3, "projective", "3").dim_vector() == (1, 1, 1)
    assert standard_module(a3, "S", "2").dim_vector() == (0, 1, 0)
    assert standard_module(a3, "I", "2").dim_vector() == (0, 1, 1)
    with pytest.raises(PreconditionError):
        standard_module(a3, "S", "9")


def test_injective_hull_of_sink_is_projective(a3):
    assert is_isomorphic_rep(standard_module(a3, "I", "1"), standard_module(a3, "P", "3"))
    assert not is_isomorphic_rep(standard_module(a3, "I", "2"), standard_module(a3, "P", "2"))


def test_relations_are_checked(gamma):
    assert standard_module(gamma, "P", "5").check_relations()
    assert standard_module(gamma, "I", "1").check_relations()
    one = Matrix.identity(gamma.field, 1)
    bad = Representation(gamma, {v: 1 for v in gamma.vertices}, {a.name: one for a in gamma.quiver.arrows})
    assert not bad.check_relations()


def test_hom_rep_dimensions(a3):
    p1, p3 = standard_module(a3, "P", "1"), standard_module(a3, "P", "3")
    assert len(hom_rep(p1, p3)) == 1
    assert hom_rep(p3, p1) == []
    assert all(f.is_morphism() for f in hom_rep(p3, p3))


def test_resolution_of_simple_a3(a3):
    res = resolve(standard_module(a3, "S", "2"))
    assert res.length == 1
    assert signature(res.complex) == "(P1-P2)[0]"
    assert homology_dims(res.complex) == {0: {"2": 1}}
    assert is_module_complex(res.complex)


def test_projective_resolves_to_stalk(a3):
    assert signature(min_proj_resolution(standard_module(a3, "P", "2"))) == "P2[0]"
    assert projective_dimension(standard_module(a3, "P", "2")) == 0


def test_gamma_resolutions(gamma):
    assert signature(min_proj_resolution(standard_module(gamma, "S", "5"))) == "(P1-P4-P5)[0]"
    assert projective_dimension(standard_module(gamma, "S", "4")) == 1
    assert global_dimension(gamma) == 2


def test_global_dimension_a3(a3):
    assert global_dimension(a3) == 1


def test_infinite_global_dimension():
    q = Quiver(["1"], [Arrow("x", "1", "1")])
    alg = build_algebra(q, [relation(q, (1, ["x", "x"]))])
    with pytest.raises(InfiniteGlobalDimensionError):
        global_dimension(alg, max_len=4)


def test_projective_cover_of_zero_raises(a3):
    with pytest.raises(PreconditionError):
        projective_cover(Representation(a3, {}, {}))


def test_ar_translate_a3(a3):
    s1, s2 = standard_module(a3, "S", "1"), standard_module(a3, "S", "2")
    assert ar_translate_mod(s1, "tau-inv").dim_vector() == (0, 1, 0)
    assert ar_translate_mod(s2, "tau_inv").dim_vector() == (0, 0, 1)
    back = ar_translate_mod(ar_translate_mod(s2, "tau-inv"), "tau")
    assert is_isomorphic_rep(back, s2)
    with pytest.raises(PreconditionError):
        ar_translate_mod(s1, "tau")
    with pytest.raises(PreconditionError):
        ar_translate_mod(standard_module(a3, "S", "3"), "tau-inv")


def test_ar_translate_gamma(gamma):
    t = ar_translate_mod(standard_module(gamma, "P", "1"), "tau-inv")
    assert t.check_relations()
    assert signature(min_proj_resolution(t)) == "(P1-P2)[0]"
    assert signature(min_proj_resolution(ar_translate_mod(standard_module(gamma, "P", "3"), "tau-inv"))) \
        == "(P1-P4)[0]"


def test_top_and_radical(a3):
    top, rad, incl = top_and_radical(standard_module(a3, "P", "3"))
    assert top == {"1": 0, "2": 0, "3": 1}
    assert rad.dim_vector() == (1, 1, 0)
    assert incl.is_morphism()
    top, rad, _ = top_and_radical(standard_module(a3, "S", "2"))
    assert top == {"1": 0, "2": 1, "3": 0}
    assert rad.is_zero()


def test_lift_socle_inclusion(a3):
    s2, i2 = standard_module(a3, "S", "2"), standard_module(a3, "I", "2")
    (f,) = hom_rep(s2, i2)
    g = lift_map(f, resolve(s2), resolve(i2))
    assert signature(g.source) == "(P1-P2)[0]"
    assert signature(g.target) == "(P1-P3)[0]"
    assert g.is_chain_map()
    assert not is_null_homotopic(g)
