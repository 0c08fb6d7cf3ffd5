from pathlib import Path

import pytest
from hypothesis import strategies as st

from tools.artri.complexes import ChainMap, ProjComplex, compose, direct_sum, invert_projmap, stalk
from tools.artri.path_algebra import Arrow, ProjMap, Quiver, build_algebra, relation
from tools.artri.problem_file import load_problem, parse_problem, parse_projmap

FIXTURES = Path(__file__).resolve().parents[1] / "data" / "fixtures"


def a3_algebra():
    q = Quiver(["1", "2", "3"], [Arrow("a", "2", "1"), Arrow("b", "3", "2")])
    return build_algebra(q, [])


def gamma_algebra():
    q = Quiver(["1", "2", "3", "4", "5"], [Arrow("alpha", "5", "4"), Arrow("beta", "4", "3"),
                                            Arrow("gamma", "3", "2"), Arrow("delta", "2", "1")])
    return build_algebra(q, [relation(q, (1, ["alpha", "beta", "gamma", "delta"]))])


def linear_algebra(n, rels=()):
    """A_n with arrows a_i: i+1 -> i and monomial relations given as (top vertex, length)."""
    q = Quiver([str(i) for i in range(1, n + 1)], [Arrow(f"a{i}", str(i + 1), str(i)) for i in range(1, n)])
    return build_algebra(q, [relation(q, (1, [f"a{t - 1 - k}" for k in range(length)])) for t, length in rels])


@st.composite
def monomial_relations(draw, max_n=6):
    """(n, rels) for linear_algebra: n <= max_n and up to three relations of length >= 2."""
    n = draw(st.integers(2, max_n))
    rels = []
    if n >= 3:
        for t in draw(st.lists(st.integers(3, n), max_size=3)):
            rels.append((t, draw(st.integers(2, t - 1))))
    return n, rels


def path_down(j, i):
    """Arrow names of the path j -> i in linear_algebra, in traversal order."""
    return " ".join(f"a{k}" for k in range(j - 1, i - 1, -1))


def path_survives(rels, j, i):
    return not any(t <= j and t - m >= i for t, m in rels)


@st.composite
def base_changes(draw, x):
    """(x2, phi, phi_inv): x with shuffled cells and a random unitriangular change of basis in each degree."""
    alg = x.alg
    cells2, phi, phi_inv = {}, {}, {}
    for n, cells in x.cells.items():
        order = draw(st.permutations(range(len(cells))))
        target = [cells[k] for k in order]
        perm = ProjMap.from_terms(alg, cells, target, {(r, k): alg.e(cells[k]) for r, k in enumerate(order)})
        terms = {}
        for r, t in enumerate(target):
            terms[(r, r)] = draw(st.sampled_from([1, 2, -1])) * alg.e(t)
            for s in range(r):
                for i in alg.block(t, target[s]):
                    terms[(r, s)] = terms.get((r, s), alg.zero()) + draw(st.integers(-2, 2)) * alg.basis_element(i)
        phi[n] = ProjMap.from_terms(alg, target, target, terms) @ perm
        phi_inv[n] = invert_projmap(phi[n])
        cells2[n] = target
    diffs = {n: phi[n + 1] @ d @ phi_inv[n] for n, d in x.diffs.items()}
    x2 = ProjComplex(alg, cells2, diffs)
    return x2, ChainMap(x, x2, phi), ChainMap(x2, x, phi_inv)


@st.composite
def conjugates(draw, f):
    """f transported along random base changes of its source and target."""
    _, _, a_inv = draw(base_changes(f.source))
    _, b, _ = draw(base_changes(f.target))
    return compose(compose(b, f), a_inv)


def sum_map(fs):
    """Block diagonal f_1 ⊕ ... ⊕ f_k."""
    _, _, projs = direct_sum([f.source for f in fs])
    _, incs, _ = direct_sum([f.target for f in fs])
    total = None
    for f, p, i in zip(fs, projs, incs):
        term = compose(i, compose(f, p))
        total = term if total is None else total + term
    return total


def pm(alg, source, target, text):
    """ProjMap from matrix text, e.g. pm(alg, ["1"], ["2"], "[a]")."""
    return parse_projmap(alg, list(source), list(target), text)


def two_term(alg, source, target, text, degree=-1):
    d = pm(alg, source, target, text)
    return ProjComplex(alg, {degree: d.source, degree + 1: d.target}, {degree: d})


def chain_map(x, y, comps):
    """comps: {degree: matrix text}."""
    return ChainMap(x, y, {n: pm(x.alg, x.cell(n), y.cell(n), t) for n, t in comps.items()})


@pytest.fixture(scope="session")
def a3():
    return a3_algebra()


@pytest.fixture(scope="session")
def gamma():
    return gamma_algebra()


@pytest.fixture(scope="session")
def a3_stalks(a3):
    return {v: stalk(a3, [v], 0) for v in a3.vertices}


@pytest.fixture(scope="session")
def a3_problem():
    return load_problem(FIXTURES / "a3.artri")


@pytest.fixture(scope="session")
def gamma_problem():
    return load_problem(FIXTURES / "gamma_a5.artri")


@pytest.fixture(scope="session")
def example2_problem():
    return load_problem(FIXTURES / "example2.artri")


@pytest.fixture
def problem():
    """parse_problem bound to an already built algebra."""
    def _parse(alg, text):
        return parse_problem(text, algebra=alg)
    return _parse
