import pytest

from conftest import FIXTURES
from tools.artri import config
from tools.artri.complexes import signature
from tools.artri.errors import ProblemFileError, UnknownNameError
from tools.artri.linalg import Field
from tools.artri.problem_file import (dump_problem, format_element, load_problem, parse_element, parse_problem,
                                      roundtrip, serialize_complex)

A3_HEAD = "\n".join(["[quiver]", "vertices 1 2 3", "a: 2 -> 1", "b: 3 -> 2", ""])


def test_gamma_fixture(gamma_problem):
    pf = gamma_problem
    assert pf.name == "gamma_a5"
    assert not pf.experimental
    assert pf.algebra.dimension == 14
    assert list(pf.complexes) == ["R2", "R3", "R4", "P4", "P5", "RS5"]
    assert pf.map_ends["u23"] == ("R2", "R3")
    assert pf.tasks[0].argv == ["info"]
    assert len(pf.tasks) == 9
    assert str(pf.tasks[-1]) == "knit --slice R2 R3 R4 P4 P5 --fwd 1 --bwd 1"
    assert signature(pf.complex("RS5")) == "(P1-P4-P5)[0]"


def test_modules_section(gamma_problem):
    assert gamma_problem.modules["T1"].dim_vector() == (0, 1, 0, 0, 0)
    assert gamma_problem.module("tau-inv P2").dim_vector() == gamma_problem.modules["T2"].dim_vector()
    assert gamma_problem.module("S5").dim_vector() == (0, 0, 0, 0, 1)
    with pytest.raises(KeyError):
        gamma_problem.module("Q7")


def test_unknown_names(gamma_problem):
    with pytest.raises(UnknownNameError, match="unknown complex"):
        gamma_problem.complex("nope")
    with pytest.raises(KeyError):
        gamma_problem.map("nope")


def test_experimental_flag(example2_problem, a3_problem):
    assert example2_problem.experimental
    assert a3_problem.name == "a3"
    assert a3_problem.map_ends["f13"] == ("P1", "P3")


def test_inadmissible_relation_position():
    text = A3_HEAD + "[relations]\nb a - 2*a\n"
    with pytest.raises(ProblemFileError) as exc:
        parse_problem(text)
    assert exc.value.line == 6
    assert exc.value.column == 7
    assert "inadmissible relation" in str(exc.value)


@pytest.mark.parametrize("text, needle", [
    ("[maps]\n[complexes]\n", "repeated or out of order"),
    ("[quiver]\nvertices 1\n[quiver]\n", "repeated or out of order"),
    ("[bogus]\n", "unknown section"),
    ("hello\n[meta]\n", "content before the first section header"),
])
def test_section_errors(text, needle):
    with pytest.raises(ProblemFileError, match=needle):
        parse_problem(text)


def test_missing_end(a3, problem):
    with pytest.raises(ProblemFileError, match="missing its 'end' line") as exc:
        problem(a3, "[complexes]\nX = complex\n  cell 0: 1\n")
    assert exc.value.line == 2


def test_entry_outside_its_block(a3, problem):
    text = "[complexes]\nX = complex\n  cell -1: 1\n  cell 0: 2\n  d -1: [b]\nend\n"
    with pytest.raises(ProblemFileError, match="not a combination of paths") as exc:
        problem(a3, text)
    assert exc.value.line == 5


def test_map_must_be_a_chain_map(a3, problem):
    text = ("[complexes]\nX = complex\n  cell -1: 1\n  cell 0: 2\n  d -1: [a]\nend\nY = stalk 2 @ 0\n"
            "[maps]\ng = map X -> Y\n  0: [e(2)]\nend\n")
    with pytest.raises(ProblemFileError, match="map g is not a chain map"):
        problem(a3, text)


def test_given_algebra_refuses_field(a3, problem):
    with pytest.raises(ProblemFileError, match="not allowed"):
        problem(a3, "[field]\nrational\n")


def test_expressions_in_complexes(a3, problem):
    text = "[complexes]\nP1 = stalk 1\nS = shift P1 2\nT = tau-inv P1\nR = res S2\n"
    pf = problem(a3, text)
    assert signature(pf.complex("S")) == "P1[2]"
    assert signature(pf.complex("T")) == "(P1-P2)[0]"
    assert signature(pf.complex("R")) == "(P1-P2)[0]"


def test_parse_and_format_elements(a3):
    ba = parse_element(a3, "b a")
    assert ba == a3.path("b", "a")
    assert parse_element(a3, "2*b a") == ba + ba
    assert parse_element(a3, "e(3) - e(3)").is_zero()
    assert format_element(parse_element(a3, "1/2*b a")) == "1/2*b a"
    assert format_element(parse_element(a3, "-a")) == "-a"
    assert format_element(a3.zero()) == "0"


def test_roundtrip(gamma_problem):
    for name in ("R2", "RS5", "P4"):
        x = gamma_problem.complex(name)
        assert roundtrip(x) == x
    for name in ("u23", "f_smonic", "f_gap"):
        f = gamma_problem.map(name)
        assert roundtrip(f) == f
    assert serialize_complex(gamma_problem.complex("R2"), "R2") == \
        "R2 = complex\n  cell -1: 1\n  cell 0: 2\n  d -1: [delta]\nend\n"


@pytest.mark.parametrize("fixture", ["a3.artri", "gamma_a5.artri", "example2.artri"])
def test_dump_problem_reparses(fixture):
    pf = load_problem(FIXTURES / fixture)
    again = parse_problem(dump_problem(pf))
    assert again.algebra.fingerprint() == pf.algebra.fingerprint()
    assert list(again.complexes) == list(pf.complexes)
    assert [signature(x) for x in again.complexes.values()] == [signature(x) for x in pf.complexes.values()]
    assert again.map_ends == pf.map_ends
    assert [t.argv for t in again.tasks] == [t.argv for t in pf.tasks]
    assert {n: m.dim_vector() for n, m in again.modules.items()} == \
        {n: m.dim_vector() for n, m in pf.modules.items()}


def test_field_override():
    pf = load_problem(FIXTURES / "a3.artri", field=Field.gf(5))
    assert pf.algebra.field == Field.gf(5)


def test_field_override_from_environment(monkeypatch):
    monkeypatch.setattr(config, "FIELD_OVERRIDE", "prime:5")
    pf = load_problem(FIXTURES / "a3.artri")
    assert pf.algebra.field.prime == 5


def test_slice_arrows(gamma_problem):
    arrows = gamma_problem.slice_arrows(["R2", "R3", "R4", "P4", "P5"])
    assert [(s, t) for s, t, _ in arrows] == [("R2", "R3"), ("R3", "R4"), ("P4", "R4"), ("R4", "P5")]
    with pytest.raises(KeyError):
        gamma_problem.slice_arrows(["R2", "X9"])
