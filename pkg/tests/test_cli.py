import io
import json

import pytest

from conftest import FIXTURES
from tools.artri import cli
from tools.artri.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main, run


def _run(pf, *argv):
    out = io.StringIO()
    code = run(pf, list(argv), out)
    return code, out.getvalue()


@pytest.mark.parametrize("module, expected", [
    ("P1", "(P1-P2)[0]"),
    ("P2", "(P1-P3)[0]"),
    ("P3", "(P1-P4)[0]"),
])
def test_resolve_tau_inverse(gamma_problem, module, expected):
    assert _run(gamma_problem, "resolve", "tau-inv", module) == (EXIT_OK, expected + "\n")


def test_resolve_simple(gamma_problem):
    code, text = _run(gamma_problem, "resolve", "S5", "--show")
    assert code == EXIT_OK
    assert text.splitlines()[0] == "(P1-P4-P5)[0]"
    assert "R = complex" in text


def test_info(gamma_problem):
    code, text = _run(gamma_problem, "info")
    assert code == EXIT_OK
    assert "dimension: 14" in text.splitlines()
    assert "global dimension: 2" in text.splitlines()


def test_classify(gamma_problem):
    assert _run(gamma_problem, "classify", "f_smonic") == (EXIT_OK, "smonic\n")
    code, text = _run(gamma_problem, "classify", "f_gap", "--support")
    assert code == EXIT_OK
    assert "pd_gap" in text


def test_classify_pattern(a3_problem):
    code, text = _run(a3_problem, "classify", "f12", "--pattern")
    assert code == EXIT_OK
    assert text.splitlines() == ["sirreducible(0)", "  0: neither"]


def test_hom_and_tau(a3_problem):
    assert _run(a3_problem, "hom", "P1", "P3") == (EXIT_OK, "1\n")
    assert _run(a3_problem, "hom", "P3", "P1") == (EXIT_OK, "0\n")
    assert _run(a3_problem, "tau", "P1", "--inverse") == (EXIT_OK, "(P1-P2)[0]\n")
    assert _run(a3_problem, "tau", "P1") == (EXIT_OK, "P3[-1]\n")


def test_reduced_cone(gamma_problem):
    code, text = _run(gamma_problem, "cone", "f_smonic", "--reduced", "--verify")
    assert code == EXIT_OK
    checks, sig = text.splitlines()
    assert all(json.loads(checks).values())
    assert sig == "P1[1]"


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["classify", "nope"],
    ["hom", "P1", "nope"],
    ["classify", "f12", "--bogus"],
    ["knit", "--fwd", "1"],
])
def test_usage_errors(a3_problem, argv):
    code, _ = _run(a3_problem, *argv)
    assert code == EXIT_USAGE


def test_unknown_names_are_usage_errors(a3_problem, capsys):
    assert _run(a3_problem, "classify", "nope")[0] == EXIT_USAGE
    assert capsys.readouterr().err == "artri: usage: unknown map 'nope'\n"
    assert _run(a3_problem, "resolve", "tau-inv")[0] == EXIT_USAGE


def test_internal_errors_are_not_usage_errors(a3_problem, monkeypatch):
    def broken(*args, **kwargs):
        return {}["missing"]

    monkeypatch.setattr(cli, "knit_component", broken)
    with pytest.raises(KeyError):
        _run(a3_problem, "knit", "--slice", "P1", "P2", "P3")


def test_domain_error(gamma_problem):
    code, text = _run(gamma_problem, "resolve", "tau", "P1")
    assert code == EXIT_DOMAIN
    assert text == ""


def test_main_missing_file(tmp_path):
    assert main([str(tmp_path / "missing.artri"), "info"]) == EXIT_USAGE


def test_main_bad_field():
    assert main([str(FIXTURES / "a3.artri"), "--field", "reals", "info"]) == EXIT_USAGE


def test_main_runs_a_command(capsys):
    assert main([str(FIXTURES / "a3.artri"), "--field", "prime:7", "hom", "P1", "P2"]) == EXIT_OK
    assert capsys.readouterr().out == "1\n"


def test_knit_dot_to_stdout(a3_problem):
    code, text = _run(a3_problem, "knit", "--slice", "P1", "P2", "P3", "--fwd", "1", "--dot", "-")
    assert code == EXIT_OK
    assert text.startswith("digraph ar_component {\n")
    assert text.endswith("}\n")


def test_knit_writes_reports(a3_problem, tmp_path):
    code, text = _run(a3_problem, "knit", "--slice", "P1", "P2", "P3", "--fwd", "1",
                      "--csv", str(tmp_path / "arrows.csv"), "--out-dir", str(tmp_path / "reports"))
    assert code == EXIT_OK
    assert "P3@1\tP1[1]" in text.splitlines()
    assert (tmp_path / "arrows.csv").exists()
    assert (tmp_path / "reports" / "a3.dot").exists()


def test_knit_experimental_gate(example2_problem):
    code, _ = _run(example2_problem, "knit", "--slice", "RI1", "RS2", "RS3", "P4", "--fwd", "1")
    assert code == EXIT_USAGE


def test_verify_ar_on_a_map(a3_problem, tmp_path):
    target = tmp_path / "f12.json"
    code, text = _run(a3_problem, "verify-ar", "f12", "--json", str(target))
    assert code == EXIT_OK
    record = json.loads(text)
    assert record["template"] == "c1"
    assert record["end"] == "(P1-P2)[0]"
    assert record["report"]["ok"]
    assert json.loads(target.read_text(encoding="utf-8")) == record


def test_verify_ar_on_a_complex(a3_problem):
    code, text = _run(a3_problem, "verify-ar", "P3")
    assert code == EXIT_OK
    assert json.loads(text)["start"] == "(P2-P3)[-1]"


@pytest.mark.slow
def test_run_tasks(a3_problem):
    code, text = _run(a3_problem, "run")
    assert code == EXIT_OK
    assert "$ hom P1 P3" in text.splitlines()
    assert "P3@-1\t(P2-P3)[-1]" in text.splitlines()
