import pytest

from tools.artri import knitting
from tools.artri.complexes import direct_sum, signature, zero_complex
from tools.artri.errors import NotIndecomposableError, PreconditionError, ShapeViolation
from tools.artri.knitting import (ARReport, Slice, ar_triangle_ending, ar_triangle_starting, completed_triangle,
                                  knit_component, nakayama, tau_K, tau_inv_K, tau_roundtrip, verify_ar)


def _slice(pf, names):
    return Slice.build({n: pf.complex(n) for n in names}, pf.slice_arrows(names))


def test_nakayama_of_projectives(a3_stalks):
    assert signature(nakayama(a3_stalks["3"])) == "(P2-P3)[0]"
    assert signature(nakayama(a3_stalks["1"])) == "P3[0]"


def test_tau_of_a3_projectives(a3_stalks):
    s = a3_stalks
    assert signature(tau_K(s["1"])) == "P3[-1]"
    assert signature(tau_K(s["2"], "tau")) == "(P1-P3)[-1]"
    assert signature(tau_K(s["3"])) == "(P2-P3)[-1]"
    assert signature(tau_K(s["1"], "tau_inv")) == "(P1-P2)[0]"
    assert signature(tau_inv_K(s["2"])) == "(P1-P3)[0]"
    assert signature(tau_inv_K(s["3"])) == "P1[1]"


def test_tau_roundtrip(a3_stalks):
    assert tau_roundtrip(a3_stalks["2"])


def test_tau_rejects_decomposables(a3_stalks):
    total, _, _ = direct_sum([a3_stalks["1"], a3_stalks["2"]])
    with pytest.raises(NotIndecomposableError):
        tau_K(total)
    with pytest.raises(NotIndecomposableError):
        ar_triangle_ending(total)


def test_tau_unknown_direction(a3_stalks):
    with pytest.raises(PreconditionError):
        tau_K(a3_stalks["1"], "sideways")


def test_ar_triangle_ending_at_p3(a3_stalks):
    rec = ar_triangle_ending(a3_stalks["3"])
    assert signature(rec.triangle.X) == "(P2-P3)[-1]"
    assert signature(rec.triangle.Y) == "P2[0]"
    assert rec.report.ok
    out = rec.to_dict()
    assert out["end"] == "P3[0]"
    assert out["report"]["ok"]
    assert "positions" not in out
    assert "shape_failures" not in out
    assert rec.template in {"a", "b", "c1", "c2", "c3"}


def test_shape_failures_stay_on_the_record(a3_stalks, monkeypatch):
    def reject(u_class, t, v_class):
        raise ShapeViolation("triangle matches no template", ["Y^k = X^k + Z^k"])

    monkeypatch.setattr(knitting, "theorem2_shape", reject)
    rec = ar_triangle_ending(a3_stalks["3"])
    assert rec.shape is None
    assert rec.template is None
    assert rec.shape_failures == ["Y^k = X^k + Z^k"]
    assert rec.to_dict()["shape_failures"] == ["Y^k = X^k + Z^k"]


def test_ar_triangle_starting_at_p1(a3_stalks):
    rec = ar_triangle_starting(a3_stalks["1"])
    assert signature(rec.triangle.Z) == "(P1-P2)[0]"
    assert signature(rec.triangle.Y) == "P2[0]"
    assert rec.report.ok


def test_completed_triangle_of_a_projective_arrow(a3_problem):
    t = completed_triangle(a3_problem.map("f12"))
    assert signature(t.Z) == "(P1-P2)[0]"
    assert t.v.is_chain_map()
    assert verify_ar(t).ok


def test_report_failures():
    assert ARReport(True, True, True, True).ok
    report = ARReport(True, False, True, True, failures=["Z decomposable"])
    assert not report.ok
    assert report.to_dict()["ok"] is False


def test_slice_order(a3_problem):
    sl = _slice(a3_problem, ["P3", "P1", "P2"])
    assert sl.order() == ["P1", "P2", "P3"]
    assert sl.successors("P2") == ["P3"]
    assert sl.predecessors("P2") == ["P1"]
    classes = sl.verify()
    assert str(classes[("P1", "P2")]) == "sirreducible(0)"


def test_slice_rejects_bad_input(a3, a3_problem):
    p1, p2, p3 = (a3_problem.complex(n) for n in ("P1", "P2", "P3"))
    f12, f23, f13 = (a3_problem.map(n) for n in ("f12", "f23", "f13"))
    with pytest.raises(PreconditionError):
        Slice.build({"P1": p1}, [("P1", "P9", f12)])
    with pytest.raises(PreconditionError):
        Slice.build({"P1": p1, "P3": p3}, []).verify()
    with pytest.raises(PreconditionError):
        Slice.build({"P1": p1, "P3": p3}, [("P1", "P3", f13)]).verify()
    with pytest.raises(PreconditionError):
        Slice.build({"P1": p1, "P2": p2}, [("P1", "P2", f23)]).verify()
    with pytest.raises(PreconditionError):
        Slice.build({}, []).verify()
    with pytest.raises(PreconditionError):
        Slice.build({"Z": zero_complex(a3)}, []).verify()


def test_knit_one_step_a3(a3_problem):
    comp = knit_component(_slice(a3_problem, ["P1", "P2", "P3"]), steps_fwd=1, steps_bwd=0)
    assert len(comp.nodes) == 6
    assert comp.names[(1, "P1")] == "(P1-P2)[0]"
    assert comp.names[(1, "P2")] == "(P1-P3)[0]"
    assert comp.names[(1, "P3")] == "P1[1]"
    assert len(comp.meshes) == 3
    assert len(comp.arrows) == 6
    assert comp.tau_pairs == [((0, "P1"), (1, "P1")), ((0, "P2"), (1, "P2")), ((0, "P3"), (1, "P3"))]
    assert all(m.report.ok for m in comp.meshes)
    assert comp.meshes[0].to_dict()["positions"]["start"] == [0, "P1"]
    g = comp.graph()
    assert g.number_of_nodes() == 6
    assert g.number_of_edges() == 6


def test_knit_rejects_negative_steps(a3_problem):
    with pytest.raises(PreconditionError):
        knit_component(_slice(a3_problem, ["P1", "P2", "P3"]), steps_fwd=-1, steps_bwd=0)
