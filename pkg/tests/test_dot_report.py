import json

import pandas as pd
import pytest

from tools.artri.dot_report import (ARROW_COLUMNS, MESH_COLUMNS, class_counts, component_record, component_table,
                                    dot_digest, emit_dot, mesh_table, write_reports)
from tools.artri.knitting import ARComponent, Slice, knit_component

HEADER = ["digraph ar_component {", "\tgraph [rankdir=LR];", "\tnode [shape=plaintext];"]


@pytest.fixture(scope="module")
def a3_component(a3_problem):
    names = ["P1", "P2", "P3"]
    sl = Slice.build({n: a3_problem.complex(n) for n in names}, a3_problem.slice_arrows(names))
    return knit_component(sl, steps_fwd=1, steps_bwd=0)


def test_empty_component(a3):
    assert emit_dot(ARComponent(a3)) == "\n".join(HEADER + ["}"]) + "\n"
    assert component_table(ARComponent(a3)).empty
    assert list(component_table(ARComponent(a3)).columns) == ARROW_COLUMNS
    assert class_counts(ARComponent(a3)).empty


def test_single_node(a3, a3_stalks):
    comp = ARComponent(a3, nodes={(0, "1"): a3_stalks["1"]}, names={(0, "1"): "P1[0]"}, orbits=["1"])
    lines = emit_dot(comp).splitlines()
    assert lines[:3] == HEADER
    assert lines[3] == '\t"1@0" [label="P1[0]"];'
    assert lines[4] == '\t{ rank = same; "1@0"; }'
    assert lines[-1] == "}"


def test_dot_is_deterministic(a3_component):
    text = emit_dot(a3_component)
    assert text == emit_dot(a3_component)
    assert dot_digest(text) == dot_digest(emit_dot(a3_component))
    assert text.count("style=dashed") == 3
    assert '"P1@0" -> "P2@0" [label="sirreducible(0)"];' in text


def test_tables(a3_component):
    arrows = component_table(a3_component)
    assert len(arrows) == 6
    assert arrows.iloc[0]["source_pos"] == "P1@0"
    meshes = mesh_table(a3_component)
    assert list(meshes.columns) == MESH_COLUMNS
    assert len(meshes) == 3
    assert meshes["verified"].all()
    assert int(class_counts(a3_component).sum()) == 6


def test_component_record(a3_component, a3):
    rec = component_record(a3_component)
    assert rec["algebra"] == a3.fingerprint()
    assert rec["orbits"] == ["P1", "P2", "P3"]
    assert len(rec["nodes"]) == 6
    assert rec["nodes"][0]["complex"].startswith("X = complex")
    json.dumps(rec)


def test_write_reports(a3_component, tmp_path):
    paths = write_reports(a3_component, tmp_path / "out", "a3")
    assert set(paths) == {"dot", "arrows", "meshes", "json"}
    assert all(p.exists() for p in paths.values())
    assert paths["dot"].read_text(encoding="utf-8") == emit_dot(a3_component)
    assert len(pd.read_csv(paths["arrows"])) == 6
    assert len(pd.read_csv(paths["meshes"])) == 3
    assert json.loads(paths["json"].read_text(encoding="utf-8"))["orbits"] == ["P1", "P2", "P3"]
