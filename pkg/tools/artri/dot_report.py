"""
Component reports
=================
Exports a knitted AR component: a deterministic DOT graph, pandas tables of
arrows and meshes (CSV), and a JSON record with every node serialized.

Usage:
  from tools.artri.dot_report import emit_dot, component_table, write_reports
  text = emit_dot(comp)                       # byte-identical across runs
  df = component_table(comp)                  # one row per arrow
  write_reports(comp, Path("out"), "a3")      # a3.dot, a3_arrows.csv, a3_meshes.csv, a3.json
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, List, Tuple

import pandas as pd

from .knitting import ARComponent, Pos
from .problem_file import serialize_complex

logger = logging.getLogger("artri.dot_report")


# ═══════════════════════════════════════════════════════════════
# Ordering
# ═══════════════════════════════════════════════════════════════

def _node_key(comp: ARComponent, pos: Pos) -> Tuple[int, str, int]:
    """(τ-orbit, position): orbits in slice order, then by translate power."""
    n, x = pos
    orbit = comp.orbits.index(x) if x in comp.orbits else len(comp.orbits)
    return orbit, x, n


def _node_id(pos: Pos) -> str:
    n, x = pos
    return f"{x}@{n}"


def _sorted_nodes(comp: ARComponent) -> List[Pos]:
    return sorted(comp.nodes, key=lambda p: _node_key(comp, p))


def _sorted_arrows(comp: ARComponent) -> List[Tuple[Pos, Pos]]:
    return sorted(comp.arrows, key=lambda st: (_node_key(comp, st[0]), _node_key(comp, st[1])))


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


# ═══════════════════════════════════════════════════════════════
# DOT
# ═══════════════════════════════════════════════════════════════

def emit_dot(comp: ARComponent, name: str = "ar_component") -> str:
    """Nodes by (τ-orbit, position); solid edges carry the arrow class, dashed edges join τX to X."""
    lines = [f"digraph {name} {{", "\tgraph [rankdir=LR];", "\tnode [shape=plaintext];"]
    nodes = _sorted_nodes(comp)
    for pos in nodes:
        lines.append(f'\t"{_node_id(pos)}" [label="{_escape(comp.names[pos])}"];')
    for n in sorted({p[0] for p in nodes}):
        same = " ".join(f'"{_node_id(p)}";' for p in nodes if p[0] == n)
        lines.append(f"\t{{ rank = same; {same} }}")
    for s, t in _sorted_arrows(comp):
        cls = comp.classes.get((s, t))
        lines.append(f'\t"{_node_id(s)}" -> "{_node_id(t)}" [label="{_escape(str(cls) if cls else "")}"];')
    templates: Dict[Tuple[Pos, Pos], str] = {}
    for rec in comp.meshes:
        if rec.start is not None:
            templates[(rec.start, rec.end)] = rec.template or "?"
    for s, t in sorted(comp.tau_pairs, key=lambda st: (_node_key(comp, st[0]), _node_key(comp, st[1]))):
        label = templates.get((s, t), "")
        lines.append(f'\t"{_node_id(s)}" -> "{_node_id(t)}" [style=dashed, constraint=false, label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ═══════════════════════════════════════════════════════════════
# Tables
# ═══════════════════════════════════════════════════════════════

ARROW_COLUMNS = ["source", "target", "source_pos", "target_pos", "class", "index", "candidate", "pattern"]
MESH_COLUMNS = ["start", "middle", "end", "u_class", "v_class", "template", "verified", "failures"]


def component_table(comp: ARComponent) -> pd.DataFrame:
    rows = []
    for s, t in _sorted_arrows(comp):
        cls = comp.classes.get((s, t))
        pattern = cls.pattern.to_dict() if cls and cls.pattern else {}
        rows.append({
            "source": comp.names[s],
            "target": comp.names[t],
            "source_pos": _node_id(s),
            "target_pos": _node_id(t),
            "class": cls.kind if cls else "",
            "index": cls.index if cls else None,
            "candidate": bool(cls.candidate) if cls else False,
            "pattern": " ".join(f"{k}:{v}" for k, v in pattern.items()),
        })
    return pd.DataFrame(rows, columns=ARROW_COLUMNS)


def mesh_table(comp: ARComponent) -> pd.DataFrame:
    rows = []
    for rec in comp.meshes:
        rows.append({
            "start": comp.names.get(rec.start, "") if rec.start is not None else "",
            "middle": " + ".join(comp.names[m] for m in rec.middle),
            "end": comp.names.get(rec.end, "") if rec.end is not None else "",
            "u_class": str(rec.u_class),
            "v_class": str(rec.v_class),
            "template": rec.template or "",
            "verified": rec.report.ok,
            "failures": "; ".join(rec.report.failures),
        })
    return pd.DataFrame(rows, columns=MESH_COLUMNS)


def class_counts(comp: ARComponent) -> pd.Series:
    """Arrow count per class."""
    df = component_table(comp)
    if df.empty:
        return pd.Series(dtype=int)
    return df.groupby("class").size().sort_index()


# ═══════════════════════════════════════════════════════════════
# JSON record and writers
# ═══════════════════════════════════════════════════════════════

def component_record(comp: ARComponent) -> Dict:
    nodes = []
    for pos in _sorted_nodes(comp):
        nodes.append({"id": _node_id(pos), "position": list(pos), "signature": comp.names[pos],
                      "complex": serialize_complex(comp.nodes[pos], "X")})
    arrows = []
    for s, t in _sorted_arrows(comp):
        cls = comp.classes.get((s, t))
        arrows.append({"source": _node_id(s), "target": _node_id(t), "class": cls.to_dict() if cls else None})
    return {
        "algebra": comp.alg.fingerprint(),
        "field": comp.alg.field.name,
        "orbits": list(comp.orbits),
        "nodes": nodes,
        "arrows": arrows,
        "meshes": [rec.to_dict() for rec in comp.meshes],
    }


def save_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False), encoding="utf-8")


def save_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_reports(comp: ARComponent, out_dir: Path, stem: str) -> Dict[str, Path]:
    """DOT, arrow CSV, mesh CSV and JSON record for one component."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "dot": out_dir / f"{stem}.dot",
        "arrows": out_dir / f"{stem}_arrows.csv",
        "meshes": out_dir / f"{stem}_meshes.csv",
        "json": out_dir / f"{stem}.json",
    }
    save_text(paths["dot"], emit_dot(comp))
    component_table(comp).to_csv(paths["arrows"], index=False)
    mesh_table(comp).to_csv(paths["meshes"], index=False)
    save_json(paths["json"], component_record(comp))
    for kind, p in paths.items():
        logger.info("wrote %s %s", kind, p)
    return paths
