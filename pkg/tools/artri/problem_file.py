"""
Problem files
=============
Reader and writer for the line-oriented ``.artri`` format: one algebra per
file, named modules, complexes and maps, and a task list of CLI command
lines. The grammar is written out in docs/problem_file_grammar.md.

Usage:
  from tools.artri.problem_file import load_problem, serialize_complex, roundtrip
  pf = load_problem("data/fixtures/gamma_a5.artri")
  pf.algebra.dimension                      # 14
  print(serialize_complex(pf.complex("RS5"), "RS5"))
  roundtrip(pf.complex("RS5")) == pf.complex("RS5")
"""

from __future__ import annotations

import logging
import re
import shlex
from dataclasses import dataclass, field as dc_field
from pathlib import Path as FsPath
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import config
from .complexes import ChainMap, GradedMap, Homotopy, ProjComplex, compose, identity, minimize, shift, stalk
from .errors import ArtriError, ExpressionError, ProblemFileError, UnknownNameError
from .knitting import tau_K
from .linalg import Field, Matrix
from .path_algebra import AlgebraElement, Arrow, BasicAlgebra, Path, ProjMap, Quiver, Relation, build_algebra
from .quiver_rep import Representation, ar_translate_mod, min_proj_resolution, standard_module

logger = logging.getLogger("artri.problem_file")

SECTIONS = ("meta", "field", "quiver", "relations", "modules", "complexes", "maps", "tasks")

_HEADER = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")
_VERTEX = re.compile(r"^[A-Za-z0-9_]+$")
_SCALAR = re.compile(r"^\d+(/\d+)?$")
_TRIVIAL = re.compile(r"^e\(\s*([A-Za-z0-9_]+)\s*\)$")
_ARROW_DECL = re.compile(r"^([^:\s]+)\s*:\s*(\S+)\s*->\s*(\S+)$")
_SHORT_MODULE = re.compile(r"^([SPI])([A-Za-z0-9_]+)$")
_KINDS = {"simple": "simple", "projective": "projective", "injective": "injective"}


class _Issue(Exception):
    """Syntax problem at a 0-based offset of the current line."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


# ═══════════════════════════════════════════════════════════════
# Data model
# ═══════════════════════════════════════════════════════════════

@dataclass
class Task:
    line: int
    argv: List[str]

    def __str__(self) -> str:
        return " ".join(shlex.quote(a) for a in self.argv)


@dataclass
class ProblemFile:
    field: Field
    quiver: Quiver
    relations: List[Relation]
    algebra: BasicAlgebra
    modules: Dict[str, Representation] = dc_field(default_factory=dict)
    complexes: Dict[str, ProjComplex] = dc_field(default_factory=dict)
    maps: Dict[str, GradedMap] = dc_field(default_factory=dict)
    map_ends: Dict[str, Tuple[str, str]] = dc_field(default_factory=dict)
    tasks: List[Task] = dc_field(default_factory=list)
    meta: Dict[str, str] = dc_field(default_factory=dict)
    source: str = "<string>"

    @property
    def name(self) -> str:
        return self.meta.get("name") or FsPath(self.source).stem

    @property
    def experimental(self) -> bool:
        return self.meta.get("experimental", "").lower() in ("1", "true", "yes")

    def complex(self, name: str) -> ProjComplex:
        try:
            return self.complexes[name]
        except KeyError:
            raise UnknownNameError(f"unknown complex {name!r}") from None

    def map(self, name: str) -> GradedMap:
        try:
            return self.maps[name]
        except KeyError:
            raise UnknownNameError(f"unknown map {name!r}") from None

    def module(self, tokens: Union[str, Sequence[str]]) -> Representation:
        """A named module or a module expression such as ``tau-inv P1``."""
        if isinstance(tokens, str):
            tokens = tokens.split()
        return _module_expr(self.algebra, self.modules, list(tokens))

    def slice_arrows(self, names: Sequence[str]) -> List[Tuple[str, str, ChainMap]]:
        """Declared chain maps whose ends are both among the named complexes."""
        wanted = set(names)
        for n in names:
            self.complex(n)
        out, seen = [], set()
        for m, (s, t) in self.map_ends.items():
            f = self.maps[m]
            if s in wanted and t in wanted and s != t and f.degree == 0:
                if (s, t) in seen:
                    raise ArtriError(f"two declared maps {s} -> {t}; a slice needs one arrow per pair")
                seen.add((s, t))
                out.append((s, t, f))
        return out


# ═══════════════════════════════════════════════════════════════
# Scalars, elements and matrices
# ═══════════════════════════════════════════════════════════════

def _split_terms(text: str) -> List[Tuple[int, int, str]]:
    """'2*a b - c d' -> [(1, 0, '2*a b'), (-1, 8, 'c d')] with 0-based body offsets."""
    pieces = re.split(r"([+-])", text)
    out: List[Tuple[int, int, str]] = []
    sign, offset = 1, 0
    for k, piece in enumerate(pieces):
        if k % 2:
            sign = -1 if piece == "-" else 1
        else:
            body = piece.strip()
            if body:
                out.append((sign, offset + len(piece) - len(piece.lstrip()), body))
            elif k > 0 or len(pieces) == 1:
                raise _Issue("missing term", offset)
        offset += len(piece)
    return out


def _parse_term(body: str, offset: int):
    """(coefficient text, path spec); spec is None, ('e', v) or ('arrows', [names])."""
    if "*" in body:
        coef, rest = body.split("*", 1)
        coef = coef.strip()
        if not _SCALAR.match(coef):
            raise _Issue(f"bad coefficient {coef!r}", offset)
        tokens = rest.split()
        if not tokens:
            raise _Issue("coefficient without a path", offset)
    else:
        tokens = body.split()
        coef = "1"
        if _SCALAR.match(tokens[0]):
            coef, tokens = tokens[0], tokens[1:]
    if not tokens:
        return coef, None
    joined = " ".join(tokens)
    m = _TRIVIAL.match(joined)
    if m:
        return coef, ("e", m.group(1))
    for t in tokens:
        if not _NAME.match(t) or t == "e":
            raise _Issue(f"bad arrow name {t!r}", offset + max(body.find(t), 0))
    return coef, ("arrows", tokens)


def _path(quiver: Quiver, spec, offset: int) -> Path:
    kind, value = spec
    if kind == "e":
        if value not in quiver.vertices:
            raise _Issue(f"unknown vertex {value!r}", offset)
        return Path.trivial(value)
    try:
        return Path.of(quiver, value)
    except ArtriError as exc:
        raise _Issue(str(exc), offset) from None


def _terms(quiver: Quiver, field_: Field, text: str, base: int = 0) -> List[Tuple[object, Optional[Path], int]]:
    out = []
    for sign, off, body in _split_terms(text):
        coef, spec = _parse_term(body, base + off)
        c = field_(coef) * sign
        out.append((c, None if spec is None else _path(quiver, spec, base + off), base + off))
    return out


def parse_element(alg: BasicAlgebra, text: str, base: int = 0) -> AlgebraElement:
    """'2*a b - e(3)' -> element of alg; a bare scalar is allowed only when it is 0."""
    out = alg.zero()
    for c, p, off in _terms(alg.quiver, alg.field, text, base):
        if p is None:
            if c != 0:
                raise _Issue("scalar without a path; write c*e(v)", off)
            continue
        out = out + c * alg.path_element(p)
    return out


def format_element(x: AlgebraElement) -> str:
    return _format_terms(x.alg.field, x.terms())


def _format_terms(f: Field, terms: Sequence[Tuple[object, Path]]) -> str:
    if not terms:
        return "0"
    text = ""
    for c, p in terms:
        c = f(c)
        neg = f.prime == 0 and c < 0
        coef = f.format(-c if neg else c)
        path = " ".join(p.arrows) if p.arrows else f"e({p.source})"
        body = path if coef == "1" else f"{coef}*{path}"
        if not text:
            text = ("-" if neg else "") + body
        else:
            text += f" {'-' if neg else '+'} {body}"
    return text


def _matrix_cells(text: str, base: int = 0) -> List[List[Tuple[str, int]]]:
    """'[a, b; c, 0]' -> rows of (entry text, 0-based column)."""
    lead = len(text) - len(text.lstrip())
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise _Issue("expected a matrix [row; row] with comma-separated entries", base + lead)
    inner = s[1:-1]
    if not inner.strip():
        return []
    rows, offset = [], base + lead + 1
    for row_text in inner.split(";"):
        row, off = [], offset
        for entry in row_text.split(","):
            stripped = entry.strip()
            if not stripped:
                raise _Issue("empty matrix entry", off)
            row.append((stripped, off + len(entry) - len(entry.lstrip())))
            off += len(entry) + 1
        rows.append(row)
        offset += len(row_text) + 1
    if len({len(r) for r in rows}) > 1:
        raise _Issue("matrix rows have different lengths", base + lead)
    return rows


def _scalar_matrix(field_: Field, text: str, nrows: int, ncols: int, base: int = 0) -> Matrix:
    rows = _matrix_cells(text, base)
    got = (len(rows), len(rows[0]) if rows else 0)
    if nrows * ncols == 0 and not rows:
        return Matrix.zeros(field_, nrows, ncols)
    if got != (nrows, ncols):
        raise _Issue(f"matrix is {got[0]}x{got[1]}, expected {nrows}x{ncols}", base)
    vals = []
    for row in rows:
        out = []
        for entry, off in row:
            sign = -1 if entry.startswith("-") else 1
            digits = entry.lstrip("-").strip()
            if not _SCALAR.match(digits):
                raise _Issue(f"bad scalar {entry!r}", off)
            out.append(field_(digits) * sign)
        vals.append(out)
    return Matrix(field_, vals, nrows, ncols)


def _format_scalar_matrix(m: Matrix) -> str:
    f = m.field
    rows = []
    for r in m.rows():
        rows.append(", ".join((f"-{f.format(-c)}" if f.prime == 0 and c < 0 else f.format(c)) for c in r))
    return "[" + "; ".join(rows) + "]"


def parse_projmap(alg: BasicAlgebra, source: Sequence[str], target: Sequence[str], text: str,
                  base: int = 0) -> ProjMap:
    rows = _matrix_cells(text, base)
    got = (len(rows), len(rows[0]) if rows else 0)
    if got != (len(target), len(source)):
        raise _Issue(f"matrix is {got[0]}x{got[1]}, expected {len(target)}x{len(source)}", base)
    entries = []
    for r, row in enumerate(rows):
        out = []
        for c, (entry, off) in enumerate(row):
            x = parse_element(alg, entry, off)
            if not alg.in_block(x, target[r], source[c]):
                raise _Issue(f"entry ({r},{c}) is not a combination of paths {target[r]} -> {source[c]}", off)
            out.append(x)
        entries.append(out)
    return ProjMap(alg, source, target, entries)


def format_projmap(m: ProjMap) -> str:
    return "[" + "; ".join(", ".join(format_element(x) for x in row) for row in m.entries) + "]"


# ═══════════════════════════════════════════════════════════════
# Module expressions
# ═══════════════════════════════════════════════════════════════

def _module_expr(alg: BasicAlgebra, named: Dict[str, Representation], tokens: List[str]) -> Representation:
    """tau | tau-inv <expr>; simple|projective|injective <v>; S<v> | P<v> | I<v>; a declared name."""
    if not tokens:
        raise ExpressionError("empty module expression")
    head = tokens[0]
    if head in ("tau", "tau-inv"):
        inner = _module_expr(alg, named, tokens[1:])
        return ar_translate_mod(inner, "tau" if head == "tau" else "tau-inv")
    if head in _KINDS:
        if len(tokens) != 2:
            raise ExpressionError(f"{head} takes one vertex")
        return standard_module(alg, _KINDS[head], tokens[1])
    if len(tokens) != 1:
        raise ExpressionError(f"unexpected {' '.join(tokens[1:])!r} after {head!r}")
    if head in named:
        return named[head]
    m = _SHORT_MODULE.match(head)
    if m and m.group(2) in alg.vertices:
        return standard_module(alg, m.group(1), m.group(2))
    raise UnknownNameError(f"unknown module {head!r}")


def serialize_module(m: Representation, name: str) -> str:
    dims = " ".join(f"{v}:{d}" for v, d in m.dims.items() if d)
    parts = [f"{name} = rep {dims}".rstrip()]
    for a in m.alg.quiver.arrows:
        mat = m.maps[a.name]
        if mat.nrows and mat.ncols:
            parts.append(f"{a.name} = {_format_scalar_matrix(mat)}")
    return " ; ".join(parts) + "\n"


# ═══════════════════════════════════════════════════════════════
# Parser
# ═══════════════════════════════════════════════════════════════

@dataclass
class _Line:
    number: int
    text: str

    def error(self, message: str, offset: int = 0) -> ProblemFileError:
        return ProblemFileError(message, self.number, offset + 1)

    def offset_of(self, token: str, start: int = 0) -> int:
        return max(self.text.find(token, start), 0)


def _strip_comment(raw: str) -> str:
    i = raw.find("#")
    return (raw if i < 0 else raw[:i]).rstrip()


class _Parser:
    def __init__(self, text: str, source: str, field_: Optional[Field], algebra: Optional[BasicAlgebra]):
        self.source = source
        self.lines = [_Line(i + 1, _strip_comment(raw)) for i, raw in enumerate(text.splitlines())]
        self.forced_field = field_
        self.alg = algebra
        self.given = algebra is not None
        self.field: Optional[Field] = algebra.field if algebra is not None else None
        self.vertices: List[str] = []
        self.arrows: List[Arrow] = []
        self.relations: List[Relation] = []
        self.quiver: Optional[Quiver] = algebra.quiver if algebra is not None else None
        self.pf_modules: Dict[str, Representation] = {}
        self.pf_complexes: Dict[str, ProjComplex] = {}
        self.pf_maps: Dict[str, GradedMap] = {}
        self.map_ends: Dict[str, Tuple[str, str]] = {}
        self.tasks: List[Task] = []
        self.meta: Dict[str, str] = {}
        self.pos = 0

    # -- driver --------------------------------------------------------------
    def run(self) -> ProblemFile:
        section = None
        last_index = -1
        while self.pos < len(self.lines):
            line = self.lines[self.pos]
            self.pos += 1
            body = line.text.strip()
            if not body:
                continue
            header = _HEADER.match(body)
            if header:
                name = header.group(1).lower()
                if name not in SECTIONS:
                    raise line.error(f"unknown section [{name}]", line.offset_of(name))
                index = SECTIONS.index(name)
                if index <= last_index:
                    raise line.error(f"section [{name}] is repeated or out of order")
                if self.given and name in ("field", "quiver", "relations"):
                    raise line.error(f"section [{name}] is not allowed when the algebra is supplied")
                section, last_index = name, index
                continue
            if section is None:
                raise line.error("content before the first section header")
            try:
                getattr(self, f"_on_{section}")(line)
            except _Issue as exc:
                raise line.error(str(exc), exc.offset) from None
        alg = self._algebra(self.lines[-1] if self.lines else _Line(0, ""))
        return ProblemFile(self.field, self.quiver, list(self.relations), alg, self.pf_modules, self.pf_complexes,
                           self.pf_maps, self.map_ends, self.tasks, self.meta, self.source)

    def _algebra(self, line: _Line) -> BasicAlgebra:
        if self.alg is None:
            if self.quiver is None:
                self._quiver(line)
            self.field = self.forced_field or config.default_field() or self.field or Field.rationals()
            for r in self.relations:
                for c, _ in r.terms:
                    self.field(c)
            self.alg = build_algebra(self.quiver, self.relations, field=self.field)
            logger.info("%s: algebra of dimension %d", self.source, self.alg.dimension)
        return self.alg

    def _quiver(self, line: _Line) -> Quiver:
        if self.quiver is None:
            if not self.vertices:
                raise line.error("no vertices declared in [quiver]")
            try:
                self.quiver = Quiver(self.vertices, self.arrows)
            except ArtriError as exc:
                raise line.error(str(exc)) from None
        return self.quiver

    def _assignment(self, line: _Line) -> Tuple[str, str, int]:
        if "=" not in line.text:
            raise line.error("expected NAME = ...")
        lhs, rhs = line.text.split("=", 1)
        name = lhs.strip()
        if not _NAME.match(name):
            raise line.error(f"bad name {name!r}", line.offset_of(name))
        return name, rhs.strip(), len(lhs) + 1 + (len(rhs) - len(rhs.lstrip()))

    def _block(self, start: _Line) -> List[_Line]:
        out = []
        while self.pos < len(self.lines):
            line = self.lines[self.pos]
            self.pos += 1
            body = line.text.strip()
            if not body:
                continue
            if body == "end":
                return out
            out.append(line)
        raise start.error("block is missing its 'end' line")

    def _lookup(self, table: Dict, kind: str, name: str, line: _Line):
        try:
            return table[name]
        except KeyError:
            raise line.error(f"unknown {kind} {name!r}", line.offset_of(name, line.text.find("="))) from None

    def _int(self, token: str, line: _Line) -> int:
        try:
            return int(token)
        except ValueError:
            raise line.error(f"expected an integer, got {token!r}", line.offset_of(token)) from None

    # -- sections --------------------------------------------------------------
    def _on_meta(self, line: _Line) -> None:
        key, value, _ = self._assignment(line)
        self.meta[key] = value

    def _on_field(self, line: _Line) -> None:
        if self.field is not None:
            raise line.error("the field is declared twice")
        try:
            self.field = Field.parse(line.text)
        except ValueError as exc:
            raise line.error(str(exc), len(line.text) - len(line.text.lstrip())) from None

    def _on_quiver(self, line: _Line) -> None:
        body = line.text.strip()
        tokens = body.split()
        if tokens[0] == "vertices":
            for t in tokens[1:]:
                if not _VERTEX.match(t):
                    raise line.error(f"bad vertex label {t!r}", line.offset_of(t))
                self.vertices.append(t)
            return
        m = _ARROW_DECL.match(body)
        if not m:
            raise line.error("expected 'vertices v ...' or 'name: source -> target'")
        name, s, t = m.groups()
        if not _NAME.match(name) or name == "e":
            raise line.error(f"bad arrow name {name!r}", line.offset_of(name))
        self.arrows.append(Arrow(name, s, t))

    def _on_relations(self, line: _Line) -> None:
        q = self._quiver(line)
        fld = self.forced_field or config.default_field() or self.field or Field.rationals()
        terms = _terms(q, fld, line.text)
        for c, p, off in terms:
            if p is None or p.length < 2:
                shown = "scalar" if p is None else f"path {p.label()!r} of length {p.length}"
                raise line.error(f"inadmissible relation: {shown} (terms need length >= 2)", off)
        rel = Relation(tuple((c, p) for c, p, _ in terms))
        try:
            rel.validate()
        except ArtriError as exc:
            raise line.error(f"inadmissible relation: {exc}", terms[0][2]) from None
        self.relations.append(rel)

    def _on_modules(self, line: _Line) -> None:
        alg = self._algebra(line)
        name, rhs, off = self._assignment(line)
        tokens = rhs.split()
        if tokens and tokens[0] == "rep":
            self.pf_modules[name] = self._explicit_module(alg, name, rhs, off, line)
            return
        try:
            m = _module_expr(alg, self.pf_modules, tokens)
        except KeyError as exc:
            raise line.error(exc.args[0], off) from None
        except (ValueError, ArtriError) as exc:
            raise line.error(str(exc), off) from None
        self.pf_modules[name] = m

    def _explicit_module(self, alg: BasicAlgebra, name: str, rhs: str, off: int, line: _Line) -> Representation:
        parts = rhs.split(";")
        dims: Dict[str, int] = {}
        for tok in parts[0].split()[1:]:
            v, _, d = tok.partition(":")
            if v not in alg.vertices or not d.isdigit():
                raise _Issue(f"bad dimension entry {tok!r}", line.offset_of(tok, off))
            dims[v] = int(d)
        maps: Dict[str, Matrix] = {}
        cursor = off + len(parts[0]) + 1
        for part in parts[1:]:
            if "=" not in part:
                raise _Issue("expected arrow = [matrix]", cursor)
            a_name, mat = part.split("=", 1)
            a_name = a_name.strip()
            if not alg.quiver.has_arrow(a_name):
                raise _Issue(f"unknown arrow {a_name!r}", line.offset_of(a_name, cursor))
            a = alg.quiver.arrow(a_name)
            maps[a_name] = _scalar_matrix(alg.field, mat, dims.get(a.target, 0), dims.get(a.source, 0),
                                          cursor + part.index("=") + 1)
            cursor += len(part) + 1
        rep = Representation(alg, dims, maps, name=name)
        if not rep.check_relations():
            raise line.error(f"module {name} does not satisfy the relations", off)
        return rep

    def _on_complexes(self, line: _Line) -> None:
        alg = self._algebra(line)
        name, rhs, off = self._assignment(line)
        tokens = rhs.split()
        if not tokens:
            raise line.error("empty complex expression", off)
        head = tokens[0]
        try:
            if head == "complex":
                x = self._complex_block(alg, line)
            elif head == "stalk":
                cells, degree = tokens[1:], 0
                if "@" in cells:
                    k = cells.index("@")
                    if k != len(cells) - 2:
                        raise line.error("expected 'stalk v ... @ degree'", off)
                    degree = self._int(cells[-1], line)
                    cells = cells[:k]
                for v in cells:
                    if v not in alg.vertices:
                        raise line.error(f"unknown vertex {v!r}", line.offset_of(v, off))
                x = stalk(alg, cells, degree)
            elif head == "res":
                x = min_proj_resolution(_module_expr(alg, self.pf_modules, tokens[1:]))
            elif head == "shift" and len(tokens) == 3:
                x = shift(self._lookup(self.pf_complexes, "complex", tokens[1], line), self._int(tokens[2], line))
            elif head == "minimize" and len(tokens) == 2:
                x = minimize(self._lookup(self.pf_complexes, "complex", tokens[1], line)).complex
            elif head in ("tau", "tau-inv") and len(tokens) == 2:
                x = tau_K(self._lookup(self.pf_complexes, "complex", tokens[1], line), head)
            else:
                raise line.error(f"unknown complex expression {rhs!r}", off)
        except KeyError as exc:
            raise line.error(exc.args[0], off) from None
        except ProblemFileError:
            raise
        except (ValueError, ArtriError) as exc:
            raise line.error(str(exc), off) from None
        self.pf_complexes[name] = x

    def _complex_block(self, alg: BasicAlgebra, start: _Line) -> ProjComplex:
        cells: Dict[int, List[str]] = {}
        pending: List[Tuple[int, _Line, int, str]] = []
        for line in self._block(start):
            body = line.text.strip()
            key, sep, rest = body.partition(":")
            if not sep:
                raise line.error("expected 'cell n: v ...' or 'd n: [matrix]'")
            words = key.split()
            if len(words) != 2 or words[0] not in ("cell", "d"):
                raise line.error("expected 'cell n: v ...' or 'd n: [matrix]'")
            n = self._int(words[1], line)
            if words[0] == "cell":
                for v in rest.split():
                    if v not in alg.vertices:
                        raise line.error(f"unknown vertex {v!r}", line.offset_of(v, line.text.find(":")))
                cells[n] = rest.split()
            else:
                pending.append((n, line, line.text.find(":") + 1, rest))
        diffs = {}
        for n, line, off, text in pending:
            src, tgt = cells.get(n, []), cells.get(n + 1, [])
            if not src or not tgt:
                raise line.error(f"d {n} needs cells in degrees {n} and {n + 1}")
            try:
                diffs[n] = parse_projmap(alg, src, tgt, text, off)
            except _Issue as exc:
                raise line.error(str(exc), exc.offset) from None
        x = ProjComplex(alg, cells, diffs)
        if not x.check():
            raise start.error("differentials do not compose to zero")
        return x

    def _on_maps(self, line: _Line) -> None:
        alg = self._algebra(line)
        name, rhs, off = self._assignment(line)
        tokens = rhs.split()
        if not tokens:
            raise line.error("empty map expression", off)
        head = tokens[0]
        if head in ("map", "zero"):
            if len(tokens) not in (4, 6) or tokens[2] != "->" or (len(tokens) == 6 and tokens[4] != "degree"):
                raise line.error(f"expected '{head} X -> Y [degree k]'", off)
            s, t = tokens[1], tokens[3]
            x = self._lookup(self.pf_complexes, "complex", s, line)
            y = self._lookup(self.pf_complexes, "complex", t, line)
            degree = self._int(tokens[5], line) if len(tokens) == 6 else 0
            comps = self._map_block(alg, x, y, degree, line) if head == "map" else {}
            f = _graded(x, y, comps, degree)
            if degree == 0 and not f.is_chain_map():
                raise line.error(f"map {name} is not a chain map", off)
            self.map_ends[name] = (s, t)
        elif head == "identity" and len(tokens) == 2:
            f = identity(self._lookup(self.pf_complexes, "complex", tokens[1], line))
            self.map_ends[name] = (tokens[1], tokens[1])
        elif head == "compose" and len(tokens) == 3:
            g = self._lookup(self.pf_maps, "map", tokens[1], line)
            h = self._lookup(self.pf_maps, "map", tokens[2], line)
            if h.target != g.source:
                raise line.error(f"cannot compose {tokens[1]} after {tokens[2]}", off)
            f = compose(g, h)
            self.map_ends[name] = (self.map_ends[tokens[2]][0], self.map_ends[tokens[1]][1])
        else:
            raise line.error(f"unknown map expression {rhs!r}", off)
        self.pf_maps[name] = f

    def _map_block(self, alg: BasicAlgebra, x: ProjComplex, y: ProjComplex, degree: int,
                   start: _Line) -> Dict[int, ProjMap]:
        comps = {}
        for line in self._block(start):
            key, sep, rest = line.text.partition(":")
            if not sep:
                raise line.error("expected 'n: [matrix]'")
            n = self._int(key.strip(), line)
            src, tgt = x.cell(n), y.cell(n + degree)
            if not src or not tgt:
                raise line.error(f"component {n} needs cells in source degree {n} and target degree {n + degree}")
            try:
                comps[n] = parse_projmap(alg, src, tgt, rest, len(key) + 1)
            except _Issue as exc:
                raise line.error(str(exc), exc.offset) from None
        return comps

    def _on_tasks(self, line: _Line) -> None:
        self._algebra(line)
        try:
            argv = shlex.split(line.text)
        except ValueError as exc:
            raise line.error(str(exc)) from None
        if argv[0] == "algebra-info":
            argv[0] = "info"
        self.tasks.append(Task(line.number, argv))


def _graded(x: ProjComplex, y: ProjComplex, comps: Dict[int, ProjMap], degree: int) -> GradedMap:
    if degree == 0:
        return ChainMap(x, y, comps)
    if degree == -1:
        return Homotopy(x, y, comps)
    return GradedMap(x, y, comps, degree)


def parse_problem(text: str, source: str = "<string>", field: Optional[Field] = None,
                  algebra: Optional[BasicAlgebra] = None) -> ProblemFile:
    """Parse a problem file. `field` beats ARTRI_FIELD beats the file's [field]; `algebra` reuses a built algebra."""
    return _Parser(text, source, field, algebra).run()


def load_problem(path, field: Optional[Field] = None) -> ProblemFile:
    p = FsPath(path)
    return parse_problem(p.read_text(encoding="utf-8"), source=str(p), field=field)


# ═══════════════════════════════════════════════════════════════
# Writer
# ═══════════════════════════════════════════════════════════════

def serialize_complex(x: ProjComplex, name: str) -> str:
    lines = [f"{name} = complex"]
    for n, c in x.cells.items():
        lines.append(f"  cell {n}: {' '.join(c)}")
    for n, d in x.diffs.items():
        if not d.is_zero():
            lines.append(f"  d {n}: {format_projmap(d)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_map(f: GradedMap, name: str, source: str, target: str) -> str:
    head = f"{name} = map {source} -> {target}"
    if f.degree:
        head += f" degree {f.degree}"
    lines = [head]
    for n, c in f.comps.items():
        if not c.is_zero():
            lines.append(f"  {n}: {format_projmap(c)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_algebra(alg: BasicAlgebra) -> str:
    q = alg.quiver
    lines = ["[field]", alg.field.name, "", "[quiver]", "vertices " + " ".join(q.vertices)]
    lines += [f"{a.name}: {a.source} -> {a.target}" for a in q.arrows]
    if alg.relations:
        lines += ["", "[relations]"]
        lines += [_format_terms(alg.field, r.terms) for r in alg.relations]
    return "\n".join(lines) + "\n"


def dump_problem(pf: ProblemFile) -> str:
    """Text that parses back to an equivalent ProblemFile (modules written out explicitly)."""
    parts = []
    if pf.meta:
        parts.append("[meta]\n" + "".join(f"{k} = {v}\n" for k, v in pf.meta.items()))
    parts.append(serialize_algebra(pf.algebra))
    if pf.modules:
        parts.append("[modules]\n" + "".join(serialize_module(m, n) for n, m in pf.modules.items()))
    if pf.complexes:
        parts.append("[complexes]\n" + "".join(serialize_complex(x, n) for n, x in pf.complexes.items()))
    if pf.maps:
        parts.append("[maps]\n" + "".join(serialize_map(f, n, *pf.map_ends[n]) for n, f in pf.maps.items()))
    if pf.tasks:
        parts.append("[tasks]\n" + "".join(f"{t}\n" for t in pf.tasks))
    return "\n".join(parts)


def roundtrip(x: Union[ProjComplex, GradedMap]) -> Union[ProjComplex, GradedMap]:
    """Serialize, then parse against the same algebra."""
    alg = x.alg
    if isinstance(x, ProjComplex):
        pf = parse_problem("[complexes]\n" + serialize_complex(x, "X"), algebra=alg)
        return pf.complexes["X"]
    text = ("[complexes]\n" + serialize_complex(x.source, "S") + serialize_complex(x.target, "T")
            + "[maps]\n" + serialize_map(x, "f", "S", "T"))
    return parse_problem(text, algebra=alg).maps["f"]
