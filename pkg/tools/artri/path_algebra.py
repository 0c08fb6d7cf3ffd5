"""
Path algebras with relations
============================
Builds the finite-dimensional basic algebra Λ = kQ/I from a quiver and
admissible relations, and carries the matrices of algebra elements that every
complex of projectives is made of.

Conventions (see docs/conventions.md):
  - paths compose left to right: "a b" means a first, then b;
  - right modules, P_i = e_i Λ (spanned by paths starting at i);
  - Hom(P_i, P_j) = e_j Λ e_i (paths j -> i), acting by left multiplication;
  - a ProjMap entry [r][c] lives in e_{target[r]} Λ e_{source[c]}.

Usage:
  from tools.artri.path_algebra import Quiver, Arrow, Relation, build_algebra
  q = Quiver(["1", "2", "3"], [Arrow("a", "2", "1"), Arrow("b", "3", "2")])
  alg = build_algebra(q, [])
  alg.dimension                      # 6
  alg.multiply(alg.arrow("b"), alg.arrow("a"))
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from . import config
from .errors import (DimensionMismatchError, FieldMismatchError, InadmissibleRelationError,
                     NotFiniteDimensionalError, PreconditionError)
from .linalg import Field, Matrix, rref, solve_vector

logger = logging.getLogger("artri.path_algebra")


# ═══════════════════════════════════════════════════════════════
# Quivers and paths
# ═══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


class Quiver:
    """Finite quiver with labelled vertices and uniquely named arrows."""

    def __init__(self, vertices: Sequence, arrows: Sequence[Arrow]):
        self.vertices: Tuple[str, ...] = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise PreconditionError("duplicate vertex label")
        self.arrows: Tuple[Arrow, ...] = tuple(Arrow(a.name, str(a.source), str(a.target)) for a in arrows)
        self._by_name: Dict[str, Arrow] = {}
        for a in self.arrows:
            if a.name in self._by_name:
                raise PreconditionError(f"duplicate arrow name {a.name!r}")
            if a.source not in self.vertices or a.target not in self.vertices:
                raise PreconditionError(f"arrow {a.name!r} has an unknown endpoint")
            if a.name == "e":
                raise PreconditionError("'e' is reserved for trivial paths")
            self._by_name[a.name] = a
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.graph = nx.MultiDiGraph()
        self.graph.add_nodes_from(self.vertices)
        for a in self.arrows:
            self.graph.add_edge(a.source, a.target, key=a.name)

    def arrow(self, name: str) -> Arrow:
        try:
            return self._by_name[name]
        except KeyError:
            raise PreconditionError(f"unknown arrow {name!r}") from None

    def has_arrow(self, name: str) -> bool:
        return name in self._by_name

    def out_arrows(self, v: str) -> List[Arrow]:
        return [a for a in self.arrows if a.source == v]

    def in_arrows(self, v: str) -> List[Arrow]:
        return [a for a in self.arrows if a.target == v]

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph)

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, [Arrow(a.name, a.target, a.source) for a in self.arrows])

    def describe(self) -> str:
        arrows = ", ".join(f"{a.name}:{a.source}->{a.target}" for a in self.arrows)
        return f"vertices {' '.join(self.vertices)}; arrows {arrows or '-'}"


@dataclass(frozen=True, order=True)
class Path:
    """Trivial path at a vertex (arrows == ()) or a composable arrow sequence, read left to right."""

    source: str
    target: str
    arrows: Tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return len(self.arrows)

    @classmethod
    def trivial(cls, v: str) -> "Path":
        return cls(str(v), str(v), ())

    @classmethod
    def of(cls, quiver: Quiver, names: Sequence[str]) -> "Path":
        if not names:
            raise PreconditionError("empty arrow sequence; use Path.trivial")
        arrows = [quiver.arrow(n) for n in names]
        for x, y in zip(arrows, arrows[1:]):
            if x.target != y.source:
                raise PreconditionError(f"arrows {x.name} and {y.name} do not compose")
        return cls(arrows[0].source, arrows[-1].target, tuple(names))

    def then(self, other: "Path") -> Optional["Path"]:
        if self.target != other.source:
            return None
        return Path(self.source, other.target, self.arrows + other.arrows)

    def reversed(self) -> "Path":
        return Path(self.target, self.source, tuple(reversed(self.arrows)))

    def label(self) -> str:
        return " ".join(self.arrows) if self.arrows else f"e{self.source}"

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class Relation:
    """Linear combination of parallel paths."""

    terms: Tuple[Tuple[object, Path], ...]

    @property
    def source(self) -> str:
        return self.terms[0][1].source

    @property
    def target(self) -> str:
        return self.terms[0][1].target

    @property
    def min_length(self) -> int:
        return min(p.length for _, p in self.terms)

    def reversed(self) -> "Relation":
        return Relation(tuple((c, p.reversed()) for c, p in self.terms))

    def validate(self) -> None:
        if not self.terms:
            raise InadmissibleRelationError("empty relation")
        s, t = self.source, self.target
        for _, p in self.terms:
            if p.length < 2:
                raise InadmissibleRelationError(f"relation term {p.label()!r} has length {p.length} < 2")
            if p.source != s or p.target != t:
                raise InadmissibleRelationError(f"relation terms are not parallel ({p.label()!r})")


def relation(quiver: Quiver, *terms: Tuple[object, Sequence[str]]) -> Relation:
    """relation(q, (1, ["a", "b"]), (-1, ["c", "d"]))"""
    rel = Relation(tuple((c, Path.of(quiver, names)) for c, names in terms))
    rel.validate()
    return rel


def _paths_by_length(quiver: Quiver, max_len: int) -> List[List[Path]]:
    layers = [[Path.trivial(v) for v in quiver.vertices]]
    for _ in range(max_len):
        nxt = []
        for p in layers[-1]:
            for a in quiver.out_arrows(p.target):
                nxt.append(Path(p.source, a.target, p.arrows + (a.name,)))
        layers.append(nxt)
    return layers


# ═══════════════════════════════════════════════════════════════
# The algebra
# ═══════════════════════════════════════════════════════════════

class AlgebraElement:
    """Dense coordinate vector on the path basis of a BasicAlgebra."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg: "BasicAlgebra", coeffs: Sequence):
        self.alg = alg
        self.coeffs = tuple(coeffs)

    def _check(self, other: "AlgebraElement") -> None:
        if other.alg is not self.alg:
            if other.alg.field != self.alg.field:
                raise FieldMismatchError("elements over different fields")
            raise PreconditionError("elements of different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.alg, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.alg, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.alg, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.alg.multiply(self, other)
        c = self.alg.field(other)
        return AlgebraElement(self.alg, [c * a for a in self.coeffs])

    def __rmul__(self, other):
        c = self.alg.field(other)
        return AlgebraElement(self.alg, [c * a for a in self.coeffs])

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and other.alg is self.alg and other.coeffs == self.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def terms(self) -> List[Tuple[object, Path]]:
        return [(c, self.alg.basis[i]) for i, c in enumerate(self.coeffs) if c != 0]

    def scalar_part(self):
        """Sum of coefficients on trivial paths (meaningful inside e_v Λ e_v)."""
        f = self.alg.field
        return sum((self.coeffs[i] for i in self.alg.trivial_indices), f.zero)

    def is_radical(self) -> bool:
        return all(self.coeffs[i] == 0 for i in self.alg.trivial_indices)

    def low_degree(self) -> Optional[int]:
        lengths = [self.alg.basis[i].length for i, c in enumerate(self.coeffs) if c != 0]
        return min(lengths) if lengths else None

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        f = self.alg.field
        return " + ".join(f"{f.format(c)}*{p.label()}" for c, p in self.terms())


class BasicAlgebra:
    """Finite-dimensional kQ/I with a path basis and a full multiplication table."""

    def __init__(self, field: Field, quiver: Quiver, relations: Sequence[Relation], max_len: int,
                 basis: List[Path], normal_forms: Dict[Path, Dict[int, object]], nilpotency: int):
        self.field = field
        self.quiver = quiver
        self.relations = tuple(relations)
        self.max_len = max_len
        self.basis: Tuple[Path, ...] = tuple(basis)
        self.nilpotency = nilpotency
        self._nf = normal_forms
        self._index = {p: i for i, p in enumerate(self.basis)}
        self.trivial_indices = tuple(self._index[Path.trivial(v)] for v in quiver.vertices)
        self._blocks: Dict[Tuple[str, str], Tuple[int, ...]] = {}
        for i, p in enumerate(self.basis):
            self._blocks.setdefault((p.source, p.target), ())
            self._blocks[(p.source, p.target)] += (i,)
        self._table: Dict[Tuple[int, int], Tuple[Tuple[int, object], ...]] = {}
        for i, p in enumerate(self.basis):
            for j, q in enumerate(self.basis):
                pq = p.then(q)
                if pq is not None:
                    self._table[(i, j)] = tuple(self._normal_form(pq).items())
        self._opposite: Optional["BasicAlgebra"] = None
        self.certificate = {
            "nilpotency_bound": nilpotency,
            "max_len": max_len,
            "dimension": len(self.basis),
        }

    # -- basics ----------------------------------------------------------
    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.quiver.vertices

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.field.name.encode())
        h.update(self.quiver.describe().encode())
        for r in self.relations:
            h.update(" + ".join(f"{self.field.format(self.field(c))}*{p.label()}" for c, p in r.terms).encode())
            h.update(b";")
        return h.hexdigest()[:16]

    def _normal_form(self, p: Path) -> Dict[int, object]:
        if p.length >= self.nilpotency:
            return {}
        return self._nf.get(p, {})

    # -- elements --------------------------------------------------------
    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, [self.field.zero] * self.dimension)

    def _from_dict(self, d: Dict[int, object]) -> AlgebraElement:
        coeffs = [self.field.zero] * self.dimension
        for i, c in d.items():
            coeffs[i] = coeffs[i] + c
        return AlgebraElement(self, coeffs)

    def path_element(self, p: Path) -> AlgebraElement:
        """Normal form of an arbitrary path of the quiver."""
        return self._from_dict(self._normal_form(p))

    def e(self, v) -> AlgebraElement:
        return self.path_element(Path.trivial(str(v)))

    def arrow(self, name: str) -> AlgebraElement:
        return self.path_element(Path.of(self.quiver, [name]))

    def path(self, *names: str) -> AlgebraElement:
        return self.path_element(Path.of(self.quiver, list(names)))

    def element(self, terms: Iterable[Tuple[object, Path]]) -> AlgebraElement:
        out = self.zero()
        for c, p in terms:
            out = out + self.field(c) * self.path_element(p)
        return out

    def basis_element(self, i: int) -> AlgebraElement:
        coeffs = [self.field.zero] * self.dimension
        coeffs[i] = self.field.one
        return AlgebraElement(self, coeffs)

    def multiply(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        x._check(y)
        out = [self.field.zero] * self.dimension
        xs = [(i, a) for i, a in enumerate(x.coeffs) if a != 0]
        ys = [(j, b) for j, b in enumerate(y.coeffs) if b != 0]
        for i, a in xs:
            for j, b in ys:
                for k, c in self._table.get((i, j), ()):
                    out[k] = out[k] + a * b * c
        return AlgebraElement(self, out)

    # -- Hom spaces between indecomposable projectives -------------------
    def block(self, s: str, t: str) -> Tuple[int, ...]:
        """Basis indices of paths from s to t, i.e. of e_s Λ e_t."""
        return self._blocks.get((str(s), str(t)), ())

    def hom_proj(self, i, j) -> List[AlgebraElement]:
        """Basis of Hom(P_i, P_j) = e_j Λ e_i."""
        return [self.basis_element(k) for k in self.block(j, i)]

    def radical_layer(self, n: int) -> Tuple[int, ...]:
        """Basis indices spanning rad^n."""
        return tuple(i for i, p in enumerate(self.basis) if p.length >= n)

    def is_arrow_class(self, f: AlgebraElement) -> bool:
        lengths = [self.basis[i].length for i, c in enumerate(f.coeffs) if c != 0]
        return bool(lengths) and 0 not in lengths and 1 in lengths

    def in_block(self, x: AlgebraElement, s: str, t: str) -> bool:
        allowed = set(self.block(s, t))
        return all(c == 0 or i in allowed for i, c in enumerate(x.coeffs))

    # -- opposite algebra --------------------------------------------------
    def opposite(self) -> "BasicAlgebra":
        if self._opposite is None:
            op = build_algebra(self.quiver.opposite(), [r.reversed() for r in self.relations],
                               max_len=self.max_len, field=self.field)
            op._opposite = self
            self._opposite = op
        return self._opposite

    def to_opposite(self, x: AlgebraElement) -> AlgebraElement:
        op = self.opposite()
        out = op.zero()
        for c, p in x.terms():
            out = out + c * op.path_element(p.reversed())
        return out

    def __repr__(self) -> str:
        return f"BasicAlgebra(dim={self.dimension}, {self.quiver.describe()}, {len(self.relations)} relations)"


def build_algebra(q: Quiver, rels: Sequence[Relation], max_len: Optional[int] = None,
                  field: Optional[Field] = None) -> BasicAlgebra:
    """Graded fixpoint: find L with every length-L path in the ideal modulo longer paths."""
    field = field or Field.rationals()
    max_len = max_len or config.MAX_PATH_LEN
    rels = list(rels)
    for r in rels:
        r.validate()
        for c, _ in r.terms:
            field(c)
    for L in range(1, max_len + 1):
        layers = _paths_by_length(q, L)
        columns: List[Path] = []
        for layer in layers:
            columns.extend(sorted(layer, key=lambda p: (q.index[p.source], p.arrows)))
        col_of = {p: i for i, p in enumerate(columns)}
        rows = []
        for r in rels:
            m = r.min_length
            if m > L:
                continue
            for lu in range(0, L - m + 1):
                for u in layers[lu]:
                    if u.target != r.source:
                        continue
                    for lv in range(0, L - m - lu + 1):
                        for v in layers[lv]:
                            if v.source != r.target:
                                continue
                            row = [field.zero] * len(columns)
                            for c, p in r.terms:
                                full = Path(u.source, v.target, u.arrows + p.arrows + v.arrows)
                                if full.length <= L:
                                    row[col_of[full]] += field(c)
                            if any(x != 0 for x in row):
                                rows.append(row)
        if rows:
            red, pivots, _ = rref(Matrix(field, rows, len(rows), len(columns)))
        else:
            red, pivots = None, []
        pivot_set = set(pivots)
        free = [j for j in range(len(columns)) if j not in pivot_set]
        if any(columns[j].length == L for j in free):
            logger.debug("level %d: %d length-%d paths survive", L,
                         sum(1 for j in free if columns[j].length == L), L)
            continue
        basis = [columns[j] for j in free]
        basis.sort(key=lambda p: (p.length, q.index[p.source], q.index[p.target], p.arrows))
        bidx = {p: i for i, p in enumerate(basis)}
        nf: Dict[Path, Dict[int, object]] = {}
        for j, p in enumerate(columns):
            if j in pivot_set:
                r = pivots.index(j)
                nf[p] = {bidx[columns[k]]: -red[r, k] for k in free if red[r, k] != 0}
            else:
                nf[p] = {bidx[p]: field.one}
        alg = BasicAlgebra(field, q, rels, max_len, basis, nf, L)
        logger.info("built algebra: dim %d, nilpotency bound %d", alg.dimension, L)
        return alg
    raise NotFiniteDimensionalError(f"no nilpotency bound L <= {max_len}: algebra not finite-dimensional "
                                    f"within max_len")


# ═══════════════════════════════════════════════════════════════
# Matrices of algebra elements between sums of projectives
# ═══════════════════════════════════════════════════════════════

class ProjMap:
    """Map ⊕P_{source[c]} -> ⊕P_{target[r]}; entry [r][c] in e_{target[r]} Λ e_{source[c]}."""

    __slots__ = ("alg", "source", "target", "entries")

    def __init__(self, alg: BasicAlgebra, source: Sequence[str], target: Sequence[str],
                 entries: Sequence[Sequence[AlgebraElement]]):
        self.alg = alg
        self.source = tuple(source)
        self.target = tuple(target)
        self.entries: Tuple[Tuple[AlgebraElement, ...], ...] = tuple(tuple(r) for r in entries)
        if len(self.entries) != len(self.target) or any(len(r) != len(self.source) for r in self.entries):
            raise DimensionMismatchError(f"ProjMap entries do not match {len(self.target)}x{len(self.source)}")

    @classmethod
    def zero(cls, alg: BasicAlgebra, source: Sequence[str], target: Sequence[str]) -> "ProjMap":
        z = alg.zero()
        return cls(alg, source, target, [[z] * len(source) for _ in target])

    @classmethod
    def identity(cls, alg: BasicAlgebra, cells: Sequence[str]) -> "ProjMap":
        z = alg.zero()
        return cls(alg, cells, cells, [[alg.e(v) if r == c else z for c in range(len(cells))]
                                       for r, v in enumerate(cells)])

    @classmethod
    def from_terms(cls, alg: BasicAlgebra, source: Sequence[str], target: Sequence[str],
                   terms: Dict[Tuple[int, int], AlgebraElement]) -> "ProjMap":
        z = alg.zero()
        rows = [[terms.get((r, c), z) for c in range(len(source))] for r in range(len(target))]
        return cls(alg, source, target, rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.target), len(self.source)

    def __getitem__(self, rc) -> AlgebraElement:
        r, c = rc
        return self.entries[r][c]

    def validate(self) -> None:
        for r, t in enumerate(self.target):
            for c, s in enumerate(self.source):
                if not self.alg.in_block(self.entries[r][c], t, s):
                    raise PreconditionError(f"entry ({r},{c}) is not in e_{t} Λ e_{s}")

    # -- algebra -----------------------------------------------------------
    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        """self ∘ other."""
        if other.target != self.source:
            raise DimensionMismatchError(f"compose: {other.target} vs {self.source}")
        z = self.alg.zero()
        rows = []
        for r in range(len(self.target)):
            row = []
            for c in range(len(other.source)):
                acc = z
                for k in range(len(self.source)):
                    a = self.entries[r][k]
                    if a.is_zero():
                        continue
                    b = other.entries[k][c]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return ProjMap(self.alg, other.source, self.target, rows)

    def _same_shape(self, other: "ProjMap") -> None:
        if self.source != other.source or self.target != other.target:
            raise DimensionMismatchError("ProjMap shapes differ")

    def __add__(self, other: "ProjMap") -> "ProjMap":
        self._same_shape(other)
        return ProjMap(self.alg, self.source, self.target,
                       [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "ProjMap") -> "ProjMap":
        return self + (-other)

    def __neg__(self) -> "ProjMap":
        return ProjMap(self.alg, self.source, self.target, [[-a for a in r] for r in self.entries])

    def scale(self, c) -> "ProjMap":
        return ProjMap(self.alg, self.source, self.target, [[a * c for a in r] for r in self.entries])

    def __eq__(self, other) -> bool:
        return (isinstance(other, ProjMap) and other.alg is self.alg and self.source == other.source
                and self.target == other.target and self.entries == other.entries)

    def __hash__(self):
        return hash((self.source, self.target, self.entries))

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.entries for a in r)

    def is_radical(self) -> bool:
        return all(a.is_radical() for r in self.entries for a in r)

    # -- blocks ------------------------------------------------------------
    def restrict(self, rows: Sequence[int], cols: Sequence[int]) -> "ProjMap":
        return ProjMap(self.alg, [self.source[c] for c in cols], [self.target[r] for r in rows],
                       [[self.entries[r][c] for c in cols] for r in rows])

    @staticmethod
    def hstack(alg: BasicAlgebra, target: Sequence[str], blocks: Sequence["ProjMap"]) -> "ProjMap":
        rows = [[] for _ in target]
        source: List[str] = []
        for b in blocks:
            if b.target != tuple(target):
                raise DimensionMismatchError("hstack target mismatch")
            source.extend(b.source)
            for r in range(len(target)):
                rows[r].extend(b.entries[r])
        return ProjMap(alg, source, target, rows)

    @staticmethod
    def vstack(alg: BasicAlgebra, source: Sequence[str], blocks: Sequence["ProjMap"]) -> "ProjMap":
        rows: List[Sequence[AlgebraElement]] = []
        target: List[str] = []
        for b in blocks:
            if b.source != tuple(source):
                raise DimensionMismatchError("vstack source mismatch")
            target.extend(b.target)
            rows.extend(b.entries)
        return ProjMap(alg, source, target, rows)

    @staticmethod
    def block_matrix(alg: BasicAlgebra, row_cells: Sequence[Sequence[str]], col_cells: Sequence[Sequence[str]],
                     blocks: Dict[Tuple[int, int], "ProjMap"]) -> "ProjMap":
        """Assemble from a sparse grid of blocks; missing blocks are zero."""
        target = [v for cells in row_cells for v in cells]
        source = [v for cells in col_cells for v in cells]
        z = alg.zero()
        rows = [[z] * len(source) for _ in target]
        r0 = 0
        for bi, rc in enumerate(row_cells):
            c0 = 0
            for bj, cc in enumerate(col_cells):
                b = blocks.get((bi, bj))
                if b is not None:
                    if b.target != tuple(rc) or b.source != tuple(cc):
                        raise DimensionMismatchError(f"block ({bi},{bj}) has the wrong cells")
                    for r in range(len(rc)):
                        for c in range(len(cc)):
                            rows[r0 + r][c0 + c] = b.entries[r][c]
                c0 += len(cc)
            r0 += len(rc)
        return ProjMap(alg, source, target, rows)

    # -- linear shadows ------------------------------------------------------
    def scalar_matrix(self) -> Matrix:
        """Scalar parts: the map modulo the radical, as a field matrix."""
        f = self.alg.field
        rows = [[self.entries[r][c].scalar_part() if self.target[r] == self.source[c] else f.zero
                 for c in range(len(self.source))] for r in range(len(self.target))]
        return Matrix(f, rows, len(self.target), len(self.source))

    def at_vertex(self, w: str) -> Matrix:
        """Linear map on the vertex-w spaces: P_s at w has basis e_s Λ e_w, acted on by left multiplication."""
        alg = self.alg
        f = alg.field
        src_blocks = [alg.block(s, w) for s in self.source]
        tgt_blocks = [alg.block(t, w) for t in self.target]
        nrows = sum(len(b) for b in tgt_blocks)
        ncols = sum(len(b) for b in src_blocks)
        rows = [[f.zero] * ncols for _ in range(nrows)]
        c0 = 0
        for c, sb in enumerate(src_blocks):
            for jj, j in enumerate(sb):
                x = alg.basis_element(j)
                r0 = 0
                for r, tb in enumerate(tgt_blocks):
                    a = self.entries[r][c]
                    if not a.is_zero():
                        y = a * x
                        for ii, i in enumerate(tb):
                            rows[r0 + ii][c0 + jj] = y.coeffs[i]
                    r0 += len(tb)
            c0 += len(sb)
        return Matrix(f, rows, nrows, ncols)

    def transpose_op(self) -> "ProjMap":
        """Hom(-, Λ) of this map, as a map over the opposite algebra."""
        op = self.alg.opposite()
        return ProjMap(op, self.target, self.source,
                       [[self.alg.to_opposite(self.entries[r][c]) for r in range(len(self.target))]
                        for c in range(len(self.source))])

    def __repr__(self) -> str:
        return f"ProjMap({list(self.source)} -> {list(self.target)})"


def column_vector(pm: ProjMap, c: int) -> List:
    """Image of the generator of source summand c, as a vector of the target at vertex source[c]."""
    w = pm.source[c]
    out = []
    for r, t in enumerate(pm.target):
        x = pm.entries[r][c]
        out.extend(x.coeffs[i] for i in pm.alg.block(t, w))
    return out


def column_from_vector(alg: BasicAlgebra, cells: Sequence[str], w: str, vec: Sequence) -> List[AlgebraElement]:
    """Inverse of column_vector: split a vertex-w vector of ⊕P_cells into per-summand elements."""
    out = []
    pos = 0
    for t in cells:
        idx = alg.block(t, w)
        coeffs = [alg.field.zero] * alg.dimension
        for k, i in enumerate(idx):
            coeffs[i] = vec[pos + k]
        pos += len(idx)
        out.append(AlgebraElement(alg, coeffs))
    if pos != len(vec):
        raise DimensionMismatchError("vector length does not match the cells")
    return out


def factor_through(g: ProjMap, h: ProjMap) -> Optional[ProjMap]:
    """Some X with g ∘ X = h (X: source(h) -> source(g)), or None."""
    alg = g.alg
    if g.target != h.target:
        raise DimensionMismatchError("factor_through: targets differ")
    cols = []
    for c, w in enumerate(h.source):
        y = solve_vector(g.at_vertex(w), column_vector(h, c))
        if y is None:
            return None
        cols.append(column_from_vector(alg, g.source, w, y))
    rows = [[cols[c][r] for c in range(len(h.source))] for r in range(len(g.source))]
    return ProjMap(alg, h.source, g.source, rows)
