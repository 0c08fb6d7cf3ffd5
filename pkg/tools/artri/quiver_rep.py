"""
Quiver representations
======================
Finite-dimensional right modules over a BasicAlgebra, with Hom-spaces, tops,
projective covers, minimal projective resolutions and the module-level AR
translate (DTr / TrD).

An arrow a: s -> t acts by a matrix M_a of shape dim_t x dim_s; a path
a1 ... an acts by M_an ... M_a1. Duality D transposes every matrix and lands
over the opposite algebra.

Usage:
  from tools.artri.quiver_rep import standard_module, resolve, ar_translate_mod
  s2 = standard_module(alg, "simple", "2")
  res = resolve(s2)
  res.complex                 # ProjComplex with P_0 in degree 0
  ar_translate_mod(s2, "tau_inv")
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import config
from .complexes import ProjComplex
from .errors import (DimensionMismatchError, InfiniteGlobalDimensionError, PreconditionError,
                     ResolutionTooLongError)
from .linalg import Matrix, is_invertible, kernel, rref, solve
from .path_algebra import (AlgebraElement, BasicAlgebra, Path, ProjMap, column_from_vector)

logger = logging.getLogger("artri.quiver_rep")


# ═══════════════════════════════════════════════════════════════
# Representations and morphisms
# ═══════════════════════════════════════════════════════════════

class Representation:
    def __init__(self, alg: BasicAlgebra, dims: Dict[str, int], maps: Dict[str, Matrix], name: str = ""):
        self.alg = alg
        self.dims = {v: int(dims.get(v, 0)) for v in alg.vertices}
        self.maps: Dict[str, Matrix] = {}
        f = alg.field
        for a in alg.quiver.arrows:
            m = maps.get(a.name)
            if m is None:
                m = Matrix.zeros(f, self.dims[a.target], self.dims[a.source])
            if m.shape != (self.dims[a.target], self.dims[a.source]):
                raise DimensionMismatchError(f"arrow {a.name}: matrix {m.shape} vs dims "
                                             f"{self.dims[a.target]}x{self.dims[a.source]}")
            self.maps[a.name] = m
        self.name = name

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dim_vector(self) -> Tuple[int, ...]:
        return tuple(self.dims[v] for v in self.alg.vertices)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def path_action(self, p: Path) -> Matrix:
        m = Matrix.identity(self.alg.field, self.dims[p.source])
        for name in p.arrows:
            m = self.maps[name] @ m
        return m

    def element_action(self, x: AlgebraElement, s: str, t: str) -> Matrix:
        """Action of x ∈ e_s Λ e_t as a map M_s -> M_t."""
        out = Matrix.zeros(self.alg.field, self.dims[t], self.dims[s])
        for c, p in x.terms():
            if p.source == s and p.target == t:
                out = out + self.path_action(p).scale(c)
        return out

    def check_relations(self) -> bool:
        for r in self.alg.relations:
            acc = Matrix.zeros(self.alg.field, self.dims[r.target], self.dims[r.source])
            for c, p in r.terms:
                acc = acc + self.path_action(p).scale(self.alg.field(c))
            if not acc.is_zero():
                return False
        return True

    def dual(self) -> "Representation":
        """D = Hom_k(-, k): a representation over the opposite algebra."""
        op = self.alg.opposite()
        return Representation(op, dict(self.dims), {a: m.transpose() for a, m in self.maps.items()},
                              name=f"D({self.name})" if self.name else "")

    def __repr__(self) -> str:
        return f"Representation({self.name or '?'}, dims={self.dim_vector()})"


class RepMorphism:
    def __init__(self, source: Representation, target: Representation, maps: Dict[str, Matrix]):
        self.source = source
        self.target = target
        f = source.alg.field
        self.maps = {v: maps.get(v) if maps.get(v) is not None else Matrix.zeros(f, target.dims[v], source.dims[v])
                     for v in source.alg.vertices}

    def is_morphism(self) -> bool:
        for a in self.source.alg.quiver.arrows:
            lhs = self.target.maps[a.name] @ self.maps[a.source]
            rhs = self.maps[a.target] @ self.source.maps[a.name]
            if lhs != rhs:
                return False
        return True

    def compose(self, other: "RepMorphism") -> "RepMorphism":
        """self ∘ other."""
        return RepMorphism(other.source, self.target, {v: self.maps[v] @ other.maps[v] for v in self.maps})

    def __add__(self, other: "RepMorphism") -> "RepMorphism":
        return RepMorphism(self.source, self.target, {v: self.maps[v] + other.maps[v] for v in self.maps})

    def scale(self, c) -> "RepMorphism":
        return RepMorphism(self.source, self.target, {v: m.scale(c) for v, m in self.maps.items()})

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.maps.values())

    def is_iso(self) -> bool:
        return all(is_invertible(m) if m.nrows or m.ncols else True for m in self.maps.values())


def identity_morphism(m: Representation) -> RepMorphism:
    return RepMorphism(m, m, {v: Matrix.identity(m.alg.field, m.dims[v]) for v in m.alg.vertices})


def direct_sum_rep(alg: BasicAlgebra, reps: Sequence[Representation]) -> Representation:
    f = alg.field
    dims = {v: sum(r.dims[v] for r in reps) for v in alg.vertices}
    maps = {}
    for a in alg.quiver.arrows:
        rows = [[f.zero] * dims[a.source] for _ in range(dims[a.target])]
        r0 = c0 = 0
        for r in reps:
            m = r.maps[a.name]
            for i in range(m.nrows):
                for j in range(m.ncols):
                    rows[r0 + i][c0 + j] = m[i, j]
            r0 += m.nrows
            c0 += m.ncols
        maps[a.name] = Matrix(f, rows, dims[a.target], dims[a.source])
    return Representation(alg, dims, maps)


# ═══════════════════════════════════════════════════════════════
# Standard modules
# ═══════════════════════════════════════════════════════════════

def _projective(alg: BasicAlgebra, i: str) -> Representation:
    f = alg.field
    dims = {v: len(alg.block(i, v)) for v in alg.vertices}
    maps = {}
    for a in alg.quiver.arrows:
        src = alg.block(i, a.source)
        tgt = alg.block(i, a.target)
        arrow = alg.arrow(a.name)
        cols = []
        for k in src:
            y = alg.basis_element(k) * arrow
            cols.append([y.coeffs[t] for t in tgt])
        maps[a.name] = Matrix.from_columns(f, cols, len(tgt)) if cols else Matrix.zeros(f, len(tgt), 0)
    return Representation(alg, dims, maps, name=f"P{i}")


def standard_module(alg: BasicAlgebra, kind: str, i) -> Representation:
    i = str(i)
    if i not in alg.vertices:
        raise PreconditionError(f"unknown vertex {i!r}")
    kind = kind.lower()
    if kind in ("simple", "s"):
        return Representation(alg, {i: 1}, {}, name=f"S{i}")
    if kind in ("projective", "p"):
        return _projective(alg, i)
    if kind in ("injective", "i"):
        rep = _projective(alg.opposite(), i).dual()
        rep.name = f"I{i}"
        return rep
    raise PreconditionError(f"unknown module kind {kind!r}")


# ═══════════════════════════════════════════════════════════════
# Hom, radical, top
# ═══════════════════════════════════════════════════════════════

def hom_rep(m: Representation, n: Representation) -> List[RepMorphism]:
    """Basis of Hom(M, N) from the commutation equations."""
    alg = m.alg
    f = alg.field
    offsets = {}
    pos = 0
    for v in alg.vertices:
        offsets[v] = pos
        pos += n.dims[v] * m.dims[v]
    nvars = pos
    if nvars == 0:
        return []
    eqs = []
    for a in alg.quiver.arrows:
        s, t = a.source, a.target
        ma, na = m.maps[a.name], n.maps[a.name]
        # (N_a X_s - X_t M_a)[r][c] = 0
        for r in range(n.dims[t]):
            for c in range(m.dims[s]):
                row = [f.zero] * nvars
                for k in range(n.dims[s]):
                    coef = na[r, k]
                    if coef != 0:
                        row[offsets[s] + k * m.dims[s] + c] += coef
                for k in range(m.dims[t]):
                    coef = ma[k, c]
                    if coef != 0:
                        row[offsets[t] + r * m.dims[t] + k] -= coef
                eqs.append(row)
    system = Matrix(f, eqs, len(eqs), nvars) if eqs else Matrix.zeros(f, 0, nvars)
    ker = kernel(system)
    out = []
    for j in range(ker.ncols):
        col = ker.col(j)
        maps = {}
        for v in alg.vertices:
            rows = [[col[offsets[v] + r * m.dims[v] + c] for c in range(m.dims[v])] for r in range(n.dims[v])]
            maps[v] = Matrix(f, rows, n.dims[v], m.dims[v])
        out.append(RepMorphism(m, n, maps))
    return out


def _column_space(field, mats: Sequence[Matrix], n: int) -> List[List]:
    cols = [list(c) for mat in mats for c in mat.columns()]
    if not cols:
        return []
    red, pivots, _ = rref(Matrix.from_columns(field, cols, n).transpose())
    return [list(red.row(k)) for k in range(len(pivots))]


def _complement(field, sub: List[List], n: int) -> List[List]:
    """Standard basis vectors completing `sub` to a basis of k^n."""
    ident = [[field.one if i == j else field.zero for i in range(n)] for j in range(n)]
    cols = sub + ident
    _, pivots, _ = rref(Matrix.from_columns(field, cols, n)) if cols else (None, [], 0)
    return [ident[p - len(sub)] for p in pivots if p >= len(sub)]


def _subrep(m: Representation, bases: Dict[str, List[List]]) -> Tuple[Representation, RepMorphism]:
    """Subrepresentation spanned by the given vertex bases (assumed arrow-stable), with its inclusion."""
    alg = m.alg
    f = alg.field
    dims = {v: len(bases[v]) for v in alg.vertices}
    incl = {v: (Matrix.from_columns(f, bases[v], m.dims[v]) if bases[v] else Matrix.zeros(f, m.dims[v], 0))
            for v in alg.vertices}
    maps = {}
    for a in alg.quiver.arrows:
        image = m.maps[a.name] @ incl[a.source]
        x = solve(incl[a.target], image) if image.ncols else Matrix.zeros(f, dims[a.target], 0)
        if x is None:
            raise PreconditionError(f"subspace not stable under arrow {a.name}")
        maps[a.name] = x
    sub = Representation(alg, dims, maps)
    return sub, RepMorphism(sub, m, incl)


def top_and_radical(m: Representation) -> Tuple[Dict[str, int], Representation, RepMorphism]:
    """Top multiplicities per vertex, rad M as a subrepresentation, and its inclusion."""
    alg = m.alg
    f = alg.field
    rad_bases = {}
    for v in alg.vertices:
        rad_bases[v] = _column_space(f, [m.maps[a.name] for a in alg.quiver.in_arrows(v)], m.dims[v])
    top = {v: m.dims[v] - len(rad_bases[v]) for v in alg.vertices}
    rad, incl = _subrep(m, rad_bases)
    return top, rad, incl


# ═══════════════════════════════════════════════════════════════
# Covers and resolutions
# ═══════════════════════════════════════════════════════════════

@dataclass
class Cover:
    cells: Tuple[str, ...]
    generators: List[List]           # vertex-space vectors of M, one per cell
    epi: Dict[str, Matrix]           # at each vertex: (⊕P_cells)_v -> M_v


def _epi_from_generators(m: Representation, cells: Sequence[str], gens: Sequence[Sequence]) -> Dict[str, Matrix]:
    alg = m.alg
    f = alg.field
    epi = {}
    for v in alg.vertices:
        cols = []
        for w, g in zip(cells, gens):
            gv = Matrix.column(f, list(g))
            for k in alg.block(w, v):
                cols.append(list((m.path_action(alg.basis[k]) @ gv).col(0)))
        epi[v] = Matrix.from_columns(f, cols, m.dims[v]) if cols else Matrix.zeros(f, m.dims[v], 0)
    return epi


def projective_cover(m: Representation) -> Cover:
    if m.is_zero():
        raise PreconditionError("projective cover of the zero module")
    alg = m.alg
    f = alg.field
    cells: List[str] = []
    gens: List[List] = []
    for v in alg.vertices:
        rad = _column_space(f, [m.maps[a.name] for a in alg.quiver.in_arrows(v)], m.dims[v])
        for g in _complement(f, rad, m.dims[v]):
            cells.append(v)
            gens.append(g)
    return Cover(tuple(cells), gens, _epi_from_generators(m, cells, gens))


def projective_rep(alg: BasicAlgebra, cells: Sequence[str]) -> Representation:
    return direct_sum_rep(alg, [_projective(alg, v) for v in cells])


@dataclass
class Resolution:
    """Minimal projective resolution: cells[k] sits in degree -k, diffs[k]: P_{k+1} -> P_k."""

    module: Representation
    cells: List[Tuple[str, ...]]
    diffs: List[ProjMap]
    augmentation: Dict[str, Matrix]

    @property
    def length(self) -> int:
        return len(self.cells) - 1

    @property
    def complex(self) -> ProjComplex:
        alg = self.module.alg
        return ProjComplex(alg, {-k: c for k, c in enumerate(self.cells)},
                           {-k - 1: d for k, d in enumerate(self.diffs)})


def resolve(m: Representation, max_len: Optional[int] = None, max_terms: Optional[int] = None) -> Resolution:
    """Cover, take the kernel, repeat until the kernel vanishes."""
    alg = m.alg
    f = alg.field
    max_len = config.MAX_RESOLUTION if max_len is None else max_len
    if m.is_zero():
        raise PreconditionError("resolution of the zero module")
    cover = projective_cover(m)
    cells = [cover.cells]
    diffs: List[ProjMap] = []
    augmentation = cover.epi
    prev_cells = cover.cells
    prev_epi = cover.epi
    while True:
        # kernel of the current epi, as a subspace of ⊕P_prev_cells
        p_rep = projective_rep(alg, prev_cells)
        bases = {}
        for v in alg.vertices:
            k = kernel(prev_epi[v]) if p_rep.dims[v] else Matrix.zeros(f, 0, 0)
            bases[v] = [list(c) for c in k.columns()]
        if all(not b for b in bases.values()):
            break
        if max_terms is not None and len(cells) >= max_terms:
            break
        if len(cells) > max_len:
            raise ResolutionTooLongError(f"resolution of {m.name or 'module'} exceeds max_len={max_len}")
        kmod, incl = _subrep(p_rep, bases)
        kcover = projective_cover(kmod)
        columns = []
        for w, g in zip(kcover.cells, kcover.generators):
            vec = list((incl.maps[w] @ Matrix.column(f, list(g))).col(0))
            columns.append(column_from_vector(alg, prev_cells, w, vec))
        rows = [[columns[c][r] for c in range(len(kcover.cells))] for r in range(len(prev_cells))]
        diffs.append(ProjMap(alg, kcover.cells, prev_cells, rows))
        cells.append(kcover.cells)
        prev_cells = kcover.cells
        prev_epi = {v: incl.maps[v] @ kcover.epi[v] for v in alg.vertices}
    logger.debug("resolved %s: length %d", m.name or "module", len(cells) - 1)
    return Resolution(m, cells, diffs, augmentation)


def min_proj_resolution(m: Representation, max_len: Optional[int] = None) -> ProjComplex:
    return resolve(m, max_len=max_len).complex


def projective_dimension(m: Representation, max_len: Optional[int] = None) -> int:
    return resolve(m, max_len=max_len).length


def global_dimension(alg: BasicAlgebra, max_len: Optional[int] = None) -> int:
    """Certify finite global dimension by resolving every simple."""
    best = 0
    for v in alg.vertices:
        try:
            best = max(best, projective_dimension(standard_module(alg, "simple", v), max_len))
        except ResolutionTooLongError as exc:
            raise InfiniteGlobalDimensionError(f"infinite global dimension suspected: S{v} does not resolve "
                                               f"({exc})") from exc
    return best


# ═══════════════════════════════════════════════════════════════
# AR translate in mod Λ
# ═══════════════════════════════════════════════════════════════

def cokernel_rep(alg: BasicAlgebra, cells: Sequence[str], image: ProjMap) -> Representation:
    """(⊕P_cells) / image, where image: ⊕P_? -> ⊕P_cells."""
    f = alg.field
    p_rep = projective_rep(alg, cells)
    proj, sect = {}, {}
    for v in alg.vertices:
        n = p_rep.dims[v]
        img = image.at_vertex(v) if image.source else Matrix.zeros(f, n, 0)
        sub = _column_space(f, [img], n)
        comp = _complement(f, sub, n)
        basis = Matrix.from_columns(f, sub + comp, n) if n else Matrix.zeros(f, 0, 0)
        inv = basis.inverse() if n else basis
        proj[v] = inv.submatrix(range(len(sub), n), range(n)) if n else Matrix.zeros(f, 0, 0)
        sect[v] = Matrix.from_columns(f, comp, n) if comp else Matrix.zeros(f, n, 0)
    maps = {a.name: proj[a.target] @ p_rep.maps[a.name] @ sect[a.source] for a in alg.quiver.arrows}
    return Representation(alg, {v: proj[v].nrows for v in alg.vertices}, maps)


def transpose_module(m: Representation) -> Representation:
    """Tr M = coker of the dual of a minimal presentation; a module over the opposite algebra."""
    res = resolve(m, max_terms=2)
    if not res.diffs:
        return Representation(m.alg.opposite(), {}, {})
    d = res.diffs[0]
    return cokernel_rep(m.alg.opposite(), d.source, d.transpose_op())


def has_projective_summand(m: Representation) -> bool:
    alg = m.alg
    for i in alg.vertices:
        p = standard_module(alg, "projective", i)
        into = hom_rep(p, m)
        out = hom_rep(m, p)
        gen = alg.trivial_indices[alg.quiver.index[i]]
        pos = alg.block(i, i).index(gen)
        for f_ in into:
            for g in out:
                if (g.compose(f_)).maps[i][pos, pos] != 0:
                    return True
    return False


def has_injective_summand(m: Representation) -> bool:
    return has_projective_summand(m.dual())


def ar_translate_mod(m: Representation, direction: str = "tau") -> Representation:
    """τM = D Tr M, τ⁻¹M = Tr D M."""
    if direction in ("tau", "τ"):
        if has_projective_summand(m):
            raise PreconditionError("tau: module has a projective summand")
        out = transpose_module(m).dual()
    elif direction in ("tau_inv", "tau-inv", "τ⁻¹"):
        if has_injective_summand(m):
            raise PreconditionError("tau_inv: module has an injective summand")
        out = transpose_module(m.dual())
    else:
        raise PreconditionError(f"unknown direction {direction!r}")
    prefix = "tau" if direction in ("tau", "τ") else "tau-inv"
    out.name = f"{prefix} {m.name}" if m.name else ""
    return out


def isomorphism_rep(m: Representation, n: Representation, tries: Optional[int] = None,
                    seed: Optional[int] = None) -> Optional[RepMorphism]:
    """An isomorphism M -> N found among Hom basis elements and seeded random combinations."""
    if m.dim_vector() != n.dim_vector():
        return None
    basis = hom_rep(m, n)
    if not basis:
        if m.is_zero() and n.is_zero():
            return identity_morphism(m)
        return None
    for b in basis:
        if b.is_iso():
            return b
    rng = random.Random(config.SEED if seed is None else seed)
    f = m.alg.field
    for _ in range(config.RANDOM_TRIES if tries is None else tries):
        acc = basis[0].scale(f.random(rng))
        for b in basis[1:]:
            acc = acc + b.scale(f.random(rng))
        if acc.is_iso():
            return acc
    return None


def is_isomorphic_rep(m: Representation, n: Representation) -> bool:
    return isomorphism_rep(m, n) is not None
