"""
Complexes of projectives
========================
Bounded complexes of finitely generated projectives, chain maps, homotopies,
cones, shifts, minimization by Gaussian elimination, and Hom in the homotopy
category 𝒦^b(proj Λ).

Conventions:
  - d^n: X^n -> X^{n+1}; X[k]^n = X^{n+k} with differential (-1)^k d;
  - cone: C^n = X^{n+1} ⊕ Y^n, d_C = [[-d_X, 0], [f, ∂_Y]], t_f = [0; 1], p_f = [1, 0];
  - a graded map of degree r has components S^n: X^n -> Y^{n+r}.

Usage:
  from tools.artri.complexes import stalk, cone, minimize, hom_K, signature
  f = ChainMap(stalk(alg, ["1"], 0), stalk(alg, ["2"], 0), {0: ...})
  c, t_f, p_f = cone(f)
  signature(minimize(c).complex)       # "(P1-P2)[0]"
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import config
from .errors import DimensionMismatchError, PreconditionError
from .linalg import Matrix, kernel, rank, rref, solve_vector
from .path_algebra import AlgebraElement, BasicAlgebra, ProjMap, column_from_vector, factor_through

logger = logging.getLogger("artri.complexes")


# ═══════════════════════════════════════════════════════════════
# Complexes
# ═══════════════════════════════════════════════════════════════

class ProjComplex:
    """cells[n] lists the vertices of the indecomposable projectives in degree n."""

    def __init__(self, alg: BasicAlgebra, cells: Dict[int, Sequence[str]],
                 diffs: Optional[Dict[int, ProjMap]] = None):
        self.alg = alg
        self.cells: Dict[int, Tuple[str, ...]] = {int(n): tuple(str(v) for v in c)
                                                  for n, c in sorted(cells.items()) if len(c)}
        diffs = diffs or {}
        self.diffs: Dict[int, ProjMap] = {}
        for n in self.cells:
            if n + 1 not in self.cells:
                continue
            d = diffs.get(n)
            if d is None:
                d = ProjMap.zero(alg, self.cells[n], self.cells[n + 1])
            if d.source != self.cells[n] or d.target != self.cells[n + 1]:
                raise DimensionMismatchError(f"differential d^{n} does not match the cells")
            self.diffs[n] = d

    # -- shape -------------------------------------------------------------
    @property
    def lo(self) -> Optional[int]:
        return min(self.cells) if self.cells else None

    @property
    def hi(self) -> Optional[int]:
        return max(self.cells) if self.cells else None

    def degrees(self) -> List[int]:
        return sorted(self.cells)

    def cell(self, n: int) -> Tuple[str, ...]:
        return self.cells.get(n, ())

    def d(self, n: int) -> ProjMap:
        got = self.diffs.get(n)
        if got is not None:
            return got
        return ProjMap.zero(self.alg, self.cell(n), self.cell(n + 1))

    def is_zero(self) -> bool:
        return not self.cells

    def rank(self) -> int:
        return sum(len(c) for c in self.cells.values())

    # -- checks ------------------------------------------------------------
    def check(self) -> bool:
        for n in self.cells:
            self.d(n).validate()
            if not (self.d(n + 1) @ self.d(n)).is_zero():
                return False
        return True

    def is_minimal(self) -> bool:
        return all(d.is_radical() for d in self.diffs.values())

    def __eq__(self, other) -> bool:
        return (isinstance(other, ProjComplex) and other.alg is self.alg and self.cells == other.cells
                and self.diffs == other.diffs)

    def __hash__(self):
        return hash(tuple(sorted(self.cells.items())))

    def __repr__(self) -> str:
        if self.is_minimal():
            return f"ProjComplex({signature(self)})"
        return f"ProjComplex({self.cells})"


def zero_complex(alg: BasicAlgebra) -> ProjComplex:
    return ProjComplex(alg, {})


def stalk(alg: BasicAlgebra, cells: Sequence[str], degree: int = 0) -> ProjComplex:
    return ProjComplex(alg, {degree: tuple(str(v) for v in cells)})


def two_term(alg: BasicAlgebra, d: ProjMap, degree: int = -1) -> ProjComplex:
    """d: X^degree -> X^{degree+1}."""
    return ProjComplex(alg, {degree: d.source, degree + 1: d.target}, {degree: d})


# ═══════════════════════════════════════════════════════════════
# Graded maps, chain maps, homotopies
# ═══════════════════════════════════════════════════════════════

class GradedMap:
    """Components S^n: X^n -> Y^{n+degree}."""

    degree_default = 0

    def __init__(self, source: ProjComplex, target: ProjComplex, comps: Dict[int, ProjMap],
                 degree: Optional[int] = None):
        if source.alg is not target.alg:
            raise PreconditionError("maps between complexes over different algebras")
        self.source = source
        self.target = target
        self.degree = self.degree_default if degree is None else degree
        self.comps: Dict[int, ProjMap] = {}
        for n, cs in source.cells.items():
            ct = target.cell(n + self.degree)
            if not ct:
                continue
            c = comps.get(n)
            if c is None:
                c = ProjMap.zero(source.alg, cs, ct)
            if c.source != cs or c.target != ct:
                raise DimensionMismatchError(f"component {n} does not match the cells")
            self.comps[n] = c

    @property
    def alg(self) -> BasicAlgebra:
        return self.source.alg

    def comp(self, n: int) -> ProjMap:
        got = self.comps.get(n)
        if got is not None:
            return got
        return ProjMap.zero(self.alg, self.source.cell(n), self.target.cell(n + self.degree))

    def _like(self, comps: Dict[int, ProjMap]) -> "GradedMap":
        if type(self) is GradedMap:
            return GradedMap(self.source, self.target, comps, self.degree)
        return type(self)(self.source, self.target, comps)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._same(other)
        return self._like({n: self.comp(n) + other.comp(n) for n in self.comps})

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        self._same(other)
        return self._like({n: self.comp(n) - other.comp(n) for n in self.comps})

    def __neg__(self) -> "GradedMap":
        return self._like({n: -c for n, c in self.comps.items()})

    def scale(self, c) -> "GradedMap":
        return self._like({n: m.scale(c) for n, m in self.comps.items()})

    def _same(self, other: "GradedMap") -> None:
        if (other.source != self.source or other.target != self.target or other.degree != self.degree):
            raise DimensionMismatchError("graded maps with different endpoints")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps.values())

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMap) and self.degree == other.degree and self.source == other.source
                and self.target == other.target and self.comps == other.comps)

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.comps))))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.source!r} -> {self.target!r}, degree {self.degree})"


class ChainMap(GradedMap):
    degree_default = 0

    def __init__(self, source: ProjComplex, target: ProjComplex, comps: Dict[int, ProjMap]):
        super().__init__(source, target, comps, 0)

    def is_chain_map(self) -> bool:
        x, y = self.source, self.target
        for n in set(x.cells) | {m - 1 for m in x.cells}:
            if not (y.d(n) @ self.comp(n) - self.comp(n + 1) @ x.d(n)).is_zero():
                return False
        return True


class Homotopy(GradedMap):
    degree_default = -1

    def __init__(self, source: ProjComplex, target: ProjComplex, comps: Dict[int, ProjMap]):
        super().__init__(source, target, comps, -1)

    def boundary(self) -> ChainMap:
        """∂s + sd."""
        x, y = self.source, self.target
        return ChainMap(x, y, {n: y.d(n - 1) @ self.comp(n) + self.comp(n + 1) @ x.d(n) for n in x.cells})

    def witnesses(self, f: ChainMap, g: ChainMap) -> bool:
        """True iff f - g = ∂s + sd."""
        return (f - g) == self.boundary()


@dataclass
class Triangle:
    X: ProjComplex
    Y: ProjComplex
    Z: ProjComplex
    u: ChainMap
    v: ChainMap
    w: ChainMap


def identity(x: ProjComplex) -> ChainMap:
    return ChainMap(x, x, {n: ProjMap.identity(x.alg, c) for n, c in x.cells.items()})


def zero_map(x: ProjComplex, y: ProjComplex) -> ChainMap:
    return ChainMap(x, y, {})


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """g ∘ f."""
    if f.target != g.source:
        raise DimensionMismatchError("compose: endpoints do not match")
    comps = {n: g.comp(n + f.degree) @ f.comp(n) for n in f.source.cells}
    deg = f.degree + g.degree
    if deg == 0:
        return ChainMap(f.source, g.target, comps)
    if deg == -1:
        return Homotopy(f.source, g.target, comps)
    return GradedMap(f.source, g.target, comps, deg)


# ═══════════════════════════════════════════════════════════════
# Shift, sum, cone
# ═══════════════════════════════════════════════════════════════

def shift(x: ProjComplex, k: int) -> ProjComplex:
    sign = -1 if k % 2 else 1
    cells = {n - k: c for n, c in x.cells.items()}
    diffs = {n - k: d.scale(sign) for n, d in x.diffs.items()}
    return ProjComplex(x.alg, cells, diffs)


def shift_map(f: GradedMap, k: int) -> GradedMap:
    """f[k]^n = f^{n+k}; graded maps of odd degree pick up (-1)^k."""
    src, tgt = shift(f.source, k), shift(f.target, k)
    sign = -1 if (k * f.degree) % 2 else 1
    comps = {n - k: c.scale(sign) for n, c in f.comps.items()}
    if f.degree == 0:
        return ChainMap(src, tgt, comps)
    if f.degree == -1:
        return Homotopy(src, tgt, comps)
    return GradedMap(src, tgt, comps, f.degree)


def direct_sum(xs: Sequence[ProjComplex]) -> Tuple[ProjComplex, List[ChainMap], List[ChainMap]]:
    """Block sum with inclusions and projections."""
    if not xs:
        raise PreconditionError("direct sum of nothing")
    alg = xs[0].alg
    degrees = sorted(set(n for x in xs for n in x.cells))
    cells = {n: tuple(v for x in xs for v in x.cell(n)) for n in degrees}
    diffs = {}
    for n in degrees:
        if n + 1 not in cells:
            continue
        diffs[n] = ProjMap.block_matrix(alg, [x.cell(n + 1) for x in xs], [x.cell(n) for x in xs],
                                        {(i, i): x.d(n) for i, x in enumerate(xs)})
    total = ProjComplex(alg, cells, diffs)
    incs, projs = [], []
    for i, x in enumerate(xs):
        inc, proj = {}, {}
        for n in x.cells:
            blocks = [xx.cell(n) for xx in xs]
            inc[n] = ProjMap.block_matrix(alg, blocks, [x.cell(n)], {(i, 0): ProjMap.identity(alg, x.cell(n))})
            proj[n] = ProjMap.block_matrix(alg, [x.cell(n)], blocks, {(0, i): ProjMap.identity(alg, x.cell(n))})
        incs.append(ChainMap(x, total, inc))
        projs.append(ChainMap(total, x, proj))
    return total, incs, projs


def cone(f: ChainMap) -> Tuple[ProjComplex, ChainMap, ChainMap]:
    """(C_f, t_f: Y -> C_f, p_f: C_f -> X[1])."""
    x, y = f.source, f.target
    alg = f.alg
    degrees = sorted(set(n - 1 for n in x.cells) | set(y.cells))
    cells = {n: x.cell(n + 1) + y.cell(n) for n in degrees}
    diffs = {}
    for n in degrees:
        rows = [x.cell(n + 2), y.cell(n + 1)]
        cols = [x.cell(n + 1), y.cell(n)]
        diffs[n] = ProjMap.block_matrix(alg, rows, cols, {
            (0, 0): -x.d(n + 1),
            (1, 0): f.comp(n + 1),
            (1, 1): y.d(n),
        })
    c = ProjComplex(alg, cells, diffs)
    t_f = ChainMap(y, c, {n: ProjMap.block_matrix(alg, [x.cell(n + 1), y.cell(n)], [y.cell(n)],
                                                  {(1, 0): ProjMap.identity(alg, y.cell(n))})
                          for n in y.cells})
    x1 = shift(x, 1)
    p_f = ChainMap(c, x1, {n: ProjMap.block_matrix(alg, [x.cell(n + 1)], [x.cell(n + 1), y.cell(n)],
                                                   {(0, 0): ProjMap.identity(alg, x.cell(n + 1))})
                           for n in degrees})
    return c, t_f, p_f


def standard_triangle(f: ChainMap) -> Triangle:
    c, t_f, p_f = cone(f)
    return Triangle(f.source, f.target, c, f, t_f, p_f)


def is_minimal(x: ProjComplex) -> bool:
    return x.is_minimal()


# ═══════════════════════════════════════════════════════════════
# Minimization (Gaussian elimination on complexes)
# ═══════════════════════════════════════════════════════════════

def unit_inverse(u: AlgebraElement) -> AlgebraElement:
    """Inverse of λe_v + ρ in e_v Λ e_v (ρ radical, λ != 0)."""
    alg = u.alg
    lam = u.scalar_part()
    if lam == 0:
        raise PreconditionError("element is not a unit")
    inv_lam = alg.field.one / lam
    v = next(p.source for c, p in u.terms() if p.length == 0)
    e = alg.e(v)
    rho = u - e * lam
    step = -(rho * inv_lam)
    term, total = e, e
    for _ in range(alg.nilpotency + 1):
        term = term * step
        if term.is_zero():
            break
        total = total + term
    return total * inv_lam


def invert_projmap(m: ProjMap) -> Optional[ProjMap]:
    """Two-sided inverse of a map between sums of projectives, when its scalar part is invertible."""
    if len(m.source) != len(m.target):
        return None
    s = m.scalar_matrix()
    s_inv = s.inverse()
    if s_inv is None:
        return None
    alg = m.alg
    z = alg.zero()
    g0 = ProjMap(alg, m.target, m.source,
                 [[alg.e(m.source[r]) * s_inv[r, c] if m.source[r] == m.target[c] else z
                   for c in range(len(m.target))] for r in range(len(m.source))])
    one = ProjMap.identity(alg, m.target)
    n = m @ g0 - one
    term, total = one, one
    for _ in range(alg.nilpotency + 1):
        term = term @ (-n)
        if term.is_zero():
            break
        total = total + term
    return g0 @ total


@dataclass
class Minimized:
    """complex = M; phi: X -> M; psi: M -> X; phi∘psi = id_M exactly; id_X - psi∘phi = ∂h + hd."""

    complex: ProjComplex
    phi: ChainMap
    psi: ChainMap
    homotopy: Homotopy
    steps: int = 0


def _find_pivot(cells: Dict[int, Tuple[str, ...]], diffs: Dict[int, ProjMap]):
    for n in sorted(diffs):
        d = diffs[n]
        for r in range(len(d.target)):
            for c in range(len(d.source)):
                if d.target[r] == d.source[c] and d.entries[r][c].scalar_part() != 0:
                    return n, r, c
    return None


def minimize(x: ProjComplex) -> Minimized:
    """Strip contractible pairs P -id-> P until every differential is radical."""
    alg = x.alg
    cells = dict(x.cells)
    diffs = dict(x.diffs)
    phi = {n: ProjMap.identity(alg, c) for n, c in cells.items()}
    psi = {n: ProjMap.identity(alg, c) for n, c in cells.items()}
    hom = {}
    steps = 0
    while True:
        found = _find_pivot(cells, diffs)
        if found is None:
            break
        n, r, c = found
        steps += 1
        logger.debug("minimize: pivot degree %d row %d col %d", n, r, c)
        dn = diffs[n]
        cn, cn1 = cells[n], cells[n + 1]
        keep_a = [j for j in range(len(cn)) if j != c]
        keep_b = [i for i in range(len(cn1)) if i != r]
        u_inv = unit_inverse(dn.entries[r][c])
        delta = dn.restrict(keep_b, keep_a)
        eps = dn.restrict(keep_b, [c])
        phi_row = dn.restrict([r], keep_a)
        u_inv_m = ProjMap(alg, [cn1[r]], [cn[c]], [[u_inv]])
        new_cn = tuple(cn[j] for j in keep_a)
        new_cn1 = tuple(cn1[i] for i in keep_b)
        # witnesses between C and the reduced C'
        back = -(u_inv_m @ phi_row)
        fwd = -(eps @ u_inv_m)
        psi_n = _inclusion(alg, cn, keep_a) + ProjMap.from_terms(
            alg, new_cn, cn, {(c, a): back.entries[0][a] for a in range(len(keep_a))})
        psi_n1 = _inclusion(alg, cn1, keep_b)
        phi_n = _projection(alg, cn, keep_a)
        phi_n1 = _projection(alg, cn1, keep_b) + ProjMap.from_terms(
            alg, cn1, new_cn1, {(b, r): fwd.entries[b][0] for b in range(len(keep_b))})
        h_n1 = ProjMap.from_terms(alg, cn1, cn, {(c, r): u_inv})
        # new differentials
        new_diffs = dict(diffs)
        new_diffs[n] = delta - eps @ u_inv_m @ phi_row
        if n - 1 in diffs:
            new_diffs[n - 1] = diffs[n - 1].restrict(keep_a, list(range(len(cells[n - 1]))))
        if n + 1 in diffs:
            new_diffs[n + 1] = diffs[n + 1].restrict(list(range(len(cells[n + 2]))), keep_b)
        new_cells = dict(cells)
        new_cells[n] = new_cn
        new_cells[n + 1] = new_cn1
        # compose the running witnesses
        old_phi, old_psi = phi, psi
        phi = dict(old_phi)
        phi[n] = phi_n @ old_phi[n]
        phi[n + 1] = phi_n1 @ old_phi[n + 1]
        psi = dict(old_psi)
        psi[n] = old_psi[n] @ psi_n
        psi[n + 1] = old_psi[n + 1] @ psi_n1
        # H += Psi_old h Phi_old, only degree n+1 is hit
        extra = old_psi[n] @ h_n1 @ old_phi[n + 1]
        hom[n + 1] = hom[n + 1] + extra if n + 1 in hom else extra
        cells = {k: v for k, v in new_cells.items() if v}
        diffs = {k: v for k, v in new_diffs.items() if k in cells and k + 1 in cells}
    m = ProjComplex(alg, cells, diffs)
    phi_map = ChainMap(x, m, {k: v for k, v in phi.items() if k in cells})
    psi_map = ChainMap(m, x, {k: v for k, v in psi.items() if k in cells})
    h = Homotopy(x, x, {k: v for k, v in hom.items() if k - 1 in x.cells})
    if steps:
        logger.debug("minimize: %d cancellations, rank %d -> %d", steps, x.rank(), m.rank())
    return Minimized(m, phi_map, psi_map, h, steps)


def _inclusion(alg: BasicAlgebra, cells: Sequence[str], keep: Sequence[int]) -> ProjMap:
    """⊕P_{cells[keep]} -> ⊕P_cells."""
    return ProjMap.from_terms(alg, [cells[i] for i in keep], cells,
                              {(i, k): alg.e(cells[i]) for k, i in enumerate(keep)})


def _projection(alg: BasicAlgebra, cells: Sequence[str], keep: Sequence[int]) -> ProjMap:
    """⊕P_cells -> ⊕P_{cells[keep]}."""
    return ProjMap.from_terms(alg, cells, [cells[i] for i in keep],
                              {(k, i): alg.e(cells[i]) for k, i in enumerate(keep)})



# ═══════════════════════════════════════════════════════════════
# Linear systems for graded maps
# ═══════════════════════════════════════════════════════════════

class GradedSpace:
    """Compact coordinates for graded maps X -> Y of a fixed degree: one variable per Hom-basis element."""

    def __init__(self, source: ProjComplex, target: ProjComplex, degree: int):
        self.source = source
        self.target = target
        self.degree = degree
        alg = source.alg
        self.slots: List[Tuple[int, int, int, int]] = []   # (n, row, col, basis index)
        self.index: Dict[Tuple[int, int, int, int], int] = {}
        for n in source.degrees():
            tcell = target.cell(n + degree)
            for r, t in enumerate(tcell):
                for c, s in enumerate(source.cell(n)):
                    for k in alg.block(t, s):
                        self.index[(n, r, c, k)] = len(self.slots)
                        self.slots.append((n, r, c, k))

    @property
    def size(self) -> int:
        return len(self.slots)

    def vector(self, f: GradedMap) -> List:
        out = [self.source.alg.field.zero] * self.size
        for j, (n, r, c, k) in enumerate(self.slots):
            out[j] = f.comp(n).entries[r][c].coeffs[k]
        return out

    def element(self, vec: Sequence) -> GradedMap:
        alg = self.source.alg
        f = alg.field
        comps: Dict[int, List[List]] = {}
        for n in self.source.degrees():
            tcell = self.target.cell(n + self.degree)
            if tcell:
                comps[n] = [[[f.zero] * alg.dimension for _ in self.source.cell(n)] for _ in tcell]
        for j, (n, r, c, k) in enumerate(self.slots):
            if vec[j] != 0:
                comps[n][r][c][k] = vec[j]
        maps = {n: ProjMap(alg, self.source.cell(n), self.target.cell(n + self.degree),
                           [[AlgebraElement(alg, e) for e in row] for row in rows]) for n, rows in comps.items()}
        if self.degree == 0:
            return ChainMap(self.source, self.target, maps)
        if self.degree == -1:
            return Homotopy(self.source, self.target, maps)
        return GradedMap(self.source, self.target, maps, self.degree)


def boundary_operator(source: ProjComplex, target: ProjComplex, degree: int, a=1, b=1) -> Tuple[Matrix, GradedSpace, GradedSpace]:
    """Matrix of S |-> a·∂S + b·S d from degree-r maps to degree-(r+1) maps."""
    alg = source.alg
    f = alg.field
    a, b = f(a), f(b)
    dom = GradedSpace(source, target, degree)
    cod = GradedSpace(source, target, degree + 1)
    cols = []
    for (n, r, c, k) in dom.slots:
        col = [f.zero] * cod.size
        basis = alg.basis_element(k)
        # a·∂^{n+r} S^n: rows of Y^{n+degree+1}
        dt = target.d(n + degree)
        for r2 in range(len(dt.target)):
            e = dt.entries[r2][r]
            if e.is_zero():
                continue
            y = e * basis
            for kk, coef in enumerate(y.coeffs):
                if coef != 0:
                    col[cod.index[(n, r2, c, kk)]] += a * coef
        # b·S^n d^{n-1}: contributes to the component at n-1
        ds = source.d(n - 1)
        for c2 in range(len(ds.source)):
            e = ds.entries[c][c2]
            if e.is_zero():
                continue
            y = basis * e
            for kk, coef in enumerate(y.coeffs):
                if coef != 0:
                    col[cod.index[(n - 1, r, c2, kk)]] += b * coef
        cols.append(col)
    mat = Matrix.from_columns(f, cols, cod.size) if cols else Matrix.zeros(f, cod.size, 0)
    return mat, dom, cod


def solve_graded(source: ProjComplex, target: ProjComplex, degree: int, rhs: GradedMap,
                 a=1, b=1) -> Optional[GradedMap]:
    """Some S of the given degree with a·∂S + b·Sd = rhs, or None."""
    mat, dom, cod = boundary_operator(source, target, degree, a, b)
    vec = cod.vector(rhs)
    if dom.size == 0:
        return dom.element([]) if all(v == 0 for v in vec) else None
    x = solve_vector(mat, vec)
    return None if x is None else dom.element(x)


def homotopic(f: ChainMap, g: ChainMap) -> Optional[Homotopy]:
    """s with f - g = ∂s + sd, or None."""
    if f.source != g.source or f.target != g.target:
        raise DimensionMismatchError("homotopic: maps with different endpoints")
    s = solve_graded(f.source, f.target, -1, f - g)
    if s is None:
        return None
    return Homotopy(f.source, f.target, s.comps)


def is_null_homotopic(f: ChainMap) -> bool:
    return homotopic(f, zero_map(f.source, f.target)) is not None


# ═══════════════════════════════════════════════════════════════
# Hom in the homotopy category
# ═══════════════════════════════════════════════════════════════

@dataclass
class HomK:
    source: ProjComplex
    target: ProjComplex
    dimension: int
    chain_maps: List[ChainMap]
    null_homotopic: List[ChainMap]
    basis: List[ChainMap]
    _space: GradedSpace = field(repr=False, default=None)
    _solver: Optional[Matrix] = field(repr=False, default=None)

    def coordinates(self, f: ChainMap) -> List:
        """Coordinates of [f] on the quotient basis."""
        if not self.basis:
            return []
        vec = self._space.vector(f)
        x = solve_vector(self._solver, vec)
        if x is None:
            raise PreconditionError("not a chain map between these complexes")
        return x[:len(self.basis)]

    def combination(self, coeffs: Sequence) -> ChainMap:
        out = zero_map(self.source, self.target)
        for c, b in zip(coeffs, self.basis):
            if c != 0:
                out = out + b.scale(c)
        return out

    def is_zero_class(self, f: ChainMap) -> bool:
        return all(c == 0 for c in self.coordinates(f))


def hom_K(x: ProjComplex, y: ProjComplex) -> HomK:
    """Chain maps modulo null-homotopic maps."""
    fld = x.alg.field
    z_mat, space, _ = boundary_operator(x, y, 0, 1, -1)
    ker = kernel(z_mat) if space.size else Matrix.zeros(fld, 0, 0)
    zs = [list(ker.col(j)) for j in range(ker.ncols)]
    b_mat, hspace, _ = boundary_operator(x, y, -1, 1, 1)
    bs_all = [list(b_mat.col(j)) for j in range(b_mat.ncols)]
    # basis of the null-homotopic subspace
    if bs_all and space.size:
        red, piv, _ = rref(Matrix.from_columns(fld, bs_all, space.size))
        bs = [bs_all[j] for j in piv]
    else:
        bs = []
    # complete bs to a basis of the chain-map space using zs
    qs = []
    if zs:
        red, piv, _ = rref(Matrix.from_columns(fld, bs + zs, space.size))
        qs = [zs[j - len(bs)] for j in piv if j >= len(bs)]
    solver = Matrix.from_columns(fld, qs + bs, space.size) if (qs or bs) else None
    result = HomK(x, y, len(qs),
                  [space.element(v) for v in zs],
                  [space.element(v) for v in bs],
                  [space.element(v) for v in qs],
                  space, solver)
    logger.debug("hom_K: %d unknowns, dim %d", space.size, result.dimension)
    return result


# ═══════════════════════════════════════════════════════════════
# Lifting module maps to resolutions
# ═══════════════════════════════════════════════════════════════

def lift_map(f, res_m, res_n) -> ChainMap:
    """Comparison lift of a module map f: M -> N to minimal resolutions (quiver_rep.Resolution objects)."""
    alg = res_m.module.alg
    fld = alg.field
    src, tgt = res_m.complex, res_n.complex
    comps: Dict[int, ProjMap] = {}
    # degree 0: ε_N F^0 = f ε_M, one generator at a time
    p0m, p0n = res_m.cells[0], res_n.cells[0]
    cols = []
    for c, w in enumerate(p0m):
        offset = sum(len(alg.block(v, w)) for v in p0m[:c])
        pos = offset + alg.block(w, w).index(alg.trivial_indices[alg.quiver.index[w]])
        image = Matrix.column(fld, list(res_m.augmentation[w].col(pos)))
        y = solve_vector(res_n.augmentation[w], list((f.maps[w] @ image).col(0)))
        if y is None:
            raise PreconditionError("lift_map: degree-0 lifting system is inconsistent")
        cols.append(column_from_vector(alg, p0n, w, y))
    comps[0] = ProjMap(alg, p0m, p0n, [[cols[c][r] for c in range(len(p0m))] for r in range(len(p0n))])
    # ∂ F^{-k} = F^{-k+1} d
    k = 1
    while -k in src.cells:
        rhs = comps[-k + 1] @ src.d(-k)
        if -k not in tgt.cells:
            if not rhs.is_zero():
                raise PreconditionError("lift_map: lifting system is inconsistent")
            break
        x = factor_through(tgt.d(-k), rhs)
        if x is None:
            raise PreconditionError("lift_map: lifting system is inconsistent")
        comps[-k] = x
        k += 1
    return ChainMap(src, tgt, comps)


# ═══════════════════════════════════════════════════════════════
# Names, homology, duality
# ═══════════════════════════════════════════════════════════════

def _cell_name(cell: Sequence[str], order: Dict[str, int]) -> str:
    if not cell:
        return "0"
    return "+".join(f"P{v}" for v in sorted(cell, key=lambda v: (order.get(v, 0), v)))


def signature(x: ProjComplex) -> str:
    """Canonical name: "(P1-P2)[0]" has P1 in degree -1 and P2 in degree 0."""
    if not x.is_minimal():
        raise PreconditionError("signature of a non-minimal complex")
    if x.is_zero():
        return "0"
    order = x.alg.quiver.index
    lo, hi = x.lo, x.hi
    body = "-".join(_cell_name(x.cell(n), order) for n in range(lo, hi + 1))
    if lo == hi and len(x.cell(lo)) == 1:
        return f"{body}[{-hi}]"
    return f"({body})[{-hi}]"


def homology_dims(x: ProjComplex) -> Dict[int, Dict[str, int]]:
    """dim H^n(X) at each vertex, nonzero entries only."""
    out: Dict[int, Dict[str, int]] = {}
    for n in x.degrees():
        for w in x.alg.vertices:
            dn = x.d(n).at_vertex(w)
            dprev = x.d(n - 1).at_vertex(w)
            dim = dn.ncols
            ker_dim = dim - (rank(dn) if dn.nrows and dn.ncols else 0)
            im_dim = rank(dprev) if dprev.nrows and dprev.ncols else 0
            h = ker_dim - im_dim
            if h:
                out.setdefault(n, {})[w] = h
    return out


def is_module_complex(x: ProjComplex) -> bool:
    """Looks like the projective resolution of a module: top cell in degree 0, homology only there."""
    if x.is_zero() or x.hi != 0:
        return False
    h = homology_dims(x)
    return set(h) == {0}


def dual(x: ProjComplex) -> ProjComplex:
    """Hom_Λ(X, Λ) as a complex over the opposite algebra: X*^m = (X^{-m})*."""
    op = x.alg.opposite()
    cells = {-n: c for n, c in x.cells.items()}
    diffs = {-n - 1: d.transpose_op() for n, d in x.diffs.items()}
    return ProjComplex(op, cells, diffs)


# ═══════════════════════════════════════════════════════════════
# Isomorphisms and splittings in 𝒦^b
# ═══════════════════════════════════════════════════════════════

def _degreewise_inverse(f: ChainMap) -> Optional[ChainMap]:
    x, y = f.source, f.target
    comps = {}
    for n in x.degrees():
        inv = invert_projmap(f.comp(n))
        if inv is None:
            return None
        comps[n] = inv
    return ChainMap(y, x, comps)


@dataclass
class Isomorphism:
    forward: ChainMap
    backward: ChainMap


def find_isomorphism(x: ProjComplex, y: ProjComplex, tries: Optional[int] = None,
                     seed: Optional[int] = None) -> Optional[Isomorphism]:
    """Minimal complexes are isomorphic in 𝒦^b iff some chain map is a degreewise isomorphism."""
    if x.alg is not y.alg:
        return None
    if {n: sorted(c) for n, c in x.cells.items()} != {n: sorted(c) for n, c in y.cells.items()}:
        return None
    if x.is_zero():
        return Isomorphism(identity(x), identity(y))
    h = hom_K(x, y)
    candidates = h.basis or h.chain_maps
    for b in candidates:
        inv = _degreewise_inverse(b)
        if inv is not None:
            return Isomorphism(b, inv)
    rng = random.Random(config.SEED if seed is None else seed)
    fld = x.alg.field
    for _ in range(config.RANDOM_TRIES if tries is None else tries):
        acc = zero_map(x, y)
        for b in candidates:
            acc = acc + b.scale(fld.random(rng))
        inv = _degreewise_inverse(acc)
        if inv is not None:
            return Isomorphism(acc, inv)
    return None


def is_isomorphic(x: ProjComplex, y: ProjComplex) -> bool:
    return find_isomorphism(x, y) is not None


def _split_solve(products: List[ChainMap], nulls: List[ChainMap], target: ChainMap) -> Optional[List]:
    space = GradedSpace(target.source, target.target, 0)
    cols = [space.vector(p) for p in products] + [space.vector(n) for n in nulls]
    vec = space.vector(target)
    if not cols:
        return [] if all(v == 0 for v in vec) else None
    x = solve_vector(Matrix.from_columns(target.alg.field, cols, space.size), vec)
    return None if x is None else x[:len(products)]


def retraction_K(f: ChainMap) -> Optional[ChainMap]:
    """r with r∘f ≃ id, or None."""
    back = hom_K(f.target, f.source)
    endo = hom_K(f.source, f.source)
    products = [compose(r, f) for r in back.chain_maps]
    coeffs = _split_solve(products, endo.null_homotopic, identity(f.source))
    if coeffs is None:
        return None
    out = zero_map(f.target, f.source)
    for c, r in zip(coeffs, back.chain_maps):
        out = out + r.scale(c)
    return out


def section_K(f: ChainMap) -> Optional[ChainMap]:
    """s with f∘s ≃ id, or None."""
    back = hom_K(f.target, f.source)
    endo = hom_K(f.target, f.target)
    products = [compose(f, s) for s in back.chain_maps]
    coeffs = _split_solve(products, endo.null_homotopic, identity(f.target))
    if coeffs is None:
        return None
    out = zero_map(f.target, f.source)
    for c, s in zip(coeffs, back.chain_maps):
        out = out + s.scale(c)
    return out


def is_split_mono_K(f: ChainMap) -> bool:
    return retraction_K(f) is not None


def is_split_epi_K(f: ChainMap) -> bool:
    return section_K(f) is not None
