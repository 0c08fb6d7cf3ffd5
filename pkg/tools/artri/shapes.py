"""
Shapes of morphisms and triangles
=================================
Classifies chain maps between minimal complexes as smonic / sepic /
sirreducible, conjugates them into block standard form, builds the reduced
third term of their standard triangle with explicit witnesses, and checks the
shape templates that an Auslander-Reiten triangle has to match.

Block conventions (the standard form of f: X -> Y with pivot degree i):
  - degrees j < i split epi:  X^j = Y^j ⊕ X'^j,  f^j = [1 0],  d^j = [[∂, 0], [b, e]];
    d^{i-1} = [c, e]: Y^{i-1} ⊕ X'^{i-1} -> X^i;
  - degrees j > i split mono: Y^j = X^j ⊕ Y'^j,  f^j = [1; 0], ∂^j = [[d, a], [0, e]];
    ∂^i = [ℓ; e]: Y^i -> X^{i+1} ⊕ Y'^{i+1};
  - smonic maps use i = lo - 1, sepic maps use i = hi + 2.

Usage:
  from tools.artri.shapes import classify, standard_form, reduced_cone, is_indecomposable_K
  cls = classify(f)                 # MorphClass(kind="smonic", ...)
  rc = reduced_cone(standard_form(f, cls))
  rc.verify()                       # {"h_eta": True, "eta_h": True, "p_wh": True, "g_ht": True, ...}
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import config
from .complexes import (ChainMap, GradedSpace, HomK, Homotopy, ProjComplex, Triangle, compose, cone,
                        find_isomorphism, hom_K, homotopic, identity, invert_projmap, is_module_complex,
                        minimize, shift, shift_map, stalk, zero_map)
from .errors import PreconditionError, ShapeViolation
from .linalg import Matrix, kernel, rank, rref, solve_vector
from .path_algebra import BasicAlgebra, ProjMap
from .quiver_rep import min_proj_resolution, standard_module

logger = logging.getLogger("artri.shapes")

MONO = "splitMono"
EPI = "splitEpi"
BOTH = "both"
NEITHER = "neither"


# ═══════════════════════════════════════════════════════════════
# Split patterns
# ═══════════════════════════════════════════════════════════════

def _split_rows(s: Matrix) -> List[int]:
    """Rows J of a full-column-rank matrix with s[J, :] invertible."""
    if s.ncols == 0:
        return []
    _, piv, _ = rref(s.transpose())
    return list(piv)


def _split_cols(s: Matrix) -> List[int]:
    if s.nrows == 0:
        return []
    _, piv, _ = rref(s)
    return list(piv)


def _complement_rows(s: Matrix) -> List[int]:
    """Target summands J with [s | E_J] invertible (s of full column rank)."""
    n = s.nrows
    f = s.field
    ident = Matrix.identity(f, n)
    _, piv, _ = rref(Matrix.hstack(f, [s, ident], n)) if n else (None, [], 0)
    return [p - s.ncols for p in piv if p >= s.ncols]


def _complement_cols(s: Matrix) -> List[int]:
    """Source summands J with [s; E_J] invertible (s of full row rank)."""
    return _complement_rows(s.transpose())


def _scalar_embed(alg: BasicAlgebra, source: Sequence[str], target: Sequence[str], m: Matrix,
                  rows: Sequence[int], cols: Sequence[int]) -> ProjMap:
    """ProjMap placing m[k][l] * e at (rows[k], cols[l]) where the vertices agree."""
    terms = {}
    for k, r in enumerate(rows):
        for l, c in enumerate(cols):
            if m[k, l] != 0 and target[r] == source[c]:
                terms[(r, c)] = alg.e(source[c]) * m[k, l]
    return ProjMap.from_terms(alg, source, target, terms)


def retraction(m: ProjMap) -> Optional[ProjMap]:
    """r with r∘m = 1, when m is a split mono between sums of projectives."""
    if not m.source:
        return ProjMap.zero(m.alg, m.target, m.source)
    s = m.scalar_matrix()
    if not m.target or rank(s) != s.ncols:
        return None
    rows = _split_rows(s)
    inv = s.submatrix(rows, range(s.ncols)).inverse()
    r0 = _scalar_embed(m.alg, m.target, m.source, inv, range(s.ncols), rows)
    fix = invert_projmap(r0 @ m)
    return fix @ r0


def section(m: ProjMap) -> Optional[ProjMap]:
    """s with m∘s = 1, when m is a split epi."""
    if not m.target:
        return ProjMap.zero(m.alg, m.target, m.source)
    s = m.scalar_matrix()
    if not m.source or rank(s) != s.nrows:
        return None
    cols = _split_cols(s)
    inv = s.submatrix(range(s.nrows), cols).inverse()
    s0 = _scalar_embed(m.alg, m.target, m.source, inv, cols, range(s.nrows))
    fix = invert_projmap(m @ s0)
    return s0 @ fix


@dataclass
class SplitPattern:
    flags: Dict[int, str]
    witnesses: Dict[int, ProjMap] = field(default_factory=dict)

    def degrees(self) -> List[int]:
        return sorted(self.flags)

    def verify(self, f: ChainMap) -> bool:
        for n, w in self.witnesses.items():
            comp = f.comp(n)
            flag = self.flags[n]
            if flag == MONO and not (w @ comp) == ProjMap.identity(f.alg, comp.source):
                return False
            if flag in (EPI, BOTH) and not (comp @ w) == ProjMap.identity(f.alg, comp.target):
                return False
        return True

    def to_dict(self) -> Dict[str, str]:
        return {str(n): v for n, v in sorted(self.flags.items())}


def split_pattern(f: ChainMap) -> SplitPattern:
    x, y = f.source, f.target
    flags, witnesses = {}, {}
    for n in sorted(set(x.cells) | set(y.cells)):
        comp = f.comp(n)
        s = comp.scalar_matrix()
        r = rank(s) if s.nrows and s.ncols else 0
        mono, epi = r == s.ncols, r == s.nrows
        if mono and epi:
            flags[n] = BOTH
            witnesses[n] = invert_projmap(comp)
        elif mono:
            flags[n] = MONO
            witnesses[n] = retraction(comp)
        elif epi:
            flags[n] = EPI
            witnesses[n] = section(comp)
        else:
            flags[n] = NEITHER
    return SplitPattern(flags, witnesses)


# ═══════════════════════════════════════════════════════════════
# Classification
# ═══════════════════════════════════════════════════════════════

@dataclass
class MorphClass:
    kind: str                          # smonic | sepic | sirreducible | unclassified
    index: Optional[int] = None        # ι_0 for sirreducible
    candidate: bool = False            # ι_0 component between decomposable cells
    pattern: Optional[SplitPattern] = None

    def __str__(self) -> str:
        if self.kind == "sirreducible":
            return f"sirreducible({self.index}{', candidate' if self.candidate else ''})"
        return self.kind

    def to_dict(self) -> Dict:
        out = {"class": self.kind}
        if self.index is not None:
            out["index"] = self.index
        if self.candidate:
            out["candidate"] = True
        if self.pattern is not None:
            out["pattern"] = self.pattern.to_dict()
        return out


def pattern_class(pattern: SplitPattern) -> Tuple[str, Optional[int]]:
    """Definition shape only: ("smonic" | "sepic" | "sirreducible" | "unclassified", ι_0)."""
    flags = pattern.flags
    if flags and all(v in (MONO, BOTH) for v in flags.values()):
        return "smonic", None
    if flags and all(v in (EPI, BOTH) for v in flags.values()):
        return "sepic", None
    neither = [n for n, v in flags.items() if v == NEITHER]
    if len(neither) == 1:
        i = neither[0]
        below = all(v in (EPI, BOTH) for n, v in flags.items() if n < i)
        above = all(v in (MONO, BOTH) for n, v in flags.items() if n > i)
        if below and above:
            return "sirreducible", i
    return "unclassified", None


def classify(f: ChainMap) -> MorphClass:
    if f.source.is_zero() and f.target.is_zero():
        raise PreconditionError("classify: source and target are both zero")
    pattern = split_pattern(f)
    if all(v == BOTH for v in pattern.flags.values()):
        raise PreconditionError("classify: the map is an isomorphism of complexes")
    kind, i = pattern_class(pattern)
    if kind in ("smonic", "sepic"):
        return MorphClass(kind, pattern=pattern)
    if kind == "sirreducible":
        comp = f.comp(i)
        if not comp.is_radical():
            return MorphClass("unclassified", pattern=pattern)
        if len(comp.source) == 1 and len(comp.target) == 1:
            if f.alg.is_arrow_class(comp.entries[0][0]):
                return MorphClass("sirreducible", i, pattern=pattern)
            return MorphClass("unclassified", pattern=pattern)
        logger.warning("classify: component in degree %d joins decomposable cells; reporting a candidate", i)
        return MorphClass("sirreducible", i, candidate=True, pattern=pattern)
    return MorphClass("unclassified", pattern=pattern)


# ═══════════════════════════════════════════════════════════════
# Standard form
# ═══════════════════════════════════════════════════════════════

@dataclass
class StandardForm:
    f: ChainMap
    cls: MorphClass
    pivot: int
    alpha: ChainMap                    # X -> X~
    alpha_inv: ChainMap
    beta: ChainMap                     # Y -> Y~
    beta_inv: ChainMap
    f_std: ChainMap                    # X~ -> Y~ in block form
    ypart: Dict[int, Tuple[str, ...]]  # j < pivot: Y^j inside X~^j
    xcomp: Dict[int, Tuple[str, ...]]  # j < pivot: X'^j
    xpart: Dict[int, Tuple[str, ...]]  # j > pivot: X^j inside Y~^j
    ycomp: Dict[int, Tuple[str, ...]]  # j > pivot: Y'^j
    a: Dict[int, ProjMap]
    b: Dict[int, ProjMap]
    c: Optional[ProjMap]
    e: Dict[int, ProjMap]
    ell: Optional[ProjMap]

    def check(self) -> bool:
        """Conjugation reproduces f and the block shapes hold."""
        f, fs = self.f, self.f_std
        if compose(self.beta, f) != compose(fs, self.alpha):
            return False
        alg = f.alg
        for j in fs.source.degrees() + fs.target.degrees():
            comp = fs.comp(j)
            if j < self.pivot:
                want = ProjMap.hstack(alg, self.ypart.get(j, ()), [
                    ProjMap.identity(alg, self.ypart.get(j, ())),
                    ProjMap.zero(alg, self.xcomp.get(j, ()), self.ypart.get(j, ()))])
                if comp != want:
                    return False
            elif j > self.pivot:
                want = ProjMap.vstack(alg, self.xpart.get(j, ()), [
                    ProjMap.identity(alg, self.xpart.get(j, ())),
                    ProjMap.zero(alg, self.xpart.get(j, ()), self.ycomp.get(j, ()))])
                if comp != want:
                    return False
        return True


def _degree_range(f: ChainMap) -> Tuple[int, int]:
    degs = list(f.source.cells) + list(f.target.cells)
    return min(degs), max(degs)


def standard_form(f: ChainMap, cls: Optional[MorphClass] = None) -> StandardForm:
    cls = cls or classify(f)
    if cls.kind not in ("smonic", "sepic", "sirreducible"):
        raise PreconditionError(f"standard_form: map is {cls.kind}")
    alg = f.alg
    x, y = f.source, f.target
    lo, hi = _degree_range(f)
    i = {"smonic": lo - 1, "sepic": hi + 2}.get(cls.kind, cls.index)
    span = range(lo - 1, hi + 2)

    alpha, alpha_inv, beta, beta_inv = {}, {}, {}, {}
    ypart, xcomp, xpart, ycomp = {}, {}, {}, {}
    for j in span:
        xc, yc = x.cell(j), y.cell(j)
        comp = f.comp(j)
        if j < i and xc:
            s = comp.scalar_matrix()
            keep = _complement_cols(s) if yc else list(range(len(xc)))
            proj = ProjMap.from_terms(alg, xc, [xc[k] for k in keep],
                                      {(r, k): alg.e(xc[k]) for r, k in enumerate(keep)})
            a_j = ProjMap.vstack(alg, xc, [comp, proj])
            alpha[j], alpha_inv[j] = a_j, invert_projmap(a_j)
            if alpha_inv[j] is None:
                raise PreconditionError(f"standard_form: degree {j} is not split epi")
            ypart[j], xcomp[j] = yc, tuple(xc[k] for k in keep)
        elif j > i and yc:
            s = comp.scalar_matrix()
            keep = _complement_rows(s) if xc else list(range(len(yc)))
            inc = ProjMap.from_terms(alg, [yc[k] for k in keep], yc,
                                     {(k, r): alg.e(yc[k]) for r, k in enumerate(keep)})
            b_inv = ProjMap.hstack(alg, yc, [comp, inc])
            beta_inv[j], beta[j] = b_inv, invert_projmap(b_inv)
            if beta[j] is None:
                raise PreconditionError(f"standard_form: degree {j} is not split mono")
            xpart[j], ycomp[j] = xc, tuple(yc[k] for k in keep)

    def _x_map(j):
        return alpha.get(j) or ProjMap.identity(alg, x.cell(j))

    def _x_inv(j):
        return alpha_inv.get(j) or ProjMap.identity(alg, x.cell(j))

    def _y_map(j):
        return beta.get(j) or ProjMap.identity(alg, y.cell(j))

    def _y_inv(j):
        return beta_inv.get(j) or ProjMap.identity(alg, y.cell(j))

    xt_cells = {j: _x_map(j).target for j in x.cells}
    yt_cells = {j: _y_map(j).target for j in y.cells}
    xt = ProjComplex(alg, xt_cells, {j: _x_map(j + 1) @ d @ _x_inv(j) for j, d in x.diffs.items()})
    yt = ProjComplex(alg, yt_cells, {j: _y_map(j + 1) @ d @ _y_inv(j) for j, d in y.diffs.items()})
    a_map = ChainMap(x, xt, {j: _x_map(j) for j in x.cells})
    a_inv = ChainMap(xt, x, {j: _x_inv(j) for j in x.cells})
    b_map = ChainMap(y, yt, {j: _y_map(j) for j in y.cells})
    b_inv_map = ChainMap(yt, y, {j: _y_inv(j) for j in y.cells})
    f_std = ChainMap(xt, yt, {j: _y_map(j) @ f.comp(j) @ _x_inv(j) for j in x.cells})

    def _idx(first: Sequence[str], second: Sequence[str]) -> Tuple[List[int], List[int]]:
        return list(range(len(first))), list(range(len(first), len(first) + len(second)))

    a_blk, b_blk, e_blk = {}, {}, {}
    c_blk = ell = None
    for j in span:
        if j <= i - 2:
            d = xt.d(j)
            src_y, src_x = _idx(ypart.get(j, ()), xcomp.get(j, ()))
            tgt_y, tgt_x = _idx(ypart.get(j + 1, ()), xcomp.get(j + 1, ()))
            if not d.restrict(tgt_y, src_x).is_zero():
                raise PreconditionError(f"standard_form: degree {j} block [0 1] is not zero")
            b_blk[j] = d.restrict(tgt_x, src_y)
            e_blk[j] = d.restrict(tgt_x, src_x)
        elif j == i - 1:
            d = xt.d(j)
            src_y, src_x = _idx(ypart.get(j, ()), xcomp.get(j, ()))
            rows = list(range(len(xt.cell(i))))
            c_blk = d.restrict(rows, src_y)
            e_blk[j] = d.restrict(rows, src_x)
        elif j == i:
            d = yt.d(j)
            tgt_x, tgt_y = _idx(xpart.get(j + 1, ()), ycomp.get(j + 1, ()))
            cols = list(range(len(yt.cell(i))))
            ell = d.restrict(tgt_x, cols)
            e_blk[j] = d.restrict(tgt_y, cols)
        else:
            d = yt.d(j)
            src_x, src_y = _idx(xpart.get(j, ()), ycomp.get(j, ()))
            tgt_x, tgt_y = _idx(xpart.get(j + 1, ()), ycomp.get(j + 1, ()))
            if not d.restrict(tgt_y, src_x).is_zero():
                raise PreconditionError(f"standard_form: degree {j} block [0 e] is not upper triangular")
            a_blk[j] = d.restrict(tgt_x, src_y)
            e_blk[j] = d.restrict(tgt_y, src_y)
    logger.debug("standard_form: %s with pivot degree %d", cls, i)
    return StandardForm(f, cls, i, a_map, a_inv, b_map, b_inv_map, f_std, ypart, xcomp, xpart, ycomp,
                        a_blk, b_blk, c_blk, e_blk, ell)


# ═══════════════════════════════════════════════════════════════
# Reduced cone
# ═══════════════════════════════════════════════════════════════

@dataclass
class ReducedCone:
    """Z with g: Y -> Z, w: Z -> X[1]; h: C_f -> Z and η: Z -> C_f with hη = 1, ηh ≃ 1 (v), p_f ≃ wh (s)."""

    f: ChainMap
    Z: ProjComplex
    g: ChainMap
    w: ChainMap
    h: ChainMap
    eta: ChainMap
    s: Homotopy
    v: Homotopy
    cone: ProjComplex
    t_f: ChainMap
    p_f: ChainMap

    @property
    def triangle(self) -> Triangle:
        return Triangle(self.f.source, self.f.target, self.Z, self.f, self.g, self.w)

    def verify(self) -> Dict[str, bool]:
        return {
            "chain_maps": all(m.is_chain_map() for m in (self.g, self.w, self.h, self.eta)),
            "h_eta": compose(self.h, self.eta) == identity(self.Z),
            "eta_h": self.v.witnesses(identity(self.cone), compose(self.eta, self.h)),
            "p_wh": self.s.witnesses(self.p_f, compose(self.w, self.h)),
            "g_ht": self.g == compose(self.h, self.t_f),
        }


def _reduced_cone_std(sf: StandardForm):
    """Reduced cone of f_std, with all maps in block form."""
    f = sf.f_std
    alg = f.alg
    x, y = f.source, f.target
    i = sf.pivot
    lo, hi = _degree_range(f)
    span = range(lo - 2, hi + 3)
    z = lambda s_, t_: ProjMap.zero(alg, s_, t_)   # noqa: E731
    one = lambda c_: ProjMap.identity(alg, c_)     # noqa: E731

    def Y(j):
        return y.cell(j) if j < i else ()

    def Xp(j):
        return sf.xcomp.get(j, ())

    def X(j):
        return sf.xpart.get(j, ())

    def Yp(j):
        return sf.ycomp.get(j, ())

    def zcell(j):
        if j <= i - 2:
            return Xp(j + 1)
        if j == i - 1:
            return x.cell(i)
        if j == i:
            return y.cell(i)
        return Yp(j)

    def e(j):
        got = sf.e.get(j)
        if got is not None:
            return got
        if j <= i - 1:
            return z(Xp(j), Xp(j + 1) if j + 1 <= i - 1 else x.cell(i))
        return z(y.cell(i) if j == i else Yp(j), Yp(j + 1))

    def slots(n):
        if n <= i - 2:
            return [Y(n + 1), Xp(n + 1), Y(n)]
        if n == i - 1:
            return [x.cell(i), Y(i - 1)]
        if n == i:
            return [x.cell(i + 1), y.cell(i)]
        return [x.cell(n + 1), X(n), Yp(n)]

    zdiffs = {}
    for j in span:
        if j <= i - 2:
            zdiffs[j] = -e(j + 1)
        elif j == i - 1:
            zdiffs[j] = f.comp(i)
        else:
            zdiffs[j] = e(j)
    Z = ProjComplex(alg, {j: zcell(j) for j in span}, zdiffs)

    c_f, t_f, p_f = cone(f)
    ell = sf.ell if sf.ell is not None else z(y.cell(i), x.cell(i + 1))
    c_blk = sf.c if sf.c is not None else z(Y(i - 1), x.cell(i))
    bm = ProjMap.block_matrix
    g, w, h, eta, s, v = {}, {}, {}, {}, {}, {}
    for n in span:
        sl = slots(n)
        zc = [zcell(n)]
        if n <= i - 2:
            b_n = sf.b.get(n) or z(Y(n), Xp(n + 1))
            g[n] = b_n
            w[n] = bm(alg, [Y(n + 1), Xp(n + 1)], zc, {(1, 0): one(Xp(n + 1))})
            h[n] = bm(alg, zc, sl, {(0, 1): one(Xp(n + 1)), (0, 2): b_n})
            eta[n] = bm(alg, sl, zc, {(1, 0): one(Xp(n + 1))})
        elif n == i - 1:
            g[n] = c_blk
            w[n] = one(x.cell(i))
            h[n] = bm(alg, zc, sl, {(0, 0): one(x.cell(i)), (0, 1): c_blk})
            eta[n] = bm(alg, sl, zc, {(0, 0): one(x.cell(i))})
        elif n == i:
            g[n] = one(y.cell(i))
            w[n] = -ell
            h[n] = bm(alg, zc, sl, {(0, 1): one(y.cell(i))})
            eta[n] = bm(alg, sl, zc, {(0, 0): -ell, (1, 0): one(y.cell(i))})
        else:
            a_n = sf.a.get(n) or z(Yp(n), x.cell(n + 1))
            g[n] = bm(alg, zc, [X(n), Yp(n)], {(0, 1): one(Yp(n))})
            w[n] = -a_n
            h[n] = bm(alg, zc, sl, {(0, 2): one(Yp(n))})
            eta[n] = bm(alg, sl, zc, {(0, 0): -a_n, (2, 0): one(Yp(n))})
        # v^n: C^n -> C^{n-1}, s^n: C^n -> X^n
        prev = slots(n - 1)
        if n <= i - 1:
            last = len(sl) - 1
            v[n] = bm(alg, prev, sl, {(0, last): one(Y(n))})
            s[n] = bm(alg, [Y(n), Xp(n)], sl, {(0, last): one(Y(n))})
        elif n == i:
            v[n] = bm(alg, prev, sl, {})
            s[n] = bm(alg, [x.cell(n)], sl, {})
        else:
            v[n] = bm(alg, prev, sl, {(0, 1): one(X(n))})
            s[n] = bm(alg, [X(n)], sl, {(0, 1): one(X(n))})
    x1 = p_f.target
    return (Z, ChainMap(y, Z, g), ChainMap(Z, x1, w), ChainMap(c_f, Z, h), ChainMap(Z, c_f, eta),
            Homotopy(c_f, x1, s), Homotopy(c_f, c_f, v), c_f, t_f, p_f)


def reduced_cone(sf: StandardForm) -> ReducedCone:
    """Reduced cone for the original map, transported from its standard form."""
    Z, g, w, h, eta, s, v, c_std, _, _ = _reduced_cone_std(sf)
    f = sf.f
    alg = f.alg
    c_f, t_f, p_f = cone(f)
    x = f.source
    kappa, kappa_inv = {}, {}
    for n in c_f.degrees():
        xs, ys = x.cell(n + 1), f.target.cell(n)
        xs_t, ys_t = sf.alpha.target.cell(n + 1), sf.beta.target.cell(n)
        kappa[n] = ProjMap.block_matrix(alg, [xs_t, ys_t], [xs, ys],
                                        {(0, 0): sf.alpha.comp(n + 1), (1, 1): sf.beta.comp(n)})
        kappa_inv[n] = ProjMap.block_matrix(alg, [xs, ys], [xs_t, ys_t],
                                            {(0, 0): sf.alpha_inv.comp(n + 1), (1, 1): sf.beta_inv.comp(n)})
    k_map = ChainMap(c_f, c_std, kappa)
    k_inv = ChainMap(c_std, c_f, kappa_inv)
    a_inv1 = shift_map(sf.alpha_inv, 1)
    out = ReducedCone(
        f=f, Z=Z,
        g=compose(g, sf.beta),
        w=compose(a_inv1, w),
        h=compose(h, k_map),
        eta=compose(k_inv, eta),
        s=compose(a_inv1, compose(s, k_map)),
        v=compose(k_inv, compose(v, k_map)),
        cone=c_f, t_f=t_f, p_f=p_f,
    )
    logger.debug("reduced_cone: %s -> Z with %d cells (cone has %d)", sf.cls, Z.rank(), c_f.rank())
    return out


# ═══════════════════════════════════════════════════════════════
# Isomorphisms of triangles
# ═══════════════════════════════════════════════════════════════

@dataclass
class TriangleIso:
    phi_x: ChainMap
    phi_y: ChainMap
    phi_z: ChainMap
    squares: List[Homotopy]


def _iso_between(a: ProjComplex, b: ProjComplex) -> Optional[ChainMap]:
    if a == b:
        return identity(a)
    ma, mb = minimize(a), minimize(b)
    iso = find_isomorphism(ma.complex, mb.complex)
    if iso is None:
        return None
    return compose(mb.psi, compose(iso.forward, ma.phi))


def verify_triangle_iso(t1: Triangle, t2: Triangle) -> Optional[TriangleIso]:
    """Isomorphisms X1->X2, Y1->Y2, Z1->Z2 with all three squares commuting up to homotopy."""
    phi_x = _iso_between(t1.X, t2.X)
    phi_y = _iso_between(t1.Y, t2.Y)
    if phi_x is None or phi_y is None:
        return None
    first = homotopic(compose(phi_y, t1.u), compose(t2.u, phi_x))
    if first is None:
        return None
    z1, z2 = minimize(t1.Z).complex, minimize(t2.Z).complex
    if {n: sorted(c) for n, c in z1.cells.items()} != {n: sorted(c) for n, c in z2.cells.items()}:
        return None
    # phi_z solves phi_z v1 ≃ v2 phi_y and phi_x[1] w1 ≃ w2 phi_z; any solution is an isomorphism
    hz = hom_K(t1.Z, t2.Z)
    fld = t1.X.alg.field
    n_vy = hom_K(t1.Y, t2.Z).null_homotopic
    x2_1 = t2.w.target
    n_zx = hom_K(t1.Z, x2_1).null_homotopic
    sp1 = GradedSpace(t1.Y, t2.Z, 0)
    sp2 = GradedSpace(t1.Z, x2_1, 0)
    rhs1 = sp1.vector(compose(t2.v, phi_y))
    rhs2 = sp2.vector(compose(shift_map(phi_x, 1), t1.w))
    cols = []
    for cmap in hz.chain_maps:
        cols.append(sp1.vector(compose(cmap, t1.v)) + sp2.vector(compose(t2.w, cmap)))
    for nm in n_vy:
        cols.append(sp1.vector(nm) + [fld.zero] * sp2.size)
    for nm in n_zx:
        cols.append([fld.zero] * sp1.size + sp2.vector(nm))
    rhs = rhs1 + rhs2
    if not rhs:
        sol = [fld.zero] * len(cols)
    elif not cols:
        sol = None if any(r != 0 for r in rhs) else []
    else:
        sol = solve_vector(Matrix.from_columns(fld, cols, len(rhs)), rhs)
    if sol is None:
        return None
    phi_z = zero_map(t1.Z, t2.Z)
    for c_, cmap in zip(sol, hz.chain_maps):
        if c_ != 0:
            phi_z = phi_z + cmap.scale(c_)
    second = homotopic(compose(phi_z, t1.v), compose(t2.v, phi_y))
    third = homotopic(compose(shift_map(phi_x, 1), t1.w), compose(t2.w, phi_z))
    if second is None or third is None:
        return None
    return TriangleIso(phi_x, phi_y, phi_z, [first, second, third])


# ═══════════════════════════════════════════════════════════════
# Shape templates for AR triangles
# ═══════════════════════════════════════════════════════════════

@dataclass
class ShapeReport:
    u_class: MorphClass
    v_class: MorphClass
    template: Optional[str]
    checks: List[Tuple[str, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.template is not None and all(ok for _, ok in self.checks)

    def to_dict(self) -> Dict:
        return {"u": self.u_class.to_dict(), "v": self.v_class.to_dict(), "template": self.template,
                "checks": [{"name": n, "ok": ok} for n, ok in self.checks]}


def _vanishes(x: ProjComplex, degrees) -> bool:
    return all(not x.cell(j) for j in degrees)


def _same_size(x: ProjComplex, y: ProjComplex, degrees) -> bool:
    return all(len(x.cell(j)) == len(y.cell(j)) for j in degrees)


def _minimal(x: ProjComplex) -> ProjComplex:
    return x if x.is_minimal() else minimize(x).complex


def _splits_off(x: ProjComplex, y: ProjComplex, z: ProjComplex) -> bool:
    """Y^k = X^k ⊕ Z^k as cells, in every degree."""
    x, y, z = _minimal(x), _minimal(y), _minimal(z)
    degrees = set(x.cells) | set(y.cells) | set(z.cells)
    return all(sorted(y.cell(k)) == sorted(x.cell(k) + z.cell(k)) for k in degrees)


def _irreducible(m: ProjMap) -> bool:
    """Radical and not in rad²."""
    entries = [e for row in m.entries for e in row if not e.is_zero()]
    return m.is_radical() and any(e.low_degree() == 1 for e in entries)


def theorem2_shape(u_class: MorphClass, triangle: Triangle, v_class: Optional[MorphClass] = None) -> ShapeReport:
    """Match an AR triangle X -u-> Y -v-> Z -w-> X[1] against the five templates."""
    v_class = v_class or classify(triangle.v)
    x, y = triangle.X, triangle.Y
    degs = list(x.cells) + list(y.cells)
    lo, hi = (min(degs), max(degs)) if degs else (0, 0)
    uk, vk = u_class.kind, v_class.kind
    checks: List[Tuple[str, bool]] = []
    template = None
    if uk == "smonic":
        checks.append(("u smonic => v sepic", vk == "sepic"))
        u_flags = split_pattern(triangle.u).flags.values()
        checks.append(("u = [1; 0] in every degree", all(v in (MONO, BOTH) for v in u_flags)))
        checks.append(("Y^k = X^k + Z^k", _splits_off(x, y, triangle.Z)))
        template = "a"
    elif uk == "sepic":
        checks.append(("u sepic => v sirreducible", vk == "sirreducible"))
        if vk == "sirreducible":
            j = v_class.index
            checks.append((f"Y^k = 0 for k > {j}", _vanishes(y, range(j + 1, hi + 1))))
            checks.append((f"X^k = Y^k for k <= {j}", _same_size(x, y, range(lo, j + 1))))
            checks.append((f"v^{j} irreducible", _irreducible(triangle.v.comp(j))))
        template = "b"
    elif uk == "sirreducible":
        i = u_class.index
        checks.append(("u sirreducible => v smonic or sirreducible", vk in ("smonic", "sirreducible")))
        checks.append((f"X^k = 0 for k > {i}", _vanishes(x, range(i + 1, hi + 1))))
        if vk == "smonic":
            checks.append((f"Y^k = 0 for k < {i}", _vanishes(y, range(lo, i))))
            template = "c1"
        elif vk == "sirreducible":
            j = v_class.index
            if j <= i - 2:
                checks.append((f"Y^k = 0 for {j} < k < {i}", _vanishes(y, range(j + 1, i))))
                checks.append((f"X^k = Y^k for k <= {j}", _same_size(x, y, range(lo, j + 1))))
                template = "c2"
            elif j == i - 1:
                checks.append((f"X^k = Y^k for k < {i}", _same_size(x, y, range(lo, i))))
                template = "c3"
            else:
                checks.append((f"v pivot {j} below u pivot {i}", False))
    else:
        checks.append(("u is smonic, sepic or sirreducible", False))
    report = ShapeReport(u_class, v_class, template, checks)
    if not report.ok:
        failed = [name for name, ok in checks if not ok] or ["no template applies"]
        raise ShapeViolation(f"triangle matches no template (u {u_class}, v {v_class})", failed)
    return report


# ═══════════════════════════════════════════════════════════════
# Endomorphism algebras and indecomposability
# ═══════════════════════════════════════════════════════════════

class EndAlgebra:
    """End_K(X) for a minimal complex X, on the quotient basis of hom_K(X, X)."""

    def __init__(self, x: ProjComplex, hom: Optional[HomK] = None):
        self.x = x
        self.hom = hom or hom_K(x, x)
        self.basis = self.hom.basis
        self.dim = len(self.basis)
        self.field = x.alg.field
        self._products: Dict[Tuple[int, int], List] = {}
        self._scalars = [self._scalar_blocks(b) for b in self.basis]

    def _scalar_blocks(self, m: ChainMap) -> List[Matrix]:
        return [m.comp(n).scalar_matrix() for n in self.x.degrees()]

    def product(self, i: int, j: int) -> List:
        """Coordinates of b_i ∘ b_j."""
        key = (i, j)
        if key not in self._products:
            self._products[key] = self.hom.coordinates(compose(self.basis[i], self.basis[j]))
        return self._products[key]

    def element(self, coords: Sequence) -> ChainMap:
        return self.hom.combination(coords)

    def coordinates(self, m: ChainMap) -> List:
        return self.hom.coordinates(m)

    def one(self) -> List:
        return self.coordinates(identity(self.x))

    def left_matrix(self, coords: Sequence) -> Matrix:
        """Matrix of y |-> x∘y."""
        f = self.field
        cols = []
        for j in range(self.dim):
            col = [f.zero] * self.dim
            for i, c in enumerate(coords):
                if c != 0:
                    for k, p in enumerate(self.product(i, j)):
                        col[k] += c * p
            cols.append(col)
        return Matrix.from_columns(f, cols, self.dim)

    def trace_form(self) -> Matrix:
        """tr(ρ(b_k) ρ(b_l)) on the degreewise scalar parts."""
        f = self.field
        rows = []
        for k in range(self.dim):
            row = []
            for l in range(self.dim):
                t = f.zero
                for a, b in zip(self._scalars[k], self._scalars[l]):
                    if a.nrows:
                        prod = a @ b
                        t += sum((prod[q, q] for q in range(prod.nrows)), f.zero)
                row.append(t)
            rows.append(row)
        return Matrix(f, rows, self.dim, self.dim)

    def radical(self) -> List[List]:
        """Coordinates spanning rad End_K(X)."""
        if self.dim == 0:
            return []
        ker = kernel(self.trace_form())
        return [list(ker.col(j)) for j in range(ker.ncols)]

    def radical_maps(self) -> List[ChainMap]:
        return [self.element(v) for v in self.radical()]

    def top_dimension(self) -> int:
        return rank(self.trace_form()) if self.dim else 0

    def _fitting_kind(self, coords: Sequence) -> str:
        lm = self.left_matrix(coords)
        r = rank(lm)
        if r == self.dim:
            return "unit"
        p = lm
        for _ in range(self.dim):
            p = p @ lm
        return "nilpotent" if p.is_zero() else "split"

    def _schedule(self, seed: int, tries: int):
        f = self.field
        for i in range(self.dim):
            yield [f.one if k == i else f.zero for k in range(self.dim)]
        for i in range(self.dim):
            for j in range(self.dim):
                yield self.product(i, j)
        rng = random.Random(seed)
        for _ in range(tries):
            yield [f.random(rng) for _ in range(self.dim)]

    def splitting_element(self, seed: Optional[int] = None, tries: Optional[int] = None) -> Optional[ChainMap]:
        """An endomorphism neither nilpotent nor invertible, if the schedule finds one."""
        f = self.field
        one = self.one()
        total = sum(len(c) for c in self.x.cells.values())
        seed = config.SEED if seed is None else seed
        tries = config.RANDOM_TRIES if tries is None else tries
        for coords in self._schedule(seed, tries):
            candidates = [list(coords)]
            elem = self.element(coords)
            diag = [blk[q, q] for n in self.x.degrees()
                    for blk in [elem.comp(n).scalar_matrix()] for q in range(blk.nrows)]
            lams = set(diag)
            if total:
                lams.add(sum(diag, f.zero) / total)
            for lam in lams:
                candidates.append([c - lam * o for c, o in zip(coords, one)])
            for cand in candidates:
                if self._fitting_kind(cand) == "split":
                    return self.element(cand)
        return None


def is_indecomposable_K(x: ProjComplex) -> bool:
    """Local endomorphism ring test; exact when End/rad is one-dimensional or a splitting is found."""
    if x.is_zero():
        return False
    if not x.is_minimal():
        x = minimize(x).complex
        if x.is_zero():
            return False
    end = EndAlgebra(x)
    if end.dim == 1:
        return True
    top = end.top_dimension()
    if top == 1:
        return True
    if end.splitting_element() is not None:
        return False
    logger.warning("is_indecomposable_K: End/rad has dimension %d but no splitting element was found", top)
    return True


# ═══════════════════════════════════════════════════════════════
# Support and orthogonality checks
# ═══════════════════════════════════════════════════════════════

@dataclass
class ClauseResult:
    name: str
    applicable: bool
    passed: bool
    detail: str = ""


@dataclass
class SupportReport:
    clauses: List[ClauseResult]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        return next(c for c in self.clauses if c.name == name)

    def to_dict(self) -> Dict:
        return {c.name: {"applicable": c.applicable, "passed": c.passed, "detail": c.detail} for c in self.clauses}


def _anchors(x: ProjComplex, y: ProjComplex):
    degs = list(x.cells) + list(y.cells)
    lo, hi = min(degs), max(degs)
    span = hi - lo + 3
    for a in range(lo - 2, hi + 3):
        for t in range(0, span + 1):
            yield a, t


def support_checks(f: ChainMap, cls: MorphClass) -> SupportReport:
    """Degree-support constraints that an irreducible f must satisfy, each tried at every anchor degree."""
    x, y = f.source, f.target
    degs = list(x.cells) + list(y.cells)
    out: List[ClauseResult] = []
    if not degs:
        return SupportReport(out)
    lo, hi = min(degs), max(degs)

    def X(a, j):
        return bool(x.cell(a + j))

    def Y(a, j):
        return bool(y.cell(a + j))

    def none_below(pred, a, bound):
        return not any(pred(a, j) for j in range(lo - a - 1, bound))

    def none_above(pred, a, bound):
        return not any(pred(a, j) for j in range(bound + 1, hi - a + 2))

    def some(pred, a, rng):
        return any(pred(a, j) for j in rng)

    cases = {"a": False, "b": False, "c": False, "d": False}
    for a, t in _anchors(x, y):
        if (not cases["a"] and none_below(X, a, -t) and X(a, -t)
                and some(Y, a, range(lo - a - 1, -t))):
            cases["a"] = True
        if (not cases["b"] and none_above(X, a, 0) and none_below(Y, a, -t) and X(a, -(t + 1))
                and some(Y, a, range(1, hi - a + 2))):
            cases["b"] = True
        if (not cases["c"] and t > 0 and none_below(Y, a, -t) and none_above(Y, a, 0)
                and X(a, -(t + 1)) and X(a, 1)):
            cases["c"] = True
        if (not cases["d"] and t > 0 and none_below(X, a, -t) and X(a, 1) and Y(a, -(t + 1))
                and not Y(a, 1)):
            cases["d"] = True
    expected = {"a": "smonic", "b": "sirreducible", "c": "sepic"}
    for name in ("a", "b", "c"):
        applies = cases[name]
        out.append(ClauseResult(f"support_{expected[name]}", applies, (not applies) or cls.kind == expected[name],
                                f"expects {expected[name]}" if applies else "not applicable"))
    out.append(ClauseResult("support_no_irreducible", cases["d"], not cases["d"],
                            "support forbids an irreducible map" if cases["d"] else "not applicable"))
    # anchored above both tops: Y starts at most one degree below X
    applies = not x.is_zero() and not y.is_zero()
    passed = (not applies) or y.lo >= x.lo - 1
    out.append(ClauseResult("support_bound", applies, passed,
                            f"lo(Y)={y.lo}, lo(X)={x.lo}" if applies else "not applicable"))
    modules = is_module_complex(x) and is_module_complex(y)
    gap = modules and (-y.lo) >= (-x.lo) + 2
    out.append(ClauseResult("pd_gap", modules, not gap,
                            f"pd Y={-y.lo}, pd X={-x.lo}" if modules else "not module resolutions"))
    return SupportReport(out)


@dataclass
class OrthogonalityReport:
    projective: Dict[str, bool]
    injective: Dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.projective.values()) and all(self.injective.values())


def orthogonality_report(f: ChainMap) -> OrthogonalityReport:
    """Hom_K(C_f, P_i[0]) = 0 when X is a module, Hom_K(res I_i, C_f[-1]) = 0 when Y is a module."""
    alg = f.alg
    c = minimize(cone(f)[0]).complex
    proj: Dict[str, bool] = {}
    inj: Dict[str, bool] = {}
    if is_module_complex(f.source):
        for v in alg.vertices:
            proj[v] = hom_K(c, stalk(alg, [v], 0)).dimension == 0
    if is_module_complex(f.target):
        c1 = shift(c, -1)
        for v in alg.vertices:
            res = min_proj_resolution(standard_module(alg, "injective", v))
            inj[v] = hom_K(res, c1).dimension == 0
    return OrthogonalityReport(proj, inj)


def orthogonality_check(f: ChainMap) -> bool:
    return orthogonality_report(f).ok
