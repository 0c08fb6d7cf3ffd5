"""
Knitting
========
Nakayama functor and AR translate on bounded complexes of projectives,
AR triangles with verification reports, and mesh-by-mesh knitting of the
component that contains a given slice.

Positions in a knitted component are pairs (n, x): the node τ^{-n} x for a
slice vertex x. Meshes follow the translation quiver ℤΔ of the slice
quiver Δ: for an arrow x -> y of Δ there are arrows (n, x) -> (n, y) and
(n, y) -> (n+1, x).

Usage:
  from tools.artri.knitting import Slice, knit_component, tau_K, ar_triangle_ending
  sl = Slice.build({"1": p1, "2": p2, "3": p3}, [("1", "2", a), ("2", "3", b)])
  comp = knit_component(sl, steps_fwd=2, steps_bwd=1)
  sorted(comp.signatures())
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .complexes import (ChainMap, GradedMap, ProjComplex, Triangle, compose, cone, direct_sum, dual,
                        find_isomorphism, hom_K, is_isomorphic, is_null_homotopic, minimize, shift,
                        shift_map, signature, solve_graded, lift_map, zero_map)
from .errors import (MeshInconsistency, NoSocleElementError, NotIndecomposableError, PreconditionError,
                     ShapeViolation)
from .linalg import Matrix, kernel
from .path_algebra import BasicAlgebra, ProjMap
from .quiver_rep import RepMorphism, Representation, global_dimension, projective_rep, resolve
from .shapes import EndAlgebra, MorphClass, ShapeReport, classify, is_indecomposable_K, theorem2_shape

logger = logging.getLogger("artri.knitting")

Pos = Tuple[int, str]


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


# ═══════════════════════════════════════════════════════════════
# Nakayama functor and translate
# ═══════════════════════════════════════════════════════════════

@functools.lru_cache(maxsize=None)
def _certified_gldim(alg: BasicAlgebra, max_len: Optional[int]) -> int:
    gd = global_dimension(alg, max_len)
    logger.info("global dimension certified: %d", gd)
    return gd


def _nu_module(alg: BasicAlgebra, cells: Sequence[str]) -> Representation:
    """ν(⊕P_v) = ⊕I_v, as D of the opposite projectives."""
    return projective_rep(alg.opposite(), cells).dual()


def _nu_morphism(d: ProjMap, src: Representation, tgt: Representation) -> RepMorphism:
    t = d.transpose_op()
    return RepMorphism(src, tgt, {w: t.at_vertex(w).transpose() for w in d.alg.vertices})


def _totalize(alg: BasicAlgebra, cols: Dict[int, ProjComplex], higher: Dict[Tuple[int, int], GradedMap]) -> ProjComplex:
    order = sorted(cols)
    tdeg = sorted({n + m for n in order for m in cols[n].cells})
    cells = {t: sum((cols[n].cell(t - n) for n in order), ()) for t in tdeg}
    diffs = {}
    for t in tdeg:
        if t + 1 not in cells:
            continue
        rows = [cols[n].cell(t + 1 - n) for n in order]
        src = [cols[n].cell(t - n) for n in order]
        blocks = {}
        for j, n in enumerate(order):
            for i, n2 in enumerate(order):
                k = n2 - n
                if k == 0:
                    blocks[(i, j)] = cols[n].d(t - n).scale(_sign(n))
                elif k > 0 and (n, k) in higher:
                    blocks[(i, j)] = higher[(n, k)].comp(t - n)
        diffs[t] = ProjMap.block_matrix(alg, rows, src, blocks)
    return ProjComplex(alg, cells, diffs)


def nakayama(x: ProjComplex, max_len: Optional[int] = None) -> ProjComplex:
    """Termwise P_i -> I_i, each injective replaced by its projective resolution, totalized and minimized."""
    alg = x.alg
    _certified_gldim(alg, max_len)
    if x.is_zero():
        return x
    degs = x.degrees()
    mods = {n: _nu_module(alg, x.cell(n)) for n in degs}
    res = {n: resolve(mods[n], max_len=max_len) for n in degs}
    cols = {n: res[n].complex for n in degs}
    higher: Dict[Tuple[int, int], GradedMap] = {}
    for n in degs:
        if n + 1 in cols:
            higher[(n, 1)] = lift_map(_nu_morphism(x.d(n), mods[n], mods[n + 1]), res[n], res[n + 1])
    # D_k with Σ_{a+b=k} D_a D_b = 0
    for k in range(2, degs[-1] - degs[0] + 1):
        for n in degs:
            if n + k not in cols:
                continue
            rhs = None
            for b in range(1, k):
                first, second = higher.get((n, b)), higher.get((n + b, k - b))
                if first is None or second is None:
                    continue
                term = compose(second, first)
                rhs = term if rhs is None else rhs + term
            if rhs is None or rhs.is_zero():
                continue
            s = solve_graded(cols[n], cols[n + k], 1 - k, -rhs, _sign(n + k), _sign(n))
            if s is None:
                raise PreconditionError(f"nakayama: no correction term D_{k} from column {n}")
            higher[(n, k)] = s
    tot = _totalize(alg, cols, higher)
    out = minimize(tot).complex
    logger.debug("nakayama: %d cells -> %d cells (total %d)", x.rank(), out.rank(), tot.rank())
    return out


def tau_K(x: ProjComplex, direction: str = "tau", max_len: Optional[int] = None, check: bool = True) -> ProjComplex:
    """τX = ν(X)[-1]; τ⁻¹X = dual(τ_op(dual X))."""
    if check and not is_indecomposable_K(x):
        raise NotIndecomposableError(f"tau_K: {x!r} is not indecomposable")
    if direction in ("tau", "τ"):
        return minimize(shift(nakayama(x, max_len), -1)).complex
    if direction in ("tau_inv", "tau-inv", "τ⁻¹", "inverse"):
        return dual(tau_K(dual(x), "tau", max_len, check=False))
    raise PreconditionError(f"unknown direction {direction!r}")


def tau_inv_K(x: ProjComplex, max_len: Optional[int] = None, check: bool = True) -> ProjComplex:
    return tau_K(x, "tau_inv", max_len, check)


def tau_roundtrip(x: ProjComplex, max_len: Optional[int] = None) -> bool:
    """τ⁻¹τX ≅ X and ττ⁻¹X ≅ X."""
    there = tau_K(x, "tau", max_len)
    back = tau_K(x, "tau_inv", max_len)
    return (is_isomorphic(tau_K(there, "tau_inv", max_len, check=False), x)
            and is_isomorphic(tau_K(back, "tau", max_len, check=False), x))


# ═══════════════════════════════════════════════════════════════
# AR triangles
# ═══════════════════════════════════════════════════════════════

@dataclass
class ARReport:
    x_indecomposable: bool
    z_indecomposable: bool
    w_nonzero: bool
    radical_annihilated: bool
    sampled_nodes: int = 0
    sampled_annihilated: bool = True
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return {
            "x_indecomposable": self.x_indecomposable,
            "z_indecomposable": self.z_indecomposable,
            "w_nonzero": self.w_nonzero,
            "radical_annihilated": self.radical_annihilated,
            "sampled_nodes": self.sampled_nodes,
            "sampled_annihilated": self.sampled_annihilated,
            "ok": self.ok,
        }


def verify_ar(t: Triangle, others: Iterable[ProjComplex] = ()) -> ARReport:
    """End terms indecomposable, w ≠ 0 in 𝒦^b, and w kills radical maps into Z."""
    x_ok = is_indecomposable_K(t.X)
    z_ok = is_indecomposable_K(t.Z)
    w_ok = not hom_K(t.Z, t.w.target).is_zero_class(t.w)
    rad_ok = all(is_null_homotopic(compose(t.w, r)) for r in EndAlgebra(t.Z).radical_maps())
    sampled, sample_ok = 0, True
    z_sig = signature(t.Z) if t.Z.is_minimal() else None
    for node in others:
        if node == t.Z or (z_sig == signature(node) and is_isomorphic(node, t.Z)):
            continue
        sampled += 1
        for m in hom_K(node, t.Z).basis:
            if not is_null_homotopic(compose(t.w, m)):
                sample_ok = False
                break
    failures = [name for name, ok in (("X decomposable", x_ok), ("Z decomposable", z_ok), ("w is zero", w_ok),
                                      ("w does not kill rad End(Z)", rad_ok),
                                      ("w does not kill radical maps from other nodes", sample_ok)) if not ok]
    return ARReport(x_ok, z_ok, w_ok, rad_ok, sampled, sample_ok, failures)


@dataclass
class ARTriangleRecord:
    triangle: Triangle
    report: ARReport
    u_class: MorphClass
    v_class: MorphClass
    shape: Optional[ShapeReport] = None
    start: Optional[Pos] = None
    end: Optional[Pos] = None
    middle: List[Pos] = field(default_factory=list)
    shape_failures: List[str] = field(default_factory=list)

    @property
    def template(self) -> Optional[str]:
        return self.shape.template if self.shape else None

    def to_dict(self) -> Dict:
        t = self.triangle
        out = {
            "start": signature(t.X),
            "middle": signature(t.Y),
            "end": signature(t.Z),
            "u": self.u_class.to_dict(),
            "v": self.v_class.to_dict(),
            "template": self.template,
            "report": self.report.to_dict(),
        }
        if self.shape_failures:
            out["shape_failures"] = list(self.shape_failures)
        if self.start is not None:
            out["positions"] = {"start": list(self.start), "end": list(self.end),
                                "middle": [list(p) for p in self.middle]}
        return out


def _record(t: Triangle, others: Iterable[ProjComplex] = (), **where) -> ARTriangleRecord:
    report = verify_ar(t, others)
    u_class, v_class = classify(t.u), classify(t.v)
    shape, failures = None, []
    try:
        shape = theorem2_shape(u_class, t, v_class)
    except ShapeViolation as exc:
        logger.warning("mesh %s -> %s: %s %s", signature(t.X), signature(t.Z), exc, exc.diff)
        failures = exc.diff or [str(exc)]
    return ARTriangleRecord(t, report, u_class, v_class, shape, shape_failures=failures, **where)


def _socle(source: ProjComplex, target: ProjComplex, right: Sequence[ChainMap], left: Sequence[ChainMap]) -> ChainMap:
    """First w in Hom_K(source, target) with w∘r ≃ 0 and l∘w ≃ 0 for the given radical maps."""
    hom = hom_K(source, target)
    if hom.dimension == 0:
        raise NoSocleElementError(f"Hom_K({signature(source)}, {signature(target)}) = 0")
    fld = source.alg.field
    rows: List[List] = []
    for r in right:
        coords = [hom.coordinates(compose(b, r)) for b in hom.basis]
        rows.extend([coords[k][i] for k in range(hom.dimension)] for i in range(hom.dimension))
    for l in left:
        coords = [hom.coordinates(compose(l, b)) for b in hom.basis]
        rows.extend([coords[k][i] for k in range(hom.dimension)] for i in range(hom.dimension))
    ker = kernel(Matrix(fld, rows, len(rows), hom.dimension))
    if ker.ncols == 0:
        raise NoSocleElementError("no connecting morphism is annihilated by the radical")
    return hom.combination(ker.col(0))


def completed_triangle(u: ChainMap) -> Triangle:
    """X -u-> Y -v-> Z -w-> X[1] with Z = minimize(C_u)."""
    c, t_u, p_u = cone(u)
    red = minimize(c)
    return Triangle(u.source, u.target, red.complex, u, compose(red.phi, t_u), compose(p_u, red.psi))


def _complete(z: ProjComplex, x: ProjComplex, w: ChainMap) -> Triangle:
    """X -u-> E -v-> Z -w-> X[1] with E = minimize(C_w[-1])."""
    c, t_w, p_w = cone(w)
    red = minimize(shift(c, -1))
    u = compose(red.phi, -shift_map(t_w, -1))
    v = compose(-shift_map(p_w, -1), red.psi)
    return Triangle(x, red.complex, z, u, v, w)


def ar_triangle_ending(z: ProjComplex, max_len: Optional[int] = None,
                       others: Iterable[ProjComplex] = ()) -> ARTriangleRecord:
    if not is_indecomposable_K(z):
        raise NotIndecomposableError(f"ar_triangle_ending: {signature(z)} is not indecomposable")
    tz = tau_K(z, "tau", max_len, check=False)
    w = _socle(z, shift(tz, 1), EndAlgebra(z).radical_maps(),
               [shift_map(r, 1) for r in EndAlgebra(tz).radical_maps()])
    return _record(_complete(z, tz, w), others)


def ar_triangle_starting(x: ProjComplex, max_len: Optional[int] = None,
                         others: Iterable[ProjComplex] = ()) -> ARTriangleRecord:
    if not is_indecomposable_K(x):
        raise NotIndecomposableError(f"ar_triangle_starting: {signature(x)} is not indecomposable")
    z = tau_K(x, "tau_inv", max_len, check=False)
    w = _socle(z, shift(x, 1), EndAlgebra(z).radical_maps(),
               [shift_map(r, 1) for r in EndAlgebra(x).radical_maps()])
    return _record(_complete(z, x, w), others)


# ═══════════════════════════════════════════════════════════════
# Slices and components
# ═══════════════════════════════════════════════════════════════

@dataclass
class Slice:
    names: List[str]
    nodes: Dict[str, ProjComplex]
    arrows: Dict[Tuple[str, str], ChainMap]
    graph: nx.DiGraph

    @classmethod
    def build(cls, nodes: Dict[str, ProjComplex], arrows: Sequence[Tuple[str, str, ChainMap]]) -> "Slice":
        g = nx.DiGraph()
        g.add_nodes_from(nodes)
        amap = {}
        for s, t, f in arrows:
            if s not in nodes or t not in nodes:
                raise PreconditionError(f"slice arrow {s}->{t} uses an unknown node")
            g.add_edge(s, t)
            amap[(s, t)] = f
        return cls(list(nodes), dict(nodes), amap, g)

    @property
    def alg(self) -> BasicAlgebra:
        return next(iter(self.nodes.values())).alg

    def order(self) -> List[str]:
        """Sources first; ties broken by declaration order."""
        return list(nx.lexicographical_topological_sort(self.graph, key=self.names.index))

    def successors(self, x: str) -> List[str]:
        return sorted(self.graph.successors(x), key=self.names.index)

    def predecessors(self, x: str) -> List[str]:
        return sorted(self.graph.predecessors(x), key=self.names.index)

    def verify(self) -> Dict[Tuple[str, str], MorphClass]:
        if not self.nodes:
            raise PreconditionError("empty slice")
        if not nx.is_directed_acyclic_graph(self.graph):
            raise PreconditionError("slice quiver has an oriented cycle")
        if len(self.nodes) > 1 and not nx.is_weakly_connected(self.graph):
            raise PreconditionError("slice quiver is not connected")
        for name, x in self.nodes.items():
            if not x.is_minimal() or x.is_zero():
                raise PreconditionError(f"slice node {name} is not a nonzero minimal complex")
        classes = {}
        for key, f in self.arrows.items():
            if f.source != self.nodes[key[0]] or f.target != self.nodes[key[1]] or not f.is_chain_map():
                raise PreconditionError(f"slice arrow {key[0]}->{key[1]} is not a chain map between its nodes")
            cls = classify(f)
            if cls.kind == "unclassified":
                raise PreconditionError(f"slice arrow {key[0]}->{key[1]} is not irreducible")
            classes[key] = cls
        return classes


@dataclass
class ARComponent:
    alg: BasicAlgebra
    nodes: Dict[Pos, ProjComplex] = field(default_factory=dict)
    names: Dict[Pos, str] = field(default_factory=dict)
    arrows: Dict[Tuple[Pos, Pos], ChainMap] = field(default_factory=dict)
    classes: Dict[Tuple[Pos, Pos], MorphClass] = field(default_factory=dict)
    meshes: List[ARTriangleRecord] = field(default_factory=list)
    tau_pairs: List[Tuple[Pos, Pos]] = field(default_factory=list)   # (τX, X)
    orbits: List[str] = field(default_factory=list)            # slice vertices, sources first

    def signatures(self) -> List[str]:
        return [self.names[p] for p in self.positions()]

    def positions(self) -> List[Pos]:
        return sorted(self.nodes, key=lambda p: (p[0], p[1]))

    def by_signature(self) -> Dict[str, ProjComplex]:
        return {self.names[p]: self.nodes[p] for p in self.nodes}

    def arrows_by_name(self) -> List[Tuple[str, str, ChainMap]]:
        return [(self.names[s], self.names[t], f) for (s, t), f in sorted(self.arrows.items())]

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for p in self.positions():
            g.add_node(p, signature=self.names[p])
        for (s, t) in self.arrows:
            cls = self.classes.get((s, t))
            g.add_edge(s, t, cls=str(cls) if cls else "")
        return g

    def _register(self, pos: Pos, x: ProjComplex) -> str:
        sig = signature(x)
        name = sig
        clash = [p for p, n in self.names.items() if n.split("#")[0] == sig and p != pos]
        if clash:
            same = [p for p in clash if is_isomorphic(self.nodes[p], x)]
            if same:
                logger.warning("node at %s repeats %s from %s", pos, sig, same[0])
                name = self.names[same[0]]
            else:
                name = f"{sig}#{len(clash) + 1}"
                logger.warning("signature %s is shared by non-isomorphic nodes; naming %s", sig, name)
        self.nodes[pos] = x
        self.names[pos] = name
        return name


def _sum_into(maps: Sequence[ChainMap], incs: Sequence[ChainMap], source: ProjComplex, target: ProjComplex) -> ChainMap:
    out = zero_map(source, target)
    for m, inc in zip(maps, incs):
        out = out + compose(inc, m)
    return out


def _forward_mesh(comp: ARComponent, sl: Slice, n: int, x: str, cross_check: bool, max_len) -> None:
    start, end = (n, x), (n + 1, x)
    xc = comp.nodes[start]
    middle = [(n, y) for y in sl.successors(x)] + [(n + 1, z) for z in sl.predecessors(x)]
    if not middle:
        raise PreconditionError(f"slice vertex {x} has no neighbours")
    e, incs, _ = direct_sum([comp.nodes[m] for m in middle])
    u = _sum_into([comp.arrows[(start, m)] for m in middle], incs, xc, e)
    tri = completed_triangle(u)
    z, v = tri.Z, tri.v
    if cross_check:
        oracle = tau_K(xc, "tau_inv", max_len, check=False)
        if find_isomorphism(oracle, z) is None:
            raise MeshInconsistency(f"τ⁻¹{signature(xc)}: cone gives {signature(z)}, Nakayama gives "
                                    f"{signature(oracle)}")
    comp._register(end, z)
    for k, m in enumerate(middle):
        key = (m, end)
        comp.arrows[key] = compose(v, incs[k])
        comp.classes[key] = classify(comp.arrows[key])
    comp.tau_pairs.append((start, end))
    others = [comp.nodes[p] for p in comp.nodes if p != end]
    comp.meshes.append(_record(tri, others, start=start, end=end, middle=middle))


def _backward_mesh(comp: ARComponent, sl: Slice, n: int, x: str, cross_check: bool, max_len) -> None:
    start, end = (n - 1, x), (n, x)
    zc = comp.nodes[end]
    middle = [(n - 1, y) for y in sl.successors(x)] + [(n, z) for z in sl.predecessors(x)]
    if not middle:
        raise PreconditionError(f"slice vertex {x} has no neighbours")
    e, _, projs = direct_sum([comp.nodes[m] for m in middle])
    v = zero_map(e, zc)
    for k, m in enumerate(middle):
        v = v + compose(comp.arrows[(m, end)], projs[k])
    c, t_v, p_v = cone(v)
    red = minimize(shift(c, -1))
    xc = red.complex
    u = compose(-shift_map(p_v, -1), red.psi)
    w = compose(shift_map(red.phi, 1), t_v)
    if cross_check:
        oracle = tau_K(zc, "tau", max_len, check=False)
        if find_isomorphism(oracle, xc) is None:
            raise MeshInconsistency(f"τ{signature(zc)}: cone gives {signature(xc)}, Nakayama gives "
                                    f"{signature(oracle)}")
    comp._register(start, xc)
    for k, m in enumerate(middle):
        key = (start, m)
        comp.arrows[key] = compose(projs[k], u)
        comp.classes[key] = classify(comp.arrows[key])
    comp.tau_pairs.append((start, end))
    tri = Triangle(xc, e, zc, u, v, w)
    others = [comp.nodes[p] for p in comp.nodes if p != end]
    comp.meshes.append(_record(tri, others, start=start, end=end, middle=middle))


def knit_component(sl: Slice, steps_fwd: int, steps_bwd: int, cross_check: bool = True,
                   max_len: Optional[int] = None) -> ARComponent:
    """One step translates every slice vertex once; forward steps apply τ⁻¹, backward steps τ."""
    if steps_fwd < 0 or steps_bwd < 0:
        raise PreconditionError("step counts must be non-negative")
    classes = sl.verify()
    alg = sl.alg
    _certified_gldim(alg, max_len)
    comp = ARComponent(alg, orbits=sl.order())
    for name in sl.names:
        comp._register((0, name), sl.nodes[name])
    for (s, t), f in sl.arrows.items():
        comp.arrows[((0, s), (0, t))] = f
        comp.classes[((0, s), (0, t))] = classes[(s, t)]
    order = sl.order()
    for n in range(steps_fwd):
        for x in order:
            _forward_mesh(comp, sl, n, x, cross_check, max_len)
            logger.info("knit: τ^-%d %s = %s", n + 1, x, comp.names[(n + 1, x)])
    for n in range(0, -steps_bwd, -1):
        for x in reversed(order):
            _backward_mesh(comp, sl, n, x, cross_check, max_len)
            logger.info("knit: τ^%d %s = %s", 1 - n, x, comp.names[(n - 1, x)])
    failed = [m for m in comp.meshes if not m.report.ok]
    if failed:
        m = failed[0]
        raise MeshInconsistency(f"mesh {signature(m.triangle.X)} -> {signature(m.triangle.Z)} fails "
                                f"AR verification: {', '.join(m.report.failures)}")
    logger.info("knit: %d nodes, %d arrows, %d meshes", len(comp.nodes), len(comp.arrows), len(comp.meshes))
    return comp


def classify_component_arrows(comp: ARComponent) -> Dict[Tuple[Pos, Pos], MorphClass]:
    """Classify every arrow and match every mesh to a shape template; raises ShapeViolation."""
    table = {key: classify(f) for key, f in sorted(comp.arrows.items())}
    comp.classes.update(table)
    for rec in comp.meshes:
        rec.shape = theorem2_shape(rec.u_class, rec.triangle, rec.v_class)
    return table
