"""Graph composition: span programs on the edges of a resistor network.

The composed program's state space is the direct sum of the edge programs'
spaces.  Each edge's resistance is the squared norm of its program's initial
vector, the free subspace collects the per-edge free subspaces plus the
embedded circulation space, and the initial vector embeds the minimum-energy
unit st-flow.  Witness sizes then reduce to effective resistances:

* positive size = resistance of the network with r+_e = w+(x, P_e),
* negative size = reciprocal resistance with conductances w-(x, P_e)^-1.

Edges carry :class:`EdgeProgram` objects.  Trivial single-bit programs and
whole sub-compositions evaluate their witness sizes without materializing
matrices, which keeps catalog-scale graphs (thousands of edges) cheap; the
dense :func:`compose` route exists for anything that must become an honest
:class:`~gclab.spanprog.SpanProgram` (small graphs, simulation).

Resistances are never set directly: scaling an edge program rescales the
derived resistance, see :meth:`EdgeProgram.scaled`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import netlab, spanprog
from ._linalg import operator_norm, orthonormal_columns, projector
from ._util import UnionFind

INF = math.inf


class CompositionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# predicates for trivial edge programs
# ---------------------------------------------------------------------------

def eval_predicate(pred, x) -> bool:
    """Evaluate a predicate tuple against an input.

    Forms (indices 0-based):
      ('bit', j, b)   x[j] == b for bitstrings (b in {0,1} or '0'/'1')
      ('eq', i, c)    x[i] == c       ('neq', i, c) negation
      ('lt', i, j)    x[i] < x[j]     ('geq', i, j) negation
      ('const', v)    constant v; out-of-range indices make 'eq'/'bit' false.
    """
    kind = pred[0]
    if kind == "const":
        return bool(pred[1])
    if kind == "bit":
        _, j, b = pred
        return 0 <= j < len(x) and str(x[j]) == str(b)
    if kind == "eq":
        _, i, c = pred
        return 0 <= i < len(x) and x[i] == c
    if kind == "neq":
        _, i, c = pred
        return not (0 <= i < len(x) and x[i] == c)
    if kind == "lt":
        _, i, j = pred
        return 0 <= i < len(x) and 0 <= j < len(x) and x[i] < x[j]
    if kind == "geq":
        _, i, j = pred
        return not (0 <= i < len(x) and 0 <= j < len(x) and x[i] < x[j])
    raise CompositionError(f"unknown predicate {pred!r}")


def negate_predicate(pred):
    kind = pred[0]
    flip = {"bit": None, "eq": "neq", "neq": "eq", "lt": "geq", "geq": "lt"}
    if kind == "const":
        return ("const", not pred[1])
    if kind == "bit":
        _, j, b = pred
        return ("nbit", j, b)
    if kind == "nbit":
        _, j, b = pred
        return ("bit", j, b)
    return (flip[kind],) + tuple(pred[1:])


def _eval_pred_full(pred, x):
    if pred[0] == "nbit":
        return not eval_predicate(("bit",) + tuple(pred[1:]), x)
    return eval_predicate(pred, x)


# ---------------------------------------------------------------------------
# edge programs
# ---------------------------------------------------------------------------

class EdgeProgram:
    """What an edge must provide: classification, witness sizes, materialization."""

    def classify(self, x) -> bool:
        raise NotImplementedError

    def wplus(self, x) -> float:
        raise NotImplementedError

    def wminus(self, x) -> float:
        raise NotImplementedError

    @property
    def r(self) -> float:
        """Derived edge resistance ||w0||^2."""
        raise NotImplementedError

    def span_program(self) -> spanprog.SpanProgram:
        raise NotImplementedError

    def negated(self) -> "EdgeProgram":
        raise NotImplementedError

    def scaled(self, alpha: float) -> "EdgeProgram":
        raise NotImplementedError


@dataclass(frozen=True)
class TrivialEdgeProgram(EdgeProgram):
    """Scaled one-dimensional program deciding a predicate; closed-form witnesses."""

    pred: tuple
    scale: float = 1.0

    def classify(self, x) -> bool:
        return _eval_pred_full(self.pred, x)

    def wplus(self, x) -> float:
        return self.scale if self.classify(x) else INF

    def wminus(self, x) -> float:
        return INF if self.classify(x) else 1.0 / self.scale

    @property
    def r(self) -> float:
        return self.scale

    def span_program(self) -> spanprog.SpanProgram:
        base = spanprog.trivial(lambda x: _eval_pred_full(self.pred, x), name=str(self.pred))
        return spanprog.scalar_multiply(base, self.scale) if self.scale != 1.0 else base

    def negated(self) -> "TrivialEdgeProgram":
        return TrivialEdgeProgram(negate_predicate(self.pred), 1.0 / self.scale)

    def scaled(self, alpha: float) -> "TrivialEdgeProgram":
        return TrivialEdgeProgram(self.pred, self.scale * alpha)


class SpanEdgeProgram(EdgeProgram):
    """Edge carrying an explicit span program; witnesses via exact solves."""

    def __init__(self, program: spanprog.SpanProgram):
        self.program = program

    def classify(self, x) -> bool:
        return spanprog.classify(self.program, x) == "positive"

    def wplus(self, x) -> float:
        return spanprog.positive_witness(self.program, x).size

    def wminus(self, x) -> float:
        return spanprog.negative_witness(self.program, x).size

    @property
    def r(self) -> float:
        return self.program.initial_norm_sq()

    def span_program(self) -> spanprog.SpanProgram:
        return self.program

    def negated(self) -> "SpanEdgeProgram":
        return SpanEdgeProgram(spanprog.negate(self.program))

    def scaled(self, alpha: float) -> "SpanEdgeProgram":
        return SpanEdgeProgram(spanprog.scalar_multiply(self.program, alpha))


class ComposedEdgeProgram(EdgeProgram):
    """Edge carrying a whole sub-composition, evaluated lazily.

    ``negated`` flips classification and swaps the witness sizes, matching
    program negation without building complement subspaces.
    """

    def __init__(self, cg: "CompositionGraph", negated: bool = False, scale: float = 1.0):
        self.cg = cg
        self.neg = negated
        self.scale = scale
        self._r_base = None

    def classify(self, x) -> bool:
        on = classify_connectivity(self.cg, x)
        return (not on) if self.neg else on

    def _wp_wm(self, x):
        wp, wm = witness_sizes_via_resistance(self.cg, x)
        if self.neg:
            wp, wm = wm, wp
        if self.scale != 1.0:
            wp = wp * self.scale if wp != INF else INF
            wm = wm / self.scale if wm != INF else INF
        return wp, wm

    def wplus(self, x) -> float:
        return self._wp_wm(x)[0]

    def wminus(self, x) -> float:
        return self._wp_wm(x)[1]

    @property
    def r(self) -> float:
        if self._r_base is None:
            rnet = self.cg.network()
            energy = netlab.effective_resistance(rnet)
            self._r_base = energy
        base = (1.0 / self._r_base) if self.neg else self._r_base
        return base * self.scale

    def span_program(self) -> spanprog.SpanProgram:
        p = compose(self.cg)
        if self.neg:
            p = spanprog.negate(p)
        if self.scale != 1.0:
            p = spanprog.scalar_multiply(p, self.scale)
        return p

    def negated(self) -> "ComposedEdgeProgram":
        return ComposedEdgeProgram(self.cg, not self.neg, 1.0 / self.scale)

    def scaled(self, alpha: float) -> "ComposedEdgeProgram":
        return ComposedEdgeProgram(self.cg, self.neg, self.scale * alpha)


def as_edge_program(p) -> EdgeProgram:
    if isinstance(p, EdgeProgram):
        return p
    if isinstance(p, spanprog.SpanProgram):
        return SpanEdgeProgram(p)
    raise CompositionError(f"not an edge program: {p!r}")


# ---------------------------------------------------------------------------
# composition graphs
# ---------------------------------------------------------------------------

@dataclass
class CompositionGraph:
    """Resistor-network skeleton whose edges carry span programs."""

    vertices: tuple
    edges: tuple  # (eid, tail, head)
    s: object
    t: object
    programs: dict  # eid -> EdgeProgram

    def __post_init__(self):
        ids = [e[0] for e in self.edges]
        if len(set(ids)) != len(ids):
            raise CompositionError("duplicate edge ids")
        missing = [e for e in ids if e not in self.programs]
        if missing:
            raise CompositionError(f"edges without programs: {missing[:4]}")
        self.programs = {k: as_edge_program(v) for k, v in self.programs.items()}
        uf = UnionFind(self.vertices)
        for _, u, v in self.edges:
            uf.union(u, v)
        if not uf.connected(self.s, self.t):
            raise CompositionError("s and t must be connected in the skeleton")

    def network(self, r_map=None) -> netlab.ResistorNetwork:
        """Underlying resistor network; default resistances are derived."""
        rs = r_map or {eid: self.programs[eid].r for eid, _, _ in self.edges}
        edges = tuple(netlab.Edge(eid, u, v, rs[eid]) for eid, u, v in self.edges)
        return netlab.ResistorNetwork(self.vertices, edges, self.s, self.t)

    def sorted_edges(self):
        return sorted(self.edges, key=lambda e: str(e[0]))

    def _index_arrays(self):
        """Cached integer arrays (vertex count, tails, heads, programs, s, t)."""
        cached = getattr(self, "_arrays", None)
        if cached is None:
            vi = {v: i for i, v in enumerate(self.vertices)}
            tails = [vi[u] for _, u, _ in self.edges]
            heads = [vi[v] for _, _, v in self.edges]
            progs = [self.programs[eid] for eid, _, _ in self.edges]
            cached = (len(self.vertices), tails, heads, progs, vi[self.s], vi[self.t])
            self._arrays = cached
        return cached


def classify_connectivity(cg: CompositionGraph, x) -> bool:
    """True iff s,t are connected along edges whose programs accept x."""
    nv, tails, heads, progs, s, t = cg._index_arrays()
    uf = UnionFind(range(nv))
    for u, v, prog in zip(tails, heads, progs):
        if prog.classify(x):
            uf.union(u, v)
    return uf.connected(s, t)


def witness_sizes_via_resistance(cg: CompositionGraph, x):
    """(w+, w-) of the composed program via the two effective resistances."""
    nv, tails, heads, progs, s, t = cg._index_arrays()
    r_plus = [p.wplus(x) for p in progs]
    r_minus = []
    for p in progs:
        wm = p.wminus(x)
        r_minus.append(INF if wm == 0 else (0.0 if wm == INF else 1.0 / wm))
    rp = netlab.resistance_fast(nv, tails, heads, r_plus, s, t)
    rm = netlab.resistance_fast(nv, tails, heads, r_minus, s, t)
    wplus = rp
    wminus = INF if rm == 0 else (0.0 if rm == INF else 1.0 / rm)
    return wplus, wminus


def compose(cg: CompositionGraph) -> spanprog.SpanProgram:
    """Materialize the composed span program.

    Blocks are laid out in edge-id order; the embedding sends the weighted
    edge basis vector of edge e to that edge's normalized initial vector in
    its block, so serialized programs are reproducible.
    """
    edges = cg.sorted_edges()
    progs = [cg.programs[eid].span_program() for eid, _, _ in edges]
    dims = [p.dim for p in progs]
    offsets = np.cumsum([0] + dims)
    dim = int(offsets[-1])

    emb = np.zeros((dim, len(edges)))
    for j, p in enumerate(progs):
        norm = math.sqrt(p.initial_norm_sq())
        if norm == 0:
            raise CompositionError("edge program with zero initial vector")
        emb[offsets[j]:offsets[j] + dims[j], j] = p.w0 / norm

    rnet = cg.network({eid: p.initial_norm_sq() for (eid, _, _), p in zip(edges, progs)})
    # align network edge order with block order
    rnet = netlab.ResistorNetwork(
        rnet.vertices,
        tuple(sorted(rnet.edges, key=lambda e: str(e.eid))),
        rnet.s,
        rnet.t,
    )
    flow, energy = netlab.min_energy_unit_flow(rnet)
    if flow is None:
        raise CompositionError("s and t disconnected under derived resistances")
    w0 = emb @ flow.vector(rnet)

    circ = netlab.circulation_matrix(rnet)
    kcols = [emb @ circ] if circ.shape[1] else []
    for j, p in enumerate(progs):
        kb = p.k_basis()
        if kb.shape[1]:
            block = np.zeros((dim, kb.shape[1]))
            block[offsets[j]:offsets[j] + dims[j], :] = kb
            kcols.append(block)
    kgen = np.hstack(kcols) if kcols else None

    def hx(x, _progs=progs, _offsets=offsets, _dim=dim):
        cols = []
        for j, p in enumerate(_progs):
            hb = p.h_basis(x)
            if hb.shape[1]:
                block = np.zeros((_dim, hb.shape[1]))
                block[_offsets[j]:_offsets[j] + dims[j], :] = hb
                cols.append(block)
        return np.hstack(cols) if cols else np.zeros((_dim, 0))

    domain = None
    for p in progs:
        if p.inputs is not None:
            domain = p.inputs
            break
    return spanprog.SpanProgram(dim, w0, kgen, hx, inputs=domain, name="composed")


# ---------------------------------------------------------------------------
# logical compositions
# ---------------------------------------------------------------------------

def _fresh_cg(edge_programs, series: bool) -> CompositionGraph:
    n = len(edge_programs)
    if n == 0:
        raise CompositionError("need at least one program")
    programs = {f"e{i}": as_edge_program(p) for i, p in enumerate(edge_programs)}
    if series:
        vertices = tuple(["s"] + [f"v{i}" for i in range(1, n)] + ["t"])
        names = list(vertices)
        edges = tuple((f"e{i}", names[i], names[i + 1]) for i in range(n))
    else:
        vertices = ("s", "t")
        edges = tuple((f"e{i}", "s", "t") for i in range(n))
    return CompositionGraph(vertices, edges, "s", "t", programs)


def and_compose(programs) -> CompositionGraph:
    """Line-graph composition: witness sizes add / combine harmonically."""
    return _fresh_cg(list(programs), series=True)


def or_compose(programs) -> CompositionGraph:
    """Parallel composition between two vertices."""
    return _fresh_cg(list(programs), series=False)


def variable_time_or(programs, wplus_bounds=None, inputs=None) -> CompositionGraph:
    """OR of programs scaled by 1/W+ each, so the composed W+ is at most 1.

    ``wplus_bounds`` supplies the W+ values; otherwise they are computed as
    maxima over ``inputs`` (or over each program's explicit domain).
    """
    programs = [as_edge_program(p) for p in programs]
    if wplus_bounds is None:
        wplus_bounds = []
        for p in programs:
            dom = inputs
            if dom is None and isinstance(p, SpanEdgeProgram) and p.program.inputs is not None:
                dom = p.program.inputs
            if dom is None:
                raise CompositionError("need wplus_bounds or an input list")
            vals = [p.wplus(x) for x in dom if p.classify(x)]
            wplus_bounds.append(max(vals) if vals else 1.0)
    scaled = []
    for p, w in zip(programs, wplus_bounds):
        if not (0 < w < INF):
            raise CompositionError("W+ bounds must be finite positive")
        scaled.append(p.scaled(1.0 / w))
    return or_compose(scaled)


# ---------------------------------------------------------------------------
# bounds from certificates
# ---------------------------------------------------------------------------

def _is_st_path(cg: CompositionGraph, edge_ids) -> bool:
    """edge_ids, in order, must walk from s to t (orientation-free)."""
    cur = cg.s
    lookup = {eid: (u, v) for eid, u, v in cg.edges}
    seen = set()
    for eid in edge_ids:
        if eid in seen or eid not in lookup:
            return False
        seen.add(eid)
        u, v = lookup[eid]
        if cur == u:
            cur = v
        elif cur == v:
            cur = u
        else:
            return False
    return cur == cg.t


def _is_st_cut(cg: CompositionGraph, edge_ids) -> bool:
    cut = set(edge_ids)
    if not cut <= {eid for eid, _, _ in cg.edges}:
        return False
    uf = UnionFind(cg.vertices)
    for eid, u, v in cg.edges:
        if eid not in cut:
            uf.union(u, v)
    return not uf.connected(cg.s, cg.t)


def path_cut_bounds(cg: CompositionGraph, x, path=None, cut=None) -> float:
    """Certificate upper bound on a witness size.

    A path of accepting edges bounds w+ by the sum of their positive sizes;
    a cut of rejecting edges bounds w- by the sum of their negative sizes.
    """
    if (path is None) == (cut is None):
        raise CompositionError("supply exactly one of path/cut")
    if path is not None:
        if not _is_st_path(cg, path):
            raise CompositionError("not a valid st-path")
        sizes = []
        for eid in path:
            p = cg.programs[eid]
            if not p.classify(x):
                raise CompositionError(f"path edge {eid!r} is negative on this input")
            sizes.append(p.wplus(x))
        return float(sum(sizes))
    if not _is_st_cut(cg, cut):
        raise CompositionError("not a valid st-cut")
    sizes = []
    for eid in cut:
        p = cg.programs[eid]
        if p.classify(x):
            raise CompositionError(f"cut edge {eid!r} is positive on this input")
        sizes.append(p.wminus(x))
    return float(sum(sizes))


# ---------------------------------------------------------------------------
# st-connectivity instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StConnInstance:
    """Resistor network whose edges switch on single input bits."""

    net: netlab.ResistorNetwork
    j: dict  # eid -> bit index (0-based)
    b: dict  # eid -> expected bit (0/1)
    n_bits: int

    def __post_init__(self):
        for e in self.net.edges:
            if e.eid not in self.j or e.eid not in self.b:
                raise CompositionError(f"edge {e.eid!r} missing j/b")
            if not (0 <= self.j[e.eid] < self.n_bits):
                raise CompositionError(f"edge {e.eid!r}: index out of range")
            if self.b[e.eid] not in (0, 1):
                raise CompositionError(f"edge {e.eid!r}: b must be 0/1")
            if not (0 < e.r < INF):
                raise CompositionError("instance resistances must be positive finite")


def from_st_instance(inst: StConnInstance) -> CompositionGraph:
    """Edge e carries r_e * (bit program) for b=1, r_e * (negated bit) for b=0."""
    programs = {}
    for e in inst.net.edges:
        pred = ("bit", inst.j[e.eid], 1) if inst.b[e.eid] == 1 else ("nbit", inst.j[e.eid], 1)
        programs[e.eid] = TrivialEdgeProgram(pred, e.r)
    edges = tuple((e.eid, e.tail, e.head) for e in inst.net.edges)
    return CompositionGraph(inst.net.vertices, edges, inst.net.s, inst.net.t, programs)


# ---------------------------------------------------------------------------
# series-parallel terms and planar duals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SPTerm:
    """Series-parallel term over edge programs: kind in {leaf, series, parallel}."""

    kind: str
    program: object = None
    children: tuple = ()

    @staticmethod
    def leaf(p) -> "SPTerm":
        return SPTerm("leaf", as_edge_program(p))

    @staticmethod
    def series(children) -> "SPTerm":
        return SPTerm("series", None, tuple(children))

    @staticmethod
    def parallel(children) -> "SPTerm":
        return SPTerm("parallel", None, tuple(children))


def sp_dual(term: SPTerm) -> SPTerm:
    """Planar dual of a series-parallel term: swap series/parallel, negate leaves."""
    if term.kind == "leaf":
        return SPTerm("leaf", term.program.negated())
    dual_children = tuple(sp_dual(c) for c in term.children)
    return SPTerm("parallel" if term.kind == "series" else "series", None, dual_children)


def sp_scale(term: SPTerm, alpha: float) -> SPTerm:
    """Scale a whole term: equivalent to scaling every leaf program."""
    if term.kind == "leaf":
        return SPTerm("leaf", term.program.scaled(alpha))
    return SPTerm(term.kind, None, tuple(sp_scale(c, alpha) for c in term.children))


def sp_materialize(term: SPTerm) -> CompositionGraph:
    """Expand a series-parallel term into a composition graph.

    Leaf edge ids record the traversal path, so a term and its dual get
    identically-labeled edges (the canonical pairing).
    """
    vertices = ["s", "t"]
    edges = []
    programs = {}
    counter = [0]

    def fresh():
        counter[0] += 1
        return f"n{counter[0]}"

    def build(node: SPTerm, a, b, path: str):
        if node.kind == "leaf":
            eid = f"L{path}" if path else "L0"
            edges.append((eid, a, b))
            programs[eid] = node.program
            return
        if node.kind == "series":
            cur = a
            last = len(node.children) - 1
            for i, c in enumerate(node.children):
                nxt = b if i == last else fresh()
                if nxt != b:
                    vertices.append(nxt)
                build(c, cur, nxt, f"{path}.{i}" if path else str(i))
                cur = nxt
            return
        if node.kind == "parallel":
            for i, c in enumerate(node.children):
                build(c, a, b, f"{path}.{i}" if path else str(i))
            return
        raise CompositionError(f"bad SP term kind {node.kind!r}")

    build(term, "s", "t", "")
    return CompositionGraph(tuple(vertices), tuple(edges), "s", "t", programs)


@dataclass(frozen=True)
class DualCheckReport:
    ok: bool
    k_space_gap: float
    w0_gap: float
    max_witness_rel_gap: float
    violations: tuple


def planar_dual_negation_check(cg: CompositionGraph, dual: CompositionGraph,
                               pairing: dict, test_inputs=()) -> DualCheckReport:
    """Verify that negating a composition equals composing the dual graph.

    The caller supplies the dual graph (dual edge programs must be the
    negations, dual resistances the reciprocals) and the e -> e-dual pairing.
    Checked numerically: equal free subspaces, equal initial vectors, and
    equal per-input witness sizes on the supplied inputs.
    """
    violations = []
    ids = [eid for eid, _, _ in cg.edges]
    dual_ids = [eid for eid, _, _ in dual.edges]
    if sorted(pairing.keys()) != sorted(ids) or sorted(pairing.values()) != sorted(dual_ids):
        raise CompositionError("pairing is not a bijection between edge sets")
    for eid in ids:
        r = cg.programs[eid].r
        rd = dual.programs[pairing[eid]].r
        if abs(rd - 1.0 / r) > 1e-8 * max(1.0, 1.0 / r):
            raise CompositionError(f"resistance reciprocity violated on edge {eid!r}")

    neg = spanprog.negate(compose(cg))
    # rebuild the dual with edge ids renamed through the inverse pairing so
    # both programs share one block layout
    inv = {v: k for k, v in pairing.items()}
    dual_renamed = CompositionGraph(
        dual.vertices,
        tuple((inv[eid], u, v) for eid, u, v in dual.edges),
        dual.s,
        dual.t,
        {inv[eid]: p for eid, p in dual.programs.items()},
    )
    dualp = compose(dual_renamed)

    if neg.dim != dualp.dim:
        violations.append("state-space dimensions differ")
        return DualCheckReport(False, INF, INF, INF, tuple(violations))
    k_gap = operator_norm(projector(neg.k_basis()) - projector(dualp.k_basis()))
    w0_gap = float(np.linalg.norm(neg.w0 - dualp.w0))
    if k_gap > 1e-8:
        violations.append(f"free subspaces differ (gap {k_gap:.2e})")
    if w0_gap > 1e-8:
        violations.append(f"initial vectors differ (gap {w0_gap:.2e})")

    max_rel = 0.0
    for x in test_inputs:
        for func in (spanprog.positive_witness, spanprog.negative_witness):
            a = func(neg, x).size
            b = func(dualp, x).size
            if a == INF and b == INF:
                continue
            if a == INF or b == INF:
                violations.append(f"witness feasibility differs on {x!r}")
                max_rel = INF
                continue
            rel = abs(a - b) / max(abs(a), 1e-12)
            max_rel = max(max_rel, rel)
            if rel > 1e-6:
                violations.append(f"witness size differs on {x!r} ({rel:.2e})")
    return DualCheckReport(not violations, k_gap, w0_gap, max_rel, tuple(violations))


# -- JSON ------------------------------------------------------------------

def _program_to_json(p: EdgeProgram):
    if isinstance(p, TrivialEdgeProgram):
        return {"kind": "trivial", "pred": list(p.pred), "scale": p.scale}
    if isinstance(p, SpanEdgeProgram) and p.program.inputs is not None:
        return {"kind": "span", "program": spanprog.program_to_json(p.program)}
    raise CompositionError("only trivial / explicit-domain programs serialize")


def _program_from_json(obj) -> EdgeProgram:
    if obj["kind"] == "trivial":
        return TrivialEdgeProgram(tuple(obj["pred"]), float(obj.get("scale", 1.0)))
    if obj["kind"] == "span":
        return SpanEdgeProgram(spanprog.program_from_json(obj["program"]))
    raise CompositionError(f"unknown program kind {obj['kind']!r}")


def composition_to_json(cg: CompositionGraph) -> dict:
    net = cg.network()
    out = netlab.network_to_json(net)
    out["programs"] = {str(eid): _program_to_json(p) for eid, p in cg.programs.items()}
    return out


def composition_from_json(obj: dict) -> CompositionGraph:
    net = netlab.network_from_json(obj)
    programs = {eid: _program_from_json(spec) for eid, spec in obj["programs"].items()}
    edges = tuple((e.eid, e.tail, e.head) for e in net.edges)
    return CompositionGraph(net.vertices, edges, net.s, net.t, programs)


def st_instance_to_json(inst: StConnInstance) -> dict:
    out = netlab.network_to_json(inst.net)
    out["j"] = {str(k): v for k, v in inst.j.items()}
    out["b"] = {str(k): v for k, v in inst.b.items()}
    out["n_bits"] = inst.n_bits
    return out


def st_instance_from_json(obj: dict) -> StConnInstance:
    net = netlab.network_from_json(obj)
    return StConnInstance(
        net,
        {k: int(v) for k, v in obj["j"].items()},
        {k: int(v) for k, v in obj["b"].items()},
        int(obj.get("n_bits", 1 + max(int(v) for v in obj["j"].values()))),
    )
