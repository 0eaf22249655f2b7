"""Tree-parallel decomposition of circulation spaces.

A decomposition tree recursively partitions the edge set.  At a tree-split
the parts pairwise share at most one vertex and contract to a tree, so the
circulation space splits block-diagonally across parts.  At a parallel
split the parts pairwise share exactly the split's (s, t) pair, and the
circulation space gains one cross-part block: the span of the parts'
minimum-energy unit st-flows, minus the direction that carries net flow.

The reflection through the circulation space is synthesized as a product of
layer reflections.  Each parallel node u contributes the block

    B_u = E_u(span{psi_u}^perp),  psi_u = sum_j |f_j|^-1 |j>,

where E_u maps |j> to the normalized minimum-energy flow of part j; all
blocks over all parallel nodes are mutually orthogonal and their direct sum
is the whole circulation space.  The returned reflection R satisfies
(I - R)/2 = projector onto the circulation space, matching the direct
basis-built projector to operator-norm tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import netlab
from ._linalg import operator_norm
from ._util import UnionFind

INF = math.inf


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class DecompNode:
    label: frozenset  # edge ids
    kind: str  # "leaf" | "tree" | "parallel"
    st: tuple = None  # (s, t) for parallel splits
    children: tuple = ()

    def depth(self) -> int:
        if self.kind == "leaf":
            return 0
        return 1 + max(c.depth() for c in self.children)


@dataclass(frozen=True)
class DecompositionTree:
    root: DecompNode

    def depth(self) -> int:
        return self.root.depth()


def leaf(eid) -> DecompNode:
    return DecompNode(frozenset([eid]), "leaf")


def tree_split(children) -> DecompNode:
    children = tuple(children)
    label = frozenset().union(*(c.label for c in children))
    return DecompNode(label, "tree", None, children)


def parallel_split(children, s, t) -> DecompNode:
    children = tuple(children)
    label = frozenset().union(*(c.label for c in children))
    return DecompNode(label, "parallel", (s, t), children)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _part_vertices(net: netlab.ResistorNetwork, eids) -> set:
    out = set()
    for e in net.edges:
        if e.eid in eids:
            out.add(e.tail)
            out.add(e.head)
    return out


def _contracts_to_tree(parts_vertices) -> bool:
    """Tree condition: the incidence structure of parts and their shared
    vertices must be acyclic (each shared vertex links the parts through it)."""
    shared = {}
    for i, vs in enumerate(parts_vertices):
        for v in vs:
            shared.setdefault(v, []).append(i)
    uf = UnionFind(range(len(parts_vertices)))
    for v, parts in shared.items():
        if len(parts) < 2:
            continue
        base = parts[0]
        for other in parts[1:]:
            if not uf.union(base, other):
                return False
    return True


def validate_decomposition(net: netlab.ResistorNetwork, tree: DecompositionTree) -> list:
    """All structural conditions; returns a list of violations (empty = ok)."""
    violations = []
    all_edges = frozenset(e.eid for e in net.edges)
    if tree.root.label != all_edges:
        violations.append(("root", "root label must equal the full edge set"))

    def visit(node: DecompNode, path: str):
        if node.kind == "leaf":
            if len(node.label) != 1:
                violations.append((path, "leaf label must be a single edge"))
            return
        if not node.children:
            violations.append((path, "internal node without children"))
            return
        union = set()
        for c in node.children:
            if not c.label:
                violations.append((path, "empty child label"))
            if union & c.label:
                violations.append((path, "children labels overlap"))
            union |= c.label
        if union != set(node.label):
            violations.append((path, "children do not partition the parent label"))
        parts_vs = [_part_vertices(net, c.label) for c in node.children]
        if node.kind == "tree":
            for i in range(len(parts_vs)):
                for j in range(i + 1, len(parts_vs)):
                    if len(parts_vs[i] & parts_vs[j]) > 1:
                        violations.append((path, f"tree parts {i},{j} share more than one vertex"))
            if not _contracts_to_tree(parts_vs):
                violations.append((path, "contracted part graph is not a tree"))
        elif node.kind == "parallel":
            if node.st is None or len(node.st) != 2 or node.st[0] == node.st[1]:
                violations.append((path, "parallel split needs a distinct (s, t) pair"))
            elif len(node.children) < 2:
                violations.append((path, "parallel split needs at least two parts"))
            else:
                st = set(node.st)
                for i in range(len(parts_vs)):
                    for j in range(i + 1, len(parts_vs)):
                        if parts_vs[i] & parts_vs[j] != st:
                            violations.append((path, f"parallel parts {i},{j} do not share exactly (s, t)"))
        else:
            violations.append((path, f"unknown node kind {node.kind!r}"))
        for i, c in enumerate(node.children):
            visit(c, f"{path}.{i}")

    visit(tree.root, "root")
    return violations


# ---------------------------------------------------------------------------
# automatic construction
# ---------------------------------------------------------------------------

def _subnet(net: netlab.ResistorNetwork, eids):
    edges = tuple(e for e in net.edges if e.eid in eids)
    vs = set()
    for e in edges:
        vs.add(e.tail)
        vs.add(e.head)
    return netlab.ResistorNetwork(tuple(sorted(vs, key=str)), edges)


def _biconnected_edge_components(net: netlab.ResistorNetwork):
    """Edge partition into biconnected blocks (iterative Hopcroft-Tarjan).

    Parallel edges and self-loops are fine: a self-loop forms its own block.
    """
    adj = {v: [] for v in net.vertices}
    for idx, e in enumerate(net.edges):
        if e.tail == e.head:
            continue
        adj[e.tail].append((e.head, idx))
        adj[e.head].append((e.tail, idx))

    time = [0]
    disc, low = {}, {}
    stack = []
    comps = []

    for root in net.vertices:
        if root in disc:
            continue
        work = [(root, None, None, iter(adj[root]))]
        disc[root] = low[root] = time[0]
        time[0] += 1
        while work:
            v, parent, pedge, it = work[-1]
            advanced = False
            for w, eidx in it:
                if eidx == pedge:
                    continue
                if w not in disc:
                    stack.append(eidx)
                    disc[w] = low[w] = time[0]
                    time[0] += 1
                    work.append((w, v, eidx, iter(adj[w])))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    stack.append(eidx)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
                if low[v] >= disc[pv]:
                    comp = []
                    while stack:
                        eidx = stack.pop()
                        comp.append(eidx)
                        if eidx == pedge:
                            break
                    if comp:
                        comps.append(frozenset(net.edges[i].eid for i in comp))
    loops = [frozenset([e.eid]) for e in net.edges if e.tail == e.head]
    return comps + loops


def _parallel_partition(net: netlab.ResistorNetwork, s, t):
    """Parts of a parallel split at (s, t): components of G - {s, t} plus
    each direct s-t edge.  Returns None unless this yields >= 2 valid parts."""
    uf = UnionFind(v for v in net.vertices if v not in (s, t))
    direct = []
    touched = {}
    for e in net.edges:
        ends = {e.tail, e.head}
        if ends == {s, t}:
            direct.append(e.eid)
            continue
        inner = [v for v in ends if v not in (s, t)]
        if len(inner) == 2:
            uf.union(inner[0], inner[1])
    for e in net.edges:
        ends = {e.tail, e.head}
        if ends == {s, t} or e.tail == e.head:
            continue
        inner = [v for v in ends if v not in (s, t)]
        if inner:
            touched.setdefault(uf.find(inner[0]), []).append(e.eid)
        else:
            return None  # self loop at s or t: bail out, handled by blocks
    parts = [frozenset(eids) for eids in touched.values()]
    parts += [frozenset([eid]) for eid in direct]
    if len(parts) < 2:
        return None
    # every part must contain both s and t and connect them internally
    for part in parts:
        vs = _part_vertices(net, part)
        if s not in vs or t not in vs:
            return None
        sub = _subnet(net, part)
        ufp = UnionFind(sub.vertices)
        for e in sub.edges:
            ufp.union(e.tail, e.head)
        if not ufp.connected(s, t):
            return None
    return parts


def auto_decompose(net: netlab.ResistorNetwork) -> DecompositionTree:
    """Valid tree-parallel decomposition of a connected normalized network.

    Strategy: split into biconnected blocks (a tree split), then inside a
    block pick the vertex pair whose removal most evenly splits the edges
    (a parallel split); depth stays logarithmic on series-parallel graphs
    and is bounded by |E| in general.
    """
    if not net.edges:
        raise DecompositionError("empty networks have no decomposition")

    def build(eids) -> DecompNode:
        if len(eids) == 1:
            return leaf(next(iter(eids)))
        sub = _subnet(net, eids)
        blocks = _biconnected_edge_components(sub)
        if len(blocks) > 1:
            return tree_split(build(b) for b in blocks)
        # single biconnected block with >= 2 edges: find a parallel split
        best = None
        verts = list(sub.vertices)
        for i in range(len(verts)):
            for j in range(i + 1, len(verts)):
                parts = _parallel_partition(sub, verts[i], verts[j])
                if parts is None:
                    continue
                score = (max(len(p) for p in parts), -len(parts))
                if best is None or score < best[0]:
                    best = (score, verts[i], verts[j], parts)
        if best is None:
            raise DecompositionError("biconnected block admits no parallel split")
        _, s, t, parts = best
        return parallel_split((build(p) for p in parts), s, t)

    root = build(frozenset(e.eid for e in net.edges))
    return DecompositionTree(root)


# ---------------------------------------------------------------------------
# projectors and reflections
# ---------------------------------------------------------------------------

def circulation_projector_direct(net: netlab.ResistorNetwork) -> np.ndarray:
    """Projector onto the circulation space from an orthonormal basis."""
    basis = netlab.circulation_matrix(net)
    if basis.shape[1] == 0:
        return np.zeros((len(net.edges), len(net.edges)))
    return basis @ basis.T


def _edge_index(net: netlab.ResistorNetwork) -> dict:
    return {e.eid: i for i, e in enumerate(net.edges)}


def reflection_from_decomposition(net: netlab.ResistorNetwork, tree: DecompositionTree):
    """(reflection, projector) on the edge space from the layer product.

    Layer l applies, for every parallel node at depth l-1, the reflection
    through the complement of its cross-part circulation block, built from
    the per-part minimum-energy unit flows and the combination state psi_u.
    (I - R)/2 is the circulation projector.
    """
    violations = validate_decomposition(net, tree)
    if violations:
        raise DecompositionError(f"invalid decomposition: {violations[:3]}")
    m = len(net.edges)
    idx = _edge_index(net)

    # collect parallel nodes grouped by depth
    layers = {}

    def visit(node: DecompNode, depth: int):
        if node.kind == "parallel":
            layers.setdefault(depth, []).append(node)
        for c in node.children:
            visit(c, depth + 1)

    visit(tree.root, 0)

    reflection = np.eye(m)
    for depth in sorted(layers):
        layer_op = np.eye(m)
        for node in layers[depth]:
            s, t = node.st
            cols = []
            norms = []
            for child in node.children:
                sub = _subnet(net, child.label)
                if s not in sub.vertex_index() or t not in sub.vertex_index():
                    raise DecompositionError("parallel part misses its terminals")
                flow, energy = netlab.min_energy_unit_flow(sub, s, t)
                if flow is None:
                    raise DecompositionError(
                        f"parallel part {sorted(child.label)} does not connect its (s, t)")
                vec = np.zeros(m)
                for eid, c in flow.coeffs.items():
                    vec[idx[eid]] = c
                nrm = math.sqrt(energy)
                cols.append(vec / nrm)
                norms.append(nrm)
            emb = np.stack(cols, axis=1)  # m x k, orthonormal columns
            psi = np.array([1.0 / n for n in norms])
            psi /= np.linalg.norm(psi)
            # projector onto E_u(span{psi}^perp) = E E^T - (E psi)(E psi)^T
            epsi = emb @ psi
            block = emb @ emb.T - np.outer(epsi, epsi)
            layer_op = layer_op @ (np.eye(m) - 2.0 * block)
        reflection = reflection @ layer_op
    proj = (np.eye(m) - reflection) / 2.0
    return reflection, proj


@dataclass(frozen=True)
class DecompositionCost:
    depth: int
    branch_bounds: tuple  # k_l per layer
    combo_count: int  # K = prod(k_l + 1)
    qrom_bits: float  # ~ |E| * K
    gates: float  # ~ depth * log2(K)


def decomposition_cost(tree: DecompositionTree, edge_count=None) -> DecompositionCost:
    """Symbolic cost report for implementing the layered reflection."""
    widths = {}

    def visit(node: DecompNode, depth: int):
        if node.kind != "leaf":
            widths[depth] = max(widths.get(depth, 0), len(node.children))
            for c in node.children:
                visit(c, depth + 1)

    visit(tree.root, 0)
    if not widths:
        return DecompositionCost(0, (), 1, 0.0, 0.0)
    d = max(widths) + 1
    ks = tuple(widths.get(i, 1) for i in range(d))
    combo = 1
    for k in ks:
        combo *= k + 1
    edges = edge_count if edge_count is not None else len(tree.root.label)
    return DecompositionCost(d, ks, combo, float(edges * combo), float(d * max(1.0, math.log2(combo))))


def spectral_gap(net: netlab.ResistorNetwork) -> float:
    """Smallest nonzero eigenvalue of the symmetrically normalized Laplacian.

    Built from conductances 1/r: L = I - D^(-1/2) A D^(-1/2) with A the
    conductance-weighted adjacency and D the conductance degrees; eigenvalues
    below the rank threshold count as zero.
    """
    if not net.all_finite_positive():
        raise DecompositionError("normalize the network first")
    n = len(net.vertices)
    vi = net.vertex_index()
    a = np.zeros((n, n))
    deg = np.zeros(n)
    for e in net.edges:
        c = 1.0 / e.r
        i, j = vi[e.tail], vi[e.head]
        if i == j:
            continue
        a[i, j] += c
        a[j, i] += c
        deg[i] += c
        deg[j] += c
    if np.any(deg <= 0):
        raise DecompositionError("isolated vertex in the network")
    dinv = 1.0 / np.sqrt(deg)
    lap = np.eye(n) - (a * dinv[np.newaxis, :]) * dinv[:, np.newaxis]
    w = np.linalg.eigvalsh(lap)
    cutoff = 1e-9 * max(abs(w[-1]), 1.0)
    nonzero = w[w > cutoff]
    if nonzero.size == 0:
        raise DecompositionError("normalized Laplacian has no nonzero eigenvalue")
    return float(nonzero[0])


# -- JSON ------------------------------------------------------------------

def tree_to_json(tree: DecompositionTree) -> dict:
    def enc(node: DecompNode):
        out = {"label": sorted(str(e) for e in node.label), "kind": node.kind}
        if node.st is not None:
            out["st"] = [str(node.st[0]), str(node.st[1])]
        if node.children:
            out["children"] = [enc(c) for c in node.children]
        return out

    return enc(tree.root)


def tree_from_json(obj: dict) -> DecompositionTree:
    def dec(o) -> DecompNode:
        children = tuple(dec(c) for c in o.get("children", []))
        st = tuple(o["st"]) if "st" in o else None
        return DecompNode(frozenset(o["label"]), o["kind"], st, children)

    return DecompositionTree(dec(obj))
