"""Electrical-network engine on resistor multigraphs.

Networks are undirected multigraphs whose edges carry a fixed default
orientation (tail -> head) and a resistance in [0, inf].  All flow
mathematics happens in the weighted edge basis: a flow ``f`` is stored as
the coefficient vector ``g_e = f_e * sqrt(r_e)``, so that ``||g||^2`` is the
energy of the flow.  In that basis

* circulations (zero net flow everywhere) span the null space of
  ``B @ diag(1/sqrt(r))`` where ``B`` is the signed incidence matrix,
* the minimum-energy unit st-flow is the min-norm solution of
  ``B @ diag(1/sqrt(r)) @ g = e_s - e_t``, and its energy is the effective
  resistance between ``s`` and ``t``,
* potential-induced flows are exactly the orthogonal complement of the
  circulation space.

Resistance 0 and inf are distinguished values handled by graph surgery
(contraction / deletion) in :func:`normalize_network`, never fed to solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from ._linalg import RANK_RTOL, null_space
from ._util import UnionFind

INF = math.inf

# Networks at or below this vertex count use the dense eigendecomposition
# route for Laplacian solves; larger nets use sparse grounded LU.
_DENSE_LIMIT = 400


class NetworkError(ValueError):
    """Malformed network or inconsistent query."""


@dataclass(frozen=True)
class Edge:
    eid: str
    tail: object
    head: object
    r: float

    def __post_init__(self):
        if not (self.r >= 0):
            raise NetworkError(f"edge {self.eid}: resistance must be in [0, inf], got {self.r}")


@dataclass(frozen=True)
class ResistorNetwork:
    """Undirected resistor multigraph with optional source/sink."""

    vertices: tuple
    edges: tuple
    s: object = None
    t: object = None

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise NetworkError("duplicate vertex ids")
        seen = set()
        for e in self.edges:
            if e.eid in seen:
                raise NetworkError(f"duplicate edge id {e.eid!r}")
            seen.add(e.eid)
            if e.tail not in vs or e.head not in vs:
                raise NetworkError(f"edge {e.eid!r} has undeclared endpoint")
        for name, v in (("s", self.s), ("t", self.t)):
            if v is not None and v not in vs:
                raise NetworkError(f"{name}={v!r} is not a declared vertex")
        if self.s is not None and self.t is not None and self.s == self.t:
            raise NetworkError("s and t must differ")

    # -- indexing helpers -------------------------------------------------
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def edge_ids(self) -> list:
        return [e.eid for e in self.edges]

    def incidence_matrix(self) -> np.ndarray:
        """Signed incidence B: +1 at the tail, -1 at the head of each edge."""
        vi = self.vertex_index()
        b = np.zeros((len(self.vertices), len(self.edges)))
        for j, e in enumerate(self.edges):
            b[vi[e.tail], j] += 1.0
            b[vi[e.head], j] -= 1.0
        return b

    def resistances(self) -> np.ndarray:
        return np.array([e.r for e in self.edges])

    def all_finite_positive(self) -> bool:
        return all(0 < e.r < INF for e in self.edges)


def network(vertices, edges, s=None, t=None) -> ResistorNetwork:
    """Build a network from (eid, tail, head, r) tuples."""
    es = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
    return ResistorNetwork(tuple(vertices), es, s, t)


@dataclass(frozen=True)
class FlowState:
    """Weighted-basis flow coefficients ``g_e = f_e * sqrt(r_e)``, keyed by edge id."""

    coeffs: dict

    def vector(self, net: ResistorNetwork) -> np.ndarray:
        return np.array([self.coeffs.get(e.eid, 0.0) for e in net.edges])

    def norm_sq(self) -> float:
        return float(sum(c * c for c in self.coeffs.values()))


@dataclass(frozen=True)
class Potential:
    values: dict

    def vector(self, net: ResistorNetwork) -> np.ndarray:
        return np.array([self.values[v] for v in net.vertices])


@dataclass(frozen=True)
class NormalizeResult:
    network: ResistorNetwork
    merge_map: dict
    short_circuit: bool = False
    dropped_edges: tuple = field(default_factory=tuple)


def _merged_name(members) -> object:
    if len(members) == 1:
        return members[0]
    return "+".join(str(m) for m in sorted(members, key=str))


def normalize_network(net: ResistorNetwork) -> NormalizeResult:
    """Delete every r = inf edge and contract every r = 0 edge.

    Merged vertices get a deterministic joined name.  If the contraction
    merges ``s`` into ``t`` the result is flagged as a short circuit rather
    than raised: a zero-resistance s-t connection is a legitimate outcome.
    """
    uf = UnionFind(net.vertices)
    dropped = []
    for e in net.edges:
        if e.r == INF:
            dropped.append(e.eid)
        elif e.r == 0:
            uf.union(e.tail, e.head)
            dropped.append(e.eid)
    groups = uf.groups()
    rep_name = {root: _merged_name(members) for root, members in groups.items()}
    merge_map = {v: rep_name[uf.find(v)] for v in net.vertices}

    short = (
        net.s is not None
        and net.t is not None
        and uf.connected(net.s, net.t)
    )
    new_vertices = tuple(sorted(set(merge_map.values()), key=str))
    new_edges = []
    for e in net.edges:
        if e.r == INF or e.r == 0:
            continue
        tail, head = merge_map[e.tail], merge_map[e.head]
        new_edges.append(Edge(e.eid, tail, head, e.r))
    new_s = merge_map[net.s] if net.s is not None else None
    new_t = merge_map[net.t] if net.t is not None else None
    if short:
        # s and t collapse to one vertex; keep the merged net without terminals.
        new_net = ResistorNetwork(new_vertices, tuple(new_edges), None, None)
    else:
        new_net = ResistorNetwork(new_vertices, tuple(new_edges), new_s, new_t)
    return NormalizeResult(new_net, merge_map, short, tuple(dropped))


def _weighted_incidence(net: ResistorNetwork) -> np.ndarray:
    """B @ diag(1/sqrt(r)); requires finite positive resistances."""
    if not net.all_finite_positive():
        raise NetworkError("normalize the network first: resistances must be in (0, inf)")
    b = net.incidence_matrix()
    return b / np.sqrt(net.resistances())[np.newaxis, :]


def circulation_basis(net: ResistorNetwork) -> list:
    """Orthonormal basis of the circulation space, as FlowStates.

    Dimension is |E| - |V| + #components (self-loops included).
    """
    m = _weighted_incidence(net)
    basis = null_space(m, RANK_RTOL)
    eids = net.edge_ids()
    return [FlowState({eid: float(c) for eid, c in zip(eids, basis[:, j])}) for j in range(basis.shape[1])]


def circulation_matrix(net: ResistorNetwork) -> np.ndarray:
    """Orthonormal circulation basis as a matrix with |E| rows."""
    m = _weighted_incidence(net)
    return null_space(m, RANK_RTOL)


def _st_vector(net: ResistorNetwork, s, t) -> np.ndarray:
    vi = net.vertex_index()
    if s not in vi or t not in vi:
        raise NetworkError(f"unknown terminal {s!r} or {t!r}")
    if s == t:
        raise NetworkError("s and t must differ")
    b = np.zeros(len(net.vertices))
    b[vi[s]] = 1.0
    b[vi[t]] = -1.0
    return b


def _terminals(net: ResistorNetwork, s, t):
    s = net.s if s is None else s
    t = net.t if t is None else t
    if s is None or t is None:
        raise NetworkError("source/sink not set")
    return s, t


def _connected(net: ResistorNetwork, s, t) -> bool:
    uf = UnionFind(net.vertices)
    for e in net.edges:
        if e.r < INF:
            uf.union(e.tail, e.head)
    return uf.connected(s, t)


def min_energy_unit_flow(net: ResistorNetwork, s=None, t=None):
    """Minimum-energy unit st-flow and its energy.

    Returns ``(FlowState, energy)``; for disconnected terminals returns
    ``(None, inf)``.  The flow state is the min-norm solution in the
    weighted basis and is orthogonal to every circulation.
    """
    s, t = _terminals(net, s, t)
    if not _connected(net, s, t):
        return None, INF
    m = _weighted_incidence(net)
    b = _st_vector(net, s, t)
    g, *_ = np.linalg.lstsq(m, b, rcond=RANK_RTOL)
    if np.linalg.norm(m @ g - b) > 1e-8:
        return None, INF
    eids = net.edge_ids()
    state = FlowState({eid: float(v) for eid, v in zip(eids, g)})
    return state, float(g @ g)


def _laplacian_dense(net: ResistorNetwork) -> np.ndarray:
    b = net.incidence_matrix()
    w = 1.0 / net.resistances()
    return (b * w[np.newaxis, :]) @ b.T


def _resistance_dense(net: ResistorNetwork, s, t) -> float:
    lap = _laplacian_dense(net)
    w, v = np.linalg.eigh(lap)
    cutoff = RANK_RTOL * max(w[-1], 1.0)
    inv = np.where(w > cutoff, 1.0 / np.where(w > cutoff, w, 1.0), 0.0)
    b = _st_vector(net, s, t)
    y = v.T @ b
    return float(y @ (inv * y))


def _resistance_sparse(net: ResistorNetwork, s, t) -> float:
    vi = net.vertex_index()
    n = len(net.vertices)
    rows, cols, vals = [], [], []
    for e in net.edges:
        c = 1.0 / e.r
        i, j = vi[e.tail], vi[e.head]
        if i == j:
            continue
        rows += [i, j, i, j]
        cols += [i, j, j, i]
        vals += [c, c, -c, -c]
    lap = scipy.sparse.csc_matrix((vals, (rows, cols)), shape=(n, n))
    ground = vi[t]
    keep = np.arange(n) != ground
    lap_red = lap[keep][:, keep]
    rhs = np.zeros(n)
    rhs[vi[s]] = 1.0
    rhs_red = rhs[keep]
    sol = scipy.sparse.linalg.spsolve(lap_red + 1e-14 * scipy.sparse.eye(n - 1, format="csc"), rhs_red)
    u = np.zeros(n)
    u[keep] = sol
    return float(u[vi[s]] - u[ground])


def effective_resistance(net: ResistorNetwork, s=None, t=None, method: str = "auto") -> float:
    """Effective resistance between s and t; inf when disconnected.

    Handles raw networks (normalizes internally).  ``method`` selects the
    code path: "laplacian" (pseudoinverse quadratic form), "flow" (min-norm
    flow energy), or "auto" (laplacian, sparse-grounded above desk scale).
    """
    s, t = _terminals(net, s, t)
    norm = normalize_network(ResistorNetwork(net.vertices, net.edges, s, t))
    if norm.short_circuit:
        return 0.0
    net2 = norm.network
    s2, t2 = net2.s, net2.t
    if not _connected(net2, s2, t2):
        return INF
    if method == "flow":
        _, energy = min_energy_unit_flow(net2, s2, t2)
        return energy
    if method == "laplacian" or len(net2.vertices) <= _DENSE_LIMIT:
        return _resistance_dense(net2, s2, t2)
    return _resistance_sparse(net2, s2, t2)


def resistance_fast(num_vertices: int, tails, heads, resist, s: int, t: int) -> float:
    """Array-level effective resistance for integer-indexed graphs.

    Same semantics as :func:`effective_resistance` (0 for a short circuit,
    inf for disconnection) but without network objects: zero-resistance
    edges are contracted by union-find, the graph is restricted to the
    terminal component, and the grounded Laplacian system is solved
    directly.  This is the sweep workhorse; the object-level routes remain
    the cross-checked reference.
    """
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    resist = np.asarray(resist, dtype=float)
    uf = UnionFind(range(num_vertices))
    zero = resist == 0.0
    for a, b in zip(tails[zero], heads[zero]):
        uf.union(int(a), int(b))
    if uf.connected(s, t):
        return 0.0
    keep = (resist > 0) & np.isfinite(resist)
    tails, heads, resist = tails[keep], heads[keep], resist[keep]

    # restrict to the component of s among contracted vertices
    comp = UnionFind(range(num_vertices))
    merged = [(uf.find(int(a)), uf.find(int(b))) for a, b in zip(tails, heads)]
    for a, b in merged:
        comp.union(a, b)
    root_s = comp.find(uf.find(s))
    if comp.find(uf.find(t)) != root_s:
        return INF

    relabel = {}

    def rep(v):
        if v not in relabel:
            relabel[v] = len(relabel)
        return relabel[v]

    s2 = rep(uf.find(s))
    t2 = rep(uf.find(t))
    rows = []
    for (a, b), r in zip(merged, resist):
        if comp.find(a) != root_s or a == b:
            continue
        rows.append((rep(a), rep(b), 1.0 / r))
    n2 = len(relabel)
    if n2 > _DENSE_LIMIT:
        tt = np.array([r[0] for r in rows])
        hh = np.array([r[1] for r in rows])
        cc = np.array([r[2] for r in rows])
        lap = scipy.sparse.csc_matrix(
            (np.concatenate([cc, cc, -cc, -cc]),
             (np.concatenate([tt, hh, tt, hh]), np.concatenate([tt, hh, hh, tt]))),
            shape=(n2, n2))
        keep_idx = np.arange(n2) != t2
        rhs = np.zeros(n2)
        rhs[s2] = 1.0
        sol = scipy.sparse.linalg.spsolve(
            lap[keep_idx][:, keep_idx].tocsc(), rhs[keep_idx])
        u = np.zeros(n2)
        u[keep_idx] = sol
        return float(u[s2])
    lap = np.zeros((n2, n2))
    for a, b, c in rows:
        lap[a, a] += c
        lap[b, b] += c
        lap[a, b] -= c
        lap[b, a] -= c
    keep_idx = [i for i in range(n2) if i != t2]
    rhs = np.zeros(n2)
    rhs[s2] = 1.0
    sol = np.linalg.solve(lap[np.ix_(keep_idx, keep_idx)], rhs[keep_idx])
    u = np.zeros(n2)
    u[keep_idx] = sol
    return float(u[s2])


def potential_flow(net: ResistorNetwork, potential: Potential) -> FlowState:
    """Flow state induced by a vertex potential.

    In the weighted basis the coefficient on edge e is
    ``(U_tail - U_head) / sqrt(r_e)``; r = 0 edges require equal endpoint
    potentials (0/0 = 0) and r = inf edges carry no flow.
    """
    coeffs = {}
    for e in net.edges:
        du = potential.values[e.tail] - potential.values[e.head]
        if e.r == INF:
            coeffs[e.eid] = 0.0
        elif e.r == 0:
            if abs(du) > 1e-9:
                raise NetworkError(f"potential jumps across zero-resistance edge {e.eid!r}")
            coeffs[e.eid] = 0.0
        else:
            coeffs[e.eid] = du / math.sqrt(e.r)
    return FlowState(coeffs)


def inverse_resistance_via_potentials(net: ResistorNetwork, s=None, t=None) -> float:
    """Minimum of ||flow state of U||^2 over potentials with U_s - U_t = 1.

    Equals 1/effective_resistance; the minimizing potential is harmonic.
    Returns 0 for disconnected terminals and inf for a short circuit.
    """
    s, t = _terminals(net, s, t)
    norm = normalize_network(ResistorNetwork(net.vertices, net.edges, s, t))
    if norm.short_circuit:
        return INF
    net2 = norm.network
    if not _connected(net2, net2.s, net2.t):
        return 0.0
    lap = _laplacian_dense(net2)
    w, v = np.linalg.eigh(lap)
    cutoff = RANK_RTOL * max(w[-1], 1.0)
    inv = np.where(w > cutoff, 1.0 / np.where(w > cutoff, w, 1.0), 0.0)
    b = _st_vector(net2, net2.s, net2.t)
    u = v @ (inv * (v.T @ b))
    vi = net2.vertex_index()
    drop = u[vi[net2.s]] - u[vi[net2.t]]
    u = u / drop
    pot = Potential({vx: float(val) for vx, val in zip(net2.vertices, u)})
    return potential_flow(net2, pot).norm_sq()


# -- JSON ----------------------------------------------------------------

def network_to_json(net: ResistorNetwork) -> dict:
    from ._util import json_number

    out = {
        "vertices": [str(v) for v in net.vertices],
        "edges": [
            {"id": str(e.eid), "tail": str(e.tail), "head": str(e.head), "r": json_number(e.r)}
            for e in net.edges
        ],
    }
    if net.s is not None:
        out["s"] = str(net.s)
    if net.t is not None:
        out["t"] = str(net.t)
    return out


def network_from_json(obj: dict) -> ResistorNetwork:
    from ._util import parse_number

    edges = [Edge(e["id"], e["tail"], e["head"], parse_number(e["r"])) for e in obj["edges"]]
    return ResistorNetwork(tuple(obj["vertices"]), tuple(edges), obj.get("s"), obj.get("t"))


def flow_to_json(state: FlowState) -> dict:
    return {"coeffs": {str(k): v for k, v in state.coeffs.items()}}


def flow_from_json(obj: dict) -> FlowState:
    return FlowState({k: float(v) for k, v in obj["coeffs"].items()})
