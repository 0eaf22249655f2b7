"""Converters from classical computational models into graph compositions.

Supported source models:

* weighted decision trees (path / co-path value measures, the optimal-weight
  recurrence, conversion to an st-composition),
* zero-error and bounded-error decision-tree families,
* guessing schemes on decision trees,
* boolean formulas over program leaves (series/parallel construction with
  variable-time scaling at OR levels and dual-graph negation),
* divide-and-conquer strategies and the recursive reachability formula,
* adaptive learning graphs with per-assignment weights.

Every converter preserves classification on its whole domain and obeys an
explicit complexity bound, both enforced by the test suite per input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import graphcomp
from .graphcomp import (
    CompositionGraph,
    SPTerm,
    TrivialEdgeProgram,
    as_edge_program,
    sp_dual,
    sp_materialize,
    sp_scale,
)

INF = math.inf


class ConversionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# decision trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    label: str  # "0" | "1" | "?"

    def __post_init__(self):
        if self.label not in ("0", "1", "?"):
            raise ConversionError(f"bad leaf label {self.label!r}")


@dataclass(frozen=True)
class Internal:
    query: int  # 0-based bit index
    w0: float  # weight of the edge to the 0-child
    w1: float
    c0: object
    c1: object

    def __post_init__(self):
        if not (self.w0 > 0 and self.w1 > 0):
            raise ConversionError("edge weights must be positive")


DecisionNode = object  # Leaf | Internal


@dataclass(frozen=True)
class DecisionTree:
    root: DecisionNode

    def evaluate(self, x) -> str:
        node = self.root
        seen = set()
        while isinstance(node, Internal):
            if node.query in seen:
                raise ConversionError("repeated query on a root-leaf path")
            seen.add(node.query)
            node = node.c1 if str(x[node.query]) == "1" else node.c0
        return node.label

    def depth(self) -> int:
        def d(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(d(node.c0), d(node.c1))

        return d(self.root)


def tree_from_json(obj) -> DecisionTree:
    def dec(o):
        if "leaf" in o:
            return Leaf(str(o["leaf"]))
        return Internal(int(o["query"]), float(o["w0"]), float(o["w1"]),
                        dec(o["c0"]), dec(o["c1"]))

    return DecisionTree(dec(obj))


def tree_to_json(t: DecisionTree):
    def enc(node):
        if isinstance(node, Leaf):
            return {"leaf": node.label}
        return {"query": node.query, "w0": node.w0, "w1": node.w1,
                "c0": enc(node.c0), "c1": enc(node.c1)}

    return enc(t.root)


def _walk(t: DecisionTree, x):
    """(taken edges, sibling edges, leaf label); edges are (node, bit)."""
    node = t.root
    taken, siblings = [], []
    while isinstance(node, Internal):
        bit = 1 if str(x[node.query]) == "1" else 0
        taken.append((node, bit))
        siblings.append((node, 1 - bit))
        node = node.c1 if bit else node.c0
    return taken, siblings, node.label


def _edge_weight(node: Internal, bit: int) -> float:
    return node.w1 if bit else node.w0


@dataclass(frozen=True)
class WdtValues:
    wdt_plus: float
    wdt_minus: float
    wdt: float


def wdt_value(t: DecisionTree, inputs) -> WdtValues:
    """Path-sum maximum over accepted inputs, inverse co-path sum over the rest.

    Labels 0 and ? both count as rejecting.
    """
    wp, wm = 0.0, 0.0
    for x in inputs:
        taken, siblings, label = _walk(t, x)
        if label == "1":
            wp = max(wp, sum(_edge_weight(n, b) for n, b in taken))
        else:
            wm = max(wm, sum(1.0 / _edge_weight(n, b) for n, b in siblings))
    return WdtValues(wp, wm, math.sqrt(wp * wm))


def optimal_wdt(t: DecisionTree) -> float:
    """Bottom-up optimal weighted value: leaves are 0, an internal node with
    child values L, R contributes (L + R + sqrt((L-R)^2 + 4)) / 2."""

    def value(node):
        if isinstance(node, Leaf):
            return 0.0
        left = value(node.c0)
        right = value(node.c1)
        return (left + right + math.sqrt((left - right) ** 2 + 4.0)) / 2.0

    return value(t.root)


def tree_to_st(t: DecisionTree) -> CompositionGraph:
    """Decision tree as a composition: root becomes s, 1-leaves contract to t,
    0/? leaves are pruned; the outcome-1 leg of a node querying bit j carries
    w * (bit j) and the outcome-0 leg carries w * (negated bit j).

    A tree without 1-leaves computes the constant 0; that has no connected
    composition, so it is rejected here.
    """
    vertices = ["s", "t"]
    edges = []
    programs = {}
    counter = [0]

    def has_one(node) -> bool:
        if isinstance(node, Leaf):
            return node.label == "1"
        return has_one(node.c0) or has_one(node.c1)

    if not has_one(t.root):
        raise ConversionError("tree has no accepting leaf (constant-0 function)")

    def build(node, at):
        if isinstance(node, Leaf):
            return
        for bit, child in ((0, node.c0), (1, node.c1)):
            sub_live = (child.label == "1") if isinstance(child, Leaf) else has_one(child)
            if not sub_live:
                continue
            counter[0] += 1
            eid = f"d{counter[0]}"
            if isinstance(child, Leaf):
                target = "t"
            else:
                target = f"v{counter[0]}"
                vertices.append(target)
            pred = ("bit", node.query, 1) if bit == 1 else ("nbit", node.query, 1)
            programs[eid] = TrivialEdgeProgram(pred, _edge_weight(node, bit))
            edges.append((eid, at, target))
            if not isinstance(child, Leaf):
                build(child, target)

    build(t.root, "s")
    return CompositionGraph(tuple(vertices), tuple(edges), "s", "t", programs)


# ---------------------------------------------------------------------------
# tree families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeFamily:
    trees: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.trees) != len(self.probs):
            raise ConversionError("trees/probs length mismatch")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ConversionError("probabilities must sum to 1")
        if any(p < 0 for p in self.probs):
            raise ConversionError("negative probability")

    def check_zero_error(self, inputs, f) -> None:
        """No tree may output the wrong label; '?' probability at most 1/2."""
        for x in inputs:
            fx = str(int(f(x)))
            q = 0.0
            for t, p in zip(self.trees, self.probs):
                out = t.evaluate(x)
                if out == "?":
                    q += p
                elif out != fx:
                    raise ConversionError(f"tree answers {out} != f={fx} on {x!r}")
            if q > 0.5 + 1e-12:
                raise ConversionError(f"'?' probability {q} > 1/2 on {x!r}")

    def check_bounded_error(self, inputs, f, threshold=2.0 / 3.0) -> None:
        for x in inputs:
            fx = str(int(f(x)))
            good = sum(p for t, p in zip(self.trees, self.probs) if t.evaluate(x) == fx)
            if good < threshold - 1e-12:
                raise ConversionError(f"family is correct w.p. {good} < {threshold} on {x!r}")


def _normalized_tree_program(t: DecisionTree, inputs):
    """Composition of the tree rescaled so W+ = W- = C over the given inputs.

    Trees that never accept have no connected conversion and return a
    constant-false program instead.
    """
    try:
        cg = tree_to_st(t)
    except ConversionError:
        return TrivialEdgeProgram(("const", False))
    prog = graphcomp.ComposedEdgeProgram(cg)
    wp = max((prog.wplus(x) for x in inputs if prog.classify(x)), default=1.0)
    wm = max((prog.wminus(x) for x in inputs if not prog.classify(x)), default=1.0)
    if 0 < wp < INF and 0 < wm < INF:
        prog = prog.scaled(math.sqrt(wm / wp))
    return prog


def zero_error_family_to_st(fam: TreeFamily, inputs, f) -> CompositionGraph:
    """Parallel composition of per-tree conversions scaled by 1/p_j.

    Each tree program is first balanced to W+ = W- = C; the composed program
    then has w+ at most twice and w- at most once the largest per-tree C.
    Trees that never accept contribute no branch (they cannot carry flow and
    would only inflate the negative witness).
    """
    fam.check_zero_error(inputs, f)
    programs = []
    for t, p in zip(fam.trees, fam.probs):
        if p == 0:
            continue
        prog = _normalized_tree_program(t, inputs)
        if isinstance(prog, TrivialEdgeProgram) and prog.pred == ("const", False):
            continue
        programs.append(prog.scaled(1.0 / p))
    if not programs:
        raise ConversionError("family never accepts (constant-0 function)")
    return graphcomp.or_compose(programs)


def _uniformize(fam: TreeFamily, max_denominator: int = 64) -> list:
    """Duplicate trees to approximate the distribution uniformly."""
    fracs = [Fraction(p).limit_denominator(max_denominator) for p in fam.probs]
    denom = 1
    for fr in fracs:
        denom = denom * fr.denominator // math.gcd(denom, fr.denominator)
    counts = [int(fr * denom) for fr in fracs]
    trees = []
    for t, c in zip(fam.trees, counts):
        trees.extend([t] * c)
    if not trees:
        raise ConversionError("distribution rounds to nothing")
    if len(trees) % 2 == 1:
        trees = [t for t in trees for _ in range(2)]
    return trees


def randomized_to_st(fam: TreeFamily, inputs, f) -> CompositionGraph:
    """Bounded-error family composed through the half-threshold construction.

    The family is duplicated to a uniform one; bit j of the implicit vote
    vector is computed by the j-th tree's composition (its complement
    construction serves the 0-polarity side), and the votes feed the
    threshold-at-half composition, which tolerates the 1/3 error margin.
    """
    from . import catalog

    fam.check_bounded_error(inputs, f)
    trees = _uniformize(fam)
    k = len(trees)

    def bit_factory(j, positive):
        t = trees[j]
        if positive:
            return _normalized_tree_program(t, inputs)
        flipped = _complement_tree(t)
        return _normalized_tree_program(flipped, inputs)

    return catalog.threshold(k, k // 2, bit_factory=bit_factory)


def _complement_tree(t: DecisionTree) -> DecisionTree:
    """Swap 1 with {0,?}: accepts exactly where the original rejects."""

    def flip(node):
        if isinstance(node, Leaf):
            return Leaf("1") if node.label != "1" else Leaf("0")
        return Internal(node.query, node.w0, node.w1, flip(node.c0), flip(node.c1))

    return DecisionTree(flip(t.root))


@dataclass(frozen=True)
class GuessReport:
    guess_faults: int  # G: max wrong guesses on any root-leaf path
    depth: int  # T
    sqrt_gt: float


def guessing_complexity(t: DecisionTree, guess) -> GuessReport:
    """``guess`` maps (internal node) -> predicted bit; exactly one child edge
    per node counts as the guessed one, and G counts un-guessed edges on the
    worst root-leaf path."""

    def scan(node, faults):
        if isinstance(node, Leaf):
            return faults, 0
        g = guess(node)
        if g not in (0, 1):
            raise ConversionError("guess must pick a child (0 or 1)")
        f0, d0 = scan(node.c0, faults + (1 if g != 0 else 0))
        f1, d1 = scan(node.c1, faults + (1 if g != 1 else 0))
        return max(f0, f1), 1 + max(d0, d1)

    g, d = scan(t.root, 0)
    return GuessReport(g, d, math.sqrt(g * d))


# ---------------------------------------------------------------------------
# formulas
# ---------------------------------------------------------------------------
# AST nodes: ("or", [children]) / ("and", [children]) / ("not", child)
#          / ("leaf", key) / ("const", bool)

def formula_eval(ast, leaf_values) -> bool:
    kind = ast[0]
    if kind == "const":
        return bool(ast[1])
    if kind == "leaf":
        return bool(leaf_values(ast[1]))
    if kind == "not":
        return not formula_eval(ast[1], leaf_values)
    vals = [formula_eval(c, leaf_values) for c in ast[1]]
    return any(vals) if kind == "or" else all(vals)


def formula_leaves(ast) -> list:
    kind = ast[0]
    if kind == "const":
        return []
    if kind == "leaf":
        return [ast[1]]
    if kind == "not":
        return formula_leaves(ast[1])
    out = []
    for c in ast[1]:
        out.extend(formula_leaves(c))
    return out


def _to_or_not(ast):
    """De Morgan normalization to {or, not, leaf, const}."""
    kind = ast[0]
    if kind in ("leaf", "const"):
        return ast
    if kind == "not":
        return ("not", _to_or_not(ast[1]))
    children = [_to_or_not(c) for c in ast[1]]
    if kind == "or":
        return ("or", children)
    return ("not", ("or", [("not", c) for c in children]))


def formula_to_composition(ast, leaf_programs, inputs=None) -> CompositionGraph:
    """Series-parallel composition computing the formula.

    OR levels become parallel joins with each child scaled by the reciprocal
    of its largest positive witness size over ``inputs`` (skipped when no
    input list is given or a child never accepts); negations take the dual
    of the child's series-parallel term, which negates the leaf programs.
    ``leaf_programs`` maps leaf keys to edge programs.
    """
    norm = _to_or_not(ast)

    def build(node) -> SPTerm:
        kind = node[0]
        if kind == "leaf":
            return SPTerm.leaf(as_edge_program(leaf_programs[node[1]]))
        if kind == "const":
            return SPTerm.leaf(TrivialEdgeProgram(("const", bool(node[1]))))
        if kind == "not":
            return sp_dual(build(node[1]))
        terms = [build(c) for c in node[1]]
        if inputs is not None:
            scaled = []
            for term in terms:
                sub = sp_materialize(term)
                prog = graphcomp.ComposedEdgeProgram(sub)
                wp = [prog.wplus(x) for x in inputs if prog.classify(x)]
                wmax = max(wp) if wp else None
                if wmax is not None and 0 < wmax < INF:
                    term = sp_scale(term, 1.0 / wmax)
                scaled.append(term)
            terms = scaled
        return SPTerm.parallel(terms)

    return sp_materialize(build(norm))


# ---------------------------------------------------------------------------
# divide and conquer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivideAndConquer:
    """Recursion description: below ``m0`` use ``base``; otherwise combine the
    subproblem programs and the auxiliary program through ``formula``.

    ``split(m, lam)`` lists the (m_j, lam_j) subproblems, ``formula(m, lam)``
    is an AST over leaf keys 0..a-1 (subproblems) and "aux".
    """

    m0: int
    base: object  # (m, lam) -> EdgeProgram
    aux: object  # (m, lam) -> EdgeProgram or None
    split: object  # (m, lam) -> [(m_j, lam_j)]
    formula: object  # (m, lam) -> AST


def divide_and_conquer(strategy: DivideAndConquer, m: int, lam=None, inputs=None):
    """Composition family member for parameter m; recursion must be well founded.

    Returns (CompositionGraph, levels) where ``levels`` records the per-level
    sum of squared subprogram complexities for recurrence checks.
    """
    memo = {}

    def rec(mm, ll):
        key = (mm, ll)
        if key in memo:
            return memo[key]
        if mm < strategy.m0:
            prog = as_edge_program(strategy.base(mm, ll))
            memo[key] = prog
            return prog
        subs = strategy.split(mm, ll)
        if any(sub_m >= mm for sub_m, _ in subs):
            raise ConversionError("recursion must strictly decrease m")
        leaf_map = {i: rec(sub_m, sub_l) for i, (sub_m, sub_l) in enumerate(subs)}
        aux = strategy.aux(mm, ll) if strategy.aux is not None else None
        if aux is not None:
            leaf_map["aux"] = as_edge_program(aux)
        cg = formula_to_composition(strategy.formula(mm, ll), leaf_map, inputs=inputs)
        prog = graphcomp.ComposedEdgeProgram(cg)
        memo[key] = prog
        return prog

    top = rec(m, lam)
    return top.cg, memo


# ---------------------------------------------------------------------------
# reachability formula (recursive path-halving)
# ---------------------------------------------------------------------------

def savitch_formula(n: int, s: int, t: int):
    """Reachability on an n-vertex digraph as a recursive formula.

    n must be a power of two.  Inputs are adjacency bitstrings of length n*n
    (row-major, bit u*n+v = edge u->v); the formula has depth log2(n) and
    length (2n)^log2(n), so keep n at most 8.
    """
    if n & (n - 1) or n <= 0:
        raise ConversionError("n must be a power of two")
    if n > 8:
        raise ConversionError("formula length is (2n)^log2(n); use n <= 8")

    def phi(u, v, length):
        if length == 1:
            if u == v:
                return ("const", True)
            return ("leaf", u * n + v)
        half = length // 2
        return ("or", [("and", [phi(u, w, half), phi(w, v, half)]) for w in range(n)])

    return phi(s, t, n)


def savitch_composition(n: int, s: int, t: int) -> CompositionGraph:
    """Composition evaluating reachability via the recursive formula."""
    ast = savitch_formula(n, s, t)
    leaf_map = {}
    for u in range(n):
        for v in range(n):
            leaf_map[u * n + v] = TrivialEdgeProgram(("bit", u * n + v, 1))
    return formula_to_composition(ast, leaf_map, inputs=None)


def bfs_reachable(adj_bits: str, n: int, s: int, t: int) -> bool:
    """Oracle: breadth-first reachability on the adjacency bitstring."""
    from collections import deque

    seen = {s}
    dq = deque([s])
    while dq:
        u = dq.popleft()
        if u == t:
            return True
        for v in range(n):
            if v not in seen and adj_bits[u * n + v] == "1":
                seen.add(v)
                dq.append(v)
    return t in seen


# ---------------------------------------------------------------------------
# learning graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LearningGraph:
    """DAG with index-set labels, per-assignment edge weights and unit flows.

    vertices: {vid: frozenset of 0-based indices}; edges: (eid, u, v, j) with
    label(v) = label(u) + {j}; weights: {(eid, assignment, b): w} where the
    assignment is a tuple of (index, bit) pairs covering label(v), sorted by
    index; flows: {positive input label: {eid: flow}}.
    """

    vertices: dict
    edges: tuple
    weights: dict
    flows: dict

    def root(self):
        roots = [v for v, s in self.vertices.items() if not s]
        if len(roots) != 1:
            raise ConversionError("need a unique root with empty label")
        return roots[0]

    def weight(self, eid, x, b) -> float:
        _, _, v, _ = next(e for e in self.edges if e[0] == eid)
        z = tuple(sorted((i, str(x[i])) for i in self.vertices[v]))
        try:
            return self.weights[(eid, z, b)]
        except KeyError:
            raise ConversionError(f"no weight for edge {eid} under {z} (b={b})")


def _assignment(x, indices) -> tuple:
    return tuple(sorted((i, str(x[i])) for i in indices))


def check_learning_graph(lg: LearningGraph, inputs, f) -> None:
    """Structural and consistency conditions over the supplied inputs."""
    root = lg.root()
    for eid, u, v, j in lg.edges:
        su, sv = lg.vertices[u], lg.vertices[v]
        if j in su or sv != su | {j}:
            raise ConversionError(f"edge {eid}: label(v) must add exactly index {j}")
    # condition (b): agreeing prefixes with a flipped queried bit tie the weights
    pos = [x for x in inputs if f(x)]
    neg = [x for x in inputs if not f(x)]
    for eid, u, v, j in lg.edges:
        su = lg.vertices[u]
        for y in pos:
            for x in neg:
                if _assignment(x, su) == _assignment(y, su) and str(x[j]) != str(y[j]):
                    w_x0 = lg.weight(eid, x, 0)
                    w_y1 = lg.weight(eid, y, 1)
                    if abs(w_x0 - w_y1) > 1e-12 * max(1.0, abs(w_y1)):
                        raise ConversionError(f"edge {eid}: crossing weights differ")
    # flows: unit from the root, conserved away from certificate sinks
    for y in pos:
        flow = lg.flows.get(_label(y), lg.flows.get(y))
        if flow is None:
            raise ConversionError(f"no flow for positive input {y!r}")
        excess = {v: 0.0 for v in lg.vertices}
        for eid, u, v, j in lg.edges:
            val = flow.get(eid, 0.0)
            if val and lg.weight(eid, y, 1) == 0:
                raise ConversionError(f"flow on zero-weight edge {eid}")
            excess[u] += val
            excess[v] -= val
        if abs(excess[root] - 1.0) > 1e-9:
            raise ConversionError(f"flow for {y!r} is not a unit flow from the root")
        for v, s in lg.vertices.items():
            if v == root or _is_one_certificate(lg, v, y, inputs, f):
                continue
            if abs(excess[v]) > 1e-9:
                raise ConversionError(f"flow for {y!r} not conserved at {v}")


def _label(x):
    return x if isinstance(x, str) else "".join(str(b) for b in x)


def _is_one_certificate(lg: LearningGraph, v, y, inputs, f) -> bool:
    z = _assignment(y, lg.vertices[v])
    consistent = [x for x in inputs if _assignment(x, lg.vertices[v]) == z]
    return bool(consistent) and all(f(x) for x in consistent)


def learning_graph_ell(lg: LearningGraph, x, f) -> float:
    """The source-model cost: flow-squared over weights for accepted inputs,
    weight sum for rejected ones."""
    if f(x):
        flow = lg.flows.get(_label(x), lg.flows.get(x))
        total = 0.0
        for eid, u, v, j in lg.edges:
            val = flow.get(eid, 0.0)
            if val:
                total += val * val / lg.weight(eid, x, 1)
        return total
    return sum(lg.weight(eid, x, 0) for eid, u, v, j in lg.edges)


def learning_graph_to_st(lg: LearningGraph, inputs, f) -> CompositionGraph:
    """Expand vertices into (vertex, partial assignment) pairs.

    Nodes whose assignment certifies rejection (or matches no input) are
    pruned, nodes certifying acceptance contract into t, and the edge into
    (v, z') carries the bit-j program (or its negation) scaled by the
    reciprocal of the edge weight under z'.
    """
    check_learning_graph(lg, inputs, f)
    root = lg.root()
    inputs = list(inputs)

    def node_id(v, z) -> str:
        return f"{v}|{','.join(f'{i}={b}' for i, b in z)}"

    def status(z) -> str:
        consistent = [x for x in inputs if all(str(x[i]) == b for i, b in z)]
        if not consistent:
            return "prune"
        vals = {bool(f(x)) for x in consistent}
        if vals == {True}:
            return "accept"
        if vals == {False}:
            return "prune"
        return "keep"

    vertices = {"s", "t"}
    edges = []
    programs = {}
    keep_cache = {}

    def classify_node(v, z):
        key = (v, z)
        if key not in keep_cache:
            if v == root:
                keep_cache[key] = "keep"
            else:
                keep_cache[key] = status(z)
        return keep_cache[key]

    from itertools import product

    eid_counter = [0]
    for eid, u, v, j in lg.edges:
        su = sorted(lg.vertices[u])
        for bits in product("01", repeat=len(su)):
            z_u = tuple(zip(su, bits))
            st_u = classify_node(u, z_u)
            if st_u in ("prune", "accept") and u != root:
                continue
            for bj in "01":
                z_v = tuple(sorted(z_u + ((j, bj),)))
                st_v = classify_node(v, z_v)
                if st_v == "prune":
                    continue
                # weight under any input consistent with z_v
                consistent = [x for x in inputs if all(str(x[i]) == b for i, b in z_v)]
                w = lg.weight(eid, consistent[0], 1)
                if w == 0:
                    continue
                src = "s" if u == root else node_id(u, z_u)
                dst = "t" if st_v == "accept" else node_id(v, z_v)
                if src == dst:
                    continue
                vertices.add(src)
                vertices.add(dst)
                eid_counter[0] += 1
                name = f"lg{eid_counter[0]}"
                pred = ("bit", j, 1) if bj == "1" else ("nbit", j, 1)
                programs[name] = TrivialEdgeProgram(pred, 1.0 / w)
                edges.append((name, src, dst))

    return CompositionGraph(tuple(sorted(vertices)), tuple(edges), "s", "t", programs)
