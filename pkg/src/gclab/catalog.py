"""Ready-made compositions with proved witness sizes, each paired with a
brute-force oracle.

Symmetric functions: the threshold composition uses the recursive
OR-of-(bit AND scaled-subthreshold) construction, with subgraphs shared by
index set.  Sharing merges the parallel copies of each subnetwork, which is
exact by the parallel law once the copy multiplicity (number of removal
orders, (level-1)!) is folded into the edge scales; the resulting edge at
recursion level l carries scale binom(k-1, l-1) and the graph has
O(2^n * k) edges instead of factorially many.  Witness sizes per input:

    w+ = 1 / (|x| - k + 1)          (|x| >= k)
    w- = k (n - k + 1) / (k - |x|)  (|x| < k)

String problems follow the harmonic-weight chain-with-exits pattern: long
series chains whose step weights decay like 1/step keep accepting paths at
O(log) total resistance, while rejected inputs admit cuts of linear total
size.  All constructions are plain predicate-edge compositions, so
classification sweeps never materialize matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .graphcomp import (
    CompositionGraph,
    ComposedEdgeProgram,
    TrivialEdgeProgram,
)

INF = math.inf


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class SymmetricSpec:
    n: int
    k: int
    kind: str  # "threshold" | "exact-weight" | "gapped-majority"


@dataclass(frozen=True)
class StringProblemSpec:
    problem: str
    n: int
    params: tuple = ()


# ---------------------------------------------------------------------------
# threshold / exact weight / gapped majority
# ---------------------------------------------------------------------------

def _default_bit_factory(j: int, positive: bool) -> TrivialEdgeProgram:
    return TrivialEdgeProgram(("bit", j, 1) if positive else ("nbit", j, 1))


def threshold(n: int, k: int, bit_factory=None, max_n: int = 12) -> CompositionGraph:
    """Composition computing |x| >= k on n bits.

    ``bit_factory(j, positive)`` supplies the program for querying bit j
    (trivial bit programs by default; converters substitute richer ones).
    Materialization is capped; closed forms cover larger n.
    """
    if not (1 <= k <= n):
        raise CatalogError("need 1 <= k <= n")
    if n > max_n:
        raise CatalogError(f"materialization capped at n={max_n}; use the closed forms")
    factory = bit_factory or _default_bit_factory

    def node_name(subset: frozenset) -> str:
        return "S" + ",".join(map(str, sorted(subset))) if subset else "S-"

    vertices = {"t"}
    edges = []
    programs = {}
    start = frozenset(range(n))
    frontier = {start}
    vertices.add(node_name(start))
    eid = [0]
    for level in range(1, k + 1):
        scale = math.comb(k - 1, level - 1)
        nxt = set()
        for subset in frontier:
            src = node_name(subset)
            for j in sorted(subset):
                eid[0] += 1
                name = f"th{eid[0]}"
                if level == k:
                    dst = "t"
                else:
                    child = subset - {j}
                    dst = node_name(child)
                    nxt.add(child)
                vertices.add(dst)
                edges.append((name, src, dst))
                programs[name] = factory(j, True).scaled(float(scale))
        frontier = nxt
    return CompositionGraph(tuple(sorted(vertices)), tuple(edges), node_name(start), "t", programs)


def threshold_witness_formulas(n: int, k: int, weight: int):
    """(w+, w-) predicted for an input of the given Hamming weight."""
    wp = 1.0 / (weight - k + 1) if weight >= k else INF
    wm = k * (n - k + 1) / (k - weight) if weight < k else INF
    return wp, wm


def threshold_complexity(n: int, k: int) -> float:
    """sqrt(max w+ * max w-) over all inputs = sqrt(k (n - k + 1))."""
    return math.sqrt(k * (n - k + 1))


def threshold_oracle(x, k: int) -> bool:
    return sum(1 for c in x if str(c) == "1") >= k


def exact_weight(n: int, k: int, max_n: int = 12) -> CompositionGraph:
    """|x| == k as (scaled threshold-k) AND (negated threshold-(k+1)).

    The scaling k(n-k+1) balances the two positive-witness contributions.
    """
    if not (1 <= k <= n - 1):
        raise CatalogError("need 1 <= k <= n-1")
    lower = ComposedEdgeProgram(threshold(n, k, max_n=max_n)).scaled(float(k * (n - k + 1)))
    upper = ComposedEdgeProgram(threshold(n, k + 1, max_n=max_n), negated=True)
    vertices = ("s", "m", "t")
    edges = (("ewA", "s", "m"), ("ewB", "m", "t"))
    return CompositionGraph(vertices, edges, "s", "t", {"ewA": lower, "ewB": upper})


def exact_weight_witness_formulas(n: int, k: int, weight: int):
    wp = float(n + 2 * k * (n - k)) if weight == k else INF
    wm = 1.0 / abs(k - weight) if weight != k else INF
    return wp, wm


def exact_weight_complexity(n: int, k: int) -> float:
    return math.sqrt(n + 2 * k * (n - k))


def exact_weight_oracle(x, k: int) -> bool:
    return sum(1 for c in x if str(c) == "1") == k


def gapped_majority(n: int, max_n: int = 10) -> CompositionGraph:
    """Threshold at n/2, intended for the promise |x| < n/3 or |x| > 2n/3."""
    if n % 2:
        raise CatalogError("n must be even")
    return threshold(n, n // 2, max_n=max_n)


def gapped_majority_bounds(n: int):
    """(W+ over |x| > 2n/3, W- over |x| < n/3) from the threshold formulas."""
    if n % 2:
        raise CatalogError("n must be even")
    k = n // 2
    lo_pos = math.floor(2 * n / 3) + 1  # smallest promised positive weight
    hi_neg = math.ceil(n / 3) - 1  # largest promised negative weight
    if lo_pos > n or hi_neg < 0:
        raise CatalogError("empty promise domain")
    w_plus = max(threshold_witness_formulas(n, k, w)[0] for w in range(lo_pos, n + 1))
    w_minus = max(threshold_witness_formulas(n, k, w)[1] for w in range(0, hi_neg + 1))
    return w_plus, w_minus


def gapped_majority_promise(x) -> bool:
    n = len(x)
    w = sum(1 for c in x if str(c) == "1")
    return w * 3 < n or w * 3 > 2 * n


# ---------------------------------------------------------------------------
# deterministic samples and pattern matching
# ---------------------------------------------------------------------------

def smallest_period(y) -> int:
    m = len(y)
    for p in range(1, m + 1):
        if all(y[i] == y[i - p] for i in range(p, m)):
            return p
    return m


def is_periodic(y) -> bool:
    return smallest_period(y) <= len(y) // 2


def _sample_valid(y, sample, offset: int) -> bool:
    """Every nonzero shift in [-offset, m//2 - offset] must conflict on the sample."""
    m = len(y)
    for shift in range(-offset, m // 2 - offset + 1):
        if shift == 0:
            continue
        if not any(0 <= i - shift < m and y[i] != y[i - shift] for i in sample):
            return False
    return True


def deterministic_sample(y):
    """Smallest (positions, offset) pinning down matches within half-period windows.

    Brute-force over candidate sets in increasing size; requires an aperiodic
    pattern.  A match on the returned positions at some alignment excludes a
    full match at every other alignment of the window.
    """
    if is_periodic(y):
        raise CatalogError("pattern is periodic; take one period first")
    m = len(y)
    for size in range(0, m + 1):
        for offset in range(0, m // 2 + 1):
            for sample in combinations(range(m), size):
                if _sample_valid(y, sample, offset):
                    return tuple(sample), offset
    raise CatalogError("no deterministic sample found")  # unreachable for aperiodic y


def pattern_oracle(x, y) -> bool:
    n, m = len(x), len(y)
    return any(all(x[i + q] == y[q] for q in range(m)) for i in range(n - m + 1))


def _eq(idx: int, ch, n: int):
    """Equality predicate with out-of-range positions reading as mismatch."""
    if 0 <= idx < n:
        return ("eq", idx, ch)
    return ("const", False)


def _neq(idx: int, ch, n: int):
    if 0 <= idx < n:
        return ("neq", idx, ch)
    return ("const", True)


class _Builder:
    """Incremental composition-graph builder with fresh vertex/edge names."""

    def __init__(self):
        self.vertices = {"s", "t"}
        self.edges = []
        self.programs = {}
        self._n = 0

    def vertex(self) -> str:
        self._n += 1
        name = f"u{self._n}"
        self.vertices.add(name)
        return name

    def edge(self, a, b, pred, scale=1.0):
        self._n += 1
        eid = f"e{self._n}"
        self.edges.append((eid, a, b))
        self.programs[eid] = TrivialEdgeProgram(pred, scale)
        return eid

    def chain(self, a, b, preds_scales):
        """Series path a -> b through fresh vertices."""
        cur = a
        last = len(preds_scales) - 1
        for i, (pred, scale) in enumerate(preds_scales):
            nxt = b if i == last else self.vertex()
            self.edge(cur, nxt, pred, scale)
            cur = nxt

    def graph(self) -> CompositionGraph:
        from ._util import UnionFind

        uf = UnionFind(self.vertices)
        for _, u, v in self.edges:
            uf.union(u, v)
        if not uf.connected("s", "t"):
            # degenerate constant-false construction: keep the skeleton
            # connected with an edge that never accepts
            self.edge("s", "t", ("const", False), 1.0)
        return CompositionGraph(tuple(sorted(self.vertices)), tuple(self.edges),
                                "s", "t", self.programs)


def pattern_matching(n: int, y) -> CompositionGraph:
    """Substring search for a fully known pattern.

    Aperiodic patterns: one parallel branch per alignment, a deterministic
    sample check in series with the full (1/m)-weighted verification.
    Periodic patterns: block-anchored search for one period followed by a
    leftward period walk whose break points trigger suffix verification;
    out-of-range reads behave as a padding sentinel (always mismatch).
    """
    m = len(y)
    if m > n:
        raise CatalogError("pattern longer than text")
    b = _Builder()
    if not is_periodic(y):
        sample, _ = deterministic_sample(y)
        for i in range(n - m + 1):
            mid = b.vertex()
            if sample:
                b.chain("s", mid, [(_eq(i + q, y[q], n), 1.0) for q in sample])
            else:
                mid = "s"
            b.chain(mid, "t", [(_eq(i + q, y[q], n), 1.0 / m) for q in range(m)])
        return b.graph()

    p = smallest_period(y)
    ybar = y[:p]
    reps = math.ceil(m / p)
    sample, _ = deterministic_sample(ybar)
    blocks = max(1, math.ceil(n / m))
    for blk in range(blocks):
        for i in range(blk * m, min(blk * m + 2 * p, n)):
            # deterministic-sample gate, then one full period at i
            a = b.vertex()
            if sample:
                b.chain("s", a, [(_eq(i + q, ybar[q], n), 1.0) for q in sample])
            else:
                a = "s"
            b0 = b.vertex()
            b.chain(a, b0, [(_eq(i + q, ybar[q], n), 1.0 / p) for q in range(p)])
            prev = b0
            for c in range(1, reps):
                start = i - c * p
                # break branch: the period fails at start, dualized to
                # parallel mismatch edges, then the suffix confirms
                d = b.vertex()
                for q in range(p):
                    b.edge(prev, d, _neq(start + q, ybar[q], n), 1.0)
                suffix_len = m - c * p
                b.chain(d, "t", [(_eq(i + p + q, y[c * p + q], n), 1.0 / m)
                                 for q in range(suffix_len)])
                # main walk: period also matches one step further left
                nxt = "t" if c == reps - 1 else b.vertex()
                b.chain(prev, nxt, [(_eq(start + q, ybar[q], n), 1.0 / (reps * p))
                                    for q in range(p)])
                prev = nxt
    return b.graph()


# ---------------------------------------------------------------------------
# OR of promise search
# ---------------------------------------------------------------------------

def or_psearch(n: int, m: int) -> CompositionGraph:
    """Blocks of promise-search: each block has exactly one non-star entry;
    accept iff some block's entry is 1.  Inputs are the m block strings
    concatenated (flat length n*m)."""
    b = _Builder()
    for i in range(m):
        base = i * n
        node = "s"
        for j in range(n):
            b.edge(node, "t", ("eq", base + j, "1"), 1.0)
            if j < n - 1:
                nxt = b.vertex()
                b.edge(node, nxt, ("eq", base + j, "*"), 1.0 / (j + 1))
                node = nxt
    return b.graph()


def psearch_oracle(x, n: int, m: int) -> bool:
    for i in range(m):
        block = x[i * n:(i + 1) * n]
        for ch in block:
            if ch != "*":
                if ch == "1":
                    return True
                break
    return False


def psearch_offsets(x, n: int, m: int):
    return [next(j for j in range(n) if x[i * n + j] != "*") + 1 for i in range(m)]


# ---------------------------------------------------------------------------
# the 2 0* 2 language
# ---------------------------------------------------------------------------

def sigma202(n: int) -> CompositionGraph:
    """Two 2s separated only by 0s, anywhere in the string."""
    b = _Builder()
    for i in range(n - 1):
        node = b.vertex()
        b.edge("s", node, ("eq", i, "2"), 1.0)
        for step in range(1, n - i):
            b.edge(node, "t", ("eq", i + step, "2"), 1.0)
            if i + step < n - 1:
                nxt = b.vertex()
                b.edge(node, nxt, ("eq", i + step, "0"), 1.0 / step)
                node = nxt
    return b.graph()


def sigma202_oracle(x) -> bool:
    last2 = None
    for i, ch in enumerate(x):
        if ch == "2":
            if last2 is not None:
                return True
            last2 = i
        elif ch == "0":
            continue
        else:
            last2 = None
    return False


# ---------------------------------------------------------------------------
# Dyck languages
# ---------------------------------------------------------------------------

def dyck_oracle(x, depth: int) -> bool:
    h = 0
    for ch in x:
        h += 1 if ch == "(" else -1
        if h < 0 or h > depth:
            return False
    return h == 0


def _dyck_automaton(n: int, depth: int) -> CompositionGraph:
    """Unrolled height automaton: states (position, height), height in [0, depth]."""
    b = _Builder()

    def node(pos, h):
        if pos == 0:
            return "s"
        if pos == n and h == 0:
            return "t"
        return f"p{pos}h{h}"

    for pos in range(n):
        for h in range(0, min(pos, depth) + 1):
            if (pos - h) % 2:
                continue
            src = node(pos, h)
            if src not in b.vertices:
                b.vertices.add(src)
            if h + 1 <= depth:
                dst = node(pos + 1, h + 1)
                b.vertices.add(dst)
                b.edge(src, dst, ("eq", pos, "("), 1.0)
            if h - 1 >= 0:
                dst = node(pos + 1, h - 1)
                b.vertices.add(dst)
                b.edge(src, dst, ("eq", pos, ")"), 1.0)
    return b.graph()


def _dyck3_condition_graph(n: int, which: int) -> CompositionGraph:
    """Violation detector for one of the four depth-3 failure modes.

    Mode 1: an unmatched ')' at an odd 1-based position after a perfect
    ()()-alternation; mode 3: a '(' landing at height 3, i.e. a '(' at an
    even position followed by an alternating run ended by another even '(';
    modes 2 and 4 are the same on the reversed, bracket-flipped string.
    """
    mirrored = which in (2, 4)

    def pos(q):  # positions are generated for the plain string, then mirrored
        return (n - 1 - q) if mirrored else q

    def br(c):
        if mirrored:
            return ")" if c == "(" else "("
        return c

    b = _Builder()
    if which in (1, 2):
        node = "s"
        b.edge(node, "t", _eq(pos(0), br(")"), n), 1.0)
        for c in range(1, (n - 2) // 2 + 1):
            nxt = b.vertex()
            b.chain(node, nxt, [(_eq(pos(2 * c - 2), br("("), n), 1.0 / c),
                                (_eq(pos(2 * c - 1), br(")"), n), 1.0 / c)])
            node = nxt
            b.edge(node, "t", _eq(pos(2 * c), br(")"), n), 1.0)
        return b.graph()

    # modes 3 / 4: anchor '(' at an odd 0-based index, then an alternating run
    # '(' even / ')' odd until another '(' breaks it at an odd index
    for j in range(1, n - 1, 2):
        a = b.vertex()
        b.edge("s", a, _eq(pos(j), br("("), n), 1.0)
        node = b.vertex()
        b.edge(a, node, _eq(pos(j + 1), br("("), n), 1.0)
        c = 1
        while j + 2 * c <= n - 1:
            brk = j + 2 * c  # odd index where the breaking '(' may sit
            b.edge(node, "t", _eq(pos(brk), br("("), n), 1.0)
            if brk + 1 > n - 1:
                break
            nxt = b.vertex()
            b.chain(node, nxt, [(_eq(pos(brk), br(")"), n), 1.0 / c),
                                (_eq(pos(brk + 1), br("("), n), 1.0 / c)])
            node = nxt
            c += 1
    return b.graph()


def dyck3_condition_holds(x, which: int) -> bool:
    """Combinatorial check of one failure mode, independent of the graphs."""
    n = len(x)
    if which in (2, 4):
        flipped = "".join("(" if c == ")" else ")" for c in reversed(x))
        return dyck3_condition_holds(flipped, which - 1)
    if which == 1:
        for j in range(0, n, 2):  # 0-based even = 1-based odd
            if x[j] == ")" and all(x[q] == (")" if q % 2 else "(") for q in range(j)):
                return True
        return False
    # which == 3: x[j]='(' at odd j, alternating '('-even/')'-odd on (j, brk),
    # then '(' again at odd brk
    for j in range(1, n, 2):
        if x[j] != "(":
            continue
        q = j + 1
        while q < n:
            expected = "(" if q % 2 == 0 else ")"
            if x[q] == expected:
                q += 1
                continue
            if q % 2 == 1 and x[q] == "(" and q >= j + 2:
                return True
            break
    return False


def dyck(n: int, depth: int) -> CompositionGraph:
    """Membership in the bounded-depth bracket language.

    Depths 1 and 2 unroll the height automaton.  Depth 3 is the negated OR
    of the four violation detectors, realized as a series of their negations.
    """
    if n % 2:
        raise CatalogError("n must be even")
    if depth in (1, 2):
        return _dyck_automaton(n, depth)
    if depth != 3:
        raise CatalogError("depths 1..3 supported")
    programs = {}
    names = []
    for which in (1, 2, 3, 4):
        sub = _dyck3_condition_graph(n, which)
        names.append(f"cond{which}")
        programs[f"cond{which}"] = ComposedEdgeProgram(sub, negated=True)
    vertices = ("s", "m1", "m2", "m3", "t")
    edges = tuple((names[i], vertices[i], vertices[i + 1]) for i in range(4))
    return CompositionGraph(vertices, edges, "s", "t", programs)


# ---------------------------------------------------------------------------
# 3-increasing subsequences
# ---------------------------------------------------------------------------

def inc3_oracle(x) -> bool:
    n = len(x)
    for i in range(n - 2):
        for j in range(i + 1, n - 1):
            if x[j] <= x[i]:
                continue
            for k in range(j + 1, n):
                if x[k] > x[j]:
                    return True
    return False


def inc3_minimal_extent(x):
    """Minimal-extent increasing triple, or None."""
    n = len(x)
    best = None
    for i in range(n - 2):
        for k in range(i + 2, n):
            if best is not None and k - i >= best[2] - best[0]:
                continue
            for j in range(i + 1, k):
                if x[i] < x[j] < x[k]:
                    if best is None or k - i < best[2] - best[0]:
                        best = (i, j, k)
                    break
    return best


def inc_subseq_3(n: int) -> CompositionGraph:
    """Increasing triple detection via the minimal-extent structure: a rise,
    a non-increasing run with harmonic weights, the closing rise, and a
    parallel middle-element check."""
    b = _Builder()
    for j in range(n - 2):
        a = b.vertex()
        b.edge("s", a, ("lt", j, j + 1), 1.0)
        node = a
        for step in range(1, n - 1 - j):
            k = j + step + 1  # closing index after this many run steps
            d = b.vertex()
            b.edge(node, d, ("lt", j + step, j + step + 1), 1.0)
            for mid in range(j + 1, j + step + 1):
                mv = b.vertex()
                b.edge(d, mv, ("lt", j, mid), 1.0)
                b.edge(mv, "t", ("lt", mid, k), 1.0)
            if step < n - 2 - j:
                nxt = b.vertex()
                b.edge(node, nxt, ("geq", j + step, j + step + 1), 1.0 / step)
                node = nxt
    return b.graph()
