"""Shared generators for randomized suites; everything takes an explicit rng."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from gclab import frameworks, graphcomp, netlab, spanprog
from gclab._linalg import complement_basis


def bit_domain(n: int) -> tuple:
    return tuple("".join(b) for b in itertools.product("01", repeat=n))


def random_network(rng: random.Random, max_extra=5, vmin=3, vmax=6) -> netlab.ResistorNetwork:
    """Connected random multigraph with terminals at the path ends."""
    n_v = rng.randint(vmin, vmax)
    vertices = [f"v{i}" for i in range(n_v)]
    edges = []
    for i in range(n_v - 1):
        edges.append((f"p{i}", vertices[i], vertices[i + 1], rng.uniform(0.2, 4.0)))
    for i in range(rng.randint(0, max_extra)):
        u, v = rng.sample(vertices, 2)
        edges.append((f"x{i}", u, v, rng.uniform(0.2, 4.0)))
    return netlab.network(vertices, edges, vertices[0], vertices[-1])


def random_program(rng: random.Random, dim=4, labels=("a", "b", "c")) -> spanprog.SpanProgram:
    """Random explicit-domain program with w0 orthogonal to a random K."""
    w0 = np.array([rng.gauss(0, 1) for _ in range(dim)])
    w0 /= np.linalg.norm(w0)
    perp = complement_basis(w0.reshape(-1, 1), dim)
    kc = rng.randint(0, dim - 2)
    kgen = perp[:, :kc]
    table = {}
    for x in labels:
        cols = rng.randint(0, dim)
        table[x] = np.array([[rng.gauss(0, 1) for _ in range(cols)] for _ in range(dim)])
    return spanprog.SpanProgram(dim, w0, kgen, table, inputs=tuple(labels))


def random_scaled_bit_programs(rng: random.Random, n_bits: int, count: int):
    """Trivial bit programs with random positive scales (shared bit domain)."""
    progs = []
    for _ in range(count):
        j = rng.randrange(n_bits)
        positive = rng.random() < 0.7
        pred = ("bit", j, 1) if positive else ("nbit", j, 1)
        progs.append(graphcomp.TrivialEdgeProgram(pred, rng.uniform(0.25, 4.0)))
    return progs


def random_composition(rng: random.Random, n_bits=4, max_edges=8) -> graphcomp.CompositionGraph:
    """Random multigraph composition over scaled trivial bit programs."""
    net = random_network(rng, max_extra=max_edges - 2)
    progs = random_scaled_bit_programs(rng, n_bits, len(net.edges))
    programs = {e.eid: p for e, p in zip(net.edges, progs)}
    edges = tuple((e.eid, e.tail, e.head) for e in net.edges)
    return graphcomp.CompositionGraph(net.vertices, edges, net.s, net.t, programs)


def random_decision_tree(rng: random.Random, indices, p_leaf=0.25) -> frameworks.DecisionTree:
    def build(avail, depth):
        if not avail or (depth > 0 and rng.random() < p_leaf):
            return frameworks.Leaf(rng.choice("01?") if rng.random() < 0.25 else rng.choice("01"))
        j = rng.choice(avail)
        rest = [i for i in avail if i != j]
        return frameworks.Internal(j, rng.uniform(0.4, 2.5), rng.uniform(0.4, 2.5),
                                   build(rest, depth + 1), build(rest, depth + 1))

    return frameworks.DecisionTree(build(list(indices), 0))


def random_total_tree(rng: random.Random, indices) -> frameworks.DecisionTree:
    """Decision tree with labels in {0,1} only."""
    while True:
        t = random_decision_tree(rng, indices)
        labels = set()

        def scan(node):
            if isinstance(node, frameworks.Leaf):
                labels.add(node.label)
            else:
                scan(node.c0)
                scan(node.c1)

        scan(t.root)
        if "?" not in labels:
            return t


def parity_learning_graph() -> frameworks.LearningGraph:
    """Parity on 2 bits: two branches from the root, each reading both bits."""
    vertices = {"r": frozenset(), "a": frozenset([0]), "b": frozenset([1]),
                "ab": frozenset([0, 1]), "ba": frozenset([0, 1])}
    edges = (("e1", "r", "a", 0), ("e2", "r", "b", 1),
             ("e3", "a", "ab", 1), ("e4", "b", "ba", 0))
    weights = {}
    for eid, u, v, j in edges:
        idx = sorted(vertices[v])
        for bits in itertools.product("01", repeat=len(idx)):
            z = tuple(zip(idx, bits))
            for b in (0, 1):
                weights[(eid, z, b)] = 1.0
    flows = {y: {"e1": 0.5, "e3": 0.5, "e2": 0.5, "e4": 0.5} for y in ("01", "10")}
    return frameworks.LearningGraph(vertices, edges, weights, flows)


@pytest.fixture
def rng():
    return random.Random(20240811)
