"""Self-contained verification suites behind the ``verify`` subcommand.

Each suite is a function (seed) -> list of violation strings; empty means
pass.  These are condensed versions of the property checks in the test
suite, sized to run in seconds with a fixed seed.
"""

from __future__ import annotations

import itertools
import math
import random

import numpy as np

from . import catalog, decomp, frameworks, graphcomp, netlab, quantsim, spanprog

INF = math.inf


def _random_network(rng, max_edges=8, connected_st=True):
    n_v = rng.randint(3, 6)
    vertices = [f"v{i}" for i in range(n_v)]
    edges = []
    # spanning path keeps things connected
    for i in range(n_v - 1):
        edges.append((f"p{i}", vertices[i], vertices[i + 1], rng.uniform(0.3, 3.0)))
    for i in range(rng.randint(0, max_edges - n_v + 1)):
        u, v = rng.sample(vertices, 2)
        edges.append((f"x{i}", u, v, rng.uniform(0.3, 3.0)))
    return netlab.network(vertices, edges, vertices[0], vertices[-1])


def suite_netlab(seed=0) -> list:
    rng = random.Random(seed)
    out = []
    for trial in range(10):
        net = _random_network(rng)
        r_lap = netlab.effective_resistance(net, method="laplacian")
        r_flow = netlab.effective_resistance(net, method="flow")
        if abs(r_lap - r_flow) > 1e-8 * max(1.0, r_lap):
            out.append(f"trial {trial}: resistance paths disagree ({r_lap} vs {r_flow})")
        inv = netlab.inverse_resistance_via_potentials(net)
        if abs(inv * r_lap - 1.0) > 1e-8:
            out.append(f"trial {trial}: potential route inconsistent")
        # circulations orthogonal to the min-energy flow
        flow, _ = netlab.min_energy_unit_flow(net)
        circ = netlab.circulation_matrix(net)
        vec = flow.vector(net)
        if circ.shape[1] and np.abs(circ.T @ vec).max() > 1e-8:
            out.append(f"trial {trial}: flow not orthogonal to circulations")
    return out


def _random_small_program(rng, dim=4):
    w0 = np.array([rng.gauss(0, 1) for _ in range(dim)])
    w0 /= np.linalg.norm(w0)
    from ._linalg import complement_basis

    kcols = complement_basis(w0.reshape(-1, 1), dim)[:, : rng.randint(0, dim - 2)]
    table = {}
    for x in ("a", "b", "c"):
        cols = rng.randint(0, dim)
        table[x] = np.array([[rng.gauss(0, 1) for _ in range(cols)] for _ in range(dim)])
    return spanprog.SpanProgram(dim, w0, kcols, table, inputs=("a", "b", "c"))


def suite_witnesses(seed=0) -> list:
    rng = random.Random(seed)
    out = []
    for trial in range(10):
        p = _random_small_program(rng)
        for x in p.inputs:
            pos = spanprog.positive_witness(p, x)
            neg = spanprog.negative_witness(p, x)
            if pos.feasible == neg.feasible:
                out.append(f"trial {trial}/{x}: feasibility dichotomy broken")
            alpha = 2.5
            ps = spanprog.scalar_multiply(p, alpha)
            if pos.feasible:
                scaled = spanprog.positive_witness(ps, x).size
                if abs(scaled - alpha * pos.size) > 1e-8 * max(1.0, scaled):
                    out.append(f"trial {trial}/{x}: scaling law broken")
            pn = spanprog.negate(p)
            a = spanprog.positive_witness(pn, x).size
            b = neg.size if neg.feasible else INF
            if (a == INF) != (b == INF) or (a != INF and abs(a - b) > 1e-6 * max(1.0, b)):
                out.append(f"trial {trial}/{x}: negation law broken")
    return out


def suite_decomp(seed=0) -> list:
    rng = random.Random(seed)
    out = []
    for trial in range(8):
        net = _random_network(rng)
        norm = netlab.normalize_network(net).network
        tree = decomp.auto_decompose(norm)
        violations = decomp.validate_decomposition(norm, tree)
        if violations:
            out.append(f"trial {trial}: invalid auto decomposition {violations[:2]}")
            continue
        refl, proj = decomp.reflection_from_decomposition(norm, tree)
        direct = decomp.circulation_projector_direct(norm)
        gap = float(np.linalg.norm(proj - direct, 2))
        if gap > 1e-9:
            out.append(f"trial {trial}: projector gap {gap}")
        if float(np.linalg.norm(refl @ refl - np.eye(len(norm.edges)), 2)) > 1e-9:
            out.append(f"trial {trial}: reflection is not an involution")
    return out


def suite_simulate(seed=0) -> list:
    out = []
    dom = tuple("".join(b) for b in itertools.product("01", repeat=2))
    bits = [spanprog.trivial(lambda x, j=j: x[j] == "1", inputs=dom) for j in range(2)]
    for name, cg, wp, wm in (
        ("or2", graphcomp.or_compose(bits), 1.0, 2.0),
        ("and2", graphcomp.and_compose(bits), 2.0, 1.0),
    ):
        for x in dom:
            res = quantsim.run_algorithm1(cg, wp, wm, x)
            if res.success_probability < 2.0 / 3.0:
                out.append(f"{name}/{x}: success probability {res.success_probability:.3f}")
    return out


def suite_converters(seed=0) -> list:
    rng = random.Random(seed)
    out = []
    dom = ["".join(b) for b in itertools.product("01", repeat=3)]
    for trial in range(5):
        tree = _random_tree(rng, list(range(3)))
        try:
            cg = frameworks.tree_to_st(tree)
        except frameworks.ConversionError:
            continue  # constant-0 tree
        wdt = frameworks.wdt_value(tree, dom)
        for x in dom:
            want = tree.evaluate(x) == "1"
            if graphcomp.classify_connectivity(cg, x) != want:
                out.append(f"trial {trial}/{x}: tree conversion misclassifies")
            wp, wm = graphcomp.witness_sizes_via_resistance(cg, x)
            if want and wp > wdt.wdt_plus + 1e-6:
                out.append(f"trial {trial}/{x}: w+ exceeds the path bound")
            if not want and wm > wdt.wdt_minus + 1e-6:
                out.append(f"trial {trial}/{x}: w- exceeds the cut bound")
    return out


def _random_tree(rng, indices, p_leaf=0.3):
    if not indices or rng.random() < p_leaf:
        return frameworks.DecisionTree(frameworks.Leaf(rng.choice("01")))
    j = rng.choice(indices)
    rest = [i for i in indices if i != j]

    def sub():
        t = _random_tree(rng, rest, p_leaf + 0.2)
        return t.root

    return frameworks.DecisionTree(
        frameworks.Internal(j, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), sub(), sub()))


def suite_catalog(seed=0) -> list:
    out = []
    for n, k in ((3, 2), (4, 2), (4, 3)):
        cg = catalog.threshold(n, k)
        for bits in itertools.product("01", repeat=n):
            x = "".join(bits)
            wp, wm = graphcomp.witness_sizes_via_resistance(cg, x)
            ep, em = catalog.threshold_witness_formulas(n, k, x.count("1"))
            for a, b in ((wp, ep), (wm, em)):
                if a == INF and b == INF:
                    continue
                if a == INF or b == INF or abs(a - b) > 1e-6 * max(abs(b), 1.0):
                    out.append(f"threshold({n},{k})/{x}: witness mismatch")
    for n in (4, 6):
        cg = catalog.dyck(n, 3)
        for bits in itertools.product("()", repeat=n):
            x = "".join(bits)
            if graphcomp.classify_connectivity(cg, x) != catalog.dyck_oracle(x, 3):
                out.append(f"dyck3/{x}: oracle mismatch")
            if not catalog.dyck_oracle(x, 3):
                if not any(catalog.dyck3_condition_holds(x, c) for c in (1, 2, 3, 4)):
                    out.append(f"dyck3/{x}: no failure condition holds")
    return out


SUITES = {
    "netlab": suite_netlab,
    "witnesses": suite_witnesses,
    "decomp": suite_decomp,
    "simulate": suite_simulate,
    "converters": suite_converters,
    "catalog": suite_catalog,
}
