import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gclab import netlab as nl
from conftest import random_network

INF = math.inf


def net(vertices, edges, s=None, t=None):
    return nl.network(vertices, edges, s, t)


class TestNormalize:
    def test_infinite_edge_deleted(self):
        tri = net(["a", "b", "c"], [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0),
                                    ("e3", "c", "a", INF)])
        res = nl.normalize_network(tri)
        assert [e.eid for e in res.network.edges] == ["e1", "e2"]
        assert res.merge_map == {"a": "a", "b": "b", "c": "c"}

    def test_zero_edge_contracted(self):
        path = net(["s", "a", "t"], [("e1", "s", "a", 0.0), ("e2", "a", "t", 1.0)], "s", "t")
        res = nl.normalize_network(path)
        assert not res.short_circuit
        assert res.merge_map["a"] == res.merge_map["s"] == "a+s"
        (edge,) = res.network.edges
        assert edge.tail in ("a+s", "t") and res.network.s == "a+s"

    def test_short_circuit_outcome(self):
        sc = net(["s", "t"], [("e", "s", "t", 0.0)], "s", "t")
        res = nl.normalize_network(sc)
        assert res.short_circuit

    def test_bad_resistance_rejected(self):
        with pytest.raises(nl.NetworkError):
            net(["a", "b"], [("e", "a", "b", -1.0)])


class TestCirculations:
    def test_single_edge_no_circulation(self):
        single = net(["s", "t"], [("e", "s", "t", 1.0)])
        assert nl.circulation_basis(single) == []

    def test_two_parallel_edges(self):
        par = net(["s", "t"], [("e1", "s", "t", 1.0), ("e2", "s", "t", 1.0)])
        (state,) = nl.circulation_basis(par)
        vec = state.vector(par)
        expected = np.array([1.0, -1.0]) / math.sqrt(2)
        assert np.allclose(vec, expected) or np.allclose(vec, -expected)

    def test_weighted_cycle_matches_incidence_null_space(self):
        # oracle: the basis must be annihilated by B diag(1/sqrt(r))
        cyc = net(["a", "b", "c", "d"], [("1", "a", "b", 1.0), ("2", "b", "c", 2.0),
                                         ("3", "c", "d", 3.0), ("4", "d", "a", 4.0)])
        basis = nl.circulation_basis(cyc)
        assert len(basis) == 1
        m = cyc.incidence_matrix() / np.sqrt(cyc.resistances())
        vec = basis[0].vector(cyc)
        assert np.abs(m @ vec).max() < 1e-12
        # around the cycle the weighted coefficients are proportional to sqrt(r_e)
        coeffs = basis[0].coeffs
        ratios = [coeffs["2"] / coeffs["1"], coeffs["3"] / coeffs["1"], coeffs["4"] / coeffs["1"]]
        assert np.allclose(np.abs(ratios), [math.sqrt(2), math.sqrt(3), math.sqrt(4)])

    def test_dimension_formula(self, rng):
        for _ in range(20):
            g = random_network(rng)
            dim = len(nl.circulation_basis(g))
            assert dim == len(g.edges) - len(g.vertices) + 1  # connected by construction


class TestMinEnergyFlow:
    def test_series_law(self):
        series = net(["s", "a", "t"], [("e1", "s", "a", 1.0), ("e2", "a", "t", 2.0)], "s", "t")
        _, energy = nl.min_energy_unit_flow(series)
        assert energy == pytest.approx(3.0)

    def test_parallel_law(self):
        par = net(["s", "t"], [("e1", "s", "t", 1.0), ("e2", "s", "t", 1.0)], "s", "t")
        flow, energy = nl.min_energy_unit_flow(par)
        assert energy == pytest.approx(0.5)
        assert flow.coeffs["e1"] == pytest.approx(0.5)
        assert flow.coeffs["e2"] == pytest.approx(0.5)

    def test_wheatstone_bridge(self):
        # oracle value frozen from the Laplacian pseudoinverse quadratic form
        wb = net(["s", "a", "b", "t"],
                 [("sa", "s", "a", 1.0), ("at", "a", "t", 1.0), ("sb", "s", "b", 1.0),
                  ("bt", "b", "t", 1.0), ("ab", "a", "b", 1.0)], "s", "t")
        flow, energy = nl.min_energy_unit_flow(wb)
        assert energy == pytest.approx(1.0, abs=1e-9)
        assert abs(flow.coeffs["ab"]) < 1e-9  # balanced bridge carries no flow

    def test_disconnected_is_infinite(self):
        dis = net(["s", "t", "u"], [("e", "t", "u", 1.0)], "s", "t")
        flow, energy = nl.min_energy_unit_flow(dis)
        assert flow is None and energy == INF

    def test_unit_divergence(self, rng):
        for _ in range(10):
            g = random_network(rng)
            flow, _ = nl.min_energy_unit_flow(g)
            m = g.incidence_matrix() / np.sqrt(g.resistances())
            div = m @ flow.vector(g)
            vi = g.vertex_index()
            expect = np.zeros(len(g.vertices))
            expect[vi[g.s]] = 1.0
            expect[vi[g.t]] = -1.0
            assert np.abs(div - expect).max() < 1e-8

    def test_orthogonal_to_circulations(self, rng):
        for _ in range(10):
            g = random_network(rng)
            flow, _ = nl.min_energy_unit_flow(g)
            circ = nl.circulation_matrix(g)
            if circ.shape[1]:
                assert np.abs(circ.T @ flow.vector(g)).max() < 1e-9


class TestEffectiveResistance:
    def test_disconnected(self):
        dis = net(["s", "t"], [], "s", "t")
        assert nl.effective_resistance(dis) == INF

    def test_unit_path(self):
        n = 5
        vs = [f"v{i}" for i in range(n + 1)]
        path = net(vs, [(f"e{i}", vs[i], vs[i + 1], 1.0) for i in range(n)], vs[0], vs[-1])
        assert nl.effective_resistance(path) == pytest.approx(n)

    def test_parallel_bank(self):
        n = 7
        bank = net(["s", "t"], [(f"e{i}", "s", "t", 1.0) for i in range(n)], "s", "t")
        assert nl.effective_resistance(bank) == pytest.approx(1.0 / n)

    def test_code_paths_agree(self, rng):
        for _ in range(25):
            g = random_network(rng)
            a = nl.effective_resistance(g, method="laplacian")
            b = nl.effective_resistance(g, method="flow")
            assert a == pytest.approx(b, rel=1e-8)

    def test_sparse_path_matches_dense(self):
        rng = random.Random(7)
        g = random_network(rng, max_extra=6, vmin=6, vmax=8)
        dense = nl.effective_resistance(g, method="laplacian")
        sparse = nl._resistance_sparse(nl.normalize_network(g).network, g.s, g.t)
        assert sparse == pytest.approx(dense, rel=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(st.recursive(
        st.floats(min_value=0.1, max_value=4.0),
        lambda children: st.tuples(st.sampled_from(["s", "p"]),
                                   st.lists(children, min_size=2, max_size=3)),
        max_leaves=8))
    def test_series_parallel_laws(self, term):
        """Build a series-parallel network and compare the solved resistance
        with the direct series/parallel reduction of the term."""
        counter = [0]
        vertices = {"s", "t"}
        edges = []

        def build(node, a, b):
            if isinstance(node, float):
                counter[0] += 1
                edges.append((f"e{counter[0]}", a, b, node))
                return node
            kind, children = node
            if kind == "p":
                vals = [build(c, a, b) for c in children]
                return 1.0 / sum(1.0 / v for v in vals)
            total = 0.0
            cur = a
            for i, c in enumerate(children):
                if i == len(children) - 1:
                    nxt = b
                else:
                    counter[0] += 1
                    nxt = f"m{counter[0]}"
                    vertices.add(nxt)
                total += build(c, cur, nxt)
                cur = nxt
            return total

        expected = build(term, "s", "t")
        g = net(sorted(vertices), edges, "s", "t")
        assert nl.effective_resistance(g) == pytest.approx(expected, rel=1e-8)


class TestPotentials:
    def test_constant_potential_zero_flow(self):
        g = net(["a", "b"], [("e", "a", "b", 2.0)])
        state = nl.potential_flow(g, nl.Potential({"a": 3.0, "b": 3.0}))
        assert state.norm_sq() == 0.0

    def test_unit_edge(self):
        g = net(["s", "t"], [("e", "s", "t", 1.0)], "s", "t")
        state = nl.potential_flow(g, nl.Potential({"s": 1.0, "t": 0.0}))
        assert state.coeffs["e"] == pytest.approx(1.0)

    def test_path_potential(self):
        vs = ["a", "b", "c", "d"]
        g = net(vs, [(f"e{i}", vs[i], vs[i + 1], 1.0) for i in range(3)])
        pot = nl.Potential({"a": 1.0, "b": 2 / 3, "c": 1 / 3, "d": 0.0})
        state = nl.potential_flow(g, pot)
        assert all(abs(c - 1 / 3) < 1e-12 for c in state.coeffs.values())
        circ = nl.circulation_matrix(g)
        assert circ.shape[1] == 0  # trees have no circulations to test against

    def test_potential_flows_orthogonal_to_circulations(self, rng):
        for _ in range(10):
            g = random_network(rng)
            pot = nl.Potential({v: rng.gauss(0, 1) for v in g.vertices})
            state = nl.potential_flow(g, pot)
            circ = nl.circulation_matrix(g)
            if circ.shape[1]:
                assert np.abs(circ.T @ state.vector(g)).max() < 1e-9

    def test_flow_potential_pairing(self, rng):
        """Inner product of a unit st-flow state with a potential state equals
        the potential drop from s to t."""
        for _ in range(10):
            g = random_network(rng)
            flow, _ = nl.min_energy_unit_flow(g)
            base = flow.vector(g)
            circ = nl.circulation_matrix(g)
            coeffs = np.array([rng.gauss(0, 1) for _ in range(circ.shape[1])])
            any_flow = base + (circ @ coeffs if circ.shape[1] else 0.0)
            pot = nl.Potential({v: rng.gauss(0, 1) for v in g.vertices})
            pstate = nl.potential_flow(g, pot).vector(g)
            drop = pot.values[g.s] - pot.values[g.t]
            assert float(any_flow @ pstate) == pytest.approx(drop, abs=1e-8)

    def test_space_dimensions_split(self, rng):
        """Circulations and potential states tile the edge space."""
        for _ in range(10):
            g = random_network(rng)
            circ_dim = len(nl.circulation_basis(g))
            vecs = []
            for v in g.vertices:
                pot = nl.Potential({u: float(u == v) for u in g.vertices})
                vecs.append(nl.potential_flow(g, pot).vector(g))
            rank = np.linalg.matrix_rank(np.stack(vecs), tol=1e-9)
            assert rank + circ_dim == len(g.edges)


class TestInverseResistance:
    def test_single_unit_edge(self):
        g = net(["s", "t"], [("e", "s", "t", 1.0)], "s", "t")
        assert nl.inverse_resistance_via_potentials(g) == pytest.approx(1.0)

    def test_two_series_edges(self):
        g = net(["s", "a", "t"], [("e1", "s", "a", 1.0), ("e2", "a", "t", 1.0)], "s", "t")
        assert nl.inverse_resistance_via_potentials(g) == pytest.approx(0.5)

    def test_consistency_with_resistance(self, rng):
        for _ in range(15):
            g = random_network(rng)
            r = nl.effective_resistance(g)
            assert nl.inverse_resistance_via_potentials(g) * r == pytest.approx(1.0, rel=1e-8)


class TestJson:
    def test_round_trip(self, rng):
        g = random_network(rng)
        g2 = nl.network_from_json(nl.network_to_json(g))
        assert nl.effective_resistance(g) == nl.effective_resistance(g2)
        assert nl.network_to_json(g) == nl.network_to_json(g2)

    def test_infinity_encoding(self):
        g = net(["a", "b"], [("e", "a", "b", INF)])
        obj = nl.network_to_json(g)
        assert obj["edges"][0]["r"] == "inf"
        assert nl.network_from_json(obj).edges[0].r == INF
