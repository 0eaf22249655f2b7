import json
import math

import pytest

from gclab import cli
from gclab._util import dumps


@pytest.fixture
def wheatstone(tmp_path):
    obj = {
        "vertices": ["s", "a", "b", "t"],
        "edges": [
            {"id": "sa", "tail": "s", "head": "a", "r": 1},
            {"id": "at", "tail": "a", "head": "t", "r": 1},
            {"id": "sb", "tail": "s", "head": "b", "r": 1},
            {"id": "bt", "tail": "b", "head": "t", "r": 1},
            {"id": "ab", "tail": "a", "head": "b", "r": 1},
        ],
        "s": "s",
        "t": "t",
    }
    path = tmp_path / "wheatstone.json"
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def and2(tmp_path):
    obj = {
        "vertices": ["s", "m", "t"],
        "edges": [
            {"id": "e1", "tail": "s", "head": "m", "r": 1},
            {"id": "e2", "tail": "m", "head": "t", "r": 1},
        ],
        "s": "s",
        "t": "t",
        "programs": {
            "e1": {"kind": "trivial", "pred": ["bit", 0, 1], "scale": 1.0},
            "e2": {"kind": "trivial", "pred": ["bit", 1, 1], "scale": 1.0},
        },
    }
    path = tmp_path / "and2.json"
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def or2(tmp_path):
    obj = {
        "vertices": ["s", "t"],
        "edges": [
            {"id": "e1", "tail": "s", "head": "t", "r": 1},
            {"id": "e2", "tail": "s", "head": "t", "r": 1},
        ],
        "s": "s",
        "t": "t",
        "programs": {
            "e1": {"kind": "trivial", "pred": ["bit", 0, 1], "scale": 1.0},
            "e2": {"kind": "trivial", "pred": ["bit", 1, 1], "scale": 1.0},
        },
    }
    path = tmp_path / "or2.json"
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestResistance:
    def test_wheatstone(self, capsys, wheatstone):
        code, out = run(capsys, "resistance", wheatstone)
        assert code == 0
        rep = json.loads(out)
        assert rep["effective_resistance"] == pytest.approx(1.0)

    def test_parallel_pair(self, capsys, tmp_path):
        obj = {"vertices": ["s", "t"],
               "edges": [{"id": "a", "tail": "s", "head": "t", "r": 1},
                         {"id": "b", "tail": "s", "head": "t", "r": 1}],
               "s": "s", "t": "t"}
        f = tmp_path / "par.json"
        f.write_text(json.dumps(obj))
        code, out = run(capsys, "resistance", str(f))
        assert json.loads(out)["effective_resistance"] == pytest.approx(0.5)

    def test_disconnected_prints_inf(self, capsys, tmp_path):
        obj = {"vertices": ["s", "t"], "edges": [], "s": "s", "t": "t"}
        f = tmp_path / "dis.json"
        f.write_text(json.dumps(obj))
        code, out = run(capsys, "resistance", str(f))
        assert json.loads(out)["effective_resistance"] == "inf"

    def test_malformed_input_exits_2(self, capsys, tmp_path):
        f = tmp_path / "broken.json"
        f.write_text("{not json")
        code, _ = run(capsys, "resistance", str(f))
        assert code == 2

    def test_missing_file_exits_2(self, capsys):
        code, _ = run(capsys, "resistance", "/nonexistent/net.json")
        assert code == 2


class TestWitness:
    def test_and2_positive(self, capsys, and2):
        code, out = run(capsys, "witness", and2, "11")
        rep = json.loads(out)
        assert code == 0
        assert rep["w_plus_resistance"] == pytest.approx(2.0)
        assert rep["discrepancy"] <= 1e-6

    def test_or2_negative(self, capsys, or2):
        code, out = run(capsys, "witness", or2, "00")
        rep = json.loads(out)
        assert rep["w_minus_resistance"] == pytest.approx(2.0)
        assert rep["classification"] == "negative"


class TestSimulate:
    def test_and2(self, capsys, and2):
        code, out = run(capsys, "simulate", and2, "11", "--bounds", "2,1")
        rep = json.loads(out)
        assert code == 0
        assert rep["success_probability"] >= 2.0 / 3.0
        assert rep["K"] == math.ceil(18 * math.sqrt(2))

    def test_undersized_bounds_warn(self, capsys, or2):
        code, out = run(capsys, "simulate", or2, "11", "--bounds", "0.01,0.01")
        rep = json.loads(out)
        assert "warning" in rep


class TestComposeDecompose:
    def test_compose_report(self, capsys, and2):
        code, out = run(capsys, "compose", and2, "--inputs", "00,01,10,11")
        rep = json.loads(out)
        assert rep["dim"] == 2
        assert rep["W_plus"] == pytest.approx(2.0)
        assert rep["complexity"] == pytest.approx(math.sqrt(2), rel=1e-9)

    def test_decompose_valid(self, capsys, wheatstone):
        code, out = run(capsys, "decompose", wheatstone, "--check-projector")
        rep = json.loads(out)
        assert code == 0 and rep["valid"]
        assert rep["projector_gap"] <= 1e-9


class TestConvertAndCatalog:
    def test_convert_tree(self, capsys, tmp_path):
        tree = {"query": 0, "w0": 1.0, "w1": 1.0,
                "c0": {"leaf": "0"},
                "c1": {"query": 1, "w0": 1.0, "w1": 1.0,
                       "c0": {"leaf": "0"}, "c1": {"leaf": "1"}}}
        f = tmp_path / "tree.json"
        f.write_text(json.dumps(tree))
        code, out = run(capsys, "convert", "tree", str(f))
        assert code == 0
        rep = json.loads(out)
        assert len(rep["edges"]) == 2  # the pruned chain: two accepting legs

    def test_catalog_threshold(self, capsys):
        code, out = run(capsys, "catalog", "threshold", "--n", "3", "--k", "2")
        rep = json.loads(out)
        assert code == 0 and rep["oracle_mismatches"] == 0

    def test_catalog_unknown_exits_2(self, capsys):
        code, _ = run(capsys, "catalog", "nonsense")
        assert code == 2


class TestVerify:
    def test_named_suite(self, capsys):
        code, out = run(capsys, "verify", "netlab")
        rep = json.loads(out)
        assert code == 0 and rep["passed"]

    def test_unknown_suite(self, capsys):
        code, _ = run(capsys, "verify", "bogus")
        assert code == 2


class TestDeterminism:
    def test_fixed_seed_byte_identical(self, capsys, wheatstone):
        _, out1 = run(capsys, "--seed", "7", "resistance", wheatstone)
        _, out2 = run(capsys, "--seed", "7", "resistance", wheatstone)
        assert out1 == out2

    def test_round_trip_stability(self, capsys, and2):
        """Parse -> serialize -> parse gives bit-identical reports."""
        from gclab import graphcomp as gc

        cg = gc.composition_from_json(json.loads(open(and2).read()))
        obj = gc.composition_to_json(cg)
        cg2 = gc.composition_from_json(json.loads(dumps(obj)))
        a = gc.witness_sizes_via_resistance(cg, "11")
        b = gc.witness_sizes_via_resistance(cg2, "11")
        assert a == b
