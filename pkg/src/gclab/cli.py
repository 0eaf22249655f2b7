"""Command-line surface: JSON I/O, verification suites, report emission.

Subcommands: resistance | witness | compose | decompose | simulate |
convert | catalog | verify.  Exit codes: 0 pass, 1 property violation,
2 input error.  All randomness is seeded; reports carry no timestamps, so
fixed inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import netlab, spanprog, graphcomp, decomp, quantsim, frameworks, catalog
from ._util import dumps, json_number

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _emit(report: dict, fmt: str):
    if fmt == "json":
        print(dumps(report))
    else:
        for key in sorted(report):
            print(f"{key}: {report[key]}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_resistance(args) -> int:
    net = netlab.network_from_json(_load_json(args.network))
    s = args.s or net.s
    t = args.t or net.t
    flow, energy = (None, math.inf)
    norm = netlab.normalize_network(netlab.ResistorNetwork(net.vertices, net.edges, s, t))
    circ_dim = 0
    if not norm.short_circuit:
        circ_dim = len(netlab.circulation_basis(norm.network))
        flow, energy = netlab.min_energy_unit_flow(norm.network)
    resistance = netlab.effective_resistance(net, s, t)
    report = {
        "effective_resistance": json_number(resistance),
        "flow_energy": json_number(0.0 if norm.short_circuit else energy),
        "circulation_dimension": circ_dim,
        "short_circuit": norm.short_circuit,
    }
    if flow is not None:
        report["min_energy_flow"] = netlab.flow_to_json(flow)
    _emit(report, args.output)
    return EXIT_OK


def cmd_witness(args) -> int:
    cg = graphcomp.composition_from_json(_load_json(args.composition))
    x = args.input
    wp_r, wm_r = graphcomp.witness_sizes_via_resistance(cg, x)
    program = graphcomp.compose(cg)
    pos = spanprog.positive_witness(program, x)
    neg = spanprog.negative_witness(program, x)
    wp_d, wm_d = pos.size, neg.size

    def rel_gap(a, b):
        if a == math.inf and b == math.inf:
            return 0.0
        if a == math.inf or b == math.inf:
            return math.inf
        return abs(a - b) / max(abs(a), abs(b), 1e-30)

    gap = max(rel_gap(wp_r, wp_d), rel_gap(wm_r, wm_d))
    report = {
        "input": x,
        "classification": spanprog.classify(program, x),
        "w_plus_resistance": json_number(wp_r),
        "w_minus_resistance": json_number(wm_r),
        "w_plus_direct": json_number(wp_d),
        "w_minus_direct": json_number(wm_d),
        "discrepancy": json_number(gap),
    }
    _emit(report, args.output)
    return EXIT_OK if gap <= 1e-6 else EXIT_VIOLATION


def cmd_compose(args) -> int:
    cg = graphcomp.composition_from_json(_load_json(args.composition))
    program = graphcomp.compose(cg)
    report = {
        "dim": program.dim,
        "free_subspace_dim": int(program.k_basis().shape[1]),
        "initial_norm_sq": program.initial_norm_sq(),
        "edges": len(cg.edges),
    }
    if args.inputs:
        rep = spanprog.complexity(program, args.inputs.split(","))
        report["W_plus"] = json_number(rep.w_plus_max)
        report["W_minus"] = json_number(rep.w_minus_max)
        report["complexity"] = json_number(rep.complexity)
    _emit(report, args.output)
    return EXIT_OK


def cmd_decompose(args) -> int:
    net = netlab.network_from_json(_load_json(args.network))
    norm = netlab.normalize_network(net)
    tree = decomp.auto_decompose(norm.network)
    violations = decomp.validate_decomposition(norm.network, tree)
    cost = decomp.decomposition_cost(tree, len(norm.network.edges))
    report = {
        "tree": decomp.tree_to_json(tree),
        "valid": not violations,
        "depth": cost.depth,
        "branch_bounds": list(cost.branch_bounds),
        "K": cost.combo_count,
        "qrom_bits": cost.qrom_bits,
        "gates": cost.gates,
    }
    if args.check_projector:
        _, proj = decomp.reflection_from_decomposition(norm.network, tree)
        direct = decomp.circulation_projector_direct(norm.network)
        report["projector_gap"] = float(abs(proj - direct).max())
    _emit(report, args.output)
    return EXIT_OK if not violations else EXIT_VIOLATION


def cmd_simulate(args) -> int:
    cg = graphcomp.composition_from_json(_load_json(args.composition))
    x = args.input
    if args.bounds:
        wp, wm = (float(v) for v in args.bounds.split(","))
    else:
        wp = wm = 0.0
        program = graphcomp.compose(cg)
        domain = program.inputs or (x,)
        rep = spanprog.complexity(program, domain)
        wp = rep.w_plus_max or 1.0
        wm = rep.w_minus_max or 1.0
    res = quantsim.run_algorithm1(cg, wp, wm, x, max_k=args.max_k, max_dim=args.max_dim)
    report = res.to_json()
    report["bounds"] = [wp, wm]
    if res.success_probability < 2.0 / 3.0:
        report["warning"] = "success probability below 2/3; bounds may be undersized"
    _emit(report, args.output)
    return EXIT_OK


def cmd_convert(args) -> int:
    obj = _load_json(args.file)
    if args.model == "tree":
        tree = frameworks.tree_from_json(obj)
        cg = frameworks.tree_to_st(tree)
    elif args.model == "st":
        inst = graphcomp.st_instance_from_json(obj)
        cg = graphcomp.from_st_instance(inst)
    else:
        print(f"unsupported model {args.model!r}", file=sys.stderr)
        return EXIT_INPUT
    print(dumps(graphcomp.composition_to_json(cg)))
    return EXIT_OK


def cmd_catalog(args) -> int:
    import itertools
    import random

    rng = random.Random(args.seed)
    name = args.problem
    report = {"problem": name}
    mismatches = 0
    if name == "threshold":
        n, k = args.n, args.k
        cg = catalog.threshold(n, k)
        table = []
        for bits in itertools.product("01", repeat=n):
            x = "".join(bits)
            wp, wm = graphcomp.witness_sizes_via_resistance(cg, x)
            ep, em = catalog.threshold_witness_formulas(n, k, x.count("1"))
            table.append({"input": x, "w_plus": json_number(wp), "w_minus": json_number(wm)})
            for a, b in ((wp, ep), (wm, em)):
                if a == math.inf and b == math.inf:
                    continue
                if a == math.inf or b == math.inf or abs(a - b) > 1e-6 * max(abs(b), 1.0):
                    mismatches += 1
        report.update({"edges": len(cg.edges), "witness_table": table,
                       "complexity": catalog.threshold_complexity(n, k)})
    elif name == "dyck":
        n, depth = args.n, args.k or 3
        cg = catalog.dyck(n, depth)
        for bits in itertools.product("()", repeat=n):
            x = "".join(bits)
            if graphcomp.classify_connectivity(cg, x) != catalog.dyck_oracle(x, depth):
                mismatches += 1
        report.update({"inputs_checked": 2 ** n})
    elif name == "sigma202":
        n = args.n
        cg = catalog.sigma202(n)
        for bits in itertools.product("012", repeat=n):
            x = "".join(bits)
            if graphcomp.classify_connectivity(cg, x) != catalog.sigma202_oracle(x):
                mismatches += 1
        report.update({"inputs_checked": 3 ** n})
    elif name == "inc3":
        n = args.n
        cg = catalog.inc_subseq_3(n)
        for _ in range(args.trials):
            x = tuple(rng.randrange(8) for _ in range(n))
            if graphcomp.classify_connectivity(cg, x) != catalog.inc3_oracle(x):
                mismatches += 1
        report.update({"inputs_checked": args.trials})
    else:
        print(f"unknown catalog problem {name!r}", file=sys.stderr)
        return EXIT_INPUT
    report["oracle_mismatches"] = mismatches
    _emit(report, args.output)
    return EXIT_OK if mismatches == 0 else EXIT_VIOLATION


def cmd_verify(args) -> int:
    from . import verify as verify_mod

    suites = verify_mod.SUITES
    if args.suite != "all" and args.suite not in suites:
        print(f"unknown suite {args.suite!r}; choose from {sorted(suites)} or 'all'",
              file=sys.stderr)
        return EXIT_INPUT
    names = sorted(suites) if args.suite == "all" else [args.suite]
    failures = []
    for name in names:
        for violation in suites[name](seed=args.seed):
            failures.append({"suite": name, "violation": violation})
    report = {"suites": names, "failures": failures, "passed": not failures}
    _emit(report, args.output)
    return EXIT_OK if not failures else EXIT_VIOLATION


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--tolerance", type=float, default=1e-9)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--max-dim", dest="max_dim", type=int, default=4096)
    shared.add_argument("--output", choices=("json", "table"), default="json")

    ap = argparse.ArgumentParser(prog="gclab", description=__doc__, parents=[shared])
    sub = ap.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[shared], **kw)

    p = add_parser("resistance", help="effective resistance of a network file")
    p.add_argument("network")
    p.add_argument("--s")
    p.add_argument("--t")
    p.set_defaults(func=cmd_resistance)

    p = add_parser("witness", help="witness sizes via both computation paths")
    p.add_argument("composition")
    p.add_argument("input")
    p.set_defaults(func=cmd_witness)

    p = add_parser("compose", help="materialize a composition")
    p.add_argument("composition")
    p.add_argument("--inputs", help="comma-separated input labels for complexity")
    p.set_defaults(func=cmd_compose)

    p = add_parser("decompose", help="tree-parallel decomposition of a network")
    p.add_argument("network")
    p.add_argument("--check-projector", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = add_parser("simulate", help="exact run of the span program algorithm")
    p.add_argument("composition")
    p.add_argument("input")
    p.add_argument("--bounds", help="W+,W- override")
    p.add_argument("--max-K", dest="max_k", type=int, default=4096)
    p.set_defaults(func=cmd_simulate)

    p = add_parser("convert", help="convert a classical model file")
    p.add_argument("model", choices=("tree", "st"))
    p.add_argument("file")
    p.set_defaults(func=cmd_convert)

    p = add_parser("catalog", help="catalog construction reports")
    p.add_argument("problem")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_catalog)

    p = add_parser("verify", help="run a verification suite")
    p.add_argument("suite")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for bad usage already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
