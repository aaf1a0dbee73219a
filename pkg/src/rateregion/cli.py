"""Command-line front end.

Subcommands:

* ``validate``   structural report for a scheme file (exit 1 on findings)
* ``factorize``  print the oriented target-distribution factorization
* ``bounds``     raw covering/packing inequalities (with L and Rhat rates)
* ``region``     post-elimination region over message rates
* ``eval``       instantiate the region on a pmf file; vertices when <= 3D
* ``fixtures``   run the built-in calibration suite

``--format json`` emits versioned machine-readable output; the default
text form prints inequalities in I(.;.|.) notation with Q always shown.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bounds import DEFAULT_SVO_MODE, SVO_MODES, decoding_bounds, encoding_bounds
from .files import parse_pmf, parse_scheme, serialize_scheme
from .fixtures import FIXTURE_NAMES, get_fixture, run_fixture
from .graph import Q, build, check_assumptions, factorize, orient
from .network import SchemeError, apply_splits, validate_network
from .numeric import eval_region, validate_pmf
from .systems import (
    DEFAULT_MAX_ROWS,
    EliminationLimitError,
    assemble,
    project_to_message_rates,
)

JSON_SCHEMA = "rateregion/1"


def _rv_json(rv) -> str:
    return str(rv)


def _rhs_json(rhs) -> dict:
    return {
        "const": str(rhs.const),
        "terms": [
            {
                "coeff": str(c),
                "left": sorted(map(_rv_json, t.left)),
                "right": sorted(map(_rv_json, t.right)),
                "given": sorted(map(_rv_json, t.given)),
            }
            for c, t in rhs.terms
        ],
    }


def _ineq_json(row) -> dict:
    return {
        "lhs": [{"symbol": str(s), "coeff": str(c)} for s, c in row.lhs],
        "sense": row.sense,
        "rhs": _rhs_json(row.rhs),
    }


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "json":
        print(json.dumps({"schema": JSON_SCHEMA, **payload}, indent=2))
    else:
        for line in text_lines:
            print(line)


def _load_scheme(args):
    doc = parse_scheme(args.scheme)
    problems = validate_network(doc.network)
    if problems:
        raise SchemeError("invalid network:\n" + "\n".join(problems))
    split, recomp = apply_splits(doc.network, doc.splits)
    graph = build(split, doc.edge_list())
    return doc, split, recomp, graph


def _mode(args, doc) -> str:
    return args.svo_mode if args.svo_mode else doc.options.svo_mode


def cmd_validate(args) -> int:
    doc = parse_scheme(args.scheme)
    problems = validate_network(doc.network)
    graph = None
    if not problems:
        try:
            split, _ = apply_splits(doc.network, doc.splits)
            graph = build(split, doc.edge_list())
        except SchemeError as exc:
            problems.append(str(exc))
    if graph is not None:
        problems.extend(check_assumptions(graph))
    payload = {"valid": not problems, "problems": problems}
    text = ["valid"] if not problems else problems
    _emit(args, payload, text)
    return 0 if not problems else 1


def cmd_factorize(args) -> int:
    _, _, _, graph = _load_scheme(args)
    problems = check_assumptions(graph)
    if problems:
        raise SchemeError("\n".join(problems))
    fact = factorize(orient(graph))
    payload = {
        "factors": [
            {"node": str(node), "given": [str(p) for p in parents]}
            for node, parents in fact.factors
        ]
    }
    _emit(args, payload, fact.pretty())
    return 0


def cmd_bounds(args) -> int:
    doc, split, recomp, graph = _load_scheme(args)
    problems = check_assumptions(graph)
    if problems:
        raise SchemeError("\n".join(problems))
    dag = orient(graph)
    mode = _mode(args, doc)
    enc = encoding_bounds(dag, mode)
    dec = {z: decoding_bounds(dag, z) for z in range(1, split.n_rx + 1)}
    payload = {
        "svo_mode": mode,
        "encoding": [_ineq_json(r) for r in enc],
        "decoding": {str(z): [_ineq_json(r) for r in rows] for z, rows in dec.items()},
    }
    text = ["encoding:"]
    text += [f"  {r}" for r in enc] if enc else ["  (none)"]
    for z, rows in dec.items():
        text.append(f"decoding at receiver {z}:")
        text += [f"  {r}" for r in rows] if rows else ["  (none)"]
    _emit(args, payload, text)
    return 0


def _compute_region(args):
    doc, split, recomp, graph = _load_scheme(args)
    problems = check_assumptions(graph)
    if problems:
        raise SchemeError("\n".join(problems))
    dag = orient(graph)
    mode = _mode(args, doc)
    enc = encoding_bounds(dag, mode)
    dec = []
    for z in range(1, split.n_rx + 1):
        dec.extend(decoding_bounds(dag, z))
    sys_ = assemble(enc, dec, recomp)
    region = project_to_message_rates(sys_, recomp, max_rows=args.max_inequalities)
    return doc, dag, region, mode


def cmd_region(args) -> int:
    _, _, region, mode = _compute_region(args)
    payload = {
        "svo_mode": mode,
        "variables": [str(v) for v in region.variables],
        "inequalities": [_ineq_json(r) for r in region.rows],
    }
    _emit(args, payload, [str(r) for r in region.rows])
    return 0


def cmd_eval(args) -> int:
    doc, dag, region, mode = _compute_region(args)
    pmf, channel = parse_pmf(args.pmf)
    q_size = pmf.size(Q)
    problems = []
    if q_size != doc.options.q_cardinality:
        problems.append(
            f"pmf Q axis has size {q_size} but the scheme declares"
            f" q_cardinality {doc.options.q_cardinality}"
        )
    fact = factorize(dag)
    problems.extend(validate_pmf(pmf, fact, channel))
    if problems:
        _emit(args, {"valid": False, "problems": problems}, problems)
        return 1
    numeric = eval_region(region, pmf)
    rows_text = []
    rows_json = []
    for (lhs, sense, value), row in zip(numeric.rows, region.rows):
        left = str(row).split(f" {row.sense} ")[0]
        rows_text.append(f"{left} {sense} {value:.9f}")
        rows_json.append(
            {
                "lhs": [{"symbol": str(s), "coeff": str(c)} for s, c in lhs],
                "sense": sense,
                "value": value,
            }
        )
    text = rows_text
    payload = {
        "svo_mode": mode,
        "variables": [str(v) for v in numeric.variables],
        "inequalities": rows_json,
    }
    if numeric.vertices is not None:
        payload["vertices"] = [list(v) for v in numeric.vertices]
        text = rows_text + ["vertices:"] + [
            "  (" + ", ".join(f"{x:.9f}" for x in v) + ")" for v in numeric.vertices
        ]
    _emit(args, payload, text)
    return 0


def cmd_fixtures(args) -> int:
    reports = []
    for name in FIXTURE_NAMES:
        reports.append(run_fixture(get_fixture(name), points=args.points))
    # calibration cross-check: exactly one covering-sum mode matches marton2
    other = run_fixture(get_fixture("marton2"), mode="subset", points=0)
    exclusivity_ok = other.symbolic_match is False
    payload = {
        "fixtures": [
            {
                "name": r.name,
                "passed": r.passed,
                "detail": r.summary(),
            }
            for r in reports
        ],
        "subset_mode_rejected_on_marton2": exclusivity_ok,
    }
    text = []
    ok = True
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        ok = ok and r.passed
        text.append(f"{status} {r.name}: {r.summary()}")
    status = "PASS" if exclusivity_ok else "FAIL"
    ok = ok and exclusivity_ok
    text.append(f"{status} marton2 rejects the non-default covering-sum mode")
    _emit(args, payload, text)
    return 0 if ok else 1


def cmd_canonicalize(args) -> int:
    doc = parse_scheme(args.scheme)
    sys.stdout.write(serialize_scheme(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rateregion",
        description="Derive achievable rate regions from chain-graph scheme files.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scheme_cmd(name, func, help_, pmf=False, region_opts=False):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.add_argument("scheme", help="scheme file (JSON)")
        if region_opts:
            p.add_argument(
                "--svo-mode",
                choices=SVO_MODES,
                default=None,
                help="side of the subset family the covering-rate sum ranges over"
                " (default: the scheme's option, normally 'complement')",
            )
            p.add_argument(
                "--max-inequalities",
                type=int,
                default=DEFAULT_MAX_ROWS,
                help="abort elimination beyond this many intermediate inequalities",
            )
        if pmf:
            p.add_argument("--pmf", required=True, help="pmf file (JSON)")
        p.set_defaults(func=func)
        return p

    add_scheme_cmd("validate", cmd_validate, "check structural rules")
    add_scheme_cmd("factorize", cmd_factorize, "print the joint-distribution factorization")
    add_scheme_cmd("bounds", cmd_bounds, "print raw covering/packing bounds", region_opts=True)
    add_scheme_cmd("region", cmd_region, "print the region over message rates", region_opts=True)
    add_scheme_cmd(
        "eval", cmd_eval, "evaluate the region on a channel distribution",
        pmf=True, region_opts=True,
    )
    add_scheme_cmd("canonicalize", cmd_canonicalize, "rewrite a scheme file canonically")

    p = sub.add_parser("fixtures", help="run the built-in calibration suite", parents=[common])
    p.add_argument(
        "--points", type=int, default=1000, help="numeric cross-check sample count"
    )
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemeError, EliminationLimitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
