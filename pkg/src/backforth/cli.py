"""Command-line front end.

Exit codes separate verdicts from failures: 0 means the command succeeded
and any relation/boolean outcome it reports is positive, 1 means the
command ran fine but the outcome is negative (a relation fails, a formula
evaluates false, a criterion is unmet), and 2 means the invocation itself
went wrong (bad arguments, unreadable files, budget blowups).

Structures are read from files in the text format; formulas and families
may be given either as a path or as a literal (a path is used when the
argument names an existing file).  ``--json`` switches every subcommand to
machine-readable output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from .bfgame import (
    FormulaBudgetError,
    GameContractError,
    NodeBudgetError,
    Position,
    bf_equiv,
    bf_geq,
    bf_leq,
    bf_rank,
    distinguishing_formula,
)
from .constructions import (
    check_union_criteria,
    check_union_refutation,
    dominates,
    interval_factoring_check,
    parse_family_literal,
    verify_claim_geq3,
    verify_claim_subsetleq2,
)
from .formulas import classify, eval_formula, parse_formula, serialize_formula
from .structures import (
    ComponentSpec,
    SizeBudgetError,
    build_flower_graph,
    build_lemma21_pair,
    parse_structure,
    serialize_structure,
    structure_from_json,
)
from .typeformulas import (
    canonical_type_formulas,
    internal_sigma,
    isolate_pi_type,
    synth_geq1_sentence,
    synth_leq1_sentence,
)

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_ERROR = 2


def _read_structure(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_structure(handle.read())


def _read_formula(path_or_text: str):
    if os.path.exists(path_or_text):
        with open(path_or_text, "r", encoding="utf-8") as handle:
            return parse_formula(handle.read())
    return parse_formula(path_or_text)


def _parse_tuple(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(part.strip()) for part in text.split(","))

def _parse_assignment(text: str | None) -> dict[str, int]:
    out: dict[str, int] = {}
    if not text:
        return out
    for pair in text.split(","):
        name, _, value = pair.partition("=")
        if not _:
            raise ValueError(f"assignment entry {pair!r} is not name=value")
        out[name.strip()] = int(value.strip())
    return out


def _read_component_spec(path: str) -> ComponentSpec:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    parts = tuple(
        (structure_from_json(entry["structure"]), int(entry["multiplicity"]))
        for entry in payload["parts"]
    )
    return ComponentSpec(parts, payload.get("tag", "E"))


def _read_table(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    table = {tuple(cell): True for cell in payload.get("true", [])}
    bounds = tuple(payload["bounds"]) if "bounds" in payload else None
    return table, bounds


def _emit(args, payload: dict, human: str) -> None:
    print(json.dumps(payload) if args.json else human)


def _verdict_exit(holds: bool) -> int:
    return EXIT_HOLDS if holds else EXIT_FAILS


# --------------------------------------------------------------------------
# subcommand bodies


def _cmd_bf(args) -> int:
    position = Position(
        _read_structure(args.left),
        _parse_tuple(args.left_tuple),
        _read_structure(args.right),
        _parse_tuple(args.right_tuple),
        args.n,
    )
    query = {"leq": bf_leq, "geq": bf_geq, "equiv": bf_equiv}[args.direction]
    verdict = query(position, node_budget=args.node_budget)
    payload = {
        "direction": args.direction,
        "n": args.n,
        "holds": verdict.holds,
        "witness": list(verdict.witness) if verdict.witness is not None else None,
    }
    human = "holds" if verdict.holds else "fails"
    if verdict.witness is not None:
        human += f" (witness {list(verdict.witness)})"
    _emit(args, payload, human)
    return _verdict_exit(verdict.holds)


def _cmd_rank(args) -> int:
    value = bf_rank(
        _read_structure(args.left),
        _read_structure(args.right),
        args.cap,
        node_budget=args.node_budget,
    )
    _emit(args, {"rank": value, "cap": args.cap}, f"rank {value} (cap {args.cap})")
    return EXIT_HOLDS


def _cmd_distinguish(args) -> int:
    position = Position(
        _read_structure(args.left),
        _parse_tuple(args.left_tuple),
        _read_structure(args.right),
        _parse_tuple(args.right_tuple),
        args.n,
    )
    if bf_leq(position, node_budget=args.node_budget).holds:
        _emit(
            args,
            {"holds": True, "formula": None},
            "relation holds; nothing to distinguish",
        )
        return EXIT_FAILS
    formula = distinguishing_formula(position, node_budget=args.node_budget)
    text = serialize_formula(formula)
    _emit(args, {"holds": False, "formula": text}, text)
    return EXIT_HOLDS


def _cmd_classify(args) -> int:
    formula = _read_formula(args.formula)
    report = classify(formula)
    ranks = report.as_dict()
    human = ", ".join(f"{key}={value}" for key, value in ranks.items())
    _emit(args, {"ranks": ranks}, human)
    return EXIT_HOLDS


def _cmd_eval(args) -> int:
    formula = _read_formula(args.formula)
    structure = _read_structure(args.structure)
    result = eval_formula(formula, structure, _parse_assignment(args.assign))
    _emit(args, {"value": result}, "true" if result else "false")
    return _verdict_exit(result)


def _cmd_synth(args) -> int:
    structure = _read_structure(args.structure)
    if args.what == "type-formula":
        phi, psi = canonical_type_formulas(
            structure, _parse_tuple(args.tuple), args.n, tuple_bound=args.tuple_bound
        )
        payload = {"phi": serialize_formula(phi), "psi": serialize_formula(psi)}
        _emit(args, payload, f"phi: {payload['phi']}\npsi: {payload['psi']}")
        return EXIT_HOLDS
    if args.what == "geq1":
        formula = synth_geq1_sentence(structure, args.depth_bound)
    elif args.what == "leq1":
        formula = synth_leq1_sentence(structure)
    elif args.what == "isolate-type":
        formula = isolate_pi_type(structure, _parse_tuple(args.tuple), args.beta)
    else:  # internal-sigma
        if not args.formula:
            raise ValueError("internal-sigma needs --formula")
        formula = internal_sigma(structure, _read_formula(args.formula), args.alpha)
    text = serialize_formula(formula)
    _emit(args, {"formula": text}, text)
    return EXIT_HOLDS


def _cmd_flower(args) -> int:
    family = parse_family_literal(args.family, args.universe_bound)
    graph = build_flower_graph(family, args.copies)
    text = serialize_structure(graph, name="flower")
    _emit(args, {"structure": text, "size": graph.size}, text.rstrip("\n"))
    return EXIT_HOLDS


def _cmd_family(args) -> int:
    if args.family_op == "close":
        from .structures import close_family

        family = parse_family_literal(args.family, args.universe_bound)
        closed = close_family(family)
        members = sorted(
            ("{" + ",".join(str(e) for e in sorted(member)) + "}")
            for member in closed.sets
        )
        literal = ";".join(members)
        _emit(
            args,
            {"family": literal, "universe_bound": closed.universe_bound},
            literal,
        )
        return EXIT_HOLDS
    s = parse_family_literal(args.s, args.universe_bound)
    t = parse_family_literal(args.t, args.universe_bound)
    outcome = dominates(s, t)
    _emit(args, {"dominates": outcome}, "holds" if outcome else "fails")
    return _verdict_exit(outcome)


def _cmd_gadget(args) -> int:
    if args.gadget_op == "lemma21":
        table, bounds = _read_table(args.table)
        a, b = build_lemma21_pair(args.n, table, args.i, args.truncation, bounds)
        payload = {
            "a": serialize_structure(a, name="a"),
            "b": serialize_structure(b, name="b_i"),
        }
        _emit(args, payload, payload["a"] + "\n" + payload["b"])
        return EXIT_HOLDS
    if args.gadget_op == "union-criteria":
        report = check_union_criteria(
            _read_component_spec(args.a_spec),
            _parse_tuple(args.a_tuple),
            _read_component_spec(args.b_spec),
            _parse_tuple(args.b_tuple),
            args.n,
            node_budget=args.node_budget,
        )
        payload = asdict(report)
        ok = report.all_conditions_hold and bool(report.conclusion_holds)
        human = (
            f"conditions: a={report.cond_a} b={report.cond_b} "
            f"c={report.cond_c} d={report.cond_d}; "
            f"conclusion: {report.conclusion_holds}"
        )
        _emit(args, payload, human)
        return _verdict_exit(ok)
    if args.gadget_op == "union-refute":
        report = check_union_refutation(
            _read_component_spec(args.a_spec),
            _read_component_spec(args.b_spec),
            args.n,
            node_budget=args.node_budget,
        )
        payload = asdict(report)
        if report.witness_index is None:
            _emit(args, payload, "no refuting component found")
            return EXIT_FAILS
        human = (
            f"component {report.witness_index} refutes; "
            f"full-union check {'confirms' if report.refutation_verified else 'DISAGREES'}"
        )
        _emit(args, payload, human)
        return _verdict_exit(bool(report.refutation_verified))
    # interval-factor
    report = interval_factoring_check(
        _read_structure(args.left),
        _parse_tuple(args.left_tuple),
        _read_structure(args.right),
        _parse_tuple(args.right_tuple),
        args.n,
    )
    payload = {
        "direct": report.direct,
        "per_interval": list(report.per_interval),
        "factored": report.factored,
        "agreement": report.agreement,
    }
    human = (
        f"direct={report.direct} factored={report.factored} "
        f"agreement={report.agreement}"
    )
    _emit(args, payload, human)
    if not report.agreement:
        print("direct and factored verdicts disagree", file=sys.stderr)
        return EXIT_ERROR
    return _verdict_exit(report.direct)


def _cmd_verify(args) -> int:
    from . import acceptance

    names = list(acceptance.SUITES) if args.suite == "all" else [args.suite]
    results = []
    for name in names:
        if name not in acceptance.SUITES:
            raise ValueError(
                f"unknown suite {name!r}; choose from {', '.join(acceptance.SUITES)}"
            )
        results.append(acceptance.SUITES[name](args.seed))
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "criterion": r.criterion,
                        "name": r.name,
                        "passed": r.passed,
                        "detail": r.detail,
                    }
                    for r in results
                ]
            )
        )
    else:
        for r in results:
            print(r.line())
    return EXIT_HOLDS if all(r.passed for r in results) else EXIT_FAILS


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    cfg = ServiceConfig(
        port=args.port,
        clock_cap=args.clock_cap,
        size_cap=args.size_cap,
        session_log=args.log,
    )
    uvicorn.run(create_app(cfg), host=args.host, port=cfg.port)
    return EXIT_HOLDS


# --------------------------------------------------------------------------
# argument wiring


def _add_position_args(parser) -> None:
    parser.add_argument("--left", required=True, help="left structure file")
    parser.add_argument("--right", required=True, help="right structure file")
    parser.add_argument("--left-tuple", default="", help="comma-separated elements")
    parser.add_argument("--right-tuple", default="", help="comma-separated elements")
    parser.add_argument("--n", type=int, required=True, help="clock value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="backforth",
        description="asymmetric back-and-forth relations on finite structures",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bf", help="decide a relation query")
    _add_position_args(p)
    p.add_argument("--direction", choices=("leq", "geq", "equiv"), default="leq")
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(fn=_cmd_bf)

    p = sub.add_parser("rank", help="largest clock at which two structures agree")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(fn=_cmd_rank)

    p = sub.add_parser("distinguish", help="formula separating a failing position")
    _add_position_args(p)
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(fn=_cmd_distinguish)

    p = sub.add_parser("classify", help="six l-infinity-omega complexity ranks")
    p.add_argument("--formula", required=True, help="formula file or literal")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("eval", help="evaluate a formula on a structure")
    p.add_argument("--formula", required=True, help="formula file or literal")
    p.add_argument("--structure", required=True)
    p.add_argument("--assign", default="", help='free-variable values, "x=0,y=1"')
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("synth", help="synthesize characteristic formulas")
    p.add_argument(
        "what",
        choices=("type-formula", "geq1", "leq1", "internal-sigma", "isolate-type"),
    )
    p.add_argument("--structure", required=True)
    p.add_argument("--tuple", default="", help="pinned elements")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--tuple-bound", type=int, default=4)
    p.add_argument("--depth-bound", type=int, default=2)
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--formula", default="", help="input formula (internal-sigma)")
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("flower", help="encode a set family as a graph")
    p.add_argument("--family", required=True, help='family literal, "{0};{1,2}"')
    p.add_argument("--universe-bound", type=int, default=None)
    p.add_argument("--copies", type=int, required=True)
    p.set_defaults(fn=_cmd_flower)

    p = sub.add_parser("family", help="family closure and domination")
    fam_sub = p.add_subparsers(dest="family_op", required=True)
    q = fam_sub.add_parser("close")
    q.add_argument("--family", required=True)
    q.add_argument("--universe-bound", type=int, default=None)
    q.set_defaults(fn=_cmd_family)
    q = fam_sub.add_parser("dominates")
    q.add_argument("--s", required=True, help="candidate lower family")
    q.add_argument("--t", required=True, help="candidate upper family")
    q.add_argument("--universe-bound", type=int, default=None)
    q.set_defaults(fn=_cmd_family)

    p = sub.add_parser("gadget", help="paired-structure and factoring checks")
    gadget_sub = p.add_subparsers(dest="gadget_op", required=True)
    q = gadget_sub.add_parser("lemma21")
    q.add_argument("--n", type=int, choices=(2, 3), required=True)
    q.add_argument("--table", required=True, help='JSON file {"bounds":[..],"true":[[i,m,j]..]}')
    q.add_argument("--i", type=int, required=True)
    q.add_argument("--truncation", type=int, required=True)
    q.set_defaults(fn=_cmd_gadget)
    q = gadget_sub.add_parser("union-criteria")
    q.add_argument("--a-spec", required=True, help="component spec JSON file")
    q.add_argument("--a-tuple", default="")
    q.add_argument("--b-spec", required=True)
    q.add_argument("--b-tuple", default="")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--node-budget", type=int, default=None)
    q.set_defaults(fn=_cmd_gadget)
    q = gadget_sub.add_parser("union-refute")
    q.add_argument("--a-spec", required=True)
    q.add_argument("--b-spec", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--node-budget", type=int, default=None)
    q.set_defaults(fn=_cmd_gadget)
    q = gadget_sub.add_parser("interval-factor")
    _add_position_args(q)
    q.set_defaults(fn=_cmd_gadget)

    p = sub.add_parser("verify", help="run the acceptance suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--clock-cap", type=int, default=4)
    p.add_argument("--size-cap", type=int, default=12)
    p.add_argument("--log", default=None, help="append-only NDJSON session log")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (
        ValueError,
        KeyError,
        OSError,
        json.JSONDecodeError,
        GameContractError,
        NodeBudgetError,
        FormulaBudgetError,
        SizeBudgetError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def run() -> None:
    raise SystemExit(main())
