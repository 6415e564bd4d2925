"""Command-line front end.

Exit status: 0 when a split is found (or the command just reports), 2 when
``solve`` ends in ``no_ef_exists`` or ``deadlock``, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments
from .bundles import minimal_bundles
from .model import ParseError, ValidationError, all_desirable, is_responsive, is_separable, load_profile
from .oracle import SizeLimit, enumerate_ef_splits
from .trace import format_trace, trace_document
from .undercut import BUNDLE_ORDERS, InternalInvariantViolation, TieError, generation_phase, run


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers like 2:1, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fairsplit", description="Envy-free splits of indivisible objects between two agents.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_file(name, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("profile", help="profile JSON file")
        return sp

    def core_flags(sp):
        sp.add_argument("--first", type=int, choices=(1, 2), default=1, help="agent scanned first for a proposal")
        sp.add_argument("--tie-break", choices=("strict", "index"), default="strict",
                        help="generation-phase ties: fail, or pick the smallest index")
        sp.add_argument("--bundle-order", choices=BUNDLE_ORDERS, default="ascending",
                        help="how each agent ranks its minimal bundles by its own utility")

    sp = with_file("solve", "run an undercut procedure")
    sp.add_argument("--procedure", choices=("simplified", "original"), default="simplified")
    core_flags(sp)
    sp.add_argument("--trace", action="store_true", help="print the step trace")
    sp.add_argument("--trace-format", choices=("text", "json"), default="text")

    sp = with_file("bundles", "list minimal bundles")
    sp.add_argument("--agent", type=int, choices=(1, 2))
    sp.add_argument("--ground", choices=("all", "pile"), default="all",
                    help="whole universe, or the contested pile of the generation phase")
    sp.add_argument("--tie-break", choices=("strict", "index"), default="strict")

    with_file("validate", "check desirability, separability and responsiveness")
    with_file("oracle", "list every envy-free split")

    sp = with_file("compare", "oracle, simplified and original on one profile")
    core_flags(sp)

    sp = sub.add_parser("simulate", help="batch comparison on random profiles")
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--objects", type=int, required=True)
    sp.add_argument("--generator", choices=("additive", "separable-table"), default="additive")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--claims", type=_pair, default=(1, 1))
    sp.add_argument("--value-range", type=_pair, default=(1, 10))
    sp.add_argument("--csv", metavar="PATH", help="write per-profile results here")
    return p


def _split_text(universe, split) -> str:
    if split is None:
        return "none"
    return f"1:{universe.format(split.to_agent1)} 2:{universe.format(split.to_agent2)}"


def cmd_solve(args, out) -> int:
    profile = load_profile(args.profile)
    outcome = run(profile, args.procedure, args.first, args.tie_break, args.bundle_order)
    u = profile.universe
    print(f"procedure: {args.procedure}", file=out)
    print(f"classification: {outcome.classification}", file=out)
    print(f"proposer: {outcome.proposer if outcome.proposer is not None else '-'}", file=out)
    print(f"split: {_split_text(u, outcome.split)}", file=out)
    if args.trace:
        print("trace:", file=out)
        if args.trace_format == "json":
            print(json.dumps(trace_document(outcome.trace, u), indent=1), file=out)
        else:
            print(format_trace(outcome.trace, u), file=out)
    return 0 if outcome.found else 2


def cmd_bundles(args, out) -> int:
    profile = load_profile(args.profile)
    u = profile.universe
    if args.ground == "all":
        ground = u.full()
    else:
        ground = generation_phase(profile, args.tie_break).pile
    print(f"ground: {u.format(ground)}", file=out)
    if len(ground) == 0:
        return 0
    for agent in (args.agent,) if args.agent else (1, 2):
        fam = minimal_bundles(profile.pref(agent), ground, profile.claims_for(agent), agent=agent)
        print(f"MB agent={agent} bundles=[{','.join(u.format(b) for b in fam)}]", file=out)
    return 0


def _witness_text(universe, witness) -> str:
    parts = []
    for key in ("set", "object", "x", "y"):
        if key in witness:
            val = witness[key]
            name = "S" if key == "set" else key
            parts.append(f"{name}={universe.format(val) if key == 'set' else universe.names[val]}")
    return " ".join(parts)


def cmd_validate(args, out) -> int:
    profile = load_profile(args.profile)
    for agent in (1, 2):
        pref = profile.pref(agent)
        for rep in (all_desirable(pref), is_separable(pref), is_responsive(pref)):
            line = f"agent {agent} ({profile.agent_names[agent - 1]}): {rep.property}={str(rep.holds).lower()}"
            if not rep.holds:
                line += f" witness {_witness_text(profile.universe, rep.witness)}"
            print(line, file=out)
    return 0


def _classification_document(universe, c) -> dict:
    return {
        "agent1": universe.labels(c.split.to_agent1),
        "agent2": universe.labels(c.split.to_agent2),
        "agent1_relation": c.agent1_relation,
        "agent2_relation": c.agent2_relation,
        "verdict": c.verdict,
    }


def cmd_oracle(args, out) -> int:
    profile = load_profile(args.profile)
    docs = [_classification_document(profile.universe, c) for c in enumerate_ef_splits(profile)]
    print(json.dumps(docs, indent=1), file=out)
    return 0


def cmd_compare(args, out) -> int:
    profile = load_profile(args.profile)
    u = profile.universe
    efs = enumerate_ef_splits(profile)
    nontrivial = any(c.verdict == "ef_nontrivial" for c in efs)
    rows = [("oracle", f"ef_exists={str(bool(efs)).lower()}", f"nontrivial_exists={str(nontrivial).lower()} ef_splits={len(efs)}")]
    for proc in ("simplified", "original"):
        o = run(profile, proc, args.first, args.tie_break, args.bundle_order)
        rows.append((proc, o.classification, _split_text(u, o.split)))
    for name, verdict, detail in rows:
        print(f"{name:<11} {verdict:<16} {detail}", file=out)
    return 0


def cmd_simulate(args, out) -> int:
    generator = "additive_uniform" if args.generator == "additive" else "separable_table"
    config = experiments.BatchConfig(args.count, args.objects, generator, tuple(args.value_range),
                                     tuple(args.claims), args.seed)
    stats, results = experiments.run_batch(config)
    out.write(experiments.format_stats(stats, config))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            f.write(experiments.results_csv(results))
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "bundles": cmd_bundles,
    "validate": cmd_validate,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except (UsageError, ParseError, ValidationError, TieError, SizeLimit, InternalInvariantViolation,
            OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
