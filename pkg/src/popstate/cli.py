"""Command-line front end.

Every report is a sequence of ``key: value`` lines.  Exit codes: 0 positive
answer, 1 negative answer, 2 usage or input error, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import bounds, bottom, cpn, formats, reach, stab, verify
from .core import Configuration, PetriNet, format_config, parse_config

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _config(text: str, net: PetriNet, flag: str) -> Configuration:
    try:
        return parse_config(text, net.states)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _budget(args) -> reach.ExplorationBudget:
    return reach.ExplorationBudget(args.budget)


def _word(net: PetriNet, word) -> str:
    return " ".join(net.label(t) for t in word) if word else "-"


def _out(key: str, value) -> None:
    print(f"{key}: {value}")


# -- subcommands ---------------------------------------------------------


def cmd_verify(args) -> int:
    protocol = formats.load_net_file(args.protocol).protocol()
    try:
        phi = verify.CountingPredicate.parse(args.predicate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = verify.stably_computes(protocol, phi, args.max_input, _budget(args))
    _out("verdict", report.verdict)
    _out("predicate", phi)
    r = report.checked_inputs
    _out("checked-inputs", f"{r.start}..{r.stop - 1}")
    for res in report.per_input:
        _out(f"input {res.input_count}", f"{res.verdict} ({res.explored} configurations)")
    cex = report.counterexample
    if cex is not None:
        _out("initial", format_config(cex.initial))
        _out("trace", _word(protocol.net, cex.word))
        _out("reached", format_config(cex.reached))
        _out("reason", cex.reason)
    return {
        verify.Verdict.VERIFIED: EXIT_OK,
        verify.Verdict.REFUTED: EXIT_NEGATIVE,
        verify.Verdict.INCONCLUSIVE: EXIT_BUDGET,
    }[report.verdict]


def cmd_cover(args) -> int:
    net = formats.load_net_file(args.net).net()
    source = _config(args.source, net, "--from")
    target = _config(args.target, net, "--target")
    witness = reach.coverable(net, source, target)
    if witness is None:
        _out("verdict", "UNCOVERABLE")
        return EXIT_NEGATIVE
    _out("verdict", "COVERABLE")
    _out("word", _word(net, witness.word))
    _out("reached", format_config(witness.reached))
    return EXIT_OK


def cmd_reach(args) -> int:
    net = formats.load_net_file(args.net).net()
    source = _config(args.source, net, "--from")
    result = reach.reachable_set(net, source, reach.ExplorationBudget(args.max))
    _out("configurations", len(result))
    _out("exhausted", str(result.exhausted).lower())
    for c in result.configurations:
        _out("config", format_config(c))
    return EXIT_OK if result.exhausted else EXIT_BUDGET


def cmd_stable(args) -> int:
    protocol = formats.load_net_file(args.protocol).protocol()
    c = _config(args.config, protocol.net, "--config")
    result = stab.output_stable(protocol, c, _budget(args))
    _out("verdict", result.verdict)
    if result.verdict is not stab.OutputVerdict.STABLE_ZERO:
        for key, w in (("not-zero", result.not_zero), ("not-one", result.not_one)):
            if w is not None:
                _out(f"{key}-word", _word(protocol.net, w.word))
                _out(f"{key}-reached", format_config(w.reached))
    return {
        stab.OutputVerdict.STABLE_ZERO: EXIT_OK,
        stab.OutputVerdict.STABLE_ONE: EXIT_OK,
        stab.OutputVerdict.UNSTABLE: EXIT_NEGATIVE,
        stab.OutputVerdict.UNKNOWN: EXIT_BUDGET,
    }[result.verdict]


def cmd_bottom(args) -> int:
    net = formats.load_net_file(args.net).net()
    rho = _config(args.source, net, "--from")
    budget = _budget(args)
    if args.extract:
        w = bottom.extract_bottom(net, rho, budget)
        if w is None:
            _out("verdict", "UNKNOWN")
            return EXIT_BUDGET
        _out("sigma", _word(net, w.sigma))
        _out("w", _word(net, w.w))
        _out("Q", " ".join(w.q) if w.q else "-")
        _out("alpha", format_config(w.alpha))
        _out("beta", format_config(w.beta))
        _out("component-size", w.component_size)
        return EXIT_OK
    verdict = bottom.is_bottom(net, rho, budget)
    comp = bottom.component(net, rho, budget)
    _out("bottom", {True: "true", False: "false", None: "unknown"}[verdict])
    _out("component-complete", str(comp.complete).lower())
    _out("component-size", len(comp))
    for c in sorted(comp.members, key=lambda c: c.to_vector(net.states)):
        _out("member", format_config(c))
    if verdict is None:
        return EXIT_BUDGET
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_hilbert(args) -> int:
    sf = formats.load_system_file(args.system)
    system = cpn.DiophantineSystem(tuple(sf.states), sf.signs, tuple(sf.actions))
    basis = cpn.hilbert_basis(system)
    _out("basis-size", len(basis))
    _out("pottier-bound", system.pottier_bound())
    for alpha, beta in basis:
        b = ",".join(f"{sf.action_names[j]}={v}" for j, v in sorted(beta.items()))
        _out("element", f"alpha={{{format_config(alpha)}}} beta={{{b}}}")
    return EXIT_OK


def _edge_map(text: str, g: cpn.ControlGraph) -> dict[int, int]:
    phi: dict[int, int] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not name.startswith("e") or not name[1:].isdigit() or not value.strip().isdigit():
            raise UsageError(f"--parikh: expected 'e<k>=<count>', got {part!r}")
        e = int(name[1:]) - 1
        if not 0 <= e < len(g.edges):
            raise UsageError(f"--parikh: no edge {name}")
        phi[e] = phi.get(e, 0) + int(value)
    return phi


def cmd_euler(args) -> int:
    nf = formats.load_net_file(args.graph)
    if nf.project is None or nf.seed is None:
        raise UsageError(f"{args.graph}: a graph file needs 'project:' and 'seed:' lines")
    net = nf.net()
    g = cpn.build_control_graph(net, nf.project, nf.seed, _budget(args))
    _out("controls", g.num_controls)
    for i, c in enumerate(g.controls):
        _out(f"control {i}", format_config(c))
    for i, e in enumerate(g.edges):
        _out(f"edge {g.edge_name(i)}", f"{e.source} -{net.label(e.transition)}-> {e.target}")
    anchor = args.anchor
    if args.total:
        cycle = cpn.total_cycle(g, 0 if anchor is None else anchor)
    else:
        if args.parikh is None:
            raise UsageError("euler needs --parikh or --total")
        phi = _edge_map(args.parikh, g)
        if anchor is None:
            anchor = min((g.edges[e].source for e, k in phi.items() if k), default=0)
        cycle = cpn.euler_cycle(g, phi, anchor)
    _out("cycle", " ".join(g.edge_name(e) for e in cycle) if cycle else "-")
    _out("length", len(cycle))
    return EXIT_OK


def cmd_bound(args) -> int:
    try:
        inputs = bounds.BoundInputs(args.states, args.width, args.leaders)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    value = bounds.main_theorem_bound(inputs)
    if args.digits_only:
        _out("digits", value.digits())
    else:
        _out("bound", value)
    return EXIT_OK


def cmd_emit_example(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    make = {1: verify.example1_protocol, 2: verify.example2_protocol}[args.which]
    text = formats.format_protocol(make(args.n))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        _out("written", args.output)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="popstate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def budget(p):
        p.add_argument("--budget", type=int, default=reach.DEFAULT_BUDGET.max_configurations,
                       help="maximum configurations explored per search")

    p = sub.add_parser("verify", help="check that a protocol stably computes i>=n")
    p.add_argument("--protocol", required=True)
    p.add_argument("--predicate", required=True)
    p.add_argument("--max-input", type=int, required=True)
    budget(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cover", help="coverability with a shortest witness")
    p.add_argument("--net", required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("reach", help="budgeted reachable set")
    p.add_argument("--net", required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--max", type=int, default=reach.DEFAULT_BUDGET.max_configurations)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("stable", help="output stability of a configuration")
    p.add_argument("--protocol", required=True)
    p.add_argument("--config", required=True)
    budget(p)
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("bottom", help="component and bottom analysis")
    p.add_argument("--net", required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--extract", action="store_true", help="extract a bottom witness")
    budget(p)
    p.set_defaults(func=cmd_bottom)

    p = sub.add_parser("hilbert", help="Hilbert basis of a system file")
    p.add_argument("--system", required=True)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("euler", help="cycle with a given Parikh image in a control graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--parikh")
    p.add_argument("--total", action="store_true", help="build a total cycle instead")
    p.add_argument("--anchor", type=int, help="index of the starting control")
    budget(p)
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("bound", help="evaluate the state-complexity bound")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--leaders", type=int, required=True)
    p.add_argument("--digits-only", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("emit-example", help="write one of the example protocols")
    p.add_argument("--which", type=int, choices=(1, 2), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_emit_example)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, formats.ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except cpn.ComponentTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (reach.PreconditionError, cpn.GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
