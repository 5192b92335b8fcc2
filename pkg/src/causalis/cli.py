"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 the requested transition
cannot happen, 3 an internal consistency check failed (including a hard
corpus check or an oracle/engine mismatch).
"""

import argparse
import os
import sys

from . import corpus, report
from .engine import Evaluator, causal_account, to_mask
from .errors import CausalisError, InvariantError, NetworkError, RealizationError
from .network import (
    INPUT,
    OUTPUT,
    Occurrence,
    Transition,
    load_network,
    pin_background,
    validate_transition,
)
from .oracle import DOCSpec, LTUSpec, build_doc_network, build_ltu_network, doc_predict, ltu_predict
from .repertoire import CAUSE, EFFECT, cause_repertoire, effect_repertoire, unconstrained_cause, unconstrained_effect

EXIT_OK, EXIT_USAGE, EXIT_REALIZATION, EXIT_INVARIANT = 0, 1, 2, 3
DEFAULT_MAX_SLICE = 20


class UsageError(CausalisError):
    pass


def parse_assignments(items) -> dict:
    """``["A=1,B=0", "C=1"]`` -> ``{"A": "1", "B": "0", "C": "1"}``."""
    out = {}
    for item in items or []:
        for piece in item.split(","):
            piece = piece.strip()
            if not piece:
                continue
            name, sep, label = piece.partition("=")
            if not sep or not name.strip():
                raise UsageError(f"expected NAME=STATE, got {piece!r}")
            name = name.strip()
            if name in out and out[name] != label.strip():
                raise UsageError(f"conflicting values for {name!r}")
            out[name] = label.strip()
    return out


def parse_names(items) -> list:
    return [n.strip() for item in items or [] for n in item.split(",") if n.strip()]


def max_slice(args) -> int:
    if args.max_slice is not None:
        return args.max_slice
    env = os.environ.get("CAUSALIS_MAX_SLICE")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"CAUSALIS_MAX_SLICE must be an integer, got {env!r}") from None
    return DEFAULT_MAX_SLICE


def _load(args):
    try:
        net = load_network(args.network)
    except OSError as exc:
        raise UsageError(f"cannot read {args.network}: {exc.strerror or exc}") from None
    pins = parse_assignments(args.pin)
    if pins:
        net = pin_background(net, pins)
    cap = max_slice(args)
    for slice, variables in ((INPUT, net.inputs), (OUTPUT, net.outputs)):
        if len(variables) > cap:
            raise UsageError(
                f"{slice} slice has {len(variables)} variables, above the cap of {cap} "
                "(raise it with --max-slice or CAUSALIS_MAX_SLICE)"
            )
    return net, pins


def _transition(net, args, pins) -> Transition:
    before = parse_assignments(args.before)
    for name, label in pins.items():
        # a pinned input may be restated, but only with its pinned value
        if name in before:
            if before.pop(name) != str(label):
                raise UsageError(f"{name} is pinned to {label}")
    after = parse_assignments(args.after)
    if not args.after:
        raise UsageError("--after is required")
    return Transition(net.full_state(INPUT, before), net.full_state(OUTPUT, after))


def _occurrence(net, transition, slice, assignment) -> Occurrence:
    if not assignment:
        raise UsageError("--occurrence is required")
    parsed = net.parse_state(slice, assignment)
    if transition is not None:
        full = transition.before if slice == INPUT else transition.after
        for m, s in parsed.items():
            if full[m] != s:
                name = net.variables(slice)[m].name
                raise UsageError(f"occurrence value for {name} differs from the transition")
    members = tuple(sorted(parsed))
    return Occurrence(slice, members, tuple(parsed[m] for m in members))


def _emit(args, data, text):
    if args.format == "json":
        print(report.dumps(data))
    else:
        print(text)


def cmd_account(args) -> int:
    net, pins = _load(args)
    t = _transition(net, args, pins)
    account = causal_account(net, t, n_jobs=args.parallel)
    _emit(args, report.account_to_dict(net, account), report.account_table(net, account))
    return EXIT_OK


def _link_command(args, direction) -> int:
    net, pins = _load(args)
    t = _transition(net, args, pins)
    if not validate_transition(net, t):
        raise RealizationError("transition has zero probability")
    slice = INPUT if direction == EFFECT else OUTPUT
    occ = _occurrence(net, t, slice, parse_assignments(args.occurrence))
    link = Evaluator(net, t).link(direction, to_mask(occ.members))
    _emit(args, report.link_to_dict(net, link), report.link_table(net, link))
    return EXIT_OK


def cmd_cause(args) -> int:
    return _link_command(args, CAUSE)


def cmd_effect(args) -> int:
    return _link_command(args, EFFECT)


def cmd_repertoire(args) -> int:
    net, pins = _load(args)
    t = _transition(net, args, pins) if args.before or args.after else None
    occ_slice, pur_slice = (INPUT, OUTPUT) if args.direction == EFFECT else (OUTPUT, INPUT)
    assignment = parse_assignments(args.occurrence)
    occ = _occurrence(net, t, occ_slice, assignment) if assignment else Occurrence(occ_slice)
    names = parse_names(args.purview)
    if not names:
        raise UsageError("--purview is required")
    purview = [net.index(pur_slice, n) for n in names]
    if args.direction == EFFECT:
        r, ref = effect_repertoire(net, occ, purview), unconstrained_effect(net, purview)
    else:
        r, ref = cause_repertoire(net, occ, purview), unconstrained_cause(net, purview)
    data = report.repertoire_to_dict(net, r)
    data["occurrence"] = net.labels(occ.slice, occ.members, occ.states)
    data["unconstrained"] = [float(p) for p in ref.probs]
    _emit(args, data, report.repertoire_table(net, r, ref))
    return EXIT_OK


def cmd_validate(args) -> int:
    net, pins = _load(args)
    t = _transition(net, args, pins)
    v = validate_transition(net, t)
    data = {"ok": v.ok, "probability": v.probability}
    _emit(args, data, f"{'ok' if v.ok else 'impossible'}: p = {v.probability:.6g}")
    return EXIT_OK if v.ok else EXIT_REALIZATION


def _bits(text) -> tuple:
    text = text.replace(",", "").strip()
    if not text or set(text) - {"0", "1"}:
        raise UsageError(f"--before must be a string of 0/1 values, got {text!r}")
    return tuple(int(c) for c in text)


def _same(a: dict, b: dict) -> bool:
    """Compare two account dicts on link sets and strengths."""
    if a["transition"] != b["transition"] or len(a["links"]) != len(b["links"]):
        return False
    for la, lb in zip(a["links"], b["links"]):
        if (la["direction"], la["occurrence"], la["status"]) != (lb["direction"], lb["occurrence"], lb["status"]):
            return False
        if abs(la["alpha"] - lb["alpha"]) > 1e-9:
            return False
        if sorted(map(str, (c["candidate"] for c in la["candidates"]))) != sorted(
            map(str, (c["candidate"] for c in lb["candidates"]))
        ):
            return False
    return True


def cmd_oracle(args) -> int:
    before = _bits(args.before)
    try:
        if args.family == "ltu":
            spec = LTUSpec(args.n if args.n is not None else len(before), args.k)
            net, account = build_ltu_network(spec), ltu_predict(spec, before)
        else:
            spec = DOCSpec([int(s) for s in parse_names(args.sizes)])
            net, account = build_doc_network(spec), doc_predict(spec, before)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    predicted = report.account_to_dict(net, account)
    if not args.compare:
        _emit(args, predicted, report.account_table(net, account))
        return EXIT_OK
    computed = causal_account(net, account.transition, n_jobs=args.parallel)
    engine = report.account_to_dict(net, computed)
    match = _same(predicted, engine)
    data = {"match": match, "oracle": predicted, "engine": engine}
    text = "\n".join(
        [
            "oracle:",
            report.account_table(net, account),
            "engine:",
            report.account_table(net, computed),
            "match" if match else "MISMATCH",
        ]
    )
    _emit(args, data, text)
    return EXIT_OK if match else EXIT_INVARIANT


def cmd_corpus(args) -> int:
    if args.action == "list":
        ids = corpus.list_entries(include_large=True)
        if args.json:
            print(report.dumps([{"id": i, "title": corpus.get(i).title, "large": corpus.get(i).large} for i in ids]))
        else:
            for i in ids:
                e = corpus.get(i)
                print(f"{i:28s} {e.title}{'  [large]' if e.large else ''}")
        return EXIT_OK
    if args.action == "run":
        if not args.id:
            raise UsageError("corpus run needs an entry id")
        try:
            corpus.get(args.id)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        reports = [corpus.run(args.id)]
    else:
        reports = corpus.run_all(include_large=args.include_large)
    if args.json:
        data = [r.to_dict() for r in reports]
        print(report.dumps(data[0] if args.action == "run" else data))
    else:
        print("\n".join(r.format() for r in reports))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--format", choices=("table", "json"), default="table")
    shared.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes")
    shared.add_argument(
        "--max-slice",
        type=int,
        default=None,
        metavar="N",
        help=f"largest slice to enumerate (default ${{CAUSALIS_MAX_SLICE}} or {DEFAULT_MAX_SLICE})",
    )

    net_opts = argparse.ArgumentParser(add_help=False)
    net_opts.add_argument("network", help="network JSON file")
    net_opts.add_argument("--before", action="append", metavar="NAME=STATE[,...]")
    net_opts.add_argument("--after", action="append", metavar="NAME=STATE[,...]")
    net_opts.add_argument("--pin", action="append", metavar="NAME=STATE[,...]", help="background conditions")

    parser = argparse.ArgumentParser(prog="causalis", description="Actual causation in discrete causal networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("account", parents=[shared, net_opts], help="all causal links of a transition")
    p.set_defaults(func=cmd_account)
    for name, func, what in (("cause", cmd_cause, "output"), ("effect", cmd_effect, "input")):
        p = sub.add_parser(name, parents=[shared, net_opts], help=f"actual {name} of an {what} occurrence")
        p.add_argument("--occurrence", action="append", metavar="NAME=STATE[,...]")
        p.set_defaults(func=func)

    p = sub.add_parser("repertoire", parents=[shared, net_opts], help="cause or effect repertoire")
    p.add_argument("--direction", choices=(CAUSE, EFFECT), required=True)
    p.add_argument("--occurrence", action="append", metavar="NAME=STATE[,...]")
    p.add_argument("--purview", action="append", metavar="NAMES")
    p.set_defaults(func=cmd_repertoire)

    p = sub.add_parser("validate", parents=[shared, net_opts], help="check that a transition can happen")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", parents=[shared], help="closed-form predictions for LTU and DOC units")
    p.add_argument("family", choices=("ltu", "doc"))
    p.add_argument("--before", required=True, help="input bits, e.g. 1110")
    p.add_argument("--n", type=int, help="LTU input count (defaults to the length of --before)")
    p.add_argument("--k", type=int, help="LTU threshold")
    p.add_argument("--sizes", action="append", help="DOC conjunction sizes, e.g. 2,3")
    p.add_argument("--compare", action="store_true", help="also run the engine and diff")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("corpus", help="built-in worked examples")
    p.add_argument("action", choices=("list", "run", "run-all"))
    p.add_argument("id", nargs="?")
    p.add_argument("--json", action="store_true")
    p.add_argument("--include-large", action="store_true", help="also run the 15-voter entries")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "oracle":
        if args.family == "ltu" and args.k is None:
            print("causalis: error: --k is required for ltu", file=sys.stderr)
            return EXIT_USAGE
        if args.family == "doc" and not args.sizes:
            print("causalis: error: --sizes is required for doc", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except RealizationError as exc:
        print(f"causalis: transition cannot happen: {exc}", file=sys.stderr)
        return EXIT_REALIZATION
    except InvariantError as exc:
        print(f"causalis: internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, NetworkError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"causalis: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
