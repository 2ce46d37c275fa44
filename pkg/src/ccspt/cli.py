"""Command-line front door.

Exit codes: 0 for equivalent/true, 1 for inequivalent/false, 2 for usage or
semantic errors.  JSON goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import axioms as _axioms
from . import bisim as _bisim
from .encode import encode as _encode_lts
from . import modal as _modal
from .errors import CcsptError
from .parser import parse_formula, parse_source, render
from .semantics import (ExplorationLimits, build_lts, from_aut, to_aut,
                        to_dot)
from .terms import alphabet

RELATIONS = ("strong", "brb", "brb-rooted", "brbX", "cbrb", "gbrb",
             "gbrb-rooted", "tob", "tob-rooted", "tb", "tb-rooted")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_system(path: str, sigma, max_states, open_terms=False):
    text = _read(path)
    if text.lstrip().startswith("des"):
        return from_aut(text).with_sigma(sigma), None
    src = parse_source(text, open_terms=open_terms)
    sig = frozenset(sigma) | src.alphabet | alphabet(src.root)
    lts = build_lts(src.root, ExplorationLimits(max_states=max_states), sigma=sig)
    return lts, src.root


def _split_sigma(text):
    return frozenset(n.strip() for n in text.split(",") if n.strip()) if text else frozenset()


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("PABR_SEED", "0"))


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-states", type=int, default=50_000)
    common.add_argument("--sigma", default="",
                        help="extra visible actions, comma separated")
    parser = argparse.ArgumentParser(
        prog="ccspt", parents=[common],
        description="process algebra with time-outs: semantics, equivalences, "
                    "modal logic, axioms")
    sub = parser.add_subparsers(dest="command", required=True)

    p_parse = sub.add_parser("parse", help="validate and pretty-print a term", parents=[common])
    p_parse.add_argument("file")
    p_parse.add_argument("--open", action="store_true",
                         help="allow free variables in the root term")

    p_lts = sub.add_parser("lts", help="build and export a transition system", parents=[common])
    p_lts.add_argument("file")
    p_lts.add_argument("--fmt", choices=("human", "aut", "dot", "json"),
                       default="human")

    p_enc = sub.add_parser("encode", help="environment encoding of a system", parents=[common])
    p_enc.add_argument("file")
    p_enc.add_argument("--rooted", action="store_true")
    p_enc.add_argument("--fmt", choices=("human", "aut", "dot"), default="aut")

    p_check = sub.add_parser("check", help="decide an equivalence between two systems", parents=[common])
    p_check.add_argument("left")
    p_check.add_argument("right")
    p_check.add_argument("--rel", choices=RELATIONS, default="brb")
    p_check.add_argument("--env", default=None,
                         help="environment set for brbX, comma separated")
    p_check.add_argument("--fmt", choices=("human", "json"), default="human")

    p_modal = sub.add_parser("modal", help="evaluate or synthesise formulas", parents=[common])
    modal_sub = p_modal.add_subparsers(dest="modal_command", required=True)
    p_eval = modal_sub.add_parser("eval")
    p_eval.add_argument("file")
    p_eval.add_argument("--formula", required=True)
    p_eval.add_argument("--env", default=None,
                        help="allowed set; omit for a triggered environment")
    p_dist = modal_sub.add_parser("distinguish")
    p_dist.add_argument("left")
    p_dist.add_argument("right")
    p_dist.add_argument("--fragment", choices=("Lb", "Lbr"), default="Lb")
    p_dist.add_argument("--env", default=None)

    p_hnf = sub.add_parser("hnf", help="head-normal form of a term", parents=[common])
    p_hnf.add_argument("file")

    p_sound = sub.add_parser("axioms", help="axiom tooling", parents=[common])
    ax_sub = p_sound.add_subparsers(dest="axioms_command", required=True)
    p_sc = ax_sub.add_parser("soundcheck")
    p_sc.add_argument("--which", choices=("Ax", "Axr"), default="Axr")
    p_sc.add_argument("--axiom", default=None)
    p_sc.add_argument("--samples", type=int, default=50)
    p_sc.add_argument("--seed", type=int, default=None)

    args = parser.parse_args(argv)
    sigma = _split_sigma(args.sigma)
    try:
        return _dispatch(args, sigma)
    except CcsptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args, sigma) -> int:
    if args.command == "parse":
        src = parse_source(_read(args.file), open_terms=args.open)
        print(render(src.root))
        return 0

    if args.command == "lts":
        lts, _ = _load_system(args.file, sigma, args.max_states)
        if args.fmt == "aut":
            sys.stdout.write(to_aut(lts))
        elif args.fmt == "dot":
            sys.stdout.write(to_dot(lts))
        elif args.fmt == "json":
            print(json.dumps({
                "states": lts.num_states,
                "transitions": lts.num_transitions,
                "initial": lts.initial,
                "sigma": sorted(lts.sigma),
            }, indent=2))
        else:
            print(f"{lts.num_states} states, {lts.num_transitions} transitions, "
                  f"alphabet {{{','.join(sorted(lts.sigma))}}}")
        return 0

    if args.command == "encode":
        lts, _ = _load_system(args.file, sigma, args.max_states)
        enc = _encode_lts(lts, rooted=args.rooted, max_states=args.max_states)
        if args.fmt == "aut":
            sys.stdout.write(to_aut(enc))
        elif args.fmt == "dot":
            sys.stdout.write(to_dot(enc))
        else:
            print(f"{enc.num_states} states, {enc.num_transitions} transitions")
        return 0

    if args.command == "check":
        return _run_check(args, sigma)

    if args.command == "modal":
        return _run_modal(args, sigma)

    if args.command == "hnf":
        src = parse_source(_read(args.file))
        print(render(_axioms.head_normal_form(src.root)))
        return 0

    if args.command == "axioms":
        report = _axioms.soundness_suite(args.which, samples=args.samples,
                                         seed=_seed(args), axiom=args.axiom)
        print(json.dumps(report, indent=2))
        bad = [ax for ax in report["axioms"] if ax["failures"]]
        return 1 if bad else 0

    raise AssertionError(args.command)


def _run_check(args, sigma) -> int:
    l1, _ = _load_system(args.left, sigma, args.max_states)
    l2, _ = _load_system(args.right, sigma, args.max_states)
    shared = l1.sigma | l2.sigma | sigma
    rel = args.rel
    if rel == "strong":
        l1, l2 = l1.with_sigma(shared), l2.with_sigma(shared)
        verdict = _bisim.strong_bisim(l1, l1.initial, l2, l2.initial)
    elif rel in ("brb", "brb-rooted"):
        verdict = _bisim.brb_check(l1, l1.initial, l2, l2.initial,
                                   rooted=rel.endswith("rooted"), sigma=shared)
    elif rel == "brbX":
        env = _split_sigma(args.env or "")
        verdict = _bisim.brb_X_check(l1, l1.initial, l2, l2.initial, env,
                                     sigma=shared)
    elif rel in ("gbrb", "gbrb-rooted"):
        verdict = _bisim.gbrb_check(l1, l1.initial, l2, l2.initial,
                                    rooted=rel.endswith("rooted"), sigma=shared)
    elif rel == "cbrb":
        verdict = _bisim.cbrb_check(l1, l1.initial, l2, l2.initial, sigma=shared)
    elif rel in ("tob", "tob-rooted"):
        verdict = _bisim.tob_check(l1, l1.initial, l2, l2.initial,
                                   rooted=rel.endswith("rooted"), sigma=shared)
    else:  # tb, tb-rooted: encode first
        rooted = rel.endswith("rooted")
        e1 = _encode_lts(l1, rooted=rooted, sigma=shared,
                            max_states=args.max_states)
        e2 = _encode_lts(l2, rooted=rooted, sigma=shared,
                            max_states=args.max_states)
        verdict = _bisim.tb_check(e1, e1.initial, e2, e2.initial, rooted=rooted)
    if args.fmt == "json":
        print(verdict.to_json())
    else:
        word = "equivalent" if verdict.equivalent else "inequivalent"
        print(f"{rel}: {word}")
        for record in verdict.refutation:
            print(f"  {record['lhs']}  vs  {record['rhs']}: "
                  f"clause {record['clause']}, {record['detail']}")
    return 0 if verdict.equivalent else 1


def _run_modal(args, sigma) -> int:
    if args.modal_command == "eval":
        lts, _ = _load_system(args.file, sigma, args.max_states)
        formula = parse_formula(args.formula)
        if args.env is None:
            holds = _modal.sat(lts, lts.initial, formula)
            env = None
        else:
            env = sorted(_split_sigma(args.env))
            holds = _modal.sat_env(lts, lts.initial, frozenset(env), formula)
        print(json.dumps({"holds": holds, "env": env}))
        return 0 if holds else 1
    # distinguish
    l1, _ = _load_system(args.left, sigma, args.max_states)
    l2, _ = _load_system(args.right, sigma, args.max_states)
    shared = l1.sigma | l2.sigma | sigma
    env = None if args.env is None else _split_sigma(args.env)
    formula = _modal.distinguish(l1, l1.initial, l2, l2.initial,
                                 fragment=args.fragment, env=env, sigma=shared)
    if formula is None:
        print(json.dumps({"formula": None,
                          "env": None if env is None else sorted(env)}))
        return 0
    print(json.dumps({"formula": render(formula),
                      "env": None if env is None else sorted(env)}))
    return 1


if __name__ == "__main__":
    sys.exit(main())
