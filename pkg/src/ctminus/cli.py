"""Command-line front end.

Exit codes: 0 for success (a True verdict, a passing check), 1 for a
semantic failure (a False verdict, a violation), 2 for an undecided
verdict, 3 for usage and input errors.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional, Sequence

from . import evaluation as ev
from . import goedel, rank_lab, satclass_builder, stopping_disjunction, syntax
from .generators import random_fragment

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _text(arg: Optional[str]) -> str:
    if arg is None or arg == "-":
        return sys.stdin.read().strip()
    return arg


def _read_lines(path: str) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    return [ln.split("#", 1)[0].strip() for ln in raw.splitlines() if ln.split("#", 1)[0].strip()]


def _formulas(path: str) -> list:
    return [syntax.parse_formula(ln) for ln in _read_lines(path)]


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError as e:
        raise UsageError(f"expected a list of naturals, got {text!r}") from e


def _show(x, full: bool, limit: int = 2000) -> str:
    size = syntax.tree_size(x)
    if full or size <= limit:
        return syntax.render(x)
    depth = f", depth {syntax.syntactic_depth(x)}" if isinstance(x, syntax.Formula) else ""
    return f"[{size} nodes{depth}] {syntax.render(x, 200)}"


def _verdict_exit(v: ev.Verdict) -> int:
    return {ev.TRUE: EXIT_OK, ev.FALSE: EXIT_FALSE, ev.UNKNOWN: EXIT_UNKNOWN}[v]


# ---------------------------------------------------------------------------
# commands


def _cmd_parse(args) -> int:
    text = _text(args.text)
    x = syntax.parse_term(text) if args.term else syntax.parse_formula(text)
    print(_show(x, args.full))
    if isinstance(x, syntax.Formula):
        fv = ",".join(f"v{v}" for v in sorted(x._fv)) or "-"
        print(f"free: {fv}  depth: {x._sd}  size: {x._size}")
    else:
        value = "-" if x._value is None else x._value
        print(f"value: {value}  size: {x._size}")
    return EXIT_OK


def _cmd_render(args) -> int:
    text = _text(args.text)
    x = syntax.parse_term(text) if args.term else syntax.parse_formula(text)
    print(_show(x, args.full))
    return EXIT_OK


def _cmd_encode(args) -> int:
    text = _text(args.text)
    x = syntax.parse_term(text) if args.term else syntax.parse_formula(text)
    print(goedel.encode(x))
    return EXIT_OK


def _cmd_decode(args) -> int:
    raw = _text(args.code)
    try:
        code = int(raw)
    except ValueError as e:
        raise UsageError(f"not a natural: {raw!r}") from e
    try:
        x = goedel.decode_term(code) if args.term else goedel.decode_formula(code)
    except (goedel.NotATermCode, goedel.NotAFormulaCode):
        print(f"{code} is not the code of a {'term' if args.term else 'formula'}", file=sys.stderr)
        return EXIT_FALSE
    print(_show(x, args.full))
    return EXIT_OK


def _cmd_eval(args) -> int:
    f = syntax.parse_formula(_text(args.text))
    if f._fv:
        raise UsageError(f"not a sentence: free variables {sorted(f._fv)}")
    if args.domain is not None:
        o = ev.DomainOracle(args.domain, node_budget=args.node_budget)
    else:
        o = ev.StandardModelOracle(ev.Budget(args.witness_bound, args.node_budget))
    v = o.judge(f)
    print(v.value)
    return _verdict_exit(v)


def _cmd_eta(args) -> int:
    if args.x is None:
        f = syntax.build_eta(args.b)
    else:
        f = syntax.close_eta(args.b, args.x)
    print(_show(f, args.full))
    print(f"depth: {f._sd}")
    return EXIT_OK


def _cmd_stopdisj_build(args) -> int:
    alphas = _formulas(args.alphas)
    betas = _formulas(args.betas)
    if args.naive:
        f = stopping_disjunction.build_naive_disjunction(alphas, betas)
    else:
        try:
            f = stopping_disjunction.stop_disjunction(alphas, betas)
        except stopping_disjunction.SpecInvariantViolation as e:
            raise UsageError(str(e)) from e
    print(_show(f, args.full))
    return EXIT_OK


def _cmd_stopdisj_verify(args) -> int:
    builder = (
        stopping_disjunction.naive_spec_builder
        if args.naive
        else stopping_disjunction.build_stop_disjunction
    )
    if args.exhaustive is not None:
        cs = range(args.exhaustive + 1)
        runs = [stopping_disjunction.sweep(c, builder) for c in cs]
    else:
        assignments = stopping_disjunction.random_assignments(args.c, args.random, args.seed)
        runs = [stopping_disjunction.sweep(args.c, builder, assignments)]
    failed = 0
    for r in runs:
        failed += len(r.failures)
        print(
            f"c={r.c} assignments={r.assignments} selected={r.selected}"
            f" all_false={r.all_false} failures={len(r.failures)}"
        )
        for abits, bbits in r.failures[: args.show]:
            print(f"  counterexample alphas={_bits(abits)} betas={_bits(bbits)}")
    total = sum(r.assignments for r in runs)
    print(f"total={total} passed={total - failed} failed={failed}")
    return EXIT_OK if failed == 0 else EXIT_FALSE


def _bits(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def _type_spec(args) -> rank_lab.TypeSpec:
    if args.type_file:
        return rank_lab.TypeSpec(tuple(_formulas(args.type_file)), monotone=not args.non_monotone)
    return rank_lab.ge_type(args.ge_type)


def _ext_tables(args):
    a_seq = _ints(args.a)
    b_seq = _ints(args.b)
    if len(a_seq) != len(b_seq):
        raise UsageError("--a and --b need the same length")
    return a_seq, b_seq


def _cmd_rank(args) -> int:
    phi = syntax.parse_formula(_text(args.text))
    if len(phi._fv) > 1:
        raise UsageError("rank formulas have at most one free variable")
    if args.kind == "p":
        o = ev.DomainOracle(args.domain_bound)
        r = rank_lab.p_rank(phi, _type_spec(args), o, args.domain_bound)
    elif args.kind == "utb":
        o = ev.DomainOracle(args.domain_bound)
        r = rank_lab.utb_rank(phi, o, check_bound=args.check_bound, max_index=args.max_index)
    else:
        a_seq, b_seq = _ext_tables(args)
        o = rank_lab.ext_oracle(a_seq, b_seq, args.domain_bound)
        r = rank_lab.ext_rank(phi, a_seq, o, args.domain_bound)
    print(r)
    return EXIT_OK


def _cmd_gamma(args) -> int:
    if args.kind == "p":
        p = _type_spec(args)
        gammas = rank_lab.gamma_sequence_p(p, args.d)
        o = ev.DomainOracle(args.domain_bound)
        rank = lambda g: rank_lab.p_rank(g, p, o, args.domain_bound)
    else:
        a_seq, b_seq = _ext_tables(args)
        c = len(a_seq) - 2 if args.c is None else args.c
        gammas = rank_lab.gamma_sequence_ext(a_seq, c, args.d)
        o = rank_lab.ext_oracle(a_seq, b_seq, args.domain_bound)
        rank = lambda g: rank_lab.ext_rank(g, a_seq, o, args.domain_bound)
    ranks = []
    for j, g in enumerate(gammas):
        r = rank(g)
        ranks.append(r)
        print(f"gamma_{j}: rank {r}  {_show(g, args.full, limit=args.limit)}")
    cls = rank_lab.check_rank_trajectory(ranks)
    print(f"trajectory: {' '.join(str(r) for r in ranks)}")
    print(f"classification: {cls}")
    return EXIT_FALSE if cls.kind == "violation" else EXIT_OK


def _cmd_satbuild(args) -> int:
    if args.random:
        gamma = random_fragment(random.Random(args.seed), value_bound=args.value_bound)
    elif args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {args.file}: {e.strerror}") from e
        try:
            gamma = satclass_builder.parse_fragment(text)
        except satclass_builder.FragmentFormatError as e:
            raise UsageError(str(e)) from e
    else:
        raise UsageError("give a fragment file or --random")
    if args.emit:
        sys.stdout.write(satclass_builder.render_fragment(gamma))
        return EXIT_OK
    try:
        s = satclass_builder.build_satisfaction(gamma)
    except satclass_builder.InconsistentConstraints as e:
        print(f"INCONSISTENT: {e}")
        return EXIT_FALSE
    for line in s.lines():
        print(line)
    report = satclass_builder.verify_theta_fragment(s, gamma)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_FALSE


def _cmd_check_ct(args) -> int:
    fragment = _formulas(args.file)
    for f in fragment:
        if f._fv:
            raise UsageError(f"not a sentence: {syntax.render(f, 80)}")
    if args.closure:
        fragment = ev.sentence_closure(fragment, args.instance_bound)
    if args.domain is not None:
        o = ev.DomainOracle(args.domain)
    else:
        o = ev.StandardModelOracle(ev.Budget(args.witness_bound))
    report = ev.check_ct_axioms(o, fragment, instance_bound=args.instance_bound)
    for line in report.lines():
        print(line)
    print(f"sentences: {len(fragment)}  unknown: {report.unknown_count}")
    return EXIT_OK if report.ok else EXIT_FALSE


# ---------------------------------------------------------------------------
# argument parsing


def _natural(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural: {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError(f"not a natural: {text!r}")
    return n


def _positive(text: str) -> int:
    n = _natural(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="ctminus", description="Compositional truth experiments over arithmetic.")
    sub = top.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def syntax_cmd(name, help_, func, arg="text"):
        p = sub.add_parser(name, help=help_)
        p.add_argument(arg, nargs="?", help="input text (stdin when omitted or '-')")
        p.add_argument("--term", action="store_true", help="read a term instead of a formula")
        p.add_argument("--full", action="store_true", help="never abbreviate large output")
        p.set_defaults(func=func)
        return p

    syntax_cmd("parse", "parse and describe a formula or term", _cmd_parse)
    syntax_cmd("render", "print the kernel form of a formula or term", _cmd_render)
    syntax_cmd("encode", "print the Goedel code", _cmd_encode)
    syntax_cmd("decode", "print the syntax with a given code", _cmd_decode, arg="code")

    p = sub.add_parser("eval", help="evaluate a sentence")
    p.add_argument("text", nargs="?")
    p.add_argument("--witness-bound", type=_positive, default=64)
    p.add_argument("--node-budget", type=_positive, default=1_000_000)
    p.add_argument("--domain", type=_natural, help="quantify over 0..N instead of searching")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("eta", help="print eta_b")
    p.add_argument("b", type=_positive)
    p.add_argument("--x", type=_natural, help="close v at this value and x0 at 0")
    p.add_argument("--full", action="store_true")
    p.set_defaults(func=_cmd_eta)

    p = sub.add_parser("stopdisj", help="disjunctions with stopping conditions")
    sd = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    b = sd.add_parser("build", help="build from two files of formulas")
    b.add_argument("alphas")
    b.add_argument("betas")
    b.add_argument("--naive", action="store_true", help="build the left-grouped foil instead")
    b.add_argument("--full", action="store_true")
    b.set_defaults(func=_cmd_stopdisj_build)
    v = sd.add_parser("verify", help="truth-table sweep")
    mode = v.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", type=_natural, metavar="C", help="all assignments, c = 0..C")
    mode.add_argument("--random", type=_positive, metavar="N", help="N random assignments")
    v.add_argument("--c", type=_natural, default=4, help="index bound for --random")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--naive", action="store_true", help="sweep the left-grouped foil")
    v.add_argument("--show", type=_natural, default=1, help="counterexamples to print per c")
    v.set_defaults(func=_cmd_stopdisj_verify)

    def rank_flags(p):
        p.add_argument("--type-file", help="type formulas, one per line (p rank)")
        p.add_argument("--ge-type", type=_positive, default=32, help="use x >= i for i < N (p rank)")
        p.add_argument("--non-monotone", action="store_true")
        p.add_argument("--domain-bound", type=_natural, default=64)
        p.add_argument("--check-bound", type=_natural, default=64)
        p.add_argument("--max-index", type=_positive, default=8)
        p.add_argument("--a", default="1 2 3 4 5 6 7 8 9", help="eta parameters a_k (ext rank)")
        p.add_argument("--b", default="27 25 23 21 19 17 15 13 11", help="values b_k (ext rank)")
        p.add_argument("--full", action="store_true")

    p = sub.add_parser("rank", help="rank of a formula")
    p.add_argument("kind", choices=("p", "utb", "ext"))
    p.add_argument("text", nargs="?")
    rank_flags(p)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("gamma", help="gamma sequence and its rank trajectory")
    p.add_argument("kind", choices=("p", "ext"))
    p.add_argument("--d", type=_natural, required=True)
    p.add_argument("--c", type=_natural, help="last stop index (ext)")
    p.add_argument("--limit", type=_positive, default=400, help="abbreviate formulas above this size")
    rank_flags(p)
    p.set_defaults(func=_cmd_gamma)

    p = sub.add_parser("satbuild", help="build and verify a finite satisfaction class")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", action="store_true", help="generate a fragment instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--value-bound", type=_natural, default=2)
    p.add_argument("--emit", action="store_true", help="print the fragment instead of building")
    p.set_defaults(func=_cmd_satbuild)

    p = sub.add_parser("check-ct", help="check the truth axioms on a file of sentences")
    p.add_argument("file")
    p.add_argument("--witness-bound", type=_positive, default=64)
    p.add_argument("--instance-bound", type=_natural, default=16)
    p.add_argument("--domain", type=_natural)
    p.add_argument("--closure", action="store_true", help="close under sentence children first")
    p.set_defaults(func=_cmd_check_ct)
    return top


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, syntax.ParseError, syntax.InvalidParameter, rank_lab.IndexOutOfRange) as e:
        print(f"ctminus: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
