"""Command-line surface.

Every operation of the library is reachable as a verb with stable text
output (``--json`` switches to a machine format).  Exit codes: 0 for
success / true / accepted, 1 for false / rejected, 2 for usage or parse
errors.  Word arguments use the shared grammar (``x0 x1^-1``), binary
points look like ``.0(10)``, and ``--gens`` files carry one word per line.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import subgroups
from .folding import build_core
from .plmaps import (
    act_on_point,
    fixed_set,
    parse_binary_point,
    plmap_json,
    word_to_plmap,
)
from .words import (
    WordParseError,
    coset_minimize,
    format_word,
    group_op,
    normalize,
    parse_word,
)


def _read_gens(args) -> list:
    gens = [parse_word(w) for w in args.words]
    if args.gens:
        with open(args.gens, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line and not line.startswith("#"):
                    gens.append(parse_word(line))
    if not gens:
        raise ValueError("no generators given (positional words or --gens file)")
    return gens


def _emit(args, text: str, payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True) if args.json else text)


def _fraction_str(q: Fraction) -> str:
    return str(q)


def cmd_nf(args) -> int:
    nf = normalize(parse_word(args.word))
    _emit(args, format_word(nf), {"normal_form": format_word(nf)})
    return 0


def cmd_mul(args) -> int:
    nf = group_op("multiply", parse_word(args.left), parse_word(args.right))
    _emit(args, format_word(nf), {"normal_form": format_word(nf)})
    return 0


def cmd_inv(args) -> int:
    nf = group_op("invert", parse_word(args.word))
    _emit(args, format_word(nf), {"normal_form": format_word(nf)})
    return 0


def cmd_act(args) -> int:
    image = act_on_point(parse_word(args.word), parse_binary_point(args.point))
    _emit(args, str(image), {"point": str(image), "value": _fraction_str(image.to_fraction())})
    return 0


def cmd_fix(args) -> int:
    f = word_to_plmap(parse_word(args.word))
    items = fixed_set(f)
    text = ", ".join(
        _fraction_str(lo) if lo == hi else f"[{_fraction_str(lo)}, {_fraction_str(hi)}]"
        for lo, hi in items
    )
    _emit(
        args,
        text,
        {"fixed": [[_fraction_str(lo), _fraction_str(hi)] for lo, hi in items],
         "breakpoints": plmap_json(f)},
    )
    return 0


def cmd_core(args) -> int:
    core = build_core(_read_gens(args))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(core.to_dot() + "\n")
    print(core.to_json())
    return 0


def cmd_export(args) -> int:
    core = build_core(_read_gens(args))
    if args.out_json:
        with open(args.out_json, "w", encoding="utf-8") as handle:
            handle.write(core.to_json() + "\n")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(core.to_dot() + "\n")
    if not (args.out_json or args.dot):
        raise ValueError("export needs --out-json and/or --dot")
    return 0


def cmd_accept(args) -> int:
    core = build_core(_read_gens(args))
    ok = core.accepts_word(parse_word(args.word))
    _emit(args, "accepted" if ok else "rejected", {"accepted": ok})
    return 0 if ok else 1


def cmd_member(args) -> int:
    sub = subgroups.NamedSubgroup.from_name(args.subgroup)
    ok = sub.member(parse_word(args.word))
    _emit(args, "true" if ok else "false", {"member": ok, "subgroup": str(sub)})
    return 0 if ok else 1


def cmd_classify(args) -> int:
    label = subgroups.classify_jones_extension(parse_word(args.word))
    _emit(args, label, {"classification": label})
    return 0


def cmd_witness(args) -> int:
    w = parse_word(args.word)
    if args.kind == "g":
        expr = subgroups.g_witness(w)
        target = w
    else:
        expr = subgroups.augmentation_witness(w)
        target = parse_word("x0 x2")
    verified = expr.verify(target)
    text = f"{expr}\nevaluates to {format_word(normalize(target))}: {'verified' if verified else 'FAILED'}"
    _emit(
        args,
        text,
        {"witness": str(expr), "target": format_word(normalize(target)), "verified": verified},
    )
    return 0 if verified else 1


def cmd_minimize(args) -> int:
    cert = coset_minimize(parse_word(args.word))
    text = (
        f"representative: {format_word(cert.representative)}\n"
        f"left: {format_word(cert.left)}\n"
        f"right: {format_word(cert.right)}"
    )
    _emit(
        args,
        text,
        {
            "representative": format_word(cert.representative),
            "left": format_word(cert.left),
            "right": format_word(cert.right),
        },
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thompsonf",
        description="Exact computations in Thompson's group F: normal forms, "
        "piecewise-linear actions, 2-core subgroup membership, witnesses.",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("nf", help="normal form of a word")
    p.add_argument("word")
    p.set_defaults(run=cmd_nf)

    p = sub.add_parser("mul", help="product of two words")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(run=cmd_mul)

    p = sub.add_parser("inv", help="inverse of a word")
    p.add_argument("word")
    p.set_defaults(run=cmd_inv)

    p = sub.add_parser("act", help="apply a word to a binary point like .0(10)")
    p.add_argument("word")
    p.add_argument("point")
    p.set_defaults(run=cmd_act)

    p = sub.add_parser("fix", help="exact fixed set of a word")
    p.add_argument("word")
    p.set_defaults(run=cmd_fix)

    def add_gens(p):
        p.add_argument("words", nargs="*", help="generator words")
        p.add_argument("--gens", help="file with one generator word per line")

    p = sub.add_parser("core", help="canonical 2-core of a generated subgroup")
    add_gens(p)
    p.add_argument("--dot", help="also write a DOT drawing here")
    p.set_defaults(run=cmd_core)

    p = sub.add_parser("export", help="write core exports to files")
    add_gens(p)
    p.add_argument("--out-json", help="write canonical JSON here")
    p.add_argument("--dot", help="write a DOT drawing here")
    p.set_defaults(run=cmd_export)

    p = sub.add_parser("accept", help="closure membership via the 2-core")
    add_gens(p)
    p.add_argument("--word", required=True, help="the word to test")
    p.set_defaults(run=cmd_accept)

    p = sub.add_parser("member", help="membership in a named subgroup")
    p.add_argument("--subgroup", required=True, help="jones | g | savchuk | stab:<num/2^k,...>")
    p.add_argument("word")
    p.set_defaults(run=cmd_member)

    p = sub.add_parser("classify", help="what adding a word to the jones subgroup generates")
    p.add_argument("word")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("witness", help="certifying expression for a membership fact")
    p.add_argument("--kind", choices=["g", "augmentation"], required=True)
    p.add_argument("word")
    p.set_defaults(run=cmd_witness)

    p = sub.add_parser("minimize", help="double-coset minimization certificate")
    p.add_argument("word")
    p.set_defaults(run=cmd_minimize)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.run(args)
    except (WordParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
