"""Command-line front end.

Exit codes: 0 success (found / upheld / vacuous), 1 negative result (none
found / violated), 2 invalid input, 3 construction certification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import scenarios as sc
from .geometry import DirectedLine
from .io import DocumentError, emit_document, from_family, parse_document, to_family
from .stabbing import DEFAULT_DIRECTIONS, find_transversal
from .svg import render_svg

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID, EXIT_CERT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return to_family(parse_document(text))
    except DocumentError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _line_text(line) -> str:
    return f"theta={line.theta:.6f} offset={line.offset:.6f}"


def cmd_transversal(args) -> int:
    family = _load(args.input)
    line = find_transversal(family, ordered=args.ordered, directions=args.directions)
    kind = "ordered transversal" if args.ordered else "transversal"
    if line is None:
        print(f"{kind}: none found at resolution M={args.directions}")
    else:
        print(f"{kind}: {_line_text(line)}")
    if args.out:
        _write(args.out, render_svg(family, [line] if line else [], title=kind))
    return EXIT_OK if line is not None else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    family = _load(args.input)
    report = sc.verify_theorem(family, args.theorem, allow_overlap=args.allow_overlap,
                               directions=args.directions, seed=args.seed)
    print(f"theorem {report.theorem_id}: {report.status}")
    if report.hypothesis_valid:
        print(f"hypothesis: {'holds' if report.hypothesis_holds else 'fails'} "
              f"({report.subfamilies_checked} subfamilies checked)")
        if report.conclusion_holds is not None:
            print(f"conclusion: {'holds' if report.conclusion_holds else 'fails'}")
        if report.witness is not None:
            color = f" color={report.witness_color}" if report.witness_color else ""
            print(f"witness:{color} {_line_text(report.witness)}")
        for idx, detail in report.violations[:20]:
            print(f"  sets {','.join(family[i].label for i in idx)}: {detail}")
    else:
        print(f"invalid: {report.note}")
    if args.out:
        _write(args.out, json.dumps(report.to_dict(), indent=2) + "\n")
    if not report.hypothesis_valid:
        return EXIT_INVALID
    return EXIT_NEGATIVE if report.violated else EXIT_OK


def cmd_counterexample(args) -> int:
    params = sc.CounterexampleParams(delta=args.delta)
    try:
        if args.kind == "quantitative":
            family = sc.build_quantitative_counterexample(params)
        else:
            family = sc.build_colorful_counterexample(args.epsilon, params)
    except sc.CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    doc = emit_document(from_family(family))
    lines = sc.named_lines(params)
    gauges = [sc.gauge_points(e.shape, params.alpha) for e in family]
    points = [p for g in gauges for p in (g.p_minus, g.p_plus)]
    svg = render_svg(family, [lines["v"], lines["h"]], points, line_labels=["v", "h"],
                     title=f"{args.kind} counterexample", annotate=False)
    if args.out:
        _write(args.out, doc)
        _write(args.svg or str(Path(args.out).with_suffix(".svg")), svg)
        print(f"wrote {len(family)} sets to {args.out}")
    else:
        sys.stdout.write(doc)
        if args.svg:
            _write(args.svg, svg)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    summary = sc.fuzz(args.theorem, args.trials, seed=args.seed, mode=args.mode,
                      directions=args.directions, allow_overlap=args.allow_overlap)
    c = summary.counts
    print(f"theorem {args.theorem}, {args.trials} trials ({args.mode}): "
          f"hypothesis-true={c['hypothesis-true']} upheld={c['upheld']} vacuous={c['vacuous']} "
          f"violated={c['violated']} invalid={c['invalid']}")
    if summary.offenders:
        out_dir = Path(args.out or ".")
        for seed, fam in summary.offenders:
            path = out_dir / f"fuzz_{args.theorem}_seed{seed}.json"
            _write(path, emit_document(from_family(fam)))
            print(f"  offending family written to {path}")
        return EXIT_NEGATIVE
    return EXIT_OK


def _parse_line(text: str):
    try:
        theta, offset = (float(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"bad --line {text!r}; expected THETA,OFFSET") from None
    if not (math.isfinite(theta) and math.isfinite(offset)):
        raise InputError("line parameters must be finite")
    return DirectedLine(theta, offset)


def cmd_plot(args) -> int:
    family = _load(args.input)
    lines = [_parse_line(t) for t in args.line or []]
    svg = render_svg(family, lines, title=Path(args.input).stem)
    if args.out:
        _write(args.out, svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def _positive_int(minimum):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qhadwiger", description="Quantitative line transversals of planar convex sets.")
    sub = p.add_subparsers(dest="command", required=True)
    directions = dict(type=_positive_int(8), default=DEFAULT_DIRECTIONS, help="direction samples M")
    theorems = sorted(sc.THEOREMS)

    t = sub.add_parser("transversal", help="search for a common stabbing line")
    t.add_argument("--input", required=True)
    t.add_argument("--out", help="SVG figure path")
    t.add_argument("--ordered", action="store_true")
    t.add_argument("--directions", **directions)
    t.set_defaults(func=cmd_transversal)

    v = sub.add_parser("verify", help="check a theorem's hypothesis and conclusion")
    v.add_argument("--input", required=True)
    v.add_argument("--theorem", required=True, choices=theorems)
    v.add_argument("--allow-overlap", action="store_true")
    v.add_argument("--directions", **directions)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="JSON report path")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counterexample", help="build and certify a counterexample family")
    c.add_argument("kind", choices=["quantitative", "colorful"])
    c.add_argument("--epsilon", type=float, default=0.01)
    c.add_argument("--delta", type=float, default=0.05)
    c.add_argument("--out", help="family document path")
    c.add_argument("--svg", help="figure path (default: next to --out)")
    c.set_defaults(func=cmd_counterexample)

    f = sub.add_parser("fuzz", help="verify a theorem on seeded random families")
    f.add_argument("--theorem", required=True, choices=theorems)
    f.add_argument("--trials", type=_positive_int(1), default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--mode", choices=["mixed", "disjoint", "threaded", "overlapping"], default="mixed")
    f.add_argument("--allow-overlap", action="store_true")
    f.add_argument("--directions", **directions)
    f.add_argument("--out", help="directory for offending families")
    f.set_defaults(func=cmd_fuzz)

    g = sub.add_parser("plot", help="draw a family with optional lines")
    g.add_argument("--input", required=True)
    g.add_argument("--line", action="append", help="THETA,OFFSET (repeatable)")
    g.add_argument("--out")
    g.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
