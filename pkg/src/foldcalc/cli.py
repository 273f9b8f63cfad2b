"""``foldcalc`` command line.

Exit status: 0 on success, 1 on unreadable input, 2 when a precondition of
the requested operation fails, 3 when a corpus entry disagrees with its
expected values.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .algebra import FpPresentation
from .basediagram import BaseDiagram, Move, apply_move, simplify_to_sblf, sblf_to_trisection, total_euler_char
from .corpus import load_corpus, run_corpus
from .errors import FoldcalcError, ParseError
from .kirby import CATALOG_ARITY, HandleDecomposition, catalog, double_cover, invariants, verify_double_cover
from .render import render_base_diagram, render_kirby_summary
from .sblf import SblfData, build_kirby, classify_genus2, relative_minimality_report, validate
from .surgery import ManifoldData, standardize


class UsageError(ParseError):
    pass


def _read_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def _pretty(value: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
        return "\n".join(lines)
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return pad + ", ".join(str(v) for v in value)
        return "\n".join(_pretty(v, indent) if isinstance(v, dict) else pad + "- " + json.dumps(v) for v in value)
    return pad + str(value)


class Output:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, data: Any, svg: Optional[str] = None) -> None:
        if self.fmt == "svg":
            if svg is None:
                raise UsageError("this command has no SVG rendering")
            sys.stdout.write(svg)
        elif self.fmt == "pretty":
            print(_pretty(data))
        else:
            print(json.dumps(data, indent=2))


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def _handle(path: str) -> HandleDecomposition:
    return HandleDecomposition.from_json(_read_json(path))


def cmd_kirby(args: argparse.Namespace, out: Output) -> int:
    if args.action == "catalog":
        if args.name is None:
            out.emit({"entries": {k: v for k, v in CATALOG_ARITY.items()}})
            return 0
        try:
            params = [int(p) for p in args.params]
        except ValueError as exc:
            raise ParseError(f"catalog parameters must be integers: {exc}") from exc
        h = catalog(args.name, *params)
        out.emit(h.to_json(), render_kirby_summary(h))
        return 0
    h = _handle(args.file)
    if args.action == "invariants":
        out.emit(invariants(h).to_json(), render_kirby_summary(h))
    else:
        c = double_cover(h, strict=not args.generalized)
        data = {"cover": c.to_json(), "invariants": invariants(c).to_json(), "verified": verify_double_cover(h, c)}
        out.emit(data, render_kirby_summary(c))
    return 0


def cmd_sblf(args: argparse.Namespace, out: Output) -> int:
    d = SblfData.from_json(_read_json(args.file))
    if args.action == "validate":
        data = validate(d).to_json()
        data["relative_minimality_offenders"] = relative_minimality_report(d)
        out.emit(data)
    elif args.action == "build":
        h = build_kirby(d)
        out.emit(h.to_json(), render_kirby_summary(h))
    else:
        out.emit(classify_genus2(d).to_json())
    return 0


def _script(path: str) -> list[Move]:
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("moves", data.get("script"))
    if not isinstance(data, list):
        raise ParseError("a move script is a JSON list of moves")
    return [Move.from_json(m) for m in data]


def cmd_diagram(args: argparse.Namespace, out: Output) -> int:
    d = BaseDiagram.from_json(_read_json(args.file))
    if args.action == "apply":
        for m in _script(args.script):
            d = apply_move(d, m)
        out.emit({"diagram": d.to_json(), "total_euler_char": total_euler_char(d)}, render_base_diagram(d))
    elif args.action == "simplify":
        r = simplify_to_sblf(d, _script(args.script) if args.script else None)
        out.emit(r.to_json(), render_base_diagram(r.result))
    elif args.action == "trisect":
        t = sblf_to_trisection(d)
        out.emit(t.to_json(), render_base_diagram(t.diagram))
    else:
        svg = render_base_diagram(d)
        if args.output in (None, "-"):
            sys.stdout.write(svg)
        else:
            Path(args.output).write_text(svg)
    return 0


def cmd_surgery(args: argparse.Namespace, out: Output) -> int:
    g = FpPresentation.from_json(_read_json(args.pi1))
    s = standardize(ManifoldData(g, args.chi, args.cobordism))
    out.emit(s.to_json())
    return 0


def cmd_corpus(args: argparse.Namespace, out: Output) -> int:
    if args.action == "list":
        out.emit({"entries": [e.name for e in load_corpus()]})
        return 0
    if not args.all and not args.names:
        raise UsageError("name corpus entries or pass --all")
    results = run_corpus(None if args.all else list(args.names))
    ok = all(r.passed for r in results)
    if out.fmt == "pretty":
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.summary}")
            for m in r.mismatches:
                print(f"    {m}")
    else:
        out.emit({"passed": ok, "entries": [r.to_json() for r in results]})
    return 0 if ok else 3


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "pretty", "svg"], default=argparse.SUPPRESS)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS, help="same as --format pretty")

    p = argparse.ArgumentParser(prog="foldcalc", parents=[common], description="Kirby diagrams, SBLFs, base diagrams and torus surgery.")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kirby", parents=[common]).add_subparsers(dest="action", required=True)
    for name in ("invariants", "double-cover"):
        q = k.add_parser(name, parents=[common])
        q.add_argument("file")
        if name == "double-cover":
            q.add_argument("--generalized", action="store_true", help="allow several twisted 1-handles")
    q = k.add_parser("catalog", parents=[common])
    q.add_argument("name", nargs="?")
    q.add_argument("params", nargs="*")

    s = sub.add_parser("sblf", parents=[common]).add_subparsers(dest="action", required=True)
    for name in ("validate", "build", "classify"):
        s.add_parser(name, parents=[common]).add_argument("file")

    d = sub.add_parser("diagram", parents=[common]).add_subparsers(dest="action", required=True)
    q = d.add_parser("apply", parents=[common])
    q.add_argument("file")
    q.add_argument("script")
    q = d.add_parser("simplify", parents=[common])
    q.add_argument("file")
    q.add_argument("--script")
    d.add_parser("trisect", parents=[common]).add_argument("file")
    q = d.add_parser("render", parents=[common])
    q.add_argument("file")
    q.add_argument("-o", "--output")

    u = sub.add_parser("surgery", parents=[common]).add_subparsers(dest="action", required=True)
    q = u.add_parser("standardize", parents=[common])
    q.add_argument("--pi1", required=True)
    q.add_argument("--chi", required=True, type=int)
    q.add_argument("--cobordism", required=True, choices=["rp4", "s2xrp2"])

    c = sub.add_parser("corpus", parents=[common]).add_subparsers(dest="action", required=True)
    q = c.add_parser("run", parents=[common])
    q.add_argument("names", nargs="*")
    q.add_argument("--all", action="store_true")
    c.add_parser("list", parents=[common])
    return p


HANDLERS = {"kirby": cmd_kirby, "sblf": cmd_sblf, "diagram": cmd_diagram, "surgery": cmd_surgery, "corpus": cmd_corpus}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    fmt = "pretty" if getattr(args, "pretty", False) else getattr(args, "format", "json")
    try:
        return HANDLERS[args.command](args, Output(fmt))
    except FoldcalcError as exc:
        print(f"foldcalc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
