"""``trapdiag`` command line: check, render and compile ``.sd`` files.

Exit status: 0 success, 1 usage or I/O error, 2 parse error, 3 type error,
4 semantics error. Diagnostics go to standard error; the payload goes to
standard output unless ``-o`` names a file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO, Tuple, Union

from . import __version__
from .layout import LayoutError, layout, layout_naive
from .render import RenderStyle, to_json, to_svg, to_tikz
from .semantics import SemanticsError, eval_matrix, matrix_to_json, parse_assignment
from .term import ParseError, TypeCheckError, arity, parse_file, typecheck

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_TYPE = 3
EXIT_SEMANTICS = 4

STYLE_ENV = "TRAPDIAG_STYLE"
FORMATS = ("svg", "tikz", "json")
LAYOUTS = ("trapezoid", "naive")


class UsageError(Exception):
    pass


@dataclass
class Invocation:
    command: str  # "check", "render" or "compile"
    input: str
    term: str = "main"
    output: Optional[str] = None
    format: str = "svg"
    layout: str = "trapezoid"
    style: dict = field(default_factory=dict)  # RenderStyle overrides
    leaf_width: Union[str, float] = "max"
    id_width: float = 1.0
    semantics: Optional[str] = None

    def __post_init__(self) -> None:
        if self.command not in ("check", "render", "compile"):
            raise UsageError(f"unknown command {self.command!r}")
        if self.command == "render" and self.format not in FORMATS:
            raise UsageError(f"render needs a format out of {', '.join(FORMATS)}")
        if self.command == "compile" and not self.semantics:
            raise UsageError("compile needs --semantics FILE")
        if self.layout not in LAYOUTS:
            raise UsageError(f"unknown layout {self.layout!r}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


_STYLE_KEYS = {"scale", "stroke_width", "show_outline", "font_size"}


def load_style(path: Optional[str], overrides: dict) -> RenderStyle:
    """Style from an optional JSON file (RenderStyle keys), then ``overrides``."""
    values: dict = {}
    if path:
        try:
            doc = json.loads(_read(path))
        except json.JSONDecodeError as exc:
            raise UsageError(f"style file {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError(f"style file {path}: expected a JSON object")
        for key, value in doc.items():
            key = key.replace("-", "_")
            if key not in _STYLE_KEYS:
                raise UsageError(f"style file {path}: unknown key {key!r}")
            values[key] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RenderStyle(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad style: {exc}") from None


def _write(inv: Invocation, payload: bytes) -> bytes:
    if inv.output:
        try:
            with open(inv.output, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            raise UsageError(f"cannot write {inv.output}: {exc.strerror or exc}") from None
        return b""
    return payload


def _load(inv: Invocation):
    sig, terms = parse_file(_read(inv.input))
    return sig, terms


def _selected(inv: Invocation, sig, terms):
    if inv.term not in terms:
        known = ", ".join(terms) or "none"
        raise UsageError(f"no term named {inv.term!r} in {inv.input} (terms: {known})")
    return typecheck(terms[inv.term], sig)


def _check(inv: Invocation, err: TextIO) -> Tuple[int, bytes]:
    sig, terms = _load(inv)
    lines, status = [], EXIT_OK
    for name, raw in terms.items():
        try:
            n, m = arity(typecheck(raw, sig))
        except TypeCheckError as exc:
            print(f"{inv.input}: {name}: {exc}", file=err)
            status = EXIT_TYPE
            continue
        lines.append(f"{name} : {n} -> {m}\n")
    return status, "".join(lines).encode("utf-8")


def _render(inv: Invocation, env_style: Optional[str]) -> Tuple[int, bytes]:
    style = load_style(env_style, inv.style)
    sig, terms = _load(inv)
    term = _selected(inv, sig, terms)
    try:
        if inv.layout == "naive":
            d = layout_naive(term)
        else:
            d = layout(term, leaf_width=inv.leaf_width, id_width=inv.id_width)
    except LayoutError as exc:
        raise UsageError(str(exc)) from None
    if inv.format == "svg":
        payload = to_svg(d, style)
    elif inv.format == "tikz":
        payload = to_tikz(d, style).encode("utf-8")
    else:
        payload = to_json(d)
    return EXIT_OK, _write(inv, payload)


def _compile(inv: Invocation) -> Tuple[int, bytes]:
    sig, terms = _load(inv)
    term = _selected(inv, sig, terms)
    assignment = parse_assignment(_read(inv.semantics), sig)
    return EXIT_OK, _write(inv, matrix_to_json(eval_matrix(term, assignment)).encode("utf-8"))


def run(inv: Invocation, err: Optional[TextIO] = None, environ=None) -> Tuple[int, bytes]:
    """Execute ``inv``; returns the exit status and the bytes meant for stdout."""
    err = sys.stderr if err is None else err
    environ = os.environ if environ is None else environ
    try:
        if inv.command == "check":
            return _check(inv, err)
        if inv.command == "render":
            return _render(inv, environ.get(STYLE_ENV))
        return _compile(inv)
    except UsageError as exc:
        print(f"trapdiag: error: {exc}", file=err)
        return EXIT_USAGE, b""
    except ParseError as exc:
        print(f"{inv.input}:{exc.line}:{exc.column}: parse error: {exc.message}", file=err)
        return EXIT_PARSE, b""
    except TypeCheckError as exc:
        print(f"{inv.input}: type error in {inv.term!r}: {exc}", file=err)
        return EXIT_TYPE, b""
    except SemanticsError as exc:
        print(f"{inv.semantics}: semantics error: {exc}", file=err)
        return EXIT_SEMANTICS, b""


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is taken by parse errors here."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _leaf_width(text: str) -> Union[str, float]:
    return "max" if text == "max" else _positive(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trapdiag", description="Lay out monoidal terms as trapezoid string diagrams.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="typecheck every term and print its arity")
    check.add_argument("input")

    render = sub.add_parser("render", help="lay out one term and emit SVG, TikZ or JSON")
    render.add_argument("input")
    render.add_argument("--term", default="main", help="term to render (default: main)")
    render.add_argument("-f", "--format", choices=FORMATS, default="svg")
    render.add_argument("-o", "--output", help="output file (default: stdout)")
    render.add_argument("--layout", choices=LAYOUTS, default="trapezoid")
    render.add_argument("--show-outline", action="store_true", default=None,
                        help="overlay the trapezoid outline and dashed BSP seams")
    render.add_argument("--scale", type=_positive, help="pixels per unit (default 60)")
    render.add_argument("--stroke-width", type=_positive)
    render.add_argument("--font-size", type=_positive)
    render.add_argument("--leaf-width", type=_leaf_width, default="max",
                        help="generator box width: 'max' (of the arities) or a number")
    render.add_argument("--id-width", type=_positive, default=1.0)

    comp = sub.add_parser("compile", help="evaluate one term as a matrix")
    comp.add_argument("input")
    comp.add_argument("--term", default="main")
    comp.add_argument("--semantics", required=True, help='JSON file {"gens": {name: rows}}')
    comp.add_argument("-o", "--output")
    return parser


def invocation_from_args(args: argparse.Namespace) -> Invocation:
    if args.command == "check":
        return Invocation("check", args.input)
    if args.command == "compile":
        return Invocation("compile", args.input, term=args.term, output=args.output, semantics=args.semantics)
    style = {
        "scale": args.scale,
        "stroke_width": args.stroke_width,
        "font_size": args.font_size,
        "show_outline": args.show_outline,
    }
    return Invocation(
        "render",
        args.input,
        term=args.term,
        output=args.output,
        format=args.format,
        layout=args.layout,
        style=style,
        leaf_width=args.leaf_width,
        id_width=args.id_width,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inv = invocation_from_args(args)
    except UsageError as exc:
        print(f"trapdiag: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status, payload = run(inv)
    if payload:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
