"""Signatures, terms of the free monoidal category, the ``.sd`` parser and the
typechecker.

Terms are immutable trees of :class:`Gen`, :class:`Id`, :class:`Seq` and
:class:`Ten` nodes. Every node carries ``src`` and ``tgt`` object lists; on a
freshly parsed term the lists of generator leaves (and of anything above them)
are ``None`` until :func:`typecheck` fills them in from a :class:`Signature`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Tuple, TypeVar

Objects = Tuple[str, ...]
Path = Tuple[str, ...]
V = TypeVar("V")


class TermError(Exception):
    """Base class for everything this module raises."""


class ParseError(TermError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DuplicateDeclaration(ParseError):
    pass


class UndeclaredObject(ParseError):
    pass


class TypeCheckError(TermError):
    def __init__(self, message: str, path: Path = (), pos: Optional[Tuple[int, int]] = None) -> None:
        where = "/".join(path) if path else "<root>"
        text = f"at {where}: {message}"
        if pos is not None:
            text = f"line {pos[0]}, column {pos[1]}: {text}"
        super().__init__(text)
        self.message = message
        self.path = path
        self.pos = pos


class UnknownGenerator(TypeCheckError):
    def __init__(self, name: str, path: Path = (), pos=None) -> None:
        super().__init__(f"unknown generator {name!r}", path, pos)
        self.name = name


class UnknownObject(TypeCheckError):
    def __init__(self, name: str, path: Path = (), pos=None) -> None:
        super().__init__(f"unknown object symbol {name!r}", path, pos)
        self.name = name


class CompositionMismatch(TypeCheckError):
    def __init__(self, expected: Objects, found: Objects, path: Path = (), pos=None) -> None:
        super().__init__(
            f"cannot compose: left target is [{' '.join(expected)}] "
            f"but right source is [{' '.join(found)}]",
            path,
            pos,
        )
        self.expected = expected
        self.found = found


class ZeroArity(TypeCheckError):
    def __init__(self, path: Path = (), pos=None) -> None:
        super().__init__("source and target must each have at least one object", path, pos)


# -- signatures ---------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Object symbols plus morphism symbols with their source/target lists.

    ``objects`` keeps declaration order; ``generators`` maps a name to its
    ``(src, tgt)`` pair.
    """

    objects: Tuple[str, ...] = ()
    generators: Mapping[str, Tuple[Objects, Objects]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("object symbols must be unique")
        declared = set(self.objects)
        gens = {}
        for name, (src, tgt) in self.generators.items():
            src, tgt = tuple(src), tuple(tgt)
            for ob in src + tgt:
                if ob not in declared:
                    raise ValueError(f"generator {name!r} uses undeclared object {ob!r}")
            gens[name] = (src, tgt)
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "generators", gens)

    def src(self, name: str) -> Objects:
        return self.generators[name][0]

    def tgt(self, name: str) -> Objects:
        return self.generators[name][1]


# -- terms --------------------------------------------------------------------


class Term:
    """Common base of the four node kinds.

    ``a >> b`` builds ``a ; b`` and ``a @ b`` builds ``a * b``.
    """

    src: Optional[Objects]
    tgt: Optional[Objects]

    def __rshift__(self, other: Term) -> Seq:
        return Seq(self, other)

    def __matmul__(self, other: Term) -> Ten:
        return Ten(self, other)

    @property
    def typed(self) -> bool:
        return self.src is not None and self.tgt is not None

    def __str__(self) -> str:
        return pretty(self)


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=True, repr=True)
class Gen(Term):
    name: str
    src: Optional[Objects] = None
    tgt: Optional[Objects] = None
    pos: Optional[Tuple[int, int]] = _pos()


@dataclass(frozen=True)
class Id(Term):
    objects: Objects
    pos: Optional[Tuple[int, int]] = _pos()

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))

    @property
    def src(self) -> Objects:
        return self.objects

    @property
    def tgt(self) -> Objects:
        return self.objects


@dataclass(frozen=True)
class Seq(Term):
    left: Term
    right: Term
    pos: Optional[Tuple[int, int]] = _pos()
    src: Optional[Objects] = field(init=False, repr=False, compare=False)
    tgt: Optional[Objects] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "src", self.left.src)
        object.__setattr__(self, "tgt", self.right.tgt)


@dataclass(frozen=True)
class Ten(Term):
    top: Term
    bottom: Term
    pos: Optional[Tuple[int, int]] = _pos()
    src: Optional[Objects] = field(init=False, repr=False, compare=False)
    tgt: Optional[Objects] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        a, b = self.top, self.bottom
        object.__setattr__(self, "src", a.src + b.src if a.src is not None and b.src is not None else None)
        object.__setattr__(self, "tgt", a.tgt + b.tgt if a.tgt is not None and b.tgt is not None else None)


def fold(
    term: Term,
    on_gen: Callable[[Gen], V],
    on_id: Callable[[Id], V],
    on_seq: Callable[[V, V], V],
    on_ten: Callable[[V, V], V],
) -> V:
    """Bottom-up structural recursion over ``term``.

    Children are visited left/top first. Uses an explicit stack, so long
    ``a ; b ; c ; ...`` chains do not hit the interpreter's recursion limit.
    """
    stack: list[tuple[Term, bool]] = [(term, False)]
    out: list[Any] = []
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Gen):
            out.append(on_gen(node))
        elif isinstance(node, Id):
            out.append(on_id(node))
        elif isinstance(node, (Seq, Ten)):
            if expanded:
                b = out.pop()
                a = out.pop()
                out.append(on_seq(a, b) if isinstance(node, Seq) else on_ten(a, b))
            else:
                first, second = (node.left, node.right) if isinstance(node, Seq) else (node.top, node.bottom)
                stack.append((node, True))
                stack.append((second, False))
                stack.append((first, False))
        else:
            raise TypeError(f"not a term: {node!r}")
    return out[0]


def arity(term: Term) -> Tuple[int, int]:
    """``(len(src), len(tgt))`` of a typechecked term."""
    if not term.typed:
        raise ValueError("term has not been typechecked")
    return len(term.src), len(term.tgt)


def count_generators(term: Term) -> int:
    return fold(term, lambda g: 1, lambda i: 0, lambda a, b: a + b, lambda a, b: a + b)


# -- typechecking -------------------------------------------------------------


def typecheck(term: Term, sig: Signature) -> Term:
    """Return a copy of ``term`` with every node's ``src``/``tgt`` filled in.

    Generator annotations already present on ``term`` are ignored and
    re-derived from ``sig``.
    """
    declared = set(sig.objects)
    stack: list[tuple[Term, Path, bool]] = [(term, (), False)]
    out: list[Term] = []
    while stack:
        node, path, expanded = stack.pop()
        if isinstance(node, Gen):
            if node.name not in sig.generators:
                raise UnknownGenerator(node.name, path, node.pos)
            src, tgt = sig.generators[node.name]
            if not src or not tgt:
                raise ZeroArity(path, node.pos)
            out.append(Gen(node.name, src, tgt, pos=node.pos))
        elif isinstance(node, Id):
            if not node.objects:
                raise ZeroArity(path, node.pos)
            for ob in node.objects:
                if ob not in declared:
                    raise UnknownObject(ob, path, node.pos)
            out.append(node)
        elif isinstance(node, Seq):
            if not expanded:
                stack.append((node, path, True))
                stack.append((node.right, path + ("right",), False))
                stack.append((node.left, path + ("left",), False))
                continue
            right = out.pop()
            left = out.pop()
            if left.tgt != right.src:
                raise CompositionMismatch(left.tgt, right.src, path, node.pos)
            out.append(Seq(left, right, pos=node.pos))
        elif isinstance(node, Ten):
            if not expanded:
                stack.append((node, path, True))
                stack.append((node.bottom, path + ("bottom",), False))
                stack.append((node.top, path + ("top",), False))
                continue
            bottom = out.pop()
            top = out.pop()
            out.append(Ten(top, bottom, pos=node.pos))
        else:
            raise TypeError(f"not a term: {node!r}")
    return out[0]


# -- printing -----------------------------------------------------------------

_SEQ_PREC, _TEN_PREC, _ATOM_PREC = 0, 1, 2


def pretty(term: Term) -> str:
    """Render ``term`` in the concrete syntax with minimal parentheses.

    Both operators associate to the left, so a right-nested operand is
    wrapped even at equal precedence.
    """

    def wrap(item: tuple[str, int], min_prec: int) -> str:
        text, prec = item
        return text if prec >= min_prec else f"({text})"

    return fold(
        term,
        lambda g: (g.name, _ATOM_PREC),
        lambda i: (f"id[{' '.join(i.objects)}]", _ATOM_PREC),
        lambda a, b: (f"{wrap(a, _SEQ_PREC)} ; {wrap(b, _TEN_PREC)}", _SEQ_PREC),
        lambda a, b: (f"{wrap(a, _TEN_PREC)} * {wrap(b, _ATOM_PREC)}", _TEN_PREC),
    )[0]


def format_signature(sig: Signature) -> str:
    lines = [f"ob {ob}" for ob in sig.objects]
    for name, (src, tgt) in sig.generators.items():
        lines.append(f"gen {name}: {' '.join(src)} -> {' '.join(tgt)}")
    return "\n".join(lines)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[:=;*()\[\]])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "punct" or "end"
    text: str
    line: int
    column: int


def _tokenize(line: str, lineno: int) -> list[_Token]:
    code = line.split("#", 1)[0]
    tokens = []
    i = 0
    while i < len(code):
        m = _TOKEN.match(code, i)
        if m is None:
            raise ParseError(f"unexpected character {code[i]!r}", lineno, i + 1)
        if m.lastgroup != "ws":
            kind = "ident" if m.lastgroup == "ident" else "punct"
            tokens.append(_Token(kind, m.group(), lineno, i + 1))
        i = m.end()
    tokens.append(_Token("end", "", lineno, len(code) + 1))
    return tokens


class _LineParser:
    def __init__(self, tokens: list[_Token], terms: Mapping[str, Term]) -> None:
        self.tokens = tokens
        self.i = 0
        self.terms = terms

    @property
    def peek(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.peek
        found = "end of line" if tok.kind == "end" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.column)

    def expect(self, text: str) -> _Token:
        tok = self.peek
        if tok.kind == "end" or tok.text != text or (tok.kind == "ident") != text[0].isalpha():
            raise self.fail(f"expected {text!r}")
        self.i += 1
        return tok

    def ident(self, what: str = "identifier") -> _Token:
        tok = self.peek
        if tok.kind != "ident":
            raise self.fail(f"expected {what}")
        self.i += 1
        return tok

    def objlist(self) -> list[_Token]:
        obs = [self.ident("object symbol")]
        while self.peek.kind == "ident":
            obs.append(self.ident())
        return obs

    def end(self) -> None:
        if self.peek.kind != "end":
            raise self.fail("expected end of line")

    def expr(self) -> Term:
        left = self.tensor()
        while self.peek.text == ";" and self.peek.kind == "punct":
            tok = self.expect(";")
            left = Seq(left, self.tensor(), pos=(tok.line, tok.column))
        return left

    def tensor(self) -> Term:
        left = self.atom()
        while self.peek.text == "*" and self.peek.kind == "punct":
            tok = self.expect("*")
            left = Ten(left, self.atom(), pos=(tok.line, tok.column))
        return left

    def atom(self) -> Term:
        tok = self.peek
        if tok.kind == "punct" and tok.text == "(":
            self.i += 1
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "id" and self.peek.text == "[" and self.peek.kind == "punct":
                self.i += 1
                obs = self.objlist()
                self.expect("]")
                return Id(tuple(o.text for o in obs), pos=(tok.line, tok.column))
            if tok.text in self.terms:
                return self.terms[tok.text]
            return Gen(tok.text, pos=(tok.line, tok.column))
        raise self.fail("expected a term")


def parse_file(text: str | Iterable[str]) -> Tuple[Signature, dict[str, Term]]:
    """Parse an ``.sd`` document into its signature and named raw terms.

    A term may mention an earlier ``term`` by name; the reference is inlined.
    Terms are returned untyped; run :func:`typecheck` on each.
    """
    lines = text.splitlines() if isinstance(text, str) else [l.rstrip("\n") for l in text]
    objects: list[str] = []
    gens: dict[str, Tuple[Objects, Objects]] = {}
    terms: dict[str, Term] = {}
    for lineno, line in enumerate(lines, start=1):
        tokens = _tokenize(line, lineno)
        if tokens[0].kind == "end":
            continue
        p = _LineParser(tokens, terms)
        head = p.ident("'ob', 'gen' or 'term'")
        if head.text == "ob":
            name = p.ident("object symbol")
            p.end()
            if name.text in objects:
                raise DuplicateDeclaration(f"object {name.text!r} already declared", name.line, name.column)
            objects.append(name.text)
        elif head.text == "gen":
            name = p.ident("generator name")
            p.expect(":")
            src = p.objlist()
            p.expect("->")
            tgt = p.objlist()
            p.end()
            if name.text in gens or name.text in terms:
                raise DuplicateDeclaration(f"name {name.text!r} already declared", name.line, name.column)
            for ob in src + tgt:
                if ob.text not in objects:
                    raise UndeclaredObject(f"undeclared object symbol {ob.text!r}", ob.line, ob.column)
            gens[name.text] = (tuple(o.text for o in src), tuple(o.text for o in tgt))
        elif head.text == "term":
            name = p.ident("term name")
            p.expect("=")
            body = p.expr()
            p.end()
            if name.text in terms or name.text in gens:
                raise DuplicateDeclaration(f"name {name.text!r} already declared", name.line, name.column)
            terms[name.text] = body
        else:
            raise ParseError(f"expected 'ob', 'gen' or 'term', found {head.text!r}", head.line, head.column)
    return Signature(tuple(objects), gens), terms


def parse_term(text: str, terms: Mapping[str, Term] | None = None) -> Term:
    """Parse a single expression, e.g. ``"(f * g) ; (f * g)"``."""
    p = _LineParser(_tokenize(text, 1), terms or {})
    body = p.expr()
    p.end()
    return body
