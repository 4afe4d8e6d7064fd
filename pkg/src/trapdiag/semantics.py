"""Compiling terms under a chosen semantics.

A :class:`MonoidalAlgebra` supplies one handler per term constructor and
:func:`fold` evaluates a term bottom-up with it. Layout is one such algebra;
the matrix backend here is another: composition is the matrix product and
tensor is the block-diagonal direct sum.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Generic, Mapping, Sequence, Tuple, TypeVar

from . import term as _term
from .term import Gen, Id, Signature, Term

V = TypeVar("V")


class SemanticsError(ValueError):
    pass


class ShapeMismatch(SemanticsError):
    pass


class MissingAssignment(SemanticsError):
    pass


@dataclass(frozen=True)
class MonoidalAlgebra(Generic[V]):
    """Handlers for a fold.

    ``on_gen`` receives the typechecked :class:`~trapdiag.term.Gen` node (so
    ``name``, ``src`` and ``tgt`` are at hand) and ``on_id`` the
    :class:`~trapdiag.term.Id` node.
    """

    on_gen: Callable[[Gen], V]
    on_id: Callable[[Id], V]
    on_seq: Callable[[V, V], V]
    on_ten: Callable[[V, V], V]


def fold(term: Term, alg: MonoidalAlgebra[V]) -> V:
    return _term.fold(term, alg.on_gen, alg.on_id, alg.on_seq, alg.on_ten)


NODE_COUNT = MonoidalAlgebra(
    on_gen=lambda g: 1,
    on_id=lambda i: 0,
    on_seq=lambda a, b: a + b,
    on_ten=lambda a, b: a + b,
)

ARITY = MonoidalAlgebra(
    on_gen=lambda g: (len(g.src), len(g.tgt)),
    on_id=lambda i: (len(i.objects), len(i.objects)),
    on_seq=lambda a, b: (a[0], b[1]),
    on_ten=lambda a, b: (a[0] + b[0], a[1] + b[1]),
)


# -- matrices -----------------------------------------------------------------


@dataclass(frozen=True)
class MatrixValue:
    """Dense matrix of exact rationals, stored row-major."""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        entries = tuple(Fraction(e) for e in self.entries)
        if len(entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(entries)}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> MatrixValue:
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), len(rows[0]), tuple(_parse_entry(e) for r in rows for e in r))

    @classmethod
    def identity(cls, n: int) -> MatrixValue:
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def __matmul__(self, other: MatrixValue) -> MatrixValue:
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        a, b = self.to_rows(), other.to_rows()
        cols_b = list(zip(*b))
        return MatrixValue(
            self.rows,
            other.cols,
            tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for row in a for col in cols_b),
        )

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(_fmt_entry(e) for e in r) + "]" for r in self.to_rows()) + "]"


def direct_sum(a: MatrixValue, b: MatrixValue) -> MatrixValue:
    """Block-diagonal ``a (+) b`` with ``a`` top-left."""
    zero = Fraction(0)
    rows = [r + [zero] * b.cols for r in a.to_rows()]
    rows += [[zero] * a.cols + r for r in b.to_rows()]
    return MatrixValue(a.rows + b.rows, a.cols + b.cols, tuple(e for r in rows for e in r))


def matrix_algebra(assignment: Mapping[str, MatrixValue]) -> MonoidalAlgebra[MatrixValue]:
    def on_gen(g: Gen) -> MatrixValue:
        if g.name not in assignment:
            raise MissingAssignment(f"no matrix assigned to generator {g.name!r}")
        m = assignment[g.name]
        want = (len(g.tgt), len(g.src))
        if m.shape != want:
            raise ShapeMismatch(f"generator {g.name!r} needs a {want[0]}x{want[1]} matrix, got {m.rows}x{m.cols}")
        return m

    return MonoidalAlgebra(
        on_gen=on_gen,
        on_id=lambda i: MatrixValue.identity(len(i.objects)),
        # diagrammatic order: apply the left operand first
        on_seq=lambda ma, mb: mb @ ma,
        on_ten=direct_sum,
    )


def eval_matrix(term: Term, assignment: Mapping[str, MatrixValue]) -> MatrixValue:
    """Matrix denoted by a typechecked term; shape is ``(|tgt|, |src|)``."""
    return fold(term, matrix_algebra(assignment))


# -- assignment files ---------------------------------------------------------


def _parse_entry(e: Any) -> Fraction:
    if isinstance(e, bool):
        raise SemanticsError(f"invalid matrix entry {e!r}")
    if isinstance(e, int):
        return Fraction(e)
    if isinstance(e, Fraction):
        return e
    if isinstance(e, str):
        try:
            return Fraction(e.strip())
        except (ValueError, ZeroDivisionError):
            raise SemanticsError(f"invalid matrix entry {e!r}") from None
    raise SemanticsError(f"invalid matrix entry {e!r}; use an integer or a 'p/q' string")


def _fmt_entry(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


def parse_assignment(text: str, sig: Signature | None = None) -> dict[str, MatrixValue]:
    """Read ``{"gens": {"f": [[...], ...], ...}}``; shapes are checked against ``sig``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SemanticsError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("gens"), dict):
        raise SemanticsError('assignment must be an object with a "gens" object')
    out = {}
    for name, rows in doc["gens"].items():
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise SemanticsError(f"matrix for {name!r} must be a list of rows")
        try:
            m = MatrixValue.from_rows(rows)
        except ValueError as exc:
            raise SemanticsError(f"matrix for {name!r}: {exc}") from None
        if sig is not None:
            if name not in sig.generators:
                raise SemanticsError(f"assignment names unknown generator {name!r}")
            src, tgt = sig.generators[name]
            if m.shape != (len(tgt), len(src)):
                raise ShapeMismatch(
                    f"generator {name!r} needs a {len(tgt)}x{len(src)} matrix, got {m.rows}x{m.cols}"
                )
        out[name] = m
    return out


def matrix_to_json(m: MatrixValue) -> str:
    """``{"rows": r, "cols": c, "entries": [[...]]}``; non-integers as ``"p/q"``."""

    def enc(e: Fraction):
        return e.numerator if e.denominator == 1 else _fmt_entry(e)

    payload = {"rows": m.rows, "cols": m.cols, "entries": [[enc(e) for e in r] for r in m.to_rows()]}
    return json.dumps(payload) + "\n"
