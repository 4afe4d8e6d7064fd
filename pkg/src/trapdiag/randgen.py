"""Random well-typed terms for property tests and benchmarks."""
from __future__ import annotations

import random
from typing import Optional, Sequence

from .term import Gen, Id, Objects, Seq, Signature, Ten, Term


class TermGenerator:
    """Grows well-typed terms top-down against a signature it extends on demand.

    A ``;`` node gets a fresh random middle boundary and a ``*`` node splits
    the required source and target lists. A leaf reuses a generator with the
    required interface when one exists, may be an identity when source and
    target agree, and otherwise mints a new generator ``g<k>``.
    """

    def __init__(
        self,
        rng: random.Random,
        objects: Sequence[str] = ("x",),
        max_arity: int = 4,
        leaf_prob: float = 0.3,
        id_prob: float = 0.25,
    ) -> None:
        self.rng = rng
        self.objects = tuple(objects)
        self.max_arity = max_arity
        self.leaf_prob = leaf_prob
        self.id_prob = id_prob
        self._gens: dict[str, tuple[Objects, Objects]] = {}
        self._by_interface: dict[tuple[Objects, Objects], list[str]] = {}

    @property
    def signature(self) -> Signature:
        return Signature(self.objects, dict(self._gens))

    def boundary(self, n: Optional[int] = None) -> Objects:
        n = self.rng.randint(1, self.max_arity) if n is None else n
        return tuple(self.rng.choice(self.objects) for _ in range(n))

    def _generator(self, src: Objects, tgt: Objects) -> Gen:
        names = self._by_interface.setdefault((src, tgt), [])
        if not names or self.rng.random() < 0.2:
            name = f"g{len(self._gens)}"
            self._gens[name] = (src, tgt)
            names.append(name)
        else:
            name = self.rng.choice(names)
        return Gen(name, src, tgt)

    def leaf(self, src: Objects, tgt: Objects) -> Term:
        if src == tgt and self.rng.random() < self.id_prob:
            return Id(src)
        return self._generator(src, tgt)

    def _split(self, src: Objects, tgt: Objects):
        can_tensor = len(src) >= 2 and len(tgt) >= 2
        if can_tensor and self.rng.random() < 0.5:
            i = self.rng.randint(1, len(src) - 1)
            j = self.rng.randint(1, len(tgt) - 1)
            return "ten", (src[:i], tgt[:j]), (src[i:], tgt[j:])
        mid = self.boundary()
        return "seq", (src, mid), (mid, tgt)

    def term(self, depth: int, src: Optional[Objects] = None, tgt: Optional[Objects] = None) -> Term:
        """A term of depth at most ``depth`` with the given (or random) interface."""
        src = self.boundary() if src is None else tuple(src)
        tgt = self.boundary() if tgt is None else tuple(tgt)
        if depth <= 0 or self.rng.random() < self.leaf_prob:
            return self.leaf(src, tgt)
        kind, (s1, t1), (s2, t2) = self._split(src, tgt)
        a = self.term(depth - 1, s1, t1)
        b = self.term(depth - 1, s2, t2)
        return Seq(a, b) if kind == "seq" else Ten(a, b)

    def sized(self, leaves: int, src: Optional[Objects] = None, tgt: Optional[Objects] = None) -> Term:
        """A term with exactly ``leaves`` leaf nodes (generators and identities)."""
        src = self.boundary() if src is None else tuple(src)
        tgt = self.boundary() if tgt is None else tuple(tgt)
        # explicit stack: the split is random, so depth is unbounded in principle
        pending: list = [("build", leaves, src, tgt)]
        out: list[Term] = []
        while pending:
            item = pending.pop()
            if item[0] == "join":
                b, a = out.pop(), out.pop()
                out.append(Seq(a, b) if item[1] == "seq" else Ten(a, b))
                continue
            _, n, s, t = item
            if n <= 1:
                out.append(self.leaf(s, t))
                continue
            kind, (s1, t1), (s2, t2) = self._split(s, t)
            k = self.rng.randint(1, n - 1)
            pending.append(("join", kind))
            pending.append(("build", n - k, s2, t2))
            pending.append(("build", k, s1, t1))
        return out[0]


def break_seq_boundary(term: Term, rng: random.Random) -> Optional[Term]:
    """Copy of ``term`` with one ``;`` made ill-typed, or ``None`` if it has no ``;``.

    The right operand of the chosen composition is tensored with an extra
    identity wire, so its source grows by one object.
    """
    seqs = []
    stack = [term]
    while stack:
        node = stack.pop()
        if isinstance(node, Seq):
            seqs.append(node)
            stack.extend((node.left, node.right))
        elif isinstance(node, Ten):
            stack.extend((node.top, node.bottom))
    if not seqs:
        return None
    target = rng.choice(seqs)
    extra = (target.right.src or ("x",))[:1]

    def rebuild(node: Term) -> Term:
        if node is target:
            return Seq(node.left, Ten(node.right, Id(extra)))
        if isinstance(node, Seq):
            return Seq(rebuild(node.left), rebuild(node.right))
        if isinstance(node, Ten):
            return Ten(rebuild(node.top), rebuild(node.bottom))
        return node

    return rebuild(term)
