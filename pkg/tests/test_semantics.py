from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import block_diag, eval_reference, identity, mat_mul
from trapdiag.randgen import TermGenerator
from trapdiag.semantics import (
    ARITY,
    NODE_COUNT,
    MatrixValue,
    MissingAssignment,
    SemanticsError,
    ShapeMismatch,
    direct_sum,
    eval_matrix,
    fold,
    matrix_to_json,
    parse_assignment,
)
from trapdiag.term import Id, Seq, Signature, Ten, arity, count_generators, parse_term, typecheck

M = MatrixValue.from_rows
FG = {"f": M([[1], [2]]), "g": M([[3, 4]])}


def test_node_count_crossing(crossing):
    _, t = crossing
    assert fold(t, NODE_COUNT) == 4


def test_arity_algebra_matches_arity(crossing):
    _, t = crossing
    assert fold(t, ARITY) == arity(t) == (3, 3)


def test_f_tensor_g_block_diagonal(crossing):
    sig, _ = crossing
    t = typecheck(parse_term("f * g"), sig)
    assert eval_matrix(t, FG).to_rows() == [[1, 0, 0], [2, 0, 0], [0, 3, 4]]


def test_crossing_matrix_matches_square_of_block(crossing):
    _, t = crossing
    block = block_diag([[1], [2]], [[3, 4]])
    assert eval_matrix(t, FG).to_rows() == mat_mul(block, block)


def test_identity_matrix(crossing):
    sig, _ = crossing
    assert eval_matrix(typecheck(parse_term("id[x x]"), sig), {}).to_rows() == identity(2)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ([[1]], [[2]], [[1, 0], [0, 2]]),
        ([[1, 2]], [[3], [4]], [[1, 2, 0], [0, 0, 3], [0, 0, 4]]),
    ],
)
def test_direct_sum_examples(a, b, expected):
    assert direct_sum(M(a), M(b)).to_rows() == expected


def test_direct_sum_of_identities():
    assert direct_sum(MatrixValue.identity(2), MatrixValue.identity(3)) == MatrixValue.identity(5)


def test_shape_checked_against_generator(crossing):
    _, t = crossing
    with pytest.raises(ShapeMismatch):
        eval_matrix(t, {"f": M([[1, 2]]), "g": M([[3, 4]])})


def test_missing_assignment(crossing):
    _, t = crossing
    with pytest.raises(MissingAssignment):
        eval_matrix(t, {"f": M([[1], [2]])})


def test_matmul_shape_error():
    with pytest.raises(ShapeMismatch):
        M([[1, 2]]) @ M([[1, 2]])


def test_rational_entries_and_json(crossing):
    sig, _ = crossing
    assignment = parse_assignment('{"gens": {"f": [["1/2"], [2]], "g": [[3, "-4/6"]]}}', sig)
    assert assignment["f"][0, 0] == Fraction(1, 2)
    assert assignment["g"][0, 1] == Fraction(-2, 3)
    doc = json.loads(matrix_to_json(M([[Fraction(1, 2), 3]])))
    assert doc == {"rows": 1, "cols": 2, "entries": [["1/2", 3]]}


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"f": [[1]]}',
        '{"gens": {"f": [[1], 2]}}',
        '{"gens": {"f": [[1], [2, 3]]}}',
        '{"gens": {"f": [["abc"], [1]]}}',
        '{"gens": {"f": [[true], [1]]}}',
        '{"gens": {"f": [[1.5], [1]]}}',
        '{"gens": {"nope": [[1]]}}',
    ],
)
def test_bad_assignment_files(crossing, text):
    sig, _ = crossing
    with pytest.raises(SemanticsError):
        parse_assignment(text, sig)


def test_assignment_shape_validated(crossing):
    sig, _ = crossing
    with pytest.raises(ShapeMismatch):
        parse_assignment('{"gens": {"f": [[1, 2]]}}', sig)


# -- laws on random terms -------------------------------------------------------


def random_assignment(sig: Signature, rng: random.Random):
    return {
        name: M([[rng.randint(-3, 3) for _ in src] for _ in tgt])
        for name, (src, tgt) in sig.generators.items()
    }


def chain(gen: TermGenerator, depth: int, *boundaries):
    return [gen.term(depth, a, b) for a, b in zip(boundaries, boundaries[1:])]


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(min_value=0, max_value=5))
def test_fold_matches_plain_recursion(seed, depth):
    rng = random.Random(seed)
    gen = TermGenerator(rng, objects=("x", "y"))
    t = typecheck(gen.term(depth), gen.signature)
    assignment = random_assignment(gen.signature, rng)
    m = eval_matrix(t, assignment)
    assert m.shape == (len(t.tgt), len(t.src))
    raw = {k: v.to_rows() for k, v in assignment.items()}
    assert m.to_rows() == eval_reference(t, raw)
    assert fold(t, NODE_COUNT) == count_generators(t)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(min_value=0, max_value=4))
def test_interchange_law(seed, depth):
    rng = random.Random(seed)
    gen = TermGenerator(rng)
    a, b = chain(gen, depth, gen.boundary(), gen.boundary(), gen.boundary())
    c, d = chain(gen, depth, gen.boundary(), gen.boundary(), gen.boundary())
    assignment = random_assignment(gen.signature, rng)
    lhs = typecheck(Ten(Seq(a, b), Seq(c, d)), gen.signature)
    rhs = typecheck(Seq(Ten(a, c), Ten(b, d)), gen.signature)
    assert eval_matrix(lhs, assignment) == eval_matrix(rhs, assignment)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(min_value=0, max_value=4))
def test_associativity_and_units(seed, depth):
    rng = random.Random(seed)
    gen = TermGenerator(rng)
    a, b, c = chain(gen, depth, *(gen.boundary() for _ in range(4)))
    assignment = random_assignment(gen.signature, rng)
    sig = gen.signature

    def ev(t):
        return eval_matrix(typecheck(t, sig), assignment)

    assert ev(Seq(a, Seq(b, c))) == ev(Seq(Seq(a, b), c))
    assert ev(Seq(Id(a.src), a)) == ev(a) == ev(Seq(a, Id(a.tgt)))
    assert ev(Ten(a, Ten(b, c))) == ev(Ten(Ten(a, b), c))
