"""End-to-end acceptance checks, one test per criterion.

Each test is self-contained and regenerates what it needs; seeds are
fixed so every run checks the same population.
"""

import itertools
import random
import time

import pytest

from safelc.corpus import HAND_CORPUS, generate_safe_corpus, hand_entries
from safelc.encodings import (
    AppendConst,
    Compose,
    ConstWord,
    LetterHom,
    Polynomial,
    PrependConst,
    Word,
    apply_word_function,
    church_nat,
    church_word,
    compile_polynomial,
    compile_word_function,
    conditional_candidates,
    decode_nat,
    decode_word,
    parse_polynomial,
)
from safelc.games import (
    ReconstructionError,
    build_computation_tree,
    enumerate_traversals,
    reconstruct_p_pointers,
    traversal_normal_form,
    uncover,
)
from safelc.hardness import enumerate_qbfs, equality_instance
from safelc.qbf_oracle import eval_qbf
from safelc.reduction import (
    Strategy,
    beta_eta_equal,
    normalize,
    reduction_sequence,
)
from safelc.safety import Level, eta_long, safety_check, simple_type_of
from safelc.syntax import alpha_eq, mk_app, parse

BY_NAME = {e.name: e for e in HAND_CORPUS}


def test_criterion_1_safe_normalization_never_captures():
    """Safe-strategy normalization raises no capture flag on safe terms."""
    start = time.monotonic()
    terms = list(generate_safe_corpus(1000, seed=11))
    terms += [e.term for e in hand_entries(Level.SAFE)]
    assert len(terms) >= 1000 + 14
    for term in terms:
        assert safety_check({}, term).level is Level.SAFE
        normalize(term, Strategy.SAFE)  # CaptureViolation would fail here
    assert time.monotonic() - start < 60


def test_criterion_2_plain_and_safe_reduction_agree():
    terms = [e.term for e in hand_entries(Level.SAFE)]
    terms += list(generate_safe_corpus(300, seed=12))
    for term in terms:
        assert alpha_eq(
            normalize(term, Strategy.PLAIN), normalize(term, Strategy.SAFE)
        )
    # witness: plain contraction of one binder at a time walks through a
    # stage that leaves the safety fragment; block contraction never does
    witness = BY_NAME["block-redex"].term
    plain_chain = list(reduction_sequence(witness, Strategy.PLAIN))
    safe_chain = list(reduction_sequence(witness, Strategy.SAFE))
    plain_levels = [safety_check({}, t).level for t in plain_chain]
    assert Level.UNSAFE_TYPABLE in plain_levels[1:-1]
    assert all(safety_check({}, t).level is Level.SAFE for t in safe_chain)
    assert alpha_eq(safe_chain[-1], parse(r"\a:o g:o->o. g a"))
    assert alpha_eq(plain_chain[-1], safe_chain[-1])


def _polynomial_population():
    polys = [parse_polynomial("x^2*y + 3*x + 2")]
    for c in range(6):  # constants, including zero
        polys.append(Polynomial((), {(): c} if c else {}))
    names = ("x", "y", "z")
    for k in (1, 2, 3):
        variables = names[:k]
        vectors = [
            e
            for e in itertools.product(range(4), repeat=k)
            if 0 < sum(e) <= 3 and e[-1] > 0  # new shapes only at this k
        ]
        for e in vectors:
            for coeff in (1, 2, 5):
                polys.append(Polynomial(variables, {e: coeff}))
    rng = random.Random(2026)
    for _ in range(30):
        k = rng.randrange(1, 4)
        variables = names[:k]
        vectors = [
            e
            for e in itertools.product(range(4), repeat=k)
            if 0 < sum(e) <= 3
        ]
        chosen = rng.sample(vectors, k=min(len(vectors), rng.randrange(2, 4)))
        polys.append(
            Polynomial(
                variables, {e: rng.randrange(1, 6) for e in chosen}
            )
        )
    return polys


def test_criterion_3_polynomials_compute_exactly():
    for p in _polynomial_population():
        term = compile_polynomial(p)
        assert safety_check({}, term).level is Level.SAFE
        k = len(p.variables)
        for point in itertools.product(range(4), repeat=k):
            values = dict(zip(p.variables, point))
            applied = mk_app(
                term, tuple(church_nat(values[v]) for v in p.variables)
            )
            assert decode_nat(normalize(applied)) == p.evaluate(values)
    # branching on a numeral is what the discipline cannot express
    candidates = conditional_candidates()
    assert len(candidates) >= 3
    for term, verdict in candidates:
        assert verdict.level is not Level.SAFE
        assert safety_check({}, term).level is verdict.level


WORD_CATALOGUE = (
    ConstWord(""),
    ConstWord("ab"),
    AppendConst("b"),
    AppendConst("ba"),
    PrependConst("a"),
    LetterHom((("a", "b"), ("b", "a"))),
    LetterHom((("a", "ab"), ("b", ""))),
    Compose(AppendConst("a"), LetterHom((("a", "bb"), ("b", "a")))),
    Compose(LetterHom((("a", ""), ("b", "ba"))), PrependConst("ab")),
)


def test_criterion_4_word_functions_agree_with_evaluator():
    alphabet = "ab"
    words = [
        "".join(p)
        for n in range(7)
        for p in itertools.product(alphabet, repeat=n)
    ]
    assert len(words) == 127
    for spec in WORD_CATALOGUE:
        term = compile_word_function(spec, alphabet)
        assert safety_check({}, term).level is Level.SAFE
        for letters in words:
            w = Word(alphabet, letters)
            direct = apply_word_function(spec, w)
            got = decode_word(
                normalize(mk_app(term, (church_word(w),))), alphabet
            )
            assert got.letters == direct.letters, (spec, letters)


def test_criterion_5_qbf_reduction_agrees_with_oracle():
    start = time.monotonic()
    formulas = list(enumerate_qbfs(3, 3))
    assert len(formulas) == 42496
    for f in formulas:
        lhs, rhs = equality_instance(f)
        assert beta_eta_equal({}, lhs, rhs) == eval_qbf(f)
        # quadratic size cap keeps the mapping a polynomial reduction
        assert lhs.size <= 4 * (f.size + 2) ** 2
    assert time.monotonic() - start < 120


def test_criterion_6_traversal_normal_forms_match_reduction():
    closed_hand = [
        e.term
        for e in HAND_CORPUS
        if e.level is not Level.ILL_TYPED and not e.env
    ]
    terms = closed_hand + list(generate_safe_corpus(210, seed=6))
    assert len(terms) >= 200
    for term in terms:
        tree = build_computation_tree({}, term)
        assert alpha_eq(
            traversal_normal_form(tree), eta_long({}, normalize(term))
        )


def _round_trips(env, term, max_len=40) -> bool:
    tree = build_computation_tree(env, term)
    for traversal in enumerate_traversals(tree, max_len=max_len):
        try:
            back = reconstruct_p_pointers(uncover(traversal), tree)
        except ReconstructionError:
            return False
        if back != traversal:
            return False
    return True


def test_criterion_7a_reconstruction_identity_on_safe_terms():
    terms = [(e.env, e.term) for e in hand_entries(Level.SAFE)]
    terms += [({}, t) for t in generate_safe_corpus(150, seed=13)]
    for env, term in terms:
        assert _round_trips(env, term)


@pytest.mark.xfail(
    strict=True,
    reason=(
        "fails by design: the order-3 unsafe twist term has two order-2 "
        "core lambdas in view after uncovering, so the recovered pointer "
        "lands on the wrong one; pointer recovery is only guaranteed on "
        "safe terms, and order 4 is where safe terms first need pointers"
    ),
)
def test_criterion_7b_reconstruction_identity_up_to_order3():
    entries = [
        e
        for e in HAND_CORPUS
        if e.level is not Level.ILL_TYPED
        and simple_type_of(e.env, e.term).order <= 3
    ]
    assert any(e.name == "kierstead-twist" for e in entries)
    for e in entries:
        assert _round_trips(e.env, e.term), e.name
    for term in generate_safe_corpus(60, seed=14):
        if simple_type_of({}, term).order <= 3:
            assert _round_trips({}, term)


def test_criterion_7c_order4_unsafe_witness_fails_reconstruction():
    twist = BY_NAME["kierstead-twist-order4"]
    assert simple_type_of({}, twist.term).order == 4
    assert safety_check({}, twist.term).level is Level.UNSAFE_TYPABLE
    assert not _round_trips({}, twist.term)
    # safe controls at the same order and type shape survive the trip
    for name in ("kierstead-order4", "delegation-order4"):
        assert _round_trips({}, BY_NAME[name].term)


def test_criterion_8_hand_corpus_verdicts_match():
    assert len(HAND_CORPUS) >= 30
    assert {e.level for e in HAND_CORPUS} == set(Level)
    for required in (
        "grouped-block",
        "ungrouped-block",
        "kierstead",
        "kierstead-twist",
    ):
        assert required in BY_NAME
    for e in HAND_CORPUS:
        assert safety_check(e.env, e.term).level is e.level, e.name
