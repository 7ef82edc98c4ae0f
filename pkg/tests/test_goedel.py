import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctminus.goedel import (
    IndexOutOfRange,
    NotAFormulaCode,
    NotASeqCode,
    NotATermCode,
    decode_formula,
    decode_seq,
    decode_term,
    encode_formula,
    encode_seq,
    encode_term,
    is_closed_term,
    is_cltermseq,
    is_form,
    is_form_le1,
    is_sent,
    is_term,
    is_termseq,
    is_var,
    nth_formula_le1,
    pair,
    seq_get,
    seq_len,
    unpair,
)
from ctminus.generators import random_term
from ctminus.syntax import ZERO, Eq, Not, Var, build_eta, free_vars, height, numeral

from strategies import formulas, terms


def test_pair_examples():
    assert pair(0, 0) == 0
    assert pair(1, 2) == 8


def test_pair_is_bijective_on_a_square():
    seen = {}
    for x in range(200):
        for y in range(200):
            z = pair(x, y)
            assert unpair(z) == (x, y)
            assert z not in seen
            seen[z] = (x, y)


@given(st.integers(0, 10**40))
def test_unpair_then_pair(z):
    assert pair(*unpair(z)) == z


class TestTermsAndFormulas:
    def test_zero_code(self):
        assert encode_term(ZERO) == pair(0, 0)

    def test_numeral_round_trip(self):
        assert decode_term(encode_term(numeral(5))) is numeral(5)

    def test_atom_and_negation_differ(self):
        a = Eq(ZERO, ZERO)
        assert encode_formula(a) != encode_formula(Not(a))

    def test_eta_round_trip(self):
        assert decode_formula(encode_formula(build_eta(2))) is build_eta(2)

    def test_injective_on_generated_terms(self):
        rng = random.Random(3)
        corpus = {random_term(rng, 6, (0, 1, 2)) for _ in range(1000)}
        codes = {encode_term(t) for t in corpus}
        assert len(codes) == len(corpus)

    @given(terms(depth=6))
    def test_term_round_trip(self, t):
        assert decode_term(encode_term(t)) is t

    @given(formulas(depth=6))
    def test_formula_round_trip(self, f):
        assert decode_formula(encode_formula(f)) is f

    def test_height_eight_codes_exceed_machine_words(self):
        f = Eq(Var(0), ZERO)
        while height(f) < 8:
            f = Not(f)
        assert encode_formula(f).bit_length() > 64
        assert decode_formula(encode_formula(f)) is f

    def test_wrong_kind_rejected(self):
        with pytest.raises(NotATermCode):
            decode_term(encode_formula(Eq(ZERO, ZERO)))
        with pytest.raises(NotAFormulaCode):
            decode_formula(encode_term(ZERO))


class TestSequences:
    def test_empty(self):
        assert seq_len(encode_seq([])) == 0

    def test_get(self):
        assert seq_get(encode_seq([4, 9, 16]), 1) == 9

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            seq_get(encode_seq([1, 2]), 2)

    @given(st.lists(st.integers(0, 10**12), max_size=20))
    def test_list_axioms(self, xs):
        c = encode_seq(xs)
        assert seq_len(c) == len(xs)
        assert [seq_get(c, i) for i in range(len(xs))] == xs
        assert decode_seq(c) == xs

    def test_non_sequence_rejected(self):
        bad = next(c for c in range(1000) if not _is_seq(c))
        with pytest.raises(NotASeqCode):
            seq_len(bad)


def _is_seq(c):
    try:
        decode_seq(c)
    except NotASeqCode:
        return False
    return True


class TestRecognizers:
    def test_examples(self):
        assert is_sent(encode_formula(Eq(ZERO, ZERO)))
        assert not is_sent(encode_formula(Eq(Var(0), ZERO)))
        assert not is_form_le1(encode_formula(build_eta(2)))
        assert is_var(encode_term(Var(3)))
        assert is_closed_term(encode_term(numeral(2)))
        assert not is_closed_term(encode_term(Var(1)))

    @pytest.mark.parametrize("c", range(0, 3000, 7))
    def test_agree_with_decoding(self, c):
        try:
            t = decode_term(c)
        except NotATermCode:
            t = None
        try:
            f = decode_formula(c)
        except NotAFormulaCode:
            f = None
        assert is_term(c) == (t is not None)
        assert is_closed_term(c) == (t is not None and not t._vars)
        assert is_var(c) == (type(t) is Var)
        assert is_form(c) == (f is not None)
        assert is_form_le1(c) == (f is not None and len(free_vars(f)) <= 1)
        assert is_sent(c) == (f is not None and not free_vars(f))

    def test_sequence_recognizers(self):
        closed = encode_seq([encode_term(numeral(1)), encode_term(ZERO)])
        open_ = encode_seq([encode_term(Var(0))])
        assert is_termseq(closed) and is_cltermseq(closed)
        assert is_termseq(open_) and not is_cltermseq(open_)
        assert not is_termseq(encode_seq([encode_formula(Eq(ZERO, ZERO))]))

    def test_formula_enumeration_is_increasing(self):
        rows = [nth_formula_le1(i) for i in range(40)]
        codes = [c for c, _ in rows]
        assert codes == sorted(set(codes))
        assert all(is_form_le1(c) for c in codes)
        assert all(encode_formula(f) == c for c, f in rows)

    def test_first_enumerated_codes(self):
        assert [nth_formula_le1(i)[0] for i in range(5)] == [15, 22, 30, 49, 72]
