import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctminus.evaluation import (
    FALSE,
    TRUE,
    UNKNOWN,
    Budget,
    DomainOracle,
    MissingAtom,
    NotASentence,
    OpenTerm,
    PropositionalOracle,
    StandardModelOracle,
    TableOracle,
    Verdict,
    check_ct_axioms,
    check_ct_restricted,
    eval_closed_term,
    eval_prop,
    eval_sentence,
    sentence_closure,
)
from ctminus.generators import bounded_fragment, bounded_sentence, small_closed_term
from ctminus.stopping_disjunction import atom_sentences, stop_disjunction
from ctminus.syntax import (
    ZERO,
    Add,
    Eq,
    Exists,
    Mul,
    Not,
    Or,
    Succ,
    Var,
    conj,
    numeral,
    parse_formula,
    placeholder,
    substitute,
)

from strategies import closed_terms, sentences

verdicts = st.sampled_from([TRUE, FALSE, UNKNOWN])


class TestVerdict:
    @given(verdicts, verdicts)
    def test_kleene_tables(self, a, b):
        order = {FALSE: 0, UNKNOWN: 1, TRUE: 2}
        assert order[a.or_(b)] == max(order[a], order[b])
        assert order[a.and_(b)] == min(order[a], order[b])
        assert a.negate().negate() is a

    def test_budget_limits(self):
        with pytest.raises(ValueError):
            Budget(witness_bound=0)


class TestClosedTerms:
    def test_examples(self):
        assert eval_closed_term(Add(numeral(3), Succ(ZERO))) == 4
        assert eval_closed_term(ZERO) == 0
        assert eval_closed_term(Mul(numeral(2), numeral(3))) == 6

    def test_open_term_rejected(self):
        with pytest.raises(OpenTerm):
            eval_closed_term(Add(Var(0), ZERO))

    @given(st.integers(0, 40), st.randoms(use_true_random=False))
    def test_generated_closed_terms(self, n, rng):
        assert eval_closed_term(small_closed_term(rng, n)) == n


class TestSentences:
    def test_examples(self):
        assert eval_sentence(Eq(numeral(2), numeral(2))) is TRUE
        assert eval_sentence(Exists(0, Eq(Var(0), numeral(5))), Budget(witness_bound=5)) is TRUE
        for bound in (1, 8, 64):
            s = Exists(0, Not(Eq(Var(0), Var(0))))
            assert eval_sentence(s, Budget(witness_bound=bound)) is UNKNOWN

    def test_bounded_quantifier_gives_false(self):
        s = parse_formula("E v1. ((E v2. (v1 + v2) = S(S(0)) & v1 = S(S(S(0)))))")
        assert eval_sentence(s, Budget(witness_bound=10)) is FALSE

    def test_open_formula_rejected(self):
        with pytest.raises(NotASentence):
            eval_sentence(Eq(Var(0), ZERO))

    def test_budget_exhaustion_is_unknown(self):
        s = parse_formula("E v1. (E v2. (v1 + v2) = S(S(S(S(0)))) & !(v1 = v1))")
        assert eval_sentence(s, Budget(witness_bound=8, node_budget=3)) is UNKNOWN
        assert eval_sentence(s, Budget(witness_bound=8)) is FALSE

    @settings(max_examples=60, deadline=None)
    @given(sentences(depth=4), st.integers(1, 6), st.integers(1, 6))
    def test_known_verdicts_survive_larger_budgets(self, s, w, extra):
        small = eval_sentence(s, Budget(witness_bound=w))
        if small.known:
            assert eval_sentence(s, Budget(witness_bound=w + extra)) is small

    def test_domain_oracle_is_two_valued(self):
        o = DomainOracle(3)
        assert o.judge(Exists(0, Not(Eq(Var(0), Var(0))))) is FALSE
        assert o.judge(Exists(0, Eq(Var(0), numeral(4)))) is FALSE
        assert o.judge(Exists(0, Eq(Var(0), numeral(3)))) is TRUE


class TestPropositional:
    def test_examples(self):
        a, b = placeholder(0), placeholder(1)
        assert eval_prop(a, {a: True})
        assert not eval_prop(conj(a, b), {a: True, b: False})

    def test_missing_atom(self):
        a, b = placeholder(0), placeholder(1)
        with pytest.raises(MissingAtom):
            eval_prop(Or(a, b), {a: False})

    @pytest.mark.parametrize("c", range(5))
    def test_stopping_disjunction_false_when_no_alpha_holds(self, c):
        alphas, betas = atom_sentences(c)
        f = stop_disjunction(alphas, betas)
        for bits in range(2 ** (c + 1)):
            table = {a: False for a in alphas}
            table.update({b: bool(bits >> i & 1) for i, b in enumerate(betas)})
            assert not eval_prop(f, table)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_agrees_with_standard_model(self, data):
        leaves = data.draw(st.lists(sentences(depth=2), min_size=1, max_size=4, unique=True))
        leaves = [s for s in leaves if eval_sentence(s, Budget(witness_bound=6)).known]
        if not leaves:
            return
        f = data.draw(_combinations(leaves))
        table = {s: eval_sentence(s, Budget(witness_bound=6)) is TRUE for s in leaves}
        assert Verdict.of(eval_prop(f, table)) is eval_sentence(f, Budget(witness_bound=6))


@st.composite
def _combinations(draw, leaves, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from(leaves))
    if draw(st.booleans()):
        return Not(draw(_combinations(leaves, depth - 1)))
    return Or(draw(_combinations(leaves, depth - 1)), draw(_combinations(leaves, depth - 1)))


class TestAxiomChecking:
    def test_standard_model_on_bounded_fragment(self):
        frag = bounded_fragment(random.Random(11), 120, instance_bound=6)
        report = check_ct_axioms(StandardModelOracle(Budget(witness_bound=6)), frag, instance_bound=6)
        assert report.ok
        assert report.unknown_count == 0

    def test_table_oracle_disjunction_violation(self):
        a, b = Eq(ZERO, numeral(1)), Eq(numeral(2), ZERO)
        f = Or(a, b)
        report = check_ct_axioms(TableOracle([f]), [a, b, f])
        assert [v.axiom for v in report.violations] == ["3"]
        line = report.violations[0].line()
        assert line.startswith("AXIOM 3 VIOLATION: ")

    def test_regularity_on_equal_values(self):
        phi = Eq(Var(0), numeral(1))
        s_bar = [Add(Succ(ZERO), ZERO)]
        t_bar = [numeral(1)]
        report = check_ct_axioms(
            StandardModelOracle(), [], pairs=[(s_bar, t_bar)], templates=[phi]
        )
        assert report.results["5"].checked == 1
        assert report.ok

    def test_regularity_failure_detected(self):
        phi = Eq(Var(0), numeral(1))
        s_bar, t_bar = [Add(Succ(ZERO), ZERO)], [numeral(1)]
        liar = TableOracle([substitute(phi, {0: t_bar[0]})])
        report = check_ct_axioms(liar, [], pairs=[(s_bar, t_bar)], templates=[phi])
        assert [v.axiom for v in report.violations] == ["5"]

    def test_depth_gate_skips_negation(self):
        inner = bounded_sentence(random.Random(2), 6)
        while inner._sd < 4:
            inner = Not(inner)
        s = Not(inner)
        frag = sentence_closure([s], 4)
        report = check_ct_restricted(
            StandardModelOracle(Budget(witness_bound=4)), frag, depth_cut=lambda d: d <= 3,
            instance_bound=4,
        )
        assert report.results["2"].gated >= 1

    def test_all_depths_matches_unrestricted(self):
        frag = bounded_fragment(random.Random(5), 60, instance_bound=4)
        o = StandardModelOracle(Budget(witness_bound=4))
        full = check_ct_axioms(o, frag, instance_bound=4)
        cut = check_ct_restricted(o, frag, depth_cut=lambda d: True, instance_bound=4)
        assert full.lines() == cut.lines()

    def test_atoms_checked_above_code_bound(self):
        big = Eq(numeral(30), Add(numeral(15), numeral(15)))
        report = check_ct_restricted(StandardModelOracle(), [big], code_bound=0)
        assert report.results["1"].checked == 1
        assert report.ok

    def test_exactly_one_cut(self):
        with pytest.raises(ValueError):
            check_ct_restricted(StandardModelOracle(), [])

    def test_propositional_oracle_is_compositional_on_disjunction(self):
        alphas, betas = atom_sentences(2)
        f = stop_disjunction(alphas, betas)
        rng = random.Random(4)
        for _ in range(20):
            table = {s: rng.random() < 0.5 for s in alphas + betas}
            frag = sentence_closure([f], 0, stop=alphas + betas)
            report = check_ct_axioms(PropositionalOracle(table), [g for g in frag if g not in table])
            assert report.ok
