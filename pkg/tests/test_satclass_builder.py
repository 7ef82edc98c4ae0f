import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctminus.evaluation import FALSE, TRUE, UNKNOWN, DomainOracle
from ctminus.generators import extra_comp_over, random_fragment
from ctminus.satclass_builder import (
    ConstraintSet,
    FragmentFormatError,
    InconsistentConstraints,
    Occurrence,
    build_satisfaction,
    canonical,
    equiv_classes,
    falsity_flips,
    mutation_target,
    next_stage,
    occurrence_equiv_step,
    occurrence_key,
    parse_fragment,
    render_fragment,
    subformula_order,
    valuations,
    verify_theta_fragment,
)
from ctminus.syntax import (
    ZERO,
    Add,
    Eq,
    Exists,
    InadmissibleValuation,
    Not,
    Or,
    Succ,
    Var,
    eta_at,
    eta_prefixes,
    numeral,
    parse_formula,
    subformulas,
    substitute,
)

from strategies import formulas

PHI = parse_formula("E v1. (v1 = (v0 + S(0)))")


def occ(f, **vals):
    return Occurrence(f, {int(k[1:]): x for k, x in vals.items()})


class TestOccurrences:
    def test_valuation_restricted_to_free_variables(self):
        assert occ(PHI, v0=1, v5=9) == occ(PHI, v0=1)

    def test_inadmissible(self):
        with pytest.raises(InadmissibleValuation):
            occ(PHI)

    def test_closed_instance(self):
        assert occ(PHI, v0=2).closed() is substitute(PHI, {0: numeral(2)})


class TestEquivalence:
    def test_equal_values(self):
        other = substitute(PHI, {0: Add(Succ(ZERO), ZERO)})
        assert occurrence_equiv_step(occ(PHI, v0=1), Occurrence(other))

    def test_unequal_values(self):
        a = Occurrence(Eq(numeral(1), numeral(1)))
        b = Occurrence(Eq(numeral(2), numeral(2)))
        assert not occurrence_equiv_step(a, b)

    @given(formulas(depth=3), st.data())
    def test_reflexive(self, f, data):
        env = {v: data.draw(st.integers(0, 3)) for v in f._fv}
        o = Occurrence(f, env)
        assert occurrence_equiv_step(o, o)

    def test_singleton(self):
        assert equiv_classes([occ(PHI, v0=0)]) == [(occ(PHI, v0=0),)]

    def test_occurrence_and_closed_instance_share_a_class(self):
        a = occ(PHI, v0=3)
        classes = equiv_classes([a, Occurrence(a.closed())])
        assert len(classes) == 1

    @settings(max_examples=30, deadline=None)
    @given(st.lists(formulas(depth=3), min_size=1, max_size=4), st.data())
    def test_keys_match_pairwise_closure(self, fs, data):
        occs = []
        for f in fs:
            env = {v: data.draw(st.integers(0, 2)) for v in f._fv}
            o = Occurrence(f, env)
            occs += [o, Occurrence(o.closed())]
            # the same sentence with some numerals spelled as sums
            twisted = substitute(f, {v: Add(numeral(x), ZERO) for v, x in env.items()})
            occs.append(Occurrence(twisted))
        assert equiv_classes(occs) == equiv_classes(occs, pairwise=True)

    @settings(max_examples=30, deadline=None)
    @given(formulas(depth=3), st.data())
    def test_classes_refine_templates(self, f, data):
        occs = [Occurrence(f, a) for a in valuations(f, 2)]
        for cls in equiv_classes(occs):
            assert len({o.formula for o in cls}) == 1


class TestOrder:
    def test_negation_above_body(self):
        psi = Eq(Var(0), ZERO)
        keys = [canonical(psi, {0: 1}), canonical(Not(psi), {0: 1})]
        order = subformula_order(keys, 2)
        assert keys[0] in order.closure()[keys[1]]
        assert order.minimal() == [keys[0]]

    @settings(max_examples=30, deadline=None)
    @given(formulas(depth=4))
    def test_transitive_and_irreflexive(self, f):
        gamma = ConstraintSet(tuple(subformulas(f)), value_bound=1)
        keys = [occurrence_key(o) for o in gamma.occurrences()]
        order = subformula_order(keys, 1)
        below = order.closure()
        for k, ks in below.items():
            assert k not in ks
            for c in ks:
                assert below[c] <= ks
        for k in order.minimal():
            assert type(k) is Eq or not order.direct[k]


class TestBuild:
    def test_empty(self):
        s = build_satisfaction(ConstraintSet())
        assert len(s) == 0
        assert s.judge(Eq(ZERO, ZERO)) is UNKNOWN

    def test_negation_of_preserved_truth(self):
        psi = Exists(3, Eq(Var(3), Var(3)))
        gamma = ConstraintSet(comp_instances=(Not(psi),), preservation=((Occurrence(psi), True),))
        s = build_satisfaction(gamma)
        assert s.judge(Not(psi)) is FALSE

    def test_eta_defines_the_set(self):
        gamma = ConstraintSet(a_set={3, 7}, eta_b=2, value_bound=2)
        s = build_satisfaction(gamma)
        eta = eta_at(2)
        assert s.judge_open(eta, {0: 3}) is TRUE
        assert s.judge_open(eta, {0: 4}) is FALSE
        assert s.judge_open(eta, {0: 7}) is TRUE

    def test_eta_prefixes_pinned(self):
        # the prefix below the first quantifier; its matrix stays opaque
        gamma = ConstraintSet(comp_instances=(eta_prefixes(2)[1],), a_set={1}, eta_b=2)
        s = build_satisfaction(gamma)
        report = verify_theta_fragment(s, gamma)
        assert report.ok
        inner = eta_prefixes(2)[1]
        free = sorted(inner._fv - {0})
        assert s.judge_open(inner, {0: 1, **{v: 0 for v in free}}) is TRUE

    def test_clashing_verdicts(self):
        psi = Exists(3, Eq(Var(3), Var(3)))
        gamma = ConstraintSet(preservation=((Occurrence(psi), True), (Occurrence(psi), False)))
        with pytest.raises(InconsistentConstraints):
            build_satisfaction(gamma)

    def test_transparent_eta_clashes_with_a(self):
        eta = eta_at(1)
        gamma = ConstraintSet(comp_instances=tuple(subformulas(eta)), a_set=set(), eta_b=1)
        with pytest.raises(InconsistentConstraints):
            build_satisfaction(gamma)

    def test_base_contradicting_composition(self):
        atom = Eq(ZERO, numeral(1))
        gamma = ConstraintSet(comp_instances=(atom,), base_truth=((Occurrence(atom), True),))
        with pytest.raises(InconsistentConstraints):
            build_satisfaction(gamma)

    def test_verdicts_constant_on_classes(self):
        gamma = random_fragment(random.Random(8))
        s = build_satisfaction(gamma)
        for members, v in zip(s.classes, s.verdicts):
            assert {s.judge_occurrence(o) for o in members} == {TRUE if v else FALSE}

    def test_comp_classes_agree_with_the_domain(self):
        # without eta pins the comp instances are judged as in the finite domain
        psi = parse_formula("E v1. (v0 = (v1 + v1))")
        gamma = ConstraintSet(comp_instances=tuple(subformulas(psi)), value_bound=4)
        s = build_satisfaction(gamma)
        domain = DomainOracle(4)
        for x in range(5):
            assert s.judge_open(psi, {0: x}) is domain.judge_open(psi, {0: x})

    def test_lines_are_sorted(self):
        s = build_satisfaction(random_fragment(random.Random(1)))
        assert s.lines() == sorted(s.lines())
        assert all(line.startswith("CLASS ") for line in s.lines())


class TestVerify:
    @pytest.mark.parametrize("seed", range(20))
    def test_builder_output_verifies(self, seed):
        gamma = random_fragment(random.Random(seed))
        report = verify_theta_fragment(build_satisfaction(gamma), gamma)
        assert report.ok, report.lines()[:5]
        assert report.results["REG1"].checked > 0

    @pytest.mark.parametrize("seed", range(20))
    def test_single_flip_detected(self, seed):
        gamma = random_fragment(random.Random(seed))
        s = build_satisfaction(gamma)
        bad = s.flipped(mutation_target(s, gamma, seed))
        assert not verify_theta_fragment(bad, gamma).ok

    def test_flipping_a_negation(self):
        psi = Eq(Var(0), ZERO)
        gamma = ConstraintSet(comp_instances=(psi, Not(psi)), value_bound=0)
        s = build_satisfaction(gamma)
        i = s.keys.index(canonical(Not(psi), {0: 0}))
        report = verify_theta_fragment(s.flipped(i), gamma)
        assert [v.axiom for v in report.violations] == ["COMP"]


class TestStages:
    @pytest.mark.parametrize("seed", range(10))
    def test_false_verdicts_persist(self, seed):
        rng = random.Random(seed)
        gamma = random_fragment(rng, closed_downward=True)
        s = build_satisfaction(gamma)
        later = next_stage(gamma, s, extra_comp_over(rng, gamma.comp_instances))
        assert falsity_flips(s, build_satisfaction(later)) == []


class TestFragmentFiles:
    TEXT = """
    # a small fragment
    [BOUND]
    1
    [COMP]
    !(v0 = 0)
    [PRESERVE]
    v0 = 0 :: v0=1 :: false
    [BASE]
    0 = 0 :: :: true
    [ETA]
    1
    [A]
    0, 2
    """

    def test_parse(self):
        gamma = parse_fragment(self.TEXT)
        assert gamma.value_bound == 1
        assert gamma.eta_b == 1
        assert gamma.a_set == {0, 2}
        assert gamma.comp_instances == (Not(Eq(Var(0), ZERO)),)
        assert gamma.preservation == ((occ(Eq(Var(0), ZERO), v0=1), False),)

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        gamma = random_fragment(random.Random(seed))
        assert parse_fragment(render_fragment(gamma)) == gamma

    @pytest.mark.parametrize(
        "text, line",
        [
            ("0 = 0", 1),
            ("[COMP]\n(0 = ", 2),
            ("[WHAT]", 1),
            ("[BASE]\nv0 = 0 :: v0=x :: true", 2),
            ("[BASE]\nv0 = 0 :: :: true", 2),
            ("[A]\n1 two", 2),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(FragmentFormatError) as info:
            parse_fragment(text)
        assert info.value.line == line
