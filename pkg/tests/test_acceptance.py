"""End-to-end acceptance checks, one test per criterion.

Each test carries a ``criterion`` marker; ``conftest.py`` prints a
PASS/FAIL line for every criterion at the end of the run.  Time limits are
measured with ``time.perf_counter`` around the work itself.
"""

import random
import time

import pytest

from ctminus.evaluation import (
    TRUE,
    Budget,
    DomainOracle,
    PropositionalOracle,
    StandardModelOracle,
    TableOracle,
    check_ct_axioms,
    eval_prop,
)
from ctminus.generators import (
    bounded_fragment,
    extra_comp_over,
    random_formula,
    random_fragment,
    random_sequence,
    random_term,
)
from ctminus.goedel import decode_formula, decode_seq, decode_term, encode_formula, encode_seq, encode_term
from ctminus.rank_lab import (
    INFINITY,
    Finite,
    build_alpha_p,
    build_beta_utb,
    check_rank_trajectory,
    ext_oracle,
    ext_stop_condition,
    gamma_sequence_ext,
    gamma_sequence_p,
    ge_type,
    p_rank,
    utb_rank,
)
from ctminus.satclass_builder import (
    build_satisfaction,
    falsity_flips,
    mutation_target,
    next_stage,
    verify_theta_fragment,
)
from ctminus.stopping_disjunction import (
    atom_sentences,
    build_naive_disjunction,
    least_true_index,
    naive_counterexample,
    sweep,
)
from ctminus.syntax import eta_at, height, numeral, parse_formula, render, substitute, syntactic_depth


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


@pytest.mark.criterion(1)
def test_stop_disjunction_selects_the_first_true_alpha():
    with Clock() as clock:
        results = [sweep(c) for c in range(5)]
    selected = sum(r.selected for r in results)
    failures = sum(len(r.failures) for r in results)
    assert selected == sum(4 ** (c + 1) - 2 ** (c + 1) for c in range(5))
    assert failures == 0
    assert clock.seconds < 5


@pytest.mark.criterion(2)
def test_stop_disjunction_is_false_without_a_true_alpha():
    with Clock() as clock:
        results = [sweep(c) for c in range(5)]
    assert sum(r.all_false for r in results) == sum(2 ** (c + 1) for c in range(5))
    # failures cover both kinds of assignment; none at all means every all-false case is false
    assert all(r.ok for r in results)
    assert clock.seconds < 5


@pytest.mark.criterion(3)
def test_naive_disjunction_has_a_checked_counterexample():
    c, abits, bbits = naive_counterexample()
    alphas, betas = atom_sentences(c)
    table = dict(zip(alphas, abits))
    table.update(zip(betas, bbits))
    k = least_true_index(alphas, PropositionalOracle(table))
    assert k is not None
    assert eval_prop(build_naive_disjunction(alphas, betas), table) != table[betas[k]]


@pytest.mark.criterion(4)
def test_eta_depth():
    with Clock() as clock:
        depths = [syntactic_depth(eta_at(b)) for b in range(1, 65)]
    assert depths == [2 * b + 2 for b in range(1, 65)]
    assert clock.seconds < 1


@pytest.mark.criterion(5)
def test_type_rank_rises_along_gamma():
    p = ge_type(32)
    o = DomainOracle(256)
    with Clock() as clock:
        for d in range(9):
            ranks = [p_rank(g, p, o, 256) for g in gamma_sequence_p(p, d)]
            verdict = check_rank_trajectory(ranks)
            assert verdict.kind != "violation", (d, [str(r) for r in ranks])
    assert clock.seconds < 10


@pytest.mark.criterion(6)
def test_true_alpha_bounds_the_type_rank():
    p = ge_type(8)
    o = DomainOracle(40)
    rng = random.Random(6)
    pairs = 0
    while pairs < 50:
        lo = rng.randint(0, 12)
        hi = rng.randint(lo, 16)
        n = rng.randint(0, 7)
        width, low = render(numeral(hi - lo)), render(numeral(lo))
        psi = parse_formula(f"E v1. (E v2. (v1 + v2) = {width} & v0 = (v1 + {low}))")
        if o.judge(build_alpha_p(n, psi, p)) is not TRUE:
            continue
        pairs += 1
        assert p_rank(psi, p, o, 40) <= Finite(n), (render(psi), n)


@pytest.mark.criterion(7)
def test_goedel_round_trips():
    rng = random.Random(7)
    terms, formulas = [], []
    while len(terms) < 500:
        t = random_term(rng, rng.randint(0, 8), (0, 1, 2))
        if height(t) <= 8:
            terms.append(t)
    while len(formulas) < 500:
        f = random_formula(rng, rng.randint(1, 8), free=(0, 1))
        if height(f) <= 8:
            formulas.append(f)
    seqs = [random_sequence(rng, rng.randint(0, 20), 10**12) for _ in range(500)]
    with Clock() as clock:
        assert all(decode_term(encode_term(t)) is t for t in terms)
        assert all(decode_formula(encode_formula(f)) is f for f in formulas)
        assert all(decode_seq(encode_seq(xs)) == xs for xs in seqs)
    assert clock.seconds < 5


@pytest.mark.criterion(8)
def test_standard_model_satisfies_the_truth_axioms():
    with Clock() as clock:
        fragment = bounded_fragment(random.Random(8), 300, instance_bound=6)
        report = check_ct_axioms(StandardModelOracle(Budget(witness_bound=6)), fragment, instance_bound=6)
    assert len(fragment) >= 300
    assert report.results["5"].checked >= 50
    assert report.ok, report.lines()
    assert clock.seconds < 30


@pytest.mark.criterion(9)
def test_built_classes_verify_and_mutations_are_caught():
    with Clock() as clock:
        for seed in range(100):
            gamma = random_fragment(random.Random(seed))
            assert len(gamma.occurrences()) <= 200
            s = build_satisfaction(gamma)
            assert verify_theta_fragment(s, gamma).ok, seed
            bad = s.flipped(mutation_target(s, gamma, seed))
            assert not verify_theta_fragment(bad, gamma).ok, seed
    assert clock.seconds < 60


@pytest.mark.criterion(10)
def test_false_verdicts_survive_the_next_stage():
    for seed in range(50):
        rng = random.Random(1000 + seed)
        gamma = random_fragment(rng, closed_downward=True)
        s = build_satisfaction(gamma)
        later = next_stage(gamma, s, extra_comp_over(rng, gamma.comp_instances))
        assert falsity_flips(s, build_satisfaction(later)) == [], seed


@pytest.mark.criterion(11)
def test_gamma_ext_collapses_to_the_selected_eta():
    a = list(range(1, 16))
    b = [28 - k for k in a]
    c = 13
    o = ext_oracle(a, b, 28)
    gammas = gamma_sequence_ext(a, c, 7)
    for d in range(7):
        stops = [ext_stop_condition(i, gammas[d], a) for i in range(c + 1)]
        k = next(i for i in range(c + 1) if o.judge(stops[i]) is TRUE)
        for x in range(29):
            etas = [substitute(eta_at(a[i + 1]), {0: numeral(x)}) for i in range(c + 1)]
            true_etas = [e for i, e in enumerate(etas) if x == b[i + 1]]
            table_oracle = TableOracle([s for s in stops if o.judge(s) is TRUE] + true_etas)
            atoms = {s: table_oracle.judge(s) is TRUE for s in stops + etas}
            closed = substitute(gammas[d + 1], {0: numeral(x)})
            assert eval_prop(closed, atoms) == atoms[etas[k]], (d, x)


@pytest.mark.criterion(12)
def test_utb_rank_of_beta():
    o = DomainOracle(64)
    for n in range(4):
        r = utb_rank(build_beta_utb(n), o, check_bound=64)
        assert r == INFINITY or r >= Finite(n + 1), (n, str(r))
