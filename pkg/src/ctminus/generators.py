"""Seeded random syntax, sentence fragments and constraint fragments.

Everything here takes a :class:`random.Random` so that experiments and
tests are reproducible from a seed.
"""

from __future__ import annotations

import random
from typing import Sequence

from .evaluation import TRUE, DomainOracle, sentence_closure
from .satclass_builder import (
    ConstraintSet,
    InconsistentConstraints,
    Occurrence,
    build_satisfaction,
    valuations,
)
from .syntax import (
    ZERO,
    Add,
    Eq,
    Exists,
    Formula,
    Mul,
    Not,
    Or,
    Succ,
    Term,
    Var,
    conj,
    disj,
    eta_at,
    neg,
    numeral,
    subformulas,
    substitute,
)


def random_term(rng: random.Random, depth: int, variables: Sequence[int] = ()) -> Term:
    """A term of height at most ``depth`` over ``variables``."""
    if depth <= 0 or rng.random() < 0.3:
        if variables and rng.random() < 0.5:
            return Var(rng.choice(variables))
        return ZERO
    kind = rng.randrange(3)
    if kind == 0:
        return Succ(random_term(rng, depth - 1, variables))
    l = random_term(rng, depth - 1, variables)
    r = random_term(rng, depth - 1, variables)
    return Add(l, r) if kind == 1 else Mul(l, r)


def small_closed_term(rng: random.Random, value: int) -> Term:
    """A closed term with the given value, often not a numeral."""
    shape = rng.randrange(4)
    if shape == 0 or value == 0:
        return Add(numeral(value), ZERO) if shape and value == 0 else numeral(value)
    if shape == 1:
        k = rng.randint(0, value)
        return Add(numeral(k), numeral(value - k))
    if shape == 2:
        return Succ(small_closed_term(rng, value - 1))
    return Mul(numeral(value), numeral(1))


def random_formula(
    rng: random.Random,
    depth: int,
    free: Sequence[int] = (),
    bound_pool: Sequence[int] = (5, 6, 7),
    term_depth: int = 2,
) -> Formula:
    """A kernel formula of nesting height at most ``depth`` whose free
    variables lie in ``free``; quantifiers bind variables from ``bound_pool``."""
    if depth <= 1 or rng.random() < 0.2:
        return Eq(random_term(rng, term_depth, free), random_term(rng, term_depth, free))
    kind = rng.randrange(4)
    if kind == 0:
        return Not(random_formula(rng, depth - 1, free, bound_pool, term_depth))
    if kind == 1:
        return Or(
            random_formula(rng, depth - 1, free, bound_pool, term_depth),
            random_formula(rng, depth - 1, free, bound_pool, term_depth),
        )
    if kind == 2:
        return conj(
            random_formula(rng, depth - 2, free, bound_pool, term_depth),
            random_formula(rng, depth - 2, free, bound_pool, term_depth),
        ) if depth > 2 else Not(random_formula(rng, depth - 1, free, bound_pool, term_depth))
    v = rng.choice(bound_pool)
    inner_free = tuple(dict.fromkeys(tuple(free) + (v,)))
    return Exists(v, random_formula(rng, depth - 1, inner_free, bound_pool, term_depth))


def random_sequence(rng: random.Random, length: int, max_value: int = 10**6) -> list:
    return [rng.randint(0, max_value) for _ in range(length)]


# ---------------------------------------------------------------------------
# bounded sentences


def bounded_sentence(
    rng: random.Random, depth: int, outer: Sequence[int] = (), max_guard: int = 3
) -> Formula:
    """A sentence (given values for ``outer``) in which every quantifier is
    guarded: ``E v. ((E w. v + w = t) & body)`` with ``t`` a small closed
    term or an outer variable plus a constant.  Closed terms are often
    written as non-numerals so that regularity has something to compare."""

    def term(d):
        if d <= 0 or rng.random() < 0.35:
            if outer and rng.random() < 0.5:
                return Var(rng.choice(outer))
            return small_closed_term(rng, rng.randint(0, 3))
        k = rng.randrange(3)
        if k == 0:
            return Succ(term(d - 1))
        return (Add if k == 1 else Mul)(term(d - 1), term(d - 1))

    if depth <= 1 or rng.random() < 0.2:
        return Eq(term(2), term(2))
    kind = rng.randrange(4)
    if kind == 0:
        return Not(bounded_sentence(rng, depth - 1, outer, max_guard))
    if kind == 1:
        return Or(
            bounded_sentence(rng, depth - 1, outer, max_guard),
            bounded_sentence(rng, depth - 1, outer, max_guard),
        )
    if kind == 2 and depth > 2:
        return conj(
            bounded_sentence(rng, depth - 2, outer, max_guard),
            bounded_sentence(rng, depth - 2, outer, max_guard),
        )
    v = 10 + len(outer)
    w = 50 + len(outer)
    if outer and rng.random() < 0.3:
        limit = Add(Var(rng.choice(outer)), numeral(rng.randint(0, 1)))
    else:
        limit = small_closed_term(rng, rng.randint(0, max_guard))
    guard = Exists(w, Eq(Add(Var(v), Var(w)), limit))
    return Exists(v, conj(guard, bounded_sentence(rng, depth - 2, tuple(outer) + (v,), max_guard)))


def bounded_fragment(rng: random.Random, size: int, instance_bound: int, depth: int = 5) -> list:
    """A subformula-closed list of at least ``size`` bounded sentences
    (children first), built from random roots."""
    roots: list = []
    out: list = []
    while len(out) < size:
        roots.append(bounded_sentence(rng, depth))
        out = sentence_closure(roots, instance_bound)
    return out


# ---------------------------------------------------------------------------
# constraint fragments


def _opaque_subformulas(f: Formula, opaque: frozenset) -> list:
    """Subformulas of ``f``, not descending into formulas in ``opaque``."""
    out, seen, work = [], set(), [f]
    while work:
        g = work.pop()
        if g in seen:
            continue
        seen.add(g)
        out.append(g)
        if g in opaque:
            continue
        if type(g) is Not or type(g) is Exists:
            work.append(g.body)
        elif type(g) is Or:
            work.extend((g.left, g.right))
    return out


def _occurrence_count(gamma: ConstraintSet) -> int:
    return len(gamma.occurrences())


def random_fragment(
    rng: random.Random,
    *,
    max_occurrences: int = 200,
    max_depth: int = 6,
    max_b: int = 4,
    value_bound: int = 2,
    closed_downward: bool = False,
    roots: int = 4,
    tries: int = 50,
) -> ConstraintSet:
    """A fragment on which :func:`build_satisfaction` succeeds.

    Random roots with free variables among ``v0, v1`` and nesting at most
    ``max_depth`` are mixed with formulas wrapping ``eta_b`` (``b`` at most
    ``max_b``, kept opaque).  Comp instances are all subformulas of the roots
    when ``closed_downward``, else a random part of them.  Base truth is
    taken from the domain oracle on ``0..value_bound`` for occurrences whose
    every subformula is a comp instance, so it agrees with what the builder
    computes.  Candidates that the builder rejects are redrawn.
    """
    for _ in range(tries):
        b = rng.randint(1, max_b)
        eta = eta_at(b)
        a_set = frozenset(x for x in range(value_bound + 3) if rng.random() < 0.5)
        formulas = [
            random_formula(rng, rng.randint(1, max_depth), free=rng.choice([(), (0,), (0, 1)]))
            for _ in range(roots)
        ]
        wrappers = [
            rng.choice([neg(eta), disj(eta, formulas[0]), Exists(0, eta), conj(formulas[-1], eta)])
        ]
        opaque = frozenset([eta])
        tops = formulas + wrappers
        keep: dict = {}
        while tops:
            subs = []
            for f in tops:
                subs.extend(_opaque_subformulas(f, opaque))
            # trimming drops whole roots so that closure under subformulas survives
            comp = [g for g in dict.fromkeys(subs) if closed_downward or keep.setdefault(g, rng.random() < 0.7)]
            gamma = ConstraintSet(tuple(comp), (), (), a_set, b, value_bound)
            if comp and _occurrence_count(gamma) <= max_occurrences:
                break
            tops.pop(rng.randrange(len(tops)))
        if not tops:
            continue
        comp_set = set(comp)
        domain = DomainOracle(value_bound)
        base = []
        for f in comp:
            if eta in subformulas(f) or not all(g in comp_set for g in subformulas(f)):
                continue
            for a in valuations(f, value_bound):
                if rng.random() < 0.3:
                    base.append((Occurrence(f, a), domain.judge_open(f, a) is TRUE))
        gamma = ConstraintSet(tuple(comp), (), tuple(base), a_set, b, value_bound)
        try:
            build_satisfaction(gamma)
        except InconsistentConstraints:
            continue
        return gamma
    raise RuntimeError("no consistent fragment found; loosen the parameters")


def extra_comp_over(rng: random.Random, previous: Sequence[Formula], count: int = 3) -> list:
    """New formulas built on top of earlier comp instances."""
    out = []
    for _ in range(count):
        f = rng.choice(list(previous))
        k = rng.randrange(4)
        if k == 0:
            out.append(neg(f))
        elif k == 1:
            out.append(disj(f, random_formula(rng, 2, free=tuple(sorted(f._fv)))))
        elif k == 2:
            out.append(Exists(rng.choice(sorted(f._fv) or [0]), f))
        else:
            out.append(conj(rng.choice(list(previous)), f))
    return out

