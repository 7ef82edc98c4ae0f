"""Disjunctions with stopping conditions.

For sentences ``a_lo..a_hi`` and formulas ``b_lo..b_hi`` the combinator is
built backwards from the last index::

    D_hi = a_hi & b_hi
    D_i  = (a_i -> b_i) & ((a_i & b_i) | (!a_i & D_{i+1}))

Under any compositional truth predicate ``D_lo`` is equivalent to
``b_k`` where ``k`` is the least index whose ``a_k`` is true; when no
``a_i`` is true, ``D_lo`` is false.  The naive left-grouped disjunction of
``a_i & b_i`` is kept as a foil: it does not have this property.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .evaluation import (
    FALSE,
    TRUE,
    UNKNOWN,
    PropositionalOracle,
    TruthOracle,
    Verdict,
)
from .syntax import Formula, big_or, conj, disj, implies, neg, placeholder, render


class SpecInvariantViolation(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class UndecidedPrefix(RuntimeError):
    """An Unknown verdict comes before the first True one."""


@dataclass(frozen=True)
class StopDisjSpec:
    alphas: tuple
    betas: tuple
    lo: int
    hi: int

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        object.__setattr__(self, "betas", tuple(self.betas))
        n = self.hi + 1
        if len(self.alphas) != n or len(self.betas) != n:
            raise SpecInvariantViolation(
                f"need {n} alphas and betas, got {len(self.alphas)} and {len(self.betas)}"
            )
        if not 0 <= self.lo <= self.hi:
            raise SpecInvariantViolation(f"bad index range {self.lo}..{self.hi}")
        for i, a in enumerate(self.alphas):
            if a._fv:
                raise SpecInvariantViolation(f"alpha {i} is not a sentence: {render(a, 80)}")

    @classmethod
    def full(cls, alphas: Sequence[Formula], betas: Sequence[Formula]) -> "StopDisjSpec":
        """A spec covering every index from 0 to the last."""
        return cls(tuple(alphas), tuple(betas), 0, len(alphas) - 1)


def build_stop_disjunction(spec: StopDisjSpec) -> Formula:
    acc = conj(spec.alphas[spec.hi], spec.betas[spec.hi])
    for i in range(spec.hi - 1, spec.lo - 1, -1):
        a, b = spec.alphas[i], spec.betas[i]
        acc = conj(implies(a, b), disj(conj(a, b), conj(neg(a), acc)))
    return acc


def stop_disjunction(alphas: Sequence[Formula], betas: Sequence[Formula]) -> Formula:
    return build_stop_disjunction(StopDisjSpec.full(alphas, betas))


def build_naive_disjunction(alphas: Sequence[Formula], betas: Sequence[Formula]) -> Formula:
    if len(alphas) != len(betas):
        raise LengthMismatch(f"{len(alphas)} alphas but {len(betas)} betas")
    if not alphas:
        raise LengthMismatch("empty sequences")
    return big_or(conj(a, b) for a, b in zip(alphas, betas))


def least_true_index(alphas: Sequence[Formula], o: TruthOracle) -> Optional[int]:
    for i, a in enumerate(alphas):
        v = o.judge(a)
        if v is TRUE:
            return i
        if v is UNKNOWN:
            raise UndecidedPrefix(f"alpha {i} is undecided")
    return None


def selected_index(spec: StopDisjSpec, o: TruthOracle) -> Optional[int]:
    """The least ``k`` in ``lo..hi`` with ``alpha_k`` true, or None."""
    k = least_true_index(spec.alphas[spec.lo : spec.hi + 1], o)
    return None if k is None else k + spec.lo


def verify_stop_property(spec: StopDisjSpec, o: TruthOracle) -> bool:
    """Whether the built disjunction gets the verdict of ``beta_k`` for the least true ``alpha_k``.

    When every ``alpha`` is false the expected verdict is False.  For an
    open disjunction the comparison is made on the sentences obtained by the
    same closed substitution, which the caller should perform first.
    """
    k = selected_index(spec, o)
    got = o.judge(build_stop_disjunction(spec))
    if k is None:
        return got is FALSE
    return got is o.judge(spec.betas[k])


# ---------------------------------------------------------------------------
# truth-table sweeps


def atom_sentences(c: int):
    """Opaque sentences ``(alphas, betas)`` for indices ``0..c``."""
    alphas = [placeholder(2 * i) for i in range(c + 1)]
    betas = [placeholder(2 * i + 1) for i in range(c + 1)]
    return alphas, betas


@dataclass(frozen=True)
class SweepResult:
    c: int
    assignments: int
    selected: int
    all_false: int
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures


def sweep(c: int, builder=build_stop_disjunction, assignments=None) -> SweepResult:
    """Check the stopping property for every (or each given) truth assignment.

    An assignment is a pair of bit tuples ``(alpha_bits, beta_bits)``.  For
    assignments with a true alpha the built formula must agree with
    ``beta_k``; otherwise it must be false.  ``builder`` receives a
    :class:`StopDisjSpec`, which allows running the naive foil through the
    same harness.
    """
    alphas, betas = atom_sentences(c)
    spec = StopDisjSpec.full(alphas, betas)
    formula = builder(spec)
    if assignments is None:
        bits = list(itertools.product((False, True), repeat=c + 1))
        assignments = itertools.product(bits, bits)
    total = selected = all_false = 0
    failures = []
    for abits, bbits in assignments:
        table = dict(zip(alphas, abits))
        table.update(zip(betas, bbits))
        o = PropositionalOracle(table)
        k = least_true_index(alphas, o)
        got = o.judge(formula)
        want = FALSE if k is None else Verdict.of(bbits[k])
        total += 1
        if k is None:
            all_false += 1
        else:
            selected += 1
        if got is not want:
            failures.append((abits, bbits))
    return SweepResult(c, total, selected, all_false, tuple(failures))


def random_assignments(c: int, count: int, seed: int):
    rng = random.Random(seed)
    for _ in range(count):
        yield (
            tuple(rng.random() < 0.5 for _ in range(c + 1)),
            tuple(rng.random() < 0.5 for _ in range(c + 1)),
        )


def naive_spec_builder(spec: StopDisjSpec) -> Formula:
    return build_naive_disjunction(spec.alphas, spec.betas)


def naive_counterexample(max_c: int = 4):
    """The first assignment (by ``c``, then truth-table order) on which the
    naive disjunction disagrees with ``beta_k``, as ``(c, alpha_bits, beta_bits)``."""
    for c in range(max_c + 1):
        res = sweep(c, naive_spec_builder)
        if res.failures:
            abits, bbits = res.failures[0]
            return c, abits, bbits
    return None
