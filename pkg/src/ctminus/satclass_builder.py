"""Finite satisfaction classes built from a constraint fragment.

A fragment lists formulas whose compositional clauses must hold, verdicts
carried over from an earlier stage, verdicts forced by a base truth
predicate, and a set ``A`` that ``eta_b`` has to define.  The builder groups
occurrences ``(formula, valuation)`` into classes of the relation "the
closed instances differ only in closed terms of equal value", orders the
classes by the direct-subformula relation, pins the classes that the
fragment or ``A`` decides, and fills in the rest bottom-up with the
compositional clauses.

Every class is named by a canonical sentence: the closed instance with
each maximal closed subterm replaced by :func:`~ctminus.syntax.const_term`
of its value.  Two occurrences are equivalent exactly when their canonical
sentences coincide, and since nodes are interned the comparison is O(1).

Quantifiers range over ``0..value_bound``.  The builder and the verifier use
the same bound, so the finite fragment is closed under every witness the
existential clause asks about.
"""

from __future__ import annotations

import graphlib
import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .evaluation import (
    FALSE,
    TRUE,
    UNKNOWN,
    CtReport,
    TruthOracle,
    Verdict,
    _compare,
    eval_term,
)
from .syntax import (
    ZERO,
    Add,
    Eq,
    Exists,
    Formula,
    InadmissibleValuation,
    Mul,
    Not,
    Or,
    Succ,
    Term,
    Var,
    apply_valuation,
    const_term,
    eta_at,
    eta_prefixes,
    parse_formula,
    render,
    substitute,
)


class InconsistentConstraints(ValueError):
    """The fragment forces two different verdicts on one class."""


class CyclicOrder(RuntimeError):
    """The subformula order on classes has a cycle (cannot happen for finite syntax)."""


class FragmentFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# ---------------------------------------------------------------------------
# occurrences


@dataclass(frozen=True)
class Occurrence:
    """A formula with a valuation, restricted to the formula's free variables.

    The constructor accepts any mapping covering the free variables and
    drops the other entries, so ``(phi, a)`` and ``(phi, a | extra)`` are the
    same occurrence.
    """

    formula: Formula
    valuation: tuple = ()

    def __post_init__(self):
        raw = dict(self.valuation)
        fv = self.formula._fv
        missing = fv - raw.keys()
        if missing:
            raise InadmissibleValuation(
                f"no value for {sorted(missing)} in {render(self.formula, 80)}"
            )
        for v in fv:
            x = raw[v]
            if type(x) is not int or x < 0:
                raise InadmissibleValuation(f"value of v{v} must be a natural, got {x!r}")
        object.__setattr__(self, "valuation", tuple(sorted((v, raw[v]) for v in fv)))

    @property
    def env(self) -> dict:
        return dict(self.valuation)

    def closed(self) -> Formula:
        """The sentence ``formula[valuation]`` (numerals for free variables)."""
        return apply_valuation(self.formula, self.env)

    def describe(self) -> str:
        vals = ",".join(f"v{v}={x}" for v, x in self.valuation)
        return f"{render(self.formula)} :: {vals}"


def valuations(f: Formula, bound: int):
    """Every valuation of the free variables of ``f`` into ``0..bound``."""
    fv = sorted(f._fv)
    for values in itertools.product(range(bound + 1), repeat=len(fv)):
        yield dict(zip(fv, values))


# ---------------------------------------------------------------------------
# the equivalence of occurrences


def _canon_term(t: Term, env: Mapping[int, int]) -> Term:
    if t._vars <= env.keys():
        return const_term(eval_term(t, env))
    tt = type(t)
    if tt is Var:
        return t
    if tt is Succ:
        return Succ(_canon_term(t.arg, env))
    if tt is Add:
        return Add(_canon_term(t.left, env), _canon_term(t.right, env))
    return Mul(_canon_term(t.left, env), _canon_term(t.right, env))


def canonical(f: Formula, env: Optional[Mapping[int, int]] = None) -> Formula:
    """The canonical sentence of the occurrence ``(f, env)``.

    ``env`` must cover the free variables of ``f``.  Each maximal subterm
    that is closed once ``env`` is plugged in becomes ``const_term`` of its
    value.
    """
    env = {} if env is None else env
    missing = f._fv - env.keys()
    if missing:
        raise InadmissibleValuation(f"no value for {sorted(missing)}")
    return _canonical(f, tuple(sorted((v, env[v]) for v in f._fv)))


@lru_cache(maxsize=1 << 16)
def _canonical(f: Formula, items: tuple) -> Formula:
    env = dict(items)
    tf = type(f)
    if tf is Eq:
        return Eq(_canon_term(f.left, env), _canon_term(f.right, env))
    if tf is Not:
        return Not(_canonical(f.body, _restrict(items, f.body)))
    if tf is Or:
        return Or(_canonical(f.left, _restrict(items, f.left)), _canonical(f.right, _restrict(items, f.right)))
    return Exists(f.var, _canonical(f.body, tuple((v, x) for v, x in items if v != f.var)))


def _restrict(items: tuple, f: Formula) -> tuple:
    fv = f._fv
    return tuple(p for p in items if p[0] in fv)


@lru_cache(maxsize=1 << 16)
def occurrence_key(o: Occurrence) -> Formula:
    return canonical(o.formula, o.env)


def _anti_unify_terms(s: Term, t: Term, pairs: list) -> bool:
    if s is t:
        return True
    if not s._vars and not t._vars:
        pairs.append((s._value, t._value))
        return True
    ts = type(s)
    if ts is not type(t):
        return False
    if ts is Var:
        return False  # distinct variables
    if ts is Succ:
        return _anti_unify_terms(s.arg, t.arg, pairs)
    return _anti_unify_terms(s.left, t.left, pairs) and _anti_unify_terms(s.right, t.right, pairs)


def _anti_unify(f: Formula, g: Formula, pairs: list) -> bool:
    if f is g:
        return True
    tf = type(f)
    if tf is not type(g):
        return False
    if tf is Eq:
        return _anti_unify_terms(f.left, g.left, pairs) and _anti_unify_terms(
            f.right, g.right, pairs
        )
    if tf is Not:
        return _anti_unify(f.body, g.body, pairs)
    if tf is Or:
        return _anti_unify(f.left, g.left, pairs) and _anti_unify(f.right, g.right, pairs)
    return f.var == g.var and _anti_unify(f.body, g.body, pairs)


def occurrence_equiv_step(a: Occurrence, b: Occurrence) -> bool:
    """Whether the closed instances differ only in closed terms of equal value.

    Decided by anti-unification of the two sentences: mismatches are allowed
    only where both sides are closed terms, and the mismatched terms must
    agree in value pointwise.  This does not use :func:`canonical`, which
    makes it a useful cross-check on the class computation.
    """
    pairs: list = []
    if not _anti_unify(a.closed(), b.closed(), pairs):
        return False
    return all(x == y for x, y in pairs)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def equiv_classes(occs: Iterable[Occurrence], pairwise: bool = False) -> list:
    """Partition ``occs`` under the transitive closure of the equivalence step.

    Classes come out in order of their first member, members in input order,
    duplicates dropped.  With ``pairwise`` the closure is computed from
    :func:`occurrence_equiv_step` on every pair (quadratic, for
    cross-checking); otherwise occurrences are bucketed by canonical key.
    """
    items = list(dict.fromkeys(occs))
    uf = _UnionFind(len(items))
    if pairwise:
        for i, j in itertools.combinations(range(len(items)), 2):
            if occurrence_equiv_step(items[i], items[j]):
                uf.union(i, j)
    else:
        first: dict = {}
        for i, o in enumerate(items):
            uf.union(first.setdefault(occurrence_key(o), i), i)
    groups: dict = {}
    for i, o in enumerate(items):
        groups.setdefault(uf.find(i), []).append(o)
    return [tuple(g) for _, g in sorted(groups.items())]


# ---------------------------------------------------------------------------
# the subformula order on classes


@lru_cache(maxsize=1 << 16)
def child_keys(key: Formula, value_bound: int) -> tuple:
    """Canonical sentences of the occurrences a compositional clause consults."""
    tk = type(key)
    if tk is Eq:
        return ()
    if tk is Not:
        return (key.body,)
    if tk is Or:
        return (key.left, key.right) if key.left is not key.right else (key.left,)
    body = key.body
    if key.var not in body._fv:
        return (body,)
    return tuple(dict.fromkeys(canonical(body, {key.var: x}) for x in range(value_bound + 1)))


@dataclass(frozen=True)
class SubformulaOrder:
    """Direct-subformula edges between classes, named by canonical sentence.

    ``direct[k]`` holds the classes in the fragment that a clause for ``k``
    consults.  The relation is acyclic because each edge strictly lowers the
    formula size.
    """

    nodes: tuple
    direct: Mapping

    def topological(self) -> list:
        """Classes ordered so that every class follows the ones below it."""
        ts = graphlib.TopologicalSorter({k: self.direct[k] for k in self.nodes})
        try:
            order = list(ts.static_order())
        except graphlib.CycleError as e:
            raise CyclicOrder(str(e)) from e
        return order

    def closure(self) -> dict:
        """For each class, every class strictly below it."""
        below: dict = {}
        for k in self.topological():
            acc = set()
            for c in self.direct[k]:
                acc.add(c)
                acc |= below[c]
            below[k] = frozenset(acc)
        return below

    def minimal(self) -> list:
        return [k for k in self.nodes if not self.direct[k]]


def subformula_order(keys: Iterable[Formula], value_bound: int) -> SubformulaOrder:
    nodes = tuple(dict.fromkeys(keys))
    present = set(nodes)
    direct = {k: frozenset(c for c in child_keys(k, value_bound) if c in present) for k in nodes}
    order = SubformulaOrder(nodes, direct)
    order.topological()  # raises on a cycle
    return order


# ---------------------------------------------------------------------------
# constraint fragments


@dataclass(frozen=True)
class ConstraintSet:
    """A finite fragment of the stage theory.

    ``comp_instances`` are formulas whose compositional clauses must hold
    for every valuation into ``0..value_bound``.  ``preservation`` and
    ``base_truth`` hold ``(Occurrence, bool)`` pairs.  ``eta_b`` is the
    ``b`` of ``eta_b`` (None when no set is to be defined) and ``a_set`` the
    set it must define.
    """

    comp_instances: tuple = ()
    preservation: tuple = ()
    base_truth: tuple = ()
    a_set: frozenset = frozenset()
    eta_b: Optional[int] = None
    value_bound: int = 2

    def __post_init__(self):
        object.__setattr__(self, "comp_instances", tuple(dict.fromkeys(self.comp_instances)))
        object.__setattr__(self, "preservation", tuple(self.preservation))
        object.__setattr__(self, "base_truth", tuple(self.base_truth))
        object.__setattr__(self, "a_set", frozenset(self.a_set))
        if self.value_bound < 0:
            raise ValueError("value_bound must be a natural")
        if self.eta_b is not None and self.eta_b < 1:
            raise ValueError("eta_b must be at least 1")
        if any(type(x) is not int or x < 0 for x in self.a_set):
            raise ValueError("a_set must contain naturals")

    def eta_points(self) -> range:
        """The ``x`` for which the fragment states ``x in A <-> S(eta_b(x))``."""
        top = max([self.value_bound] + [x + 1 for x in self.a_set])
        return range(top + 1)

    def eta_occurrences(self) -> list:
        if self.eta_b is None:
            return []
        f = eta_at(self.eta_b)
        return [Occurrence(f, {0: x}) for x in self.eta_points()]

    def comp_occurrences(self) -> list:
        return [
            Occurrence(f, a) for f in self.comp_instances for a in valuations(f, self.value_bound)
        ]

    def occurrences(self) -> list:
        """Every occurrence the fragment mentions, including the ones its
        compositional clauses consult."""
        out = []
        for o in self.comp_occurrences():
            out.append(o)
            out.extend(_child_occurrences(o, self.value_bound))
        out.extend(o for o, _ in self.preservation)
        out.extend(o for o, _ in self.base_truth)
        out.extend(self.eta_occurrences())
        return list(dict.fromkeys(out))


def _child_occurrences(o: Occurrence, bound: int) -> list:
    f, env = o.formula, o.env
    tf = type(f)
    if tf is Eq:
        return []
    if tf is Not:
        return [Occurrence(f.body, env)]
    if tf is Or:
        return [Occurrence(f.left, env), Occurrence(f.right, env)]
    if f.var not in f.body._fv:
        return [Occurrence(f.body, env)]
    return [Occurrence(f.body, {**env, f.var: x}) for x in range(bound + 1)]


# ---------------------------------------------------------------------------
# eta_b and its quantifier prefixes


class _EtaMatcher:
    """Recognizes canonical sentences of the shape ``P_k`` under a valuation.

    ``P_0 = eta_b`` and ``P_{k+1}`` strips one quantifier, down to the
    matrix ``P_b``.  The value at ``v0`` is reported; the other free
    variables of ``P_k`` (``x0`` and the stripped ``x_i``) may take any
    value, since their atoms are reflexive equations.
    """

    def __init__(self, b: int):
        self.patterns = eta_prefixes(b)
        self.shapes = {(p._size, p._sd) for p in self.patterns}
        self._hits: dict = {}

    def value(self, key: Formula) -> Optional[int]:
        """``x`` when ``key`` is some prefix at ``v = x``, else None."""
        if (key._size, key._sd) not in self.shapes:
            return None
        if key in self._hits:
            return self._hits[key]
        found = None
        for p in self.patterns:
            if p._size == key._size:
                got = _match(p, key)
                if got is not None:
                    found = got
                    break
        self._hits[key] = found
        return found


def _match_term(p: Term, t: Term, free: frozenset, seen: dict) -> bool:
    if p is t:
        return True
    tp = type(p)
    if tp is Var and p.index in free:
        if t._vars:
            return False
        return seen.setdefault(p.index, t._value) == t._value
    if tp is not type(t) or tp is Var or tp is type(ZERO):
        return False
    if tp is Succ:
        return _match_term(p.arg, t.arg, free, seen)
    return _match_term(p.left, t.left, free, seen) and _match_term(p.right, t.right, free, seen)


def _match(p: Formula, f: Formula) -> Optional[int]:
    """The value bound to ``v0`` when ``f`` is ``p`` with its free variables
    replaced by closed terms (one value per variable), else None."""
    seen: dict = {}

    def go(p, f, free):
        tp = type(p)
        if tp is not type(f):
            return False
        if tp is Eq:
            return _match_term(p.left, f.left, free, seen) and _match_term(
                p.right, f.right, free, seen
            )
        if tp is Not:
            return go(p.body, f.body, free)
        if tp is Or:
            return go(p.left, f.left, free) and go(p.right, f.right, free)
        return p.var == f.var and go(p.body, f.body, free - {p.var})

    if not go(p, f, p._fv) or 0 not in seen:
        return None
    return seen[0]


# ---------------------------------------------------------------------------
# the assignment


@dataclass(frozen=True)
class SatAssignment(TruthOracle):
    """Verdicts on the classes of a fragment.

    ``keys[i]`` is the canonical sentence of ``classes[i]`` and
    ``verdicts[i]`` its verdict.  As a :class:`TruthOracle` it answers for
    sentences (and open formulas with a valuation) whose class is in the
    fragment and returns Unknown elsewhere.
    """

    keys: tuple
    classes: tuple
    verdicts: tuple
    order: SubformulaOrder
    value_bound: int
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not len(self.keys) == len(self.classes) == len(self.verdicts):
            raise ValueError("keys, classes and verdicts must align")
        object.__setattr__(self, "_index", {k: i for i, k in enumerate(self.keys)})

    def __len__(self) -> int:
        return len(self.keys)

    def verdict_of(self, key: Formula) -> Optional[bool]:
        i = self._index.get(key)
        return None if i is None else self.verdicts[i]

    def judge(self, s: Formula) -> Verdict:
        return self.judge_open(s, {})

    def judge_open(self, f: Formula, env: Mapping[int, int]) -> Verdict:
        v = self.verdict_of(canonical(f, env))
        return UNKNOWN if v is None else Verdict.of(v)

    def judge_occurrence(self, o: Occurrence) -> Verdict:
        return self.judge_open(o.formula, o.env)

    def occurrence_verdicts(self) -> list:
        """``(Occurrence, bool)`` for every member of every class."""
        return [(o, v) for members, v in zip(self.classes, self.verdicts) for o in members]

    def flipped(self, i: int) -> "SatAssignment":
        """A copy with the verdict of class ``i`` negated."""
        vs = list(self.verdicts)
        vs[i] = not vs[i]
        return SatAssignment(self.keys, self.classes, tuple(vs), self.order, self.value_bound)

    def lines(self) -> list:
        """``CLASS <sentence> -> true|false`` lines in sorted order."""
        rows = [
            f"CLASS {render(k)} -> {'true' if v else 'false'}"
            for k, v in zip(self.keys, self.verdicts)
        ]
        return sorted(rows)


def _compose(key: Formula, child: Mapping[Formula, bool], bound: int) -> bool:
    tk = type(key)
    if tk is Eq:
        return key.left._value == key.right._value
    if tk is Not:
        return not child[key.body]
    if tk is Or:
        return child[key.left] or child[key.right]
    return any(child[c] for c in child_keys(key, bound))


@dataclass
class _Demands:
    strong: set = field(default_factory=set)  # values a stage axiom forces
    kept_false: bool = False  # an earlier stage recorded False
    sources: list = field(default_factory=list)

    def add(self, value: bool, source: str, strong: bool):
        self.sources.append(f"{source}={'true' if value else 'false'}")
        if strong:
            self.strong.add(value)
        elif not value:
            self.kept_false = True


def build_satisfaction(gamma: ConstraintSet) -> SatAssignment:
    """Assign a verdict to every class the fragment mentions.

    1. Base truth: a class with a true base entry is forced true.
    2. Preservation: true entries are forced; false ones are kept unless a
       compositional clause decides otherwise.
    3. Classes that nothing decides and that have no clause to apply are false.
    4. Classes of ``eta_b`` and its quantifier prefixes at ``v = x`` are
       forced to ``x in A``.
    5. Every class whose consulted subclasses are all present gets the
       value of its compositional clause, in topological order; atoms always
       get their arithmetic value.

    Raises :class:`InconsistentConstraints` when two forced values clash,
    when a true preserved verdict shares a class with a false one (or with a
    false base verdict), or when a compositional value contradicts a forced
    one.
    """
    bound = gamma.value_bound
    occs = gamma.occurrences()
    key_of = {o: occurrence_key(o) for o in occs}
    members: dict = {}
    for o in occs:
        members.setdefault(key_of[o], []).append(o)
    order = subformula_order(members, bound)

    demands: dict = {k: _Demands() for k in members}
    for o, v in gamma.base_truth:
        if v:
            demands[key_of[o]].add(True, "base", True)
    for o, v in gamma.preservation:
        demands[key_of[o]].add(v, "preserved", v)
    for k, d in demands.items():
        if True in d.strong and d.kept_false:
            raise InconsistentConstraints(
                f"class of {render(k, 200)} has conflicting recorded verdicts: {d.sources}"
            )
    if gamma.eta_b is not None:
        matcher = _EtaMatcher(gamma.eta_b)
        for k, d in demands.items():
            x = matcher.value(k)
            if x is not None:
                d.add(x in gamma.a_set, f"eta at {x}", True)

    verdict: dict = {}
    for k in order.topological():
        d = demands[k]
        if len(d.strong) > 1:
            raise InconsistentConstraints(
                f"class of {render(k, 200)} is forced both ways: {d.sources}"
            )
        forced = next(iter(d.strong)) if d.strong else None
        consulted = child_keys(k, bound)
        if all(c in verdict for c in consulted):
            value = _compose(k, verdict, bound)
            if forced is not None and forced != value:
                raise InconsistentConstraints(
                    f"class of {render(k, 200)} composes to {value} but is forced by {d.sources}"
                )
        elif forced is not None:
            value = forced
        else:
            value = False  # covers kept_false and undecided leaves alike
        verdict[k] = value

    keys = tuple(members)
    return SatAssignment(
        keys,
        tuple(tuple(members[k]) for k in keys),
        tuple(verdict[k] for k in keys),
        order,
        bound,
    )


# ---------------------------------------------------------------------------
# verification


def _clause_value(s: SatAssignment, o: Occurrence, bound: int) -> Verdict:
    f = o.formula
    if type(f) is Eq:
        env = o.env
        return Verdict.of(eval_term(f.left, env) == eval_term(f.right, env))
    kids = [s.judge_occurrence(c) for c in _child_occurrences(o, bound)]
    if type(f) is Not:
        return kids[0].negate()
    acc = FALSE
    for v in kids:
        acc = acc.or_(v)
    return acc


def verify_theta_fragment(s: SatAssignment, gamma: ConstraintSet) -> CtReport:
    """Check every clause of the fragment against the assignment.

    ``COMP``: compositional clauses of each comp instance at each valuation.
    ``REG1``: an occurrence and its closed instance agree.
    ``REG2``: sentences of the fragment with the same closed-term template
    and equal term values agree.
    ``BASE`` / ``PRESERVE``: true entries stay true.
    ``A``: ``eta_b(x)`` holds exactly for ``x`` in ``A``.
    """
    report = CtReport()
    bound = gamma.value_bound
    for o in gamma.comp_occurrences():
        _compare(report, "COMP", (o.closed(),), s.judge_occurrence(o), _clause_value(s, o, bound))

    occs = gamma.occurrences()
    for o in occs:
        c = o.closed()
        _compare(report, "REG1", (c,), s.judge(c), s.judge_occurrence(o))

    templates: dict = {}
    for o in occs:
        c = o.closed()
        tmpl, values = _closed_term_template(c)
        templates.setdefault((tmpl, values), []).append(c)
    for group in templates.values():
        group = list(dict.fromkeys(group))
        for a, b in zip(group, group[1:]):
            _compare(report, "REG2", (a, b), s.judge(b), s.judge(a))

    for o, v in gamma.base_truth:
        if v:
            _compare(report, "BASE", (o.closed(),), s.judge_occurrence(o), TRUE)
    for o, v in gamma.preservation:
        if v:
            _compare(report, "PRESERVE", (o.closed(),), s.judge_occurrence(o), TRUE)
    for o in gamma.eta_occurrences():
        x = o.env[0]
        _compare(report, "A", (o.closed(),), s.judge_occurrence(o), Verdict.of(x in gamma.a_set))
    return report


def _closed_term_template(f: Formula):
    """The sentence with maximal closed subterms replaced by a marker, and their values."""
    values: list = []
    marker = Var(10**9)

    def term(t):
        if not t._vars:
            values.append(t._value)
            return marker
        tt = type(t)
        if tt is Var:
            return t
        if tt is Succ:
            return Succ(term(t.arg))
        if tt is Add:
            return Add(term(t.left), term(t.right))
        return Mul(term(t.left), term(t.right))

    def go(g):
        tg = type(g)
        if tg is Eq:
            return Eq(term(g.left), term(g.right))
        if tg is Not:
            return Not(go(g.body))
        if tg is Or:
            return Or(go(g.left), go(g.right))
        return Exists(g.var, go(g.body))

    return go(f), tuple(values)


def mutation_target(s: SatAssignment, gamma: ConstraintSet, seed: int = 0) -> int:
    """Index of a class holding a comp instance, chosen with ``seed``.

    Flipping such a class breaks its own compositional clause, since the
    classes it consults are strictly smaller and keep their verdicts.
    """
    comp_keys = {occurrence_key(o) for o in gamma.comp_occurrences()}
    choices = [i for i, k in enumerate(s.keys) if k in comp_keys]
    if not choices:
        raise ValueError("the fragment has no comp instances")
    return random.Random(seed).choice(choices)


# ---------------------------------------------------------------------------
# stages


def next_stage(
    gamma: ConstraintSet, s: SatAssignment, extra_comp: Iterable[Formula] = ()
) -> ConstraintSet:
    """The next fragment: the old comp instances plus ``extra_comp``, with
    every verdict of ``s`` recorded for preservation."""
    return ConstraintSet(
        comp_instances=gamma.comp_instances + tuple(extra_comp),
        preservation=tuple(s.occurrence_verdicts()),
        base_truth=gamma.base_truth,
        a_set=gamma.a_set,
        eta_b=gamma.eta_b,
        value_bound=gamma.value_bound,
    )


def falsity_flips(before: SatAssignment, after: SatAssignment) -> list:
    """Occurrences false in ``before`` and true in ``after``."""
    return [o for o, v in before.occurrence_verdicts() if not v and after.judge_occurrence(o) is TRUE]


# ---------------------------------------------------------------------------
# fragment files


_SECTIONS = ("COMP", "PRESERVE", "BASE", "A", "ETA", "BOUND")


def _parse_valuation(text: str, line: int) -> dict:
    env = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not name.startswith("v") or not name[1:].isdigit() or not value.strip().isdigit():
            raise FragmentFormatError(f"bad valuation entry {part!r}", line)
        env[int(name[1:])] = int(value)
    return env


def _parse_bool(text: str, line: int) -> bool:
    t = text.strip().lower()
    if t in ("true", "t", "1"):
        return True
    if t in ("false", "f", "0"):
        return False
    raise FragmentFormatError(f"expected true or false, got {text.strip()!r}", line)


def parse_fragment(text: str) -> ConstraintSet:
    """Read the line-oriented fragment format.

    Sections ``[COMP]`` (one formula per line), ``[PRESERVE]`` and
    ``[BASE]`` (``formula :: v0=3,v1=5 :: true``), ``[A]`` (naturals),
    ``[ETA]`` (the ``b`` of ``eta_b``) and ``[BOUND]`` (the quantifier
    bound).  ``#`` starts a comment.
    """
    section = None
    comp, pres, base, a_set = [], [], [], set()
    eta_b = None
    bound = 2
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().upper()
            if section not in _SECTIONS:
                raise FragmentFormatError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise FragmentFormatError("content before the first section", lineno)
        try:
            if section == "COMP":
                comp.append(parse_formula(line))
            elif section in ("PRESERVE", "BASE"):
                parts = [p.strip() for p in line.split("::")]
                if len(parts) == 2:
                    parts.insert(1, "")
                if len(parts) != 3:
                    raise FragmentFormatError("expected 'formula :: valuation :: verdict'", lineno)
                occ = Occurrence(parse_formula(parts[0]), _parse_valuation(parts[1], lineno))
                entry = (occ, _parse_bool(parts[2], lineno))
                (pres if section == "PRESERVE" else base).append(entry)
            elif section == "A":
                for tok in line.replace(",", " ").split():
                    if not tok.isdigit():
                        raise FragmentFormatError(f"expected a natural, got {tok!r}", lineno)
                    a_set.add(int(tok))
            elif section == "ETA":
                eta_b = int(line)
            else:
                bound = int(line)
        except (SyntaxError, InadmissibleValuation) as e:
            raise FragmentFormatError(str(e), lineno) from e
        except ValueError as e:
            if isinstance(e, FragmentFormatError):
                raise
            raise FragmentFormatError(str(e), lineno) from e
    return ConstraintSet(tuple(comp), tuple(pres), tuple(base), frozenset(a_set), eta_b, bound)


def render_fragment(gamma: ConstraintSet) -> str:
    def entry(o, v):
        vals = ",".join(f"v{k}={x}" for k, x in o.valuation)
        return f"{render(o.formula)} :: {vals} :: {'true' if v else 'false'}"

    out = ["[BOUND]", str(gamma.value_bound), "[COMP]"]
    out += [render(f) for f in gamma.comp_instances]
    out.append("[PRESERVE]")
    out += [entry(o, v) for o, v in gamma.preservation]
    out.append("[BASE]")
    out += [entry(o, v) for o, v in gamma.base_truth]
    if gamma.eta_b is not None:
        out += ["[ETA]", str(gamma.eta_b)]
    out += ["[A]", " ".join(str(x) for x in sorted(gamma.a_set))]
    return "\n".join(out) + "\n"
