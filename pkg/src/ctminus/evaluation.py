"""Truth oracles and compositional-axiom checking.

All oracles share one interface, :meth:`TruthOracle.judge`, mapping a
sentence to a three-valued :class:`Verdict`.  The implementations are

* :class:`StandardModelOracle`: Kleene evaluation over the naturals with a
  witness bound; a failed witness search only yields False when the
  quantifier is syntactically bounded.
* :class:`DomainOracle`: quantifiers range over ``0..bound`` exactly, so
  every sentence gets a definite verdict.  Selected formulas can be given a
  fixed extension, which is how externally chosen predicates (such as the
  set defined by an eta formula) are modelled.
* :class:`PropositionalOracle`: designated sentences are opaque atoms.
* :class:`TableOracle`: an explicit set of true sentences.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .goedel import encode_formula
from .syntax import (
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
    abstract_closed_terms,
    conjuncts,
    direct_subformulas,
    numeral,
    rename_var,
    render,
    substitute,
)


class OpenTerm(ValueError):
    pass


class NotASentence(ValueError):
    pass


class MissingAtom(KeyError):
    pass


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @staticmethod
    def of(b: bool) -> "Verdict":
        return Verdict.TRUE if b else Verdict.FALSE

    def negate(self) -> "Verdict":
        if self is Verdict.TRUE:
            return Verdict.FALSE
        if self is Verdict.FALSE:
            return Verdict.TRUE
        return self

    def or_(self, other: "Verdict") -> "Verdict":
        if self is Verdict.TRUE or other is Verdict.TRUE:
            return Verdict.TRUE
        if self is Verdict.FALSE and other is Verdict.FALSE:
            return Verdict.FALSE
        return Verdict.UNKNOWN

    def and_(self, other: "Verdict") -> "Verdict":
        return self.negate().or_(other.negate()).negate()

    @property
    def known(self) -> bool:
        return self is not Verdict.UNKNOWN


TRUE, FALSE, UNKNOWN = Verdict.TRUE, Verdict.FALSE, Verdict.UNKNOWN


@dataclass(frozen=True)
class Budget:
    witness_bound: int = 64
    node_budget: int = 1_000_000

    def __post_init__(self):
        if self.witness_bound < 1 or self.node_budget < 1:
            raise ValueError("budget limits must be at least 1")


# ---------------------------------------------------------------------------
# terms


def eval_closed_term(t: Term) -> int:
    if t._value is None:
        raise OpenTerm(render(t))
    return t._value


def eval_term(t: Term, env: Mapping[int, int]) -> int:
    if t._value is not None:
        return t._value
    tt = type(t)
    if tt is Var:
        return env[t.index]
    if tt is Succ:
        return eval_term(t.arg, env) + 1
    if tt is Add:
        return eval_term(t.left, env) + eval_term(t.right, env)
    return eval_term(t.left, env) * eval_term(t.right, env)


# ---------------------------------------------------------------------------
# syntactic bounds


def _is_summand(v: int, t: Term) -> bool:
    tt = type(t)
    if tt is Var:
        return t.index == v
    if tt is Succ:
        return _is_summand(v, t.arg)
    if tt is Add:
        return _is_summand(v, t.left) or _is_summand(v, t.right)
    return False


def _bounding_term(v: int, f: Formula, blocked: frozenset) -> Optional[Term]:
    """A term ``u`` with ``f -> v <= u`` and no variable of ``blocked | {v}``."""
    tf = type(f)
    if tf is Eq:
        for lhs, rhs in ((f.left, f.right), (f.right, f.left)):
            if _is_summand(v, lhs) and v not in rhs._vars and not (rhs._vars & blocked):
                return rhs
        return None
    if tf is Exists:
        if f.var == v:
            return None
        return _bounding_term(v, f.body, blocked | {f.var})
    if tf is Or:
        a = _bounding_term(v, f.left, blocked)
        b = _bounding_term(v, f.right, blocked) if a is not None else None
        return None if b is None else Add(a, b)
    # !(!a | x): a conjunction or an implication guard with first part a
    body = f.body
    if type(body) is Or and type(body.left) is Not:
        u = _bounding_term(v, body.left.body, blocked)
        if u is not None:
            return u
        if type(body.right) is Not:
            return _bounding_term(v, body.right.body, blocked)
    return None


@lru_cache(maxsize=65536)
def bound_term(f: Exists) -> Optional[Term]:
    """For ``E v. body`` return ``u`` such that every witness satisfies ``v <= u``.

    Recognizes ``v`` occurring as a summand on one side of an equation whose
    other side avoids ``v``, possibly under further quantifiers, inside a
    conjunction or a disjunction of such guards.
    """
    return _bounding_term(f.var, f.body, frozenset())


def _occurrences(v: int, t: Term) -> int:
    tt = type(t)
    if tt is Var:
        return int(t.index == v)
    if not t._vars:
        return 0
    if tt is Succ:
        return _occurrences(v, t.arg)
    return _occurrences(v, t.left) + _occurrences(v, t.right)


@lru_cache(maxsize=65536)
def linear_equation(f: Exists):
    """``(side, other)`` when the body of ``f`` is an equation in which the
    bound variable occurs exactly once, as a summand of ``side``, and not in
    ``other``.  Then ``side`` grows by exactly one per unit of the variable,
    so the equation has at most one solution."""
    body = f.body
    if type(body) is not Eq:
        return None
    v = f.var
    for side, other in ((body.left, body.right), (body.right, body.left)):
        if v not in other._vars and _occurrences(v, side) == 1 and _is_summand(v, side):
            return side, other
    return None


def is_bounded(f: Exists, limit: int) -> bool:
    """True when ``f`` is a sentence whose witnesses are syntactically at most ``limit``."""
    u = bound_term(f)
    return u is not None and not u._vars and u._value <= limit


# ---------------------------------------------------------------------------
# oracles


class TruthOracle:
    """``judge(sentence) -> Verdict``; implementations must be deterministic."""

    def judge(self, s: Formula) -> Verdict:
        raise NotImplementedError

    def judge_open(self, f: Formula, env: Mapping[int, int]) -> Verdict:
        """Judge ``f`` with its free variables set to numerals from ``env``."""
        return self.judge(substitute(f, {v: numeral(env[v]) for v in f._fv}))


class _Exhausted(Exception):
    pass


class CompositionalOracle(TruthOracle):
    """Kleene evaluation with a configurable quantifier domain.

    ``domain=False`` searches witnesses up to ``witness_bound`` in the
    naturals; ``domain=True`` makes ``0..witness_bound`` the whole domain.
    ``atoms`` fixes the verdict of listed sentences and ``definitions`` maps
    a one-variable formula to a predicate on the value of that variable;
    both are consulted before the compositional clauses.
    """

    def __init__(
        self,
        witness_bound: int,
        node_budget: Optional[int] = None,
        domain: bool = False,
        atoms: Optional[Mapping[Formula, bool]] = None,
        definitions: Optional[Mapping[Formula, Callable[[int], bool]]] = None,
    ):
        self.witness_bound = witness_bound
        self.node_budget = node_budget
        self.domain = domain
        self.atoms = dict(atoms or {})
        self.definitions = {}
        for f, pred in (definitions or {}).items():
            if len(f._fv) != 1:
                raise ValueError(f"definition template needs one free variable: {render(f, 80)}")
            (u,) = f._fv
            self.definitions[f if u == 0 else rename_var(f, u, 0)] = pred
        # definitions apply up to the name of the free variable
        self._def_shapes = {(f._size, f._sd) for f in self.definitions}
        self._def_hits: dict = {}
        self._memo: dict = {}
        self._verdicts: dict = {}
        self._lock = threading.RLock()
        self._spent = 0

    def judge(self, s: Formula) -> Verdict:
        if s._fv:
            raise NotASentence(render(s, 80))
        with self._lock:
            hit = self._verdicts.get(s)
            if hit is not None:
                return hit
            self._spent = 0
            try:
                v = self._eval(s, {})
            except _Exhausted:
                v = UNKNOWN
            self._verdicts[s] = v
            return v

    def judge_open(self, f: Formula, env: Mapping[int, int]) -> Verdict:
        if not self.atoms:
            # skip building the instance when no sentence table is involved
            missing = f._fv - env.keys()
            if missing:
                raise NotASentence(f"no value for {sorted(missing)}")
            with self._lock:
                self._spent = 0
                try:
                    return self._eval(f, {v: env[v] for v in f._fv})
                except _Exhausted:
                    return UNKNOWN
        return super().judge_open(f, env)

    def _eval(self, f: Formula, env: dict) -> Verdict:
        fv = f._fv
        if fv:
            key = (f, tuple(sorted((v, env[v]) for v in fv)))
        else:
            key = f
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if self.node_budget is not None:
            self._spent += 1
            if self._spent > self.node_budget:
                raise _Exhausted
        out = self._clause(f, env)
        self._memo[key] = out
        return out

    def _clause(self, f: Formula, env: dict) -> Verdict:
        if self.definitions and (f._size, f._sd) in self._def_shapes and len(f._fv) == 1:
            pred = self._definition(f)
            if pred is not None:
                (u,) = f._fv
                return Verdict.of(bool(pred(env[u])))
        if self.atoms and not f._fv:
            hit = self.atoms.get(f)
            if hit is not None:
                return Verdict.of(hit)
        tf = type(f)
        if tf is Eq:
            return Verdict.of(eval_term(f.left, env) == eval_term(f.right, env))
        if tf is Not:
            return self._eval(f.body, env).negate()
        if tf is Or:
            l = self._eval(f.left, env)
            if l is TRUE:
                return TRUE
            return l.or_(self._eval(f.right, env))
        return self._exists(f, env)

    def _definition(self, f: Formula):
        try:
            return self._def_hits[f]
        except KeyError:
            pass
        (u,) = f._fv
        canon = f
        if u != 0:
            canon = None if 0 in f._vars else rename_var(f, u, 0)
        pred = None if canon is None else self.definitions.get(canon)
        self._def_hits[f] = pred
        return pred

    def _exists(self, f: Exists, env: dict) -> Verdict:
        v, body = f.var, f.body
        if v not in body._fv:
            return self._eval(body, env)
        solved = linear_equation(f)
        if solved is not None:
            side, other = solved
            probe = {w: env[w] for w in body._fv if w != v}
            probe[v] = 0
            x = eval_term(other, env) - eval_term(side, probe)
            if x < 0 or (self.domain and x > self.witness_bound):
                return FALSE
            return TRUE
        if self.domain:
            limit, certain = self.witness_bound, True
        else:
            u = bound_term(f)
            if u is None:
                limit, certain = self.witness_bound, False
            else:
                top = eval_term(u, env)
                limit, certain = min(top, self.witness_bound), top <= self.witness_bound
        unknown = False
        inner = {w: env[w] for w in body._fv if w != v}
        for x in range(limit + 1):
            inner[v] = x
            r = self._eval(body, inner)
            if r is TRUE:
                return TRUE
            if r is UNKNOWN:
                unknown = True
        return UNKNOWN if unknown or not certain else FALSE


class StandardModelOracle(CompositionalOracle):
    def __init__(self, budget: Budget = Budget(), atoms=None, definitions=None):
        super().__init__(budget.witness_bound, budget.node_budget, False, atoms, definitions)
        self.budget = budget


class DomainOracle(CompositionalOracle):
    """Two-valued evaluation with every quantifier ranging over ``0..bound``."""

    def __init__(self, bound: int, atoms=None, definitions=None, node_budget=None):
        super().__init__(bound, node_budget, True, atoms, definitions)
        self.bound = bound


def eval_sentence(s: Formula, budget: Budget = Budget()) -> Verdict:
    """Three-valued standard-model verdict for ``s`` under ``budget``."""
    return StandardModelOracle(budget).judge(s)


def eval_prop(f: Formula, atoms: Mapping[Formula, bool]) -> bool:
    """Propositional value of ``f`` with the sentences in ``atoms`` opaque.

    Only negation and disjunction are looked through; every other node must
    be listed in ``atoms``.
    """
    memo: dict = {}

    def go(g):
        hit = atoms.get(g)
        if hit is not None:
            return bool(hit)
        m = memo.get(id(g))
        if m is not None:
            return m
        tg = type(g)
        if tg is Not:
            out = not go(g.body)
        elif tg is Or:
            out = go(g.left) or go(g.right)
        else:
            raise MissingAtom(render(g, 120))
        memo[id(g)] = out
        return out

    return go(f)


class PropositionalOracle(TruthOracle):
    def __init__(self, atoms: Mapping[Formula, bool]):
        self.atoms = dict(atoms)

    def judge(self, s: Formula) -> Verdict:
        return Verdict.of(eval_prop(s, self.atoms))


class TableOracle(TruthOracle):
    """True exactly on the listed sentences."""

    def __init__(self, true_sentences: Iterable[Formula]):
        self.true_sentences = frozenset(true_sentences)

    def judge(self, s: Formula) -> Verdict:
        return Verdict.of(s in self.true_sentences)


# ---------------------------------------------------------------------------
# axiom checking


@dataclass(frozen=True)
class Violation:
    axiom: str
    sentences: tuple
    expected: Verdict
    actual: Verdict

    def line(self) -> str:
        shown = " ; ".join(render(s, 400) for s in self.sentences)
        return (
            f"AXIOM {self.axiom} VIOLATION: {shown}"
            f" (expected {self.expected.value}, got {self.actual.value})"
        )


@dataclass
class AxiomResult:
    checked: int = 0
    blocked: int = 0
    gated: int = 0
    violations: list = field(default_factory=list)


@dataclass
class CtReport:
    results: dict = field(default_factory=dict)

    def axiom(self, name: str) -> AxiomResult:
        return self.results.setdefault(name, AxiomResult())

    @property
    def violations(self) -> list:
        return [v for r in self.results.values() for v in r.violations]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def unknown_count(self) -> int:
        return sum(r.blocked for r in self.results.values())

    def lines(self) -> list:
        out = [v.line() for v in self.violations]
        for name in sorted(self.results):
            r = self.results[name]
            out.append(
                f"AXIOM {name}: checked {r.checked}, violations {len(r.violations)},"
                f" blocked {r.blocked}, gated {r.gated}"
            )
        return out


def _compare(report, axiom, sentences, actual: Verdict, expected: Verdict):
    res = report.axiom(axiom)
    if not actual.known or not expected.known:
        res.blocked += 1
        return
    res.checked += 1
    if actual is not expected:
        res.violations.append(Violation(axiom, tuple(sentences), expected, actual))


def regularity_instances(fragment: Iterable[Formula]):
    """``(template, closed terms, numerals)`` for each sentence with a non-numeral closed term."""
    for s in fragment:
        template, holes, terms = abstract_closed_terms(s)
        nums = [numeral(t._value) for t in terms]
        if nums != terms:
            yield template, holes, terms, nums


def _check(o, fragment, pairs, templates, instance_bound, gate) -> CtReport:
    report = CtReport()
    for name in ("1", "2", "3", "4", "5"):
        report.axiom(name)
    for s in fragment:
        if s._fv:
            raise NotASentence(render(s, 80))
        ts = type(s)
        if ts is Eq:
            expected = Verdict.of(s.left._value == s.right._value)
            _compare(report, "1", [s], o.judge(s), expected)
        elif ts is Not:
            if not gate("2", s.body):
                report.axiom("2").gated += 1
                continue
            _compare(report, "2", [s, s.body], o.judge(s), o.judge(s.body).negate())
        elif ts is Or:
            if not gate("3", s):
                report.axiom("3").gated += 1
                continue
            rhs = o.judge(s.left).or_(o.judge(s.right))
            _compare(report, "3", [s, s.left, s.right], o.judge(s), rhs)
        else:
            if not gate("4", s):
                report.axiom("4").gated += 1
                continue
            verdicts = []
            for x in range(instance_bound + 1):
                verdicts.append(o.judge(substitute(s.body, {s.var: numeral(x)})))
            if TRUE in verdicts:
                rhs = TRUE
            elif UNKNOWN not in verdicts and (
                s.var not in s.body._fv or is_bounded(s, instance_bound)
            ):
                rhs = FALSE
            else:
                rhs = UNKNOWN
            _compare(report, "4", [s], o.judge(s), rhs)
    for template, holes, terms, nums in regularity_instances(fragment):
        a = substitute(template, dict(zip(holes, terms)))
        b = substitute(template, dict(zip(holes, nums)))
        _compare(report, "5", [a, b], o.judge(a), o.judge(b))
    for phi in templates:
        fvs = sorted(phi._fv)
        for s_bar, t_bar in pairs:
            if len(s_bar) != len(fvs):
                continue
            if [t._value for t in s_bar] != [t._value for t in t_bar]:
                continue
            a = substitute(phi, dict(zip(fvs, s_bar)))
            b = substitute(phi, dict(zip(fvs, t_bar)))
            _compare(report, "5", [a, b], o.judge(a), o.judge(b))
    return report


def check_ct_axioms(
    o: TruthOracle,
    fragment: Sequence[Formula],
    pairs: Sequence = (),
    templates: Sequence[Formula] = (),
    instance_bound: int = 16,
) -> CtReport:
    """Check the compositional clauses and regularity against ``o``.

    Clause 1 (atoms), 2 (negation), 3 (disjunction) and 4 (existential,
    judged on instances up to ``instance_bound``) are checked for every
    sentence of ``fragment``.  Regularity (clause 5) is checked on each
    fragment sentence against its numeral-normalized twin, and on every
    template in ``templates`` for each pair of equal-valued closed term
    sequences in ``pairs``.
    """
    return _check(o, fragment, pairs, templates, instance_bound, lambda k, f: True)


def check_ct_restricted(
    o: TruthOracle,
    fragment: Sequence[Formula],
    *,
    depth_cut: Optional[Callable[[int], bool]] = None,
    code_bound: Optional[int] = None,
    pairs: Sequence = (),
    templates: Sequence[Formula] = (),
    instance_bound: int = 16,
) -> CtReport:
    """As :func:`check_ct_axioms` with clauses 2-4 gated.

    The negation clause is gated on the negated formula, the disjunction and
    existential clauses on the whole formula; atoms and regularity are never
    gated.  Give exactly one of ``depth_cut`` (a predicate on depths) or
    ``code_bound`` (codes at most this value pass).
    """
    if (depth_cut is None) == (code_bound is None):
        raise ValueError("give exactly one of depth_cut and code_bound")
    if depth_cut is not None:
        gate = lambda k, f: bool(depth_cut(f._sd))
    else:
        gate = lambda k, f: encode_formula(f) <= code_bound
    return _check(o, fragment, pairs, templates, instance_bound, gate)


def sentence_closure(
    sentences: Iterable[Formula],
    instance_bound: int,
    stop: Iterable[Formula] = (),
) -> list:
    """Close under sentence children: negation and disjunction parts and
    existential instances at ``0..instance_bound``.  Sentences in ``stop``
    are kept but not opened.  Children come before parents."""
    stop = frozenset(stop)
    seen: set = set()
    out: list = []
    work = [(s, False) for s in sentences]
    while work:
        s, done = work.pop()
        if done:
            out.append(s)
            continue
        if s in seen:
            continue
        seen.add(s)
        work.append((s, True))
        if s in stop:
            continue
        ts = type(s)
        if ts is Exists:
            kids = [substitute(s.body, {s.var: numeral(x)}) for x in range(instance_bound + 1)]
        else:
            kids = direct_subformulas(s)
        for k in kids:
            if k not in seen:
                work.append((k, False))
    return out
