"""Rank functions, their alpha/beta builders and the gamma recursion.

Three ranks are implemented, all on formulas with one free variable:

* the type rank for a finite list of formulas ``phi_0, phi_1, ...``,
* the uniform Tarski-biconditional rank (induction instances plus
  biconditionals for the enumerated formulas),
* the extension rank driven by a table of eta formulas.

Every rank counts consecutive verified checks from index 0: ``Finite(n)``
means checks ``0..n-1`` hold and check ``n`` is refuted.  ``AtLeast(n)``
means checks ``0..n-1`` hold and check ``n`` could not be decided, and
``Infinity`` means every listed check holds.

For each rank, ``alpha_n[psi]`` is a sentence whose truth implies
``rank(psi) <= n`` and ``beta_n`` has rank above ``n``, so the stopping
disjunction ``gamma_{j+1}`` over ``alpha_i[gamma_j]`` and ``beta_i``
strictly raises the rank.  :func:`check_rank_trajectory` classifies the
resulting rank sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .evaluation import FALSE, TRUE, UNKNOWN, DomainOracle, TruthOracle, Verdict
from .goedel import closed_term_seqs, encode_formula, nth_formula_le1
from .stopping_disjunction import stop_disjunction
from .syntax import (
    ZERO,
    Add,
    Eq,
    Exists,
    Formula,
    Not,
    Or,
    Succ,
    Var,
    big_and,
    big_or,
    conj,
    const_term,
    disj,
    eta_at,
    forall,
    fresh_var,
    gt,
    iff,
    implies,
    le,
    numeral,
    rename_var,
    substitute,
)


class TooManyFreeVars(ValueError):
    pass


class WrongArity(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class IncomparableRanks(TypeError):
    """The verified information does not decide the comparison."""


# ---------------------------------------------------------------------------
# ranks

_MINUS_INF, _FINITE, _AT_LEAST, _INF = "-inf", "finite", "at_least", "inf"


@dataclass(frozen=True)
class Rank:
    kind: str
    n: int = 0

    def __str__(self):
        if self.kind == _MINUS_INF:
            return "-inf"
        if self.kind == _INF:
            return "inf"
        if self.kind == _AT_LEAST:
            return f">={self.n}"
        return str(self.n)

    @property
    def is_finite(self) -> bool:
        return self.kind == _FINITE

    @property
    def is_top(self) -> bool:
        """Infinity, or a bounded-verification verdict treated as the top."""
        return self.kind in (_INF, _AT_LEAST)

    def compare(self, other: "Rank") -> Optional[int]:
        """-1, 0 or 1 when the order is decided, else None."""
        a, b = self, other
        if a.kind != _AT_LEAST and b.kind != _AT_LEAST:
            ka, kb = _key(a), _key(b)
            return (ka > kb) - (ka < kb)
        if a.kind == _AT_LEAST and b.kind == _AT_LEAST:
            return None
        flip = a.kind != _AT_LEAST
        low, other_ = (b, a) if flip else (a, b)
        # low is AtLeast(k): the rank is verified to be >= k
        res = None
        if other_.kind == _FINITE and other_.n < low.n:
            res = 1
        elif other_.kind == _MINUS_INF and low.n >= 1:
            res = 1
        if res is None:
            return None
        return -res if flip else res

    def __lt__(self, other):
        c = self.compare(other)
        if c is None:
            raise IncomparableRanks(f"{self} vs {other}")
        return c < 0

    def __gt__(self, other):
        return other.__lt__(self)

    def __le__(self, other):
        if other.kind == _INF or self.kind == _MINUS_INF:
            return True
        c = self.compare(other)
        if c is None:
            raise IncomparableRanks(f"{self} vs {other}")
        return c <= 0

    def __ge__(self, other):
        return other.__le__(self)


def _key(r: Rank) -> float:
    if r.kind == _MINUS_INF:
        return float("-inf")
    if r.kind == _INF:
        return float("inf")
    return r.n


MINUS_INFINITY = Rank(_MINUS_INF)
INFINITY = Rank(_INF)


def Finite(n: int) -> Rank:
    return Rank(_FINITE, n)


def AtLeast(n: int) -> Rank:
    return Rank(_AT_LEAST, n)


@dataclass(frozen=True)
class TrajectoryClass:
    kind: str  # "reaches_max", "strictly_increasing" or "violation"
    index: Optional[int] = None

    def __str__(self):
        return self.kind if self.index is None else f"{self.kind} at {self.index}"


def check_rank_trajectory(ranks: Sequence[Rank]) -> TrajectoryClass:
    """Classify a rank sequence: it must rise strictly until it hits a top rank."""
    for i, r in enumerate(ranks):
        if r.is_top:
            return TrajectoryClass("reaches_max", i)
        if i and not ranks[i - 1] < r:
            return TrajectoryClass("violation", i)
    return TrajectoryClass("strictly_increasing")


# ---------------------------------------------------------------------------
# helpers


def _var_of(f: Formula) -> int:
    fv = f._fv
    if len(fv) > 1:
        raise TooManyFreeVars(f"free variables {sorted(fv)}")
    return next(iter(fv)) if fv else 0


def in_v0(f: Formula) -> Formula:
    """``f`` with its single free variable renamed to ``v0``."""
    u = _var_of(f)
    if u == 0:
        return f
    if 0 in f._vars:
        raise WrongArity("v0 is already used inside the formula")
    return rename_var(f, u, 0)


def extension(f: Formula, o: TruthOracle, domain_bound: int):
    """``(members, undecided)``: values ``x <= domain_bound`` by verdict on ``f(x)``."""
    u = _var_of(f)
    members, undecided = [], []
    if not f._fv:
        v = o.judge(f)
        xs = list(range(domain_bound + 1))
        return (xs, []) if v is TRUE else ([], xs if v is UNKNOWN else [])
    for x in range(domain_bound + 1):
        v = o.judge_open(f, {u: x})
        if v is TRUE:
            members.append(x)
        elif v is UNKNOWN:
            undecided.append(x)
    return members, undecided


def _rank_from_checks(nonempty: Verdict, checks) -> Rank:
    """Count leading True verdicts produced lazily by ``checks``."""
    if nonempty is FALSE:
        return MINUS_INFINITY
    n = 0
    for v in checks:
        if v is FALSE:
            return Finite(n) if nonempty is TRUE else AtLeast(0)
        if v is UNKNOWN:
            return AtLeast(n) if nonempty is TRUE else AtLeast(0)
        n += 1
    return INFINITY if nonempty is TRUE else AtLeast(0)


# ---------------------------------------------------------------------------
# type rank


@dataclass(frozen=True)
class TypeSpec:
    """A finite list of one-variable formulas; ``monotone`` asserts each implies the previous."""

    phis: tuple
    monotone: bool = True

    def __post_init__(self):
        object.__setattr__(self, "phis", tuple(in_v0(p) for p in self.phis))
        for i, p in enumerate(self.phis):
            if len(p._fv) != 1:
                raise WrongArity(f"type formula {i} must have one free variable")


def ge_type(count: int) -> TypeSpec:
    """The monotone type ``x >= i`` (as ``E y. x = y + i``) for ``i < count``."""
    return TypeSpec(tuple(Exists(1, Eq(Var(0), Add(Var(1), numeral(i)))) for i in range(count)))


def p_rank(phi: Formula, p: TypeSpec, o: TruthOracle, domain_bound: int) -> Rank:
    """Number of leading type formulas satisfied by every element of ``phi``'s extension.

    The extension is taken among ``0..domain_bound``.
    """
    members, undecided = extension(phi, o, domain_bound)
    if not members and not undecided:
        return MINUS_INFINITY
    if not members:
        return AtLeast(0)
    pool = members + undecided

    def checks():
        for q in p.phis:
            verdict = TRUE
            for x in pool:
                v = o.judge_open(q, {0: x})
                if v is TRUE:
                    continue
                if v is FALSE and x in members_set:
                    verdict = FALSE
                    break
                verdict = UNKNOWN
            yield verdict

    members_set = set(members)
    return _rank_from_checks(TRUE, checks())


def build_beta_p(n: int, p: TypeSpec) -> Formula:
    if not 0 <= n < len(p.phis):
        raise IndexOutOfRange(f"type has {len(p.phis)} formulas, asked for {n}")
    if p.monotone:
        return p.phis[n]
    return big_and(p.phis[: n + 1])


def build_alpha_p(n: int, psi: Formula, p: TypeSpec) -> Formula:
    """``!E x. psi(x)`` for n = 0, else ``E x. (psi(x) & !beta_n(x))``."""
    psi = in_v0(psi)
    if n == 0:
        return Not(Exists(0, psi))
    return Exists(0, conj(psi, Not(build_beta_p(n, p))))


def gamma_sequence_p(p: TypeSpec, d: int) -> list:
    """``[gamma_0, ..., gamma_d]`` with ``gamma_0 = (x = x)``."""
    if not 0 <= d < len(p.phis):
        raise IndexOutOfRange(f"d={d} needs at least {d + 1} type formulas")
    betas = [build_beta_p(i, p) for i in range(d + 1)]
    gammas = [Eq(Var(0), Var(0))]
    for _ in range(d):
        g = gammas[-1]
        alphas = [build_alpha_p(i, g, p) for i in range(d + 1)]
        gammas.append(stop_disjunction(alphas, betas))
    return gammas


# ---------------------------------------------------------------------------
# uniform Tarski-biconditional rank


def enumerate_formula(i: int) -> Formula:
    """The i-th formula, in code order, with at most one free variable."""
    return nth_formula_le1(i)[1]


def _instances(i: int, check_bound: int):
    """``(code of phi_i(s), phi_i(values of s))`` for closed sequences ``s``."""
    phi = enumerate_formula(i)
    fvs = sorted(phi._fv)
    for _, terms in closed_term_seqs(check_bound, len(fvs)):
        inst = substitute(phi, dict(zip(fvs, terms)))
        val = substitute(phi, {v: numeral(t._value) for v, t in zip(fvs, terms)})
        yield encode_formula(inst), val


def induction_matrix(i: int, psi: Formula) -> Formula:
    """``P(x)``, then alternately ``P(x) & chi_k`` and ``P(x) | chi_k`` over enumerated ``chi_k``."""
    if i == 0:
        return psi
    k, r = divmod(i - 1, 2)
    chi = enumerate_formula(k)
    return conj(psi, chi) if r == 0 else disj(psi, chi)


def successor_instance(theta: Formula) -> Formula:
    """``theta(S x)`` as ``E y. (y = S(x) & theta(y))`` with ``y`` fresh."""
    y = fresh_var(theta, at_least=1)
    return Exists(y, conj(Eq(Var(y), Succ(Var(0))), rename_var(theta, 0, y)))


def induction_instance(i: int, psi: Formula) -> Formula:
    """The i-th induction instance with ``psi`` in the predicate slot.

    ``(theta(0) & A x. (theta(x) -> theta(S x))) -> A x. theta(x)``, with
    every other free variable of the matrix universally closed.
    """
    if len(psi._fv) != 1:
        raise WrongArity("the predicate slot takes a formula with one free variable")
    psi = in_v0(psi)
    theta = induction_matrix(i, psi)
    body = implies(
        conj(substitute(theta, {0: ZERO}), forall(0, implies(theta, successor_instance(theta)))),
        forall(0, theta),
    )
    for w in sorted(theta._fv - {0}, reverse=True):
        body = forall(w, body)
    return body


def build_beta_utb(n: int, seq_bound: int = 64) -> Formula:
    """Disjunction over ``i <= n`` and closed sequences ``s`` (code at most
    ``seq_bound``) of ``x = code(phi_i(s)) & phi_i(values of s)``."""
    parts = []
    for i in range(n + 1):
        inner = [conj(Eq(Var(0), const_term(c)), val) for c, val in _instances(i, seq_bound)]
        parts.append(big_or(inner))
    return big_or(parts)


def build_alpha_utb(n: int, psi: Formula, seq_bound: int = 64) -> Formula:
    """``!ind_n(psi) | (disjunction over s of !(psi(code(phi_n(s))) <-> phi_n(values of s)))``."""
    psi = in_v0(psi) if psi._fv else psi
    ind = induction_instance(n, psi if psi._fv else conj(psi, Eq(Var(0), Var(0))))
    fails = [
        Not(iff(substitute(psi, {0: const_term(c)}), val)) for c, val in _instances(n, seq_bound)
    ]
    return Or(Not(ind), big_or(fails))


def utb_check(i: int, gamma: Formula, o: TruthOracle, check_bound: int) -> Verdict:
    """Verdict on ``ind_i(gamma)`` and the biconditionals for ``phi_i``."""
    u = _var_of(gamma)
    slot = gamma if gamma._fv else conj(gamma, Eq(Var(0), Var(0)))
    out = o.judge(induction_instance(i, slot))
    if out is FALSE:
        return FALSE
    for c, val in _instances(i, check_bound):
        lhs = o.judge(substitute(gamma, {u: const_term(c)}))
        rhs = o.judge(val)
        if lhs.known and rhs.known:
            if lhs is not rhs:
                return FALSE
        else:
            out = UNKNOWN
    return out


def utb_rank(gamma: Formula, o: TruthOracle, check_bound: int = 64, max_index: int = 8) -> Rank:
    """Leading checks ``i < max_index`` that hold, after a nonemptiness test."""
    u = _var_of(gamma)
    nonempty = o.judge(Exists(u, gamma)) if gamma._fv else o.judge(gamma)
    return _rank_from_checks(
        nonempty, (utb_check(i, gamma, o, check_bound) for i in range(max_index))
    )


# ---------------------------------------------------------------------------
# extension rank


def build_alpha_ext(n: int, phi: Formula, a_seq: Sequence[int]) -> Formula:
    """``E x. phi(x) & A x. A y. ((phi(x) & eta_{a_n}(y)) -> (x > n & x <= y))``.

    ``y`` sits in the eta formula's own variable ``v0``; ``phi`` is moved to a
    fresh variable.
    """
    if not 0 <= n < len(a_seq):
        raise IndexOutOfRange(f"a_seq has {len(a_seq)} entries, asked for {n}")
    if a_seq[n] < 1:
        raise IndexOutOfRange("eta parameters start at 1")
    u = _var_of(phi)
    eta = eta_at(a_seq[n])
    x = fresh_var(phi, eta, at_least=1)
    moved = rename_var(phi, u, x) if phi._fv else phi
    guard = conj(gt(Var(x), numeral(n)), le(Var(x), Var(0)))
    inner = forall(x, forall(0, implies(conj(moved, eta), guard)))
    return conj(Exists(u, phi), inner)


def ext_stop_condition(n: int, phi: Formula, a_seq: Sequence[int]) -> Formula:
    """Negation of :func:`build_alpha_ext`: true when check ``n`` fails, i.e. rank ``<= n``."""
    return Not(build_alpha_ext(n, phi, a_seq))


def gamma_sequence_ext(a_seq: Sequence[int], c: int, steps: int) -> list:
    """``[gamma_0, ..., gamma_steps]``; each step is the stopping disjunction of
    ``eta_{a_{i+1}}(x)`` under the stop conditions ``i = 0..c``."""
    if not c + 1 < len(a_seq):
        raise IndexOutOfRange(f"c={c} needs {c + 2} eta parameters")
    betas = [eta_at(a_seq[i + 1]) for i in range(c + 1)]
    gammas = [Eq(Var(0), Var(0))]
    for _ in range(steps):
        g = gammas[-1]
        gammas.append(stop_disjunction([ext_stop_condition(i, g, a_seq) for i in range(c + 1)], betas))
    return gammas


def ext_oracle(a_seq: Sequence[int], b_seq: Sequence[int], domain_bound: int, **kw) -> DomainOracle:
    """Domain oracle in which ``eta_{a_k}(x)`` holds exactly for ``x = b_k``."""
    if len(set(a_seq)) != len(a_seq):
        raise ValueError("eta parameters must be distinct")
    definitions = {eta_at(a): (lambda x, b=b: x == b) for a, b in zip(a_seq, b_seq)}
    return DomainOracle(domain_bound, definitions=definitions, **kw)


def ext_rank(phi: Formula, a_seq: Sequence[int], o: TruthOracle, domain_bound: int) -> Rank:
    """Leading ``n`` such that every element ``x`` of ``phi`` has ``x > n`` and ``x <= y``
    for every ``y`` in the extension of ``eta_{a_n}``."""
    members, undecided = extension(phi, o, domain_bound)
    if not members and not undecided:
        return MINUS_INFINITY
    pool = members + undecided

    def checks():
        for n, a in enumerate(a_seq):
            ys, unsure_ys = extension(eta_at(a), o, domain_bound)
            bad = [x for x in members for y in ys if not (x > n and x <= y)]
            if bad:
                yield FALSE
                return
            risky = undecided or unsure_ys
            ok = all(x > n and x <= y for x in pool for y in ys)
            yield TRUE if ok and not risky else UNKNOWN

    return _rank_from_checks(TRUE if members else UNKNOWN, checks())
