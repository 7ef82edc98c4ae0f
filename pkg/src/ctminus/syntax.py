"""Abstract syntax for the language of arithmetic.

Kernel terms are ``0``, ``S``, ``+``, ``*`` and variables ``v<n>``; kernel
formulas are ``=``, ``!``, ``|`` and ``E``.  The derived connectives
(``&``, ``->``, ``<->``, ``A``) are expanded into the kernel as soon as they
are built, so every :class:`Formula` value is a kernel tree.

Nodes are immutable and interned, so structurally equal nodes are the same
object.  Each node caches its hash, its variable sets and its depth, which
keeps heavily shared DAGs (the gamma families used by the rank experiments)
cheap to hash and compare.
"""

from __future__ import annotations

import re
import sys
import threading
import weakref
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class OpenTermSubstitution(ValueError):
    """A substitution tried to plug in a term with free variables."""


class InadmissibleValuation(ValueError):
    """A valuation does not cover every free variable of the formula."""


class InvalidParameter(ValueError):
    pass


class ParseError(SyntaxError):
    """Malformed input; ``offset`` is the 0-based position of the problem."""

    def __init__(self, message: str, text: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.text = text
        self.offset = offset


# ---------------------------------------------------------------------------
# node classes
#
# Nodes are hash-consed: constructing a node equal to a live one returns that
# very object.  Equality is therefore identity, which keeps comparisons O(1)
# even between separately built copies of large shared DAGs.  The table holds
# weak references; a parent keeps its children alive, so child ids are stable
# keys for as long as the parent's entry exists.

_INTERN: dict = {}
_INTERN_LOCK = threading.RLock()  # reentrant: a weakref callback may fire while held


def _forget(key):
    def drop(ref):
        with _INTERN_LOCK:
            if _INTERN.get(key) is ref:
                del _INTERN[key]

    return drop


def _intern(cls, key, values):
    ref = _INTERN.get(key)
    if ref is not None:
        node = ref()
        if node is not None:
            return node
    with _INTERN_LOCK:
        ref = _INTERN.get(key)
        node = None if ref is None else ref()
        if node is None:
            node = object.__new__(cls)
            for name, value in zip(cls._fields, values):
                object.__setattr__(node, name, value)
            node._build()
            _INTERN[key] = weakref.ref(node, _forget(key))
    return node


class Node:
    __slots__ = ("__weakref__",)
    _fields: tuple = ()

    def _build(self):
        raise NotImplementedError

    def _set(self, **kw):
        for k, v in kw.items():
            object.__setattr__(self, k, v)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} nodes are immutable")

    def __delattr__(self, name):
        raise AttributeError(f"{type(self).__name__} nodes are immutable")

    def __reduce__(self):
        return (type(self), tuple(getattr(self, n) for n in self._fields))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __eq__(self, other):
        return self is other

    def __ne__(self, other):
        return self is not other

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}<{render(self, limit=120)}>"


class Term(Node):
    __slots__ = ("_hash", "_vars", "_value", "_size")


class Formula(Node):
    __slots__ = ("_hash", "_fv", "_vars", "_sd", "_size")

    @property
    def free_vars(self) -> frozenset:
        return self._fv

    @property
    def is_sentence(self) -> bool:
        return not self._fv


def _check_index(value):
    if type(value) is not int or value < 0:
        raise InvalidParameter(f"variable index must be a natural, got {value!r}")


def _check_kind(value, kind, role):
    if not isinstance(value, kind):
        raise TypeError(f"{role} must be a {kind.__name__}, got {type(value).__name__}")


class Zero(Term):
    __slots__ = ()

    def __new__(cls):
        return _intern(cls, (0,), ())

    def _build(self):
        self._set(_hash=hash(("0",)), _vars=frozenset(), _value=0, _size=1)


class Succ(Term):
    __slots__ = ("arg",)
    _fields = ("arg",)

    def __new__(cls, arg: Term):
        _check_kind(arg, Term, "argument")
        return _intern(cls, (1, id(arg)), (arg,))

    def _build(self):
        a = self.arg
        self._set(
            _hash=hash(("S", a._hash)),
            _vars=a._vars,
            _value=None if a._value is None else a._value + 1,
            _size=a._size + 1,
        )


class _BinaryTerm(Term):
    __slots__ = ("left", "right")
    _fields = ("left", "right")
    _symbol = ""
    _tag = -1

    def __new__(cls, left: Term, right: Term):
        _check_kind(left, Term, "left operand")
        _check_kind(right, Term, "right operand")
        return _intern(cls, (cls._tag, id(left), id(right)), (left, right))

    def _build(self):
        l, r = self.left, self.right
        v = None if l._value is None or r._value is None else self._apply(l._value, r._value)
        self._set(
            _hash=hash((self._symbol, l._hash, r._hash)),
            _vars=l._vars | r._vars,
            _value=v,
            _size=l._size + r._size + 1,
        )


class Add(_BinaryTerm):
    __slots__ = ()
    _symbol = "+"
    _tag = 2

    @staticmethod
    def _apply(x, y):
        return x + y


class Mul(_BinaryTerm):
    __slots__ = ()
    _symbol = "*"
    _tag = 3

    @staticmethod
    def _apply(x, y):
        return x * y


class Var(Term):
    __slots__ = ("index",)
    _fields = ("index",)

    def __new__(cls, index: int):
        _check_index(index)
        return _intern(cls, (4, index), (index,))

    def _build(self):
        self._set(_hash=hash(("v", self.index)), _vars=frozenset((self.index,)), _value=None, _size=1)


class Eq(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __new__(cls, left: Term, right: Term):
        _check_kind(left, Term, "left side")
        _check_kind(right, Term, "right side")
        return _intern(cls, (5, id(left), id(right)), (left, right))

    def _build(self):
        l, r = self.left, self.right
        vs = l._vars | r._vars
        self._set(_hash=hash(("=", l._hash, r._hash)), _fv=vs, _vars=vs, _sd=1, _size=1)


class Not(Formula):
    __slots__ = ("body",)
    _fields = ("body",)

    def __new__(cls, body: Formula):
        _check_kind(body, Formula, "body")
        return _intern(cls, (6, id(body)), (body,))

    def _build(self):
        b = self.body
        pair = conjuncts(self)
        if pair is not None:
            # a kernel-encoded conjunction counts as one connective
            sd = max(pair[0]._sd, pair[1]._sd) + 1
        else:
            sd = b._sd + 1
        self._set(_hash=hash(("!", b._hash)), _fv=b._fv, _vars=b._vars, _sd=sd, _size=b._size + 1)


class Or(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __new__(cls, left: Formula, right: Formula):
        _check_kind(left, Formula, "left disjunct")
        _check_kind(right, Formula, "right disjunct")
        return _intern(cls, (7, id(left), id(right)), (left, right))

    def _build(self):
        l, r = self.left, self.right
        self._set(
            _hash=hash(("|", l._hash, r._hash)),
            _fv=l._fv | r._fv,
            _vars=l._vars | r._vars,
            _sd=max(l._sd, r._sd) + 1,
            _size=l._size + r._size + 1,
        )


class Exists(Formula):
    __slots__ = ("var", "body")
    _fields = ("var", "body")

    def __new__(cls, var: int, body: Formula):
        _check_index(var)
        _check_kind(body, Formula, "body")
        return _intern(cls, (8, var, id(body)), (var, body))

    def _build(self):
        b = self.body
        self._set(
            _hash=hash(("E", self.var, b._hash)),
            _fv=b._fv - {self.var},
            _vars=b._vars | {self.var},
            _sd=b._sd + 1,
            _size=b._size + 1,
        )


Syntax = Union[Term, Formula]


def conjuncts(f: Formula):
    """Return ``(a, b)`` when ``f`` is the kernel form ``!(!a | !b)``, else None."""
    if type(f) is Not:
        o = f.body
        if type(o) is Or and type(o.left) is Not and type(o.right) is Not:
            return o.left.body, o.right.body
    return None


# ---------------------------------------------------------------------------
# constructors and derived connectives

ZERO = Zero()


@lru_cache(maxsize=4096)
def numeral(n: int) -> Term:
    """``S...S0`` with ``n`` successors."""
    if n < 0:
        raise InvalidParameter("numerals denote naturals")
    t = ZERO
    start = 0
    # reuse the largest cached smaller numeral when available
    if n > 64:
        start = n - n % 64
        t = numeral(start)
    for _ in range(n - start):
        t = Succ(t)
    return t


def const_term(n: int) -> Term:
    """A short closed term with value ``n``.

    Small values give the plain numeral.  Large ones (for instance Goedel
    codes) use binary expansion with ``S(S(0))``, ``+`` and ``*``.
    """
    if n < 0:
        raise InvalidParameter("constants denote naturals")
    if n <= 16:
        return numeral(n)
    two = numeral(2)
    # Horner: t = 2*t + bit
    t = numeral(1)
    for bit in bin(n)[3:]:
        t = Mul(two, t)
        if bit == "1":
            t = Succ(t)
    return t


def neg(f: Formula) -> Formula:
    return Not(f)


def disj(a: Formula, b: Formula) -> Formula:
    return Or(a, b)


def conj(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


def forall(v: int, f: Formula) -> Formula:
    return Not(Exists(v, Not(f)))


def big_and(fs: Iterable[Formula]) -> Formula:
    """Left-grouped conjunction of a nonempty sequence."""
    it = iter(fs)
    try:
        acc = next(it)
    except StopIteration:
        raise InvalidParameter("empty conjunction") from None
    for f in it:
        acc = conj(acc, f)
    return acc


def big_or(fs: Iterable[Formula]) -> Formula:
    """Left-grouped disjunction of a nonempty sequence."""
    it = iter(fs)
    try:
        acc = next(it)
    except StopIteration:
        raise InvalidParameter("empty disjunction") from None
    for f in it:
        acc = Or(acc, f)
    return acc


def fresh_var(*nodes: Node, at_least: int = 0) -> int:
    """The least variable index above every variable used in ``nodes``."""
    top = at_least - 1
    for n in nodes:
        if n._vars:
            top = max(top, max(n._vars))
    return top + 1


def le(x: Term, t: Term) -> Formula:
    """``x <= t`` written as ``E w. (x + w = t)`` with ``w`` fresh."""
    w = fresh_var(x, t)
    return Exists(w, Eq(Add(x, Var(w)), t))


def gt(x: Term, t: Term) -> Formula:
    return Not(le(x, t))


def ge_num(i: int, var: int = 0) -> Formula:
    """``v >= i`` written as ``E y. v = y + i``."""
    y = var + 1
    return Exists(y, Eq(Var(var), Add(Var(y), numeral(i))))


def placeholder(k: int) -> Formula:
    """A distinct sentence ``E vk. (vk = vk)`` used as an opaque atom."""
    return Exists(k, Eq(Var(k), Var(k)))


# ---------------------------------------------------------------------------
# structural operations


def free_vars(f: Formula) -> frozenset:
    return f._fv


def all_vars(x: Node) -> frozenset:
    """Every variable index occurring in ``x``, free or bound."""
    return x._vars


def syntactic_depth(f: Formula) -> int:
    return f._sd


def tree_size(x: Node) -> int:
    """Number of formula nodes in the unshared tree (terms count as part of atoms)."""
    return x._size


def height(x: Node) -> int:
    """Longest root-to-leaf path counting every kernel node, terms included.

    Code size under pairing grows with this measure rather than with
    :func:`syntactic_depth`.
    """
    memo: dict = {}

    def go(n):
        hit = memo.get(id(n))
        if hit is None:
            kids = [getattr(n, f) for f in n._fields]
            kids = [k for k in kids if isinstance(k, Node)]
            hit = 1 + max((go(k) for k in kids), default=0)
            memo[id(n)] = hit
        return hit

    return go(x)


def direct_subformulas(f: Formula) -> list:
    if type(f) is Eq:
        return []
    if type(f) is Not:
        return [f.body]
    if type(f) is Or:
        return [f.left, f.right]
    return [f.body]


def subformulas(f: Formula) -> list:
    """Distinct subformulas of ``f`` (including ``f``), children before parents."""
    seen = set()
    out = []
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if done:
            out.append(g)
            continue
        if g in seen:
            continue
        seen.add(g)
        stack.append((g, True))
        for c in direct_subformulas(g):
            if c not in seen:
                stack.append((c, False))
    return out


def _subst_term(t: Term, s: Mapping[int, Term]) -> Term:
    if not (t._vars & s.keys()):
        return t
    tt = type(t)
    if tt is Var:
        return s[t.index]
    if tt is Succ:
        return Succ(_subst_term(t.arg, s))
    if tt is Add:
        return Add(_subst_term(t.left, s), _subst_term(t.right, s))
    return Mul(_subst_term(t.left, s), _subst_term(t.right, s))


def _subst(f: Formula, s: Mapping[int, Term], active: frozenset, memo: dict) -> Formula:
    if not (f._fv & active):
        return f
    key = (id(f), active)
    hit = memo.get(key)
    if hit is not None:
        return hit
    tf = type(f)
    if tf is Eq:
        sub = {v: s[v] for v in active} if len(active) < len(s) else s
        out = Eq(_subst_term(f.left, sub), _subst_term(f.right, sub))
    elif tf is Not:
        out = Not(_subst(f.body, s, active, memo))
    elif tf is Or:
        out = Or(_subst(f.left, s, active, memo), _subst(f.right, s, active, memo))
    elif f.var in active:
        out = Exists(f.var, _subst(f.body, s, active - {f.var}, memo))
    else:
        out = Exists(f.var, _subst(f.body, s, active, memo))
    memo[key] = out
    return out


def substitute(x, subst: Mapping[int, Term]):
    """Simultaneously replace free variables by closed terms."""
    for v, t in subst.items():
        if t._vars:
            raise OpenTermSubstitution(f"image of v{v} is not closed: {render(t)}")
    if not subst:
        return x
    if isinstance(x, Term):
        return _subst_term(x, subst)
    s = dict(subst)
    return _subst(x, s, frozenset(s), {})


def apply_valuation(f: Formula, a: Mapping[int, int]) -> Formula:
    """Replace each free variable by the numeral of its value."""
    missing = f._fv - a.keys()
    if missing:
        raise InadmissibleValuation(f"no value for {sorted(missing)}")
    return substitute(f, {v: numeral(a[v]) for v in f._fv})


def rename_var(f: Formula, old: int, new: int) -> Formula:
    """Rename free occurrences of ``old`` to the unused variable ``new``."""
    if new in f._vars:
        raise InvalidParameter(f"v{new} already occurs in the formula")
    memo: dict = {}

    def term(t):
        if old not in t._vars:
            return t
        tt = type(t)
        if tt is Var:
            return Var(new)
        if tt is Succ:
            return Succ(term(t.arg))
        if tt is Add:
            return Add(term(t.left), term(t.right))
        return Mul(term(t.left), term(t.right))

    def go(g):
        if old not in g._fv:
            return g
        hit = memo.get(id(g))
        if hit is not None:
            return hit
        tg = type(g)
        if tg is Eq:
            out = Eq(term(g.left), term(g.right))
        elif tg is Not:
            out = Not(go(g.body))
        elif tg is Or:
            out = Or(go(g.left), go(g.right))
        else:
            out = Exists(g.var, go(g.body))
        memo[id(g)] = out
        return out

    return go(f)


# ---------------------------------------------------------------------------
# the eta family


def build_eta(b: int) -> Formula:
    """``E x1 ... E xb. (v = v & x0 = x0 & ... & xb = xb)``.

    ``v`` is ``v0`` and ``x_i`` is ``v(i+1)``; the conjunction is grouped to
    the left and ``x0`` stays free.
    """
    if b < 1:
        raise InvalidParameter("eta needs b >= 1")
    return _eta(b)


@lru_cache(maxsize=256)
def _eta(b: int) -> Formula:
    matrix = Eq(Var(0), Var(0))
    for i in range(b + 1):
        matrix = conj(matrix, Eq(Var(i + 1), Var(i + 1)))
    f = matrix
    for i in range(b, 0, -1):
        f = Exists(i + 1, f)
    return f


def eta_prefixes(b: int) -> list:
    """The chain of eta_b with its first j quantifiers removed, j = 0..b."""
    f = build_eta(b)
    out = [f]
    for _ in range(b):
        f = f.body
        out.append(f)
    return out


def close_eta(b: int, x: int) -> Formula:
    """The sentence eta_b with ``v`` set to ``x`` and ``x0`` set to 0."""
    return substitute(build_eta(b), {0: numeral(x), 1: ZERO})


def eta_at(b: int) -> Formula:
    """eta_b with ``x0`` closed, leaving ``v0`` as its only free variable."""
    return substitute(build_eta(b), {1: ZERO})


# ---------------------------------------------------------------------------
# rendering


class _Overflow(Exception):
    pass


def render(x: Node, limit: int | None = None) -> str:
    """Kernel rendering; with ``limit`` the output is cut and ends in '...'."""
    out: list = []
    budget = [limit if limit is not None else -1]

    def emit(s):
        out.append(s)
        if budget[0] >= 0:
            budget[0] -= len(s)
            if budget[0] < 0:
                raise _Overflow

    def term(t):
        tt = type(t)
        if tt is Zero:
            emit("0")
        elif tt is Var:
            emit(f"v{t.index}")
        elif tt is Succ:
            emit("S(")
            term(t.arg)
            emit(")")
        else:
            emit("(")
            term(t.left)
            emit(" + " if tt is Add else " * ")
            term(t.right)
            emit(")")

    def form(f, wrap_atom=False):
        tf = type(f)
        if tf is Eq:
            if wrap_atom:
                emit("(")
            term(f.left)
            emit(" = ")
            term(f.right)
            if wrap_atom:
                emit(")")
        elif tf is Not:
            emit("!")
            form(f.body, True)
        elif tf is Or:
            emit("(")
            form(f.left)
            emit(" | ")
            form(f.right)
            emit(")")
        else:
            emit(f"E v{f.var}. ")
            form(f.body, True)

    try:
        if isinstance(x, Term):
            term(x)
        else:
            form(x)
    except _Overflow:
        return "".join(out)[:limit] + "..."
    return "".join(out)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(<->|->)|(v\s*\d+)|(\d+)|([A-Za-z]+)|(\S))")


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        if m.end() == pos:
            break
        start = m.start(m.lastindex)
        tok = m.group(m.lastindex)
        kind = m.lastindex
        if kind == 2:
            toks.append(("var", int(tok[1:].strip()), start))
        elif kind == 3:
            if tok != "0":
                raise ParseError(f"unexpected number {tok!r}", text, start)
            toks.append(("0", tok, start))
        elif kind == 4:
            # letters: S, E, A are the only words; split runs like "SS" are not allowed
            if tok not in ("S", "E", "A"):
                raise ParseError(f"unexpected word {tok!r}", text, start)
            toks.append((tok, tok, start))
        else:
            toks.append((tok, tok, start))
        pos = m.end()
    toks.append(("eof", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, msg):
        tok = self.peek()
        raise ParseError(msg, self.text, tok[2])

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            self.fail(f"expected {kind!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def term(self) -> Term:
        kind, val, _ = self.peek()
        if kind == "0":
            self.i += 1
            return ZERO
        if kind == "var":
            self.i += 1
            return Var(val)
        if kind == "S":
            self.i += 1
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Succ(t)
        if kind == "(":
            self.i += 1
            l = self.term()
            op = self.peek()[0]
            if op not in ("+", "*"):
                self.fail("expected '+' or '*'")
            self.i += 1
            r = self.term()
            self.expect(")")
            return Add(l, r) if op == "+" else Mul(l, r)
        self.fail("expected a term")

    def formula(self) -> Formula:
        kind, val, _ = self.peek()
        if kind == "!":
            self.i += 1
            return Not(self.formula())
        if kind in ("E", "A"):
            self.i += 1
            v = self.expect("var")[1]
            self.expect(".")
            body = self.formula()
            return Exists(v, body) if kind == "E" else forall(v, body)
        if kind == "(":
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
            self.i += 1
            l = self.formula()
            op = self.peek()[0]
            if op == ")":
                self.i += 1
                return l
            if op not in ("|", "&", "->", "<->"):
                self.fail("expected a connective")
            self.i += 1
            r = self.formula()
            self.expect(")")
            if op == "|":
                return Or(l, r)
            if op == "&":
                return conj(l, r)
            if op == "->":
                return implies(l, r)
            return iff(l, r)
        return self.atom()

    def atom(self) -> Formula:
        l = self.term()
        self.expect("=")
        r = self.term()
        return Eq(l, r)

    def done(self):
        if self.peek()[0] != "eof":
            self.fail("trailing input")


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.done()
    return t


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.done()
    return f


# ---------------------------------------------------------------------------
# closed-subterm abstraction


def abstract_closed_terms(f: Formula, start: int | None = None):
    """Split ``f`` into a template and its maximal closed subterms.

    Each maximal closed subterm is replaced, left to right, by a fresh
    variable ``v(start)``, ``v(start+1)``, ...  Returns the template, the
    list of fresh variable indices and the list of replaced terms, so that
    ``substitute(template, dict(zip(vars, terms))) == f``.
    """
    if start is None:
        start = fresh_var(f)
    holes: list = []
    terms: list = []

    def term(t):
        if not t._vars:
            v = start + len(holes)
            holes.append(v)
            terms.append(t)
            return Var(v)
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
            l = term(g.left)
            return Eq(l, term(g.right))
        if tg is Not:
            return Not(go(g.body))
        if tg is Or:
            l = go(g.left)
            return Or(l, go(g.right))
        return Exists(g.var, go(g.body))

    return go(f), holes, terms
