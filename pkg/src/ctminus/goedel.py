"""Goedel coding of terms, formulas and finite sequences.

Every node is coded as ``pair(tag, payload)`` with the Cantor pairing:

====  ========  ==========================
tag   node      payload
====  ========  ==========================
0     Zero      0
1     Succ      code of the argument
2     Add       pair(left, right)
3     Mul       pair(left, right)
4     Var       the variable index
5     Eq        pair(left, right)
6     Not       code of the body
7     Or        pair(left, right)
8     Exists    pair(variable, body)
====  ========  ==========================

A sequence ``[x1, ..., xn]`` is ``pair(n, p)`` where ``p`` pairs the items
as a balanced tree, left half first: ``[x1, x2, x3]`` gives
``pair(pair(x1, x2), x3)``.  The empty sequence has ``p = 0``.  All arithmetic is exact on Python ints.
"""

from __future__ import annotations

import threading
from math import isqrt
from typing import Sequence

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
    Zero,
)

TERM_TAGS = {Zero: 0, Succ: 1, Add: 2, Mul: 3, Var: 4}
FORMULA_TAGS = {Eq: 5, Not: 6, Or: 7, Exists: 8}


class NotATermCode(ValueError):
    pass


class NotAFormulaCode(ValueError):
    pass


class NotASeqCode(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


def pair(x: int, y: int) -> int:
    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


# ---------------------------------------------------------------------------
# terms and formulas


def encode_term(t: Term) -> int:
    tt = type(t)
    if tt is Zero:
        return pair(0, 0)
    if tt is Succ:
        return pair(1, encode_term(t.arg))
    if tt is Var:
        return pair(4, t.index)
    return pair(TERM_TAGS[tt], pair(encode_term(t.left), encode_term(t.right)))


def encode_formula(f: Formula) -> int:
    tf = type(f)
    if tf is Eq:
        return pair(5, pair(encode_term(f.left), encode_term(f.right)))
    if tf is Not:
        return pair(6, encode_formula(f.body))
    if tf is Or:
        return pair(7, pair(encode_formula(f.left), encode_formula(f.right)))
    return pair(8, pair(f.var, encode_formula(f.body)))


def encode(x) -> int:
    return encode_term(x) if isinstance(x, Term) else encode_formula(x)


def _decode_term(c: int):
    tag, payload = unpair(c)
    if tag == 0:
        return ZERO if payload == 0 else None
    if tag == 1:
        # payload < c always holds for tag >= 1, so recursion terminates
        a = _decode_term(payload)
        return None if a is None else Succ(a)
    if tag in (2, 3):
        l, r = unpair(payload)
        lt = _decode_term(l)
        if lt is None:
            return None
        rt = _decode_term(r)
        if rt is None:
            return None
        return Add(lt, rt) if tag == 2 else Mul(lt, rt)
    if tag == 4:
        return Var(payload)
    return None


def _decode_formula(c: int):
    tag, payload = unpair(c)
    if tag == 5:
        l, r = unpair(payload)
        lt = _decode_term(l)
        if lt is None:
            return None
        rt = _decode_term(r)
        return None if rt is None else Eq(lt, rt)
    if tag == 6:
        b = _decode_formula(payload)
        return None if b is None else Not(b)
    if tag == 7:
        l, r = unpair(payload)
        lf = _decode_formula(l)
        if lf is None:
            return None
        rf = _decode_formula(r)
        return None if rf is None else Or(lf, rf)
    if tag == 8:
        v, b = unpair(payload)
        bf = _decode_formula(b)
        return None if bf is None else Exists(v, bf)
    return None


def decode_term(c: int) -> Term:
    t = _decode_term(c) if c >= 0 else None
    if t is None:
        raise NotATermCode(c)
    return t


def decode_formula(c: int) -> Formula:
    f = _decode_formula(c) if c >= 0 else None
    if f is None:
        raise NotAFormulaCode(c)
    return f


# ---------------------------------------------------------------------------
# sequences


def _split(n: int) -> int:
    return (n + 1) // 2


def _pair_tree(xs: Sequence[int]) -> int:
    if len(xs) == 1:
        return xs[0]
    m = _split(len(xs))
    return pair(_pair_tree(xs[:m]), _pair_tree(xs[m:]))


def encode_seq(xs: Sequence[int]) -> int:
    """``pair(length, body)`` with the items paired as a balanced tree.

    Balancing keeps the pairing depth logarithmic in the length, so codes
    grow polynomially in the item sizes instead of doubling per item.
    """
    xs = list(xs)
    if not xs:
        return pair(0, 0)
    return pair(len(xs), _pair_tree(xs))


def decode_seq(c: int) -> list:
    n, body = unpair(c)
    if n == 0:
        if body != 0:
            raise NotASeqCode(c)
        return []
    out: list = []
    work = [(body, n)]
    while work:
        z, k = work.pop()
        if k == 1:
            out.append(z)
            continue
        l, r = unpair(z)
        m = _split(k)
        work.append((r, k - m))
        work.append((l, m))
    return out


def seq_len(c: int) -> int:
    n, body = unpair(c)
    if n == 0 and body != 0:
        raise NotASeqCode(c)
    return n


def seq_get(c: int, i: int) -> int:
    n = seq_len(c)
    if not 0 <= i < n:
        raise IndexOutOfRange(f"index {i} outside a sequence of length {n}")
    body = unpair(c)[1]
    while n > 1:
        l, r = unpair(body)
        m = _split(n)
        if i < m:
            body, n = l, m
        else:
            body, n, i = r, n - m, i - m
    return body


# ---------------------------------------------------------------------------
# recognizers (total on all naturals)


def is_var(c: int) -> bool:
    return c >= 0 and unpair(c)[0] == 4


def is_term(c: int) -> bool:
    return c >= 0 and _decode_term(c) is not None


def is_closed_term(c: int) -> bool:
    t = _decode_term(c) if c >= 0 else None
    return t is not None and not t._vars


def is_form(c: int) -> bool:
    return c >= 0 and _decode_formula(c) is not None


def is_form_le1(c: int) -> bool:
    f = _decode_formula(c) if c >= 0 else None
    return f is not None and len(f._fv) <= 1


def is_sent(c: int) -> bool:
    f = _decode_formula(c) if c >= 0 else None
    return f is not None and not f._fv


def _seq_items(c: int):
    if c < 0:
        return None
    try:
        return decode_seq(c)
    except NotASeqCode:
        return None


def is_termseq(c: int) -> bool:
    xs = _seq_items(c)
    return xs is not None and all(is_term(x) for x in xs)


def is_cltermseq(c: int) -> bool:
    xs = _seq_items(c)
    return xs is not None and all(is_closed_term(x) for x in xs)


# ---------------------------------------------------------------------------
# enumerations


class _CodeEnumeration:
    """Lazily extended list of the naturals passing a recognizer, in order."""

    def __init__(self, decode, keep):
        self._decode = decode
        self._keep = keep
        self._items: list = []
        self._next = 0
        self._lock = threading.Lock()

    def __getitem__(self, i: int):
        if i < 0:
            raise IndexOutOfRange(i)
        with self._lock:
            while len(self._items) <= i:
                c = self._next
                self._next += 1
                obj = self._decode(c)
                if obj is not None and self._keep(obj):
                    self._items.append((c, obj))
            return self._items[i]

    def upto(self, bound: int) -> list:
        """All items with code at most ``bound`` (the enumeration is infinite)."""
        out = []
        i = 0
        while True:
            c, obj = self[i]
            if c > bound:
                return out
            out.append((c, obj))
            i += 1


def _decode_closed_seq(c: int):
    xs = _seq_items(c)
    if xs is None or not all(is_closed_term(x) for x in xs):
        return None
    return tuple(decode_term(x) for x in xs)


_FORMULAS_LE1 = _CodeEnumeration(_decode_formula, lambda f: len(f._fv) <= 1)
_CLOSED_SEQS = _CodeEnumeration(_decode_closed_seq, lambda xs: True)


def nth_formula_le1(i: int) -> tuple:
    """``(code, formula)`` for the i-th code (in increasing order) with at most one free variable."""
    return _FORMULAS_LE1[i]


def closed_term_seqs(bound: int, length: int | None = None) -> list:
    """``(code, terms)`` for every closed-term sequence with code at most ``bound``."""
    out = []
    for c, terms in _CLOSED_SEQS.upto(bound):
        if length is None or len(terms) == length:
            out.append((c, terms))
    return out
