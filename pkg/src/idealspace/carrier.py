"""Encodings of the countable carriers used by every relation in the package.

Every relation is ultimately a relation on the natural numbers; structured
elements (pairs, finite sets, rationals, words, tagged tree symbols) are
mapped to naturals by the bijections below.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Iterator, Sequence

Word = tuple  # finite word over the naturals, e.g. (0, 1, 1)


class Tag(Enum):
    NAT = "nat"
    PAIR = "pair"
    FINSET_NAT_PAIR = "finset-nat-pair"
    RATIONAL = "rational"
    TAGGED_SYMBOL = "tagged-symbol"
    WORD = "word"


@dataclass(frozen=True)
class CarrierCode:
    """A decoded carrier element together with the family it belongs to."""

    tag: Tag
    payload: object

    def encode(self) -> int:
        return _ENCODERS[self.tag](self.payload)

    @classmethod
    def decode(cls, tag: Tag, code: int, family: str = "t1") -> "CarrierCode":
        if tag is Tag.TAGGED_SYMBOL:
            # the symbol family is not recoverable from the code alone
            return cls(tag, decode_symbol(family, code))
        return cls(tag, _DECODERS[tag](code))


# -- pairing -----------------------------------------------------------------

def pair(a: int, b: int) -> int:
    """Cantor pairing."""
    if a < 0 or b < 0:
        raise ValueError("pair() is defined on naturals only")
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("unpair() is defined on naturals only")
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


# -- finite sets -------------------------------------------------------------

def encode_finset(items: Iterable[int]) -> int:
    mask = 0
    for x in items:
        if x < 0:
            raise ValueError("finite sets range over naturals")
        mask |= 1 << x
    return mask


def decode_finset(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def encode_finset_pair(items: Iterable[int], m: int) -> int:
    return pair(encode_finset(items), m)


def decode_finset_pair(code: int) -> tuple[frozenset[int], int]:
    mask, m = unpair(code)
    return decode_finset(mask), m


# omega_* = omega + {*}: * is 0 and n is n + 1
STAR = "*"


def encode_star(x) -> int:
    return 0 if x == STAR else x + 1


def decode_star(n: int):
    return STAR if n == 0 else n - 1


def encode_starset_pair(items: Iterable, m: int) -> int:
    return pair(encode_finset(encode_star(x) for x in items), m)


def decode_starset_pair(code: int) -> tuple[frozenset, int]:
    mask, m = unpair(code)
    return frozenset(decode_star(i) for i in decode_finset(mask)), m


# -- rationals ---------------------------------------------------------------

def canonical(q) -> Fraction:
    """Exact rational in lowest terms (Fraction always normalises)."""
    if isinstance(q, float):
        raise TypeError("floats are not accepted; pass ints, strings or Fractions")
    return Fraction(q)


def rational_less(p, q) -> bool:
    p, q = canonical(p), canonical(q)
    return p.numerator * q.denominator < q.numerator * p.denominator


def mediant(p, q) -> Fraction:
    p, q = canonical(p), canonical(q)
    return Fraction(p.numerator + q.numerator, p.denominator + q.denominator)


def _stern_brocot_index(q: Fraction) -> int:
    # positive rational -> 1-based Stern-Brocot index (path bits after a leading 1)
    # runs of the subtractive walk come from the continued fraction of a/b
    a, b = q.numerator, q.denominator
    index = 1
    while a != b:
        if a < b:
            k = (b - 1) // a
            index <<= k
            b -= k * a
        else:
            k = (a - 1) // b
            index = ((index + 1) << k) - 1
            a -= k * b
    return index


def _stern_brocot_value(index: int) -> Fraction:
    lo_n, lo_d, hi_n, hi_d = 0, 1, 1, 0
    mid_n, mid_d = 1, 1
    for bit in bin(index)[3:]:
        if bit == "0":
            hi_n, hi_d = mid_n, mid_d
        else:
            lo_n, lo_d = mid_n, mid_d
        mid_n, mid_d = lo_n + hi_n, lo_d + hi_d
    return Fraction(mid_n, mid_d)


def encode_rational(q) -> int:
    """Bijection Q -> N: 0 -> 0, positive q -> 2i-1, negative q -> 2i, i its Stern-Brocot index."""
    q = canonical(q)
    if q == 0:
        return 0
    i = _stern_brocot_index(abs(q))
    return 2 * i - 1 if q > 0 else 2 * i


def decode_rational(n: int) -> Fraction:
    if n < 0:
        raise ValueError("rational codes are naturals")
    if n == 0:
        return Fraction(0)
    i = (n + 1) // 2
    v = _stern_brocot_value(i)
    return v if n % 2 == 1 else -v


def decode_dyadic(n: int) -> Fraction:
    """Breadth-first enumeration of the dyadic rationals in (0, 1): 1/2, 1/4, 3/4, 1/8, ..."""
    k = (n + 1).bit_length() - 1
    j = n + 1 - (1 << k)
    return Fraction(2 * j + 1, 1 << (k + 1))


def encode_dyadic(q) -> int:
    q = canonical(q)
    d = q.denominator
    if not (0 < q < 1) or d & (d - 1):
        raise ValueError(f"{q} is not a dyadic rational in (0, 1)")
    k = d.bit_length() - 2
    return (1 << k) - 1 + (q.numerator - 1) // 2


# -- words and tagged symbols ------------------------------------------------

def encode_word(word: Sequence[int]) -> int:
    code = 0
    for a in word:
        code = 1 + pair(code, a)
    return code


def decode_word(code: int) -> Word:
    out = []
    while code:
        code, a = unpair(code - 1)
        out.append(a)
    return tuple(reversed(out))


def word_weight(word: Sequence[int]) -> int:
    return len(word) + sum(word)


def words_upto(weight: int) -> Iterator[Word]:
    """All words with len + sum <= weight, shortest first."""
    frontier = [()]
    while frontier:
        nxt = []
        for w in frontier:
            yield w
            budget = weight - word_weight(w) - 1
            for a in range(budget + 1):
                nxt.append(w + (a,))
        frontier = nxt


def is_prefix(u: Sequence[int], v: Sequence[int]) -> bool:
    return len(u) <= len(v) and tuple(v[: len(u)]) == tuple(u)


def comparable(u: Sequence[int], v: Sequence[int]) -> bool:
    return is_prefix(u, v) or is_prefix(v, u)


@dataclass(frozen=True, order=True)
class Symbol:
    """A tree-space symbol: family, kind, optional index n, and a word.

    Families and kinds:
      t1:            plain, under
      telophase:     under, inf, infstar
      double-origin: round, round-under, pm, square, square-under
    """

    family: str
    kind: str
    word: Word
    n: int = 0

    def __str__(self) -> str:
        w = "".join(map(str, self.word)) or "e"
        if self.family == "t1":
            return w if self.kind == "plain" else f"_{w}_"
        if self.family == "telophase":
            return {"under": f"_{w}_", "inf": f"[{w},oo]", "infstar": f"[{w},oo*]"}[self.kind]
        return {
            "round": f"({self.n},{w})",
            "round-under": f"({self.n},_{w}_)",
            "pm": f"({self.n},{w}+-)",
            "square": f"[{self.n},{w}]",
            "square-under": f"[{self.n},_{w}_]",
        }[self.kind]


SYMBOL_KINDS = {
    "t1": ("plain", "under"),
    "telophase": ("under", "inf", "infstar"),
    "double-origin": ("round", "round-under", "pm", "square", "square-under"),
}


def encode_symbol(sym: Symbol) -> int:
    kinds = SYMBOL_KINDS[sym.family]
    k = kinds.index(sym.kind)
    w = encode_word(sym.word)
    if sym.family == "double-origin":
        return len(kinds) * pair(sym.n, w) + k
    return len(kinds) * w + k


def decode_symbol(family: str, code: int) -> Symbol:
    kinds = SYMBOL_KINDS[family]
    base, k = divmod(code, len(kinds))
    if family == "double-origin":
        n, w = unpair(base)
        return Symbol(family, kinds[k], decode_word(w), n)
    return Symbol(family, kinds[k], decode_word(base))


# -- trees -------------------------------------------------------------------

class TreePredicate:
    """Decidable subset of words, checked for prefix closure on every query."""

    def __init__(self, membership: Callable[[Word], bool], description: str):
        self._membership = membership
        self.description = description
        self._cache: dict[Word, bool] = {}
        self._lock = threading.Lock()

    def __contains__(self, word) -> bool:
        word = tuple(word)
        with self._lock:
            hit = self._cache.get(word)
        if hit is not None:
            return hit
        inside = bool(self._membership(word))
        if inside and word:
            parent = word[:-1]
            if parent not in self:
                raise ValueError(
                    f"tree {self.description!r} is not prefix-closed: "
                    f"{word} is in but {parent} is not"
                )
        with self._lock:
            self._cache[word] = inside
        return inside

    def __repr__(self) -> str:
        return f"TreePredicate({self.description!r})"

    @classmethod
    def full(cls) -> "TreePredicate":
        return cls(lambda w: True, "full")

    @classmethod
    def root_only(cls) -> "TreePredicate":
        return cls(lambda w: len(w) == 0, "root-only")

    @classmethod
    def depth_bounded(cls, depth: int) -> "TreePredicate":
        return cls(lambda w: len(w) <= depth, f"depth<={depth}")

    @classmethod
    def from_words(cls, words: Iterable[Sequence[int]]) -> "TreePredicate":
        """Prefix closure of an explicit finite word list."""
        members = {()}
        for w in words:
            w = tuple(w)
            for i in range(len(w) + 1):
                members.add(w[:i])
        return cls(lambda w: w in members, f"closure of {sorted(members)}")

    @classmethod
    def path(cls, path: Callable[[int], int]) -> "TreePredicate":
        """Tree whose only infinite branch is ``path`` (prefixes of it)."""
        return cls(lambda w: all(w[i] == path(i) for i in range(len(w))), "single path")


# -- codec registry for CarrierCode ------------------------------------------

def _enc_finset_pair(p):
    items, m = p
    return encode_finset_pair(items, m)


_ENCODERS: dict[Tag, Callable[[object], int]] = {
    Tag.NAT: lambda n: int(n),
    Tag.PAIR: lambda p: pair(*p),
    Tag.FINSET_NAT_PAIR: _enc_finset_pair,
    Tag.RATIONAL: encode_rational,
    Tag.WORD: encode_word,
    Tag.TAGGED_SYMBOL: encode_symbol,
}

_DECODERS: dict[Tag, Callable[[int], object]] = {
    Tag.NAT: lambda n: n,
    Tag.PAIR: unpair,
    Tag.FINSET_NAT_PAIR: decode_finset_pair,
    Tag.RATIONAL: decode_rational,
    Tag.WORD: decode_word,
}
