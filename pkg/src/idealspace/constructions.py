"""Space-level constructions: product, coproduct, and making a co-c.e.
closed set {I : I misses U} open by re-presenting the space.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import carrier as cc
from .closures import transitive_closure
from .ideals import check_ideal
from .morphisms import FunctionCode
from .relations import (
    HOLDS,
    FiniteRelation,
    FiniteSource,
    RelationSource,
    Status,
    Verdict,
)

STAR = cc.STAR


# -- product and coproduct ---------------------------------------------------

class Product(RelationSource):
    """(a,b) < (a',b') iff a <1 a' and b <2 b'; element (a,b) is pair(a, b)."""

    def __init__(self, left: RelationSource, right: RelationSource):
        super().__init__(f"({left.label} x {right.label})")
        self.left, self.right = left, right
        self.constant = left.constant and right.constant

    def _pairs(self, stage):
        r1 = self.left.enumerate_upto(stage)
        r2 = self.right.enumerate_upto(stage)
        return {(cc.pair(a, b), cc.pair(a2, b2)) for a, a2 in r1 for b, b2 in r2}

    def _carrier(self, stage):
        return {cc.pair(a, b) for a in self.left.carrier_upto(stage)
                for b in self.right.carrier_upto(stage)}

    def describe(self, code):
        a, b = cc.unpair(code)
        return f"({self.left.describe(a)},{self.right.describe(b)})"


class Coproduct(RelationSource):
    """Left elements at even codes 2a, right elements at odd codes 2b+1."""

    def __init__(self, left: RelationSource, right: RelationSource):
        super().__init__(f"({left.label} + {right.label})")
        self.left, self.right = left, right
        self.constant = left.constant and right.constant

    def _pairs(self, stage):
        out = {(2 * a, 2 * b) for a, b in self.left.enumerate_upto(stage)}
        out |= {(2 * a + 1, 2 * b + 1) for a, b in self.right.enumerate_upto(stage)}
        return out

    def _carrier(self, stage):
        return {2 * a for a in self.left.carrier_upto(stage)} | {
            2 * b + 1 for b in self.right.carrier_upto(stage)}

    def describe(self, code):
        side, x = divmod(code, 2)[::-1]
        return f"inl {self.left.describe(x)}" if side == 0 else f"inr {self.right.describe(x)}"


def product(r1: RelationSource, r2: RelationSource) -> RelationSource:
    return Product(r1, r2)


def coproduct(r1: RelationSource, r2: RelationSource) -> RelationSource:
    return Coproduct(r1, r2)


def _finite_code(pairs, src, tgt, label):
    return FunctionCode(FiniteSource(FiniteRelation((), pairs), label), src, tgt, label)


def projection_codes(prod: Product, stage: int = 0) -> tuple[FunctionCode, FunctionCode]:
    """(a,b) R c iff c < a (resp. c < b): evaluates as I x J -> I and -> J."""
    left = prod.left.enumerate_upto(stage)
    right = prod.right.enumerate_upto(stage)
    els = sorted(prod.carrier_upto(stage))
    p1, p2 = set(), set()
    for e in els:
        a, b = cc.unpair(e)
        p1.update((e, c) for c, t in left if t == a)
        p2.update((e, c) for c, t in right if t == b)
    return (_finite_code(p1, prod, prod.left, "proj1"), _finite_code(p2, prod, prod.right, "proj2"))


def injection_codes(cop: Coproduct, stage: int = 0) -> tuple[FunctionCode, FunctionCode]:
    """a R 2c iff c < a (left), b R 2c+1 iff c < b (right)."""
    i1 = {(a, 2 * c) for c, a in cop.left.enumerate_upto(stage)}
    i2 = {(b, 2 * c + 1) for c, b in cop.right.enumerate_upto(stage)}
    return (_finite_code(i1, cop.left, cop, "inj1"), _finite_code(i2, cop.right, cop, "inj2"))


# -- enumerable sets ---------------------------------------------------------

class SetSource:
    """Stage-enumerable set of naturals; ``contains(x, s)`` is monotone in s."""

    label = "set"
    constant = False

    def contains(self, x, stage: int) -> bool:
        raise NotImplementedError

    def members_upto(self, stage: int) -> frozenset:
        """U^(stage): members x <= stage visible at the stage."""
        return frozenset(x for x in range(stage + 1) if self.contains(x, stage))


class FiniteSet(SetSource):
    constant = True

    def __init__(self, items: Iterable[int]):
        self.items = frozenset(int(x) for x in items)
        self.label = "{" + ",".join(map(str, sorted(self.items))) + "}"

    def contains(self, x, stage):
        return x in self.items

    def members_upto(self, stage):
        return frozenset(x for x in self.items if x <= stage)


class PredicateSet(SetSource):
    def __init__(self, test: Callable[[int, int], bool], label: str = "set"):
        self._test = test
        self.label = label

    def contains(self, x, stage):
        return self._test(x, stage)


# -- extension ---------------------------------------------------------------

@dataclass
class ExtensionSpec:
    base: RelationSource
    u_set: SetSource | None = None
    family: list[SetSource] = field(default_factory=list)
    max_subset: int | None = None

    def sets(self) -> list[SetSource]:
        return ([self.u_set] if self.u_set is not None else []) + list(self.family)


class Extended(RelationSource):
    """Relation on codes <F, m> with F a finite subset of base elements plus *.

    <F,m> < <G,n> iff
      (1) m < n,
      (2) * in F implies * in G,
      (3) some y in G\\{*} has x < y for all x in F\\{*},
      (4) * in G or G meets U,
      (5) if * in F, then no y in F\\{*} has x < y for an x <= n in U^(n),
    with < and U read at stage n.  Codes are encode_starset_pair(F, m).
    """

    decidable = True

    def __init__(self, base: RelationSource, u_set: SetSource, max_subset: int | None = None,
                 normalize: bool = True):
        super().__init__(f"extend({base.label}; U={u_set.label})")
        if normalize and (base.constant or not base.decidable):
            base = transitive_closure(base)
        self.base = base
        self.u_set = u_set
        self.max_subset = max_subset
        self.constant = False
        self._u_cache: dict[int, frozenset] = {}

    def _u(self, n: int) -> frozenset:
        with self._lock:
            hit = self._u_cache.get(n)
            if hit is None:
                hit = self._u_cache[n] = self.u_set.members_upto(n)
            return hit

    def less(self, F: frozenset, m: int, G: frozenset, n: int) -> bool:
        if m >= n:
            return False
        star_f, star_g = STAR in F, STAR in G
        if star_f and not star_g:
            return False
        f_real = [x for x in F if x != STAR]
        g_real = [y for y in G if y != STAR]
        holds = self.base.holds
        if not any(all(holds(x, y, n) for x in f_real) for y in g_real):
            return False
        if not star_g and not any(self.u_set.contains(y, n) for y in g_real):
            return False
        if star_f and f_real:
            for x in self._u(n):
                if any(holds(x, y, n) for y in f_real):
                    return False
        return True

    def decide(self, a: int, b: int) -> bool:
        return self.less(*cc.decode_starset_pair(a), *cc.decode_starset_pair(b))

    def present(self, code: int, stage: int) -> bool:
        F, m = cc.decode_starset_pair(code)
        if m >= stage:
            return False
        if self.max_subset is not None and len(F) > self.max_subset:
            return False
        pool = self.base.carrier_upto(stage)
        return all(x == STAR or x in pool for x in F)

    def holds(self, a, b, stage):
        return self.present(a, stage) and self.present(b, stage) and self.decide(a, b)

    def subsets(self, stage: int) -> list[frozenset]:
        pool = [STAR] + sorted(self.base.carrier_upto(stage))
        top = len(pool) if self.max_subset is None else min(self.max_subset, len(pool))
        return [frozenset(c) for k in range(top + 1) for c in itertools.combinations(pool, k)]

    def carrier_upto(self, stage):
        return frozenset(cc.encode_starset_pair(F, m) for F in self.subsets(stage)
                         for m in range(stage))

    def _pairs(self, stage):
        subsets = self.subsets(stage)
        out = []
        for G in subsets:
            for n in range(1, stage):
                b = cc.encode_starset_pair(G, n)
                for F in subsets:
                    if self.less(F, 0, G, n):
                        out.extend((cc.encode_starset_pair(F, m), b) for m in range(n))
        return out

    def describe(self, code):
        F, m = cc.decode_starset_pair(code)
        inner = ",".join("*" if x == STAR else self.base.describe(x)
                         for x in sorted(F, key=lambda v: (v != STAR, v if v != STAR else -1)))
        return f"<{{{inner}}},{m}>"


def extension_back(J: Iterable[int]) -> frozenset:
    """g(J): union of F minus * over the codes <F,m> in J."""
    out = set()
    for code in J:
        F, _ = cc.decode_starset_pair(code)
        out.update(x for x in F if x != STAR)
    return frozenset(out)


def extend_with_closed(spec: ExtensionSpec) -> Extended:
    u = spec.u_set if spec.u_set is not None else FiniteSet(())
    return Extended(spec.base, u, spec.max_subset)


def meets_preimage(inner: Extended, u_set: SetSource) -> SetSource:
    """Codes <F,m> of ``inner`` whose F meets U: the g-preimage of 'meets U'."""
    def test(code, stage):
        F, _ = cc.decode_starset_pair(code)
        return any(x != STAR and u_set.contains(x, stage) for x in F)
    return PredicateSet(test, f"g^-1({u_set.label})")


def extend_with_closed_family(spec: ExtensionSpec, later_max_subset: int = 2) -> list[RelationSource]:
    """Iterate the extension over a finite family; returns the chain of relations.

    Each later set is re-expressed over the previous code carrier through
    the preimage of g.  The last entry presents the space with every set in
    the family made open; an empty family returns just the base.
    """
    chain: list[RelationSource] = [spec.base]
    backs: list[Extended] = []
    for i, u in enumerate(spec.sets()):
        current = chain[-1]
        for ext in backs:
            u = meets_preimage(ext, u)
        bound = spec.max_subset if i == 0 else later_max_subset
        ext = Extended(current, u, bound, normalize=(i == 0))
        chain.append(ext)
        backs.append(ext)
    return chain


# -- bounded census of the extended space ------------------------------------

@dataclass
class ExtensionCensus:
    families: list[frozenset]          # each a set of first components F
    images: list[frozenset]            # g of the matching ideal
    stage: int

    def to_json(self) -> dict:
        def show(F):
            real = sorted(x for x in F if x != STAR)
            return (["*"] if STAR in F else []) + real
        return {
            "stage": self.stage,
            "ideals": [{"family": sorted((show(F) for F in fam), key=lambda v: (len(v), [str(t) for t in v])),
                        "g": sorted(img)} for fam, img in zip(self.families, self.images)],
        }


def extension_census(ext: Extended, stage: int) -> ExtensionCensus:
    """Ideals of the extended relation over a constant finite base, up to ``stage``.

    Below any <G,n> sit exactly the <F,m> with m < n and F related to G at
    level n, and the relation between levels m < n does not depend on m,
    so every ideal has the form {<F,m> : F in family, all m}.  We scan all
    families of subsets of base-carrier-plus-*, keep those that are lower
    sets within the stage prefix and in which every two members with
    m <= stage - 2 have an upper bound at level stage - 1.
    """
    if not ext.base.constant:
        raise ValueError("the census needs a base that is constant in the stage")
    subsets = ext.subsets(stage)
    k = len(subsets)
    if k > 16:
        raise ValueError(f"{k} first components; the census scans 2^{k} families")
    rel = {n: [[ext.less(F, 0, G, n) for G in subsets] for F in subsets] for n in range(1, stage)}
    top = rel[stage - 1]
    fams, imgs = [], []
    for mask in range(1, 1 << k):
        fam = [i for i in range(k) if mask >> i & 1]
        ok = True
        for g in fam:
            for n in range(1, stage):
                col = rel[n]
                if any(col[f][g] and not mask >> f & 1 for f in range(k)):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        if all(any(top[a][c] and top[b][c] for c in fam) for i, a in enumerate(fam) for b in fam[i:]):
            family = frozenset(subsets[i] for i in fam)
            fams.append(family)
            imgs.append(frozenset(x for F in family for x in F if x != STAR))
    order = sorted(range(len(fams)), key=lambda i: (len(imgs[i]), sorted(imgs[i]), len(fams[i])))
    return ExtensionCensus([fams[i] for i in order], [imgs[i] for i in order], stage)


def canonical_lift(ext: Extended, J: Iterable[int], in_closed: bool) -> Callable[[int], bool]:
    """Membership test for the ideal of ``ext`` sitting over the base ideal J.

    Over J in the closed set the lift allows * in F; otherwise F stays in J.
    """
    J = frozenset(J)
    allowed = J | {STAR} if in_closed else J

    def member(code: int) -> bool:
        F, _ = cc.decode_starset_pair(code)
        return F <= allowed
    return member


def check_lift(ext: Extended, member: Callable[[int], bool], stage: int) -> Verdict:
    """Prefix check of a membership test against the ideal axioms of ``ext``."""
    els = sorted(c for c in ext.carrier_upto(stage) if member(c))
    if not els:
        return Verdict(Status.REFUTED, ("empty",), "lift is empty")
    dec = {c: cc.decode_starset_pair(c) for c in els}
    subsets = ext.subsets(stage)
    for b in els:
        G, n = dec[b]
        for F in subsets:
            if ext.less(F, 0, G, n) and not member(cc.encode_starset_pair(F, 0)):
                return Verdict(Status.REFUTED, ("lower", cc.encode_starset_pair(F, 0), b))
    firsts = sorted({dec[c][0] for c in els}, key=lambda F: (len(F), sorted(map(str, F))))
    for i, F1 in enumerate(firsts):
        for F2 in firsts[i:]:
            if not any(ext.less(F1, 0, G, stage - 1) and ext.less(F2, 0, G, stage - 1) for G in firsts):
                return Verdict(Status.UNKNOWN, ("directed", sorted(map(str, F1)), sorted(map(str, F2))),
                               "no upper bound at the top level of the prefix")
    return HOLDS


def base_ideal_check(ext: Extended, J: Iterable[int], stage: int) -> Verdict:
    return check_ideal(ext.base, frozenset(J), stage)
