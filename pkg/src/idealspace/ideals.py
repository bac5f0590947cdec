"""Ideals of transitive relations: exact census for finite relations, bounded
prefix checks for enumerable ones, and the strictification maps f and g.

An ideal is a nonempty lower set in which every pair (including a repeated
element) has an upper bound inside the set.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import carrier as cc
from .closures import Strictified
from .relations import (
    HOLDS,
    FiniteRelation,
    RelationSource,
    Status,
    Verdict,
    as_source,
    predecessor_map,
    successor_map,
)

DEFAULT_CENSUS_BOUND = 14


class CensusBoundError(ValueError):
    pass


class IdealAxiomError(ValueError):
    def __init__(self, verdict: Verdict):
        super().__init__(verdict.note or "not an ideal")
        self.verdict = verdict


# -- views -------------------------------------------------------------------

@dataclass(frozen=True)
class IdealView:
    """Either an exact finite ideal or a stage prefix of a (possibly infinite) one.

    ``kind`` is "exact" or "prefix".  For prefixes, ``observed`` is the
    downward closure of ``generators`` within the stage-``stage`` relation.
    """

    kind: str
    members: frozenset
    generators: tuple = ()
    stage: int | None = None

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    def __contains__(self, x) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "members": sorted(self.members)}
        if self.kind == "prefix":
            out["generators"] = list(self.generators)
            out["stage"] = self.stage
        return out

    @classmethod
    def exact_ideal(cls, r: FiniteRelation, members: Iterable[int]) -> "IdealView":
        members = frozenset(members)
        v = check_ideal(as_source(r), members, 0)
        if not v.holds:
            raise IdealAxiomError(v)
        return cls("exact", members)

    @classmethod
    def prefix(cls, source: RelationSource, generators: Iterable[int], stage: int) -> "IdealView":
        gens = tuple(generators)
        pairs = source.enumerate_upto(stage)
        for a, b in zip(gens, gens[1:]):
            if (a, b) not in pairs and a != b:
                raise ValueError(f"generators must form a chain at stage {stage}: ({a},{b}) missing")
        return cls("prefix", frozenset(downward_closure(source, gens, stage)), gens, stage)

    def is_principal_so_far(self) -> bool:
        """A prefix view whose generator chain has stopped moving."""
        if self.exact:
            return True
        g = self.generators
        return len(g) >= 2 and g[-1] == g[-2]


# -- checks ------------------------------------------------------------------

def downward_closure(source: RelationSource, G: Iterable[int], stage: int) -> set:
    pred = predecessor_map(source.enumerate_upto(stage))
    out = set(G)
    todo = list(out)
    while todo:
        y = todo.pop()
        for x in pred.get(y, ()):
            if x not in out:
                out.add(x)
                todo.append(x)
    return out


def check_ideal(source: RelationSource, I: Iterable[int], stage: int,
                complete: bool | None = None) -> Verdict:
    """Check the ideal axioms for the finite set ``I`` against the stage prefix.

    Lower-set failures are always final (the offending pair is enumerated).
    A missing upper bound is final when ``complete`` is true, which defaults
    to whether the source is constant in the stage.
    """
    I = frozenset(I)
    if not I:
        return Verdict(Status.REFUTED, ("empty",), "the empty set is not an ideal")
    pairs = source.enumerate_upto(stage)
    pred = predecessor_map(pairs)
    for y in sorted(I):
        for x in sorted(pred.get(y, ())):
            if x not in I:
                return Verdict(Status.REFUTED, ("lower", x, y), f"{x} < {y} but {x} not in the set")
    if complete is None:
        complete = source.constant
    succ = successor_map(pairs)
    pending = None
    members = sorted(I)
    for i, a in enumerate(members):
        up_a = succ.get(a, set()) & I
        for b in members[i:]:
            if up_a & succ.get(b, set()):
                continue
            v = Verdict(Status.REFUTED if complete else Status.UNKNOWN, ("directed", a, b),
                        f"no upper bound of {a} and {b} inside the set")
            if complete:
                return v
            pending = pending or v
    return pending or HOLDS


# -- census ------------------------------------------------------------------

@dataclass
class IdealCensus:
    relation: FiniteRelation
    ideals: list[frozenset]
    specialization: set = field(default_factory=set)

    def index(self, I) -> int:
        return self.ideals.index(frozenset(I))

    def lines(self) -> list[str]:
        """One line per ideal, sorted, followed by specialization edges."""
        out = ["ideal " + " ".join(map(str, sorted(I))) for I in self.ideals]
        for i, j in sorted(self.specialization):
            out.append(f"le {i} {j}")
        return out

    def to_json(self) -> dict:
        return {
            "ideals": [sorted(I) for I in self.ideals],
            "specialization": sorted([i, j] for i, j in self.specialization),
        }


def _sort_key(I):
    return (len(I), sorted(I))


def _specialization(ideals: list[frozenset]) -> set:
    return {(i, j) for i, I in enumerate(ideals) for j, J in enumerate(ideals) if i != j and I <= J}


def all_ideals(r: FiniteRelation, bound: int = DEFAULT_CENSUS_BOUND) -> IdealCensus:
    """Every ideal of a finite relation, by scanning all subsets as bit masks."""
    els = sorted(r.carrier)
    n = len(els)
    if n > bound:
        raise CensusBoundError(f"carrier has {n} elements; census bound is {bound}")
    pos = {x: i for i, x in enumerate(els)}
    down = [0] * n
    up = [0] * n
    for a, b in r.pairs:
        down[pos[b]] |= 1 << pos[a]
        up[pos[a]] |= 1 << pos[b]
    found = []
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        if any(down[i] & ~mask for i in idx):
            continue
        if all(up[i] & up[j] & mask for k, i in enumerate(idx) for j in idx[k:]):
            found.append(frozenset(els[i] for i in idx))
    found.sort(key=_sort_key)
    return IdealCensus(r, found, _specialization(found))


def principal_ideals(r: FiniteRelation) -> list[frozenset]:
    """For a transitive finite relation: {x : x < t} for each t with t < t."""
    pred = predecessor_map(r.pairs)
    out = {frozenset(pred.get(t, ())) for t in r.carrier if (t, t) in r.pairs}
    return sorted(out, key=_sort_key)


def is_ideal(r: FiniteRelation, I) -> bool:
    return check_ideal(as_source(r), I, 0).holds


# -- strictification maps ----------------------------------------------------

@dataclass(frozen=True)
class StrictImage:
    """f(I) = {<F,m> : F a finite subset of I}, held intensionally."""

    base: frozenset

    def __contains__(self, code: int) -> bool:
        F, _ = cc.decode_finset_pair(code)
        return F <= self.base

    def members_upto(self, stage: int, max_subset: int | None = None) -> Iterator[int]:
        """Codes <F,m> with m < stage (optionally |F| <= max_subset)."""
        base = sorted(self.base)
        top = len(base) if max_subset is None else min(max_subset, len(base))
        for k in range(top + 1):
            for F in itertools.combinations(base, k):
                mask = cc.encode_finset(F)
                for m in range(stage):
                    yield cc.pair(mask, m)


def strictify_forward(r: RelationSource, I: Iterable[int], stage: int = 0) -> StrictImage:
    I = frozenset(I)
    v = check_ideal(r, I, stage)
    if v.refuted:
        raise IdealAxiomError(v)
    return StrictImage(I)


def strictify_back(J) -> frozenset:
    """g(J) = union of the first components of J's members."""
    if isinstance(J, StrictImage):
        return J.base
    members = J.members if isinstance(J, IdealView) else J
    out = set()
    for code in members:
        F, _ = cc.decode_finset_pair(code)
        out |= F
    return frozenset(out)


def check_strict_image(strict: Strictified, image: StrictImage, stage: int,
                       max_subset: int | None = None) -> Verdict:
    """Prefix check that f(I) is an ideal of the strictified order.

    Anything below <G,n> has first component inside G, hence inside I, so
    f(I) is a lower set by construction; what needs checking is that pairs
    of members have upper bounds.  Members with m = stage - 1 have no room
    above them inside the prefix and are skipped.  Since enlarging the first
    component to I keeps every clause true, <I, n> is the only candidate
    shape that needs searching.
    """
    base = frozenset(image.base)
    if not base:
        return Verdict(Status.REFUTED, ("empty",), "f of the empty set is empty")
    members = [cc.decode_finset_pair(c) for c in image.members_upto(stage - 1, max_subset)]
    for i, (Fa, ma) in enumerate(members):
        for Fb, mb in members[i:]:
            lo = max(ma, mb) + 1
            if not any(strict.less(Fa, ma, base, n) and strict.less(Fb, mb, base, n)
                       for n in range(lo, stage)):
                a = cc.encode_finset_pair(Fa, ma)
                b = cc.encode_finset_pair(Fb, mb)
                return Verdict(Status.UNKNOWN, ("directed", a, b),
                               "no upper bound inside the stage prefix")
    return HOLDS


def _subsets(G):
    G = sorted(G)
    for k in range(len(G) + 1):
        yield from (frozenset(c) for c in itertools.combinations(G, k))


# -- non-principal filtering -------------------------------------------------

def nonprincipal_filter(census_or_views):
    """Drop ideals that have a largest element.

    On an exact census of a finite partial order every ideal is principal,
    so the result is empty.  For prefix views the test is "generators still
    moving": a view whose last two generators coincide is treated as
    principal so far.
    """
    if isinstance(census_or_views, IdealCensus):
        r = census_or_views.relation
        keep = [I for I in census_or_views.ideals if not _has_top(r, I)]
        return IdealCensus(r, keep, _specialization(keep))
    return [v for v in census_or_views if not v.is_principal_so_far()]


def _has_top(r: FiniteRelation, I) -> bool:
    return any(all((x, t) in r.pairs for x in I) for t in I)


# -- interpolability ---------------------------------------------------------

def interpolable_bounded(source: RelationSource, element_bound: int, stage: int,
                         empty_segment_ok: bool = False) -> Verdict:
    """Bounded test that every initial segment {x : x < y} is directed.

    For each y <= element_bound and each F of size 1 or 2 with F < y
    (elements <= element_bound), look for z with F < z < y in the stage
    prefix.  Pairs suffice because upper bounds compose by transitivity.
    Unless ``empty_segment_ok``, also require each segment to be nonempty.
    A missing witness refutes only for sources constant in the stage.
    """
    pairs = source.enumerate_upto(stage)
    succ = successor_map(pairs)
    pred = predecessor_map(pairs)
    final = source.constant
    pending = None

    def fail(witness, note):
        nonlocal pending
        v = Verdict(Status.REFUTED if final else Status.UNKNOWN, witness, note)
        if final:
            return v
        pending = pending or v
        return None

    ys = sorted(y for y in source.carrier_upto(stage) if y <= element_bound)
    for y in ys:
        seg = sorted(x for x in pred.get(y, ()) if x <= element_bound)
        below_y = pred.get(y, set())
        for i, a in enumerate(seg):
            for b in seg[i:]:
                if not (succ.get(a, set()) & succ.get(b, set()) & below_y):
                    F = (a,) if a == b else (a, b)
                    v = fail(("interpolant", y, F), f"no z with {set(F)} < z < {y}")
                    if v:
                        return v
    if not empty_segment_ok:
        for y in ys:
            if not pred.get(y):
                v = fail(("interpolant", y, ()), f"segment below {y} is empty")
                if v:
                    return v
    return pending or HOLDS
