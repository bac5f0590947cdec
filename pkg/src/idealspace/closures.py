"""Relation transformers: transitive closure, reflexive-transitive closure,
partial-order repair, strictification and reflexive closure.

Each transformer returns a new :class:`RelationSource` whose stage ``s``
output depends only on the input's stage prefixes.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import carrier as cc
from .relations import Pair, RelationSource, predecessor_map


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class IncrementalClosure:
    """Transitive relation maintained under edge insertion.

    Rows are Python ints used as bitsets over a dense index of elements, so
    inserting (a, b) costs one OR per predecessor of a.
    """

    def __init__(self):
        self.index: dict[int, int] = {}
        self.elements: list[int] = []
        self.succ: list[int] = []
        self.pred: list[int] = []
        self.size = 0

    def _id(self, x: int) -> int:
        i = self.index.get(x)
        if i is None:
            i = self.index[x] = len(self.elements)
            self.elements.append(x)
            self.succ.append(0)
            self.pred.append(0)
        return i

    def has(self, a: int, b: int) -> bool:
        ia, ib = self.index.get(a), self.index.get(b)
        return ia is not None and ib is not None and bool(self.succ[ia] >> ib & 1)

    def add(self, a: int, b: int) -> list[Pair]:
        """Insert (a, b), close transitively, return the pairs that were new."""
        ia, ib = self._id(a), self._id(b)
        if self.succ[ia] >> ib & 1:
            return []
        els, succ, pred = self.elements, self.succ, self.pred
        sources = pred[ia] | (1 << ia)
        targets = succ[ib] | (1 << ib)
        added = []
        for p in iter_bits(sources):
            fresh = targets & ~succ[p]
            if not fresh:
                continue
            succ[p] |= fresh
            bit = 1 << p
            for q in iter_bits(fresh):
                pred[q] |= bit
                added.append((els[p], els[q]))
        self.size += len(added)
        return added

    def add_all(self, pairs: Iterable[Pair]) -> list[Pair]:
        out = []
        for a, b in sorted(pairs):
            out.extend(self.add(a, b))
        return out

    def successors(self, x: int) -> list[int]:
        i = self.index.get(x)
        return [] if i is None else [self.elements[j] for j in iter_bits(self.succ[i])]

    def predecessors(self, x: int) -> list[int]:
        i = self.index.get(x)
        return [] if i is None else [self.elements[j] for j in iter_bits(self.pred[i])]

    def pairs(self) -> set[Pair]:
        els = self.elements
        return {(els[i], els[j]) for i, row in enumerate(self.succ) for j in iter_bits(row)}

    def copy(self) -> "IncrementalClosure":
        out = IncrementalClosure()
        out.index = dict(self.index)
        out.elements = list(self.elements)
        out.succ = list(self.succ)
        out.pred = list(self.pred)
        out.size = self.size
        return out


def close(pairs: Iterable[Pair]) -> frozenset:
    """Transitive closure of a finite set of pairs."""
    ic = IncrementalClosure()
    ic.add_all(pairs)
    return frozenset(ic.pairs())


class TransitiveClosure(RelationSource):
    incremental = True

    def __init__(self, base: RelationSource):
        super().__init__(f"t({base.label})")
        self.base = base
        self.constant = base.constant
        self._ic = IncrementalClosure()

    def _delta(self, stage):
        if stage == 0:
            self._ic = IncrementalClosure()
            return self._ic.add_all(self.base.enumerate_upto(0))
        return self._ic.add_all(self.base.new_pairs(stage))

    def _carrier(self, stage):
        return self.base.carrier_upto(stage)

    def describe(self, code):
        return self.base.describe(code)


def transitive_closure(r: RelationSource) -> RelationSource:
    if isinstance(r, TransitiveClosure):
        return r
    return TransitiveClosure(r)


class ReflexiveClosure(RelationSource):
    def __init__(self, base: RelationSource, label: str | None = None):
        super().__init__(label or f"refl({base.label})")
        self.base = base
        self.constant = base.constant
        self.decidable = base.decidable

    def _pairs(self, stage):
        out = set(self.base.enumerate_upto(stage))
        out.update((x, x) for x in self.base.carrier_upto(stage))
        return out

    def _carrier(self, stage):
        return self.base.carrier_upto(stage)

    def holds(self, a, b, stage):
        if a == b:
            return a in self.base.carrier_upto(stage)
        return self.base.holds(a, b, stage)

    def describe(self, code):
        return self.base.describe(code)


def reflexive_closure(r: RelationSource) -> RelationSource:
    return ReflexiveClosure(r)


def reflexive_transitive_closure(r: RelationSource) -> RelationSource:
    return ReflexiveClosure(transitive_closure(r), f"p({r.label})")


# -- partial-order repair ----------------------------------------------------

@dataclass(frozen=True)
class RepairLedger:
    frozen_after: int | None
    isolated_from: frozenset


def _antisymmetry_violation(pairs) -> Pair | None:
    for a, b in sorted(pairs):
        if a < b and (b, a) in pairs:
            return a, b
    return None


class PORepair(RelationSource):
    """Partial order agreeing with p(r) until p(r) visibly fails antisymmetry.

    At the first stage s* whose closure has x != y with x <= y <= x, the
    order reached at stage s* - 1 is frozen; every element first seen at
    s* or later is added as an isolated (reflexive only) point.
    """

    def __init__(self, base: RelationSource):
        super().__init__(f"o({base.label})")
        self.base = base
        self.rtc = reflexive_transitive_closure(base)
        self.constant = base.constant
        self._scan_lock = threading.Lock()
        self._scanned = -1
        self._freeze: int | None = None
        self._witness: Pair | None = None

    def freeze_stage(self, stage: int) -> int | None:
        """First stage <= ``stage`` with a visible antisymmetry violation."""
        if self.constant:
            stage = 0
        with self._scan_lock:
            while self._freeze is None and self._scanned < stage:
                s = self._scanned + 1
                w = _antisymmetry_violation(self.rtc.enumerate_upto(s))
                if w is not None:
                    self._freeze, self._witness = s, w
                self._scanned = s
            if self._freeze is not None and self._freeze <= stage:
                return self._freeze
            return None

    def ledger(self, stage: int) -> RepairLedger:
        s_star = self.freeze_stage(stage)
        if s_star is None:
            return RepairLedger(None, frozenset())
        before = self.base.carrier_upto(s_star - 1) if s_star > 0 else frozenset()
        return RepairLedger(s_star, frozenset(self.base.carrier_upto(stage)) - before)

    @property
    def violation(self) -> Pair | None:
        return self._witness

    def _pairs(self, stage):
        s_star = self.freeze_stage(stage)
        if s_star is None:
            return self.rtc.enumerate_upto(stage)
        kept = set(self.rtc.enumerate_upto(s_star - 1)) if s_star > 0 else set()
        kept.update((x, x) for x in self.base.carrier_upto(stage))
        return kept

    def _carrier(self, stage):
        return self.base.carrier_upto(stage)


def po_repair(r: RelationSource) -> RelationSource:
    return PORepair(r)


# -- strictification ---------------------------------------------------------

class Strictified(RelationSource):
    """Strict partial order on codes <F, m> = encode_finset_pair(F, m).

    <F,m> < <G,n> iff F is a subset of G, m < n, every x <= n with x <^(n) y
    for some y in F lies in G, and some y in G has x <^(n) y for all x in F,
    where <^(n) is membership in ``base.enumerate_upto(n)``.

    At stage s the carrier holds <F,m> with m < s and F drawn from the
    elements the base mentions by stage s; ``max_subset`` caps |F| so that
    infinite bases stay finite per stage.
    """

    decidable = True

    def __init__(self, base: RelationSource, max_subset: int | None = None):
        super().__init__(f"strict({base.label})")
        self.base = base
        self.max_subset = max_subset
        self._preds: dict[int, dict] = {}

    # base relation at stage n, indexed by target
    def _pred_at(self, n: int) -> dict:
        with self._lock:
            hit = self._preds.get(n)
            if hit is None:
                hit = self._preds[n] = predecessor_map(self.base.enumerate_upto(n))
                if len(self._preds) > 256:
                    self._preds.pop(next(iter(self._preds)))
            return hit

    def less(self, F: frozenset, m: int, G: frozenset, n: int) -> bool:
        if not (m < n and F <= G):
            return False
        pred = self._pred_at(n)
        for y in F:
            for x in pred.get(y, ()):
                if x <= n and x not in G:
                    return False
        for y in G:
            below = pred.get(y, ())
            if all(x in below for x in F):
                return True
        return False

    def decide(self, a: int, b: int) -> bool:
        F, m = cc.decode_finset_pair(a)
        G, n = cc.decode_finset_pair(b)
        return self.less(F, m, G, n)

    def present(self, code: int, stage: int) -> bool:
        F, m = cc.decode_finset_pair(code)
        if m >= stage:
            return False
        if self.max_subset is not None and len(F) > self.max_subset:
            return False
        return F <= self.base.carrier_upto(stage)

    def holds(self, a, b, stage):
        return self.present(a, stage) and self.present(b, stage) and self.decide(a, b)

    def carrier_upto(self, stage):
        return frozenset(self._elements(stage))

    def _elements(self, stage):
        import itertools
        if stage <= 0:
            return []
        pool = sorted(self.base.carrier_upto(stage))
        top = len(pool) if self.max_subset is None else min(self.max_subset, len(pool))
        out = []
        for k in range(top + 1):
            for F in itertools.combinations(pool, k):
                mask = cc.encode_finset(F)
                out.extend(cc.pair(mask, m) for m in range(stage))
        return out

    def _pairs(self, stage):
        els = [(c, *cc.decode_finset_pair(c)) for c in self._elements(stage)]
        by_m: dict[int, list] = {}
        for e in els:
            by_m.setdefault(e[2], []).append(e)
        out = []
        for b, G, n in els:
            for m in range(n):
                for a, F, _ in by_m.get(m, ()):
                    if F <= G and self.less(F, m, G, n):
                        out.append((a, b))
        return out

    def first_elements(self, count: int, stage: int | None = None) -> list[int]:
        """The ``count`` smallest codes present at ``stage`` (default: large enough)."""
        out = []
        code = 0
        while len(out) < count:
            F, m = cc.decode_finset_pair(code)
            s = stage if stage is not None else m + 1
            if self.present(code, s):
                out.append(code)
            code += 1
            if code > 10 ** 7:
                raise RuntimeError("carrier too sparse to collect the requested elements")
        return out

    def describe(self, code):
        F, m = cc.decode_finset_pair(code)
        inner = ",".join(self.base.describe(x) for x in sorted(F))
        return f"<{{{inner}}},{m}>"


def strictify(r: RelationSource, max_subset: int | None = None) -> Strictified:
    return Strictified(r, max_subset)


def is_strict_order_on(source: RelationSource, elements: list[int], stage: int | None = None):
    """Irreflexivity and transitivity of ``source.holds`` restricted to ``elements``.

    Returns None when both hold, else a witness tuple.
    """
    st = stage if stage is not None else 10 ** 9
    if stage is None and isinstance(source, Strictified):
        rel = {(a, b) for a in elements for b in elements if source.decide(a, b)}
    else:
        rel = {(a, b) for a in elements for b in elements if source.holds(a, b, st)}
    for a, b in rel:
        if a == b:
            return ("reflexive", a)
    succ: dict = {}
    for a, b in rel:
        succ.setdefault(a, set()).add(b)
    for a, bs in succ.items():
        for b in bs:
            for c in succ.get(b, ()):
                if (a, c) not in rel:
                    return ("intransitive", a, b, c)
    return None
