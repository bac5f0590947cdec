"""Stage-enumerable relations on the naturals and the catalog of named ones.

A :class:`RelationSource` is a monotone, deterministic enumeration: the set
``enumerate_upto(s)`` is finite, and grows with ``s``.  Finite relations are
sources that do not depend on the stage.
"""
from __future__ import annotations

import itertools
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from . import carrier as cc

Pair = tuple[int, int]


class Status(Enum):
    HOLDS = "holds"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a bounded check; a refutation carries its counterexample."""

    status: Status
    witness: object = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    def to_json(self) -> dict:
        out = {"status": self.status.value}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.note:
            out["note"] = self.note
        return out


HOLDS = Verdict(Status.HOLDS)


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, Fraction):
        return str(x)
    return x


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    """First refutation wins, then any unknown, else holds."""
    unknown = None
    for v in verdicts:
        if v.refuted:
            return v
        if v.status is Status.UNKNOWN and unknown is None:
            unknown = v
    return unknown or HOLDS


class CatalogError(KeyError):
    pass


# -- sources -----------------------------------------------------------------

class RelationSource:
    """Monotone stage-indexed enumeration of pairs of naturals.

    Subclasses implement ``_pairs(stage)`` (whole set) or ``_delta(stage)``
    (pairs first enumerated at ``stage``).  ``constant`` sources ignore the
    stage; ``decidable`` sources never add a pair between two elements that
    are already in the carrier, so an absent pair is final.
    """

    label = "relation"
    constant = False
    decidable = False
    incremental = False
    _cache_size = 32

    def __init__(self, label: str | None = None):
        if label is not None:
            self.label = label
        self._lock = threading.RLock()
        self._cache: OrderedDict[int, frozenset] = OrderedDict()
        self._acc_stage = -1
        self._acc: set = set()

    # subclass hooks
    def _pairs(self, stage: int) -> Iterable[Pair]:
        raise NotImplementedError

    def _delta(self, stage: int) -> Iterable[Pair]:
        raise NotImplementedError

    def _carrier(self, stage: int) -> Iterable[int]:
        return ()

    # public surface
    def enumerate_upto(self, stage: int) -> frozenset:
        if stage < 0:
            raise ValueError("stage must be >= 0")
        if self.constant:
            stage = 0
        with self._lock:
            hit = self._cache.get(stage)
            if hit is not None:
                self._cache.move_to_end(stage)
                return hit
            if self.incremental:
                if stage < self._acc_stage:
                    self._acc_stage, self._acc = -1, set()
                while self._acc_stage < stage:
                    self._acc_stage += 1
                    self._acc.update(self._delta(self._acc_stage))
                out = frozenset(self._acc)
            else:
                out = frozenset(self._pairs(stage))
            self._cache[stage] = out
            if len(self._cache) > self._cache_size:
                self._cache.popitem(last=False)
            return out

    def new_pairs(self, stage: int) -> frozenset:
        """Pairs first visible at ``stage``."""
        if stage == 0:
            return self.enumerate_upto(0)
        if self.constant:
            return frozenset()
        return self.enumerate_upto(stage) - self.enumerate_upto(stage - 1)

    def carrier_upto(self, stage: int) -> frozenset:
        """Declared carrier plus every element mentioned by ``stage``."""
        if self.constant:
            stage = 0
        out = set(self._carrier(stage))
        for a, b in self.enumerate_upto(stage):
            out.add(a)
            out.add(b)
        return frozenset(out)

    def holds(self, a: int, b: int, stage: int) -> bool:
        return (a, b) in self.enumerate_upto(stage)

    def absent_is_final(self, a: int, b: int, stage: int) -> bool:
        """True when ``(a, b)`` missing at ``stage`` can never appear later."""
        if self.constant:
            return True
        if self.decidable:
            c = self.carrier_upto(stage)
            return a in c and b in c
        return False

    def describe(self, code: int) -> str:
        return str(code)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"


@dataclass(frozen=True)
class FiniteRelation:
    carrier: frozenset
    pairs: frozenset

    def __init__(self, carrier: Iterable[int] = (), pairs: Iterable[Pair] = ()):
        pairs = frozenset((int(a), int(b)) for a, b in pairs)
        carrier = frozenset(int(x) for x in carrier)
        mentioned = {x for p in pairs for x in p}
        if not carrier:
            carrier = frozenset(mentioned)
        stray = mentioned - carrier
        if stray:
            raise ValueError(f"pairs mention elements outside the carrier: {sorted(stray)}")
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "pairs", pairs)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def restrict(self, elements: Iterable[int]) -> "FiniteRelation":
        keep = frozenset(elements) & self.carrier
        return FiniteRelation(keep, {(a, b) for a, b in self.pairs if a in keep and b in keep})

    def to_json(self) -> dict:
        return {"finite": {"carrier": sorted(self.carrier),
                           "pairs": sorted([a, b] for a, b in self.pairs)}}


class FiniteSource(RelationSource):
    constant = True
    decidable = True

    def __init__(self, rel: FiniteRelation, label: str | None = None):
        super().__init__(label or f"finite[{len(rel.carrier)}]")
        self.relation = rel

    def _pairs(self, stage):
        return self.relation.pairs

    def _carrier(self, stage):
        return self.relation.carrier


def as_source(r: FiniteRelation, label: str | None = None) -> RelationSource:
    return FiniteSource(r, label)


def freeze(source: RelationSource, stage: int) -> FiniteRelation:
    """The finite relation visible at ``stage``."""
    return FiniteRelation(source.carrier_upto(stage), source.enumerate_upto(stage))


class PredicateSource(RelationSource):
    """Decidable relation: at stage s, all pairs over ``carrier(s)`` passing ``decide``."""

    incremental = True
    decidable = True

    def __init__(self, carrier: Callable[[int], Iterable[int]], decide: Callable[[int, int], bool],
                 label: str, describe: Callable[[int], str] | None = None):
        super().__init__(label)
        self._carrier_fn = carrier
        self._decide = decide
        self._describe = describe
        self._seen: list[int] = []
        self._seen_set: set = set()
        self._seen_stage = -1

    def _carrier(self, stage):
        return self._carrier_fn(stage)

    def _delta(self, stage):
        if stage <= self._seen_stage:
            self._seen, self._seen_set, self._seen_stage = [], set(), -1
            for t in range(stage):
                self._grow(t)
        return self._grow(stage)

    def _grow(self, stage):
        fresh = [x for x in sorted(self._carrier_fn(stage)) if x not in self._seen_set]
        self._seen_stage = stage
        out = []
        decide = self._decide
        for x in fresh:
            self._seen.append(x)
            self._seen_set.add(x)
            for y in self._seen:
                if decide(x, y):
                    out.append((x, y))
                if y != x and decide(y, x):
                    out.append((y, x))
        return out

    def holds(self, a, b, stage):
        c = self.carrier_upto(stage)
        return a in c and b in c and self._decide(a, b)

    def carrier_upto(self, stage):
        return frozenset(self._carrier_fn(stage))

    def describe(self, code):
        return self._describe(code) if self._describe else str(code)


class UnionSource(RelationSource):
    def __init__(self, parts: list[RelationSource], label: str | None = None):
        super().__init__(label or " + ".join(p.label for p in parts))
        self.parts = parts
        self.constant = all(p.constant for p in parts)

    def _pairs(self, stage):
        out = set()
        for p in self.parts:
            out |= p.enumerate_upto(stage)
        return out

    def _carrier(self, stage):
        out = set()
        for p in self.parts:
            out |= p.carrier_upto(stage)
        return out


# -- index helpers -----------------------------------------------------------

def successor_map(pairs: Iterable[Pair]) -> dict[int, set]:
    out: dict[int, set] = {}
    for a, b in pairs:
        out.setdefault(a, set()).add(b)
    return out


def predecessor_map(pairs: Iterable[Pair]) -> dict[int, set]:
    out: dict[int, set] = {}
    for a, b in pairs:
        out.setdefault(b, set()).add(a)
    return out


# -- classification ----------------------------------------------------------

@dataclass(frozen=True)
class RelationClassReport:
    transitive_upto: Verdict
    irreflexive_upto: Verdict
    antisymmetric_upto: Verdict
    reflexive_upto: Verdict
    stage: int

    @property
    def is_transitive(self) -> bool:
        return self.transitive_upto.holds

    def verdicts(self) -> dict[str, Verdict]:
        return {
            "transitive": self.transitive_upto,
            "irreflexive": self.irreflexive_upto,
            "antisymmetric": self.antisymmetric_upto,
            "reflexive": self.reflexive_upto,
        }

    def to_json(self) -> dict:
        out = {k: v.to_json() for k, v in self.verdicts().items()}
        out["stage"] = self.stage
        return out


def _missing(source: RelationSource, a: int, b: int, stage: int, witness, note: str) -> Verdict:
    if source.absent_is_final(a, b, stage):
        return Verdict(Status.REFUTED, witness, note)
    return Verdict(Status.UNKNOWN, witness, note + " (pair may still be enumerated)")


def check_transitive(source: RelationSource, stage: int) -> Verdict:
    pairs = source.enumerate_upto(stage)
    succ = successor_map(pairs)
    pending = None
    for a in sorted(succ):
        for b in sorted(succ[a]):
            for c in sorted(succ.get(b, ())):
                if (a, c) not in pairs:
                    v = _missing(source, a, c, stage, ((a, b), (b, c)),
                                 f"({a},{b}) and ({b},{c}) without ({a},{c})")
                    if v.refuted:
                        return v
                    pending = pending or v
    return pending or HOLDS


def check_irreflexive(source: RelationSource, stage: int) -> Verdict:
    loops = sorted(a for a, b in source.enumerate_upto(stage) if a == b)
    if loops:
        return Verdict(Status.REFUTED, loops[0], f"({loops[0]},{loops[0]}) enumerated")
    return HOLDS


def check_antisymmetric(source: RelationSource, stage: int) -> Verdict:
    pairs = source.enumerate_upto(stage)
    for a, b in sorted(pairs):
        if a < b and (b, a) in pairs:
            return Verdict(Status.REFUTED, (a, b), f"({a},{b}) and ({b},{a}) with {a} != {b}")
    return HOLDS


def check_reflexive(source: RelationSource, stage: int) -> Verdict:
    pairs = source.enumerate_upto(stage)
    pending = None
    for a in sorted(source.carrier_upto(stage)):
        if (a, a) not in pairs:
            v = _missing(source, a, a, stage, a, f"({a},{a}) not enumerated")
            if v.refuted:
                return v
            pending = pending or v
    return pending or HOLDS


def classify(source: RelationSource, stage: int) -> RelationClassReport:
    return RelationClassReport(
        transitive_upto=check_transitive(source, stage),
        irreflexive_upto=check_irreflexive(source, stage),
        antisymmetric_upto=check_antisymmetric(source, stage),
        reflexive_upto=check_reflexive(source, stage),
        stage=stage,
    )


# -- catalog -----------------------------------------------------------------

_CATALOG: dict[str, Callable[..., RelationSource]] = {}
_CATALOG_DOCS: dict[str, str] = {}


def register(name: str, doc: str = ""):
    def deco(fn):
        _CATALOG[name] = fn
        _CATALOG_DOCS[name] = doc or (fn.__doc__ or "").strip().splitlines()[0]
        return fn
    return deco


def available() -> dict[str, str]:
    _load_plugins()
    return dict(sorted(_CATALOG_DOCS.items()))


def _load_plugins():
    # fixture families register themselves on import
    from . import fixtures  # noqa: F401


def catalog(name: str, params: Mapping | None = None) -> RelationSource:
    _load_plugins()
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise CatalogError(
            f"unknown relation family {name!r}; available: {', '.join(sorted(_CATALOG))}"
        ) from None
    return factory(**dict(params or {}))


OMEGA = "omega"


def parse_level(level) -> int | str:
    if level in (OMEGA, "ω", None):
        return OMEGA
    level = int(level)
    if level < 0:
        raise ValueError("levels are naturals or 'omega'")
    return level


def level_decode(level, code: int) -> tuple[int, Fraction]:
    """Element ``code`` of ``level x Q`` as (layer, rational)."""
    if level == OMEGA:
        m, q = cc.unpair(code)
        return m, cc.decode_rational(q)
    if level == 0:
        raise ValueError("level 0 has no elements")
    return code % level, cc.decode_rational(code // level)


def level_encode(level, m: int, q) -> int:
    if level == OMEGA:
        return cc.pair(m, cc.encode_rational(q))
    if not 0 <= m < level:
        raise ValueError(f"layer {m} outside level {level}")
    return m + level * cc.encode_rational(q)


def level_less(a: tuple[int, Fraction], b: tuple[int, Fraction]) -> bool:
    """(m, p) < (n, q) iff m <= n and p < q."""
    return a[0] <= b[0] and cc.rational_less(a[1], b[1])


@register("rationals", "strict order of Q; element n is the n-th rational in Stern-Brocot order")
def rationals() -> RelationSource:
    values: dict[int, Fraction] = {}

    def val(n):
        v = values.get(n)
        if v is None:
            v = values[n] = cc.decode_rational(n)
        return v

    return PredicateSource(lambda s: range(s), lambda a, b: val(a) < val(b),
                           "rationals", lambda n: str(val(n)))


@register("dyadic", "strict order of the dyadic rationals in (0,1), breadth-first codes")
def dyadic() -> RelationSource:
    return PredicateSource(lambda s: range(s),
                           lambda a, b: cc.decode_dyadic(a) < cc.decode_dyadic(b),
                           "dyadic", lambda n: str(cc.decode_dyadic(n)))


_THETAS = {
    "true": lambda n, a, b: True,
    "false": lambda n, a, b: False,
}


def _theta(spec):
    if callable(spec):
        return spec
    if isinstance(spec, Mapping) and "below" in spec:
        k = int(spec["below"])
        return lambda n, a, b: a < k
    if isinstance(spec, str) and spec in _THETAS:
        return _THETAS[spec]
    raise ValueError(f"theta must be 'true', 'false', {{'below': k}} or a callable, got {spec!r}")


class RestrictedRationals(RelationSource):
    """<_Q restricted to Q_n = {q_i : for all a < i there is b with theta(n, a, b)}.

    At stage s, q_i is present once i < s and every a < i has a witness b < s.
    """

    incremental = True

    def __init__(self, theta, n: int = 0):
        super().__init__(f"restricted-rationals[n={n}]")
        self.theta = _theta(theta)
        self.n = n
        self._members: list[int] = []

    def members(self, stage: int) -> list[int]:
        out = []
        for i in range(stage):
            if all(any(self.theta(self.n, a, b) for b in range(stage)) for a in range(i)):
                out.append(i)
            else:
                break
        return out

    def _delta(self, stage):
        now = self.members(stage)
        before = set(self.members(stage - 1)) if stage else set()
        out = []
        for i in now:
            if i in before:
                continue
            qi = cc.decode_rational(i)
            for j in now:
                qj = cc.decode_rational(j)
                if qi < qj:
                    out.append((i, j))
                elif qj < qi:
                    out.append((j, i))
        return out

    def _carrier(self, stage):
        return self.members(stage)

    def describe(self, code):
        return str(cc.decode_rational(code))


@register("restricted-rationals", "<_Q restricted to Q_n for a decidable theta(n,a,b)")
def restricted_rationals(theta="true", n: int = 0) -> RelationSource:
    return RestrictedRationals(theta, int(n))


@register("level-order", "(m,p) < (n,q) iff m <= n and p < q on level x Q (level a natural or 'omega')")
def level_order(level=2) -> RelationSource:
    level = parse_level(level)
    if level == 0:
        return FiniteSource(FiniteRelation(), "level-order[0]")
    memo: dict[int, tuple] = {}

    def dec(n):
        v = memo.get(n)
        if v is None:
            v = memo[n] = level_decode(level, n)
        return v

    def show(n):
        m, q = dec(n)
        return f"({m},{q})"

    return PredicateSource(lambda s: range(s), lambda a, b: level_less(dec(a), dec(b)),
                           f"level-order[{level}]", show)


@register("chain", "chain 0 < 1 < ... < size-1 (reflexive=True gives <=)")
def chain(size: int = 2, reflexive: bool = False) -> RelationSource:
    size = int(size)
    pairs = {(i, j) for i in range(size) for j in range(size) if i < j or (reflexive and i == j)}
    return FiniteSource(FiniteRelation(range(size), pairs), f"chain[{size}{',refl' if reflexive else ''}]")


@register("antichain", "size pairwise incomparable points (reflexive=True adds the diagonal)")
def antichain(size: int = 2, reflexive: bool = True) -> RelationSource:
    size = int(size)
    pairs = {(i, i) for i in range(size)} if reflexive else set()
    return FiniteSource(FiniteRelation(range(size), pairs), f"antichain[{size}]")


@register("cycle", "full preorder on size points (every pair related)")
def cycle(size: int = 2) -> RelationSource:
    size = int(size)
    return FiniteSource(FiniteRelation(range(size), itertools.product(range(size), repeat=2)),
                        f"cycle[{size}]")


@register("sierpinski", "{(0,0),(0,1),(1,1)}: two ideals {0} and {0,1}")
def sierpinski() -> RelationSource:
    return FiniteSource(FiniteRelation({0, 1}, {(0, 0), (0, 1), (1, 1)}), "sierpinski")


@register("two-chain", "{(0,1)}: transitive, not interpolable")
def two_chain() -> RelationSource:
    return FiniteSource(FiniteRelation({0, 1}, {(0, 1)}), "two-chain")


@register("empty", "the empty relation on the naturals")
def empty() -> RelationSource:
    return FiniteSource(FiniteRelation(), "empty")



class StagedSource(RelationSource):
    """Relation given by an explicit table: pairs listed with the stage they appear."""

    def __init__(self, table: Iterable[tuple[int, Iterable[Pair]]], carrier: Iterable[int] = (),
                 label: str = "staged"):
        super().__init__(label)
        self.table = sorted((int(s), frozenset((int(a), int(b)) for a, b in ps)) for s, ps in table)
        self.declared = frozenset(carrier)

    def _pairs(self, stage):
        out = set()
        for s, ps in self.table:
            if s <= stage:
                out |= ps
        return out

    def _carrier(self, stage):
        return self.declared


@register("staged", "explicit stage table: stages = [[s, [[a, b], ...]], ...]")
def staged(stages=(), carrier=()) -> RelationSource:
    return StagedSource(stages, carrier)


@dataclass
class CatalogEntry:
    name: str
    params: dict = field(default_factory=dict)

    def build(self) -> RelationSource:
        return catalog(self.name, self.params)
