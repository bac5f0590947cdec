"""Concrete presentations: tree-parameterised spaces (a non-T1 space, a
telophase space, a double-origin space), level orders and their disjoint
sums, compatible-antichain analysis, and the approximation-copy machines.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import carrier as cc
from .carrier import Symbol, TreePredicate
from .closures import IncrementalClosure, close
from .relations import (
    OMEGA,
    FiniteRelation,
    RelationSource,
    level_less,
    parse_level,
    predecessor_map,
    register,
    successor_map,
)

# -- trees -------------------------------------------------------------------


def tree_from_param(tree) -> TreePredicate:
    if isinstance(tree, TreePredicate):
        return tree
    if tree in (None, "full"):
        return TreePredicate.full()
    if tree in ("root", "root-only", "empty"):
        return TreePredicate.root_only()
    if isinstance(tree, Mapping):
        if "depth" in tree:
            return TreePredicate.depth_bounded(int(tree["depth"]))
        if "words" in tree:
            return TreePredicate.from_words(tree["words"])
    raise ValueError(f"tree must be 'full', 'root-only', {{'depth': d}} or {{'words': [...]}}, got {tree!r}")


def _t1(kind, w):
    return Symbol("t1", kind, tuple(w))


def _tel(kind, w):
    return Symbol("telophase", kind, tuple(w))


def _do(kind, n, w):
    return Symbol("double-origin", kind, tuple(w), n)


def t1_generators(T: TreePredicate, sigma) -> list[tuple[Symbol, Symbol]]:
    """Generating pairs contributed by the word sigma."""
    sigma = tuple(sigma)
    if not sigma:
        return []
    parent = sigma[:-1]
    out = [
        (_t1("plain", parent), _t1("plain", sigma)),
        (_t1("under", parent), _t1("under", sigma)),
        (_t1("plain", sigma), _t1("under", sigma)),
    ]
    if sigma not in T:
        out.append((_t1("under", parent), _t1("plain", sigma)))
    return out


def telophase_generators(T: TreePredicate, sigma) -> list[tuple[Symbol, Symbol]]:
    sigma = tuple(sigma)
    out = [(_tel("under", sigma), _tel("under", sigma))]
    for o in ("inf", "infstar"):
        out.append((_tel(o, sigma), _tel("under", sigma)))
        if sigma:
            out.append((_tel(o, sigma[:-1]), _tel(o, sigma)))
    if sigma and sigma not in T:
        out.append((_tel("infstar", sigma[:-1]), _tel("inf", sigma)))
        out.append((_tel("inf", sigma), _tel("infstar", sigma)))
    return out


def double_origin_generators(T: TreePredicate, n: int, sigma) -> list[tuple[Symbol, Symbol]]:
    """Pairs whose larger end carries index n and word sigma."""
    sigma = tuple(sigma)
    out = []
    for plain, under in (("square", "round"), ("square-under", "round-under")):
        out.append((_do(plain, n, sigma), _do(under, n, sigma)))
        out.append((_do(under, n, sigma), _do(under, n, sigma)))
        for m in range(n):
            out.append((_do(plain, m, sigma), _do(plain, n, sigma)))
    out.append((_do("pm", n, sigma), _do("round", n, sigma)))
    out.append((_do("pm", n, sigma), _do("round-under", n, sigma)))
    prefixes = [sigma[:i] for i in range(len(sigma))]
    for tau in prefixes:
        out.append((_do("pm", n, tau), _do("pm", n, sigma)))
        for m in range(n):
            out.append((_do("square", m, tau), _do("square", n, sigma)))
            out.append((_do("square-under", m, tau), _do("square-under", n, sigma)))
    if sigma not in T:
        out.append((_do("round", n, sigma), _do("round-under", n, sigma)))
        out.append((_do("round-under", n, sigma), _do("round", n, sigma)))
        if n > 0:
            out.append((_do("square-under", n, sigma), _do("square", n, sigma)))
        for m in range(n):
            for tau in prefixes:
                out.append((_do("square", m, tau), _do("square-under", n, sigma)))
    return out


class TreeSpace(RelationSource):
    """Transitive closure of tree-generated pairs over tagged symbols.

    At stage s the words of weight (length + letter sum) at most s are in
    play; for the double-origin family the index n is added to the weight.
    Every generating pair goes from a word to itself or to a one-letter
    extension, so the closure restricted to a prefix-closed word set only
    needs the generators inside that set (``local_relation``).
    """

    incremental = True

    def __init__(self, family: str, T: TreePredicate):
        super().__init__(f"{family}[{T.description}]")
        self.family = family
        self.T = T
        self._ic = IncrementalClosure()

    def generators(self, words: Iterable, max_index: int = 0) -> list:
        out = []
        for w in words:
            if self.family == "t1":
                out.extend(t1_generators(self.T, w))
            elif self.family == "telophase":
                out.extend(telophase_generators(self.T, w))
            else:
                for n in range(max_index + 1):
                    out.extend(double_origin_generators(self.T, n, w))
        return out

    def _delta(self, stage):
        if stage == 0:
            self._ic = IncrementalClosure()
        if self.family == "double-origin":
            gens = []
            for n in range(stage + 1):
                for w in cc.words_upto(stage - n):
                    if cc.word_weight(w) == stage - n:
                        gens.extend(double_origin_generators(self.T, n, w))
        else:
            gens = self.generators(w for w in cc.words_upto(stage) if cc.word_weight(w) == stage)
        enc = cc.encode_symbol
        return self._ic.add_all((enc(a), enc(b)) for a, b in gens)

    def local_relation(self, words: Iterable, max_index: int = 0) -> "SymbolRelation":
        """Closed relation restricted to symbols over a prefix-closed word set."""
        words = {tuple(w) for w in words}
        for w in list(words):
            for i in range(len(w)):
                words.add(w[:i])
        gens = self.generators(sorted(words), max_index)
        return SymbolRelation(close(gens))

    def describe(self, code):
        return str(cc.decode_symbol(self.family, code))


@dataclass
class SymbolRelation:
    """A finite closed relation over Symbols (not yet encoded)."""

    pairs: frozenset

    def __post_init__(self):
        self.pred = predecessor_map(self.pairs)
        self.succ = successor_map(self.pairs)

    def down(self, symbols: Iterable[Symbol]) -> frozenset:
        out = set(symbols)
        todo = list(out)
        while todo:
            y = todo.pop()
            for x in self.pred.get(y, ()):
                if x not in out:
                    out.add(x)
                    todo.append(x)
        return frozenset(out)

    def upper_bounds(self, a: Symbol, b: Symbol) -> set:
        return self.succ.get(a, set()) & self.succ.get(b, set())

    def encoded(self) -> FiniteRelation:
        enc = cc.encode_symbol
        return FiniteRelation((), {(enc(a), enc(b)) for a, b in self.pairs})


def tree_space_t1(T) -> TreeSpace:
    return TreeSpace("t1", tree_from_param(T))


def tree_space_telophase(T) -> TreeSpace:
    return TreeSpace("telophase", tree_from_param(T))


def tree_space_double_origin(T) -> TreeSpace:
    return TreeSpace("double-origin", tree_from_param(T))


def path_prefixes(path: Callable[[int], int] | Sequence[int], depth: int) -> list[tuple]:
    fn = path if callable(path) else (lambda i: path[i])
    word = tuple(fn(i) for i in range(depth))
    return [word[:i] for i in range(depth + 1)]


@dataclass(frozen=True)
class T1Comparison:
    depth: int
    J: frozenset          # downward closure of the plain prefixes
    I: frozenset          # downward closure of the underlined prefixes

    @property
    def strictly_contained(self) -> bool:
        return self.J < self.I


def t1_prefix_closures(space: TreeSpace, path, depth: int) -> T1Comparison:
    prefixes = path_prefixes(path, depth)
    rel = space.local_relation(prefixes)
    J = rel.down(_t1("plain", p) for p in prefixes)
    I = rel.down(_t1("under", p) for p in prefixes)
    return T1Comparison(depth, J, I)


def same_limit(space: TreeSpace, path, depth: int) -> bool:
    """Whether the plain and underlined prefix families close to the same ideal.

    At a fixed depth d the two closures differ at most in their top symbols,
    so we compare what each side has below length d and check that each
    depth-d closure sits inside the other side's depth-(d+1) closure.
    """
    a = t1_prefix_closures(space, path, depth)
    b = t1_prefix_closures(space, path, depth + 1)
    low_j = {s for s in a.J if len(s.word) < depth}
    low_i = {s for s in a.I if len(s.word) < depth}
    return low_j == low_i and a.J <= b.I and a.I <= b.J


def telophase_ideal(space: TreeSpace, sigma) -> frozenset:
    sigma = tuple(sigma)
    rel = space.local_relation([sigma])
    return rel.down([_tel("under", sigma)])


def telophase_common_bound(space: TreeSpace, path, depth: int):
    """For all sigma, tau on the path with length <= depth, find an underlined
    symbol above both [sigma, oo] and [tau, oo*].  Returns (ok, witnesses)."""
    prefixes = path_prefixes(path, depth)
    rel = space.local_relation(prefixes)
    witnesses = {}
    for s in prefixes:
        for t in prefixes:
            ub = rel.upper_bounds(_tel("inf", s), _tel("infstar", t))
            under = sorted((u for u in ub if u.kind == "under"), key=lambda u: len(u.word))
            if not under:
                return False, (s, t)
            witnesses[(s, t)] = under[0]
    return True, witnesses


def double_origin_separation(space: TreeSpace, path, depth: int, max_index: int = 3):
    """For every sigma on the path with length <= depth and n <= max_index,
    check that [n, sigma] and [n, _sigma_] have no common upper bound in the
    local prefix.  Returns (ok, first offending pair or None)."""
    prefixes = path_prefixes(path, depth)
    rel = space.local_relation(prefixes, max_index)
    for n in range(max_index + 1):
        for s in prefixes:
            ub = rel.upper_bounds(_do("square", n, s), _do("square-under", n, s))
            if ub:
                return False, (n, s, sorted(ub)[0])
    return True, None


def incomparable_words_never_related(space: TreeSpace, stage: int):
    """Every enumerated pair joins symbols over comparable words."""
    for a, b in space.enumerate_upto(stage):
        sa = cc.decode_symbol(space.family, a)
        sb = cc.decode_symbol(space.family, b)
        if not cc.comparable(sa.word, sb.word):
            return (sa, sb)
    return None


@register("tree-t1", "tree-generated space that fails T1 along infinite paths (param tree)")
def _tree_t1(tree="full"):
    return tree_space_t1(tree)


@register("tree-telophase", "tree-generated telophase space (param tree)")
def _tree_telophase(tree="full"):
    return tree_space_telophase(tree)


@register("tree-double-origin", "tree-generated double-origin space (param tree)")
def _tree_double_origin(tree="full"):
    return tree_space_double_origin(tree)


# -- spectra -----------------------------------------------------------------

def pair_coding(a: int, b: int) -> int:
    return 2 * a + b


def triple_coding(a: int, b: int, c: int) -> int:
    return 4 * a + 2 * b + c


@dataclass
class SpectrumSpec:
    """Level assignment per component plus an optional approximation table.

    ``approximation`` maps a to a list of (stage, bit) change points;
    A_s(a) is the bit of the last change point at or before s (0 if none).
    """

    level_of: Callable[[int], int | str]
    approximation: Mapping[int, Sequence[tuple[int, int]]] | None = None
    horizon: int | None = None

    def A(self, a: int, s: int) -> int:
        bit = 0
        for t, b in sorted((self.approximation or {}).get(a, ())):
            if t <= s:
                bit = int(b)
        return bit

    def limit(self, a: int) -> int:
        table = sorted((self.approximation or {}).get(a, ()))
        return int(table[-1][1]) if table else 0

    def stabilized_by(self, a: int) -> int:
        table = sorted((self.approximation or {}).get(a, ()))
        return table[-1][0] if table else 0

    @classmethod
    def from_set(cls, A: Callable[[int], int] | Iterable[int]):
        """ell(2a) = <a, A(a)>, ell(odd) = omega."""
        if not callable(A):
            members = frozenset(A)
            A = lambda a: int(a in members)  # noqa: E731

        def level(c):
            if c % 2:
                return OMEGA
            return pair_coding(c // 2, A(c // 2))
        return cls(level)


class SpectrumRelation(RelationSource):
    """Disjoint sum over components c of level orders ell(c) x Q.

    Element code pair(c, inner) with inner = layer + ell * q_code for a finite
    level and pair(layer, q_code) for omega.  The star variant indexes its
    components as pair(a, t): t = 0 is a copy of level <a, A(a), 0>, and
    t = 1 + 2j + i a copy of level <a, i, 1>.
    """

    decidable = True

    def __init__(self, spec: SpectrumSpec, variant: str = "plain"):
        super().__init__(f"spectrum[{variant}]")
        if variant not in ("plain", "star"):
            raise ValueError("variant is 'plain' or 'star'")
        self.spec = spec
        self.variant = variant
        self._memo: dict[int, tuple | None] = {}
        self._memo_lock = threading.Lock()

    def level(self, c: int):
        if self.variant == "plain":
            return parse_level(self.spec.level_of(c))
        a, t = cc.unpair(c)
        if t == 0:
            return triple_coding(a, self.spec.limit(a), 0)
        i = (t - 1) % 2
        return triple_coding(a, i, 1)

    def decode(self, code: int):
        """(component, layer, rational) or None if the code names no element."""
        with self._memo_lock:
            if code in self._memo:
                return self._memo[code]
        c, inner = cc.unpair(code)
        lvl = self.level(c)
        if lvl == 0:
            out = None
        elif lvl == OMEGA:
            m, q = cc.unpair(inner)
            out = (c, m, cc.decode_rational(q))
        else:
            out = (c, inner % lvl, cc.decode_rational(inner // lvl))
        with self._memo_lock:
            self._memo[code] = out
        return out

    def encode(self, c: int, m: int, q) -> int:
        lvl = self.level(c)
        if lvl == OMEGA:
            return cc.pair(c, cc.pair(m, cc.encode_rational(q)))
        if not 0 <= m < lvl:
            raise ValueError(f"layer {m} outside level {lvl}")
        return cc.pair(c, m + lvl * cc.encode_rational(q))

    def related(self, a: int, b: int) -> bool:
        da, db = self.decode(a), self.decode(b)
        if da is None or db is None or da[0] != db[0]:
            return False
        return level_less(da[1:], db[1:])

    def holds(self, a, b, stage):
        return a < stage and b < stage and self.related(a, b)

    def carrier_upto(self, stage):
        return frozenset(c for c in range(stage) if self.decode(c) is not None)

    def _pairs(self, stage):
        els = sorted(self.carrier_upto(stage))
        by_comp: dict[int, list] = {}
        for e in els:
            by_comp.setdefault(self.decode(e)[0], []).append(e)
        out = []
        for members in by_comp.values():
            for a in members:
                for b in members:
                    if self.related(a, b):
                        out.append((a, b))
        return out

    def describe(self, code):
        d = self.decode(code)
        return "-" if d is None else f"({d[0]};{d[1]},{d[2]})"


def spectrum_relation(spec: SpectrumSpec, variant: str = "plain") -> SpectrumRelation:
    return SpectrumRelation(spec, variant)


def level_grid(level: int, rationals: Sequence) -> tuple[FiniteRelation, dict]:
    """The level order truncated to level x rationals; returns relation and code -> role."""
    qs = [cc.canonical(q) for q in rationals]
    roles = {}
    for m in range(level):
        for j, q in enumerate(qs):
            roles[m * len(qs) + j] = (m, q)
    pairs = {(a, b) for a, ra in roles.items() for b, rb in roles.items() if level_less(ra, rb)}
    return FiniteRelation(roles.keys(), pairs), roles


@register("spectrum", "disjoint sum of level orders; params: set (list of a with A(a)=1), variant")
def _spectrum(set=(), variant="plain"):
    return spectrum_relation(SpectrumSpec.from_set(set), variant)


# -- compatible antichains ---------------------------------------------------

class AntichainBoundError(ValueError):
    pass


def antichain_census(r: FiniteRelation, bound: int = 64) -> list[frozenset]:
    """All maximal compatible antichains of a finite relation.

    Compatible: some element lies below every member.  Antichain: no two
    distinct members are related either way (and no member is related to
    itself unless the relation says so; such members still count once).
    """
    els = sorted(r.carrier)
    if len(els) > bound:
        raise AntichainBoundError(f"carrier has {len(els)} elements; bound is {bound}")
    pairs = r.pairs
    below = {x: frozenset(a for a, b in pairs if b == x) for x in els}

    def comparable(x, y):
        return (x, y) in pairs or (y, x) in pairs

    found = []

    def extend(current: list, lower: frozenset, start: int):
        maximal = True
        for i, y in enumerate(els):
            if y in current:
                continue
            if any(comparable(y, x) for x in current):
                continue
            if not (lower & below[y]):
                continue
            maximal = False
            if i >= start:
                extend(current + [y], lower & below[y], i + 1)
        if maximal and current:
            found.append(frozenset(current))

    for i, x in enumerate(els):
        if below[x] and (x, x) not in pairs:
            extend([x], below[x], i + 1)
        elif below[x] and (x, x) in pairs:
            extend([x], below[x], i + 1)
    out = sorted(set(found), key=lambda s: (len(s), sorted(s)))
    return out


# -- approximation-copy machines ---------------------------------------------

@dataclass
class Element:
    code: int
    component: int
    layer: int
    p: Fraction
    born: int


@dataclass
class Component:
    cid: int
    a: int | None
    layers: int | str          # int or OMEGA
    kind: str                  # "tracked", "abandoned", "omega", "junk"
    roles: dict = field(default_factory=dict)   # (layer, p) -> element code
    members: list = field(default_factory=list)

    def max_p(self, elements) -> Fraction:
        return max((elements[c].p for c in self.members), default=Fraction(0))


class ApproximationCopies(RelationSource):
    """Stage machine building a copy of a spectrum relation from an approximation.

    Plain variant: component a follows A_s(a) with <a, A_s(a)> layers; an
    increase adds a top layer of fresh elements, a decrease abandons the
    copy (it keeps growing layers, becoming a copy of the omega level) and
    starts a new one.  Star variant: an increase adds a top layer; a
    decrease moves every top-layer element into the layer below with a
    fresh rational above all rationals used in the component, preserving
    their mutual order.  At every stage, each live component gets an
    element for every role (layer i, n-th rational) with n < s.
    """

    def __init__(self, spec: SpectrumSpec, variant: str = "plain", components: Iterable[int] | None = None,
                 coding: Callable[[int, int], int] | str = "2a+b", omega_copies: int = 0,
                 copies: int = 1, junk: bool = False):
        super().__init__(f"approx-copy[{variant}]")
        if variant not in ("plain", "star"):
            raise ValueError("variant is 'plain' or 'star'")
        self.spec = spec
        self.variant = variant
        self.tracked = sorted(components if components is not None else (spec.approximation or {}).keys())
        self.coding = _coding(coding, variant)
        self.omega_copies = omega_copies
        self.copies = copies
        self.junk = junk
        self._reset()

    def _reset(self):
        self.stage = 0
        self.elements: dict[int, Element] = {}
        self.components: dict[int, Component] = {}
        self.live: dict[tuple, int] = {}       # (a, copy) -> component id
        self.added_at: dict = {}
        self.role_log: list = []
        self.log: list = []
        self._next_code = 0
        self._next_cid = 0
        self._bits: dict[int, int] = {}

    # construction helpers
    def _new_component(self, a, layers, kind) -> Component:
        comp = Component(self._next_cid, a, layers, kind)
        self.components[comp.cid] = comp
        self._next_cid += 1
        return comp

    def _relate(self, e: Element, stage: int) -> None:
        comp = self.components[e.component]
        for c in comp.members:
            if c == e.code:
                continue
            f = self.elements[c]
            if level_less((f.layer, f.p), (e.layer, e.p)) and (c, e.code) not in self.added_at:
                self.added_at[(c, e.code)] = stage
            if level_less((e.layer, e.p), (f.layer, f.p)) and (e.code, c) not in self.added_at:
                self.added_at[(e.code, c)] = stage

    def _spawn(self, comp: Component, layer: int, p: Fraction, stage: int) -> Element:
        e = Element(self._next_code, comp.cid, layer, p, stage)
        self._next_code += 1
        self.elements[e.code] = e
        comp.members.append(e.code)
        comp.roles[(layer, p)] = e.code
        self._relate(e, stage)
        return e

    def _fill(self, comp: Component, s: int) -> None:
        layers = s if comp.layers == OMEGA else comp.layers
        for i in range(layers):
            for n in range(s):
                p = cc.decode_rational(n)
                if (i, p) not in comp.roles:
                    self._spawn(comp, i, p, s)

    def _layers_for(self, a: int, s: int):
        return self.coding(a, self.spec.A(a, s))

    def step(self) -> dict:
        with self._lock:
            s = self.stage
            rec = {"kind": "stage", "stage": s, "events": []}
            for a in self.tracked:
                if a > s:
                    continue
                for j in range(self.copies):
                    key = (a, j)
                    want = self._layers_for(a, s)
                    if key not in self.live:
                        self.live[key] = self._new_component(a, want, "tracked").cid
                        rec["events"].append({"start": a, "copy": j, "layers": want})
                        continue
                    comp = self.components[self.live[key]]
                    if want > comp.layers:
                        rec["events"].append({"raise": a, "copy": j, "from": comp.layers, "to": want})
                        comp.layers = want
                    elif want < comp.layers:
                        if self.variant == "plain":
                            comp.kind, comp.layers = "abandoned", OMEGA
                            self.live[key] = self._new_component(a, want, "tracked").cid
                            rec["events"].append({"abandon": a, "copy": j, "restart_layers": want})
                        else:
                            moved = self._drop(comp, want, s)
                            rec["events"].append({"lower": a, "copy": j, "to": want, "moved": moved})
            if self.omega_copies and s < self.omega_copies:
                self._new_component(None, OMEGA, "omega")
            if self.junk:
                a, i = divmod(s, 2)
                self._new_component(a, self.coding_junk(a, i), "junk")
            for comp in list(self.components.values()):
                self._fill(comp, s)
            self.stage = s + 1
            self.log.append(rec)
            return rec

    def coding_junk(self, a: int, i: int) -> int:
        return triple_coding(a, i, 1)

    def _drop(self, comp: Component, want: int, s: int) -> list[int]:
        top = comp.layers - 1
        movers = sorted((c for c in comp.members if self.elements[c].layer > want - 1),
                        key=lambda c: (self.elements[c].layer, self.elements[c].p))
        base = comp.max_p(self.elements).__floor__() + 1
        for k, c in enumerate(movers):
            e = self.elements[c]
            old = (e.layer, e.p)
            del comp.roles[old]
            e.layer, e.p = want - 1, Fraction(base + k)
            comp.roles[(e.layer, e.p)] = c
            self.role_log.append({"stage": s, "element": c, "from": [old[0], str(old[1])],
                                  "to": [e.layer, str(e.p)]})
        comp.layers = want
        del top
        for c in movers:
            self._relate(self.elements[c], s)
        return movers

    def run_to(self, stage: int) -> "ApproximationCopies":
        with self._lock:
            while self.stage < stage:
                self.step()
        return self

    def _pairs(self, stage):
        self.run_to(stage)
        return [p for p, t in self.added_at.items() if t < stage]

    def _carrier(self, stage):
        self.run_to(stage)
        return [c for c, e in self.elements.items() if e.born < stage]

    # audits
    def role_changes(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for ev in self.role_log:
            out[ev["element"]] = out.get(ev["element"], 0) + 1
        return out

    def consistency_failures(self, stage: int) -> list:
        """Enumerated pairs that the current roles no longer support."""
        self.run_to(stage)
        bad = []
        for (a, b), t in self.added_at.items():
            if t >= stage:
                continue
            ea, eb = self.elements[a], self.elements[b]
            if ea.component != eb.component or not level_less((ea.layer, ea.p), (eb.layer, eb.p)):
                bad.append((a, b))
        return bad

    def component_relation(self, cid: int, stage: int) -> tuple[FiniteRelation, dict]:
        self.run_to(stage)
        comp = self.components[cid]
        members = [c for c in comp.members if self.elements[c].born < stage]
        ms = set(members)
        pairs = {(a, b) for (a, b), t in self.added_at.items() if t < stage and a in ms and b in ms}
        roles = {c: (self.elements[c].layer, self.elements[c].p) for c in members}
        return FiniteRelation(members, pairs), roles

    def log_lines(self, stage: int) -> list[str]:
        self.run_to(stage)
        return [json.dumps(r, sort_keys=True, default=str) for r in self.log[:stage]]


def _coding(coding, variant):
    if callable(coding):
        return coding
    table = {
        "2a+b": lambda a, b: 2 * a + b,
        "2a+b+1": lambda a, b: 2 * a + b + 1,
        "4a+2+b": lambda a, b: triple_coding(a, 1, b),
    }
    if coding not in table:
        raise ValueError(f"coding must be one of {sorted(table)} or a callable")
    return table[coding]


def approximation_copy(spec: SpectrumSpec, variant: str = "plain", **kw) -> ApproximationCopies:
    return ApproximationCopies(spec, variant, **kw)


def isomorphic(r1: FiniteRelation, r2: FiniteRelation) -> bool:
    import networkx as nx

    if len(r1.carrier) != len(r2.carrier) or len(r1.pairs) != len(r2.pairs):
        return False
    g1, g2 = nx.DiGraph(), nx.DiGraph()
    g1.add_nodes_from(r1.carrier)
    g1.add_edges_from(r1.pairs)
    g2.add_nodes_from(r2.carrier)
    g2.add_edges_from(r2.pairs)
    return nx.is_isomorphic(g1, g2)


def grid_for_roles(roles: Mapping[int, tuple]) -> tuple[FiniteRelation, bool]:
    """Level-order truncation on the same layer x rational grid as ``roles``.

    The second value says whether ``roles`` fill a full rectangle.
    """
    layers = sorted({m for m, _ in roles.values()})
    qs = sorted({q for _, q in roles.values()})
    rect = len(roles) == len(layers) * len(qs) and layers == list(range(len(layers)))
    rel, _ = level_grid(len(layers), qs)
    return rel, rect


def role_truncation(roles: Mapping[int, tuple]) -> FiniteRelation:
    """Level order on exactly the (layer, rational) points named by ``roles``."""
    pts = sorted(set(roles.values()))
    pairs = {(i, j) for i, a in enumerate(pts) for j, b in enumerate(pts) if level_less(a, b)}
    return FiniteRelation(range(len(pts)), pairs)


def _table(raw) -> dict[int, list[tuple[int, int]]]:
    out = {}
    for a, points in (raw or {}).items():
        out[int(a)] = [(int(t), int(b)) for t, b in points]
    return out


@register("approximation-copy",
          "copy of a spectrum relation built from an approximation table {a: [[stage, bit], ...]}")
def _approx(table=None, variant="plain", coding="2a+b", copies=1, omega_copies=0):
    spec = SpectrumSpec(lambda c: OMEGA, _table(table))
    return approximation_copy(spec, variant, coding=coding, copies=int(copies),
                              omega_copies=int(omega_copies))
