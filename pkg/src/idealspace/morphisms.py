"""Function codes between ideal spaces.

A code R is a relation on naturals; it acts on ideals by
    [R](I) = {n : (m, n) in R for some m in I}.
Pairs are oriented (source element, target element).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .ideals import IdealCensus, IdealView, all_ideals, check_ideal
from .relations import (
    HOLDS,
    FiniteRelation,
    FiniteSource,
    RelationSource,
    Status,
    Verdict,
    as_source,
    check_reflexive,
    check_transitive,
    predecessor_map,
    successor_map,
)


class HypothesisError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(f"{message}: {witness}")
        self.witness = witness


class ClassificationError(ValueError):
    pass


@dataclass
class FunctionCode:
    code: RelationSource
    source_rel: RelationSource
    target_rel: RelationSource
    label: str = "code"

    def pairs(self, stage: int) -> frozenset:
        return self.code.enumerate_upto(stage)


def _members(I) -> frozenset:
    if isinstance(I, IdealView):
        return I.members
    return frozenset(I)


def image(R: FunctionCode, I, stage: int) -> frozenset:
    I = _members(I)
    return frozenset(n for m, n in R.pairs(stage) if m in I)


def apply_code(R: FunctionCode, I, stage: int) -> tuple[IdealView, Verdict]:
    """Image of I under [R] plus the verdict on whether it is a target ideal."""
    img = image(R, I, stage)
    exact = (not isinstance(I, IdealView) or I.exact) and R.code.constant
    v = check_ideal(R.target_rel, img, stage)
    if exact:
        return IdealView("exact", img), v
    return IdealView("prefix", img, tuple(sorted(img)), stage), v


# -- mor ---------------------------------------------------------------------

@dataclass(frozen=True)
class MorCheckReport:
    upward: Verdict          # aRb, a <1 a'  =>  a'Rb
    downward: Verdict        # aRb, b' <2 b  =>  aRb'
    total: Verdict           # every a has some b
    directed: Verdict        # aRb, aRb'  =>  some b'' above both with aRb''
    interpolative: Verdict   # aRb  =>  a'Rb for some a' <1 a
    stage: int

    def clauses(self) -> dict[str, Verdict]:
        return {
            "upward": self.upward,
            "downward": self.downward,
            "total": self.total,
            "directed": self.directed,
            "interpolative": self.interpolative,
        }

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.clauses().values())

    def to_json(self) -> dict:
        out = {k: v.to_json() for k, v in self.clauses().items()}
        out["stage"] = self.stage
        return out


def mor_check(R: FunctionCode, stage: int, element_bound: int) -> MorCheckReport:
    """Test the five morphism clauses on elements <= element_bound.

    Universal clauses refute on a concrete violation; existential clauses
    refute only when every relation involved is constant in the stage.
    """
    code = R.pairs(stage)
    src = R.source_rel.enumerate_upto(stage)
    tgt = R.target_rel.enumerate_upto(stage)
    final = R.code.constant and R.source_rel.constant and R.target_rel.constant
    succ_code = successor_map(code)
    pred_code = predecessor_map(code)
    succ_src = successor_map(src)
    pred_src = predecessor_map(src)
    pred_tgt = predecessor_map(tgt)
    succ_tgt = successor_map(tgt)
    bounded = sorted((a, b) for a, b in code if a <= element_bound and b <= element_bound)

    def missing(witness, note):
        return Verdict(Status.REFUTED if final else Status.UNKNOWN, witness, note)

    upward = HOLDS
    for a, b in bounded:
        for a2 in sorted(succ_src.get(a, ())):
            if a2 <= element_bound and (a2, b) not in code:
                upward = missing((a, a2, b), f"{a}R{b} and {a}<{a2} but not {a2}R{b}")
                break
        if not upward.holds:
            break

    downward = HOLDS
    for a, b in bounded:
        for b2 in sorted(pred_tgt.get(b, ())):
            if b2 <= element_bound and (a, b2) not in code:
                downward = missing((a, b, b2), f"{a}R{b} and {b2}<{b} but not {a}R{b2}")
                break
        if not downward.holds:
            break

    total = HOLDS
    for a in sorted(R.source_rel.carrier_upto(stage)):
        if a <= element_bound and not succ_code.get(a):
            total = missing((a,), f"no b with {a}R b")
            break

    directed = HOLDS
    for a in sorted({a for a, _ in bounded}):
        outs = sorted(b for b in succ_code.get(a, ()) if b <= element_bound)
        for i, b in enumerate(outs):
            for b2 in outs[i:]:
                common = succ_tgt.get(b, set()) & succ_tgt.get(b2, set()) & succ_code.get(a, set())
                if not common:
                    directed = missing((a, b, b2), f"no b'' above {b},{b2} with {a}R b''")
                    break
            if not directed.holds:
                break
        if not directed.holds:
            break

    interpolative = HOLDS
    for a, b in bounded:
        if not (pred_src.get(a, set()) & pred_code.get(b, set())):
            interpolative = missing((a, b), f"no a' < {a} with a'R{b}")
            break

    return MorCheckReport(upward, downward, total, directed, interpolative, stage)


# -- building codes ----------------------------------------------------------

class _Converse(RelationSource):
    def __init__(self, base: RelationSource):
        super().__init__(f"converse({base.label})")
        self.base = base
        self.constant = base.constant

    def _pairs(self, stage):
        return {(b, a) for a, b in self.base.enumerate_upto(stage)}

    def _carrier(self, stage):
        return self.base.carrier_upto(stage)


def identity_code(r: RelationSource) -> FunctionCode:
    """aRb iff b < a; evaluates as the identity on ideals of r."""
    return FunctionCode(_Converse(r), r, r, f"id({r.label})")


def finite_code(pairs: Iterable, source_rel: RelationSource, target_rel: RelationSource,
                label: str = "finite") -> FunctionCode:
    return FunctionCode(FiniteSource(FiniteRelation((), pairs), label), source_rel, target_rel, label)


class _Composite(RelationSource):
    def __init__(self, first: RelationSource, second: RelationSource):
        super().__init__(f"{second.label}.{first.label}")
        self.first, self.second = first, second
        self.constant = first.constant and second.constant

    def _pairs(self, stage):
        succ2 = successor_map(self.second.enumerate_upto(stage))
        return {(a, c) for a, b in self.first.enumerate_upto(stage) for c in succ2.get(b, ())}


def compose(R: FunctionCode, S: FunctionCode) -> FunctionCode:
    """Code for [S] after [R]: a -> c whenever aRb and bSc for some b."""
    return FunctionCode(_Composite(R.code, S.code), R.source_rel, S.target_rel,
                        f"{S.label}.{R.label}")


def graph_code(f: Mapping[int, int] | Callable[[int], int], source_rel: RelationSource,
               target_rel: RelationSource, sample: Iterable[int] | None = None,
               stage: int = 0, check: bool = True) -> FunctionCode:
    """Code {(x, f(x))} after checking surjectivity and x < x' iff f(x) < f(x') on the sample."""
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    xs = sorted(sample if sample is not None else source_rel.carrier_upto(stage))
    fx = {x: fn(x) for x in xs}
    if check:
        src = source_rel.enumerate_upto(stage)
        tgt = target_rel.enumerate_upto(stage)
        for x in xs:
            for x2 in xs:
                if ((x, x2) in src) != ((fx[x], fx[x2]) in tgt):
                    raise HypothesisError("f does not preserve and reflect the relation",
                                          (x, x2, fx[x], fx[x2]))
        hit = set(fx.values())
        for y in sorted(target_rel.carrier_upto(stage)):
            if y not in hit:
                raise HypothesisError("f is not onto the target sample", (y,))
    pairs = {(x, fx[x]) for x in xs}
    return FunctionCode(FiniteSource(FiniteRelation((), pairs), "graph"), source_rel, target_rel, "graph")


# -- preorders and principal ideals ------------------------------------------

@dataclass
class FunctorData:
    census: IdealCensus
    principal: dict[int, frozenset]     # n -> {m : m <= n}
    compact_order: set                  # (n, n') with principal(n) inside principal(n')
    classes: list[frozenset]            # elements grouped by equal principal ideal

    def to_json(self) -> dict:
        return {
            "principal": {str(n): sorted(I) for n, I in sorted(self.principal.items())},
            "compact_order": sorted([a, b] for a, b in self.compact_order),
            "classes": [sorted(c) for c in self.classes],
            "census": self.census.to_json(),
        }


def functor_data(p: FiniteRelation) -> FunctorData:
    src = as_source(p)
    for name, v in (("reflexive", check_reflexive(src, 0)), ("transitive", check_transitive(src, 0))):
        if not v.holds:
            raise ClassificationError(f"not a preorder ({name} fails: {v.note})")
    pred = predecessor_map(p.pairs)
    principal = {n: frozenset(pred.get(n, ())) for n in sorted(p.carrier)}
    order = {(a, b) for a in principal for b in principal if principal[a] <= principal[b]}
    groups: dict[frozenset, set] = {}
    for n, I in principal.items():
        groups.setdefault(I, set()).add(n)
    classes = sorted((frozenset(g) for g in groups.values()), key=lambda c: min(c))
    return FunctorData(all_ideals(p), principal, order, classes)
