"""Stage machine turning a transitive relation Y into an interpolable one X.

Even code 2n stands for n in Y (f(2n) = n); odd code 2k+1 is the dummy w_k.
Each stage s runs four substages:

1. the least unsolved pair (F_n, y_n), n < s, that requires attention gets
   a fresh dummy w with x < w < y_n for all x in F_n;
2. the least active, unreplaced dummy looks for z in Y with
   f(x) < z < f(y_n); on success f(w) = z;
3. x < x' is added whenever f(x) < f(x') in Y at stage s + 1;
4. the result is closed transitively.

X at stage s is the relation after stages 0..s-1 have run.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .closures import IncrementalClosure, transitive_closure
from .relations import RelationSource

# -- the (F_n, y_n) enumeration ----------------------------------------------


def _distinct_parts(total: int, smallest: int = 1) -> Iterator[tuple[int, ...]]:
    """Strictly increasing tuples of parts >= smallest summing to total."""
    if total == 0:
        yield ()
        return
    for p in range(smallest, total + 1):
        for rest in _distinct_parts(total - p, p + 1):
            yield (p,) + rest


def _pairs_of_weight(w: int) -> list[tuple[tuple[int, ...], int]]:
    out = []
    for y in range(w + 1):
        for parts in _distinct_parts(w - y):
            out.append((tuple(p - 1 for p in parts), y))
    out.sort(key=lambda fy: (fy[1], fy[0]))
    return out


class PairEnumeration:
    """Fixed enumeration of (finite set, natural) pairs.

    Ordered by weight y + sum(x + 1 for x in F), then by y, then by F.  Any
    pair containing x sits behind the x + 1 pairs (empty, 0..x), so x in F_n
    implies x < n.
    """

    def __init__(self):
        self._items: list[tuple[frozenset, int]] = []
        self._weight = -1
        self._lock = threading.Lock()

    def __getitem__(self, n: int) -> tuple[frozenset, int]:
        with self._lock:
            while len(self._items) <= n:
                self._weight += 1
                self._items.extend((frozenset(F), y) for F, y in _pairs_of_weight(self._weight))
            return self._items[n]

    def index(self, F: Iterable[int], y: int) -> int:
        target = (frozenset(F), y)
        n = 0
        while True:
            if self[n] == target:
                return n
            n += 1


PAIRS = PairEnumeration()


# -- machine -----------------------------------------------------------------

@dataclass
class DummyRecord:
    k: int
    solves: int                 # pair index
    activated_at: int
    replaced_at: int | None = None
    value: int | None = None    # f(2k+1) once replaced

    @property
    def status(self) -> str:
        return "replaced" if self.replaced_at is not None else "active"


@dataclass
class EngineState:
    stage: int = 0
    closure: IncrementalClosure = field(default_factory=IncrementalClosure)
    added_at: dict = field(default_factory=dict)            # pair -> stage that added it
    dummies: list = field(default_factory=list)             # DummyRecord, index k
    solved: dict = field(default_factory=dict)              # pair index -> dummy k
    f_inverse: dict = field(default_factory=dict)           # y value -> set of replaced dummy codes
    y_seen: set = field(default_factory=set)
    y_succ: dict = field(default_factory=dict)
    y_pred: dict = field(default_factory=dict)
    log: list = field(default_factory=list)


class InterpolationEngine:
    """Resumable, deterministic run of the stage machine over ``y``."""

    def __init__(self, y: RelationSource, attend_empty: bool = True):
        self.y = y
        self.attend_empty = attend_empty
        self.state = EngineState()
        self._lock = threading.RLock()

    # helpers on the current X
    def _has(self, a: int, b: int) -> bool:
        return self.state.closure.has(a, b)

    def _active(self, x: int) -> bool:
        if x % 2 == 0:
            return True
        return (x - 1) // 2 < len(self.state.dummies)

    def f(self, x: int) -> int | None:
        if x % 2 == 0:
            return x // 2
        k = (x - 1) // 2
        if k < len(self.state.dummies):
            return self.state.dummies[k].value
        return None

    def _solver_exists(self, F: frozenset, y: int) -> bool:
        cl = self.state.closure
        iy = cl.index.get(y)
        if iy is None:
            return False
        cand = cl.pred[iy]
        for x in F:
            ix = cl.index.get(x)
            if ix is None:
                return False
            cand &= cl.succ[ix]
            if not cand:
                return False
        return bool(cand)

    def _requires_attention(self, F: frozenset, y: int) -> bool:
        if not F and not self.attend_empty:
            return False
        if not self._active(y) or not all(self._active(x) for x in F):
            return False
        return all(self._has(x, y) for x in F)

    def _add(self, a: int, b: int, stage: int) -> int:
        new = self.state.closure.add(a, b)
        for p in new:
            self.state.added_at[p] = stage
        return len(new)

    # one stage
    def step(self) -> dict:
        with self._lock:
            st = self.state
            s = st.stage
            rec = {"kind": "stage", "stage": s}
            size_before = st.closure.size

            # Substage 1
            attended = None
            for n in range(s):
                if n in st.solved:
                    continue
                F, y = PAIRS[n]
                if self._requires_attention(F, y) and not self._solver_exists(F, y):
                    attended = n
                    break
            if attended is not None:
                F, y = PAIRS[attended]
                k = len(st.dummies)
                w = 2 * k + 1
                st.dummies.append(DummyRecord(k, attended, s))
                st.solved[attended] = k
                self._add(w, y, s)
                for x in sorted(F):
                    self._add(x, w, s)
                rec["activated"] = {"dummy": k, "pair": attended, "F": sorted(F), "y": y}

            # stage s+1 approximation of Y
            y_now = self.y.enumerate_upto(s + 1)
            fresh_y = sorted(y_now - st.y_seen) if len(y_now) != len(st.y_seen) else []
            for a, b in fresh_y:
                st.y_seen.add((a, b))
                st.y_succ.setdefault(a, set()).add(b)
                st.y_pred.setdefault(b, set()).add(a)

            # Substage 2
            replaced = None
            pending = next((d for d in st.dummies if d.replaced_at is None), None)
            if pending is not None:
                F, y = PAIRS[pending.solves]
                fy = self.f(y)
                fF = [self.f(x) for x in sorted(F)]
                if fy is not None and all(v is not None for v in fF):
                    cands = set(st.y_pred.get(fy, ()))
                    for v in fF:
                        cands &= st.y_succ.get(v, set())
                    if cands:
                        z = min(cands)
                        pending.value = z
                        pending.replaced_at = s
                        replaced = pending
                        rec["replaced"] = {"dummy": pending.k, "value": z}

            # Substage 3 (lifting) and 4 (closure, maintained on insertion)
            lifted = 0
            finv = st.f_inverse
            for a, b in fresh_y:
                srcs = [2 * a] + sorted(finv.get(a, ()))
                tgts = [2 * b] + sorted(finv.get(b, ()))
                for u in srcs:
                    for v in tgts:
                        lifted += self._add(u, v, s)
            if replaced is not None:
                d = 2 * replaced.k + 1
                z = replaced.value
                finv.setdefault(z, set()).add(d)
                for b in sorted(st.y_succ.get(z, ())):
                    for v in [2 * b] + sorted(finv.get(b, ())):
                        lifted += self._add(d, v, s)
                for a in sorted(st.y_pred.get(z, ())):
                    for u in [2 * a] + sorted(finv.get(a, ())):
                        lifted += self._add(u, d, s)
            rec["lifted"] = lifted
            rec["new_pairs"] = st.closure.size - size_before
            st.stage = s + 1
            st.log.append(rec)
            return rec

    def run_to(self, stage: int) -> "InterpolationEngine":
        with self._lock:
            while self.state.stage < stage:
                self.step()
        return self

    # views
    def x_pairs(self, stage: int) -> frozenset:
        self.run_to(stage)
        return frozenset(p for p, t in self.state.added_at.items() if t < stage)

    def f_view(self, stage: int) -> dict[int, int]:
        self.run_to(stage)
        out = {2 * n: n for n in self.y.carrier_upto(stage)}
        for d in self.state.dummies:
            if d.replaced_at is not None and d.replaced_at < stage:
                out[2 * d.k + 1] = d.value
        return out

    def x_carrier(self, stage: int) -> frozenset:
        self.run_to(stage)
        out = {2 * n for n in self.y.carrier_upto(stage)}
        out.update(2 * d.k + 1 for d in self.state.dummies if d.activated_at < stage)
        for a, b in self.x_pairs(stage):
            out.add(a)
            out.add(b)
        return frozenset(out)

    def log_lines(self, stage: int) -> list[str]:
        self.run_to(stage)
        return [json.dumps(r, sort_keys=True) for r in self.state.log[:stage]]


class EngineRelation(RelationSource):
    """The relation X, replaying the machine as far as each query needs."""

    def __init__(self, engine: InterpolationEngine):
        super().__init__(f"x({engine.y.label})")
        self.engine = engine

    def _pairs(self, stage):
        return self.engine.x_pairs(stage)

    def _carrier(self, stage):
        return self.engine.x_carrier(stage)


@dataclass
class EngineOutput:
    engine: InterpolationEngine
    x_relation: EngineRelation

    def f_view(self, stage: int) -> dict[int, int]:
        return self.engine.f_view(stage)

    def x_carrier(self, stage: int) -> frozenset:
        return self.engine.x_carrier(stage)

    @property
    def dummies(self) -> list[DummyRecord]:
        return self.engine.state.dummies


def complete(y: RelationSource, attend_empty: bool = True) -> EngineOutput:
    eng = InterpolationEngine(y, attend_empty)
    return EngineOutput(eng, EngineRelation(eng))


def enumerate_domains(sources: Iterable[RelationSource], attend_empty: bool = True) -> list[EngineOutput]:
    return [complete(transitive_closure(s), attend_empty) for s in sources]


# -- audits ------------------------------------------------------------------

@dataclass
class EngineAudit:
    stage: int
    biconditional_failures: list
    irreflexive_failures: list
    unreplaced: list            # dummy ks still active at the stage
    solved_witness_failures: list
    replacement_failures: list

    @property
    def clean(self) -> bool:
        return not (self.biconditional_failures or self.irreflexive_failures
                    or self.solved_witness_failures or self.replacement_failures)

    def to_json(self) -> dict:
        return {
            "kind": "audit",
            "stage": self.stage,
            "biconditional_failures": self.biconditional_failures[:5],
            "irreflexive_failures": self.irreflexive_failures[:5],
            "unreplaced": self.unreplaced,
            "solved_witness_failures": self.solved_witness_failures[:5],
            "replacement_failures": self.replacement_failures[:5],
        }


def audit(out: EngineOutput, stage: int) -> EngineAudit:
    eng = out.engine
    eng.run_to(stage)
    X = out.x_relation.enumerate_upto(stage)
    Y = eng.y.enumerate_upto(stage)
    fv = eng.f_view(stage)
    dom = sorted(fv)
    bic = []
    for x in dom:
        for x2 in dom:
            if ((x, x2) in X) != ((fv[x], fv[x2]) in Y):
                bic.append((x, x2))
    irr = [(a, a) for a, b in X if a == b and not (a in fv and (fv[a], fv[a]) in Y)]
    unreplaced = [d.k for d in eng.state.dummies if d.activated_at < stage
                  and (d.replaced_at is None or d.replaced_at >= stage)]
    solved_bad = []
    repl_bad = []
    for d in eng.state.dummies:
        if d.activated_at >= stage:
            continue
        F, y = PAIRS[d.solves]
        w = 2 * d.k + 1
        if not ((w, y) in X and all((x, w) in X for x in F)):
            solved_bad.append(d.k)
        if d.replaced_at is not None and d.replaced_at < stage:
            Ys = eng.y.enumerate_upto(d.replaced_at + 1)
            fy = eng.f(y)
            if not ((d.value, fy) in Ys and all((eng.f(x), d.value) in Ys for x in F)):
                repl_bad.append(d.k)
    return EngineAudit(stage, bic, irr, unreplaced, solved_bad, repl_bad)
