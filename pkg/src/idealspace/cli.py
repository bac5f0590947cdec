"""Command-line front end.

Every command reads a JSON spec (``--spec``), runs one library operation and
prints records: human text by default, or one JSON object per line with a
"kind" field under ``--format machine``.  Exit codes: 0 holds, 1 refuted
(witness printed), 2 unknown at the given bounds, 3 usage or spec error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from typing import Callable

from .closures import PORepair, Strictified, is_strict_order_on, transitive_closure
from .constructions import Extended, extension_census
from .engine import EngineOutput, EngineRelation, audit, complete
from .fixtures import (
    ApproximationCopies,
    SpectrumRelation,
    TreeSpace,
    antichain_census,
    double_origin_separation,
    grid_for_roles,
    incomparable_words_never_related,
    isomorphic,
    role_truncation,
    same_limit,
    t1_prefix_closures,
    telophase_common_bound,
)
from .ideals import (
    CensusBoundError,
    all_ideals,
    check_strict_image,
    interpolable_bounded,
    strictify_back,
    strictify_forward,
)
from .morphisms import mor_check
from .relations import HOLDS, RelationSource, Status, Verdict, check_transitive, classify, combine, freeze
from .specfile import Document, SpecError, load

EXIT = {Status.HOLDS: 0, Status.REFUTED: 1, Status.UNKNOWN: 2}
USAGE = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    spec_path: str
    command: str
    stage: int | None
    element_bound: int | None
    output: str
    seed: int
    flags: frozenset

    def need_stage(self, default: int) -> int:
        return self._need("stage", self.stage, default)

    def need_bound(self, default: int) -> int:
        return self._need("bound", self.element_bound, default)

    def _need(self, name, value, default):
        if value is not None:
            return value
        if self.output == "machine":
            raise UsageError(f"--{name} is required with --format machine")
        return default


# -- commands ----------------------------------------------------------------
# each returns (records, verdict)

def _verdict_record(name: str, v: Verdict) -> dict:
    return {"kind": "verdict", "check": name, **v.to_json()}


def _relation(doc: Document) -> RelationSource:
    if doc.relation is None:
        raise UsageError("this command needs a relation spec")
    return doc.relation


def cmd_show(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(8)
    pairs = sorted(r.enumerate_upto(stage))
    carrier = sorted(r.carrier_upto(stage))
    recs = [{"kind": "relation", "label": r.label, "stage": stage, "constant": r.constant,
             "decidable": r.decidable, "carrier_size": len(carrier), "pair_count": len(pairs)}]
    bound = cfg.element_bound
    shown = [p for p in pairs if bound is None or max(p) <= bound]
    recs += [{"kind": "pair", "a": a, "b": b, "show": f"{r.describe(a)} < {r.describe(b)}"} for a, b in shown]
    return recs, HOLDS


def cmd_classify(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(8)
    rep = classify(r, stage)
    recs = [_verdict_record(k, v) for k, v in rep.verdicts().items()]
    # transitivity is the standing hypothesis; the others are descriptive
    return recs, rep.transitive_upto


def cmd_closure(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(8)
    tc = transitive_closure(r)
    before = r.enumerate_upto(stage)
    pairs = sorted(tc.enumerate_upto(stage))
    recs = [{"kind": "closure", "label": tc.label, "stage": stage, "pair_count": len(pairs),
             "added": len(set(pairs) - before)}]
    recs += [{"kind": "pair", "a": a, "b": b, "added": (a, b) not in before} for a, b in pairs]
    return recs, HOLDS


def cmd_ideals(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(0 if r.constant else 8)
    fin = freeze(r, stage)
    try:
        cen = all_ideals(fin, cfg.need_bound(14))
    except CensusBoundError as e:
        raise UsageError(str(e)) from None
    recs = [{"kind": "census", "stage": stage, "exact": r.constant, "count": len(cen.ideals)}]
    recs += [{"kind": "ideal", "index": i, "members": sorted(I)} for i, I in enumerate(cen.ideals)]
    recs += [{"kind": "specialization", "below": i, "above": j} for i, j in sorted(cen.specialization)]
    return recs, HOLDS if r.constant else Verdict(Status.UNKNOWN, None, "census of a stage prefix")


def cmd_strictify(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(6)
    count = cfg.need_bound(60)
    st = r if isinstance(r, Strictified) else Strictified(r, None if r.constant else 2)
    base = st.base
    els = st.first_elements(count, None if base.constant else stage)
    w = is_strict_order_on(st, els, None if base.constant else stage)
    recs = [{"kind": "strict-order", "elements": len(els), "witness": w}]
    verdict = HOLDS if w is None else Verdict(Status.REFUTED, w, "not a strict order")
    if base.constant and len(base.carrier_upto(0)) <= 8:
        cen = all_ideals(freeze(base, 0))
        images = []
        for I in cen.ideals:
            J = strictify_forward(base, I)
            v = check_strict_image(st, J, stage, 2)
            back = strictify_back(J)
            images.append(J.base)
            recs.append({"kind": "round-trip", "ideal": sorted(I), "back": sorted(back),
                         "image_check": v.status.value})
            verdict = combine([verdict, v, HOLDS if back == I else
                               Verdict(Status.REFUTED, sorted(I), "g(f(I)) differs from I")])
        recs.append({"kind": "injective", "holds": len(set(images)) == len(images)})
    return recs, verdict


def cmd_extend(doc, cfg):
    r = _relation(doc)
    if not isinstance(r, Extended):
        raise UsageError("extend needs a spec whose top node is {'op': 'extend', ...}")
    stage = cfg.need_stage(60)
    base = r.base
    if not base.constant:
        els = sorted(r.carrier_upto(min(stage, 4)))[: cfg.need_bound(40)]
        w = is_strict_order_on(r, els, min(stage, 4))
        return ([{"kind": "extension", "elements": len(els), "witness": w}],
                Verdict(Status.UNKNOWN, None, "census needs a finite base"))
    cen = extension_census(r, stage)
    base_cen = all_ideals(freeze(base, 0))
    recs = [{"kind": "extension-census", **cen.to_json()}]
    images = cen.images
    onto = sorted(map(sorted, set(images))) == sorted(map(sorted, base_cen.ideals))
    injective = len(set(images)) == len(images)
    recs.append({"kind": "g-map", "onto_base_census": onto, "injective": injective,
                 "base_ideals": [sorted(I) for I in base_cen.ideals]})
    v = HOLDS if (onto and injective) else Verdict(Status.REFUTED, [sorted(I) for I in images],
                                                   "g is not a bijection onto the base census")
    return recs, v


def cmd_interpolate(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(300)
    bound = cfg.need_bound(40)
    if isinstance(r, EngineRelation):
        out_engine = r.engine
        X = r
    else:
        out = complete(r)
        out_engine, X = out.engine, out.x_relation
    out_engine.run_to(stage)
    rep = audit(EngineOutput(out_engine, X), stage)
    tv = check_transitive(X, stage)
    iv = interpolable_bounded(X, bound, stage, "empty-segment-ok" in cfg.flags)
    recs = [
        _verdict_record("transitive", tv),
        _verdict_record("interpolable", iv),
        {"kind": "engine", "stage": stage, "pairs": len(X.enumerate_upto(stage)),
         "dummies": len(out_engine.state.dummies)},
        rep.to_json(),
    ]
    av = HOLDS if rep.clean else Verdict(Status.REFUTED, rep.to_json(), "engine audit failed")
    return recs, combine([tv, iv, av])


def cmd_morcheck(doc, cfg):
    if doc.code is None:
        raise UsageError("morcheck needs a code document {'code': ..., 'from': ..., 'to': ...}")
    stage = cfg.need_stage(8)
    bound = cfg.need_bound(20)
    rep = mor_check(doc.code, stage, bound)
    recs = [_verdict_record(k, v) for k, v in rep.clauses().items()]
    return recs, combine(rep.clauses().values())


def cmd_antichains(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(0 if r.constant else 16)
    fin = freeze(r, stage)
    try:
        found = antichain_census(fin, cfg.need_bound(64))
    except ValueError as e:
        raise UsageError(str(e)) from None
    sizes = sorted({len(a) for a in found})
    recs = [{"kind": "antichains", "stage": stage, "count": len(found), "sizes": sizes}]
    recs += [{"kind": "antichain", "members": sorted(a), "size": len(a)} for a in found]
    return recs, HOLDS


def _paths(doc, cfg, depth):
    fx = doc.get("fixture", {}) or {}
    paths = fx.get("paths")
    if paths:
        return [tuple(p) for p in paths]
    rng = random.Random(cfg.seed)
    return [(0,) * (depth + 1)] + [tuple(rng.randrange(3) for _ in range(depth + 1)) for _ in range(4)]


def cmd_fixture(doc, cfg):
    r = _relation(doc)
    recs, verdicts = [], []
    if isinstance(r, TreeSpace):
        depth = cfg.need_bound(4)
        stage = cfg.need_stage(6)
        paths = _paths(doc, cfg, depth)
        bad = incomparable_words_never_related(r, stage)
        recs.append({"kind": "comparable-words", "stage": stage, "witness": None if bad is None else list(map(str, bad))})
        verdicts.append(HOLDS if bad is None else Verdict(Status.REFUTED, list(map(str, bad))))
        for p in paths:
            rec = {"kind": "path", "word": list(p), "depth": depth}
            if r.family == "t1":
                rec["strict_containment"] = [t1_prefix_closures(r, p, d).strictly_contained
                                             for d in range(1, depth + 1)]
                rec["same_limit"] = [same_limit(r, p, d) for d in range(1, depth + 1)]
            elif r.family == "telophase":
                ok, wit = telophase_common_bound(r, p, depth)
                rec["common_bounds"] = ok
                verdicts.append(HOLDS if ok else Verdict(Status.UNKNOWN, [list(w) for w in wit],
                                                         "no common bound in the prefix"))
            else:
                ok, wit = double_origin_separation(r, p, depth)
                rec["separated"] = ok
                if not ok:
                    rec["witness"] = [wit[0], list(wit[1]), str(wit[2])]
            recs.append(rec)
    elif isinstance(r, SpectrumRelation):
        stage = cfg.need_stage(100)
        pairs = r.enumerate_upto(stage)
        cross = next(((a, b) for a, b in sorted(pairs) if r.decode(a)[0] != r.decode(b)[0]), None)
        refl = next((a for a, b in sorted(pairs) if a == b), None)
        recs.append({"kind": "spectrum", "stage": stage, "pairs": len(pairs),
                     "cross_component": cross, "reflexive": refl})
        verdicts.append(HOLDS if cross is None and refl is None else
                        Verdict(Status.REFUTED, cross or refl))
    elif isinstance(r, ApproximationCopies):
        stage = cfg.need_stage(20)
        r.run_to(stage)
        changes = r.role_changes()
        bad = r.consistency_failures(stage)
        recs.append({"kind": "role-ledger", "stage": stage, "changed": len(changes),
                     "max_changes": max(changes.values(), default=0), "unsupported_pairs": bad[:5]})
        for comp in sorted(r.components.values(), key=lambda c: c.cid):
            if comp.kind != "tracked":
                continue
            rel, roles = r.component_relation(comp.cid, stage)
            _, rect = grid_for_roles(roles)
            stable = r.spec.stabilized_by(comp.a) < stage
            recs.append({"kind": "component", "id": comp.cid, "a": comp.a, "layers": comp.layers,
                         "elements": len(roles), "rectangular": rect,
                         "isomorphic": isomorphic(rel, role_truncation(roles)), "stabilized": stable})
        ok = not bad and max(changes.values(), default=0) <= 1
        verdicts.append(HOLDS if ok else Verdict(Status.REFUTED, bad[:5] or changes))
    else:
        raise UsageError("fixture needs a tree, spectrum or approximation-copy catalog node")
    return recs, combine(verdicts) if verdicts else HOLDS


def cmd_audit(doc, cfg):
    r = _relation(doc)
    stage = cfg.need_stage(40)
    if isinstance(r, EngineRelation):
        lines = r.engine.log_lines(stage)
    elif isinstance(r, ApproximationCopies):
        lines = r.log_lines(stage)
    elif isinstance(r, PORepair):
        led = r.ledger(stage)
        recs = [{"kind": "repair", "stage": stage, "frozen_after": led.frozen_after,
                 "violation": r.violation, "isolated": sorted(led.isolated_from)}]
        return recs, HOLDS
    else:
        raise UsageError("audit needs a stage machine: op 'complete', op 'po-repair' or approximation-copy")
    return [json.loads(line) for line in lines], HOLDS


COMMANDS: dict[str, Callable] = {
    "show": cmd_show,
    "classify": cmd_classify,
    "ideals": cmd_ideals,
    "closure": cmd_closure,
    "strictify": cmd_strictify,
    "extend": cmd_extend,
    "interpolate": cmd_interpolate,
    "morcheck": cmd_morcheck,
    "antichains": cmd_antichains,
    "fixture": cmd_fixture,
    "audit": cmd_audit,
}


# -- output ------------------------------------------------------------------

def _human(rec: dict) -> str:
    kind = rec.get("kind", "?")
    rest = " ".join(f"{k}={json.dumps(v, sort_keys=True, default=str)}" for k, v in rec.items() if k != "kind")
    return f"{kind}: {rest}" if rest else kind


def render(records: list[dict], verdict: Verdict, fmt: str) -> str:
    final = {"kind": "result", **verdict.to_json()}
    lines = []
    for rec in records + [final]:
        if fmt == "machine":
            lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":"), default=str))
        else:
            lines.append(_human(rec))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idealspace", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--spec", required=True, help="path to a JSON relation spec")
    p.add_argument("--stage", type=int, help="stage bound")
    p.add_argument("--bound", type=int, help="element bound")
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flag", action="append", default=[], choices=["empty-segment-ok"])
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else 0
    for name in ("stage", "bound"):
        v = getattr(args, name)
        if v is not None and v < 0:
            print(f"error: --{name} must be >= 0", file=sys.stderr)
            return USAGE
    cfg = RunConfig(args.spec, args.command, args.stage, args.bound, args.format, args.seed,
                    frozenset(args.flag))
    try:
        doc = load(cfg.spec_path)
        records, verdict = COMMANDS[cfg.command](doc, cfg)
    except SpecError as e:
        print(f"spec error at {e.path}: {e.message}", file=sys.stderr)
        return USAGE
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    out.write(render(records, verdict, cfg.output))
    return EXIT[verdict.status]


if __name__ == "__main__":
    sys.exit(main())
