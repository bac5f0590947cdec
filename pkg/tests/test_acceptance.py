"""Acceptance criteria 1-9, each at its stated tolerance and time limit.

A per-criterion PASS/FAIL line is printed in the terminal summary.
"""
import io
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from idealspace import fixtures as fx
from idealspace.cli import main as cli_main
from idealspace.closures import close, is_strict_order_on, po_repair, strictify
from idealspace.constructions import ExtensionSpec, FiniteSet, extend_with_closed, extension_census
from idealspace.engine import audit, complete
from idealspace.ideals import (
    all_ideals,
    check_strict_image,
    interpolable_bounded,
    strictify_back,
    strictify_forward,
)
from idealspace.morphisms import compose, finite_code, graph_code, identity_code, image
from idealspace.relations import FiniteRelation, as_source, catalog, check_transitive, freeze

import oracles

SPECS = Path(__file__).resolve().parents[1] / "demos" / "specs"


class Clock:
    def __init__(self, limit):
        self.limit = limit
        self.start = time.perf_counter()

    def check(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.limit, f"took {elapsed:.1f}s, limit {self.limit}s"


def random_relation(rng, n):
    kind = rng.randrange(3)
    pairs = {(a, b) for a in range(n) for b in range(n) if rng.random() < rng.choice((0.15, 0.3, 0.5))}
    if kind >= 1:
        pairs = close(pairs | {(a, a) for a in range(n) if rng.random() < 0.5})
    if kind == 2:
        pairs |= {(a, a) for a in range(n)}
    return pairs


def random_preorder(rng, n):
    pairs = {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3}
    return FiniteRelation(range(n), close(pairs | {(a, a) for a in range(n)}))


@pytest.mark.criterion(1, "ideal census agrees with brute-force oracle on 200 relations, < 10 s")
def test_criterion_1_ideal_oracle():
    clock = Clock(10)
    rng = random.Random(1)
    nonempty = 0
    for _ in range(200):
        n = rng.randint(1, 10)
        pairs = random_relation(rng, n)
        got = set(all_ideals(FiniteRelation(range(n), pairs)).ideals)
        assert got == oracles.ideals_bitmask(n, pairs), (n, sorted(pairs))
        nonempty += bool(got)
    assert nonempty > 100
    clock.check()


@pytest.mark.criterion(2, "strictification round trip on 50 transitive relations, < 30 s")
def test_criterion_2_strictify_round_trip():
    clock = Clock(30)
    rng = random.Random(2)
    done = 0
    while done < 50:
        n = rng.randint(1, 6)
        pairs = close({(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3})
        r = FiniteRelation(range(n), pairs)
        census = all_ideals(r).ideals
        if not census:
            continue
        done += 1
        src = as_source(r)
        st = strictify(src)
        images = [strictify_forward(src, I) for I in census]
        assert [strictify_back(J) for J in images] == census
        assert len({J.base for J in images}) == len(images)
        for J in images:
            assert check_strict_image(st, J, 6).holds
        assert is_strict_order_on(st, st.first_elements(60)) is None
    clock.check()


@pytest.mark.criterion(3, "Sierpinski extension with U={1}: g bijective, fibers incomparable, stage 60, < 10 s")
def test_criterion_3_extension_discrete():
    clock = Clock(10)
    base = catalog("sierpinski")
    ext = extend_with_closed(ExtensionSpec(base, FiniteSet({1})))
    cen = extension_census(ext, 60)
    base_census = all_ideals(freeze(base, 0)).ideals
    assert len(base_census) == 2
    assert sorted(cen.images, key=sorted) == sorted(base_census, key=sorted)
    assert len(set(cen.images)) == len(cen.images)
    a, b = cen.families
    assert not (a <= b or b <= a)
    clock.check()


@pytest.mark.criterion(4, "engine on dyadic rationals, 300 stages: transitive, interpolable(40), "
                          "biconditional, replacements, < 60 s")
def test_criterion_4_engine_rationals():
    clock = Clock(60)
    out = complete(catalog("dyadic"))
    out.engine.run_to(300)
    X = out.x_relation
    assert check_transitive(X, 300).holds
    assert interpolable_bounded(X, 40, 300).holds
    rep = audit(out, 300)
    assert rep.biconditional_failures == [] and rep.clean
    early = [d for d in out.dummies if d.activated_at <= 100]
    assert early and all(d.replaced_at is not None and d.replaced_at < 300 for d in early)
    clock.check()


@pytest.mark.criterion(5, "engine on the 2-chain: an unreplaced dummy, output interpolable(3), < 30 s")
def test_criterion_5_engine_two_chain():
    clock = Clock(30)
    out = complete(catalog("two-chain"))
    rep = audit(out, 300)
    assert rep.clean
    assert rep.unreplaced
    assert any(d.replaced_at is None for d in out.dummies)
    assert check_transitive(out.x_relation, 300).holds
    # 3 is the largest bound whose worst (F, y) index is attended before stage 300
    assert interpolable_bounded(out.x_relation, 3, 300).holds
    clock.check()


WORDS = [(0,) * 8, (1,) * 8, (0, 1) * 4, (2, 0, 0, 0, 0, 0, 0, 0), (1, 0, 2, 0, 1, 0, 0, 0)]


@pytest.mark.criterion(6, "tree fixtures: T1 containment, coinciding closures, telophase bounds, "
                          "double-origin separation, < 30 s")
def test_criterion_6_tree_fixtures():
    clock = Clock(30)
    full = fx.tree_space_t1("full")
    root = fx.tree_space_t1("root-only")
    for w in WORDS:
        for d in range(1, 7):
            assert fx.t1_prefix_closures(full, w, d).strictly_contained, (w, d)
            assert fx.same_limit(root, w, d), (w, d)
    tel = fx.tree_space_telophase("full")
    dor = fx.tree_space_double_origin("full")
    for w in WORDS:
        for d in range(1, 6):
            ok, wit = fx.telophase_common_bound(tel, w, d)
            assert ok, wit
        for d in range(1, 5):
            ok, bad = fx.double_origin_separation(dor, w, d)
            assert ok, bad
    clock.check()


@pytest.mark.criterion(7, "spectra: antichains of size 3 on 3x8 grid, 0->1 flip isomorphic to 2 layers, "
                          "star roles change at most once, < 30 s")
def test_criterion_7_spectra():
    clock = Clock(30)
    grid, _ = fx.level_grid(3, [Fraction(k, 8) for k in range(8)])
    found = fx.antichain_census(grid)
    assert found and {len(a) for a in found} == {3}

    plain = fx.approximation_copy(fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 0), (5, 1)]}),
                                  "plain", coding="2a+b+1")
    plain.run_to(20)
    (comp,) = [c for c in plain.components.values() if c.kind == "tracked"]
    rel, roles = plain.component_relation(comp.cid, 20)
    truncation, rect = fx.grid_for_roles(roles)
    assert rect and len({layer for layer, _ in roles.values()}) == 2
    assert fx.isomorphic(rel, truncation)

    star = fx.approximation_copy(fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 1), (5, 0)]}),
                                 "star", coding="4a+2+b")
    star.run_to(20)
    changes = star.role_changes()
    assert changes and max(changes.values()) <= 1
    assert star.consistency_failures(20) == []
    clock.check()


@pytest.mark.criterion(8, "morphism laws: identity, composition, relabeling membership, < 30 s")
def test_criterion_8_morphism_laws():
    clock = Clock(30)
    rng = random.Random(8)
    for _ in range(20):
        p = random_preorder(rng, rng.randint(1, 6))
        src = as_source(p)
        for I in all_ideals(p).ideals:
            assert image(identity_code(src), I, 0) == I
    for _ in range(10):
        n = rng.randint(1, 5)
        p = random_preorder(rng, n)
        src = as_source(p)
        R = finite_code({(a, b) for a in range(n) for b in range(n) if rng.random() < 0.4}, src, src)
        S = finite_code({(a, b) for a in range(n) for b in range(n) if rng.random() < 0.4}, src, src)
        for I in all_ideals(p).ideals:
            assert image(compose(R, S), I, 0) == image(S, image(R, I, 0), 0)
    for _ in range(10):
        n = rng.randint(1, 6)
        p = random_preorder(rng, n)
        perm = list(range(n))
        rng.shuffle(perm)
        q = FiniteRelation(range(n), {(perm[a], perm[b]) for a, b in p.pairs})
        G = graph_code(dict(enumerate(perm)), as_source(p), as_source(q))
        for I in all_ideals(p).ideals:
            assert image(G, I, 0) == {perm[x] for x in I}
    clock.check()


def _cli(*argv):
    buf = io.StringIO()
    code = cli_main([str(a) for a in argv] + ["--format", "machine"], out=buf)
    return code, buf.getvalue().encode()


@pytest.mark.criterion(9, "stage machines and CLI machine output replay byte-identically")
def test_criterion_9_determinism():
    def engine_bytes(name):
        out = complete(catalog(name))
        return "\n".join(out.engine.log_lines(120)).encode(), sorted(out.x_relation.enumerate_upto(120))

    for name in ("dyadic", "two-chain", "empty"):
        assert engine_bytes(name) == engine_bytes(name)

    def approx_bytes(variant, table, coding):
        m = fx.approximation_copy(fx.SpectrumSpec(lambda c: fx.OMEGA, table), variant, coding=coding)
        return "\n".join(m.log_lines(12)).encode(), sorted(m.enumerate_upto(12)), m.role_log

    for args in (("plain", {0: [(0, 0), (5, 1)]}, "2a+b+1"), ("star", {0: [(0, 1), (5, 0)]}, "4a+2+b")):
        assert approx_bytes(*args) == approx_bytes(*args)

    stages = [[0, [[0, 1]]], [2, [[1, 0]]], [3, [[2, 3]]]]

    def repair_bytes():
        o = po_repair(catalog("staged", {"stages": stages}))
        return sorted(o.enumerate_upto(8)), o.freeze_stage(8)

    assert repair_bytes() == repair_bytes()

    runs = [
        ("interpolate", "--spec", SPECS / "two_chain.json", "--stage", 150, "--bound", 3),
        ("audit", "--spec", SPECS / "dyadic_engine.json", "--stage", 80),
        ("fixture", "--spec", SPECS / "approx_star.json", "--stage", 12, "--bound", 8),
        ("fixture", "--spec", SPECS / "tree_t1.json", "--stage", 6, "--bound", 6, "--seed", 3),
        ("audit", "--spec", SPECS / "po_repair.json", "--stage", 6),
        ("ideals", "--spec", SPECS / "sierpinski.json", "--stage", 0, "--bound", 14),
    ]
    for argv in runs:
        first, second = _cli(*argv), _cli(*argv)
        assert first == second and first[1]
