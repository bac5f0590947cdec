from fractions import Fraction

import pytest

from idealspace import fixtures as fx
from idealspace.carrier import Symbol
from idealspace.relations import FiniteRelation, catalog, check_irreflexive, check_transitive, level_less

import oracles

ZEROS = (0,) * 8
PATHS = [ZEROS, (1,) * 8, (0, 1) * 4, (2, 0, 0, 0, 0, 0, 0, 0)]


def t1(kind, w):
    return Symbol("t1", kind, tuple(w))


def test_t1_underlined_prefixes_strictly_above_plain():
    full = fx.tree_space_t1("full")
    for d in range(1, 7):
        assert fx.t1_prefix_closures(full, ZEROS, d).strictly_contained


def test_t1_outside_tree_closures_coincide():
    root = fx.tree_space_t1("root-only")
    full = fx.tree_space_t1("full")
    for path in PATHS:
        for d in range(1, 7):
            assert fx.same_limit(root, path, d)
            assert not fx.same_limit(full, path, d)


def test_t1_chain_through_parent_outside_tree():
    root = fx.tree_space_t1("root-only")
    for d in range(1, 7):
        sigma = ZEROS[:d]
        rel = root.local_relation([sigma])
        parent = sigma[:-1]
        assert (t1("under", parent), t1("plain", sigma)) in rel.pairs
        # the empty word gets no generators of its own, so the chain starts at depth 2
        assert ((t1("plain", parent), t1("under", parent)) in rel.pairs) == (d >= 2)


def test_tree_spaces_only_relate_comparable_words():
    for make in (fx.tree_space_t1, fx.tree_space_telophase, fx.tree_space_double_origin):
        for tree in ("full", "root-only"):
            space = make(tree)
            assert fx.incomparable_words_never_related(space, 6) is None
            assert check_transitive(space, 6).holds


def test_telophase_principal_ideal():
    tel = fx.tree_space_telophase("full")
    sigma = (0, 1, 1)
    ideal = fx.telophase_ideal(tel, sigma)
    expect = {Symbol("telophase", "under", sigma)}
    for i in range(len(sigma) + 1):
        tau = sigma[:i]
        expect |= {Symbol("telophase", "inf", tau), Symbol("telophase", "infstar", tau)}
    assert ideal == expect


def test_telophase_points_inseparable():
    tel = fx.tree_space_telophase("full")
    for path in PATHS:
        ok, witnesses = fx.telophase_common_bound(tel, path, 5)
        assert ok, witnesses


def test_double_origin_separated():
    space = fx.tree_space_double_origin("full")
    for path in PATHS:
        ok, bad = fx.double_origin_separation(space, path, 4)
        assert ok, bad


def test_tree_param_parsing():
    assert (0, 1) in fx.tree_from_param({"words": [[0, 1]]})
    assert (1,) not in fx.tree_from_param({"depth": 0})
    with pytest.raises(ValueError):
        fx.tree_from_param("bushy")


def test_level_grid_antichains_match_level():
    for level in (1, 2, 3):
        rel, _ = fx.level_grid(level, [Fraction(k, 8) for k in range(8)])
        sizes = {len(a) for a in fx.antichain_census(rel)}
        assert sizes == {level}
    rel, _ = fx.level_grid(3, [Fraction(k, 4) for k in range(4)])
    assert {len(a) for a in fx.antichain_census(rel)} == {3}


def test_antichain_census_matches_oracle():
    for level, qs in ((2, [0, Fraction(1, 2), 1]), (3, [0, 1]), (1, [0, 1, 2, 3])):
        rel, _ = fx.level_grid(level, qs)
        expect = oracles.maximal_compatible_antichains(rel.carrier, rel.pairs)
        assert set(fx.antichain_census(rel)) == expect
    odd = FiniteRelation(range(5), {(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 3)})
    assert set(fx.antichain_census(odd)) == oracles.maximal_compatible_antichains(odd.carrier, odd.pairs)


def test_antichain_census_examples():
    assert fx.antichain_census(FiniteRelation(pairs={(0, 0)})) == [frozenset({0})]
    # two separate chains under their own bottoms: compatible sets never mix
    two = FiniteRelation(range(4), {(0, 1), (2, 3)})
    for a in fx.antichain_census(two):
        assert a <= {0, 1} or a <= {2, 3}
    with pytest.raises(fx.AntichainBoundError):
        fx.antichain_census(FiniteRelation(range(10)), bound=5)


def test_spectrum_relation_within_components():
    spec = fx.SpectrumSpec.from_set({0, 2})
    r = fx.spectrum_relation(spec)
    assert check_irreflexive(r, 100).holds
    for a, b in r.enumerate_upto(100):
        da, db = r.decode(a), r.decode(b)
        assert da[0] == db[0] and level_less(da[1:], db[1:])
    star = catalog("spectrum", {"set": [1], "variant": "star"})
    assert check_irreflexive(star, 100).holds
    assert all(star.decode(a)[0] == star.decode(b)[0] for a, b in star.enumerate_upto(100))


def test_spectrum_encode_decode():
    spec = fx.SpectrumSpec.from_set({1})
    r = fx.spectrum_relation(spec)
    c = 2
    assert r.level(c) == fx.pair_coding(1, 1)
    for m in range(r.level(c)):
        code = r.encode(c, m, Fraction(1, 3))
        assert r.decode(code) == (c, m, Fraction(1, 3))


def test_constant_approximation_is_direct_construction():
    spec = fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 1)]})
    m = fx.approximation_copy(spec, "plain", coding="2a+b+1")
    m.run_to(10)
    assert m.role_log == [] and m.consistency_failures(10) == []
    (comp,) = m.components.values()
    rel, roles = m.component_relation(comp.cid, 10)
    assert rel.pairs == {(a, b) for a in roles for b in roles if level_less(roles[a], roles[b])}
    assert {layer for layer, _ in roles.values()} == {0, 1}


def test_plain_flip_grows_top_layer():
    spec = fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 0), (5, 1)]})
    m = fx.approximation_copy(spec, "plain", coding="2a+b+1")
    m.run_to(12)
    (comp,) = [c for c in m.components.values() if c.kind == "tracked"]
    rel, roles = m.component_relation(comp.cid, 12)
    grid, rect = fx.grid_for_roles(roles)
    assert rect and {layer for layer, _ in roles.values()} == {0, 1}
    assert fx.isomorphic(rel, grid)
    assert m.consistency_failures(12) == []


def test_star_flip_changes_roles_once():
    spec = fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 1), (5, 0)]})
    m = fx.approximation_copy(spec, "star", coding="4a+2+b")
    m.run_to(15)
    changes = m.role_changes()
    assert changes and max(changes.values()) == 1
    for ev in m.role_log:
        assert ev["to"][0] < ev["from"][0]
    assert m.consistency_failures(15) == []
    (comp,) = m.components.values()
    rel, roles = m.component_relation(comp.cid, 15)
    assert fx.isomorphic(rel, fx.role_truncation(roles))


def test_junk_components_stay_apart():
    spec = fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 1), (5, 0)]})
    m = fx.approximation_copy(spec, "star", coding="4a+2+b", junk=True)
    m.run_to(8)
    kinds = {c.kind for c in m.components.values()}
    assert "junk" in kinds
    assert m.consistency_failures(8) == []


def test_approximation_copy_replays_identically():
    spec = fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 0), (5, 1)]})
    a = fx.approximation_copy(spec, "plain", coding="2a+b+1")
    b = fx.approximation_copy(spec, "plain", coding="2a+b+1")
    assert a.log_lines(10) == b.log_lines(10)
    assert a.enumerate_upto(10) == b.enumerate_upto(10)


def test_spectrum_spec_approximation_table():
    spec = fx.SpectrumSpec(lambda c: 1, {3: [(0, 0), (4, 1), (9, 0)]})
    assert [spec.A(3, s) for s in (0, 4, 8, 9)] == [0, 1, 1, 0]
    assert spec.limit(3) == 0 and spec.stabilized_by(3) == 9
    assert spec.A(5, 100) == 0
    assert [fx.pair_coding(a, b) for a in (0, 1, 2) for b in (0, 1)] == list(range(6))
