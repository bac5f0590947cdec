import random

from hypothesis import given, settings, strategies as st

from idealspace import carrier as cc
from idealspace.closures import close, reflexive_closure, strictify
from idealspace.ideals import (
    IdealView,
    all_ideals,
    check_ideal,
    check_strict_image,
    downward_closure,
    interpolable_bounded,
    nonprincipal_filter,
    principal_ideals,
    strictify_back,
    strictify_forward,
)
from idealspace.relations import FiniteRelation, Status, as_source, catalog

import oracles

SIERPINSKI = FiniteRelation({0, 1}, {(0, 0), (0, 1), (1, 1)})


def test_census_examples():
    assert all_ideals(FiniteRelation(pairs={(0, 1)})).ideals == []
    assert all_ideals(FiniteRelation(pairs={(0, 0)})).ideals == [frozenset({0})]
    cen = all_ideals(SIERPINSKI)
    assert cen.ideals == [frozenset({0}), frozenset({0, 1})]
    assert cen.specialization == {(0, 1)}
    assert cen.lines() == ["ideal 0", "ideal 0 1", "le 0 1"]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))).map(lambda p: (n, p))))
def test_census_matches_subset_oracle(case):
    n, pairs = case
    r = FiniteRelation(range(n), pairs)
    assert set(all_ideals(r).ideals) == oracles.ideals(range(n), pairs)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))).map(lambda p: (n, p))))
def test_transitive_census_is_predecessor_sets(case):
    n, pairs = case
    pairs = close(pairs)
    r = FiniteRelation(range(n), pairs)
    got = set(all_ideals(r).ideals)
    assert got == oracles.predecessor_ideals(range(n), pairs) == set(principal_ideals(r))


def test_check_ideal_examples():
    assert check_ideal(as_source(FiniteRelation(pairs={(0, 0)})), {0}, 5).holds
    v = check_ideal(as_source(SIERPINSKI), {1}, 3)
    assert v.status is Status.REFUTED and v.witness == ("lower", 0, 1)


def test_check_ideal_directedness_in_rationals():
    q = catalog("rationals")
    # a finite lower set of a strict order: its largest member has nothing above it yet
    members = downward_closure(q, [1, 3], 4)
    v = check_ideal(q, members, 4)
    assert v.status is Status.UNKNOWN and v.witness[0] == "directed"
    fin = FiniteRelation(pairs={(0, 1), (0, 2)})
    assert check_ideal(as_source(fin), {0, 1, 2}, 0).refuted


def test_downward_closure():
    s = as_source(FiniteRelation(pairs={(0, 0)}))
    assert downward_closure(s, [0], 3) == {0}
    once = downward_closure(as_source(SIERPINSKI), [1], 0)
    assert downward_closure(as_source(SIERPINSKI), once, 0) == once
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randint(1, 6)
        pairs = {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3}
        g = rng.randrange(n)
        reach = {a for a, b in oracles.transitive_closure(pairs) if b == g} | {g}
        assert downward_closure(as_source(FiniteRelation(range(n), pairs)), [g], 0) == reach


def test_strictify_maps_reflexive_point():
    r = as_source(FiniteRelation(pairs={(0, 0)}))
    img = strictify_forward(r, {0})
    for m in range(5):
        assert cc.encode_finset_pair((), m) in img
        assert cc.encode_finset_pair({0}, m) in img
    assert strictify_back(img) == {0}
    assert strictify_back(list(img.members_upto(4))) == {0}


def test_round_trip_on_random_relations():
    rng = random.Random(23)
    done = 0
    while done < 30:
        n = rng.randint(1, 5)
        pairs = close({(a, b) for a in range(n) for b in range(n) if rng.random() < 0.35})
        pairs |= {(a, a) for a in range(n) if rng.random() < 0.5}
        pairs = close(pairs)
        r = FiniteRelation(range(n), pairs)
        cen = all_ideals(r)
        if not cen.ideals:
            continue
        done += 1
        src = as_source(r)
        st_ = strictify(src)
        images = [strictify_forward(src, I) for I in cen.ideals]
        assert [strictify_back(J) for J in images] == cen.ideals
        assert len({J.base for J in images}) == len(images)
        for J in images:
            assert check_strict_image(st_, J, 5).holds


def test_nonprincipal_filter():
    assert nonprincipal_filter(all_ideals(SIERPINSKI)).ideals == []
    d = reflexive_closure(catalog("dyadic"))
    climbing = IdealView.prefix(d, [0, 2, 6, 14], 20)      # 1/2, 3/4, 7/8, 15/16
    settled = IdealView.prefix(d, [0, 2, 2], 20)
    assert not climbing.is_principal_so_far()
    assert nonprincipal_filter([climbing, settled]) == [climbing]


def test_interpolable_examples():
    assert interpolable_bounded(catalog("rationals"), 30, 100).holds
    two = catalog("two-chain")
    v = interpolable_bounded(two, 5, 3)
    assert v.refuted and v.witness == ("interpolant", 1, (0,))
    with_isolated_loop = as_source(FiniteRelation(pairs={(0, 0), (0, 1), (1, 1), (2, 2)}))
    v = interpolable_bounded(catalog("staged", {"stages": [[0, [[0, 0]]]], "carrier": [0, 1]}), 3, 2)
    assert v.status is Status.UNKNOWN and v.witness == ("interpolant", 1, ())
    assert interpolable_bounded(with_isolated_loop, 3, 0).holds
    assert interpolable_bounded(catalog("level-order", {"level": 2}), 25, 80).holds


def test_empty_segment_flag():
    r = as_source(FiniteRelation({0, 1}, {(0, 0)}))
    assert interpolable_bounded(r, 3, 0).refuted
    assert interpolable_bounded(r, 3, 0, empty_segment_ok=True).holds
