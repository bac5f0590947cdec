import random
from fractions import Fraction

import pytest

from idealspace import carrier as cc
from idealspace.relations import (
    CatalogError,
    FiniteRelation,
    Status,
    Verdict,
    as_source,
    catalog,
    check_irreflexive,
    check_transitive,
    classify,
    combine,
    freeze,
    level_decode,
    level_encode,
    level_less,
)


def test_empty_and_constant_sources():
    e = catalog("empty")
    assert e.enumerate_upto(0) == frozenset() and e.enumerate_upto(40) == frozenset()
    s = as_source(FiniteRelation(pairs={(0, 1)}))
    assert s.enumerate_upto(0) == s.enumerate_upto(9) == {(0, 1)}


def test_finite_relation_rejects_stray_pairs():
    with pytest.raises(ValueError):
        FiniteRelation({0}, {(0, 1)})


def test_monotone_on_random_staged_tables():
    rng = random.Random(7)
    for _ in range(20):
        table = [[s, [[rng.randrange(6), rng.randrange(6)] for _ in range(rng.randrange(4))]]
                 for s in range(6)]
        r = catalog("staged", {"stages": table})
        for s in range(7):
            assert r.enumerate_upto(s) <= r.enumerate_upto(s + 1)


def test_transitivity_witness():
    v = check_transitive(as_source(FiniteRelation(pairs={(0, 1), (1, 2)})), 3)
    assert v.status is Status.REFUTED
    assert v.witness == ((0, 1), (1, 2))
    assert check_transitive(as_source(FiniteRelation(pairs={(0, 1), (1, 2), (0, 2)})), 3).holds


def test_transitivity_unknown_on_enumerable_source():
    # (0,2) could still show up later, so the gap is not final
    r = catalog("staged", {"stages": [[0, [[0, 1], [1, 2]]]]})
    assert check_transitive(r, 1).status is Status.UNKNOWN


def test_rationals_prefix_is_strict_order():
    q = catalog("rationals")
    rep = classify(q, 50)
    assert rep.transitive_upto.holds and rep.irreflexive_upto.holds
    assert all(cc.decode_rational(a) < cc.decode_rational(b) for a, b in q.enumerate_upto(50))


def test_level_order_two():
    assert level_less((0, Fraction(1, 2)), (1, Fraction(3, 4)))
    r = catalog("level-order", {"level": 2})
    a = level_encode(2, 0, Fraction(1, 2))
    b = level_encode(2, 1, Fraction(3, 4))
    assert r.holds(a, b, max(a, b) + 1)
    assert check_irreflexive(r, 60).holds
    for n in range(100):
        assert level_encode(2, *level_decode(2, n)) == n
        assert level_encode("omega", *level_decode("omega", n)) == n


def test_restricted_rationals():
    full = catalog("restricted-rationals", {"theta": "true"})
    assert full.enumerate_upto(30) == catalog("rationals").enumerate_upto(30)
    finite = catalog("restricted-rationals", {"theta": "false"})
    assert finite.carrier_upto(40) == finite.carrier_upto(5)
    part = catalog("restricted-rationals", {"theta": {"below": 3}})
    assert part.carrier_upto(40) == frozenset(range(4))


def test_catalog_errors():
    with pytest.raises(CatalogError):
        catalog("no-such-family")


def test_freeze_and_combine():
    fr = freeze(catalog("chain", {"size": 3}), 0)
    assert fr.pairs == {(0, 1), (0, 2), (1, 2)}
    u = Verdict(Status.UNKNOWN, 1)
    r = Verdict(Status.REFUTED, 2)
    assert combine([u, r]) is r
    assert combine([u, Verdict(Status.HOLDS)]) is u
