import random

import pytest

from idealspace.closures import close
from idealspace.ideals import all_ideals
from idealspace.morphisms import (
    ClassificationError,
    FunctionCode,
    HypothesisError,
    apply_code,
    compose,
    finite_code,
    functor_data,
    graph_code,
    identity_code,
    image,
    mor_check,
)
from idealspace.relations import FiniteRelation, Status, as_source, catalog, freeze

import oracles

SIER = catalog("sierpinski")


def random_preorder(rng, n):
    pairs = {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3}
    pairs |= {(a, a) for a in range(n)}
    return FiniteRelation(range(n), close(pairs))


def test_identity_code_on_sierpinski():
    R = identity_code(SIER)
    assert image(R, {0, 1}, 0) == {0, 1}
    view, v = apply_code(R, {0}, 0)
    assert view.members == {0} and v.holds and view.exact


def test_empty_code_image_fails_nonemptiness():
    R = finite_code((), SIER, SIER)
    view, v = apply_code(R, {0, 1}, 0)
    assert view.members == frozenset() and v.refuted


def test_constant_to_top_code():
    R = finite_code({(a, b) for a in (0, 1) for b in (0, 1)}, SIER, SIER)
    for I in all_ideals(freeze(SIER, 0)).ideals:
        assert image(R, I, 0) == {0, 1}


def test_identity_code_passes_all_clauses():
    rng = random.Random(4)
    for _ in range(10):
        p = as_source(random_preorder(rng, rng.randint(1, 5)))
        rep = mor_check(identity_code(p), 3, 10)
        assert rep.holds, rep.to_json()


def test_upward_violation_witness():
    # 0 < 1 in the source, 0 R 1 but not 1 R 1
    R = finite_code({(0, 1), (0, 0), (1, 0)}, SIER, SIER)
    rep = mor_check(R, 0, 5)
    assert rep.upward.refuted and rep.upward.witness == (0, 1, 1)


def test_empty_code_fails_totality():
    rep = mor_check(finite_code((), SIER, SIER), 0, 5)
    assert rep.total.refuted and rep.total.witness == (0,)


def test_unknown_when_code_still_enumerating():
    code = catalog("staged", {"stages": [[0, [[0, 1]]]]})
    rep = mor_check(FunctionCode(code, SIER, SIER), 1, 5)
    assert rep.upward.status is Status.UNKNOWN


def test_compose_identity_identity():
    rng = random.Random(8)
    for _ in range(10):
        p = as_source(random_preorder(rng, rng.randint(1, 5)))
        RR = compose(identity_code(p), identity_code(p))
        for I in all_ideals(freeze(p, 0)).ideals:
            assert image(RR, I, 0) == I


def test_compose_with_empty_code():
    R = compose(identity_code(SIER), finite_code((), SIER, SIER))
    assert image(R, {0, 1}, 0) == frozenset()


def test_compose_evaluation_law_and_associativity():
    rng = random.Random(12)
    for _ in range(10):
        n = rng.randint(1, 4)
        p = as_source(random_preorder(rng, n))
        codes = [finite_code({(a, b) for a in range(n) for b in range(n) if rng.random() < 0.4}, p, p)
                 for _ in range(3)]
        R, S, T = codes
        for I in all_ideals(freeze(p, 0)).ideals:
            direct = oracles.relation_image(S.code.enumerate_upto(0),
                                            oracles.relation_image(R.code.enumerate_upto(0), I))
            assert image(compose(R, S), I, 0) == direct
            assert image(compose(compose(R, S), T), I, 0) == image(compose(R, compose(S, T)), I, 0)


def test_graph_code_identity_and_relabeling():
    rng = random.Random(31)
    for _ in range(10):
        n = rng.randint(1, 5)
        p = random_preorder(rng, n)
        perm = list(range(n))
        rng.shuffle(perm)
        q = FiniteRelation(range(n), {(perm[a], perm[b]) for a, b in p.pairs})
        G = graph_code(dict(enumerate(perm)), as_source(p), as_source(q))
        # membership law: n in [G](I) iff some m in I has m R n
        for I in all_ideals(p).ideals:
            assert image(G, I, 0) == {perm[x] for x in I}
        src = all_ideals(p)
        tgt = all_ideals(q)
        mapped = [frozenset(perm[x] for x in I) for I in src.ideals]
        assert set(mapped) == set(tgt.ideals)
        for i, I in enumerate(src.ideals):
            for j, J in enumerate(src.ideals):
                assert (I <= J) == (mapped[i] <= mapped[j])
    ident = graph_code({0: 0, 1: 1}, SIER, SIER)
    assert image(ident, {0}, 0) == {0}


def test_graph_code_rejects_non_reflecting_map():
    src = as_source(FiniteRelation({0, 1}, {(0, 1)}))
    tgt = as_source(FiniteRelation({0, 1}, set()))
    with pytest.raises(HypothesisError) as e:
        graph_code({0: 0, 1: 1}, src, tgt)
    assert e.value.witness == (0, 1, 0, 1)


def test_functor_data_examples():
    chain = functor_data(freeze(catalog("chain", {"size": 2, "reflexive": True}), 0))
    assert chain.principal == {0: {0}, 1: {0, 1}}
    assert (0, 1) in chain.compact_order and (1, 0) not in chain.compact_order
    anti = functor_data(freeze(catalog("antichain", {"size": 3}), 0))
    assert len(anti.census.ideals) == 3 and anti.census.specialization == set()
    cyc = functor_data(freeze(catalog("cycle", {"size": 2}), 0))
    assert cyc.census.ideals == [frozenset({0, 1})]
    assert cyc.classes == [frozenset({0, 1})]
    with pytest.raises(ClassificationError):
        functor_data(FiniteRelation(pairs={(0, 1)}))
