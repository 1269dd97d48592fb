from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from toroidal_pls.exactla import FieldMatrix, Subspace, invert
from toroidal_pls.fixtures import running_bisheaf, schwarz_pair_bisheaf, torsion_bisheaf
from toroidal_pls.isofy import (OracleRefusal, QuotientCosheaf, SubSheaf, all_subspaces, epify,
                                isobisheafify, monofy, oracle_epify, oracle_monofy, oracle_suite, pls_of,
                                random_circle_cosheaf, random_circle_sheaf, stratify)
from toroidal_pls.sheafcore import (Bisheaf, BisheafError, CellCosheaf, CellSheaf, circle_base, is_episheaf,
                                    is_monocosheaf, relabel_bisheaf, torus_base)


def test_all_subspaces_counts():
    # Gaussian binomials: subspaces of GF(2)^3 are 1 + 7 + 7 + 1
    assert len(all_subspaces(3, 2)) == 16
    assert len(all_subspaces(2, 3)) == 1 + 4 + 1
    assert len(all_subspaces(0, 2)) == 1


def test_stratify_top_cells_first():
    base, _ = torus_base(2, 2)
    layers = stratify(base)
    assert [base.dims[layer[0]] for layer in layers] == [2, 1, 0]
    assert sorted(x for layer in layers for x in layer) == list(range(len(base)))


def test_running_epify_unchanged_and_monofy_rank_one():
    b = running_bisheaf(4)
    e = epify(b.sheaf)
    assert e.iterations == 0
    assert e.as_sheaf() == b.sheaf
    m = monofy(b.cosheaf)
    assert m.dims == [1] * 8
    assert is_monocosheaf(m.as_cosheaf())[0]


def test_zero_objects():
    base = circle_base(3)
    z = CellSheaf(base, [0] * 6, {})
    assert epify(z).iterations == 0
    assert [s.dim for s in epify(z).sub] == [0] * 6
    assert monofy(CellCosheaf(base, [0] * 6, {})).dims == [0] * 6


def test_epify_cuts_a_dead_end():
    # the zero map forces the edge stalk to vanish, and the identity maps carry that around the circle
    base = circle_base(2)
    one = FieldMatrix([[1]], 2)
    zero = FieldMatrix([[0]], 2)
    s = CellSheaf(base, [1, 1, 1, 1], {(2, 0): one, (2, 1): one, (3, 0): one, (3, 1): zero})
    e = epify(s)
    assert [x.dim for x in e.sub] == [0, 0, 0, 0]
    assert is_episheaf(e.as_sheaf())[0]
    assert e.sub == oracle_epify(s).sub


@pytest.mark.parametrize("p", [2, 3])
def test_oracle_agreement_small(p):
    s = oracle_suite(40, seed=7 + p, p=p, max_vertices=3, max_dim=2)
    assert s.ok, (s.sheaf_mismatches, s.cosheaf_mismatches)


def test_oracle_detects_corruption():
    def lazy_epify(s):
        return SubSheaf(s, [Subspace.full(d, s.p) for d in s.stalk_dims])

    def lazy_monofy(c):
        return QuotientCosheaf(c, [Subspace.zero(d, c.p) for d in c.stalk_dims])

    s = oracle_suite(30, seed=1, epify_impl=lazy_epify, monofy_impl=lazy_monofy)
    assert s.sheaf_mismatches and s.cosheaf_mismatches
    assert not s.ok


def test_oracle_refusals():
    with pytest.raises(OracleRefusal):
        oracle_suite(1, 0, p=5)
    with pytest.raises(OracleRefusal):
        oracle_suite(1, 0, max_vertices=5)
    with pytest.raises(OracleRefusal):
        oracle_epify(running_bisheaf(4).sheaf)
    with pytest.raises(OracleRefusal):
        oracle_monofy(schwarz_pair_bisheaf().cosheaf)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([2, 3, 5]), st.integers(2, 6), st.integers(1, 4))
def test_epify_monofy_idempotent_and_bounded(seed, p, m, dmax):
    rng = random.Random(seed)
    s = random_circle_sheaf(rng, p, m, dmax)
    e = epify(s)
    assert is_episheaf(e.as_sheaf())[0]
    assert e.iterations <= len(s.base) * max(1, s.total_dim())
    again = epify(e.as_sheaf())
    assert again.iterations == 0
    assert [x.dim for x in again.sub] == [x.dim for x in e.sub]
    c = random_circle_cosheaf(rng, p, m, dmax)
    q = monofy(c)
    assert is_monocosheaf(q.as_cosheaf())[0]
    assert q.iterations <= len(c.base) * max(1, c.total_dim())
    again_c = monofy(q.as_cosheaf())
    assert again_c.iterations == 0 and again_c.dims == q.dims


def test_relabeling_commutes_with_isofication():
    rng = random.Random(9)
    for b in (running_bisheaf(4), torsion_bisheaf(2)):
        perm = list(range(len(b.base)))
        rng.shuffle(perm)
        r = relabel_bisheaf(b, perm)
        e0, e1 = epify(b.sheaf), epify(r.sheaf)
        m0, m1 = monofy(b.cosheaf), monofy(r.cosheaf)
        for x, y in enumerate(perm):
            assert e0.sub[x] == e1.sub[y]
            assert m0.kern[x] == m1.kern[y]


def test_isobisheaf_and_pls_fixtures():
    assert pls_of(running_bisheaf(4)).dims == [1] * 8
    assert pls_of(torsion_bisheaf(1)).dims == [1] * 4
    assert pls_of(torsion_bisheaf(2)).dims == [2] * 4
    assert pls_of(schwarz_pair_bisheaf()).rank == 0
    iso = isobisheafify(torsion_bisheaf(2))
    assert is_episheaf(iso.as_bisheaf().sheaf)[0]
    for m in pls_of(torsion_bisheaf(2)).maps.values():
        invert(m)


def test_isofication_rejects_noncommuting_input():
    base = circle_base(2)
    one = FieldMatrix([[1]], 2)
    zero = FieldMatrix([[0]], 2)
    rels = {(2, 0): one, (2, 1): one, (3, 0): one, (3, 1): one}
    sheaf = CellSheaf(base, [1] * 4, dict(rels))
    cos = CellCosheaf(base, [1] * 4, dict(rels))
    assert pls_of(Bisheaf(sheaf, cos, {0: zero, 1: zero, 2: zero, 3: zero})).rank == 0
    with pytest.raises(BisheafError):
        isobisheafify(Bisheaf(sheaf, cos, {0: one, 1: zero, 2: one, 3: one}))
