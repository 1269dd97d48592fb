from __future__ import annotations

import random
from fractions import Fraction

import pytest

from toroidal_pls.complex import homology, validate
from toroidal_pls.exactla import FieldMatrix, rank
from toroidal_pls.corpus import (cubical_ring, cubical_torus, parallel_lines, random_cubical, random_periodic_graph,
                                 running_example, twisted_strands)
from toroidal_pls.periodic import (BaseCellulation, UnsupportedGeometry, base_cellulation, cover_projection,
                                   k_fold_cover, periodic_barycentric, periodic_cubical, periodic_simplicial,
                                   prepare_fibers, star_preimages, subdivide_for_fibers, unroll)


def test_simplicial_builder_validates():
    g = running_example(4)
    assert g.check()
    assert g.complex.dims.count(0) == 12
    assert g.complex.dims.count(1) == 16
    assert homology(g.complex, 1).rank == 5


def test_simplicial_builder_rejects_bad_input():
    with pytest.raises(UnsupportedGeometry):
        periodic_simplicial([(0,)], [[(0, (0,)), (0, (1,))]], 1)
    with pytest.raises(ValueError):
        periodic_simplicial([(0,), (Fraction(1, 2),)], [[(0, (0, 0)), (1, (0, 0))]], 1)
    with pytest.raises(ValueError):
        periodic_simplicial([(0,)], [[0, 3]], 1)


def test_cubical_builder():
    t = cubical_torus(2)
    assert t.check()
    assert [t.complex.dims.count(k) for k in range(3)] == [4, 8, 4]
    assert [homology(t.complex, k).rank for k in range(3)] == [1, 2, 1]
    ring = cubical_ring(3, 1)
    assert [homology(ring.complex, k).rank for k in range(3)] == [1, 1, 0]
    with pytest.raises(UnsupportedGeometry):
        periodic_cubical((1, 2), (True, True), [((0, 0), (0, 1))])
    with pytest.raises(ValueError):
        periodic_cubical((2, 2), (False, True), [])


@pytest.mark.parametrize("k", [1, 2, 3])
def test_cover_is_a_quotient(k):
    for g in (running_example(4), twisted_strands(3), cubical_torus(2)):
        gk = k_fold_cover(g, 1, k)
        assert gk.check()
        assert len(gk) == k * len(g)
        proj = cover_projection(g, k)
        c, ck = g.complex, gk.complex
        for x in range(len(ck)):
            lhs = proj.push(ck.boundary_chain(ck.chain(ck.dims[x], {x: 1})))
            rhs = c.boundary_chain(proj[x])
            assert lhs == rhs
        assert ck.euler_characteristic() == k * c.euler_characteristic()


def test_twisted_cover_untwists():
    # two strands trading places every step close up after one turn when the step count is odd
    assert homology(twisted_strands(3).complex, 1).rank == 1
    assert homology(k_fold_cover(twisted_strands(3), 1, 2).complex, 1).rank == 2


def test_unroll_is_finite_piece():
    g = running_example(4)
    fin, q = unroll(g, 2)
    assert validate(fin)
    for x in range(len(fin)):
        img = q[x]
        assert fin.dims[x] == img.degree
    # eight columns, each bounded region spans three steps: five of them fit
    assert homology(fin, 1).rank == 5


def test_base_cellulation():
    b = base_cellulation(running_example(4), 1)
    assert b.vertex_angles == (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
    assert b.artificial == ()
    single = periodic_simplicial([(0, 0), (0, 1)], [[0, 1]], 1)
    b1 = base_cellulation(single, 1)
    assert b1.vertex_angles == (0, Fraction(1, 2))
    assert b1.artificial == (Fraction(1, 2),)
    with pytest.raises(ValueError):
        base_cellulation(single, 1, insert_midpoint=False)
    empty = periodic_simplicial([], [], 1)
    assert base_cellulation(empty, 1).vertex_angles == (0, Fraction(1, 2))
    with pytest.raises(ValueError):
        BaseCellulation(1, (Fraction(1, 2), Fraction(0)))
    cov = b.cover(2)
    assert cov.m == 8 and cov.vertex_angles[1] == Fraction(1, 8)


def test_edge_splitting_preserves_homology():
    rng = random.Random(3)
    for _ in range(20):
        g = random_periodic_graph(rng, n=rng.choice([2, 3]), heights=3, edges=rng.randint(2, 5))
        b = base_cellulation(g, 1).refine([Fraction(rng.randrange(1, 12), 12)])
        g2, carrier = subdivide_for_fibers(g, b)
        assert g2.check()
        h, h2 = homology(g.complex, 1), homology(g2.complex, 1)
        assert h.rank == h2.rank
        pushed = [h2.coords_of(carrier.push(z)) for z in h.representatives]
        if pushed:
            assert rank(FieldMatrix.from_columns(pushed, h2.rank, 2)) == h.rank
        star_preimages(g2, b)


def test_barycentric_keeps_lifts():
    for g in (running_example(3), cubical_torus(2), cubical_ring(2, 1)):
        g2, carrier = periodic_barycentric(g)
        assert g2.check()
        for k in range(g.complex.dimension + 1):
            assert homology(g.complex, k).rank == homology(g2.complex, k).rank


def test_star_preimages_cover_and_nest():
    fm = prepare_fibers(running_example(4), 1)
    sa, c = fm.stars, fm.complex.complex
    m = fm.base.m
    cells = set()
    for j in range(m):
        v, e = j, m + j
        assert sa.X[e] <= sa.X[v]
        assert sa.X[e] <= sa.X[(j + 1) % m]
        assert sa.Y[v] <= sa.X[v]
        assert c.closure(sa.Y[v]) == sa.Y[v]
        cells |= sa.X[v]
    assert cells == set(range(len(c)))


def test_prepare_fibers_running():
    fm = prepare_fibers(running_example(4), 1)
    assert fm.rounds == 2
    assert all(fm.cuts[j] is not None for j in range(fm.base.m))
    for j in range(fm.base.m):
        a, b = fm.base.edge_span(j)
        assert a < fm.cuts[j] < b
        phi = fm.cut_cocycle(j)
        assert phi.degree == 1 and not phi.is_zero()


def test_prepare_fibers_refuses_simplicial_torus():
    g = periodic_simplicial([(0, 0), (Fraction(1, 2), Fraction(1, 2))], [[(0, (0, 0)), (1, (0, 0))]], 2)
    with pytest.raises(UnsupportedGeometry):
        prepare_fibers(g, 1)


def test_prepare_fibers_random_cubical():
    rng = random.Random(11)
    for _ in range(10):
        g = random_cubical(rng)
        for i in range(1, g.d + 1):
            fm = prepare_fibers(g, i)
            assert fm.complex.check()
            assert all(c is not None for c in fm.cuts.values())


def test_parallel_lines_counts():
    g = parallel_lines(3, 2)
    assert homology(g.complex, 0).rank == 2
    assert homology(g.complex, 1).rank == 2
