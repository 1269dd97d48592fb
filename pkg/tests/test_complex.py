from __future__ import annotations

import itertools
import random

import pytest

from toroidal_pls.complex import (
    CellComplex, ChainVector, ComplexError, UnsupportedComplex, barycentric_subdivide, cap_product,
    cohomology, from_simplices, homology, maximal_subcomplex, relative_homology, validate,
)


def circle(n: int, p: int = 2) -> CellComplex:
    """n vertices, n edges (n >= 1), as a Delta-complex when n >= 2."""
    dims = [0] * n + [1] * n
    bnd = [[] for _ in range(n)]
    for i in range(n):
        a, b = i, (i + 1) % n
        bnd.append([(b, 1), (a, -1)])
    return CellComplex(dims, bnd, p)


def ordered_circle(n: int, p: int = 2) -> CellComplex:
    return from_simplices([(i, (i + 1) % n) for i in range(n)], p)


def random_complex(rng: random.Random, nverts: int, nsimp: int, p: int = 2) -> CellComplex:
    sims = []
    for _ in range(nsimp):
        k = rng.randint(1, min(3, nverts))
        sims.append(tuple(rng.sample(range(nverts), k)))
    sims += [(v,) for v in range(nverts)]
    return from_simplices(sims, p)


def ranks(c: CellComplex) -> list[int]:
    return [homology(c, k).rank for k in range(c.dimension + 2)]


def test_validate_examples():
    assert validate(CellComplex([0], [[]]))
    assert validate(from_simplices([(0, 1, 2)]))
    bad = CellComplex([0, 1, 1], [[], [(0, 1)], [(1, 1)]])
    with pytest.raises(ComplexError) as e:
        validate(bad)
    assert e.value.code == "gradation"
    twice = CellComplex([0, 0, 1, 2], [[], [], [(0, 1), (1, -1)], [(2, 1)]], p=3)
    with pytest.raises(ComplexError) as e:
        validate(twice)
    assert e.value.code == "boundary-squared"
    with pytest.raises(ComplexError) as e:
        validate(CellComplex([0, 1], [[], [(5, 1)]]))
    assert e.value.code == "dense-ids"


@pytest.mark.parametrize("n", [1, 2, 3, 7])
@pytest.mark.parametrize("p", [2, 3])
def test_circle_homology(n, p):
    c = circle(n, p)
    validate(c)
    assert homology(c, 0).rank == 1 and homology(c, 1).rank == 1
    assert homology(c, 2).rank == 0 and homology(c, -1).rank == 0
    assert cohomology(c, [], 1).rank == 1


def test_two_points_and_pairs():
    c = CellComplex([0, 0], [[], []])
    assert homology(c, 0).rank == 2
    interval = from_simplices([(0, 1)])
    ends = [0, 1]
    assert relative_homology(interval, ends, 1).rank == 1
    assert relative_homology(interval, ends, 0).rank == 0
    assert cohomology(interval, ends, 1).rank == 1
    every = range(len(interval))
    assert all(relative_homology(interval, every, k).rank == 0 for k in range(3))
    assert all(cohomology(interval, every, k).rank == 0 for k in range(3))
    with pytest.raises(ComplexError):
        relative_homology(interval, [2], 1)


def test_coords_of_representatives_and_boundaries():
    c = from_simplices([(0, 1, 2), (0, 2, 3), (3, 4), (4, 0)])
    h = homology(c, 1)
    assert h.rank == 1
    for i, rep in enumerate(h.representatives):
        assert c.boundary_chain(rep).is_zero()
        assert h.coords_of(rep) == tuple(int(i == j) for j in range(h.rank))
    for t in c.cells_of_dim(2):
        assert h.coords_of(c.boundary_chain(c.chain(2, {t: 1}))) == (0,)
    with pytest.raises(ValueError):
        h.coords_of(c.chain(1, {c.cells_of_dim(1)[0]: 1}))


def test_coords_of_enumeration_small():
    rng = random.Random(5)
    for _ in range(30):
        c = random_complex(rng, 5, 5)
        if len(c) > 12:
            continue
        for k in range(c.dimension + 1):
            h = homology(c, k)
            cells = c.cells_of_dim(k)
            bnds = set()
            up = c.cells_of_dim(k + 1)
            for coeffs in itertools.product(range(2), repeat=len(up)):
                z = c.boundary_chain(c.chain(k + 1, {u: a for u, a in zip(up, coeffs)}))
                bnds.add(frozenset(z.coeffs.items()))
            for coeffs in itertools.product(range(2), repeat=len(cells)):
                z = c.chain(k, {x: a for x, a in zip(cells, coeffs)})
                if not c.boundary_chain(z).is_zero():
                    continue
                coords = h.coords_of(z)
                assert (not any(coords)) == (frozenset(z.coeffs.items()) in bnds)
                back = h.chain_of(coords)
                assert frozenset((back - z).coeffs.items()) in bnds


def test_subdivision_counts_and_carrier():
    sd = barycentric_subdivide(from_simplices([(0, 1)]))
    assert sd.complex.dims.count(0) == 3 and sd.complex.dims.count(1) == 2
    sd = barycentric_subdivide(from_simplices([(0, 1, 2)]))
    assert [sd.complex.dims.count(k) for k in range(3)] == [7, 12, 6]
    with pytest.raises(UnsupportedComplex):
        barycentric_subdivide(circle(1))


@pytest.mark.parametrize("seed", range(40))
def test_subdivision_invariants(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3])
    c = random_complex(rng, rng.randint(2, 6), rng.randint(1, 6), p)
    validate(c)
    sd = barycentric_subdivide(c)
    validate(sd.complex)
    assert ranks(c) == ranks(sd.complex)
    for x in range(len(c)):
        z = c.chain(c.dims[x], {x: 1})
        assert sd.push(c.boundary_chain(z)) == sd.complex.boundary_chain(sd.push(z))
    chi = c.euler_characteristic()
    assert chi == sum((-1) ** k * r for k, r in enumerate(ranks(c)))
    h = homology(c, 1)
    hs = homology(sd.complex, 1)
    pushed = [hs.coords_of(sd.push(r)) for r in h.representatives]
    from toroidal_pls.exactla import FieldMatrix, rank
    if pushed:
        assert rank(FieldMatrix(pushed, p)) == h.rank


def test_maximal_subcomplex():
    c = from_simplices([(0, 1), (1, 2), (0, 2), (2, 3)])
    closed = c.closure([4])
    assert maximal_subcomplex(c, closed) == closed
    e = c.cells_of_dim(1)[0]
    assert maximal_subcomplex(c, {e}) == frozenset()
    sq = from_simplices([(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)])
    centre = 4
    star = sq.star([centre])
    got = maximal_subcomplex(sq, star)
    # definition replay: largest face-closed subset
    best = frozenset()
    items = sorted(star)
    for r in range(len(items) + 1):
        for subset in itertools.combinations(items, r):
            s = frozenset(subset)
            if all(f in s for x in s for f in sq.faces(x)) and len(s) > len(best):
                best = s
    assert got == best == frozenset({centre})


def test_cap_examples():
    c = ordered_circle(4)
    fund = c.chain(1, {e: 1 for e in c.cells_of_dim(1)})
    assert cap_product(c, fund, ChainVector.zero(1, 2)).is_zero()
    e0 = c.cells_of_dim(1)[0]
    capped = cap_product(c, fund, c.chain(1, {e0: 1}))
    assert capped.degree == 0 and len(capped.coeffs) == 1
    assert homology(c, 0).coords_of(capped) == (1,)


def _cap(c: CellComplex, z: ChainVector, phi: ChainVector) -> ChainVector:
    # a cochain of higher degree than the chain caps to zero
    if phi.degree > z.degree:
        return ChainVector.zero(z.degree - phi.degree, z.p)
    return cap_product(c, z, phi)


def _leibniz(c: CellComplex, z: ChainVector, phi: ChainVector) -> bool:
    l = phi.degree
    lhs = c.boundary_chain(_cap(c, z, phi))
    rhs = _cap(c, c.boundary_chain(z), phi) - _cap(c, z, c.coboundary_cochain(phi))
    return lhs == rhs.scale((-1) ** l)


@pytest.mark.parametrize("p", [2, 3])
def test_cap_leibniz(p):
    rng = random.Random(p)
    cases = 0
    for _ in range(25):
        c = random_complex(rng, 6, 6, p)
        if c.dimension < 1:
            continue
        for _ in range(25):
            m = rng.randint(1, c.dimension)
            l = rng.randint(0, m)
            z = ChainVector(m, {x: rng.randrange(p) for x in c.cells_of_dim(m)}, p)
            phi = ChainVector(l, {x: rng.randrange(p) for x in c.cells_of_dim(l)}, p)
            assert _leibniz(c, z, phi)
            cases += 1
    assert cases >= 500
