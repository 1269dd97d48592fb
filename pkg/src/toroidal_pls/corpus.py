"""Small periodic complexes used as worked examples and test inputs."""

from __future__ import annotations

import random
from fractions import Fraction

from .complex import ChainVector
from .periodic import PeriodicComplex, periodic_cubical, periodic_simplicial


def _strip_graph(n: int, heights: list[int], unit_edges: list[tuple[tuple[int, int], tuple[int, int]]],
                 p: int) -> PeriodicComplex:
    """Graph on heights x Z/n with the given edges repeated in every unit.

    An edge ((di, y), (dj, y')) joins (i + di, y) to (i + dj, y')."""
    idx = {}
    coords = []
    for i in range(n):
        for y in heights:
            idx[(i, y)] = len(coords)
            coords.append((Fraction(i, n), Fraction(y)))
    sims = []
    for i in range(n):
        for (di, y0), (dj, y1) in unit_edges:
            a, sa = (i + di) % n, (i + di) // n
            b, sb = (i + dj) % n, (i + dj) // n
            sims.append([(idx[(a, y0)], (sa,)), (idx[(b, y1)], (sb,))])
    return periodic_simplicial(coords, sims, 1, p)


RUNNING_UNIT = [((0, 1), (1, 1)), ((0, 1), (1, 0)), ((0, 0), (1, -1)), ((0, -1), (1, 1))]


def running_example(n: int = 4, p: int = 2) -> PeriodicComplex:
    """Zig-zag strip: per unit the edges (i,1)-(i+1,1), (i,1)-(i+1,0),
    (i,0)-(i+1,-1), (i,-1)-(i+1,1), quotiented by translation by n."""
    return _strip_graph(n, [-1, 0, 1], RUNNING_UNIT, p)


def twisted_strands(n: int = 3, p: int = 2) -> PeriodicComplex:
    """Two strands that trade heights at every step."""
    return _strip_graph(n, [0, 1], [((0, 0), (1, 1)), ((0, 1), (1, 0))], p)


def parallel_lines(n: int = 3, lines: int = 2, p: int = 2) -> PeriodicComplex:
    return _strip_graph(n, list(range(lines)), [((0, y), (1, y)) for y in range(lines)], p)


def vertex_id(g: PeriodicComplex, point: tuple[Fraction, ...]) -> int:
    for v, c in g.coords.items():
        if c == point:
            return v
    raise KeyError(point)


def edge_chain(g: PeriodicComplex, path: list[tuple[int, int]], n: int) -> ChainVector:
    """Signed sum of the quotient edges along a lattice path of (i, y) points."""
    p = g.p
    acc: dict[int, int] = {}
    for (i0, y0), (i1, y1) in zip(path, path[1:]):
        a = vertex_id(g, (Fraction(i0 % n, n), Fraction(y0)))
        b = vertex_id(g, (Fraction(i1 % n, n), Fraction(y1)))
        rel = (i1 // n) - (i0 // n)
        found = None
        for e in g.complex.cells_of_dim(1):
            fr = g.frame(e)
            if set(fr) != {a, b}:
                continue
            if fr[b][0] - fr[a][0] == rel:
                found = e
                break
        if found is None:
            raise KeyError(((i0, y0), (i1, y1)))
        sign = 1 if g.cell_vertices[found][0] == a else -1
        acc[found] = (acc.get(found, 0) + sign) % p
    return ChainVector(1, acc, p)


def running_line_cycle(g: PeriodicComplex, n: int) -> ChainVector:
    """The horizontal line at height 1."""
    return edge_chain(g, [(i, 1) for i in range(n + 1)], n)


def running_triangle_cycle(g: PeriodicComplex, n: int, start: int = 0) -> ChainVector:
    """Boundary of one bounded region: up the zig-zag and back along the top line."""
    i = start
    path = [(i, 1), (i + 1, 0), (i + 2, -1), (i + 3, 1), (i + 2, 1), (i + 1, 1), (i, 1)]
    return edge_chain(g, path, n)


def cubical_torus(extent: int = 2, p: int = 2) -> PeriodicComplex:
    """Full 2-torus grid: every unit square."""
    cubes = [((i, j), (0, 1)) for i in range(extent) for j in range(extent)]
    return periodic_cubical((extent, extent), (True, True), cubes, p)


def cubical_ring(extent: int = 3, height: int = 1, p: int = 2) -> PeriodicComplex:
    """Periodic annulus strip: d=1, one non-periodic axis."""
    cubes = [((i, j), (0, 1)) for i in range(extent) for j in range(height)]
    return periodic_cubical((extent, height), (True, False), cubes, p)


def random_periodic_graph(rng: random.Random, n: int = 3, heights: int = 3, edges: int = 4,
                          p: int = 2) -> PeriodicComplex:
    """Random unit pattern of edges between consecutive columns (or within one column).

    Half the time the pattern starts from a random permutation of the heights,
    which makes the strands trade places and the monodromy nontrivial."""
    unit = set()
    if rng.random() < 0.5:
        perm = list(range(heights))
        rng.shuffle(perm)
        unit.update(((0, y), (1, perm[y])) for y in range(heights))
    while len(unit) < edges:
        y0 = rng.randrange(heights)
        y1 = rng.randrange(heights)
        step = rng.choice([1, 1, 1, 0])
        if step == 0 and y0 == y1:
            continue
        unit.add(((0, y0), (step, y1)))
    return _strip_graph(n, list(range(heights)), sorted(unit), p)


def random_cubical(rng: random.Random, p: int = 2) -> PeriodicComplex:
    """Random squares and edges on a periodic ring strip or on the 2-torus."""
    if rng.random() < 0.6:
        extent, periodic = (rng.choice([2, 3]), rng.choice([1, 2])), (True, False)
    else:
        extent, periodic = (2, rng.choice([2, 3])), (True, True)
    spots = [(i, j) for i in range(extent[0]) for j in range(extent[1])]
    cubes = [(c, (0, 1)) for c in spots if rng.random() < 0.5]
    rows = extent[1] + (0 if periodic[1] else 1)
    for i in range(extent[0]):
        for j in range(rows):
            for ax in (0, 1):
                if rng.random() < 0.3 and (ax == 0 or periodic[1] or j < extent[1]):
                    cubes.append(((i, j), (ax,)))
    return periodic_cubical(extent, periodic, cubes, p)
