"""Periodic quotient complexes, projections to circles, and fiber preparation.

A quotient cell records, for every vertex of its closure, an integer shift
per periodic direction.  Adding the shifts to the stored vertex coordinates
gives a lift of the cell to the universal cover; shifts are normalised so the
lowest-id vertex of each cell has shift zero.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .complex import CellComplex, ChainVector, UnsupportedComplex, maximal_subcomplex, order_complex, validate

Shift = tuple[int, ...]
Key = tuple[tuple[int, Shift], ...]


class UnsupportedGeometry(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _normalize(verts: Iterable[tuple[int, Shift]]) -> Key:
    vs = sorted(verts)
    base = vs[0][1]
    return tuple((v, tuple(a - b for a, b in zip(s, base))) for v, s in vs)


def _parity(seq: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


class PeriodicComplex:
    """Finite quotient G of a d-periodic complex, with vertex coordinates in
    [0,1)^d x R^(n-d) and per-cell lifts."""

    def __init__(self, complex: CellComplex, d: int, n: int, coords: dict[int, tuple[Fraction, ...]],
                 cell_vertices: Sequence[tuple[int, ...]], cell_shifts: Sequence[tuple[Shift, ...]],
                 kind: str = "simplicial"):
        self.complex = complex
        self.d = d
        self.n = n
        self.coords = {v: tuple(_as_fraction(x) for x in c) for v, c in coords.items()}
        self.cell_vertices = tuple(tuple(v) for v in cell_vertices)
        self.cell_shifts = tuple(tuple(tuple(s) for s in sh) for sh in cell_shifts)
        self.kind = kind

    @property
    def p(self) -> int:
        return self.complex.p

    def __len__(self) -> int:
        return len(self.complex)

    @property
    def wrap_data(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(tuple(any(s[i] for s in sh) for i in range(self.d)) for sh in self.cell_shifts)

    def key(self, c: int) -> Key:
        return tuple(zip(self.cell_vertices[c], self.cell_shifts[c]))

    def frame(self, c: int) -> dict[int, Shift]:
        return dict(zip(self.cell_vertices[c], self.cell_shifts[c]))

    def lift_point(self, v: int, shift: Shift) -> tuple[Fraction, ...]:
        c = self.coords[v]
        return tuple(c[j] + shift[j] if j < self.d else c[j] for j in range(self.n))

    def unwrapped(self, c: int) -> list[tuple[Fraction, ...]]:
        return [self.lift_point(v, s) for v, s in zip(self.cell_vertices[c], self.cell_shifts[c])]

    def vertex_ids(self) -> list[int]:
        return self.complex.cells_of_dim(0)

    def check(self) -> bool:
        """Validate the complex and the coordinate/lift data."""
        validate(self.complex)
        for v in self.vertex_ids():
            c = self.coords.get(v)
            if c is None or len(c) != self.n:
                raise ValueError(f"vertex {v} lacks an {self.n}-dimensional coordinate")
            if any(not 0 <= c[j] < 1 for j in range(self.d)):
                raise ValueError(f"vertex {v} has a periodic coordinate outside [0,1)")
        for x in range(len(self.complex)):
            pts = self.unwrapped(x)
            for j in range(self.d):
                xs = [q[j] for q in pts]
                if max(xs) - min(xs) >= 1:
                    raise UnsupportedGeometry(f"cell {x} spans a full period in direction {j + 1}")
            fr = self.frame(x)
            for f in self.complex.faces(x):
                o = fr[self.cell_vertices[f][0]]
                for v, s in zip(self.cell_vertices[f], self.cell_shifts[f]):
                    if fr.get(v) != tuple(a + b for a, b in zip(s, o)):
                        raise ValueError(f"lift of face {f} is incoherent with cell {x}")
        return True


def periodic_simplicial(coords: Sequence[Sequence], simplices: Iterable[Sequence], d: int, p: int = 2) -> PeriodicComplex:
    """Build an ordered quotient Delta-complex.

    ``simplices`` entries are sequences of vertex indices or ``(vertex, shift)``
    pairs; all faces are generated.  Vertex cell ids equal vertex indices.
    """
    coords = [tuple(_as_fraction(x) for x in c) for c in coords]
    n = len(coords[0]) if coords else d
    zero = tuple(0 for _ in range(d))
    keys: set[Key] = {((v, zero),) for v in range(len(coords))}
    stack = []
    for s in simplices:
        items = []
        for it in s:
            if isinstance(it, int):
                items.append((it, zero))
            else:
                v, sh = it
                sh = (sh,) if isinstance(sh, int) else tuple(sh)
                if len(sh) != d:
                    raise ValueError(f"shift {sh} does not have {d} components")
                items.append((int(v), sh))
        if len({v for v, _ in items}) != len(items):
            raise UnsupportedGeometry(f"simplex {s} repeats a vertex; use a finer quotient (k-fold cover)")
        for v, _ in items:
            if not 0 <= v < len(coords):
                raise ValueError(f"simplex {s} names unknown vertex {v}")
        stack.append(_normalize(items))
    while stack:
        k = stack.pop()
        if k in keys:
            continue
        keys.add(k)
        if len(k) > 1:
            stack.extend(_normalize(k[:i] + k[i + 1:]) for i in range(len(k)))
    return _from_keys(coords, keys, d, n, p)


def _from_keys(coords: Sequence[tuple[Fraction, ...]], keys: Iterable[Key], d: int, n: int, p: int,
               kind: str = "simplicial") -> PeriodicComplex:
    ordered = sorted(keys, key=lambda k: (len(k), k))
    idx = {k: i for i, k in enumerate(ordered)}
    bnd = []
    for k in ordered:
        if len(k) == 1:
            bnd.append([])
        else:
            bnd.append([(idx[_normalize(k[:i] + k[i + 1:])], (-1) ** i) for i in range(len(k))])
    verts = [tuple(v for v, _ in k) for k in ordered]
    shifts = [tuple(s for _, s in k) for k in ordered]
    cx = CellComplex([len(k) - 1 for k in ordered], bnd, p, None, verts)
    cd = {v: tuple(coords[v]) for v in range(len(coords))}
    return PeriodicComplex(cx, d, n, cd, verts, shifts, kind)


def periodic_cubical(extent: Sequence[int], periodic: Sequence[bool],
                     cubes: Iterable[tuple[Sequence[int], Sequence[int]]], p: int = 2) -> PeriodicComplex:
    """Quotient cubical complex on an integer grid.

    Periodic axes must come first.  A cube is ``(corner, axes)`` where ``axes``
    lists the directions in which it extends by one unit.  Periodic extents
    must be at least 2 so every closed cell is embedded.
    """
    extent = tuple(int(e) for e in extent)
    periodic = tuple(bool(x) for x in periodic)
    n = len(extent)
    d = sum(periodic)
    if len(periodic) != n or any(periodic[i] < periodic[i + 1] for i in range(n - 1)):
        raise ValueError("periodic axes must form a prefix of the axis list")
    for i in range(d):
        if extent[i] < 2:
            raise UnsupportedGeometry(f"periodic extent {extent[i]} along axis {i + 1} is below 2; take a cover")

    def canon(pt: Sequence[int]) -> tuple[tuple[int, ...], Shift]:
        base = []
        sh = []
        for i, x in enumerate(pt):
            if i < d:
                base.append(x % extent[i])
                sh.append(x // extent[i])
            else:
                if not 0 <= x <= extent[i]:
                    raise ValueError(f"grid point {tuple(pt)} outside the non-periodic extent")
                base.append(x)
        return tuple(base), tuple(sh)

    cells: dict[tuple[tuple[int, ...], tuple[int, ...]], None] = {}
    stack = []
    for corner, axes in cubes:
        corner = tuple(int(x) for x in corner)
        axes = tuple(sorted(set(int(a) for a in axes)))
        if len(corner) != n or any(not 0 <= a < n for a in axes):
            raise ValueError(f"cube {corner} {axes} does not fit an {n}-dimensional grid")
        stack.append((canon(corner)[0], axes))
    while stack:
        cell = stack.pop()
        if cell in cells:
            continue
        cells[cell] = None
        corner, axes = cell
        for j, a in enumerate(axes):
            rest = axes[:j] + axes[j + 1:]
            for side in (0, 1):
                pt = list(corner)
                pt[a] += side
                stack.append((canon(pt)[0], rest))
    ordered = sorted(cells, key=lambda c: (len(c[1]), c[0], c[1]))
    idx = {c: i for i, c in enumerate(ordered)}
    dims, bnd, labels, cverts, cshifts = [], [], [], [], []
    for corner, axes in ordered:
        dims.append(len(axes))
        b = []
        for j, a in enumerate(axes):
            rest = axes[:j] + axes[j + 1:]
            for side, sgn in ((1, 1), (0, -1)):
                pt = list(corner)
                pt[a] += side
                b.append((idx[(canon(pt)[0], rest)], sgn * (-1) ** j))
        bnd.append(b)
        labels.append(f"{corner}:{''.join(str(a) for a in axes)}")
        pts = []
        for bits in itertools.product((0, 1), repeat=len(axes)):
            pt = list(corner)
            for a, bit in zip(axes, bits):
                pt[a] += bit
            base, sh = canon(pt)
            pts.append((idx[(base, ())], sh))
        key = _normalize(pts)
        cverts.append(tuple(v for v, _ in key))
        cshifts.append(tuple(s for _, s in key))
    coords = {}
    for (corner, axes), i in idx.items():
        if not axes:
            coords[i] = tuple(Fraction(corner[j], extent[j]) if j < d else Fraction(corner[j]) for j in range(n))
    cx = CellComplex(dims, bnd, p, labels)
    return PeriodicComplex(cx, d, n, coords, cverts, cshifts, "cubical")


# ---------------------------------------------------------------- base circle

@dataclass(frozen=True)
class BaseCellulation:
    """Cellulation of the circle R/Z: vertex j at ``vertex_angles[j]``, edge j
    from vertex j to vertex j+1 (cyclically)."""

    direction: int
    vertex_angles: tuple[Fraction, ...]
    artificial: tuple[Fraction, ...] = ()

    def __post_init__(self):
        a = self.vertex_angles
        if len(a) < 2:
            raise ValueError("a circle cellulation needs at least two vertices")
        if any(not 0 <= x < 1 for x in a) or list(a) != sorted(set(a)):
            raise ValueError("vertex angles must be distinct, sorted and in [0,1)")

    @property
    def m(self) -> int:
        return len(self.vertex_angles)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(j, (j + 1) % self.m) for j in range(self.m)]

    def vertex_cell(self, j: int) -> int:
        return j

    def edge_cell(self, j: int) -> int:
        return self.m + j

    def edge_span(self, j: int) -> tuple[Fraction, Fraction]:
        a = self.vertex_angles[j]
        b = self.vertex_angles[(j + 1) % self.m]
        return a, (b if b > a else b + 1)

    def complex(self, p: int = 2) -> CellComplex:
        m = self.m
        bnd: list[list[tuple[int, int]]] = [[] for _ in range(m)]
        for j in range(m):
            bnd.append([((j + 1) % m, 1), (j, -1)])
        labels = [f"v{j}" for j in range(m)] + [f"e{j}" for j in range(m)]
        return CellComplex([0] * m + [1] * m, bnd, p, labels)

    def cover(self, k: int) -> BaseCellulation:
        angles = tuple(sorted((t + j) / k for j in range(k) for t in self.vertex_angles))
        return BaseCellulation(self.direction, angles, tuple((t + j) / k for j in range(k) for t in self.artificial))

    def refine(self, extra: Iterable[Fraction]) -> BaseCellulation:
        angles = tuple(sorted(set(self.vertex_angles) | {Fraction(x) % 1 for x in extra}))
        return BaseCellulation(self.direction, angles, self.artificial)


def base_cellulation(g: PeriodicComplex, i: int, insert_midpoint: bool = True) -> BaseCellulation:
    """Circle cellulation whose vertices are the distinct direction-i coordinates of g."""
    if not 1 <= i <= g.d:
        raise ValueError(f"direction {i} outside 1..{g.d}")
    angles = sorted({g.coords[v][i - 1] for v in g.vertex_ids()})
    extra: tuple[Fraction, ...] = ()
    if len(angles) < 2:
        if not insert_midpoint:
            raise ValueError("fewer than two distinct angles and midpoint insertion disabled")
        if angles:
            extra = ((angles[0] + Fraction(1, 2)) % 1,)
        else:
            extra = (Fraction(0), Fraction(1, 2))
        angles = sorted(set(angles) | set(extra))
    return BaseCellulation(i, tuple(angles), extra)


# ---------------------------------------------------------------- chain maps

class ChainMap:
    """Cellular chain map recorded cell by cell."""

    def __init__(self, images: dict[int, ChainVector], p: int):
        self.images = images
        self.p = p

    @classmethod
    def identity(cls, c: CellComplex) -> ChainMap:
        return cls({x: ChainVector(c.dims[x], {x: 1}, c.p) for x in range(len(c))}, c.p)

    def push(self, z: ChainVector) -> ChainVector:
        acc: dict[int, int] = {}
        for x, v in z.coeffs.items():
            for y, w in self.images[x].coeffs.items():
                acc[y] = (acc.get(y, 0) + v * w) % self.p
        return ChainVector(z.degree, acc, self.p)

    def then(self, other: ChainMap) -> ChainMap:
        return ChainMap({x: other.push(z) for x, z in self.images.items()}, self.p)

    def __getitem__(self, x: int) -> ChainVector:
        return self.images[x]


def _first_angle_inside(angles: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction | None:
    m0 = math.floor(lo)
    for m in range(m0, math.floor(hi) + 1):
        for t in angles:
            if lo < t + m < hi:
                return t + m
    return None


def subdivide_for_fibers(g: PeriodicComplex, b: BaseCellulation) -> tuple[PeriodicComplex, ChainMap]:
    """Split edges at base angles until every simplex projects into one closed base edge."""
    if g.kind != "simplicial":
        raise UnsupportedComplex("edge splitting needs a simplicial quotient complex")
    ax = b.direction - 1
    d = g.d
    coords = [g.coords[v] for v in sorted(g.vertex_ids())]
    prov: dict[Key, tuple[int | None, int]] = {g.key(c): (c, 1) for c in range(len(g))}
    changed = False
    while True:
        hit = None
        for k in sorted(x for x in prov if len(x) == 2):
            (a, sa), (bv, sb) = k
            xa = coords[a][ax] + sa[ax]
            xb = coords[bv][ax] + sb[ax]
            t = _first_angle_inside(b.vertex_angles, min(xa, xb), max(xa, xb))
            if t is not None:
                hit = (k, t, xa, xb)
                break
        if hit is None:
            break
        changed = True
        (a, sa), (bv, sb) = hit[0]
        t, xa, xb = hit[1], hit[2], hit[3]
        lam = (t - xa) / (xb - xa)
        pa = [coords[a][j] + (sa[j] if j < d else 0) for j in range(g.n)]
        pb = [coords[bv][j] + (sb[j] if j < d else 0) for j in range(g.n)]
        pos = [pa[j] + lam * (pb[j] - pa[j]) for j in range(g.n)]
        sw = tuple(math.floor(pos[j]) for j in range(d))
        coords.append(tuple(pos[j] - sw[j] if j < d else pos[j] for j in range(g.n)))
        w = len(coords) - 1
        new: dict[Key, tuple[int | None, int]] = {}
        for k, (anc, sign) in prov.items():
            fr = dict(k)
            if a in fr and bv in fr and tuple(x - y for x, y in zip(fr[bv], fr[a])) == sb:
                wsh = tuple(x + y for x, y in zip(fr[a], sw))
                ia = [v for v, _ in k].index(a)
                ib = [v for v, _ in k].index(bv)
                for pos_i in (ia, ib):
                    child = list(k)
                    child[pos_i] = (w, wsh)
                    par = _parity([v for v, _ in child])
                    new[_normalize(child)] = (anc, sign * par)
                inner = [x for x in k if x[0] not in (a, bv)] + [(w, wsh)]
                new.setdefault(_normalize(inner), (None, 0))
            else:
                new[k] = (anc, sign)
        prov = new
    if not changed:
        return g, ChainMap.identity(g.complex)
    out = _from_keys(coords, prov.keys(), d, g.n, g.p)
    images: dict[int, dict[int, int]] = {x: {} for x in range(len(g))}
    for nid in range(len(out)):
        anc, sign = prov[out.key(nid)]
        if anc is not None:
            images[anc][nid] = sign % g.p
    return out, ChainMap({x: ChainVector(g.complex.dims[x], images[x], g.p) for x in images}, g.p)


def periodic_barycentric(g: PeriodicComplex) -> tuple[PeriodicComplex, ChainMap]:
    """Barycentric subdivision (order complex) with barycentre coordinates and lifts."""
    sd = order_complex(g.complex)
    d, n = g.d, g.n
    bary: dict[int, tuple[tuple[Fraction, ...], Shift]] = {}
    for x in range(len(g)):
        pts = g.unwrapped(x)
        mean = [sum(q[j] for q in pts) / len(pts) for j in range(n)]
        sh = tuple(math.floor(mean[j]) for j in range(d))
        bary[x] = (tuple(mean[j] - sh[j] if j < d else mean[j] for j in range(n)), sh)
    coords = {vid: bary[x][0] for vid, x in sd.vertex_cell.items()}
    shifts = []
    for flag in sd.cell_flags:
        fr = g.frame(flag[-1])
        raw = []
        for x in flag:
            o = fr[g.cell_vertices[x][0]]
            raw.append(tuple(a + b for a, b in zip(bary[x][1], o)))
        shifts.append(tuple(tuple(a - b for a, b in zip(s, raw[0])) for s in raw))
    out = PeriodicComplex(sd.complex, d, n, coords, sd.complex.vertices, shifts, "simplicial")
    return out, ChainMap(sd.carrier, g.p)


def k_fold_cover(g: PeriodicComplex, i: int, k: int) -> PeriodicComplex:
    """Quotient by the index-k sublattice in direction i.  Cell (c, j) has id c*k + j."""
    if k < 1:
        raise ValueError("cover degree must be at least 1")
    if not 1 <= i <= g.d:
        raise ValueError(f"direction {i} outside 1..{g.d}")
    ax = i - 1
    c = g.complex
    dims, bnd, labels, verts_t, cverts, cshifts = [], [], [], [], [], []
    coords = {}
    for x in range(len(c)):
        fr = g.frame(x)
        for j0 in range(k):
            dims.append(c.dims[x])
            labels.append(f"{c.labels[x]}#{j0}" if c.labels[x] else "")
            b = []
            for f, inc in c.boundary[x]:
                o = fr[g.cell_vertices[f][0]][ax]
                b.append((f * k + (j0 + o) % k, inc))
            bnd.append(b)
            vs, ss = [], []
            for v, s in zip(g.cell_vertices[x], g.cell_shifts[x]):
                jj = j0 + s[ax]
                vs.append(v * k + jj % k)
                ss.append(tuple(jj // k if a == ax else s[a] for a in range(g.d)))
            cverts.append(tuple(vs))
            cshifts.append(tuple(ss))
            if c.vertices is not None:
                verts_t.append(tuple(v * k + (j0 + fr[v][ax]) % k for v in c.vertices[x]))
            if c.dims[x] == 0:
                q = g.coords[x]
                coords[x * k + j0] = tuple((q[a] + j0) / k if a == ax else q[a] for a in range(g.n))
    cx = CellComplex(dims, bnd, c.p, labels, verts_t if c.vertices is not None else None)
    return PeriodicComplex(cx, g.d, g.n, coords, cverts, cshifts, g.kind)


def cover_projection(g: PeriodicComplex, k: int) -> ChainMap:
    """Chain map from k_fold_cover(g, i, k) back down to g."""
    c = g.complex
    images = {}
    for x in range(len(c)):
        for j in range(k):
            images[x * k + j] = ChainVector(c.dims[x], {x: 1}, c.p)
    return ChainMap(images, c.p)


def unroll(g: PeriodicComplex, r: int) -> tuple[CellComplex, ChainMap]:
    """Finite piece of the periodic complex: r translates in every periodic direction.

    Returns the finite complex and the quotient chain map onto g.
    """
    c = g.complex
    d = g.d
    blocks = list(itertools.product(range(r), repeat=d))
    cells: dict[tuple[int, Shift], int] = {}
    order = []
    for x in sorted(range(len(c)), key=lambda x: (c.dims[x], x)):
        for J in blocks:
            shifts = [tuple(a + b for a, b in zip(J, s)) for s in g.cell_shifts[x]]
            if all(0 <= a < r for s in shifts for a in s):
                cells[(x, J)] = len(order)
                order.append((x, J))
    dims, bnd, verts = [], [], []
    for x, J in order:
        dims.append(c.dims[x])
        fr = g.frame(x)
        b = []
        for f, inc in c.boundary[x]:
            o = fr[g.cell_vertices[f][0]]
            b.append((cells[(f, tuple(a + q for a, q in zip(J, o)))], inc))
        bnd.append(b)
        if c.vertices is not None:
            verts.append(tuple(cells[(v, tuple(a + q for a, q in zip(J, fr[v])))] for v in c.vertices[x]))
    fin = CellComplex(dims, bnd, c.p, None, verts if c.vertices is not None else None)
    images = {i: ChainVector(c.dims[x], {x: 1}, c.p) for i, (x, _) in enumerate(order)}
    return fin, ChainMap(images, c.p)


# ---------------------------------------------------------------- star preimages

@dataclass
class StarAssignment:
    """Per base cell: X (cells whose projection meets the open star), its
    closure, and the maximal subcomplex Y of X."""

    base: BaseCellulation
    region: dict[int, tuple[str, int, int]]
    X: dict[int, frozenset[int]]
    closure: dict[int, frozenset[int]]
    Y: dict[int, frozenset[int]]
    fibers: dict[int, frozenset[int]] = field(default_factory=dict)


def _classify_cell(g: PeriodicComplex, b: BaseCellulation, x: int) -> tuple[str, int, int]:
    """('v', j, 0) for a cell inside the fiber over vertex j, else ('e', j, offset):
    the cell lies over edge j translated by the integer ``offset``."""
    ax = b.direction - 1
    xs = [g.coords[v][ax] + s[ax] for v, s in zip(g.cell_vertices[x], g.cell_shifts[x])]
    lo, hi = min(xs), max(xs)
    if hi - lo >= 1:
        raise UnsupportedGeometry(f"cell {x} projects onto the whole circle; refine the cellulation")
    A = b.vertex_angles
    m0 = math.floor(lo)
    r = lo - m0
    j = bisect.bisect_right(A, r) - 1
    if lo == hi and j >= 0 and A[j] == r:
        return ("v", j, 0)
    if j < 0:
        j, m0 = len(A) - 1, m0 - 1
    t1 = A[j + 1] + m0 if j + 1 < len(A) else A[0] + m0 + 1
    if hi <= t1:
        return ("e", j, m0)
    raise UnsupportedGeometry(f"cell {x} crosses a base vertex; subdivide for fibers first")


def star_preimages(g: PeriodicComplex, b: BaseCellulation) -> StarAssignment:
    region = {x: _classify_cell(g, b, x) for x in range(len(g))}
    m = b.m
    by_edge: dict[int, set[int]] = {j: set() for j in range(m)}
    by_vertex: dict[int, set[int]] = {j: set() for j in range(m)}
    for x, r in region.items():
        (by_vertex if r[0] == "v" else by_edge)[r[1]].add(x)
    X: dict[int, frozenset[int]] = {}
    fibers: dict[int, frozenset[int]] = {}
    for j in range(m):
        X[b.edge_cell(j)] = frozenset(by_edge[j])
        X[b.vertex_cell(j)] = frozenset(by_vertex[j] | by_edge[j] | by_edge[(j - 1) % m])
        fibers[b.vertex_cell(j)] = frozenset(by_vertex[j])
    closure = {s: g.complex.closure(xs) for s, xs in X.items()}
    Y = {s: maximal_subcomplex(g.complex, xs) for s, xs in X.items()}
    return StarAssignment(b, region, X, closure, Y, fibers)


# ---------------------------------------------------------------- fiber model

def _edge_cut(g: PeriodicComplex, sa: StarAssignment, j: int) -> Fraction | None:
    """Cut point strictly between the neighbourhoods of the two end fibers of edge j."""
    b = sa.base
    a, bb = b.edge_span(j)
    lo_nb, hi_nb = [a], [bb]
    values = {a, bb}
    for x in sa.X[b.edge_cell(j)]:
        xs = region_coordinate(g, sa, x)
        values.update(xs)
        if g.complex.dims[x] == 1:
            # edge cells here are open over edge j; their closed endpoints may sit on the fibers
            x0, x1 = xs
            if x0 == a:
                lo_nb.append(x1)
            if x1 == a:
                lo_nb.append(x0)
            if x0 == bb:
                hi_nb.append(x1)
            if x1 == bb:
                hi_nb.append(x0)
    L, R = max(lo_nb), min(hi_nb)
    vals = sorted(v for v in values if L <= v <= R)
    mid = (a + bb) / 2
    best = None
    for u, w in zip(vals, vals[1:]):
        c = (u + w) / 2
        if best is None or abs(c - mid) < abs(best - mid):
            best = c
    return best


def region_coordinate(g: PeriodicComplex, sa: StarAssignment, x: int) -> list[Fraction]:
    """Direction coordinates of the vertices of x, in the chart of its base edge."""
    ax = sa.base.direction - 1
    off = sa.region[x][2]
    return [q[ax] - off for q in g.unwrapped(x)]


@dataclass
class FiberModel:
    """Geometric input prepared for one projection: aligned, subdivided, with cuts."""

    original: PeriodicComplex
    base: BaseCellulation
    complex: PeriodicComplex
    carrier: ChainMap
    stars: StarAssignment
    cuts: dict[int, Fraction]
    rounds: int

    def push(self, z: ChainVector) -> ChainVector:
        return self.carrier.push(z)

    def cut_cocycle(self, j: int) -> ChainVector:
        """Indicator-difference cocycle of the cut inside base edge j."""
        g, sa = self.complex, self.stars
        c = self.cuts[j]
        p = g.p
        coeffs = {}
        for x in sa.X[sa.base.edge_cell(j)]:
            if g.complex.dims[x] != 1:
                continue
            x0, x1 = region_coordinate(g, sa, x)
            v = int(x1 >= c) - int(x0 >= c)
            if v:
                coeffs[x] = v % p
        return ChainVector(1, coeffs, p)

    def orientation_cocycle(self, sigma: int) -> ChainVector:
        b = self.base
        j = sigma if sigma < b.m else sigma - b.m
        return self.cut_cocycle(j)


def prepare_fibers(g: PeriodicComplex, direction: int, base: BaseCellulation | None = None,
                   max_rounds: int = 4, min_rounds: int = 1) -> FiberModel:
    """Align g over the base circle and subdivide until every base edge admits a cut."""
    if g.kind == "simplicial" and g.d != 1:
        raise UnsupportedGeometry("simplicial input with more than one periodic direction is not supported "
                                  "(triangulating the torus is an open problem); use cubical input")
    b = base or base_cellulation(g, direction)
    rounds = 0
    cur, carrier = g, ChainMap.identity(g.complex)
    if g.kind != "simplicial":
        cur, carrier = periodic_barycentric(g)
        rounds = 1
    cur, step = subdivide_for_fibers(cur, b)
    carrier = carrier.then(step)
    while True:
        if rounds >= min_rounds and cur.kind == "simplicial":
            sa = star_preimages(cur, b)
            cuts = {j: _edge_cut(cur, sa, j) for j in range(b.m)}
            if all(c is not None for c in cuts.values()):
                return FiberModel(g, b, cur, carrier, sa, cuts, rounds)
        if rounds >= max_rounds:
            raise UnsupportedGeometry(f"no fiber cut found after {rounds} subdivision rounds")
        cur, step = periodic_barycentric(cur)
        carrier = carrier.then(step)
        rounds += 1
