"""Monodromy of persistent local systems and toroidal cycles of periodic complexes.

Degrees here are cycle degrees: a degree-q cycle of G is read through the
bisheaf whose sheaf side is q-dimensional relative homology and whose
cosheaf side is (q-1)-dimensional homology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bisheafbuild import BisheafRequest, BuiltBisheaf, build_bisheaf, cycle_to_sheaf_classes
from .complex import ChainVector, homology
from .exactla import FieldMatrix, Subspace, eigenspace_one, invert, solve
from .isofy import Isobisheaf, PersistentLocalSystem, PLSInconsistency, extract_pls, isobisheafify
from .periodic import BaseCellulation, PeriodicComplex, UnsupportedGeometry, prepare_fibers
from .sheafcore import Bisheaf, circle_walk


@dataclass
class MonodromyReport:
    direction: int
    base_vertex: int
    matrix: FieldMatrix
    one_eigenspace: Subspace
    powers: dict[int, int] = field(default_factory=dict)

    @property
    def toroidal_rank(self) -> int:
        return self.one_eigenspace.dim


def _transports(pls: PersistentLocalSystem, base_vertex: int) -> list[tuple[int, int, int, FieldMatrix]]:
    """(vertex, edge, head, transport) around the circle, transport P(vertex) -> P(head)."""
    base = pls.base
    out = []
    for v, e in circle_walk(base, base_vertex):
        h = base.boundary[e][0][0]
        t = pls.maps[(e, h)] @ invert(pls.maps[(e, v)])
        out.append((v, e, h, t))
    return out


def monodromy(pls: PersistentLocalSystem, base_vertex: int = 0, direction: int = 1,
              powers: Sequence[int] = (1,)) -> MonodromyReport:
    """Go once around the base circle, crossing each edge by map-then-inverse."""
    n = pls.dims[base_vertex]
    m = FieldMatrix.identity(n, pls.p)
    for _, _, _, t in _transports(pls, base_vertex):
        m = t @ m
    pw = {k: eigenspace_one(m.power(k)).dim for k in sorted(set(powers))}
    return MonodromyReport(direction, base_vertex, m, eigenspace_one(m), pw)


@dataclass
class OrderDiagnostic:
    order: int | None
    max_k: int

    def __str__(self) -> str:
        return str(self.order) if self.order is not None else f"none<={self.max_k}"


def eigenvalue_diagnostic(m: FieldMatrix, max_k: int = 64) -> OrderDiagnostic:
    """Smallest k <= max_k with m^k = 1.  Informational only."""
    ident = FieldMatrix.identity(m.rows, m.p)
    cur = m
    for k in range(1, max_k + 1):
        if cur == ident:
            return OrderDiagnostic(k, max_k)
        cur = cur @ m
    return OrderDiagnostic(None, max_k)


# ---------------------------------------------------------------- per-direction pipeline

@dataclass
class DirectionAnalysis:
    """Bisheaf, isobisheaf, PLS and monodromy for one projection."""

    direction: int
    degree: int
    bisheaf: Bisheaf
    iso: Isobisheaf
    pls: PersistentLocalSystem
    report: MonodromyReport | None
    built: BuiltBisheaf | None = None

    def pls_image(self, z: ChainVector, on_subdivision: bool = False) -> dict[int, tuple[int, ...]]:
        """Coordinates of a cycle's image in every PLS stalk."""
        if self.built is None:
            raise ValueError("no geometry attached to this analysis")
        classes = cycle_to_sheaf_classes(self.built, z, on_subdivision)
        out = {}
        for s, x in classes.items():
            q = (self.iso.mono.proj[s] @ self.bisheaf.vertical[s]).apply(x)
            c = self.pls.stalks[s].coords(q)
            if c is None:
                raise PLSInconsistency(f"cycle image at base cell {s} lies outside the persistent stalk")
            out[s] = c
        return out


def analyze_bisheaf(b: Bisheaf, direction: int = 1, degree: int = 1, base_vertex: int = 0,
                    powers: Sequence[int] = (1,), built: BuiltBisheaf | None = None) -> DirectionAnalysis:
    """Isofy, extract the PLS and, over a circle base, its monodromy."""
    iso = isobisheafify(b)
    pls = extract_pls(iso)
    report = None
    if b.base.dimension == 1 and len(b.base):
        report = monodromy(pls, base_vertex, direction, powers)
    return DirectionAnalysis(direction, degree, b, iso, pls, report, built)


def analyze_direction(g: PeriodicComplex, direction: int, degree: int, p: int | None = None,
                      base: BaseCellulation | None = None, base_vertex: int = 0,
                      powers: Sequence[int] = (1,)) -> DirectionAnalysis:
    if degree < 1:
        raise ValueError("toroidal cycles have degree at least 1")
    p = g.p if p is None else p
    model = prepare_fibers(g, direction, base) if base is not None else None
    bb = build_bisheaf(BisheafRequest(g, direction, degree - 1, p), model)
    return analyze_bisheaf(bb.bisheaf, direction, degree, base_vertex, powers, bb)


@dataclass
class DirectionResult:
    direction: int
    analysis: DirectionAnalysis | None = None
    error: str | None = None

    @property
    def report(self) -> MonodromyReport | None:
        return self.analysis.report if self.analysis else None


def toroidal_profile(g: PeriodicComplex, degree: int, p: int | None = None,
                     directions: Sequence[int] | None = None, powers: Sequence[int] = (1,)) -> list[DirectionResult]:
    """Analyze every requested direction; a failing direction does not stop the others."""
    out = []
    for i in directions or range(1, g.d + 1):
        try:
            out.append(DirectionResult(i, analyze_direction(g, i, degree, p, powers=powers)))
        except UnsupportedGeometry as e:
            out.append(DirectionResult(i, error=f"unsupported geometry: {e}"))
    return out


# ---------------------------------------------------------------- classification

@dataclass
class CycleVerdict:
    cycle: ChainVector
    images: dict[int, tuple[int, ...]]
    verdict: str

    @property
    def toroidal(self) -> bool:
        return self.verdict == "toroidal"


def classify_cycle(g: PeriodicComplex, z: ChainVector, degree: int | None = None, p: int | None = None,
                   analyses: Sequence[DirectionAnalysis] | None = None) -> CycleVerdict:
    """Toroidal iff the cycle has a nonzero PLS image in some direction.

    ``images`` maps direction to the coordinates at base vertex 0."""
    degree = z.degree if degree is None else degree
    if z.degree != degree:
        raise ValueError("cycle degree differs from the requested degree")
    if not g.complex.boundary_chain(z).is_zero():
        raise ValueError("chain is not a cycle")
    if analyses is None:
        analyses = [r.analysis for r in toroidal_profile(g, degree, p) if r.analysis is not None]
    images = {}
    for a in analyses:
        images[a.direction] = a.pls_image(z)[0]
    tor = any(any(x % g.p for x in v) for v in images.values())
    return CycleVerdict(z, images, "toroidal" if tor else "non-toroidal")


# ---------------------------------------------------------------- lifting

@dataclass
class ToroidalCycleBasis:
    degree: int
    direction: int
    cycles: list[ChainVector]
    pls_coords: list[tuple[int, ...]]
    eigenbasis: list[tuple[int, ...]]
    homology_image: Subspace | None = None


def _local_sections(a: DirectionAnalysis, walk, bs: list[tuple[int, ...]]) -> dict[int, tuple[int, ...]]:
    """Sheaf-stalk vectors x_v (one per base vertex) agreeing on every edge and
    mapping to the prescribed PLS vectors b_v under the isobisheaf verticals."""
    iso, pls = a.iso, a.pls
    sh = a.bisheaf.sheaf
    p = pls.p
    base = pls.base
    verts = [v for v, _ in walk]
    incl = {v: iso.epi.inclusion(v) for v in verts}
    off, n = {}, 0
    for v in verts:
        off[v] = n
        n += incl[v].cols
    rows: list[list[int]] = []
    rhs: list[int] = []

    def put(block: FieldMatrix, col0: int, row_list: list[list[int]]) -> None:
        for i, r in enumerate(block.entries):
            row_list[i][col0:col0 + block.cols] = [(x + y) % p for x, y in zip(row_list[i][col0:col0 + block.cols], r)]

    for v, b in zip(verts, bs):
        vert = iso.vertical[v]
        block = [[0] * n for _ in range(vert.rows)]
        put(vert, off[v], block)
        target = pls.stalks[v].inclusion().apply(b) if pls.stalks[v].dim else (0,) * vert.rows
        rows += block
        rhs += list(target)
    for v, e in walk:
        h = base.boundary[e][0][0]
        lt = sh.maps[(e, v)] @ incl[v]
        lh = (sh.maps[(e, h)] @ incl[h]).scale(-1)
        block = [[0] * n for _ in range(lt.rows)]
        put(lt, off[v], block)
        put(lh, off[h], block)
        rows += block
        rhs += [0] * lt.rows
    y = solve(FieldMatrix(rows, p, len(rows), n), rhs) if rows else (0,) * n
    if y is None:
        raise PLSInconsistency("no compatible family of local lifts exists")
    return {v: incl[v].apply(y[off[v]:off[v] + incl[v].cols]) for v in verts}


def _glue(a: DirectionAnalysis, walk, xs: dict[int, tuple[int, ...]]) -> ChainVector:
    """Expand local classes into chains, correct them to agree over each edge, and sum."""
    bb = a.built
    sa = bb.model.stars
    c = bb.model.complex.complex
    p = c.p
    q = a.degree
    base = a.pls.base
    z = {v: bb.sheaf_homology[v].chain_of(x).restrict(sa.X[v]) for v, x in xs.items()}
    for v, e in walk:
        h = base.boundary[e][0][0]
        Xe = sa.X[e]
        diff = (z[v] - z[h]).restrict(Xe)
        if diff.is_zero():
            continue
        row_cells = sorted(x for x in Xe if c.dims[x] == q)
        col_cells = sorted(x for x in sa.closure[e] if c.dims[x] == q + 1)
        ridx = {x: i for i, x in enumerate(row_cells)}
        mat = [[0] * len(col_cells) for _ in row_cells]
        for j, y in enumerate(col_cells):
            for f, inc in c.boundary[y]:
                if f in ridx:
                    mat[ridx[f]][j] = (mat[ridx[f]][j] + inc) % p
        w = solve(FieldMatrix(mat, p, len(row_cells), len(col_cells)), [diff.coeffs.get(x, 0) for x in row_cells]) \
            if col_cells else None
        if w is None:
            raise PLSInconsistency(f"local lifts disagree in homology over base edge {e}")
        wc = ChainVector(q + 1, {y: a_ for y, a_ in zip(col_cells, w) if a_}, p)
        z[h] = z[h] + c.boundary_chain(wc).restrict(sa.X[h])
    glued: dict[int, int] = {}
    for v, e in walk:
        for x, val in z[v].items():
            if sa.region[x][0] == "v" or x in sa.X[e]:
                glued[x] = val
    out = ChainVector(q, glued, p)
    if not c.boundary_chain(out).is_zero():
        raise PLSInconsistency("glued chain is not a cycle")
    return out


def _to_original(a: DirectionAnalysis, zs: list[ChainVector]) -> tuple[list[ChainVector], list]:
    """Cycles of G homologous (through the subdivision) to the given subdivided cycles."""
    bb = a.built
    g0 = bb.model.original.complex
    sub = bb.model.complex.complex
    q = a.degree
    h0 = homology(g0, q)
    hs = homology(sub, q)
    pushed = [hs.coords_of(bb.model.push(r)) for r in h0.representatives]
    p = g0.p
    mat = FieldMatrix.from_columns(pushed, hs.rank, p) if pushed else FieldMatrix.zeros(hs.rank, 0, p)
    out = []
    for z in zs:
        coef = solve(mat, hs.coords_of(z))
        if coef is None:
            raise PLSInconsistency("subdivided cycle has no preimage in the input complex")
        out.append(h0.chain_of(coef))
    return out, h0


def lift_toroidal_basis(g: PeriodicComplex, direction: int = 1, degree: int = 1, p: int | None = None,
                        analysis: DirectionAnalysis | None = None) -> ToroidalCycleBasis:
    """Cycles of G whose PLS images at base vertex 0 form a basis of the fixed vectors of the monodromy."""
    a = analysis or analyze_direction(g, direction, degree, p)
    walk = circle_walk(a.pls.base, 0)
    eig = a.report.one_eigenspace
    bases = eig.vectors()
    sub_cycles = []
    for b0 in bases:
        bs = [b0]
        for _, _, _, t in _transports(a.pls, 0)[:-1]:
            bs.append(t.apply(bs[-1]))
        xs = _local_sections(a, walk, bs)
        sub_cycles.append(_glue(a, walk, xs))
    cycles, h0 = _to_original(a, sub_cycles)
    coords = [a.pls_image(z)[0] for z in cycles]
    image = Subspace.span([a.pls_image(r)[0] for r in h0.representatives], a.pls.dims[0], a.pls.p)
    return ToroidalCycleBasis(degree, a.direction, cycles, coords, [tuple(b) for b in bases], image)
