"""Bisheaf of a coordinate projection G -> S^1 built from geometry.

Sheaf stalk at a base cell: relative homology of the preimage of its open
star (chains on X modulo the fibers bounding it), in degree k+1.  Cosheaf
stalk: homology of the largest subcomplex Y inside that preimage, degree k.
Vertical maps cap with the cut cocycle of the relevant base edge.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complex import ChainVector, HomologyBasis, cap_product, homology, relative_homology
from .exactla import FieldMatrix
from .periodic import FiberModel, PeriodicComplex, prepare_fibers
from .sheafcore import Bisheaf, CellCosheaf, CellSheaf, covering_relations, validate_bisheaf


@dataclass(frozen=True)
class BisheafRequest:
    g: PeriodicComplex
    direction: int = 1
    degree: int = 0
    p: int = 2

    def check(self) -> None:
        if not 1 <= self.direction <= self.g.d:
            raise ValueError(f"direction {self.direction} outside 1..{self.g.d}")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if self.g.p != self.p:
            raise ValueError(f"complex is over GF({self.g.p}) but GF({self.p}) was requested")


@dataclass
class BuiltBisheaf:
    bisheaf: Bisheaf
    model: FiberModel
    degree: int
    sheaf_homology: dict[int, HomologyBasis]
    cosheaf_homology: dict[int, HomologyBasis]

    @property
    def chain_dictionaries(self) -> dict[int, dict[str, list[ChainVector]]]:
        return {s: {"sheaf": self.sheaf_homology[s].representatives,
                    "cosheaf": self.cosheaf_homology[s].representatives}
                for s in self.sheaf_homology}

    @property
    def base_cuts(self) -> dict[int, object]:
        return dict(self.model.cuts)


def _from_cols(cols: list[tuple[int, ...]], nrows: int, p: int) -> FieldMatrix:
    if not cols:
        return FieldMatrix.zeros(nrows, 0, p)
    return FieldMatrix.from_columns(cols, nrows, p)


def build_bisheaf(r: BisheafRequest, model: FiberModel | None = None) -> BuiltBisheaf:
    """Sheaf in degree r.degree + 1, cosheaf in degree r.degree, verticals by cap product."""
    r.check()
    fm = model or prepare_fibers(r.g, r.direction)
    c = fm.complex.complex
    sa = fm.stars
    p = r.p
    base = fm.base.complex(p)
    q = r.degree + 1
    sh: dict[int, HomologyBasis] = {}
    co: dict[int, HomologyBasis] = {}
    for s in range(len(base)):
        X, cl = sa.X[s], sa.closure[s]
        sh[s] = relative_homology(c, cl - X, q, ambient=cl)
        co[s] = homology(c, r.degree, cells=sa.Y[s])
    smaps, cmaps = {}, {}
    for s, t in covering_relations(base):
        cols = [sh[s].coords_of(z.restrict(sa.X[s]), restrict=True) for z in sh[t].representatives]
        smaps[(s, t)] = _from_cols(cols, sh[s].rank, p)
        cols = [co[t].coords_of(z) for z in co[s].representatives]
        cmaps[(s, t)] = _from_cols(cols, co[t].rank, p)
    vert = {}
    for s in range(len(base)):
        phi = fm.orientation_cocycle(s)
        cols = [co[s].coords_of(cap_product(c, z, phi)) for z in sh[s].representatives]
        vert[s] = _from_cols(cols, co[s].rank, p)
    b = Bisheaf(CellSheaf(base, [sh[s].rank for s in range(len(base))], smaps),
                CellCosheaf(base, [co[s].rank for s in range(len(base))], cmaps), vert)
    validate_bisheaf(b)
    return BuiltBisheaf(b, fm, r.degree, sh, co)


def cycle_to_sheaf_classes(bb: BuiltBisheaf, z: ChainVector, on_subdivision: bool = False) -> dict[int, tuple[int, ...]]:
    """Sheaf-stalk coordinates of a cycle of G at every base cell.

    ``z`` lives on the input complex unless ``on_subdivision`` is set."""
    fm = bb.model
    src = fm.complex.complex if on_subdivision else fm.original.complex
    if not src.boundary_chain(z).is_zero():
        raise ValueError("chain is not a cycle")
    w = z if on_subdivision else fm.push(z)
    return {s: h.coords_of(w.restrict(fm.stars.X[s]), restrict=True) for s, h in bb.sheaf_homology.items()}
