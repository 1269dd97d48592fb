"""Explicit-matrix bisheaves for the worked examples."""

from __future__ import annotations

from .exactla import FieldMatrix
from .sheafcore import Bisheaf, CellCosheaf, CellSheaf, circle_base, torus_base


def _M(rows, p):
    return FieldMatrix(rows, p)


def running_bisheaf(n: int = 4, p: int = 2) -> Bisheaf:
    """Degree (1, 0) bisheaf of the zig-zag strip over an n-vertex circle."""
    base = circle_base(n, p)
    R = _M([[1, 0, 1, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 0, 1], [0, 0, 0, 1, 0]], p)
    L = _M([[1, 1, 0, 0, 0], [0, 0, 0, 1, 0], [0, 1, 0, 0, 0], [0, 0, 0, 0, 1]], p)
    A = _M([[1, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], p)
    B = _M([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], p)
    Vv = _M([[1, 0, 0, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]], p)
    sdims = [5] * n + [4] * n
    cdims = [3] * n + [4] * n
    sm, cm, vert = {}, {}, {}
    for j in range(n):
        e, tail, head = n + j, j, (j + 1) % n
        sm[(e, tail)], sm[(e, head)] = R, L
        cm[(e, tail)], cm[(e, head)] = A, B
        vert[j] = Vv
        vert[e] = FieldMatrix.identity(4, p)
    return Bisheaf(CellSheaf(base, sdims, sm), CellCosheaf(base, cdims, cm), vert)


def torsion_bisheaf(degree: int, p: int = 2) -> Bisheaf:
    """Two-vertex circle example whose degree-2 system twists by a swap."""
    if degree not in (1, 2):
        raise ValueError("torsion fixture exists in degrees 1 and 2")
    base = circle_base(2, p)
    va, vb, e1, e2 = 0, 1, 2, 3
    drop = _M([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], p)
    ident3 = FieldMatrix.identity(3, p)
    sm = {(e1, va): drop, (e1, vb): ident3}
    if degree == 1:
        sm[(e2, vb)] = _M([[1, 0, 0], [0, 0, 1], [0, 1, 0]], p)
        sm[(e2, va)] = _M([[1, 0, 0, 1], [0, 1, 0, -1], [0, 0, 1, 0]], p)
        vert = {va: _M([[1, 1, 1, 0]], p), vb: _M([[1, 1, 1]], p), e1: _M([[1, 1, 1]], p), e2: _M([[1, 1, 1]], p)}
        one = FieldMatrix.identity(1, p)
        cm = {(e1, va): one, (e1, vb): one, (e2, va): one, (e2, vb): one}
        cdims = [1, 1, 1, 1]
    else:
        sm[(e2, vb)] = _M([[0, 1, 0], [1, 0, 0], [0, 0, 1]], p)
        sm[(e2, va)] = _M([[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, -1]], p)
        w = _M([[1, 0, 1], [0, 1, 1]], p)
        vert = {va: _M([[1, 0, 1, 0], [0, 1, 1, 0]], p), vb: w, e1: w, e2: w}
        ident2 = FieldMatrix.identity(2, p)
        swap = _M([[0, 1], [1, 0]], p)
        cm = {(e1, va): ident2, (e1, vb): ident2, (e2, va): ident2, (e2, vb): swap}
        cdims = [2, 2, 2, 2]
    sheaf = CellSheaf(base, [4, 3, 3, 3], sm)
    return Bisheaf(sheaf, CellCosheaf(base, cdims, cm), vert)


def constant_bisheaf(base, p: int = 2, vertical: int = 1) -> Bisheaf:
    """Rank-one constant sheaf and cosheaf with identity maps and scalar verticals."""
    one = FieldMatrix.identity(1, p)
    rels = {(s, t): one for s in range(len(base)) for t in base.faces(s)}
    dims = [1] * len(base)
    vert = {s: FieldMatrix([[vertical % p]], p) for s in range(len(base))}
    return Bisheaf(CellSheaf(base, dims, dict(rels)), CellCosheaf(base, dims, dict(rels)), vert)


def schwarz_direction_bisheaf(p: int = 2) -> Bisheaf:
    """One-direction system of the Schwarz P example (identical for each axis)."""
    return constant_bisheaf(circle_base(2, p), p, 1)


def schwarz_pair_bisheaf(p: int = 2) -> Bisheaf:
    """Two-direction system over the torus base: the vertical maps vanish."""
    base, _ = torus_base(2, 2, p)
    return constant_bisheaf(base, p, 0)
