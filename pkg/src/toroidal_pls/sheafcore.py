"""Cellular sheaves, cosheaves and bisheaves over a finite base complex.

Relations follow the face order: ``(sigma, tau)`` with ``tau`` a face of
``sigma``.  A sheaf stores F(sigma<=tau): F(tau) -> F(sigma) (a
``dim F(sigma) x dim F(tau)`` matrix); a cosheaf stores
F(sigma<=tau): F(sigma) -> F(tau).  Only covering relations (codimension one)
are stored; longer relations are composites.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .complex import CellComplex, validate
from .exactla import FieldMatrix, invert, NotInvertible, rank


class SheafError(ValueError):
    pass


class BisheafError(SheafError):
    def __init__(self, sigma: int, tau: int, message: str):
        super().__init__(f"square {sigma}<={tau}: {message}")
        self.sigma = sigma
        self.tau = tau


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def covering_relations(base: CellComplex) -> list[tuple[int, int]]:
    return sorted({(s, t) for s in range(len(base)) for t in base.faces(s)})


class _Functor:
    covariant = False

    def __init__(self, base: CellComplex, stalk_dims: Sequence[int], maps: dict[tuple[int, int], FieldMatrix],
                 p: int | None = None):
        self.base = base
        self.p = base.p if p is None else p
        self.stalk_dims = tuple(int(x) for x in stalk_dims)
        if len(self.stalk_dims) != len(base):
            raise SheafError("one stalk dimension per base cell is required")
        self.maps: dict[tuple[int, int], FieldMatrix] = {}
        for s, t in covering_relations(base):
            want = self._shape(s, t)
            m = maps.get((s, t))
            if m is None:
                if 0 in want:
                    m = FieldMatrix.zeros(want[0], want[1], self.p)
                else:
                    raise SheafError(f"missing map for relation {s}<={t}")
            if m.shape != want:
                raise SheafError(f"map {s}<={t} has shape {m.shape}, expected {want}")
            if m.p != self.p:
                raise SheafError(f"map {s}<={t} is over GF({m.p}), not GF({self.p})")
            self.maps[(s, t)] = m
        extra = set(maps) - set(self.maps)
        if extra:
            raise SheafError(f"maps given for non-covering relations {sorted(extra)}")

    def _shape(self, s: int, t: int) -> tuple[int, int]:
        if self.covariant:
            return self.stalk_dims[t], self.stalk_dims[s]
        return self.stalk_dims[s], self.stalk_dims[t]

    def relations(self) -> list[tuple[int, int]]:
        return sorted(self.maps)

    def map(self, sigma: int, tau: int) -> FieldMatrix:
        """Map for any relation sigma <= tau, composed along covering steps."""
        if sigma == tau:
            return FieldMatrix.identity(self.stalk_dims[sigma], self.p)
        if (sigma, tau) in self.maps:
            return self.maps[(sigma, tau)]
        for f in sorted(self.base.faces(sigma)):
            if tau in self.base.closure([f]):
                first = self.maps[(sigma, f)]
                rest = self.map(f, tau)
                return rest @ first if self.covariant else first @ rest
        raise SheafError(f"{tau} is not a face of {sigma}")

    def functoriality_failures(self) -> list[tuple[int, int, int, int]]:
        """(sigma, f1, f2, tau) for length-2 paths whose composites disagree."""
        out = []
        for s in range(len(self.base)):
            seen: dict[int, tuple[int, FieldMatrix]] = {}
            for f in sorted(set(self.base.faces(s))):
                for t in sorted(set(self.base.faces(f))):
                    a, b = self.maps[(s, f)], self.maps[(f, t)]
                    comp = b @ a if self.covariant else a @ b
                    if t in seen and seen[t][1] != comp:
                        out.append((s, seen[t][0], f, t))
                    seen.setdefault(t, (f, comp))
        return out

    def check(self) -> bool:
        bad = self.functoriality_failures()
        if bad:
            s, f1, f2, t = bad[0]
            raise SheafError(f"composites {s}<={f1}<={t} and {s}<={f2}<={t} disagree")
        return True

    def total_dim(self) -> int:
        return sum(self.stalk_dims)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (self.p == other.p and self.stalk_dims == other.stalk_dims and self.maps == other.maps
                and self.base.dims == other.base.dims and self.base.boundary == other.base.boundary)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.stalk_dims))


class CellSheaf(_Functor):
    covariant = False


class CellCosheaf(_Functor):
    covariant = True


class Bisheaf:
    def __init__(self, sheaf: CellSheaf, cosheaf: CellCosheaf, vertical: dict[int, FieldMatrix]):
        if sheaf.base is not cosheaf.base and (sheaf.base.dims != cosheaf.base.dims
                                               or sheaf.base.boundary != cosheaf.base.boundary):
            raise SheafError("sheaf and cosheaf live on different bases")
        self.sheaf = sheaf
        self.cosheaf = cosheaf
        self.base = sheaf.base
        self.p = sheaf.p
        self.vertical = {}
        for s in range(len(self.base)):
            want = (cosheaf.stalk_dims[s], sheaf.stalk_dims[s])
            m = vertical.get(s)
            if m is None:
                m = FieldMatrix.zeros(want[0], want[1], self.p)
            if m.shape != want:
                raise SheafError(f"vertical map at {s} has shape {m.shape}, expected {want}")
            self.vertical[s] = m

    def square_failures(self) -> list[tuple[int, int]]:
        """Covering relations where vertical(tau) != cosheaf(s<=t) . vertical(s) . sheaf(s<=t)."""
        out = []
        for s, t in covering_relations(self.base):
            lhs = self.vertical[t]
            rhs = self.cosheaf.maps[(s, t)] @ self.vertical[s] @ self.sheaf.maps[(s, t)]
            if lhs != rhs:
                out.append((s, t))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bisheaf):
            return NotImplemented
        return self.sheaf == other.sheaf and self.cosheaf == other.cosheaf and self.vertical == other.vertical

    def __hash__(self) -> int:
        return hash(self.sheaf)


def is_episheaf(s: CellSheaf) -> tuple[bool, tuple[int, int] | None]:
    for rel in s.relations():
        m = s.maps[rel]
        if rank(m) != m.rows:
            return False, rel
    return True, None


def is_monocosheaf(c: CellCosheaf) -> tuple[bool, tuple[int, int] | None]:
    for rel in c.relations():
        m = c.maps[rel]
        if rank(m) != m.cols:
            return False, rel
    return True, None


def is_local_system(c: _Functor) -> tuple[bool, tuple[int, int] | None]:
    for rel in c.relations():
        m = c.maps[rel]
        if m.rows != m.cols:
            return False, rel
        try:
            invert(m)
        except NotInvertible:
            return False, rel
    return True, None


def validate_bisheaf(b: Bisheaf) -> bool:
    b.sheaf.check()
    b.cosheaf.check()
    bad = b.square_failures()
    if bad:
        s, t = bad[0]
        raise BisheafError(s, t, "vertical maps do not commute with the structure maps")
    return True


# ---------------------------------------------------------------- standard bases

def circle_base(m: int, p: int = 2) -> CellComplex:
    """Circle with vertices 0..m-1 and edge m+j running from vertex j to j+1."""
    if m < 2:
        raise ValueError("circle base needs at least two vertices")
    bnd: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for j in range(m):
        bnd.append([((j + 1) % m, 1), (j, -1)])
    return CellComplex([0] * m + [1] * m, bnd, p, [f"v{j}" for j in range(m)] + [f"e{j}" for j in range(m)])


def torus_base(m1: int = 2, m2: int = 2, p: int = 2) -> tuple[CellComplex, dict[tuple[int, int], int]]:
    """Product of two circle bases; returns the complex and the (cell1, cell2) -> id table."""
    c1, c2 = circle_base(m1, p), circle_base(m2, p)
    pairs = sorted(((a, b) for a in range(len(c1)) for b in range(len(c2))),
                   key=lambda ab: (c1.dims[ab[0]] + c2.dims[ab[1]], ab))
    idx = {ab: i for i, ab in enumerate(pairs)}
    dims, bnd, labels = [], [], []
    for a, b in pairs:
        dims.append(c1.dims[a] + c2.dims[b])
        faces = [(idx[(f, b)], inc) for f, inc in c1.boundary[a]]
        sgn = (-1) ** c1.dims[a]
        faces += [(idx[(a, f)], sgn * inc) for f, inc in c2.boundary[b]]
        bnd.append(faces)
        labels.append(f"{c1.labels[a]}x{c2.labels[b]}")
    return CellComplex(dims, bnd, p, labels), idx


def circle_walk(base: CellComplex, start: int = 0) -> list[tuple[int, int]]:
    """Cyclic (vertex, outgoing edge) sequence of a circle base from ``start``.

    An edge's first listed face is its head, the second its tail."""
    if base.dimension != 1:
        raise SheafError("base is not a circle")
    out_edge = {}
    for e in base.cells_of_dim(1):
        if len(base.boundary[e]) != 2:
            raise SheafError(f"edge {e} does not have two endpoints")
        tail = base.boundary[e][1][0]
        if tail in out_edge:
            raise SheafError("circle edges are not coherently oriented")
        out_edge[tail] = e
    if base.dims[start] != 0:
        raise SheafError(f"base cell {start} is not a vertex")
    walk = []
    v = start
    while True:
        e = out_edge.get(v)
        if e is None:
            raise SheafError("base is not a circle")
        walk.append((v, e))
        v = base.boundary[e][0][0]
        if v == start:
            break
        if len(walk) > len(base):
            raise SheafError("base is not a circle")
    if 2 * len(walk) != len(base):
        raise SheafError("base circle is disconnected")
    return walk


def cover_bisheaf(b: Bisheaf, k: int, start: int = 0) -> Bisheaf:
    """Pull a bisheaf on a circle back along the k-fold cover of the circle."""
    walk = circle_walk(b.base, start)
    m = len(walk)
    mm = m * k
    base = circle_base(mm, b.p)
    sdims = [0] * (2 * mm)
    cdims = [0] * (2 * mm)
    smaps, cmaps, vert = {}, {}, {}
    for J in range(mm):
        v, e = walk[J % m]
        head = b.base.boundary[e][0][0]
        nv, ne, nh = J, mm + J, (J + 1) % mm
        for new, old in ((nv, v), (ne, e)):
            sdims[new] = b.sheaf.stalk_dims[old]
            cdims[new] = b.cosheaf.stalk_dims[old]
            vert[new] = b.vertical[old]
        smaps[(ne, nv)] = b.sheaf.maps[(e, v)]
        smaps[(ne, nh)] = b.sheaf.maps[(e, head)]
        cmaps[(ne, nv)] = b.cosheaf.maps[(e, v)]
        cmaps[(ne, nh)] = b.cosheaf.maps[(e, head)]
    return Bisheaf(CellSheaf(base, sdims, smaps), CellCosheaf(base, cdims, cmaps), vert)


def relabel_bisheaf(b: Bisheaf, perm: Sequence[int]) -> Bisheaf:
    """Same bisheaf with base cell x renamed perm[x]."""
    n = len(b.base)
    inv = [0] * n
    for x, y in enumerate(perm):
        inv[y] = x
    bnd = [[(perm[f], i) for f, i in b.base.boundary[inv[y]]] for y in range(n)]
    base = CellComplex([b.base.dims[inv[y]] for y in range(n)], bnd, b.p, [b.base.labels[inv[y]] for y in range(n)])
    sd = [b.sheaf.stalk_dims[inv[y]] for y in range(n)]
    cd = [b.cosheaf.stalk_dims[inv[y]] for y in range(n)]
    sm = {(perm[s], perm[t]): m for (s, t), m in b.sheaf.maps.items()}
    cm = {(perm[s], perm[t]): m for (s, t), m in b.cosheaf.maps.items()}
    vt = {perm[s]: m for s, m in b.vertical.items()}
    return Bisheaf(CellSheaf(base, sd, sm), CellCosheaf(base, cd, cm), vt)


# ---------------------------------------------------------------- text format

def _matrix_lines(tag: str, m: FieldMatrix) -> list[str]:
    lines = [f"{tag} {m.rows} {m.cols}"]
    if m.cols:
        lines += [" ".join(str(x) for x in row) for row in m.entries]
    return lines


def format_base(base: CellComplex) -> list[str]:
    lines = []
    for i in range(len(base)):
        lab = base.labels[i] or f"c{i}"
        faces = " ".join(f"{f}:{inc}" for f, inc in base.boundary[i])
        lines.append(f"cell {i} {base.dims[i]} {lab}" + (f" : {faces}" if faces else ""))
    return lines


def format_objects(objs: Sequence[tuple[dict[str, str], object]], p: int) -> str:
    """Serialise sheaves/cosheaves/bisheaves on one shared base."""
    kinds = {type(o).__name__ for _, o in objs}
    if not objs:
        raise ValueError("nothing to write")
    kind = {"Bisheaf": "bisheaf", "CellSheaf": "sheaf", "CellCosheaf": "cosheaf"}
    if len(kinds) != 1:
        raise ValueError("all objects in one file must have the same kind")
    header = kind[kinds.pop()]
    base = objs[0][1].base
    lines = [f"format: {header}", f"field {p}"]
    lines += format_base(base)
    for tags, o in objs:
        lines.append("block" + "".join(f" {k}={v}" for k, v in sorted(tags.items())))
        parts = []
        if isinstance(o, Bisheaf):
            parts = [("sheaf", o.sheaf), ("cosheaf", o.cosheaf)]
        elif isinstance(o, CellSheaf):
            parts = [("sheaf", o)]
        else:
            parts = [("cosheaf", o)]
        for name, f in parts:
            lines.append(f"{name}-stalks " + " ".join(str(x) for x in f.stalk_dims))
        for name, f in parts:
            for (s, t), m in sorted(f.maps.items()):
                lines += _matrix_lines(f"{name} {s} {t}", m)
        if isinstance(o, Bisheaf):
            for s in range(len(base)):
                lines += _matrix_lines(f"vertical {s}", o.vertical[s])
    return "\n".join(lines) + "\n"


_TAG = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*=\S+$")


def parse_objects(text: str) -> tuple[str, int, CellComplex, list[tuple[dict[str, str], object]]]:
    """Parse the explicit (co)sheaf format; raises ParseError with a line number."""
    raw = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in raw if ln]
    if not lines or not lines[0][1].startswith("format:"):
        raise ParseError(lines[0][0] if lines else 1, "missing 'format:' header")
    kind = lines[0][1].split(":", 1)[1].strip()
    if kind not in ("bisheaf", "sheaf", "cosheaf"):
        raise ParseError(lines[0][0], f"unknown format {kind!r}")
    pos = 1

    def ints(lineno: int, toks: Sequence[str]) -> list[int]:
        try:
            return [int(t) for t in toks]
        except ValueError:
            raise ParseError(lineno, f"expected integers, got {' '.join(toks)!r}") from None

    if pos >= len(lines) or not lines[pos][1].startswith("field"):
        raise ParseError(lines[min(pos, len(lines) - 1)][0], "expected 'field <p>'")
    ln, text_ = lines[pos]
    toks = text_.split()
    if len(toks) != 2:
        raise ParseError(ln, "expected 'field <p>'")
    p = ints(ln, toks[1:])[0]
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ParseError(ln, f"field characteristic {p} is not prime")
    pos += 1
    cells: list[tuple[int, int, str, list[tuple[int, int]]]] = []
    while pos < len(lines) and lines[pos][1].startswith("cell "):
        ln, t = lines[pos]
        head, _, tail = t.partition(":")
        ht = head.split()
        if len(ht) not in (3, 4):
            raise ParseError(ln, "expected 'cell <id> <dim> [label] [: face:inc ...]'")
        cid, dim = ints(ln, ht[1:3])
        if cid != len(cells):
            raise ParseError(ln, f"cell ids must be dense and in order; expected {len(cells)}")
        faces = []
        for tok in tail.split():
            if ":" not in tok:
                raise ParseError(ln, f"face token {tok!r} is not face:incidence")
            f, inc = ints(ln, tok.split(":", 1))
            faces.append((f, inc))
        cells.append((cid, dim, ht[3] if len(ht) == 4 else "", faces))
        pos += 1
    if not cells:
        raise ParseError(lines[min(pos, len(lines) - 1)][0], "no base cells")
    base = CellComplex([c[1] for c in cells], [c[3] for c in cells], p, [c[2] for c in cells])
    try:
        validate(base)
    except ValueError as e:
        raise ParseError(lines[pos - 1][0], f"invalid base complex: {e}") from None
    ncell = len(cells)
    objs: list[tuple[dict[str, str], object]] = []
    while pos < len(lines):
        ln, t = lines[pos]
        toks = t.split()
        if toks[0] != "block":
            raise ParseError(ln, f"expected 'block', got {toks[0]!r}")
        block_line = ln
        tags = {}
        for tok in toks[1:]:
            if not _TAG.match(tok):
                raise ParseError(ln, f"bad block tag {tok!r}")
            k, v = tok.split("=", 1)
            tags[k] = v
        pos += 1
        dims: dict[str, list[int]] = {}
        mats: dict[str, dict] = {"sheaf": {}, "cosheaf": {}, "vertical": {}}
        while pos < len(lines) and not lines[pos][1].startswith("block"):
            ln, t = lines[pos]
            toks = t.split()
            if toks[0] in ("sheaf-stalks", "cosheaf-stalks"):
                vals = ints(ln, toks[1:])
                if len(vals) != ncell:
                    raise ParseError(ln, f"expected {ncell} stalk dimensions, got {len(vals)}")
                dims[toks[0].split("-")[0]] = vals
                pos += 1
                continue
            if toks[0] in ("sheaf", "cosheaf"):
                if len(toks) != 5:
                    raise ParseError(ln, f"expected '{toks[0]} <sigma> <tau> <rows> <cols>'")
                s, tau, r, c = ints(ln, toks[1:])
                key: object = (s, tau)
            elif toks[0] == "vertical":
                if len(toks) != 4:
                    raise ParseError(ln, "expected 'vertical <sigma> <rows> <cols>'")
                s, r, c = ints(ln, toks[1:])
                key = s
            else:
                raise ParseError(ln, f"unexpected keyword {toks[0]!r}")
            rows = [[] for _ in range(r)] if c == 0 else []
            for k in range(r if c else 0):
                if pos + 1 + k >= len(lines):
                    raise ParseError(ln, "matrix block ends early")
                rl, rt = lines[pos + 1 + k]
                row = ints(rl, rt.split())
                if len(row) != c:
                    raise ParseError(rl, f"matrix row has {len(row)} entries, expected {c}")
                rows.append(row)
            if key in mats[toks[0]]:
                raise ParseError(ln, f"duplicate {toks[0]} matrix for {key}")
            mats[toks[0]][key] = FieldMatrix(rows, p, r, c)
            pos += 1 + (r if c else 0)
        try:
            sheaf = cos = None
            if kind in ("bisheaf", "sheaf"):
                if "sheaf" not in dims:
                    raise ParseError(ln, "block lacks sheaf-stalks")
                sheaf = CellSheaf(base, dims["sheaf"], mats["sheaf"])
                sheaf.check()
            if kind in ("bisheaf", "cosheaf"):
                if "cosheaf" not in dims:
                    raise ParseError(ln, "block lacks cosheaf-stalks")
                cos = CellCosheaf(base, dims["cosheaf"], mats["cosheaf"])
                cos.check()
            if kind == "bisheaf":
                obj: object = Bisheaf(sheaf, cos, mats["vertical"])
                validate_bisheaf(obj)
            else:
                obj = sheaf if kind == "sheaf" else cos
        except SheafError as e:
            raise ParseError(ln, f"block starting at line {block_line}: {e}") from None
        objs.append((tags, obj))
    return kind, p, base, objs
