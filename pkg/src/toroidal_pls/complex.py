"""Finite cell complexes over GF(p): homology with representatives, relative
(co)homology, barycentric subdivision and the simplicial cap product.

Face order convention: ``sigma <= tau`` when ``tau`` is a face of ``sigma``
(so vertices sit at the top of the poset and top cells at the bottom).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence


class ComplexError(ValueError):
    """Invalid complex.  ``code`` names the violated invariant."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class UnsupportedComplex(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    id: int
    dim: int
    label: str = ""


class ChainVector:
    """Sparse chain (or cochain) of a fixed degree with GF(p) coefficients."""

    __slots__ = ("degree", "p", "coeffs")

    def __init__(self, degree: int, coeffs: dict[int, int] | Iterable[tuple[int, int]], p: int):
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        clean: dict[int, int] = {}
        for k, v in items:
            v = (clean.get(k, 0) + v) % p
            if v:
                clean[k] = v
            else:
                clean.pop(k, None)
        self.degree = degree
        self.p = p
        self.coeffs = clean

    @classmethod
    def zero(cls, degree: int, p: int) -> ChainVector:
        return cls(degree, {}, p)

    def __add__(self, other: ChainVector) -> ChainVector:
        if self.degree != other.degree:
            raise ValueError("adding chains of different degree")
        return ChainVector(self.degree, list(self.coeffs.items()) + list(other.coeffs.items()), self.p)

    def __sub__(self, other: ChainVector) -> ChainVector:
        return self + other.scale(-1)

    def scale(self, c: int) -> ChainVector:
        return ChainVector(self.degree, {k: c * v for k, v in self.coeffs.items()}, self.p)

    def restrict(self, cells: set[int] | frozenset[int]) -> ChainVector:
        return ChainVector(self.degree, {k: v for k, v in self.coeffs.items() if k in cells}, self.p)

    def support(self) -> frozenset[int]:
        return frozenset(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> list[tuple[int, int]]:
        return sorted(self.coeffs.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainVector):
            return NotImplemented
        return (self.degree, self.p, self.coeffs) == (other.degree, other.p, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.degree, self.p, tuple(self.items())))

    def __repr__(self) -> str:
        return f"ChainVector(deg={self.degree}, {self.items()})"


class CellComplex:
    """Finite regular cell complex.

    ``boundary[c]`` lists ``(face_id, incidence)`` pairs.  When ``vertices`` is
    given the complex is an ordered simplicial (Delta) complex: ``vertices[c]``
    is the increasing vertex tuple of ``c`` and ``boundary[c][i]`` is the face
    omitting ``vertices[c][i]`` with incidence ``(-1)**i``.
    """

    def __init__(self, dims: Sequence[int], boundary: Sequence[Sequence[tuple[int, int]]], p: int = 2,
                 labels: Sequence[str] | None = None,
                 vertices: Sequence[tuple[int, ...]] | None = None):
        self.p = p
        self.dims = tuple(int(d) for d in dims)
        self.boundary = tuple(tuple((int(f), int(i) % p) for f, i in b) for b in boundary)
        self.labels = tuple(labels) if labels is not None else tuple("" for _ in self.dims)
        self.vertices = tuple(tuple(v) for v in vertices) if vertices is not None else None
        if len(self.boundary) != len(self.dims) or len(self.labels) != len(self.dims):
            raise ComplexError("dense-ids", "dims, boundary and labels must have one entry per cell")
        self._cofaces: tuple[tuple[tuple[int, int], ...], ...] | None = None

    # basic queries
    def __len__(self) -> int:
        return len(self.dims)

    @property
    def cells(self) -> list[Cell]:
        return [Cell(i, d, lab) for i, (d, lab) in enumerate(zip(self.dims, self.labels))]

    @property
    def dimension(self) -> int:
        return max(self.dims) if self.dims else -1

    def cells_of_dim(self, k: int) -> list[int]:
        return [i for i, d in enumerate(self.dims) if d == k]

    def faces(self, c: int) -> list[int]:
        return [f for f, _ in self.boundary[c]]

    def cofaces(self, c: int) -> tuple[tuple[int, int], ...]:
        if self._cofaces is None:
            co: list[list[tuple[int, int]]] = [[] for _ in self.dims]
            for t, b in enumerate(self.boundary):
                for f, inc in b:
                    co[f].append((t, inc))
            self._cofaces = tuple(tuple(x) for x in co)
        return self._cofaces[c]

    def closure(self, cells: Iterable[int]) -> frozenset[int]:
        out = set()
        stack = list(cells)
        while stack:
            c = stack.pop()
            if c in out:
                continue
            out.add(c)
            stack.extend(self.faces(c))
        return frozenset(out)

    def star(self, cells: Iterable[int]) -> frozenset[int]:
        """Upward closure: the cells together with all their cofaces."""
        out = set()
        stack = list(cells)
        while stack:
            c = stack.pop()
            if c in out:
                continue
            out.add(c)
            stack.extend(t for t, _ in self.cofaces(c))
        return frozenset(out)

    def closure_vertices(self, c: int) -> frozenset[int]:
        return frozenset(x for x in self.closure([c]) if self.dims[x] == 0)

    def leq(self, sigma: int, tau: int) -> bool:
        """Poset order: sigma <= tau iff tau is a face of sigma (or equal)."""
        return tau in self.closure([sigma])

    def boundary_chain(self, z: ChainVector) -> ChainVector:
        out: dict[int, int] = {}
        for c, v in z.coeffs.items():
            for f, inc in self.boundary[c]:
                out[f] = (out.get(f, 0) + v * inc) % self.p
        return ChainVector(z.degree - 1, out, self.p)

    def coboundary_cochain(self, phi: ChainVector) -> ChainVector:
        out: dict[int, int] = {}
        for c, v in phi.coeffs.items():
            for t, inc in self.cofaces(c):
                out[t] = (out.get(t, 0) + v * inc) % self.p
        return ChainVector(phi.degree + 1, out, self.p)

    def chain(self, degree: int, coeffs: dict[int, int]) -> ChainVector:
        for c in coeffs:
            if self.dims[c] != degree:
                raise ValueError(f"cell {c} has dimension {self.dims[c]}, not {degree}")
        return ChainVector(degree, coeffs, self.p)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.dims)

    def is_simplicial(self) -> bool:
        return all(len(self.closure_vertices(c)) == self.dims[c] + 1 for c in range(len(self)))

    def subcomplex(self, keep: Iterable[int]) -> tuple[CellComplex, list[int]]:
        """Closed subcomplex on ``keep`` with dense ids; returns (complex, old ids)."""
        old = sorted(set(keep))
        new = {c: i for i, c in enumerate(old)}
        bnd = []
        for c in old:
            b = []
            for f, inc in self.boundary[c]:
                if f not in new:
                    raise ComplexError("not-closed", f"cell {c} has face {f} outside the subset")
                b.append((new[f], inc))
            bnd.append(b)
        verts = None
        if self.vertices is not None:
            verts = [tuple(new[v] for v in self.vertices[c]) for c in old]
        return CellComplex([self.dims[c] for c in old], bnd, self.p,
                           [self.labels[c] for c in old], verts), old


def validate(c: CellComplex) -> bool:
    """Check gradation, face references and boundary-squared-zero; raise ComplexError."""
    n = len(c)
    for i, b in enumerate(c.boundary):
        if c.dims[i] < 0:
            raise ComplexError("gradation", f"cell {i} has negative dimension")
        for f, inc in b:
            if not 0 <= f < n:
                raise ComplexError("dense-ids", f"cell {i} lists unknown face {f}")
            if c.dims[f] != c.dims[i] - 1:
                raise ComplexError("gradation", f"cell {i} (dim {c.dims[i]}) lists face {f} of dim {c.dims[f]}")
        if c.dims[i] == 0 and b:
            raise ComplexError("gradation", f"vertex {i} has a boundary")
    for i in range(n):
        z = c.boundary_chain(c.boundary_chain(ChainVector(c.dims[i], {i: 1}, c.p)))
        if not z.is_zero():
            raise ComplexError("boundary-squared", f"boundary of boundary of cell {i} is {z.items()}")
    if c.vertices is not None:
        for i, vs in enumerate(c.vertices):
            if len(vs) != c.dims[i] + 1 or list(vs) != sorted(set(vs)):
                raise ComplexError("ordering", f"cell {i} has vertex tuple {vs}")
            if c.dims[i] > 0:
                for j, (f, inc) in enumerate(c.boundary[i]):
                    if c.vertices[f] != vs[:j] + vs[j + 1:] or inc != (-1) ** j % c.p:
                        raise ComplexError("ordering", f"face {j} of cell {i} is not the expected face")
    return True


# ---------------------------------------------------------------- homology

def _pivot(v: dict[int, int]) -> int:
    return max(v)


def _axpy(y: dict[int, int], a: int, x: dict[int, int], p: int) -> None:
    for k, v in x.items():
        w = (y.get(k, 0) + a * v) % p
        if w:
            y[k] = w
        else:
            y.pop(k, None)


class _Reducer:
    """Echelon table of sparse vectors tagged with coordinates over a fixed basis."""

    def __init__(self, p: int):
        self.p = p
        self.table: dict[int, tuple[dict[int, int], dict[int, int]]] = {}

    def reduce(self, v: dict[int, int]) -> tuple[dict[int, int], dict[int, int]]:
        p = self.p
        r = dict(v)
        tag: dict[int, int] = {}
        while r:
            piv = _pivot(r)
            entry = self.table.get(piv)
            if entry is None:
                break
            vec, t = entry
            f = (r[piv] * pow(vec[piv], p - 2, p)) % p
            _axpy(r, -f, vec, p)
            _axpy(tag, f, t, p)
        return r, tag

    def insert(self, r: dict[int, int], tag: dict[int, int]) -> None:
        self.table[_pivot(r)] = (r, tag)


class HomologyBasis:
    """Basis of a (relative, co)homology group with explicit representatives."""

    def __init__(self, degree: int, representatives: list[ChainVector], reducer: _Reducer | None,
                 p: int, cells: frozenset[int] = frozenset()):
        self.degree = degree
        self.representatives = representatives
        self._reducer = reducer
        self.p = p
        self.cells = cells

    @property
    def rank(self) -> int:
        return len(self.representatives)

    def coords_of(self, z: ChainVector, restrict: bool = False) -> tuple[int, ...]:
        """Class coordinates of a (relative) cycle; raises on non-cycles.

        With ``restrict`` the chain is first cut down to the cells of the
        recorded chain complex; otherwise support outside them is an error."""
        if z.degree != self.degree:
            raise ValueError(f"chain of degree {z.degree} given to degree {self.degree} homology")
        outside = [k for k in z.coeffs if k not in self.cells]
        if outside and not restrict:
            raise ValueError(f"chain has support {sorted(outside)[:5]} outside the recorded cells")
        v = {k: x for k, x in z.coeffs.items() if k in self.cells}
        if self._reducer is None:
            if not v:
                return ()
            raise ValueError("chain is not a cycle of this (empty) complex")
        r, tag = self._reducer.reduce(v)
        if r:
            raise ValueError("chain is not a cycle of the recorded chain complex")
        return tuple(tag.get(i, 0) for i in range(self.rank))

    def chain_of(self, coords: Sequence[int]) -> ChainVector:
        out = ChainVector.zero(self.degree, self.p)
        for a, rep in zip(coords, self.representatives):
            if a % self.p:
                out = out + rep.scale(a)
        return out


def _graded_homology(degree: int, basis_k: list[int], diff_out: Callable[[int], dict[int, int]],
                     incoming: Iterable[dict[int, int]], p: int) -> HomologyBasis:
    # kernel of the outgoing differential by column reduction with transforms
    red: dict[int, tuple[dict[int, int], dict[int, int]]] = {}
    kernel_vecs: list[dict[int, int]] = []
    for c in basis_k:
        col = dict(diff_out(c))
        tr = {c: 1}
        while col:
            piv = _pivot(col)
            if piv not in red:
                break
            vcol, vtr = red[piv]
            f = (col[piv] * pow(vcol[piv], p - 2, p)) % p
            _axpy(col, -f, vcol, p)
            _axpy(tr, -f, vtr, p)
        if col:
            red[_pivot(col)] = (col, tr)
        else:
            kernel_vecs.append(tr)
    reducer = _Reducer(p)
    for b in incoming:
        r, _ = reducer.reduce(b)
        if r:
            reducer.insert(r, {})
    reps: list[ChainVector] = []
    for z in kernel_vecs:
        r, tag = reducer.reduce(z)
        if r:
            i = len(reps)
            reps.append(ChainVector(degree, z, p))
            t = {k: (-v) % p for k, v in tag.items()}
            t[i] = 1
            reducer.insert(r, t)
    return HomologyBasis(degree, reps, reducer, p, frozenset(basis_k))


def _pair_homology(c: CellComplex, allowed: frozenset[int], k: int) -> HomologyBasis:
    p = c.p
    basis_k = [x for x in sorted(allowed) if c.dims[x] == k]

    def diff_out(x: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for f, inc in c.boundary[x]:
            if f in allowed:
                out[f] = (out.get(f, 0) + inc) % p
        return {a: b for a, b in out.items() if b}

    incoming = (diff_out(y) for y in sorted(allowed) if c.dims[y] == k + 1)
    return _graded_homology(k, basis_k, diff_out, incoming, p)


def homology(c: CellComplex, degree: int, cells: Iterable[int] | None = None) -> HomologyBasis:
    """Homology of ``c`` (or of the closed subcomplex ``cells``) in ``degree``."""
    allowed = frozenset(range(len(c))) if cells is None else frozenset(cells)
    if cells is not None and c.closure(allowed) != allowed:
        raise ComplexError("not-closed", "cell subset is not closed under faces")
    if degree < 0:
        return HomologyBasis(degree, [], None, c.p)
    return _pair_homology(c, allowed, degree)


def relative_homology(c: CellComplex, sub: Iterable[int], degree: int,
                      ambient: Iterable[int] | None = None) -> HomologyBasis:
    """Homology of C(ambient)/C(sub); representatives are chains supported off ``sub``."""
    sub = frozenset(sub)
    amb = frozenset(range(len(c))) if ambient is None else frozenset(ambient)
    if c.closure(sub) != sub:
        raise ComplexError("not-closed", "relative subcomplex is not closed under faces")
    if c.closure(amb) != amb or not sub <= amb:
        raise ComplexError("not-closed", "ambient set is not a closed complex containing the subcomplex")
    if degree < 0:
        return HomologyBasis(degree, [], None, c.p)
    return _pair_homology(c, amb - sub, degree)


def cohomology(c: CellComplex, sub: Iterable[int], degree: int) -> HomologyBasis:
    """Relative cohomology H^degree(c, sub) with representative cocycles."""
    sub = frozenset(sub)
    if c.closure(sub) != sub:
        raise ComplexError("not-closed", "relative subcomplex is not closed under faces")
    if degree < 0:
        return HomologyBasis(degree, [], None, c.p)
    allowed = frozenset(range(len(c))) - sub
    p = c.p
    basis_k = [x for x in sorted(allowed) if c.dims[x] == degree]

    def delta(x: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for t, inc in c.cofaces(x):
            if t in allowed:
                out[t] = (out.get(t, 0) + inc) % p
        return {a: b for a, b in out.items() if b}

    incoming = (delta(y) for y in sorted(allowed) if c.dims[y] == degree - 1)
    return _graded_homology(degree, basis_k, delta, incoming, p)


# ---------------------------------------------------------------- subdivision

class Subdivision:
    """Result of subdividing: the new complex, the chain-level carrier, and for
    every new vertex the old cell whose barycentre it is."""

    def __init__(self, complex: CellComplex, carrier: dict[int, ChainVector], vertex_cell: dict[int, int],
                 cell_flags: list[tuple[int, ...]]):
        self.complex = complex
        self.carrier = carrier
        self.vertex_cell = vertex_cell
        self.cell_flags = cell_flags

    def push(self, z: ChainVector) -> ChainVector:
        out = ChainVector.zero(z.degree, z.p)
        for c, v in z.coeffs.items():
            out = out + self.carrier[c].scale(v)
        return out

    def __iter__(self):
        yield self.complex
        yield self.carrier


def order_complex(c: CellComplex) -> Subdivision:
    """Barycentric subdivision of a regular complex as the order complex of its face poset."""
    p = c.p
    closures = [c.closure([x]) - {x} for x in range(len(c))]
    order = sorted(range(len(c)), key=lambda x: (c.dims[x], x))
    vid = {x: i for i, x in enumerate(order)}

    flags_of: dict[int, list[tuple[int, ...]]] = {}
    for x in order:
        fl = [(x,)]
        for y in sorted(closures[x], key=lambda y: (c.dims[y], y)):
            fl.extend(f + (x,) for f in flags_of[y])
        flags_of[x] = fl
    all_flags = [f for x in order for f in flags_of[x]]
    all_flags.sort(key=lambda f: (len(f), tuple(vid[x] for x in f)))
    fid = {f: i for i, f in enumerate(all_flags)}
    dims = [len(f) - 1 for f in all_flags]
    bnd = []
    for f in all_flags:
        if len(f) == 1:
            bnd.append([])
        else:
            bnd.append([(fid[f[:i] + f[i + 1:]], (-1) ** i) for i in range(len(f))])
    verts = [tuple(vid[x] for x in f) for f in all_flags]
    labels = ["" for _ in all_flags]
    new = CellComplex(dims, bnd, p, labels, verts)

    carrier: dict[int, ChainVector] = {}
    for x in order:
        k = c.dims[x]
        if k == 0:
            carrier[x] = ChainVector(0, {fid[(x,)]: 1}, p)
            continue
        acc: dict[int, int] = {}
        sign = (-1) ** k
        for f, inc in c.boundary[x]:
            for g, v in carrier[f].coeffs.items():
                key = fid[all_flags[g] + (x,)]
                acc[key] = (acc.get(key, 0) + sign * inc * v) % p
        carrier[x] = ChainVector(k, acc, p)
    vertex_cell = {fid[(x,)]: x for x in order}
    return Subdivision(new, carrier, vertex_cell, all_flags)


def barycentric_subdivide(c: CellComplex) -> Subdivision:
    """Barycentric subdivision of a simplicial complex plus its carrier chain map."""
    if not c.is_simplicial():
        raise UnsupportedComplex("barycentric subdivision needs a simplicial complex")
    return order_complex(c)


def maximal_subcomplex(c: CellComplex, keep: Iterable[int]) -> frozenset[int]:
    """Largest subset of ``keep`` closed under taking faces."""
    cur = set(keep)
    changed = True
    while changed:
        changed = False
        for x in sorted(cur):
            if any(f not in cur for f in c.faces(x)):
                cur.discard(x)
                changed = True
    return frozenset(cur)


# ---------------------------------------------------------------- cap product

def front_face(c: CellComplex, x: int, l: int) -> int:
    """Face spanned by the first l+1 vertices of simplex x."""
    while c.dims[x] > l:
        x = c.boundary[x][-1][0]
    return x


def back_face(c: CellComplex, x: int, m: int) -> int:
    """Face spanned by the last m+1 vertices of simplex x."""
    while c.dims[x] > m:
        x = c.boundary[x][0][0]
    return x


def cap_product(c: CellComplex, z: ChainVector, phi: ChainVector) -> ChainVector:
    """Front-face cap product: [v0..vm] cap phi = phi([v0..vl]) [vl..vm]."""
    if c.vertices is None:
        raise UnsupportedComplex("cap product needs an ordered simplicial complex")
    l = phi.degree
    if z.degree < l:
        raise ValueError(f"cannot cap a degree {z.degree} chain with a degree {l} cochain")
    out: dict[int, int] = {}
    p = c.p
    for x, v in z.coeffs.items():
        w = phi.coeffs.get(front_face(c, x, l), 0)
        if w:
            b = back_face(c, x, z.degree - l)
            out[b] = (out.get(b, 0) + v * w) % p
    return ChainVector(z.degree - l, out, p)


@lru_cache(maxsize=None)
def _simplex_faces(vs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    return tuple(vs[:i] + vs[i + 1:] for i in range(len(vs)))


def from_simplices(simplices: Iterable[Sequence[int]], p: int = 2) -> CellComplex:
    """Ordered simplicial complex generated by the given vertex tuples (closed under faces)."""
    allsx: set[tuple[int, ...]] = set()
    stack = [tuple(sorted(set(s))) for s in simplices]
    while stack:
        s = stack.pop()
        if s in allsx or not s:
            continue
        allsx.add(s)
        if len(s) > 1:
            stack.extend(_simplex_faces(s))
    ordered = sorted(allsx, key=lambda s: (len(s), s))
    idx = {s: i for i, s in enumerate(ordered)}
    bnd = [[(idx[f], (-1) ** i) for i, f in enumerate(_simplex_faces(s))] if len(s) > 1 else [] for s in ordered]
    verts = [tuple(idx[(v,)] for v in s) for s in ordered]
    return CellComplex([len(s) - 1 for s in ordered], bnd, p, None, verts)
