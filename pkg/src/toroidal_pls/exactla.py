"""Exact linear algebra over prime fields GF(p).

Matrices are immutable tuples of integer rows reduced mod p.  Subspaces are
stored through their reduced row-echelon basis, so two subspaces are equal as
sets exactly when their stored bases are identical.  Zero-sized matrices are
legal everywhere: a ``0 x n`` matrix is the map from the zero space and an
``n x 0`` matrix is the map into it.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class LinAlgError(ValueError):
    """Base class for exact linear algebra failures."""


class AmbientMismatch(LinAlgError):
    pass


class NotRestrictable(LinAlgError):
    pass


class NotInvertible(LinAlgError):
    pass


def _check_prime(p: int) -> None:
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise LinAlgError(f"characteristic {p} is not prime")


class FieldMatrix:
    """Dense matrix over GF(p) with explicit shape (either side may be 0)."""

    __slots__ = ("rows", "cols", "p", "entries", "_hash")

    def __init__(self, entries: Sequence[Sequence[int]], p: int, rows: int | None = None,
                 cols: int | None = None):
        data = tuple(tuple(int(x) % p for x in row) for row in entries)
        if rows is None:
            rows = len(data)
        if cols is None:
            if not data:
                raise LinAlgError("cols must be given for a matrix with no rows")
            cols = len(data[0])
        if len(data) != rows or any(len(r) != cols for r in data):
            raise LinAlgError(f"entries do not form a {rows}x{cols} grid")
        self.rows = rows
        self.cols = cols
        self.p = p
        self.entries = data
        self._hash = None

    # construction helpers
    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> FieldMatrix:
        return cls([[0] * cols for _ in range(rows)], p, rows, cols)

    @classmethod
    def identity(cls, n: int, p: int) -> FieldMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], p, n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int, p: int) -> FieldMatrix:
        return cls([[col[i] for col in columns] for i in range(nrows)], p, nrows, len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> FieldMatrix:
        return FieldMatrix([self.column(j) for j in range(self.cols)], self.p, self.cols, self.rows)

    def _same_field(self, other: FieldMatrix) -> None:
        if self.p != other.p:
            raise LinAlgError("matrices over different characteristics")

    def __matmul__(self, other: FieldMatrix) -> FieldMatrix:
        self._same_field(other)
        if self.cols != other.rows:
            raise AmbientMismatch(f"cannot compose {self.shape} with {other.shape}")
        p = self.p
        ocols = other.columns()
        out = [[sum(a * b for a, b in zip(row, col)) % p for col in ocols] for row in self.entries]
        return FieldMatrix(out, p, self.rows, other.cols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise AmbientMismatch(f"vector of length {len(v)} for a {self.shape} matrix")
        p = self.p
        return tuple(sum(a * b for a, b in zip(row, v)) % p for row in self.entries)

    def __add__(self, other: FieldMatrix) -> FieldMatrix:
        self._same_field(other)
        if self.shape != other.shape:
            raise AmbientMismatch("shape mismatch in addition")
        return FieldMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                           self.p, self.rows, self.cols)

    def __sub__(self, other: FieldMatrix) -> FieldMatrix:
        self._same_field(other)
        if self.shape != other.shape:
            raise AmbientMismatch("shape mismatch in subtraction")
        return FieldMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                           self.p, self.rows, self.cols)

    def scale(self, c: int) -> FieldMatrix:
        return FieldMatrix([[c * a for a in r] for r in self.entries], self.p, self.rows, self.cols)

    def power(self, k: int) -> FieldMatrix:
        if self.rows != self.cols:
            raise AmbientMismatch("power of a non-square matrix")
        result = FieldMatrix.identity(self.rows, self.p)
        base = self
        while k > 0:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (self.p, self.rows, self.cols, self.entries) == (other.p, other.rows, other.cols, other.entries)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.p, self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        return f"FieldMatrix({self.tolist()}, p={self.p}, shape={self.shape})"


def _inv(a: int, p: int) -> int:
    return pow(a, p - 2, p)


def _rref_rows(rows: list[list[int]], ncols: int, p: int) -> tuple[list[list[int]], list[int]]:
    """In-place Gauss-Jordan; returns (rows, pivot columns)."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r >= nrows:
            break
        sel = next((i for i in range(r, nrows) if rows[i][c] % p), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = _inv(rows[r][c], p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        piv = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], piv)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: FieldMatrix) -> tuple[FieldMatrix, int]:
    """Reduced row-echelon form of ``m`` and its rank."""
    rows, piv = _rref_rows([list(r) for r in m.entries], m.cols, m.p)
    return FieldMatrix(rows, m.p, m.rows, m.cols), len(piv)


def rank(m: FieldMatrix) -> int:
    return rref(m)[1]


class Subspace:
    """A subspace of GF(p)^n held by its canonical RREF row basis."""

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, basis: FieldMatrix, pivots: tuple[int, ...]):
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], ambient_dim: int, p: int) -> Subspace:
        rows = [list(int(x) % p for x in v) for v in vectors]
        if any(len(r) != ambient_dim for r in rows):
            raise AmbientMismatch("spanning vector of wrong length")
        rows, piv = _rref_rows(rows, ambient_dim, p)
        rows = rows[: len(piv)]
        return cls(ambient_dim, FieldMatrix(rows, p, len(rows), ambient_dim), tuple(piv))

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> Subspace:
        return cls.span([], ambient_dim, p)

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> Subspace:
        return cls.span(FieldMatrix.identity(ambient_dim, p).entries, ambient_dim, p)

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> list[tuple[int, ...]]:
        return list(self.basis.entries)

    def coords(self, v: Sequence[int]) -> tuple[int, ...] | None:
        """Coordinates of ``v`` in the stored basis, or None when ``v`` lies outside."""
        p = self.p
        v = tuple(int(x) % p for x in v)
        if len(v) != self.ambient_dim:
            raise AmbientMismatch("vector of wrong length")
        c = tuple(v[j] for j in self.pivots)
        recon = [0] * self.ambient_dim
        for a, row in zip(c, self.basis.entries):
            if a:
                for j, x in enumerate(row):
                    recon[j] = (recon[j] + a * x) % p
        return c if tuple(recon) == v else None

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords(v) is not None

    def contains_subspace(self, other: Subspace) -> bool:
        return all(self.contains(v) for v in other.vectors())

    def inclusion(self) -> FieldMatrix:
        """Matrix whose columns are the basis vectors (ambient x dim)."""
        return self.basis.transpose()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}/{self.ambient_dim}, basis={self.basis.tolist()})"


def image(m: FieldMatrix) -> Subspace:
    """Column space of ``m``."""
    return Subspace.span(m.columns(), m.rows, m.p)


def kernel(m: FieldMatrix) -> Subspace:
    """Null space of ``m``."""
    p = m.p
    rows, piv = _rref_rows([list(r) for r in m.entries], m.cols, p)
    free = [c for c in range(m.cols) if c not in set(piv)]
    vecs = []
    for f in free:
        v = [0] * m.cols
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-rows[i][f]) % p
        vecs.append(v)
    return Subspace.span(vecs, m.cols, p)


def _check_same(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions {a.ambient_dim} and {b.ambient_dim} differ")


def quotient(v_dim: int, k: Subspace) -> tuple[FieldMatrix, int]:
    """Projection GF(p)^v_dim -> GF(p)^v_dim / k.

    The quotient basis is the images of the standard vectors at the non-pivot
    indices of the RREF basis of ``k``, taken in increasing index order.
    """
    if k.ambient_dim != v_dim:
        raise AmbientMismatch("kernel subspace lives in a different ambient space")
    p = k.p
    piv = set(k.pivots)
    comp = [j for j in range(v_dim) if j not in piv]
    # v = sum_i a_i k_i + sum_j b_j e_comp[j]; a_i = v[piv_i] since RREF, then b = v - sum a_i k_i on comp
    out = []
    for c in comp:
        row = [0] * v_dim
        row[c] = 1
        for i, pc in enumerate(k.pivots):
            coef = k.basis.entries[i][c]
            if coef:
                row[pc] = (row[pc] - coef) % p
        out.append(row)
    return FieldMatrix(out, p, len(comp), v_dim), len(comp)


def complement_section(k: Subspace) -> FieldMatrix:
    """Right inverse of ``quotient(k.ambient_dim, k)[0]``: standard vectors at the complement."""
    piv = set(k.pivots)
    comp = [j for j in range(k.ambient_dim) if j not in piv]
    cols = []
    for c in comp:
        v = [0] * k.ambient_dim
        v[c] = 1
        cols.append(v)
    return FieldMatrix.from_columns(cols, k.ambient_dim, k.p) if cols else FieldMatrix.zeros(k.ambient_dim, 0, k.p)


def preimage(m: FieldMatrix, s: Subspace) -> Subspace:
    """{v : m v in s}."""
    if s.ambient_dim != m.rows:
        raise AmbientMismatch(f"subspace ambient {s.ambient_dim} but map codomain {m.rows}")
    proj, _ = quotient(s.ambient_dim, s)
    return kernel(proj @ m)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.p)
    inc = a.inclusion()
    coeffs = preimage(inc, b)
    return Subspace.span([inc.apply(c) for c in coeffs.vectors()], a.ambient_dim, a.p)


def span_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.span(a.vectors() + b.vectors(), a.ambient_dim, a.p)


def map_subspace(m: FieldMatrix, s: Subspace) -> Subspace:
    """Image of the subspace ``s`` under ``m``."""
    if s.ambient_dim != m.cols:
        raise AmbientMismatch("subspace does not live in the domain of the map")
    return Subspace.span([m.apply(v) for v in s.vectors()], m.rows, m.p)


def restrict_map(m: FieldMatrix, dom: Subspace, cod: Subspace) -> FieldMatrix:
    """Matrix of ``m`` from the stored basis of ``dom`` to the stored basis of ``cod``."""
    if m.cols != dom.ambient_dim or m.rows != cod.ambient_dim:
        raise AmbientMismatch("map does not connect the given ambient spaces")
    cols = []
    for v in dom.vectors():
        c = cod.coords(m.apply(v))
        if c is None:
            raise NotRestrictable(f"image of {v} leaves the target subspace")
        cols.append(c)
    if not cols:
        return FieldMatrix.zeros(cod.dim, 0, m.p)
    return FieldMatrix.from_columns(cols, cod.dim, m.p)


def invert(m: FieldMatrix) -> FieldMatrix:
    if m.rows != m.cols:
        raise NotInvertible(f"non-square {m.shape} matrix")
    n, p = m.rows, m.p
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m.entries)]
    rows, piv = _rref_rows(aug, n, p)
    if piv != list(range(n)):
        raise NotInvertible("matrix is singular")
    return FieldMatrix([r[n:] for r in rows], p, n, n)


def eigenspace_one(m: FieldMatrix) -> Subspace:
    """Fixed vectors of ``m``: kernel(m - identity)."""
    if m.rows != m.cols:
        raise AmbientMismatch("eigenspace of a non-square matrix")
    return kernel(m - FieldMatrix.identity(m.rows, m.p))


def solve(m: FieldMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """One solution of ``m x = b`` (free variables set to 0), or None."""
    p = m.p
    if len(b) != m.rows:
        raise AmbientMismatch("right-hand side of wrong length")
    aug = [list(r) + [int(x) % p] for r, x in zip(m.entries, b)]
    rows, piv = _rref_rows(aug, m.cols + 1, p)
    if m.cols in piv:
        return None
    x = [0] * m.cols
    for i, c in enumerate(piv):
        x[c] = rows[i][m.cols]
    return tuple(x)


def block_diag(blocks: Sequence[FieldMatrix], p: int) -> FieldMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b.entries):
            out[r0 + i][c0:c0 + b.cols] = row
        r0 += b.rows
        c0 += b.cols
    return FieldMatrix(out, p, rows, cols)
