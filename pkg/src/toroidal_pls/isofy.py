"""Epification, monofication, isobisheaves and persistent local systems.

Also holds brute-force oracles for the maximal sub-episheaf and the minimal
quotient-monocosheaf.  The oracles work on explicit sets of vectors and do
not use the subspace lattice code.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .complex import CellComplex
from .exactla import (
    FieldMatrix, NotInvertible, Subspace, complement_section, image, intersect, invert, map_subspace,
    preimage, quotient, restrict_map, span_sum,
)
from .sheafcore import (
    Bisheaf, CellCosheaf, CellSheaf, circle_base, covering_relations, is_episheaf, is_monocosheaf,
    validate_bisheaf,
)


class PLSInconsistency(RuntimeError):
    pass


class OracleRefusal(ValueError):
    pass


def stratify(base: CellComplex) -> list[list[int]]:
    """Peel off cells without remaining cofaces: top cells first."""
    left = set(range(len(base)))
    strata = []
    while left:
        layer = sorted(x for x in left if not any(t in left for t, _ in base.cofaces(x)))
        strata.append(layer)
        left -= set(layer)
    return strata


def _coface_list(base: CellComplex, x: int) -> list[int]:
    return sorted({t for t, _ in base.cofaces(x)})


# ---------------------------------------------------------------- epification

@dataclass
class SubSheaf:
    parent: CellSheaf
    sub: list[Subspace]
    iterations: int = 0
    maps: dict[tuple[int, int], FieldMatrix] = field(default_factory=dict)

    def __post_init__(self):
        if not self.maps:
            self.maps = {(s, t): restrict_map(self.parent.maps[(s, t)], self.sub[t], self.sub[s])
                         for s, t in self.parent.relations()}

    def as_sheaf(self) -> CellSheaf:
        return CellSheaf(self.parent.base, [s.dim for s in self.sub], self.maps, self.parent.p)

    def inclusion(self, sigma: int) -> FieldMatrix:
        s = self.sub[sigma]
        return s.inclusion() if s.dim else FieldMatrix.zeros(s.ambient_dim, 0, self.parent.p)


def _epi_assignment(s: CellSheaf, E: Sequence[Subspace]) -> bool:
    return all(map_subspace(m, E[t]) == E[sig] for (sig, t), m in s.maps.items())


def epify(s: CellSheaf) -> SubSheaf:
    """Maximal sub-episheaf by alternating image and preimage sweeps."""
    p = s.p
    base = s.base
    E = [Subspace.full(d, p) for d in s.stalk_dims]
    strata = stratify(base)
    limit = len(base) * max(1, s.total_dim())
    it = 0
    while not _epi_assignment(s, E):
        it += 1
        if it > limit:
            raise RuntimeError("epification failed to converge")
        # images from faces
        cut = []
        for sig in range(len(base)):
            acc = E[sig]
            for t in sorted(set(base.faces(sig))):
                acc = intersect(acc, map_subspace(s.maps[(sig, t)], E[t]))
            cut.append(acc)
        # preimages from cofaces, top cells first so restrictions are defined
        for layer in strata:
            for sig in layer:
                acc = cut[sig]
                for r in _coface_list(base, sig):
                    acc = intersect(acc, preimage(s.maps[(r, sig)], cut[r]))
                cut[sig] = acc
        E = cut
    return SubSheaf(s, E, it)


# ---------------------------------------------------------------- monofication

@dataclass
class QuotientCosheaf:
    parent: CellCosheaf
    kern: list[Subspace]
    iterations: int = 0
    proj: list[FieldMatrix] = field(default_factory=list)
    maps: dict[tuple[int, int], FieldMatrix] = field(default_factory=dict)

    def __post_init__(self):
        if not self.proj:
            self.proj = [quotient(k.ambient_dim, k)[0] for k in self.kern]
        if not self.maps:
            for (s, t), m in self.parent.maps.items():
                self.maps[(s, t)] = self.proj[t] @ m @ complement_section(self.kern[s])

    @property
    def dims(self) -> list[int]:
        return [k.ambient_dim - k.dim for k in self.kern]

    def as_cosheaf(self) -> CellCosheaf:
        return CellCosheaf(self.parent.base, self.dims, self.maps, self.parent.p)


def _mono_assignment(c: CellCosheaf, K: Sequence[Subspace]) -> bool:
    return all(preimage(m, K[t]) == K[s] for (s, t), m in c.maps.items())


def monofy(c: CellCosheaf) -> QuotientCosheaf:
    """Minimal quotient that is a monocosheaf, by kernel-growing sweeps."""
    p = c.p
    base = c.base
    K = [Subspace.zero(d, p) for d in c.stalk_dims]
    strata = stratify(base)
    limit = len(base) * max(1, c.total_dim())
    it = 0
    while not _mono_assignment(c, K):
        it += 1
        if it > limit:
            raise RuntimeError("monofication failed to converge")
        grown = []
        for s in range(len(base)):
            acc = K[s]
            for t in sorted(set(base.faces(s))):
                acc = span_sum(acc, preimage(c.maps[(s, t)], K[t]))
            grown.append(acc)
        for layer in strata:
            for s in layer:
                acc = grown[s]
                for r in _coface_list(base, s):
                    acc = span_sum(acc, map_subspace(c.maps[(r, s)], grown[r]))
                grown[s] = acc
        K = grown
    return QuotientCosheaf(c, K, it)


# ---------------------------------------------------------------- isobisheaf / PLS

@dataclass
class Isobisheaf:
    source: Bisheaf
    epi: SubSheaf
    mono: QuotientCosheaf
    vertical: dict[int, FieldMatrix]

    def as_bisheaf(self) -> Bisheaf:
        return Bisheaf(self.epi.as_sheaf(), self.mono.as_cosheaf(), self.vertical)


def isobisheafify(b: Bisheaf) -> Isobisheaf:
    epi = epify(b.sheaf)
    mono = monofy(b.cosheaf)
    vert = {s: mono.proj[s] @ b.vertical[s] @ epi.inclusion(s) for s in range(len(b.base))}
    iso = Isobisheaf(b, epi, mono, vert)
    bb = iso.as_bisheaf()
    if not is_episheaf(bb.sheaf)[0] or not is_monocosheaf(bb.cosheaf)[0]:
        raise PLSInconsistency("isofied sides are not epi/mono")
    validate_bisheaf(bb)
    return iso


@dataclass
class PersistentLocalSystem:
    iso: Isobisheaf
    stalks: list[Subspace]
    maps: dict[tuple[int, int], FieldMatrix]

    @property
    def base(self) -> CellComplex:
        return self.iso.source.base

    @property
    def p(self) -> int:
        return self.iso.source.p

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.stalks]

    @property
    def rank(self) -> int:
        return max(self.dims) if self.dims else 0

    def as_cosheaf(self) -> CellCosheaf:
        return CellCosheaf(self.base, self.dims, self.maps, self.p)


def extract_pls(iso: Isobisheaf) -> PersistentLocalSystem:
    """Images of the isobisheaf verticals with the induced (invertible) cosheaf maps."""
    stalks = [image(iso.vertical[s]) for s in range(len(iso.source.base))]
    maps = {}
    for (s, t), m in iso.mono.maps.items():
        try:
            r = restrict_map(m, stalks[s], stalks[t])
            if r.rows != r.cols:
                raise NotInvertible("stalk dimensions differ")
            invert(r)
        except (NotInvertible, ValueError) as e:
            raise PLSInconsistency(f"induced map {s}<={t} is not invertible: {e}") from None
        maps[(s, t)] = r
    return PersistentLocalSystem(iso, stalks, maps)


def pls_of(b: Bisheaf) -> PersistentLocalSystem:
    return extract_pls(isobisheafify(b))


# ---------------------------------------------------------------- oracles

def _vec_space(n: int, p: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(p), repeat=n))


_SUBSPACE_CACHE: dict[tuple[int, int], list[frozenset]] = {}


def all_subspaces(n: int, p: int) -> list[frozenset]:
    """Every subspace of GF(p)^n as a frozenset of vectors (closure of spans)."""
    key = (n, p)
    if key not in _SUBSPACE_CACHE:
        zero = frozenset({tuple([0] * n)})
        seen = {zero}
        frontier = [zero]
        vecs = _vec_space(n, p)
        while frontier:
            nxt = []
            for S in frontier:
                for v in vecs:
                    if v in S:
                        continue
                    T = frozenset(tuple((a + c * b) % p for a, b in zip(w, v)) for w in S for c in range(p))
                    if T not in seen:
                        seen.add(T)
                        nxt.append(T)
            frontier = nxt
        _SUBSPACE_CACHE[key] = sorted(seen, key=lambda S: (len(S), sorted(S)))
    return _SUBSPACE_CACHE[key]


def _apply(rows: Sequence[Sequence[int]], ncols: int, v: Sequence[int], p: int) -> tuple[int, ...]:
    return tuple(sum(r[j] * v[j] for j in range(ncols)) % p for r in rows)


def _check_size(f, p: int) -> None:
    if p not in (2, 3):
        raise OracleRefusal(f"oracle supports GF(2) and GF(3) only, not GF({p})")
    if len(f.base) > 8:
        raise OracleRefusal(f"base has {len(f.base)} cells; the oracle limit is 8")
    if f.total_dim() > 10:
        raise OracleRefusal(f"total stalk dimension {f.total_dim()} exceeds the oracle limit of 10")


def _vectors_basis(S: frozenset, n: int, p: int) -> Subspace:
    return Subspace.span(sorted(S), n, p)


def _enumerate_assignments(f, choose: Callable, derive: Callable, consistent: Callable) -> list[list[frozenset]]:
    """Backtrack over base cells by dimension: vertices range over all
    subspaces, higher cells are derived from their first face and checked
    against every face."""
    base = f.base
    order = sorted(range(len(base)), key=lambda x: (base.dims[x], x))
    out = []
    assign: dict[int, frozenset] = {}

    def rec(i: int) -> None:
        if i == len(order):
            out.append([assign[x] for x in range(len(base))])
            return
        x = order[i]
        faces = sorted(set(base.faces(x)))
        options = choose(x) if not faces else [derive(x, faces[0], assign[faces[0]])]
        for S in options:
            if all(consistent(x, t, S, assign[t]) for t in faces):
                assign[x] = S
                rec(i + 1)
                del assign[x]

    rec(0)
    return out


def oracle_epify(s: CellSheaf) -> SubSheaf:
    """Largest sub-episheaf found by exhaustive enumeration."""
    p = s.p
    _check_size(s, p)
    dims = s.stalk_dims

    def img(x: int, t: int, S: frozenset) -> frozenset:
        m = s.maps[(x, t)]
        return frozenset(_apply(m.entries, m.cols, v, p) for v in S)

    sols = _enumerate_assignments(
        s,
        choose=lambda x: all_subspaces(dims[x], p),
        derive=lambda x, t, S: img(x, t, S),
        consistent=lambda x, t, S, St: img(x, t, St) == S,
    )
    best = [max(col, key=len) for col in zip(*sols)] if sols else []
    top = [sol for sol in sols if all(a == b for a, b in zip(sol, best))]
    if len(top) != 1 or not all(all(a <= b for a, b in zip(sol, best)) for sol in sols):
        raise AssertionError("sub-episheaves do not have a largest element")
    return SubSheaf(s, [_vectors_basis(S, dims[x], p) for x, S in enumerate(best)])


def oracle_monofy(c: CellCosheaf) -> QuotientCosheaf:
    """Smallest kernel assignment giving a quotient monocosheaf, by enumeration."""
    p = c.p
    _check_size(c, p)
    dims = c.stalk_dims

    def pre(x: int, t: int, S: frozenset) -> frozenset:
        m = c.maps[(x, t)]
        return frozenset(v for v in _vec_space(dims[x], p) if _apply(m.entries, m.cols, v, p) in S)

    sols = _enumerate_assignments(
        c,
        choose=lambda x: all_subspaces(dims[x], p),
        derive=lambda x, t, S: pre(x, t, S),
        consistent=lambda x, t, S, St: pre(x, t, St) == S,
    )
    least = [min(col, key=len) for col in zip(*sols)] if sols else []
    if not all(all(a <= b for a, b in zip(least, sol)) for sol in sols) or least not in sols:
        raise AssertionError("quotient monocosheaves do not have a smallest kernel")
    return QuotientCosheaf(c, [_vectors_basis(S, dims[x], p) for x, S in enumerate(least)])


# ---------------------------------------------------------------- random instances

def _rand_matrix(rng: random.Random, r: int, c: int, p: int) -> FieldMatrix:
    return FieldMatrix([[rng.randrange(p) for _ in range(c)] for _ in range(r)], p, r, c)


def random_circle_dims(rng: random.Random, max_vertices: int = 4, max_dim: int = 3,
                       max_total: int = 10) -> tuple[int, list[int]]:
    m = rng.randint(2, max_vertices)
    while True:
        dims = [rng.randint(0, max_dim) for _ in range(2 * m)]
        if sum(dims) <= max_total:
            return m, dims


def random_circle_sheaf(rng: random.Random, p: int = 2, max_vertices: int = 4, max_dim: int = 3) -> CellSheaf:
    m, dims = random_circle_dims(rng, max_vertices, max_dim)
    base = circle_base(m, p)
    maps = {(s, t): _rand_matrix(rng, dims[s], dims[t], p) for s, t in covering_relations(base)}
    return CellSheaf(base, dims, maps)


def random_circle_cosheaf(rng: random.Random, p: int = 2, max_vertices: int = 4, max_dim: int = 3) -> CellCosheaf:
    m, dims = random_circle_dims(rng, max_vertices, max_dim)
    base = circle_base(m, p)
    maps = {(s, t): _rand_matrix(rng, dims[t], dims[s], p) for s, t in covering_relations(base)}
    return CellCosheaf(base, dims, maps)


@dataclass
class OracleSummary:
    instances: int
    sheaf_mismatches: list[int]
    cosheaf_mismatches: list[int]

    @property
    def ok(self) -> bool:
        return not self.sheaf_mismatches and not self.cosheaf_mismatches


def oracle_suite(n: int, seed: int, p: int = 2, max_vertices: int = 4, max_dim: int = 3,
                 epify_impl: Callable = epify, monofy_impl: Callable = monofy) -> OracleSummary:
    """Compare epify/monofy with the oracles on n seeded random sheaves and cosheaves.

    ``epify_impl``/``monofy_impl`` let a test harness substitute a broken build."""
    if p not in (2, 3):
        raise OracleRefusal(f"oracle supports GF(2) and GF(3) only, not GF({p})")
    if 2 * max_vertices > 8:
        raise OracleRefusal("circle bases with more than 4 vertices exceed the oracle limit of 8 cells")
    rng = random.Random(seed)
    bad_s, bad_c = [], []
    for i in range(n):
        s = random_circle_sheaf(rng, p, max_vertices, max_dim)
        if epify_impl(s).sub != oracle_epify(s).sub:
            bad_s.append(i)
        c = random_circle_cosheaf(rng, p, max_vertices, max_dim)
        if monofy_impl(c).kern != oracle_monofy(c).kern:
            bad_c.append(i)
    return OracleSummary(n, bad_s, bad_c)
