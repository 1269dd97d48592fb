from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_vectors, random_matrix, random_subspace, span_set
from toroidal_pls.exactla import (
    AmbientMismatch, FieldMatrix, NotInvertible, NotRestrictable, Subspace, eigenspace_one, image,
    intersect, invert, kernel, preimage, quotient, rank, restrict_map, rref, solve, span_sum,
)


def M(rows, p=2):
    return FieldMatrix(rows, p)


def test_rref_examples():
    assert rref(FieldMatrix.identity(2, 2)) == (FieldMatrix.identity(2, 2), 2)
    assert rref(FieldMatrix.zeros(3, 3, 2)) == (FieldMatrix.zeros(3, 3, 2), 0)
    assert rref(M([[1, 1], [1, 1]])) == (M([[1, 1], [0, 0]]), 1)


def test_rref_idempotent(rng):
    for _ in range(200):
        p = rng.choice([2, 3, 5])
        m = random_matrix(rng, rng.randint(0, 4), rng.randint(0, 4), p)
        r, k = rref(m)
        assert rref(r) == (r, k)


def test_image_and_kernel_examples():
    assert image(FieldMatrix.zeros(2, 2, 2)).dim == 0
    assert image(FieldMatrix.identity(3, 2)) == Subspace.full(3, 2)
    assert image(M([[1, 0], [1, 0]])) == Subspace.span([[1, 1]], 2, 2)
    assert kernel(FieldMatrix.identity(3, 2)).dim == 0
    assert kernel(FieldMatrix.zeros(3, 3, 2)) == Subspace.full(3, 2)
    assert kernel(M([[1, 1], [1, 1]])) == Subspace.span([[1, 1]], 2, 2)


def test_preimage_examples():
    s = Subspace.span([[1, 0]], 2, 2)
    assert preimage(FieldMatrix.identity(2, 2), s) == s
    assert preimage(FieldMatrix.zeros(2, 3, 2), s) == Subspace.full(3, 2)
    m = M([[1, 0, 1], [0, 0, 1]])
    expected = [v for v in all_vectors(3, 2) if m.apply(v)[1] == 0]
    got = preimage(m, s)
    assert span_set(got.vectors(), 3, 2) == frozenset(expected)
    with pytest.raises(AmbientMismatch):
        preimage(m, Subspace.zero(3, 2))


def test_intersect_and_sum_examples():
    a = Subspace.span([[1, 0]], 2, 2)
    b = Subspace.span([[0, 1]], 2, 2)
    assert intersect(a, b).dim == 0
    assert intersect(a, a) == a
    assert span_sum(a, b) == Subspace.full(2, 2)
    assert span_sum(a, Subspace.zero(2, 2)) == a
    with pytest.raises(AmbientMismatch):
        intersect(a, Subspace.zero(3, 2))


def test_quotient_examples():
    proj, q = quotient(3, Subspace.zero(3, 2))
    assert q == 3 and proj == FieldMatrix.identity(3, 2)
    assert quotient(3, Subspace.full(3, 2))[1] == 0
    k = Subspace.span([[1, 1, 0]], 3, 2)
    proj, q = quotient(3, k)
    assert q == 2
    assert proj.apply((1, 1, 0)) == (0, 0)
    nullset = frozenset(v for v in all_vectors(3, 2) if not any(proj.apply(v)))
    assert nullset == span_set(k.vectors(), 3, 2)


def test_restrict_map_examples():
    s = Subspace.span([[1, 1, 0]], 3, 2)
    assert restrict_map(FieldMatrix.identity(3, 2), s, s) == FieldMatrix.identity(1, 2)
    assert restrict_map(FieldMatrix.identity(3, 2), Subspace.zero(3, 2), s).shape == (1, 0)
    d = Subspace.span([[1, 1]], 2, 2)
    with pytest.raises(NotRestrictable):
        restrict_map(M([[1, 0], [1, 1]]), d, d)


def test_invert_examples(rng):
    assert invert(FieldMatrix.identity(3, 2)) == FieldMatrix.identity(3, 2)
    swap = M([[0, 1], [1, 0]])
    assert invert(swap) == swap
    with pytest.raises(NotInvertible):
        invert(M([[1, 1], [1, 1]]))
    done = 0
    while done < 20:
        m = random_matrix(rng, 3, 3, 5)
        if rank(m) < 3:
            continue
        assert m @ invert(m) == FieldMatrix.identity(3, 5)
        done += 1


def test_eigenspace_one_examples():
    assert eigenspace_one(FieldMatrix.identity(3, 2)) == Subspace.full(3, 2)
    assert eigenspace_one(M([[0, 1], [1, 0]])) == Subspace.span([[1, 1]], 2, 2)
    e3 = eigenspace_one(M([[0, 1], [1, 0]], 3))
    assert e3 == Subspace.span([[1, 1]], 2, 3) and e3.dim == 1


def test_zero_dimensional_spaces():
    z = FieldMatrix.zeros(0, 3, 2)
    assert kernel(z) == Subspace.full(3, 2)
    assert image(z).ambient_dim == 0
    assert image(FieldMatrix.zeros(3, 0, 2)).dim == 0
    assert quotient(0, Subspace.zero(0, 2)) == (FieldMatrix.zeros(0, 0, 2), 0)
    assert (FieldMatrix.zeros(2, 0, 2) @ FieldMatrix.zeros(0, 3, 2)) == FieldMatrix.zeros(2, 3, 2)


def test_solve():
    m = M([[1, 1, 0], [0, 1, 1]])
    x = solve(m, (1, 0))
    assert m.apply(x) == (1, 0)
    assert solve(M([[1, 1], [1, 1]]), (1, 0)) is None


@pytest.mark.parametrize("p", [2, 3])
def test_lattice_ops_against_enumeration(p):
    r = random.Random(p)
    for _ in range(150):
        n = r.randint(1, 4 if p == 2 else 3)
        a = random_subspace(r, n, p)
        b = random_subspace(r, n, p)
        sa, sb = span_set(a.vectors(), n, p), span_set(b.vectors(), n, p)
        assert span_set(intersect(a, b).vectors(), n, p) == sa & sb
        ssum = span_set(span_sum(a, b).vectors(), n, p)
        assert ssum == span_set(a.vectors() + b.vectors(), n, p)
        m = random_matrix(r, n, r.randint(1, 3), p)
        pre = span_set(preimage(m, a).vectors(), m.cols, p)
        assert pre == frozenset(v for v in all_vectors(m.cols, p) if m.apply(v) in sa)
        ker = span_set(kernel(m).vectors(), m.cols, p)
        assert ker == frozenset(v for v in all_vectors(m.cols, p) if not any(m.apply(v)))
        img = span_set(image(m).vectors(), n, p)
        assert img == frozenset(m.apply(v) for v in all_vectors(m.cols, p))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_dimension_identity_1000_pairs(p):
    r = random.Random(100 + p)
    for _ in range(1000):
        n = r.randint(0, 5)
        a, b = random_subspace(r, n, p), random_subspace(r, n, p)
        assert a.dim + b.dim == span_sum(a, b).dim + intersect(a, b).dim
        assert intersect(a, b) == intersect(b, a)
        assert span_sum(a, b) == span_sum(b, a)
        c = random_subspace(r, n, p)
        assert intersect(intersect(a, b), c) == intersect(a, intersect(b, c))
        assert span_sum(span_sum(a, b), c) == span_sum(a, span_sum(b, c))


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_canonicity(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    n = data.draw(st.integers(0, 4))
    vecs = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), max_size=4))
    s = Subspace.span(vecs, n, p)
    coeffs = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=len(vecs), max_size=len(vecs)),
                                max_size=5))
    combos = [[sum(c[i] * vecs[i][j] for i in range(len(vecs))) % p for j in range(n)] for c in coeffs]
    t = Subspace.span(combos + vecs[::-1], n, p)
    assert s == t and s.basis == t.basis and hash(s) == hash(t)


def test_preimage_of_image_and_restriction(rng):
    for _ in range(300):
        p = rng.choice([2, 3])
        m = random_matrix(rng, rng.randint(0, 4), rng.randint(0, 4), p)
        assert preimage(m, image(m)) == Subspace.full(m.cols, p)
        dom = random_subspace(rng, m.cols, p)
        cod = span_sum(image(m @ dom.inclusion()) if dom.dim else Subspace.zero(m.rows, p),
                       random_subspace(rng, m.rows, p))
        r = restrict_map(m, dom, cod)
        for j, v in enumerate(dom.vectors()):
            recon = cod.inclusion().apply(r.column(j)) if cod.dim else tuple([0] * m.rows)
            assert recon == m.apply(v)


def test_quotient_properties(rng):
    for _ in range(300):
        p = rng.choice([2, 3])
        n = rng.randint(0, 5)
        k = random_subspace(rng, n, p)
        proj, q = quotient(n, k)
        assert q == n - k.dim and rank(proj) == q
        if k.dim:
            assert (proj @ k.inclusion()).is_zero()
