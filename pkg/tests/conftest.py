from __future__ import annotations

import itertools
import random

import pytest

from toroidal_pls.exactla import FieldMatrix, Subspace


def all_vectors(n: int, p: int):
    return list(itertools.product(range(p), repeat=n))


def span_set(vectors, n: int, p: int) -> frozenset:
    """Set of all vectors in the span, by brute force closure."""
    vecs = [tuple(v) for v in vectors]
    out = {tuple([0] * n)}
    for v in vecs:
        out = {tuple((a + c * b) % p for a, b in zip(w, v)) for w in out for c in range(p)}
    return frozenset(out)


def random_matrix(rng: random.Random, rows: int, cols: int, p: int) -> FieldMatrix:
    return FieldMatrix([[rng.randrange(p) for _ in range(cols)] for _ in range(rows)], p, rows, cols)


def random_subspace(rng: random.Random, n: int, p: int, k: int | None = None) -> Subspace:
    k = rng.randint(0, n) if k is None else k
    return Subspace.span([[rng.randrange(p) for _ in range(n)] for _ in range(k)], n, p)


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
