from fractions import Fraction

import pytest

from yangian_eval.errors import DimensionMismatch, OddSymplecticDimension
from yangian_eval.metric import lower_index, make_metric, raise_index


@pytest.mark.parametrize("kind,n", [(k, n) for k in ("so", "sp") for n in range(2, 9) if k == "so" or n % 2 == 0])
def test_metric_invariants(kind, n):
    m = make_metric(kind, n)
    eps = m.eps
    assert m.beta == Fraction(n, 2) - eps
    for a in range(n):
        for b in range(n):
            assert m.lower[a][b] == eps * m.lower[b][a]
            assert m.upper[a][b] == eps * m.upper[b][a]
            assert sum(m.lower[a][c] * m.upper[c][b] for c in range(n)) == (1 if a == b else 0)


def test_orthogonal_three():
    m = make_metric("so", 3)
    assert m.eps == 1 and m.beta == Fraction(1, 2)
    assert [list(r) for r in m.lower] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_symplectic_two():
    m = make_metric("sp", 2)
    assert m.eps == -1 and m.beta == 2
    assert m.low(1, 2) == 1 and m.low(2, 1) == -1
    assert m.up(1, 2) == -1 and m.up(2, 1) == 1


def test_odd_symplectic_rejected():
    with pytest.raises(OddSymplecticDimension):
        make_metric("sp", 3)


def test_lowering_identity():
    so3 = make_metric("so", 3)
    ident = [[1 if a == b else 0 for b in range(3)] for a in range(3)]
    assert lower_index(ident, so3) == ident
    sp2 = make_metric("sp", 2)
    assert lower_index([[1, 0], [0, 1]], sp2) == [[0, 1], [-1, 0]]


@pytest.mark.parametrize("kind,n", [("so", 4), ("sp", 4)])
def test_raise_undoes_lower(kind, n):
    m = make_metric(kind, n)
    M = [[Fraction(a * 7 + b * b - 3, a + 1) for b in range(n)] for a in range(n)]
    assert raise_index(lower_index(M, m), m) == M


def test_lowering_rejects_wrong_shape():
    with pytest.raises(DimensionMismatch):
        lower_index([[1, 2, 3]], make_metric("so", 3))
