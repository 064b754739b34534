import itertools
from fractions import Fraction

import pytest

from tenrank.errors import BadDim, BadSpec
from tenrank.families import (
    Family,
    FamilySpec,
    dicke,
    ghz,
    l_state,
    m_basis_change,
    m_basis_matrix,
    m_state,
    make_state,
    mprime_state,
    n_state,
    nonsym4,
    nprime_state,
    state,
    w_state,
)
from tenrank.scalars import Cyclotomic
from tenrank.tensor import LocalMap, build_tensor, kronecker_product, multilinear_profile, slocc_apply

from .oracles import weak_compositions

GRID = [(d, n) for d in range(2, 6) for n in range(2, 7)]


def test_y3_terms():
    want = {(0, 0, 2), (0, 2, 0), (2, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}
    t = l_state(3, 3)
    assert set(t.entries) == want and all(v == 1 for v in t.entries.values())
    assert state("y", n=3) == t


@pytest.mark.parametrize("n", range(2, 7))
def test_d2_collapses_to_w(n):
    assert l_state(2, n) == m_state(2, n) == n_state(2, n) == w_state(n)


@pytest.mark.parametrize("d,n", GRID)
def test_supports(d, n):
    assert set(l_state(d, n).entries) == set(weak_compositions(d - 1, n))
    for t in (m_state(d, n), n_state(d, n)):
        assert all(sum(idx) <= d - 1 for idx in t.entries)
    assert n_state(d, n).nnz == (n - 1) * (d - 1) + 1


@pytest.mark.parametrize("d,n", [(d, n) for d, n in GRID if n >= 3 and d <= 4])
def test_all_families_concise(d, n):
    for make in (l_state, m_state, mprime_state, n_state, nprime_state):
        assert all(multilinear_profile(make(d, n))[1])


@pytest.mark.parametrize("n", range(2, 8))
def test_w_is_dicke_one(n):
    assert w_state(n) == dicke(n, 1)
    assert dicke(n, 0).nnz == 1


def test_dicke_counts():
    from math import comb

    for n in range(2, 7):
        for k in range(n + 1):
            assert dicke(n, k).nnz == comb(n, k)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_w_kron_w_is_m4(n):
    assert kronecker_product(w_state(n), w_state(n)) == m_state(4, n)


def test_nonsym4_entries():
    t = nonsym4(1, 2, 1)
    assert t[(0, 1, 1, 0)] == 9 and t[(0, 0, 1, 1)] == 1 and t[(0, 1, 0, 1)] == 4
    assert nonsym4(1, 2, -1)[(0, 1, 1, 0)] == 1
    assert make_state(FamilySpec(Family.NONSYM4, alpha=Fraction(1), beta=Fraction(2))) == t


def test_spec_invariants():
    assert FamilySpec("y", d=5, n=4).d == 3
    assert FamilySpec("nonsym4", d=7, n=9).n == 4
    with pytest.raises(BadSpec):
        FamilySpec("l", d=1, n=3)
    with pytest.raises(BadSpec):
        FamilySpec("dicke", n=3, l=4)
    with pytest.raises(BadSpec):
        FamilySpec("nonsym4", sign=2)
    assert FamilySpec("l", d=3, n=4).label() == "L(3,4)"


@pytest.mark.parametrize("d,n", [(3, 3), (4, 3), (4, 4), (5, 3), (6, 3)])
def test_m_basis_change_maps_m_to_mprime(d, n):
    assert slocc_apply(m_state(d, n), m_basis_change(d, n)) == mprime_state(d, n)


def test_m_basis_matrix_shapes():
    assert m_basis_matrix(3) == [[int(r == c) for c in range(3)] for r in range(3)]
    mat = m_basis_matrix(5)
    for j in (0, 2, 4):
        assert [mat[r][j] for r in range(5)] == [int(r == j) for r in range(5)]
    assert not mat[3][1].is_zero() and not mat[1][3].is_zero()
    with pytest.raises(BadDim):
        m_basis_matrix(2)


def test_scale_free_map_is_not_a_global_rescaling():
    # dropping 1/sqrt2 doubles the pair part of M(4, 3) but leaves the W part alone
    i = Cyclotomic.root(4)
    mat = [[1, 0, 0, 0], [0, 1, 1, 0], [0, i, -i, 0], [0, 0, 0, 1]]
    mapped = slocc_apply(m_state(4, 3), LocalMap([mat] * 3))
    target = mprime_state(4, 3)
    ratios = {mapped[idx] / target[idx] for idx in target.entries if not mapped[idx].is_zero()}
    assert ratios == {1, 2}
    assert mapped != target.scale(2)


def test_ghz_support():
    for d, n in itertools.product(range(2, 5), range(2, 5)):
        assert set(ghz(d, n).entries) == {(j,) * n for j in range(d)}


def test_zero_tensor_builder_guard():
    assert build_tensor((2, 2), []).is_zero()
