import pytest

from tenrank.decompositions import Decomposition, Term, decompose_l, decompose_w, family_decomposition
from tenrank.degeneration import degeneration_maps, family_tensor, verify_degeneration
from tenrank.errors import ArityCapExceeded, ArityMismatch, UnverifiedDecomposition
from tenrank.families import ghz, l_state, m_state, n_state, w_state
from tenrank.rates import Inconclusive, RateOne, rate_lower_bound, rate_one_certificate, schmidt_profile, slocc_from_decomposition
from tenrank.tensor import LocalMap, basis_tensor, slocc_apply

PAIRS = [("l", "m"), ("m", "n"), ("l", "n"), ("ghz", "l"), ("ghz", "m"), ("ghz", "n")]


def test_profiles():
    p = schmidt_profile(ghz(3, 4))
    assert len(p) == 7 and set(p.values()) == {3}
    for make in (l_state, m_state, n_state):
        assert set(schmidt_profile(make(3, 4)).values()) == {3}
    assert set(schmidt_profile(basis_tensor((2,) * 4, (0,) * 4)).values()) == {1}
    with pytest.raises(ArityCapExceeded):
        schmidt_profile(w_state(9))


def test_rate_lower_bound_examples():
    for d, n in ((2, 3), (3, 4)):
        b = rate_lower_bound(ghz(d, n), l_state(d, n))
        assert b.best_pair == (d, d) and b.value_is_at_least_one
    b = rate_lower_bound(ghz(4, 3), ghz(2, 3))
    assert b.best_pair == (2, 4) and not b.value_is_at_least_one
    assert b.display_value == "0.500000"
    b = rate_lower_bound(w_state(3), w_state(3))
    assert b.best_pair == (2, 2) and b.value_is_at_least_one
    with pytest.raises(ArityMismatch):
        rate_lower_bound(w_state(3), w_state(4))


def test_rank_one_source_cuts():
    prod = basis_tensor((2, 2, 2), (0, 0, 0))
    assert rate_lower_bound(prod, prod).value_is_at_least_one
    b = rate_lower_bound(prod, w_state(3))
    assert b.display_value == "inf" and b.value_is_at_least_one


@pytest.mark.parametrize("d,n", [(d, n) for d in (2, 3, 4) for n in (3, 4, 5)])
def test_rate_one_all_pairs(d, n):
    for s, t in PAIRS:
        maps, _ = degeneration_maps(s, t, d, n)
        res = rate_one_certificate(family_tensor(s, d, n), family_tensor(t, d, n), maps)
        assert isinstance(res, RateOne)
        assert res.trace["upper_bound"]["degeneration"]["verified"]
        assert res.trace["lower_bound"]["value_is_at_least_one"]


def test_rate_inconclusive_reports_failing_half():
    # GHZ(2,3) cannot reach GHZ(4,3): Schmidt ranks would have to grow, so the degeneration half fails
    embed = LocalMap([[[1, 0], [0, 1], [0, 0], [0, 0]]] * 3)
    res = rate_one_certificate(ghz(2, 3), ghz(4, 3), embed)
    assert isinstance(res, Inconclusive) and res.trace["failing_half"] == "upper"
    # the reverse restriction is exact, but log 2 / log 4 < 1 sinks the lower half
    project = LocalMap([[[1, 0, 0, 0], [0, 1, 0, 0]]] * 3)
    res = rate_one_certificate(ghz(4, 3), ghz(2, 3), project)
    assert isinstance(res, Inconclusive) and res.trace["failing_halves"] == ["lower"]
    maps, _ = degeneration_maps("l", "m", 3, 3)
    res = rate_one_certificate(l_state(3, 3), n_state(3, 3), maps)
    assert isinstance(res, Inconclusive) and res.trace["failing_halves"] == ["upper"]


def test_profiles_monotone_under_verified_degenerations():
    for d, n in ((2, 3), (3, 3), (3, 4), (4, 3)):
        for s, t in PAIRS:
            maps, _ = degeneration_maps(s, t, d, n)
            verify_degeneration(family_tensor(s, d, n), maps, family_tensor(t, d, n))
            ps, pt = schmidt_profile(family_tensor(s, d, n)), schmidt_profile(family_tensor(t, d, n))
            assert all(pt[k] <= ps[k] for k in ps)


def test_slocc_from_decomposition_examples():
    for n in (3, 4, 5):
        maps = slocc_from_decomposition(w_state(n), decompose_w(n))
        assert slocc_apply(ghz(n, n), maps) == w_state(n)
    maps = slocc_from_decomposition(l_state(3, 3), decompose_l(3, 3))
    assert slocc_apply(ghz(5, 3), maps) == l_state(3, 3)
    prod = basis_tensor((2, 2, 2), (0, 0, 0))
    one = Decomposition((2, 2, 2), [Term(1, ((1, 0),) * 3)])
    assert slocc_apply(ghz(1, 3), slocc_from_decomposition(prod, one)) == prod
    with pytest.raises(UnverifiedDecomposition):
        slocc_from_decomposition(w_state(3), one)


@pytest.mark.parametrize("fam,d,n", [(f, d, n) for f in ("l", "m", "n", "mprime", "nprime") for d, n in ((3, 3), (4, 3), (3, 4))])
def test_slocc_roundtrip_over_corpus(fam, d, n):
    t = family_tensor(fam, d, n)
    dec = family_decomposition(fam, d, n)
    assert slocc_apply(ghz(len(dec), n), slocc_from_decomposition(t, dec)) == t
