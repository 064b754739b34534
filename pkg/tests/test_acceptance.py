"""Acceptance criteria 1-10, one test per criterion.

Each test records a PASS/FAIL line; ``conftest.py`` prints the lines at the end
of the run, and running this file directly prints them as well.  All
comparisons are exact.
"""

from __future__ import annotations

import functools
import itertools
import random
import traceback
from fractions import Fraction

from tenrank.decompositions import (
    decompose_l,
    decompose_m,
    decompose_trivial,
    decompose_w,
    family_decomposition,
    kronecker_product_decomposition,
    tensor_product_decomposition,
    verify_decomposition,
)
from tenrank.degeneration import (
    border_rank_certificate,
    canonical_chain_maps,
    chain_to_n,
    compose_degenerations,
    degeneration_maps,
    eps_decomposition,
    family_eps_decomposition,
    family_tensor,
    ghz_degeneration_from_eps,
    verify_degeneration,
)
from tenrank.families import dicke, ghz, l_state, m_state, mprime_state, n_state, nonsym4, nprime_state, state, w_state
from tenrank.persistence import (
    NotPersistent,
    Persistent,
    block_pyramidal_violations,
    certify_rank,
    decide_persistence_qubits,
    direct_sum_certificate,
    ghz_kron_cert,
    is_pyramidal,
    pyramid_persistence,
    rearrange_decomposition,
)
from tenrank.rates import RateOne, rate_one_certificate, schmidt_profile
from tenrank.scalars import Cyclotomic
from tenrank.tensor import basis_tensor, direct_sum, kronecker_product, tensor_product

RESULTS: dict[int, tuple[bool, str]] = {}


def criterion(k: int, name: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                detail = fn()
            except BaseException as exc:
                RESULTS[k] = (False, f"{name}: {type(exc).__name__}: {exc}")
                raise
            RESULTS[k] = (True, f"{name}: {detail}")

        return run

    return wrap


def summary_lines() -> list[str]:
    return [f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}  {text}" for k, (ok, text) in sorted(RESULTS.items())]


def _exact(t, dec):
    return certify_rank(t, pyramid_persistence(t), dec)


@criterion(1, "rk(W(n)) = n, n = 2..8")
def test_c01_w_rank():
    for n in range(2, 9):
        c = _exact(w_state(n), decompose_w(n))
        assert (c.lower, c.upper) == (n, n), n
    return "lower = upper = n for all seven n"


@criterion(2, "rk(L) = rk(M) = rk(N) = (n-1)(d-1)+1 and rk(Y(n)) = 2n-1")
def test_c02_lmn_ranks():
    checked = 0
    for d in (2, 3, 4, 5):
        for n in (3, 4, 5, 6):
            r = (n - 1) * (d - 1) + 1
            for t, dec in (
                (l_state(d, n), decompose_l(d, n)),
                (m_state(d, n), decompose_m(d, n)),
                (n_state(d, n), decompose_trivial("n", d, n)),
            ):
                c = _exact(t, dec)
                assert (c.lower, c.upper) == (r, r), (d, n, c.lower, c.upper)
                checked += 1
    for n in (3, 4, 5, 6):
        y = state("y", n=n)
        c = _exact(y, family_decomposition("y", 3, n))
        assert (c.lower, c.upper) == (2 * n - 1, 2 * n - 1)
    return f"{checked} family instances and Y(3..6) exact"


@criterion(3, "W(n) kron W(n) = M(4,n) with rank 3n-2, n = 3,4,5")
def test_c03_w_kron_w():
    for n in (3, 4, 5):
        ww = kronecker_product(w_state(n), w_state(n))
        assert ww == m_state(4, n)
        c = _exact(ww, decompose_m(4, n))
        assert (c.lower, c.upper) == (3 * n - 2, 3 * n - 2)
        assert verify_decomposition(ww, kronecker_product_decomposition(decompose_w(n), decompose_w(n)))
    return "identity exact and rank 7, 10, 13"


@criterion(4, "border rank d for L, M', N', M, N; d = 2..4, n = 3..5")
def test_c04_border_ranks():
    for d in (2, 3, 4):
        for n in (3, 4, 5):
            for fam in ("l", "mprime", "nprime", "m", "n"):
                dec = family_eps_decomposition(fam, d, n)
                assert len(dec) == d
                c = border_rank_certificate(family_tensor(fam, d, n), dec)
                assert (c.lower, c.upper) == (d, d), (fam, d, n)
    return "45 certificates with lower = upper = d"


@criterion(5, "L => M => N, GHZ => L, and composed GHZ => N")
def test_c05_degeneration_chain():
    for d in (2, 3, 4):
        for n in (3, 4, 5):
            lm = canonical_chain_maps("L_TO_M", d, n)
            mn = canonical_chain_maps("M_TO_N", d, n)
            assert verify_degeneration(l_state(d, n), lm, m_state(d, n)).verified
            assert verify_degeneration(m_state(d, n), mn, n_state(d, n)).verified
            gl = ghz_degeneration_from_eps(eps_decomposition("l", d, n), n)
            assert verify_degeneration(ghz(d, n), gl, l_state(d, n)).verified
            ln, _ = chain_to_n(d, n)
            assert verify_degeneration(l_state(d, n), ln, n_state(d, n)).verified
            # GHZ => L followed by the composed L => N; reparametrize the first stage
            first = verify_degeneration(ghz(d, n), gl, l_state(d, n))
            second = verify_degeneration(l_state(d, n), ln, n_state(d, n))
            gn, _ = compose_degenerations(gl, first, ln, second)
            assert verify_degeneration(ghz(d, n), gn, n_state(d, n)).verified
    return "all chains verified for 9 (d, n) pairs"


@criterion(6, "rate one for L->M, M->N, L->N, GHZ->L, GHZ->M, GHZ->N")
def test_c06_rates():
    count = 0
    for d in (2, 3, 4):
        for n in (3, 4, 5):
            for s, t in (("l", "m"), ("m", "n"), ("l", "n"), ("ghz", "l"), ("ghz", "m"), ("ghz", "n")):
                maps, _ = degeneration_maps(s, t, d, n)
                res = rate_one_certificate(family_tensor(s, d, n), family_tensor(t, d, n), maps)
                assert isinstance(res, RateOne), (s, t, d, n, res.trace.get("failing_half"))
                count += 1
    return f"{count} RateOne certificates"


@criterion(7, "GHZ(2,3), D(4,2) not persistent; NONSYM4(1,2,+) persistent with witness |1>")
def test_c07_qubit_decisions():
    g = decide_persistence_qubits(ghz(2, 3))
    dk = decide_persistence_qubits(dicke(4, 2))
    assert isinstance(g, NotPersistent) and isinstance(dk, NotPersistent)
    ns = decide_persistence_qubits(nonsym4(1, 2, 1))
    assert isinstance(ns, Persistent)
    assert ["0", "1"] in ns.trace["witnesses"]
    assert ns.trace["candidates"]
    for cand in ns.trace["candidates"]:
        assert "tangle_identity" in cand and "minor_gcds" in cand
    return "decisions reproduced, tangle and minor-gcd subchecks in traces"


@criterion(8, "rk(W3 + W3) = 6 and the five GHZ product identities")
def test_c08_sums_and_products():
    w3 = w_state(3)
    cw = _exact(w3, decompose_w(3))
    s = direct_sum_certificate(w3, cw, w3, cw)
    assert (s.lower, s.upper) == (6, 6)
    checked = 0
    for d in (2, 3):
        for n in (3, 4):
            cases = [(w_state(n), decompose_w(n), n), (m_state(4, n), decompose_m(4, n), 3 * n - 2)]
            for d2 in (3, 4):
                r = (n - 1) * d2 - n + 2
                cases += [
                    (l_state(d2, n), decompose_l(d2, n), r),
                    (m_state(d2, n), decompose_m(d2, n), r),
                    (n_state(d2, n), decompose_trivial("n", d2, n), r),
                ]
            for p, dec, rp in cases:
                pc = _exact(p, dec)
                for mode, prod in (("kron", kronecker_product), ("tensor", tensor_product)):
                    c = ghz_kron_cert(p, pc, d, mode)
                    assert (c.lower, c.upper) == (d * rp, d * rp), (p.shape, d, mode)
                    assert verify_decomposition(prod(ghz(d, n), p), c.decomposition)
                    checked += 1
    return f"W3 + W3 = 6 and {checked} product ranks, including d(3n-2)"


@criterion(9, "property suites")
def test_c09_properties():
    rng = random.Random(2024)

    def rand_cyc():
        m = rng.choice([3, 4, 5, 8, 12])
        return Cyclotomic(m, {rng.randrange(m): Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)})

    for _ in range(60):
        x, y, z = rand_cyc(), rand_cyc(), rand_cyc()
        assert x * (y + z) == x * y + x * z and (x * y) * z == x * (y * z) and x + y == y + x
        if not x.is_zero():
            assert x * x.inverse() == 1

    pairs = [(w_state(3), decompose_w(3)), (l_state(3, 3), decompose_l(3, 3)), (n_state(3, 3), decompose_trivial("n", 3, 3))]
    for (a, da), (b, db) in itertools.product(pairs, repeat=2):
        kd, td = kronecker_product_decomposition(da, db), tensor_product_decomposition(da, db)
        assert verify_decomposition(kronecker_product(a, b), kd) and verify_decomposition(tensor_product(a, b), td)
        assert len(kd) <= len(td) <= len(da) * len(db)

    for d, n in ((2, 3), (3, 3), (3, 4), (4, 3)):
        for s, t in (("l", "m"), ("m", "n"), ("l", "n"), ("ghz", "l"), ("ghz", "n")):
            maps, _ = degeneration_maps(s, t, d, n)
            assert verify_degeneration(family_tensor(s, d, n), maps, family_tensor(t, d, n)).verified
            ps, pt = schmidt_profile(family_tensor(s, d, n)), schmidt_profile(family_tensor(t, d, n))
            assert all(pt[c] <= ps[c] for c in ps)

    for d, n in ((3, 3), (3, 4), (4, 3), (4, 4)):
        for fam in ("l", "m", "n"):
            t = family_tensor(fam, d, n)
            dec = family_decomposition(fam, d, n)
            order = rearrange_decomposition(t, dec, pyramid_persistence(t))
            assert sorted(order) == list(range(len(dec)))

    built = [(w_state(3), w_state(3)), (ghz(2, 3), w_state(3)), (l_state(3, 3), n_state(3, 3)), (ghz(3, 4), m_state(3, 4))]
    for a, b in built:
        split = list(zip(a.shape, b.shape))
        q = direct_sum(a, b)
        assert block_pyramidal_violations(q, split) == []
        bad = (0,) * (q.arity - 2) + (a.shape[-2], 0)
        assert block_pyramidal_violations(q + basis_tensor(q.shape, bad), split) == [bad]
    assert verify_decomposition(mprime_state(4, 3), family_decomposition("mprime", 4, 3))
    assert verify_decomposition(nprime_state(3, 4), family_decomposition("nprime", 3, 4))
    return "field axioms, rank chain, monotonicity, rearrangement, block checker"


@criterion(10, "Kronecker pyramid probe (evidence only)")
def test_c10_probe():
    log = []
    for n in (3, 4, 5):
        for label, a, b in (("W kron W", w_state(n), w_state(n)), ("L2 kron L3", l_state(2, n), l_state(3, n))):
            log.append(f"{label} n={n}: {'pyramid' if is_pyramidal(kronecker_product(a, b)) else 'not pyramid'}")
    # non-assertive: outcomes are logged as evidence, only the run itself is checked
    assert len(log) == 6
    return "conjecture evidence only; " + "; ".join(log)


if __name__ == "__main__":
    for fn in [v for k, v in sorted(globals().items()) if k.startswith("test_c")]:
        try:
            fn()
        except BaseException:
            traceback.print_exc()
    print("\n".join(summary_lines()))
