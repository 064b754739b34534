"""Acceptance corpus run by ``tenrank selftest``.

Each check returns ``(passed, detail)``.  The pytest acceptance suite covers
the same ground independently; this module exists so an installed package
can check itself without the test tree.
"""

from __future__ import annotations

from typing import Callable

from .decompositions import (
    decompose_l,
    decompose_m,
    decompose_trivial,
    decompose_w,
    family_decomposition,
)
from .degeneration import (
    border_rank_certificate,
    degeneration_maps,
    family_eps_decomposition,
    family_tensor,
    verify_degeneration,
)
from .families import dicke, ghz, l_state, m_state, n_state, nonsym4, w_state
from .persistence import (
    Persistent,
    certify_rank,
    decide_persistence_qubits,
    direct_sum_certificate,
    ghz_kron_cert,
    block_pyramidal_violations,
    is_pyramidal,
    pyramid_persistence,
    rearrange_decomposition,
)
from .rates import rate_one_certificate, schmidt_profile
from .tensor import basis_tensor, direct_sum, kronecker_product

Check = Callable[[], tuple[bool, str]]


def _exact(t, dec) -> tuple[int, int | None]:
    c = certify_rank(t, pyramid_persistence(t), dec)
    return c.lower, c.upper


def check_w() -> tuple[bool, str]:
    bad = [n for n in range(2, 9) if _exact(w_state(n), decompose_w(n)) != (n, n)]
    return not bad, f"failing n: {bad}" if bad else "rk(W(n)) = n for n = 2..8"


def check_lmn() -> tuple[bool, str]:
    bad = []
    for d in (2, 3, 4, 5):
        for n in (3, 4, 5, 6):
            r = (n - 1) * (d - 1) + 1
            for fam, make in (("l", l_state), ("m", m_state), ("n", n_state)):
                if _exact(make(d, n), family_decomposition(fam, d, n)) != (r, r):
                    bad.append((fam, d, n))
    for n in (3, 4, 5, 6):
        if _exact(l_state(3, n), decompose_l(3, n)) != (2 * n - 1, 2 * n - 1):
            bad.append(("y", 3, n))
    return not bad, f"failing: {bad}" if bad else "L, M, N exact for d 2..5, n 3..6; Y(n) = 2n-1"


def check_ww() -> tuple[bool, str]:
    bad = []
    for n in (3, 4, 5):
        t = kronecker_product(w_state(n), w_state(n))
        if t != m_state(4, n) or _exact(t, decompose_m(4, n)) != (3 * n - 2, 3 * n - 2):
            bad.append(n)
    return not bad, f"failing n: {bad}" if bad else "W(n) kron W(n) = M(4, n) with rank 3n-2"


def check_border() -> tuple[bool, str]:
    bad = []
    for d in (2, 3, 4):
        for n in (3, 4, 5):
            for fam in ("l", "mprime", "nprime", "m", "n"):
                c = border_rank_certificate(family_tensor(fam, d, n), family_eps_decomposition(fam, d, n))
                if (c.lower, c.upper) != (d, d):
                    bad.append((fam, d, n))
    return not bad, f"failing: {bad}" if bad else "border rank d for L, M', N', M, N"


def check_chain() -> tuple[bool, str]:
    bad = []
    for d in (2, 3, 4):
        for n in (3, 4, 5):
            for s, t in (("l", "m"), ("m", "n"), ("ghz", "l"), ("ghz", "n")):
                maps, _ = degeneration_maps(s, t, d, n)
                if not verify_degeneration(family_tensor(s, d, n), maps, family_tensor(t, d, n)).verified:
                    bad.append((s, t, d, n))
    return not bad, f"failing: {bad}" if bad else "L -> M -> N and GHZ -> L, GHZ -> N verified"


def check_rates() -> tuple[bool, str]:
    bad = []
    for d in (2, 3, 4):
        for n in (3, 4, 5):
            for s, t in (("l", "m"), ("m", "n"), ("l", "n"), ("ghz", "l"), ("ghz", "m"), ("ghz", "n")):
                maps, _ = degeneration_maps(s, t, d, n)
                if not rate_one_certificate(family_tensor(s, d, n), family_tensor(t, d, n), maps).rate_one:
                    bad.append((s, t, d, n))
    return not bad, f"failing: {bad}" if bad else "rate one for all six pairs"


def check_qubits() -> tuple[bool, str]:
    g = decide_persistence_qubits(ghz(2, 3))
    dk = decide_persistence_qubits(dicke(4, 2))
    ns = decide_persistence_qubits(nonsym4(1, 2, 1))
    ok = (
        not g.persistent
        and not dk.persistent
        and isinstance(ns, Persistent)
        and ["0", "1"] in ns.trace["witnesses"]
        and all("tangle_identity" in c and "minor_gcds" in c for c in ns.trace["candidates"])
    )
    return ok, "GHZ(2,3), D(4,2) not persistent; NONSYM4(1,2,+) persistent with |1> a witness"


def check_sums() -> tuple[bool, str]:
    w3 = w_state(3)
    cw = certify_rank(w3, pyramid_persistence(w3), decompose_w(3))
    s = direct_sum_certificate(w3, cw, w3, cw)
    bad = [] if (s.lower, s.upper) == (6, 6) else ["W3 + W3"]
    cases = []
    for d in (2, 3):
        for n in (3, 4):
            cases.append((w_state(n), decompose_w(n), d, n * d))
            cases.append((m_state(4, n), decompose_m(4, n), d, (3 * n - 2) * d))
            for d2 in (3, 4):
                r = (n - 1) * (d2 - 1) + 1
                cases.append((l_state(d2, n), decompose_l(d2, n), d, d * r))
                cases.append((m_state(d2, n), decompose_m(d2, n), d, d * r))
                cases.append((n_state(d2, n), decompose_trivial("n", d2, n), d, d * r))
    for p, dec, d, want in cases:
        pc = certify_rank(p, pyramid_persistence(p), dec)
        for mode in ("kron", "tensor"):
            c = ghz_kron_cert(p, pc, d, mode)
            if (c.lower, c.upper) != (want, want):
                bad.append((p.shape, d, mode))
    return not bad, f"failing: {bad}" if bad else f"W3+W3 = 6 and {len(cases) * 2} GHZ product identities"


def check_properties() -> tuple[bool, str]:
    bad = []
    for d, n in ((3, 3), (3, 4), (4, 3)):
        for fam in ("l", "m", "n"):
            t = family_tensor(fam, d, n)
            try:
                rearrange_decomposition(t, family_decomposition(fam, d, n), pyramid_persistence(t))
            except Exception:
                bad.append(("rearrange", fam, d, n))
        for s, tgt in (("l", "m"), ("m", "n")):
            maps, _ = degeneration_maps(s, tgt, d, n)
            ps, pt = schmidt_profile(family_tensor(s, d, n)), schmidt_profile(family_tensor(tgt, d, n))
            if any(pt[k] > ps[k] for k in ps):
                bad.append(("monotone", s, tgt, d, n))
    w3 = w_state(3)
    if block_pyramidal_violations(direct_sum(w3, w3), [(2, 2)] * 3):
        bad.append("block checker rejects W3 + W3")
    mutated = direct_sum(w3, w3) + basis_tensor((4, 4, 4), (0, 3, 0))
    if not block_pyramidal_violations(mutated, [(2, 2)] * 3):
        bad.append("block checker accepts a mutated sum")
    return not bad, f"failing: {bad}" if bad else "rearrangement, flattening monotonicity, block checker"


def check_probe() -> tuple[bool, str]:
    seen = []
    for n in (3, 4, 5):
        for a, b, label in ((w_state(n), w_state(n), "W kron W"), (l_state(2, n), l_state(3, n), "L2 kron L3")):
            seen.append((label, n, is_pyramidal(kronecker_product(a, b))))
    # non-assertive: outcomes are evidence, not certificates
    return True, "conjecture evidence only: " + ", ".join(f"{lab} n={n}: {'pyramid' if x else 'no'}" for lab, n, x in seen)


CHECKS: dict[int, tuple[str, Check]] = {
    1: ("W rank", check_w),
    2: ("L, M, N, Y ranks", check_lmn),
    3: ("W kron W", check_ww),
    4: ("border ranks", check_border),
    5: ("degeneration chain", check_chain),
    6: ("rate one", check_rates),
    7: ("qubit persistence decisions", check_qubits),
    8: ("direct sums and GHZ products", check_sums),
    9: ("property spot checks", check_properties),
    10: ("Kronecker pyramid probe", check_probe),
}


def run(selected: list[int] | None = None) -> list[tuple[int, str, bool, str]]:
    out = []
    for k, (name, fn) in CHECKS.items():
        if selected and k not in selected:
            continue
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, reported with its type
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((k, name, ok, detail))
    return out
