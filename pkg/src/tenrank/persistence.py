"""Persistence certification and the rank lower bounds built on it.

Three regimes are kept apart: an exact sufficient condition on the support
(pyramid shape), an exact decision for two-level factors with arity at most
four, and sampling-based screening whose positive answers are never used
as certificates.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Sequence

from .decompositions import (
    Decomposition,
    decompose_trivial,
    direct_sum_decomposition,
    kronecker_product_decomposition,
    tensor_product_decomposition,
    verify_decomposition,
)
from .errors import (
    CertificateSubjectMismatch,
    DimMismatch,
    NotApplicable,
    NotBlockPyramidal,
    NotMinimalRank,
    RearrangementFailed,
    ShapeMismatch,
    UnsupportedArity,
    UnverifiedDecomposition,
    WeakCertificate,
)
from .families import ghz
from .linalg import independent_subset, matrix_rank, solve
from .scalars import Cyclotomic, format_scalar, is_zero, to_cyc
from .serialize import tensor_digest
from .tensor import Tensor, _finish, contract, direct_sum, is_concise, kronecker_product, mode_rank, tensor_product


class Method(str, Enum):
    PYRAMID = "PYRAMID"
    EXACT_QUBIT = "EXACT_QUBIT"
    SCREENED = "SCREENED"


def _fmt_vec(v: Sequence[object]) -> list[str]:
    return [format_scalar(x) for x in v]


@dataclass
class PersistenceCertificate:
    method: Method
    witness_chain: list[tuple]
    subject: str
    diagnostics: dict = field(default_factory=dict)
    samples: int = 0

    @property
    def conclusive(self) -> bool:
        return self.method is not Method.SCREENED

    def to_obj(self) -> dict[str, Any]:
        return {
            "method": self.method.value,
            "conclusive": self.conclusive,
            "subject": self.subject,
            "witness_chain": [_fmt_vec(e) for e in self.witness_chain],
            "samples": self.samples,
            "diagnostics": _jsonable(self.diagnostics),
        }


@dataclass
class RankCertificate:
    lower: int
    subject: str
    trace: dict = field(default_factory=dict)
    upper: int | None = None
    decomposition: Decomposition | None = None
    persistence: PersistenceCertificate | None = None

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper:
            raise ArithmeticError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    def with_upper(self, t: Tensor, dec: Decomposition) -> RankCertificate:
        if not verify_decomposition(t, dec):
            raise UnverifiedDecomposition("decomposition does not sum to the subject tensor")
        if tensor_digest(t) != self.subject:
            raise CertificateSubjectMismatch("decomposition subject differs from certificate subject")
        return RankCertificate(self.lower, self.subject, self.trace, len(dec), dec, self.persistence)

    def to_obj(self) -> dict[str, Any]:
        out = {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "subject": self.subject,
            "trace": _jsonable(self.trace),
        }
        if self.persistence is not None:
            out["persistence"] = self.persistence.to_obj()
        return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, Enum):
        return x.value
    return format_scalar(x) if isinstance(x, (Fraction, Cyclotomic)) else str(x)


# ---------------------------------------------------------------- pyramid


def pyramid_persistence(t: Tensor) -> PersistenceCertificate:
    """Certificate from the pyramid support pattern, or NotApplicable."""
    n = t.arity
    d = t.shape[0]
    if n < 2 or any(x != d for x in t.shape):
        raise NotApplicable(f"pyramid check needs equal local dims, got {t.shape}")
    if t.kind != "cyc":
        raise NotApplicable("pyramid check needs cyclotomic entries")
    bad = next((idx for idx in t.entries if sum(idx) >= d), None)
    if bad is not None:
        raise NotApplicable(f"support entry {bad} has index sum >= {d}")
    checked = set()
    for i in range(n - 1):
        for j in range(d):
            idx = [0] * n
            idx[n - i - 2] = j
            idx[n - 1] = d - j - 1
            idx = tuple(idx)
            if idx not in t.entries:
                raise NotApplicable(f"coefficient at {idx} vanishes")
            checked.add(idx)
    zero = tuple(int(k == 0) for k in range(d))
    return PersistenceCertificate(
        Method.PYRAMID,
        [zero] * (n - 2),
        tensor_digest(t),
        {"checked_positions": len(checked), "support_bound": d},
    )


def is_pyramidal(t: Tensor) -> bool:
    try:
        pyramid_persistence(t)
        return True
    except NotApplicable:
        return False


# ---------------------------------------------------------------- qubits


def _hyperdet(a):
    """Cayley hyperdeterminant of a 2x2x2 array given as a callable a(i, j, k)."""
    a000, a001, a010, a011 = a(0, 0, 0), a(0, 0, 1), a(0, 1, 0), a(0, 1, 1)
    a100, a101, a110, a111 = a(1, 0, 0), a(1, 0, 1), a(1, 1, 0), a(1, 1, 1)
    sq = (a000 * a111) ** 2 + (a001 * a110) ** 2 + (a010 * a101) ** 2 + (a100 * a011) ** 2
    cross = (
        a000 * a001 * a110 * a111
        + a000 * a010 * a101 * a111
        + a000 * a100 * a011 * a111
        + a001 * a010 * a101 * a110
        + a001 * a100 * a011 * a110
        + a010 * a100 * a011 * a101
    )
    quad = a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111
    return sq - 2 * cross + 4 * quad


def tangle3(t: Tensor) -> Cyclotomic:
    if t.shape != (2, 2, 2):
        raise ShapeMismatch(f"tangle needs shape (2, 2, 2), got {t.shape}")
    return to_cyc(_hyperdet(lambda i, j, k: t[(i, j, k)]))


@dataclass
class Persistent:
    certificate: PersistenceCertificate
    trace: dict

    persistent = True


@dataclass
class NotPersistent:
    trace: dict
    conclusive: bool = True

    persistent = False


def dual_covector(e: Sequence[object]) -> list:
    """A covector f with f(e) = 1 supported on the first nonzero coordinate of e."""
    k = next(i for i, x in enumerate(e) if not is_zero(x))
    inv = to_cyc(e[k]).inverse()
    return [inv if i == k else 0 for i in range(len(e))]


def _det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _slice_pencil(t: Tensor):
    """Coefficients (a, b, c) of det(x P0 + y P1) = a x^2 + b xy + c y^2 for slices along factor 0."""
    p0 = [[t[(0, j, k)] for k in range(2)] for j in range(2)]
    p1 = [[t[(1, j, k)] for k in range(2)] for j in range(2)]
    a, c = _det2(p0), _det2(p1)
    s = [[p0[j][k] + p1[j][k] for k in range(2)] for j in range(2)]
    b = _det2(s) - a - c
    return to_cyc(a), to_cyc(b), to_cyc(c)


def _decide3(t: Tensor) -> Persistent | NotPersistent:
    trace: dict[str, Any] = {"arity": 3}
    if not is_concise(t, 0):
        trace["reason"] = "not 1-concise"
        return NotPersistent(trace)
    a, b, c = _slice_pencil(t)
    disc = b * b - 4 * a * c
    tau = tangle3(t)
    trace.update({"pencil": [str(a), str(b), str(c)], "discriminant": str(disc), "tangle": str(tau)})
    if a.is_zero() and b.is_zero() and c.is_zero():
        trace["reason"] = "every contraction is singular"
        return NotPersistent(trace)
    if not tau.is_zero():
        trace["reason"] = "tangle nonzero: two distinct singular contractions (GHZ class)"
        return NotPersistent(trace)
    # double root f* of the pencil; the witness spans its kernel
    if a.is_zero():
        e = (Cyclotomic(), Cyclotomic.rational(1))
    else:
        e = (Cyclotomic.rational(1), b * (2 * a).inverse())
    trace["assumption"] = "concise with vanishing hyperdeterminant is the W class"
    trace["witness"] = _fmt_vec(e)
    cert = PersistenceCertificate(Method.EXACT_QUBIT, [e], tensor_digest(t), trace)
    return Persistent(cert, trace)


def _sympy_tensor(t: Tensor):
    import sympy

    out = {}
    for idx, v in t.entries.items():
        q = v.as_rational()
        if q is None:
            raise NotApplicable("four-qubit decision supports rational entries only")
        out[idx] = sympy.Rational(q.numerator, q.denominator)
    return out


def _flatten_minors(get, mode: int):
    """2x2 minors of the mode flattening of a 2x2x2 array."""
    import itertools

    rows = []
    for j in range(2):
        row = []
        for rest in itertools.product(range(2), repeat=2):
            idx = list(rest)
            idx.insert(mode, j)
            row.append(get(*idx))
        rows.append(row)
    return [rows[0][p] * rows[1][q] - rows[0][q] * rows[1][p] for p, q in itertools.combinations(range(4), 2)]


def _poly_gcd(polys, gens):
    import sympy

    g = sympy.Integer(0)
    for p in polys:
        g = sympy.gcd(g, sympy.expand(p))
    return sympy.Poly(g, *gens) if g != 0 else None


def _check_line(arr, e, t_sym):
    """Decide the three-qubit condition for every f with f(e) = 1, as identities in t."""
    import sympy

    base = dual_covector(e)
    k = next(i for i, x in enumerate(e) if not is_zero(x))
    g = [-e[1], e[0]] if k == 0 else [1, 0]
    fb = [sympy.Rational(to_cyc(x).as_rational().numerator, to_cyc(x).as_rational().denominator) for x in base]
    gs = [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in
          [to_cyc(y).as_rational() for y in g]]
    f = [fb[i] + t_sym * gs[i] for i in range(2)]

    def get(i, j, l):
        return sympy.expand(f[0] * arr.get((0, i, j, l), 0) + f[1] * arr.get((1, i, j, l), 0))

    tau = sympy.expand(_hyperdet(get))
    gcds = []
    concise = True
    for mode in range(3):
        gpoly = _poly_gcd(_flatten_minors(get, mode), (t_sym,))
        if gpoly is None or gpoly.degree() > 0:
            concise = False
        gcds.append("0" if gpoly is None else str(gpoly.as_expr()))
    return {
        "e": [str(x) for x in e],
        "tangle_in_t": str(tau),
        "tangle_identity": tau == 0,
        "minor_gcds": gcds,
        "concise_for_all_t": concise,
        "ok": tau == 0 and concise,
    }


def _decide4(t: Tensor, extra: Sequence[Sequence[object]]) -> Persistent | NotPersistent:
    import sympy

    arr = _sympy_tensor(t)
    trace: dict[str, Any] = {"arity": 4}
    if not is_concise(t, 0):
        trace["reason"] = "not 1-concise"
        return NotPersistent(trace)
    f0, f1, tt = sympy.symbols("f0 f1 t")

    def hom(i, j, l):
        return f0 * arr.get((0, i, j, l), 0) + f1 * arr.get((1, i, j, l), 0)

    form = sympy.expand(_hyperdet(hom))
    trace["tangle_form"] = str(form)
    candidates: list[tuple] = []
    bad_points = []
    for mode in range(3):
        gpoly = _poly_gcd(_flatten_minors(hom, mode), (f0, f1))
        if gpoly is None:
            bad_points.append("all")
            continue
        for fac, _ in sympy.factor_list(gpoly.as_expr())[1]:
            p = sympy.Poly(fac, f0, f1)
            if p.total_degree() == 1:
                # the linear form a f0 + b f1 vanishes exactly on covectors annihilating e = (a, b)
                e = (Fraction(str(p.coeff_monomial(f0))), Fraction(str(p.coeff_monomial(f1))))
                candidates.append(e)
                bad_points.append(str(fac))
            elif p.total_degree() > 1:
                bad_points.append(str(fac))
    trace["singular_contractions"] = bad_points
    candidates = [tuple(Fraction(to_cyc(x).as_rational()) for x in v) for v in extra] + candidates + [(1, 0), (0, 1)]
    seen, uniq = [], []
    for e in candidates:
        if all(x == 0 for x in e):
            continue
        k = next(i for i, x in enumerate(e) if x != 0)
        key = tuple(Fraction(x) / Fraction(e[k]) for x in e)
        if key not in seen:
            seen.append(key)
            uniq.append(tuple(to_cyc(x) for x in key))
    checks = [_check_line(arr, e, tt) for e in uniq]
    trace["candidates"] = checks
    winners = [e for e, c in zip(uniq, checks) if c["ok"]]
    if not winners:
        if form != 0:
            trace["reason"] = "tangle form not identically zero: cofinitely many contractions fail"
        else:
            trace["reason"] = "no witness in candidate set"
        return NotPersistent(trace, conclusive=form != 0 or len(set(bad_points)) > 1)
    e = winners[0]
    sub = _decide3(contract(t, 0, dual_covector(e)))
    if not isinstance(sub, Persistent):
        raise AssertionError("witness line check and contraction disagree")
    trace["witnesses"] = [_fmt_vec(w) for w in winners]
    trace["contraction"] = sub.trace
    cert = PersistenceCertificate(Method.EXACT_QUBIT, [e] + sub.certificate.witness_chain, tensor_digest(t), trace)
    return Persistent(cert, trace)


def decide_persistence_qubits(t: Tensor, candidates: Sequence[Sequence[object]] = ()) -> Persistent | NotPersistent:
    n = t.arity
    if n >= 5 or n < 2:
        raise UnsupportedArity(f"exact decision covers arity 2..4, got {n}")
    if any(d != 2 for d in t.shape):
        raise DimMismatch(f"exact decision needs two-level factors, got {t.shape}")
    if n == 2:
        r = mode_rank(t, 0)
        trace = {"arity": 2, "matrix_rank": r}
        if r == 2:
            return Persistent(PersistenceCertificate(Method.EXACT_QUBIT, [], tensor_digest(t), trace), trace)
        trace["reason"] = "not 1-concise"
        return NotPersistent(trace)
    if n == 3:
        return _decide3(t)
    return _decide4(t, candidates)


# ---------------------------------------------------------------- screening


class ScreenOutcome(str, Enum):
    LIKELY_PERSISTENT = "LikelyPersistent"
    INCONCLUSIVE = "Inconclusive"
    NOT_PERSISTENT_EVIDENCE = "NotPersistentEvidence"


@dataclass
class ScreenResult:
    outcome: ScreenOutcome
    certificate: PersistenceCertificate | None
    trace: dict


def _rand_rat(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


def _screen(t: Tensor, trials: int, rng: random.Random, counter: list[int]) -> tuple[ScreenOutcome, list, dict]:
    if t.is_zero() or not is_concise(t, 0):
        return ScreenOutcome.NOT_PERSISTENT_EVIDENCE, [], {"reason": "not 1-concise"}
    if t.arity == 2:
        return ScreenOutcome.LIKELY_PERSISTENT, [], {}
    d = t.shape[0]
    inner = max(2, trials // 4)
    bases = [[[int(i == j) for j in range(d)] for i in range(d)]]
    for _ in range(2):
        while True:
            m = [[_rand_rat(rng) for _ in range(d)] for _ in range(d)]
            if matrix_rank(m) == d:
                break
        bases.append(m)
    for b, rows in enumerate(bases):
        if not any(_screen(contract(t, 0, f), inner, rng, counter)[0] is ScreenOutcome.LIKELY_PERSISTENT for f in rows):
            return ScreenOutcome.NOT_PERSISTENT_EVIDENCE, [], {"reason": "no persistent slice", "basis": b}
    for k in range(d):
        e = tuple(int(i == k) for i in range(d))
        ok, chain = True, []
        for _ in range(trials):
            f = [_rand_rat(rng) for _ in range(d)]
            f[k] = Fraction(1)
            counter[0] += 1
            out, sub_chain, _ = _screen(contract(t, 0, f), inner, rng, counter)
            if out is not ScreenOutcome.LIKELY_PERSISTENT:
                ok = False
                break
            chain = chain or sub_chain
        if ok:
            return ScreenOutcome.LIKELY_PERSISTENT, [e] + chain, {"witness": k}
    return ScreenOutcome.INCONCLUSIVE, [], {"reason": "no basis witness survived sampling"}


def screen_persistence(t: Tensor, trials: int = 20, seed: int | None = None) -> ScreenResult:
    """Randomized, non-conclusive persistence screening."""
    if seed is None:
        seed = int(os.environ.get("TENRANK_SEED", "0"))
    rng = random.Random(seed)
    counter = [0]
    outcome, chain, trace = _screen(t, trials, rng, counter)
    trace = dict(trace, seed=seed, trials=trials, sampled_covectors=counter[0])
    cert = None
    if outcome is ScreenOutcome.LIKELY_PERSISTENT:
        cert = PersistenceCertificate(Method.SCREENED, chain, tensor_digest(t), trace, samples=counter[0])
    return ScreenResult(outcome, cert, trace)


# ---------------------------------------------------------------- lower bounds


def _persistent_bound(ranks: Sequence[int]) -> int:
    return sum(r - 1 for r in ranks[:-1]) + 1


def persistent_lower_bound(t: Tensor, cert: PersistenceCertificate) -> RankCertificate:
    if not cert.conclusive:
        raise WeakCertificate("screened certificates cannot support rank bounds")
    digest = tensor_digest(t)
    if cert.subject != digest:
        raise CertificateSubjectMismatch("certificate was issued for a different tensor")
    n = t.arity
    ranks = [mode_rank(t, k) for k in range(n)]
    steps = []
    cur = t
    for level in range(n - 2):
        e = cert.witness_chain[level]
        f = dual_covector(e)
        steps.append({
            "level": level,
            "witness": _fmt_vec(e),
            "covector": _fmt_vec(f),
            "dim": ranks[level],
            "zeroed": ranks[level] - 1,
        })
        cur = contract(cur, 0, f)
        if mode_rank(cur, 0) != ranks[level + 1]:
            raise WeakCertificate(f"witness chain does not replay at level {level}")
    steps.append({"level": n - 2, "base_matrix_rank": ranks[n - 2]})
    lower = _persistent_bound(ranks)
    trace = {
        "theorem": "persistent tensor bound",
        "method": cert.method.value,
        "mode_ranks": ranks,
        "bound": f"sum(d_k - 1) + 1 over the first {n - 1} factors",
        "substitution_steps": steps,
    }
    return RankCertificate(lower, digest, trace, persistence=cert)


def flattening_lower_bound(t: Tensor) -> RankCertificate:
    ranks = [mode_rank(t, k) for k in range(t.arity)]
    return RankCertificate(max(ranks), tensor_digest(t), {"theorem": "flattening rank", "mode_ranks": ranks})


def certify_rank(t: Tensor, cert: PersistenceCertificate, dec: Decomposition | None = None) -> RankCertificate:
    rc = persistent_lower_bound(t, cert)
    return rc.with_upper(t, dec) if dec is not None else rc


def _block(q: Tensor, lo: Sequence[int], hi: Sequence[int]) -> Tensor:
    acc = {}
    for idx, v in q.entries.items():
        if all(a <= j < b for j, a, b in zip(idx, lo, hi)):
            acc[tuple(j - a for j, a in zip(idx, lo))] = v
    return _finish(tuple(b - a for a, b in zip(lo, hi)), acc, q.kind)


def block_pyramidal_violations(q: Tensor, split: Sequence[tuple[int, int]]) -> list[tuple]:
    u = [a for a, _ in split]
    return [
        idx for idx in sorted(q.entries)
        if not (all(j < a for j, a in zip(idx, u)) or idx[-1] >= u[-1])
    ]


def composite_lower_bound(
    q: Tensor,
    split: Sequence[tuple[int, int]],
    head_cert: RankCertificate,
    step_cert: PersistenceCertificate,
) -> RankCertificate:
    """Bound for a block pyramidal tensor from its head rank and persistent step block."""
    split = [tuple(s) for s in split]
    if len(split) != q.arity or any(a + b != d or a < 0 or b < 1 for (a, b), d in zip(split, q.shape)):
        raise ShapeMismatch(f"split {split} does not match shape {q.shape}")
    bad = block_pyramidal_violations(q, split)
    if bad:
        raise NotBlockPyramidal(f"support entry {bad[0]} lies outside the block pyramidal pattern")
    if not step_cert.conclusive:
        raise WeakCertificate("screened certificates cannot support rank bounds")
    u = [a for a, _ in split]
    head = _block(q, [0] * q.arity, u)
    step = _block(q, u, q.shape)
    if head_cert.subject != tensor_digest(head):
        raise CertificateSubjectMismatch("head certificate does not match the head block")
    if step_cert.subject != tensor_digest(step):
        raise CertificateSubjectMismatch("step certificate does not match the step block")
    step_ranks = [mode_rank(step, k) for k in range(step.arity)]
    gain = _persistent_bound(step_ranks)
    trace = {
        "theorem": "block pyramidal bound",
        "split": [list(s) for s in split],
        "head": {"subject": head_cert.subject, "lower": head_cert.lower},
        "step": {"subject": step_cert.subject, "method": step_cert.method.value, "mode_ranks": step_ranks},
        "gain": gain,
    }
    return RankCertificate(head_cert.lower + gain, tensor_digest(q), trace)


def ghz_kron_cert(p: Tensor, p_cert: RankCertificate, d: int, mode: str = "kron") -> RankCertificate:
    """Exact rank of GHZ(d, n) combined with a minimal-rank persistent p."""
    if mode not in ("kron", "tensor"):
        raise ValueError(f"mode must be 'kron' or 'tensor', got {mode!r}")
    if p_cert.subject != tensor_digest(p):
        raise CertificateSubjectMismatch("certificate was issued for a different tensor")
    n = p.arity
    ranks = [mode_rank(p, k) for k in range(n)]
    minimal = _persistent_bound(ranks)
    if not (p_cert.exact and p_cert.lower == minimal) or p_cert.persistence is None:
        raise NotMinimalRank(f"need an exact certificate with rank {minimal}")
    r = p_cert.lower
    # G(d, n) kron p is literally the d-fold block diagonal sum of p in our index order
    q, cert = p, p_cert
    chain = [cert.lower]
    for _ in range(1, d):
        split = [(a, b) for a, b in zip(q.shape, p.shape)]
        q = direct_sum(q, p)
        cert = composite_lower_bound(q, split, cert, p_cert.persistence)
        chain.append(cert.lower)
    g = ghz(d, n)
    kron = kronecker_product(g, p)
    if kron != q:
        raise AssertionError("block structure of the Kronecker product differs from the direct sum")
    gdec = decompose_trivial("ghz", d, n)
    if mode == "kron":
        target, dec = kron, kronecker_product_decomposition(gdec, p_cert.decomposition)
    else:
        target, dec = tensor_product(g, p), tensor_product_decomposition(gdec, p_cert.decomposition)
    if not verify_decomposition(target, dec):
        raise UnverifiedDecomposition("replicated decomposition does not verify")
    trace = {
        "theorem": "GHZ product multiplicativity",
        "mode": mode,
        "d": d,
        "factor_rank": r,
        "direct_sum_chain": chain,
        "grouping": "tensor product groups to the Kronecker product" if mode == "tensor" else None,
    }
    return RankCertificate(cert.lower, tensor_digest(target), trace, upper=len(dec), decomposition=dec)


def direct_sum_certificate(a: Tensor, a_cert: RankCertificate, p: Tensor, p_cert: RankCertificate) -> RankCertificate:
    """Certificate for a (+) p with p persistent; carries an upper bound when both inputs do."""
    q = direct_sum(a, p)
    split = list(zip(a.shape, p.shape))
    cert = composite_lower_bound(q, split, a_cert, p_cert.persistence)
    if a_cert.decomposition is not None and p_cert.decomposition is not None:
        cert = cert.with_upper(q, direct_sum_decomposition(a_cert.decomposition, p_cert.decomposition))
    return cert


# ---------------------------------------------------------------- rearrangement


def _level_witness(t: Tensor, fallback):
    try:
        return pyramid_persistence(t).witness_chain[0]
    except NotApplicable:
        pass
    if all(x == 2 for x in t.shape) and 3 <= t.arity <= 4:
        try:
            res = decide_persistence_qubits(t)
        except NotApplicable:
            res = None
        if isinstance(res, Persistent):
            return res.certificate.witness_chain[0]
    if fallback is not None:
        return fallback
    raise RearrangementFailed(f"no witness available for a contraction of shape {t.shape}")


def _rearrange(t: Tensor, items: list[tuple[int, object, tuple]], witness, chain_rest) -> list[int]:
    vecs = [it[2][0] for it in items]
    basis = independent_subset(vecs)
    if t.arity == 2:
        rest = [i for i in range(len(items)) if i not in basis]
        return [items[i][0] for i in basis + rest]
    cols = [[vecs[b][r] for b in basis] for r in range(len(vecs[0]))]
    coords = solve(cols, list(witness))
    if coords is None:
        raise RearrangementFailed("witness lies outside the span of the first-factor vectors")
    nz = [k for k, c in enumerate(coords) if not c.is_zero()]
    if not nz:
        raise RearrangementFailed("witness has no coordinates")
    last = basis[nz[-1]]
    head = [b for b in basis if b != last]
    # covector vanishing on the head vectors and equal to 1 on the last basis vector
    rows = [list(vecs[b]) for b in head] + [list(vecs[last])]
    f = solve(rows, [0] * len(head) + [1])
    chosen = [last] + [i for i in range(len(items)) if i not in basis]
    sub, leftover = [], []
    for i in chosen:
        val = sum((to_cyc(a) * b for a, b in zip(f, vecs[i])), Cyclotomic())
        if val.is_zero():
            leftover.append(i)
        else:
            idx, coef, vv = items[i]
            sub.append((idx, coef * val, vv[1:]))
    contracted = contract(t, 0, f)
    next_fallback = chain_rest[0] if chain_rest else None
    nxt = _level_witness(contracted, next_fallback) if contracted.arity > 2 else None
    order = _rearrange(contracted, sub, nxt, chain_rest[1:])
    return [items[i][0] for i in head] + order + [items[i][0] for i in leftover]


def rearrange_decomposition(p: Tensor, dec: Decomposition, cert: PersistenceCertificate) -> list[int]:
    """Term order in which each factor j < n-1 gets a basis at the prescribed positions."""
    if not cert.conclusive:
        raise WeakCertificate("rearrangement needs a conclusive persistence certificate")
    if not verify_decomposition(p, dec):
        raise UnverifiedDecomposition("decomposition does not sum to the tensor")
    n = p.arity
    items = [(i, to_cyc(term.scale), term.vectors) for i, term in enumerate(dec.terms)]
    witness = cert.witness_chain[0] if n > 2 else None
    order = _rearrange(p, items, witness, cert.witness_chain[1:])
    if sorted(order) != list(range(len(dec))):
        raise RearrangementFailed("rearrangement lost terms")
    ranks = [mode_rank(p, k) for k in range(n)]
    start = 0
    for j in range(n - 1):
        block = [dec.terms[order[start + k]].vectors[j] for k in range(ranks[j])] if start + ranks[j] <= len(order) else []
        if len(block) != ranks[j] or matrix_rank(block) != ranks[j]:
            raise RearrangementFailed(f"factor {j} vectors at positions {start}..{start + ranks[j] - 1} are not a basis")
        start += ranks[j] - 1
    return order
