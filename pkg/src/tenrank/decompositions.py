"""Rank decompositions: explicit constructions, exact verification and transport."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import BadParams, BadSpec, DimMismatch, ShapeMismatch
from .families import dicke, m_basis_matrix, mprime_state, n_state, w_state
from .linalg import inverse
from .scalars import Cyclotomic, EpsLaurent, is_zero, to_cyc
from .tensor import Index, LocalMap, Tensor, _finish, apply_matrix, outer


@dataclass(frozen=True)
class Term:
    scale: object
    vectors: tuple[tuple[object, ...], ...]


@dataclass
class Decomposition:
    """sum_p scale_p * v_1^(p) x ... x v_n^(p).  Entries may be cyclotomic or eps-Laurent."""

    shape: tuple[int, ...]
    terms: list[Term]
    trace: dict = field(default_factory=dict)

    def __post_init__(self):
        self.shape = tuple(self.shape)
        kept = []
        for t in self.terms:
            if not isinstance(t, Term):
                t = Term(t[0], tuple(tuple(v) for v in t[1]))
            if len(t.vectors) != len(self.shape):
                raise ShapeMismatch(f"term has {len(t.vectors)} vectors for arity {len(self.shape)}")
            for v, d in zip(t.vectors, self.shape):
                if len(v) != d:
                    raise ShapeMismatch(f"vector of length {len(v)} in factor of dim {d}")
            if is_zero(t.scale) or any(all(is_zero(x) for x in v) for v in t.vectors):
                continue
            kept.append(t)
        self.terms = kept

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def arity(self) -> int:
        return len(self.shape)

    def is_eps(self) -> bool:
        return any(
            isinstance(t.scale, EpsLaurent) or any(isinstance(x, EpsLaurent) for v in t.vectors for x in v)
            for t in self.terms
        )

    def permuted(self, order: Sequence[int]) -> Decomposition:
        return Decomposition(self.shape, [self.terms[i] for i in order], dict(self.trace))


def expand(dec: Decomposition) -> Tensor:
    acc: dict[Index, object] = {}
    for t in dec.terms:
        for idx, v in outer(t.vectors, t.scale).items():
            acc[idx] = acc[idx] + v if idx in acc else v
    return _finish(dec.shape, acc, "eps" if dec.is_eps() else "cyc")


def verify_decomposition(t: Tensor, dec: Decomposition) -> bool:
    """Exact check that the decomposition sums to t; on success rk(t) <= len(dec)."""
    if t.shape != dec.shape:
        raise ShapeMismatch(f"tensor shape {t.shape} vs decomposition shape {dec.shape}")
    return expand(dec) == t


def _basis_vec(d: int, j: int, value=1) -> tuple:
    return tuple(value if k == j else 0 for k in range(d))


def from_entries(t: Tensor) -> Decomposition:
    """One simple term per stored entry."""
    terms = [Term(v, tuple(_basis_vec(d, j) for d, j in zip(t.shape, idx))) for idx, v in sorted(t.entries.items())]
    return Decomposition(t.shape, terms, {"construction": "entry listing"})


def decompose_trivial(family: str, d: int = 2, n: int = 3) -> Decomposition:
    family = family.lower()
    if family == "ghz":
        if d < 1 or n < 2:
            raise BadSpec("GHZ needs d >= 1, n >= 2")
        return Decomposition((d,) * n, [Term(1, tuple(_basis_vec(d, j) for _ in range(n))) for j in range(d)],
                             {"construction": "GHZ diagonal"})
    if family == "w":
        if n < 2:
            raise BadSpec("W needs n >= 2")
        return from_entries(w_state(n))
    if family == "n":
        if d < 2 or n < 2:
            raise BadSpec("N needs d >= 2, n >= 2")
        return from_entries(n_state(d, n))
    raise BadSpec(f"no trivial decomposition for family {family!r}")


def decompose_w(n: int) -> Decomposition:
    return decompose_trivial("w", 2, n)


def decompose_l(d: int, n: int) -> Decomposition:
    """Symmetric decomposition with r = (n-1)(d-1)+1 terms over Q(zeta_r)."""
    if d < 2 or n < 2:
        raise BadSpec("L needs d >= 2, n >= 2")
    r = (n - 1) * (d - 1) + 1
    terms = []
    for p in range(r):
        vec = tuple(Cyclotomic.root(r, p * j) for j in range(d))
        scale = Cyclotomic.root(r, p * (1 - d)) * Fraction(1, r)
        terms.append(Term(scale, (vec,) * n))
    return Decomposition((d,) * n, terms, {"construction": "roots-of-unity filter", "r": r})


def _power_sum_terms(m: int, b: int, arity: int, d: int, j: int) -> list[Term]:
    # sum_i zeta_m^(-i b) (|0> + zeta_m^i |j>)^(x arity), unnormalized
    terms = []
    for i in range(m):
        vec = [0] * d
        vec[0] = 1
        vec[j] = Cyclotomic.root(m, i)
        terms.append(Term(Cyclotomic.root(m, -i * b), (tuple(vec),) * arity))
    return terms


def decompose_monomial_waring(a: int, b: int) -> Decomposition:
    """Waring-type decomposition of the Dicke tensor D(a+b, b) with a+1 terms.

    The multiplicity factor between the power sum and the Dicke tensor is
    read off one coordinate and then every coordinate is verified.
    """
    if not a >= b >= 1:
        raise BadParams(f"need a >= b >= 1, got a={a}, b={b}")
    n = a + b
    raw = _power_sum_terms(a + 1, b, n, 2, 1)
    probe = (1,) * b + (0,) * a
    mu = to_cyc(0)
    for t in raw:
        val = t.scale
        for v, k in zip(t.vectors, probe):
            val = val * v[k]
        mu = mu + val
    inv = mu.inverse()
    dec = Decomposition((2,) * n, [Term(t.scale * inv, t.vectors) for t in raw],
                        {"construction": "roots-of-unity power sum", "mu": str(mu)})
    if not verify_decomposition(dicke(n, b), dec):
        raise ArithmeticError(f"power-sum construction failed for (a, b) = ({a}, {b})")
    return dec


def _decompose_mprime(d: int, n: int) -> Decomposition:
    target = mprime_state(d, n)
    if n == 2:
        return from_entries(target)
    shape = (d,) * n
    terms: list[Term] = []
    scale = Fraction(1, n - 1)
    for j in range(1, d - 1):
        terms.extend(Term(t.scale * scale, t.vectors) for t in _power_sum_terms(n - 1, 2, n, d, j))
    residual = target - expand(Decomposition(shape, list(terms)))
    c = residual[(0,) * n]
    w_part = _finish(shape, {(0,) * k + (d - 1,) + (0,) * (n - k - 1): 1 for k in range(n)}, "cyc")
    corr = residual - _finish(shape, {(0,) * n: c}, "cyc")
    if corr != w_part:
        raise ArithmeticError("plane power sums left an unexpected residual")
    # W in the plane {|0>, |d-1> + (c/n)|0>} absorbs the leftover |0...0> coefficient
    shift = c * Fraction(1, n)
    for p in range(n):
        z = Cyclotomic.root(n, p)
        vec = [0] * d
        vec[0] = 1 + z * shift
        vec[d - 1] = z
        terms.append(Term(Cyclotomic.root(n, -p) * Fraction(1, n), (tuple(vec),) * n))
    return Decomposition(shape, terms, {
        "construction": "plane power sums + W absorbing residual",
        "plane_terms": (d - 2) * (n - 1),
        "w_terms": n,
        "absorbed_zero_coefficient": str(c),
    })


def decompose_m(d: int, n: int, variant: str = "M") -> Decomposition:
    """(n-1)(d-1)+1 terms for M'(d, n), or for M(d, n) pulled back through the basis change."""
    if d < 2 or n < 2:
        raise BadSpec("M needs d >= 2, n >= 2")
    variant = variant.upper().replace("′", "PRIME").replace("'", "PRIME")
    if variant not in ("M", "MPRIME"):
        raise BadSpec(f"unknown variant {variant!r}")
    dec = _decompose_mprime(d, n)
    if variant == "MPRIME" or d < 4:
        return dec
    back = inverse(m_basis_matrix(d))
    out = map_decomposition(LocalMap([back] * n), dec)
    out.trace = dict(dec.trace, pulled_back="inverse M->M' basis change")
    return out


def map_decomposition(m: LocalMap, dec: Decomposition) -> Decomposition:
    if m.arity != dec.arity or m.in_dims() != dec.shape:
        raise DimMismatch(f"map input dims {m.in_dims()} vs decomposition shape {dec.shape}")
    terms = [Term(t.scale, tuple(tuple(apply_matrix(v, a)) for v, a in zip(t.vectors, m.matrices))) for t in dec.terms]
    return Decomposition(m.out_dims(), terms, dict(dec.trace))


def tensor_product_decomposition(a: Decomposition, b: Decomposition) -> Decomposition:
    terms = [Term(s.scale * t.scale, s.vectors + t.vectors) for s in a.terms for t in b.terms]
    return Decomposition(a.shape + b.shape, terms)


def kronecker_vector(v: Sequence[object], w: Sequence[object]) -> tuple:
    return tuple(x * y for x in v for y in w)


def kronecker_product_decomposition(a: Decomposition, b: Decomposition) -> Decomposition:
    na = a.arity
    shape = tuple(x * y for x, y in zip(a.shape, b.shape)) + b.shape[na:]
    terms = []
    for s in a.terms:
        for t in b.terms:
            vecs = tuple(kronecker_vector(v, w) for v, w in zip(s.vectors, t.vectors)) + t.vectors[na:]
            terms.append(Term(s.scale * t.scale, vecs))
    return Decomposition(shape, terms)


def direct_sum_decomposition(a: Decomposition, b: Decomposition) -> Decomposition:
    if a.arity != b.arity:
        raise ShapeMismatch("arity mismatch")
    shape = tuple(x + y for x, y in zip(a.shape, b.shape))
    terms = [Term(t.scale, tuple(tuple(v) + (0,) * db for v, db in zip(t.vectors, b.shape))) for t in a.terms]
    terms += [Term(t.scale, tuple((0,) * da + tuple(v) for v, da in zip(t.vectors, a.shape))) for t in b.terms]
    return Decomposition(shape, terms)


def family_decomposition(family: str, d: int, n: int) -> Decomposition:
    """Best known explicit decomposition for a named family."""
    family = family.lower()
    if family in ("ghz", "w", "n"):
        return decompose_trivial(family, d, n)
    if family in ("l", "y"):
        return decompose_l(3 if family == "y" else d, n)
    if family == "m":
        return decompose_m(d, n, "M")
    if family == "mprime":
        return decompose_m(d, n, "MPRIME")
    if family == "nprime":
        from .families import nprime_state

        return from_entries(nprime_state(d, n))
    raise BadSpec(f"no decomposition constructor for {family!r}")


def minimal_rank(d: int, n: int) -> int:
    return (n - 1) * (d - 1) + 1


__all__ = [
    "Decomposition",
    "Term",
    "decompose_l",
    "decompose_m",
    "decompose_monomial_waring",
    "decompose_trivial",
    "decompose_w",
    "direct_sum_decomposition",
    "expand",
    "family_decomposition",
    "from_entries",
    "kronecker_product_decomposition",
    "map_decomposition",
    "minimal_rank",
    "tensor_product_decomposition",
    "verify_decomposition",
]
