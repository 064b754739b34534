"""Degenerations through eps-dependent local maps and border-rank certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from .decompositions import Decomposition, Term, expand, map_decomposition
from .errors import BadSpec, DimMismatch, InvalidEpsDecomposition, NotADegeneration
from .families import ghz, l_state, m_state, mprime_state, n_state, nprime_state
from .scalars import Cyclotomic, EpsLaurent, format_scalar, is_zero, to_cyc
from .serialize import decomposition_to_obj, tensor_digest
from .tensor import LocalMap, Tensor, mode_rank, slocc_apply

# local maps whose entries may be eps-Laurent polynomials
EpsLocalMap = LocalMap


class ChainStep(str, Enum):
    L_TO_M = "L_TO_M"
    M_TO_N = "M_TO_N"


def _eps(k: int, c=1) -> EpsLaurent:
    return EpsLaurent.monomial(k, c)


def _min_exponent(x) -> int | None:
    if is_zero(x):
        return None
    return x.lowest()[0] if isinstance(x, EpsLaurent) else 0


def map_min_exponents(m: LocalMap) -> list[int]:
    out = []
    for mat in m.matrices:
        exps = [e for row in mat for x in row if (e := _min_exponent(x)) is not None]
        out.append(min(exps) if exps else 0)
    return out


@dataclass
class DegenerationCertificate:
    approximation_degree: int
    error_degree: int
    normalization_shift: int
    lowest_order: int
    scalar: Cyclotomic
    verified: bool
    source: str
    target: str
    reparametrization: int | None = None
    expansion: Tensor | None = field(default=None, repr=False)

    def error_terms(self) -> dict[int, Tensor]:
        """The higher-order coefficient tensors, keyed by offset above the lowest order."""
        lo, hi = self.expansion.eps_orders()
        out = {}
        for k in range(lo + 1, hi + 1):
            c = self.expansion.eps_coefficient(k)
            if not c.is_zero():
                out[k - lo] = c
        return out

    def to_obj(self) -> dict[str, Any]:
        return {
            "approximation_degree": self.approximation_degree,
            "error_degree": self.error_degree,
            "normalization_shift": self.normalization_shift,
            "lowest_order": self.lowest_order,
            "scalar": format_scalar(self.scalar),
            "verified": self.verified,
            "source": self.source,
            "target": self.target,
            "reparametrization": self.reparametrization,
        }


def verify_degeneration(src: Tensor, maps: LocalMap, tgt: Tensor) -> DegenerationCertificate:
    """Check that the lowest eps-order of (A_1 x ... x A_n) src is a nonzero multiple of tgt."""
    if maps.in_dims() != src.shape:
        raise DimMismatch(f"map input dims {maps.in_dims()} vs source shape {src.shape}")
    if maps.out_dims() != tgt.shape:
        raise DimMismatch(f"map output dims {maps.out_dims()} vs target shape {tgt.shape}")
    image = slocc_apply(src, maps).as_eps()
    if image.is_zero():
        raise NotADegeneration("the maps annihilate the source")
    lo, hi = image.eps_orders()
    lead = image.eps_coefficient(lo)
    if tgt.is_zero():
        raise NotADegeneration("target is zero")
    probe = min(tgt.entries)
    lam = to_cyc(lead[probe]) * to_cyc(tgt[probe]).inverse()
    if lam.is_zero() or lead != tgt.scale(lam):
        raise NotADegeneration(f"lowest-order tensor (eps^{lo}) is not a multiple of the target")
    shift = -sum(map_min_exponents(maps))
    return DegenerationCertificate(
        approximation_degree=lo + shift,
        error_degree=hi - lo,
        normalization_shift=shift,
        lowest_order=lo,
        scalar=lam,
        verified=True,
        source=tensor_digest(src),
        target=tensor_digest(tgt),
        expansion=image,
    )


def canonical_chain_maps(step: str | ChainStep, d: int, n: int) -> LocalMap:
    step = ChainStep(step)
    if n < 3:
        raise BadSpec(f"the degeneration chain needs n >= 3, got {n}")
    if d < 2:
        raise BadSpec(f"need d >= 2, got {d}")
    if step is ChainStep.L_TO_M:
        diag = [_eps(-2)] + [_eps(n - 2)] * (d - 2) + [_eps(2 * (n - 1))]
        return LocalMap.diagonal([diag] * n)
    diag = [_eps(0)] + [_eps(1)] * (d - 2) + [_eps(0)]
    inv = [_eps(0)] + [_eps(-1)] * (d - 2) + [_eps(0)]
    return LocalMap.diagonal([diag] * (n - 1) + [inv])


def compose_degenerations(
    first: LocalMap,
    first_cert: DegenerationCertificate,
    second: LocalMap,
    second_cert: DegenerationCertificate,
) -> tuple[LocalMap, int]:
    """Maps for the composite degeneration, reparametrizing the first stage by eps -> eps^K.

    The error terms of the first stage gain a factor eps^K, which pushes them
    above the leading order of the second stage once K exceeds
    a2 - sum(min exponents of the second maps).
    """
    if not (first_cert.verified and second_cert.verified):
        raise NotADegeneration("both stages must be verified")
    if first_cert.target != second_cert.source:
        raise NotADegeneration("stages do not chain: intermediate tensors differ")
    bound = second_cert.lowest_order - sum(map_min_exponents(second))
    k = max(1, bound + 1)
    return first.substitute_power(k).compose(second), k


def chain_to_n(d: int, n: int) -> tuple[LocalMap, int]:
    """Composite L -> N maps and the reparametrization used."""
    a = canonical_chain_maps(ChainStep.L_TO_M, d, n)
    b = canonical_chain_maps(ChainStep.M_TO_N, d, n)
    ca = verify_degeneration(l_state(d, n), a, m_state(d, n))
    cb = verify_degeneration(m_state(d, n), b, n_state(d, n))
    return compose_degenerations(a, ca, b, cb)


# ---------------------------------------------------------------- eps decompositions


def _eps_vec(d: int, entries: dict[int, EpsLaurent]) -> tuple:
    return tuple(entries.get(j, EpsLaurent()) for j in range(d))


def _eps_l(d: int, n: int) -> list[Term]:
    terms = []
    for p in range(d):
        xi = Cyclotomic.root(d, p)
        vec = _eps_vec(d, {j: _eps(j, Cyclotomic.root(d, p * j)) for j in range(d)})
        terms.append(Term(_eps(-(d - 1), xi * Fraction(1, d)), (vec,) * n))
    return terms


def eps_decomposition(family: str, d: int, n: int) -> Decomposition:
    """d-term approximate decomposition whose eps^0 part is the family tensor."""
    family = family.lower()
    if d < 2 or n < 2:
        raise BadSpec(f"need d >= 2 and n >= 2, got d={d}, n={n}")
    shape = (d,) * n
    if family == "l" or (family == "mprime" and d == 2):
        note = "roots-of-unity approximation" if family == "l" else "M'(2, n) = L(2, n); shifted-power formula undefined at d = 2"
        return Decomposition(shape, _eps_l(d, n), {"family": family, "formula": note})
    if family == "mprime":
        terms = []
        for j in range(1, d - 1):
            vec = _eps_vec(d, {0: _eps(0), j: _eps(1), d - 1: _eps(2, Fraction(1, d - 2))})
            terms.append(Term(_eps(-2), (vec,) * n))
        corr = _eps_vec(d, {0: _eps(0), **{j: _eps(2) for j in range(1, d - 1)}})
        terms.append(Term(_eps(-3, -1), (corr,) * n))
        zero = _eps_vec(d, {0: _eps(0)})
        terms.append(Term(_eps(-2, -(d - 2)) + _eps(-3), (zero,) * n))
        return Decomposition(shape, terms, {"family": family, "formula": "shifted powers with correction"})
    if family == "nprime":
        terms = []
        for j in range(1, d):
            head = _eps_vec(d, {0: _eps(0), j: _eps(1)})
            tail = _eps_vec(d, {j: _eps(0)})
            terms.append(Term(_eps(-1), (head,) * (n - 1) + (tail,)))
        zero = _eps_vec(d, {0: _eps(0)})
        last = _eps_vec(d, {0: _eps(1), **{j: _eps(0, -1) for j in range(1, d)}})
        terms.append(Term(_eps(-1), (zero,) * (n - 1) + (last,)))
        return Decomposition(shape, terms, {"family": family, "formula": "first-order shifts"})
    raise BadSpec(f"no eps decomposition for family {family!r}")


def eps_leading(epsdec: Decomposition) -> tuple[int, Tensor, Tensor]:
    """(lowest order, its coefficient tensor, full expansion)."""
    ex = expand(epsdec).as_eps()
    if ex.is_zero():
        raise InvalidEpsDecomposition("expansion vanishes identically")
    lo, _ = ex.eps_orders()
    return lo, ex.eps_coefficient(lo), ex


@dataclass
class BorderRankCertificate:
    terms: Decomposition
    lower: int
    upper: int
    subject: str
    trace: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_obj(self) -> dict[str, Any]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "subject": self.subject,
            "trace": self.trace,
            "eps_decomposition": decomposition_to_obj(self.terms),
        }


def border_rank_certificate(t: Tensor, epsdec: Decomposition) -> BorderRankCertificate:
    if epsdec.shape != t.shape:
        raise InvalidEpsDecomposition(f"shape {epsdec.shape} vs tensor shape {t.shape}")
    lo, lead, ex = eps_leading(epsdec)
    if lo < 0:
        raise InvalidEpsDecomposition(f"negative order eps^{lo} does not cancel")
    if lo > 0 or lead != t:
        raise InvalidEpsDecomposition("eps^0 coefficient differs from the tensor")
    ranks = [mode_rank(t, k) for k in range(t.arity)]
    lower = max(ranks)
    _, hi = ex.eps_orders()
    trace = {"mode_ranks": ranks, "lower_from": "max mode flattening rank", "error_degree": hi,
             **{k: v for k, v in epsdec.trace.items() if isinstance(v, (str, int))}}
    return BorderRankCertificate(epsdec, lower, len(epsdec), tensor_digest(t), trace)


def transport_eps_decomposition(epsdec: Decomposition, maps: LocalMap, tgt: Tensor) -> Decomposition:
    """Push an approximate decomposition through degeneration maps and renormalize to eps^0."""
    moved = map_decomposition(maps, epsdec)
    lo, lead, _ = eps_leading(moved)
    probe = min(tgt.entries)
    lam = to_cyc(lead[probe]) * to_cyc(tgt[probe]).inverse()
    if lam.is_zero() or lead != tgt.scale(lam):
        raise InvalidEpsDecomposition("transported leading term is not a multiple of the target")
    fix = _eps(-lo, lam.inverse())
    terms = [Term(fix * t.scale, t.vectors) for t in moved.terms]
    return Decomposition(moved.shape, terms, dict(epsdec.trace, transported_shift=-lo))


def family_eps_decomposition(family: str, d: int, n: int) -> Decomposition:
    """d-term approximation for L, M', N' directly and for M, N by transport from L."""
    family = family.lower()
    if family in ("l", "mprime", "nprime"):
        return eps_decomposition(family, d, n)
    if family == "m":
        maps = canonical_chain_maps(ChainStep.L_TO_M, d, n)
        return transport_eps_decomposition(eps_decomposition("l", d, n), maps, m_state(d, n))
    if family == "n":
        maps, _ = chain_to_n(d, n)
        return transport_eps_decomposition(eps_decomposition("l", d, n), maps, n_state(d, n))
    if family == "ghz":
        terms = [Term(1, tuple(tuple(int(k == j) for k in range(d)) for _ in range(n))) for j in range(d)]
        return Decomposition((d,) * n, terms, {"family": "ghz", "formula": "exact diagonal"})
    raise BadSpec(f"no eps decomposition for family {family!r}")


def family_tensor(family: str, d: int, n: int) -> Tensor:
    table = {"l": l_state, "m": m_state, "n": n_state, "mprime": mprime_state, "nprime": nprime_state, "ghz": ghz}
    try:
        return table[family.lower()](d, n)
    except KeyError:
        raise BadSpec(f"unknown family {family!r}") from None


def ghz_degeneration_from_eps(epsdec: Decomposition, n: int) -> LocalMap:
    """Maps sending leg i of GHZ(r, n) basis vector |p> to the p-th term's i-th vector."""
    if epsdec.arity != n:
        raise InvalidEpsDecomposition(f"decomposition has arity {epsdec.arity}, expected {n}")
    r = len(epsdec)
    if r == 0:
        raise InvalidEpsDecomposition("empty decomposition")
    mats = []
    for i, d in enumerate(epsdec.shape):
        cols = []
        for t in epsdec.terms:
            v = t.vectors[i]
            cols.append([t.scale * x for x in v] if i == 0 else list(v))
        mats.append([[cols[p][row] for p in range(r)] for row in range(d)])
    return LocalMap(mats)


_CHAIN = ("ghz", "l", "m", "n")


def degeneration_maps(source: str, target: str, d: int, n: int) -> tuple[LocalMap, DegenerationCertificate]:
    """Verified maps along GHZ -> L -> M -> N between two families of the chain."""
    source, target = source.lower(), target.lower()
    if source not in _CHAIN or target not in _CHAIN or _CHAIN.index(source) >= _CHAIN.index(target):
        raise BadSpec(f"no chain degeneration from {source!r} to {target!r}")
    steps = _CHAIN[_CHAIN.index(source): _CHAIN.index(target) + 1]
    maps = None
    cert = None
    ks = []
    for a, b in zip(steps, steps[1:]):
        if a == "ghz":
            step = ghz_degeneration_from_eps(eps_decomposition("l", d, n), n)
        else:
            step = canonical_chain_maps(ChainStep.L_TO_M if a == "l" else ChainStep.M_TO_N, d, n)
        step_cert = verify_degeneration(family_tensor(a, d, n), step, family_tensor(b, d, n))
        if maps is None:
            maps = step
        else:
            maps, k = compose_degenerations(maps, cert, step, step_cert)
            ks.append(k)
        cert = verify_degeneration(family_tensor(source, d, n), maps, family_tensor(b, d, n))
    if ks:
        cert.reparametrization = ks[-1]
    return maps, cert
