"""Schmidt-rank profiles and rate-one certificates for asymptotic SLOCC conversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from .decompositions import Decomposition, verify_decomposition
from .degeneration import DegenerationCertificate, ghz_degeneration_from_eps, verify_degeneration
from .errors import ArityCapExceeded, ArityMismatch, NotADegeneration, UnverifiedDecomposition
from .tensor import Bipartition, LocalMap, Tensor, all_bipartitions, schmidt_rank

ARITY_CAP = 8


def schmidt_profile(t: Tensor, cap: int = ARITY_CAP) -> dict[Bipartition, int]:
    """Schmidt rank across every cut, keyed by the side containing factor 0."""
    if t.arity > cap:
        raise ArityCapExceeded(f"arity {t.arity} exceeds the cap {cap}")
    return {s: schmidt_rank(t, s) for s in all_bipartitions(t.arity)}


@dataclass
class RateBound:
    best_pair: tuple[int, int]
    value_is_at_least_one: bool
    display_value: str
    cut: str | None = None

    def to_obj(self) -> dict[str, Any]:
        return {
            "best_pair": list(self.best_pair),
            "value_is_at_least_one": self.value_is_at_least_one,
            "display_value": self.display_value,
            "cut": self.cut,
        }


def rate_lower_bound(src: Tensor, tgt: Tensor) -> RateBound:
    """max over cuts of log rk_S(tgt) / log rk_S(src)."""
    if src.arity != tgt.arity:
        raise ArityMismatch(f"source arity {src.arity} vs target arity {tgt.arity}")
    ps, pt = schmidt_profile(src), schmidt_profile(tgt)
    best = None
    for s in sorted(ps, key=lambda b: sorted(b.members)):
        a, b = pt[s], ps[s]
        if b == 1:
            if a == 1:
                continue
            key = math.inf
        else:
            key = math.log(a) / math.log(b)
        if best is None or key > best[0]:
            best = (key, (a, b), s)
    if best is None:
        return RateBound((1, 1), True, "undefined (all cuts have rank 1)")
    key, (a, b), s = best
    # a log-ratio is at least one exactly when the integer ranks compare that way
    display = "inf" if key == math.inf else f"{key:.6f}"
    return RateBound((a, b), a >= b, display, s.label())


@dataclass
class RateOne:
    trace: dict = field(default_factory=dict)

    rate_one = True


@dataclass
class Inconclusive:
    trace: dict = field(default_factory=dict)

    rate_one = False


def rate_one_certificate(src: Tensor, tgt: Tensor, maps: LocalMap) -> RateOne | Inconclusive:
    """omega = 1 from a verified degeneration (upper) and the Schmidt-rank bound (lower)."""
    if src.arity != tgt.arity:
        raise ArityMismatch(f"source arity {src.arity} vs target arity {tgt.arity}")
    lower = rate_lower_bound(src, tgt)
    trace: dict[str, Any] = {"lower_bound": lower.to_obj()}
    try:
        cert: DegenerationCertificate | None = verify_degeneration(src, maps, tgt)
        trace["upper_bound"] = {"degeneration": cert.to_obj(), "consequence": "rate at most one"}
    except (NotADegeneration, ValueError) as exc:
        cert = None
        trace["upper_bound"] = {"failed": str(exc)}
    failing = [h for h, ok in (("lower", lower.value_is_at_least_one), ("upper", cert is not None)) if not ok]
    if failing:
        trace["failing_half"] = failing[0]
        trace["failing_halves"] = failing
        return Inconclusive(trace)
    return RateOne(trace)


def slocc_from_decomposition(t: Tensor, dec: Decomposition) -> LocalMap:
    """Maps realizing GHZ(r, n) -> t for a verified r-term decomposition."""
    if not verify_decomposition(t, dec):
        raise UnverifiedDecomposition("decomposition does not sum to the tensor")
    return ghz_degeneration_from_eps(dec, t.arity)
