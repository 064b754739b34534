"""Named state families: GHZ, W, Dicke, L, M, M', N, N', Y and a nonsymmetric 4-qubit example."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import BadDim, BadSpec
from .scalars import Cyclotomic
from .tensor import LocalMap, Tensor, build_tensor


class Family(str, Enum):
    GHZ = "ghz"
    W = "w"
    DICKE = "dicke"
    L = "l"
    M = "m"
    MPRIME = "mprime"
    N = "n"
    NPRIME = "nprime"
    Y = "y"
    NONSYM4 = "nonsym4"


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    d: int = 2
    n: int = 3
    l: int = 1
    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(1)
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        fam = self.family
        if fam in (Family.W, Family.DICKE, Family.NONSYM4):
            object.__setattr__(self, "d", 2)
        if fam is Family.Y:
            object.__setattr__(self, "d", 3)
        if fam is Family.NONSYM4:
            object.__setattr__(self, "n", 4)
            if self.sign not in (1, -1):
                raise BadSpec("sign must be +1 or -1")
        if self.d < 2 or self.n < 2:
            raise BadSpec(f"need d >= 2 and n >= 2, got d={self.d}, n={self.n}")
        if fam is Family.DICKE and not 0 <= self.l <= self.n:
            raise BadSpec(f"Dicke excitation count {self.l} outside 0..{self.n}")

    def label(self) -> str:
        fam = self.family
        if fam is Family.W:
            return f"W({self.n})"
        if fam is Family.DICKE:
            return f"D({self.n},{self.l})"
        if fam is Family.Y:
            return f"Y({self.n})"
        if fam is Family.NONSYM4:
            return f"NONSYM4({self.alpha},{self.beta},{'+' if self.sign > 0 else '-'})"
        return f"{fam.name}({self.d},{self.n})"


def _unit(n: int, slots: dict[int, int]) -> tuple[int, ...]:
    return tuple(slots.get(k, 0) for k in range(n))


def ghz(d: int, n: int) -> Tensor:
    return build_tensor((d,) * n, [((j,) * n, 1) for j in range(d)])


def w_state(n: int) -> Tensor:
    return build_tensor((2,) * n, [(_unit(n, {k: 1}), 1) for k in range(n)])


def dicke(n: int, l: int) -> Tensor:
    entries = [(_unit(n, {k: 1 for k in ones}), 1) for ones in itertools.combinations(range(n), l)]
    return build_tensor((2,) * n, entries)


def l_state(d: int, n: int) -> Tensor:
    entries = [(idx, 1) for idx in itertools.product(range(d), repeat=n) if sum(idx) == d - 1]
    return build_tensor((d,) * n, entries)


def _w_part(d: int, n: int) -> list:
    return [(_unit(n, {k: d - 1}), 1) for k in range(n)]


def m_state(d: int, n: int) -> Tensor:
    entries = _w_part(d, n)
    for a, b in itertools.combinations(range(n), 2):
        for j in range(1, d - 1):
            entries.append((_unit(n, {a: j, b: d - j - 1}), 1))
    return build_tensor((d,) * n, entries)


def mprime_state(d: int, n: int) -> Tensor:
    entries = _w_part(d, n)
    for a, b in itertools.combinations(range(n), 2):
        for j in range(1, d - 1):
            entries.append((_unit(n, {a: j, b: j}), 1))
    return build_tensor((d,) * n, entries)


def n_state(d: int, n: int) -> Tensor:
    entries = [(_unit(n, {n - 1: d - 1}), 1)]
    for i in range(n - 1):
        for j in range(1, d):
            entries.append((_unit(n, {n - i - 2: j, n - 1: d - j - 1}), 1))
    return build_tensor((d,) * n, entries)


def nprime_state(d: int, n: int) -> Tensor:
    entries = [((0,) * n, 1)]
    for i in range(n - 1):
        for j in range(1, d):
            entries.append((_unit(n, {n - i - 2: j, n - 1: j}), 1))
    return build_tensor((d,) * n, entries)


def nonsym4(alpha, beta, sign: int = 1) -> Tensor:
    alpha, beta = Fraction(alpha), Fraction(beta)
    entries = [
        ((0, 0, 1, 1), alpha**2),
        ((0, 1, 0, 1), beta**2),
        ((0, 1, 1, 0), (alpha + sign * beta) ** 2),
        ((1, 0, 0, 1), 1),
        ((1, 0, 1, 0), 1),
        ((1, 1, 0, 0), 1),
    ]
    return build_tensor((2,) * 4, entries)


def make_state(spec: FamilySpec) -> Tensor:
    fam, d, n = spec.family, spec.d, spec.n
    if fam is Family.GHZ:
        return ghz(d, n)
    if fam is Family.W:
        return w_state(n)
    if fam is Family.DICKE:
        return dicke(n, spec.l)
    if fam in (Family.L, Family.Y):
        return l_state(d, n)
    if fam is Family.M:
        return m_state(d, n)
    if fam is Family.MPRIME:
        return mprime_state(d, n)
    if fam is Family.N:
        return n_state(d, n)
    if fam is Family.NPRIME:
        return nprime_state(d, n)
    if fam is Family.NONSYM4:
        return nonsym4(spec.alpha, spec.beta, spec.sign)
    raise BadSpec(f"unknown family {fam}")


def state(family: str, d: int = 2, n: int = 3, **kw) -> Tensor:
    return make_state(FamilySpec(Family(family), d=d, n=n, **kw))


def m_basis_matrix(d: int) -> list[list[Cyclotomic]]:
    """Per-factor change of basis taking M(d, n) to M'(d, n).

    On each plane {|j>, |d-j-1>} with 1 <= j <= (d-2)//2 it sends
    |j> -> (|j> + i|d-j-1>)/sqrt2 and |d-j-1> -> (|j> - i|d-j-1>)/sqrt2;
    sqrt2 = z8 + z8^7 keeps everything inside Q(zeta_8).
    """
    if d < 3:
        raise BadDim(f"basis change needs d >= 3, got {d}")
    zero, one = Cyclotomic(), Cyclotomic.rational(1)
    mat = [[one if r == c else zero for c in range(d)] for r in range(d)]
    inv_sqrt2 = (Cyclotomic.root(8, 1) + Cyclotomic.root(8, 7)) * Fraction(1, 2)
    i_unit = Cyclotomic.root(4, 1)
    for j in range(1, (d - 2) // 2 + 1):
        k = d - j - 1
        mat[j][j] = inv_sqrt2
        mat[k][j] = i_unit * inv_sqrt2
        mat[j][k] = inv_sqrt2
        mat[k][k] = -i_unit * inv_sqrt2
    return mat


def m_basis_change(d: int, n: int) -> LocalMap:
    return LocalMap([m_basis_matrix(d)] * n)
