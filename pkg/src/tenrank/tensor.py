"""Sparse multipartite tensors over exact scalars."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    DimMismatch,
    IndexOutOfShape,
    ScalarKindMismatch,
    ShapeMismatch,
    ZeroTensor,
)
from .linalg import sparse_rank
from .scalars import Cyclotomic, EpsLaurent, to_cyc, to_eps

Index = tuple[int, ...]


def _kind_of(value) -> str:
    return "eps" if isinstance(value, EpsLaurent) else "cyc"


def _coerce(value, kind: str):
    return to_eps(value) if kind == "eps" else to_cyc(value)


class Tensor:
    """Immutable sparse tensor.  ``kind`` is ``"cyc"`` or ``"eps"``.

    Use :func:`build_tensor` for validated construction; the constructor
    trusts that entries are in shape, nonzero and of the right kind.
    """

    __slots__ = ("shape", "entries", "kind")

    def __init__(self, shape: Sequence[int], entries: Mapping[Index, object], kind: str = "cyc"):
        self.shape: tuple[int, ...] = tuple(int(d) for d in shape)
        self.entries: dict[Index, object] = dict(entries)
        self.kind = kind

    @classmethod
    def zeros(cls, shape: Sequence[int], kind: str = "cyc") -> Tensor:
        return cls(shape, {}, kind)

    @property
    def arity(self) -> int:
        return len(self.shape)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __getitem__(self, idx: Index):
        zero = EpsLaurent() if self.kind == "eps" else Cyclotomic()
        return self.entries.get(tuple(idx), zero)

    def support(self) -> list[Index]:
        return sorted(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        if self.shape != other.shape or self.entries.keys() != other.entries.keys():
            return False
        return all(self.entries[k] == other.entries[k] for k in self.entries)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: Tensor) -> Tensor:
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        kind = "eps" if "eps" in (self.kind, other.kind) else "cyc"
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc[k] + v if k in acc else v
        return _finish(self.shape, acc, kind)

    def __neg__(self) -> Tensor:
        return Tensor(self.shape, {k: -v for k, v in self.entries.items()}, self.kind)

    def __sub__(self, other: Tensor) -> Tensor:
        return self + (-other)

    def scale(self, c) -> Tensor:
        kind = "eps" if isinstance(c, EpsLaurent) or self.kind == "eps" else "cyc"
        return _finish(self.shape, {k: v * c for k, v in self.entries.items()}, kind)

    def as_eps(self) -> Tensor:
        if self.kind == "eps":
            return self
        return Tensor(self.shape, {k: to_eps(v) for k, v in self.entries.items()}, "eps")

    # eps-tensor helpers ------------------------------------------------
    def eps_orders(self) -> tuple[int, int]:
        """(lowest, highest) eps exponent over all entries of an eps tensor."""
        if self.kind != "eps":
            return (0, 0)
        if not self.entries:
            raise ZeroTensor("zero tensor has no eps orders")
        lows = [v.lowest()[0] for v in self.entries.values()]
        highs = [v.highest() for v in self.entries.values()]
        return min(lows), max(highs)

    def eps_coefficient(self, k: int) -> Tensor:
        """The cyclotomic tensor multiplying eps^k."""
        if self.kind != "eps":
            return self if k == 0 else Tensor.zeros(self.shape)
        out = {}
        for idx, v in self.entries.items():
            c = v.coeff(k)
            if not c.is_zero():
                out[idx] = c
        return Tensor(self.shape, out, "cyc")

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, nnz={self.nnz}, kind={self.kind!r})"


def _finish(shape, acc: Mapping[Index, object], kind: str) -> Tensor:
    out = {}
    for k, v in acc.items():
        v = _coerce(v, kind)
        if not v.is_zero():
            out[k] = v
    return Tensor(shape, out, kind)


def build_tensor(
    shape: Sequence[int],
    entries: Iterable[tuple[Sequence[int], object]] | Mapping[Sequence[int], object],
    kind: str | None = None,
) -> Tensor:
    """Validated construction; duplicate indices are summed, zeros dropped."""
    shape = tuple(int(d) for d in shape)
    if not shape or any(d < 1 for d in shape):
        raise ShapeMismatch(f"bad shape {shape}")
    items = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
    if kind is None:
        kind = "eps" if any(isinstance(v, EpsLaurent) for _, v in items) else "cyc"
    acc: dict[Index, object] = {}
    for idx, v in items:
        idx = tuple(int(j) for j in idx)
        if len(idx) != len(shape) or any(not 0 <= j < d for j, d in zip(idx, shape)):
            raise IndexOutOfShape(f"index {idx} outside shape {shape}")
        v = _coerce(v, kind)
        acc[idx] = acc[idx] + v if idx in acc else v
    return _finish(shape, acc, kind)


def basis_tensor(shape: Sequence[int], idx: Sequence[int], value=1) -> Tensor:
    return build_tensor(shape, [(idx, value)])


def outer(vectors: Sequence[Sequence[object]], scale=1) -> dict[Index, object]:
    """Raw (unreduced) entries of scale * v_1 x ... x v_n, skipping zero components."""
    partial: dict[Index, object] = {(): scale}
    for vec in vectors:
        nz = [(j, x) for j, x in enumerate(vec) if x]
        partial = {idx + (j,): v * x for idx, v in partial.items() for j, x in nz}
        if not partial:
            break
    return partial


def _check_kinds(a: Tensor, b: Tensor) -> str:
    if a.kind != b.kind and not (a.is_zero() or b.is_zero()):
        raise ScalarKindMismatch(f"{a.kind} vs {b.kind}")
    return a.kind if not a.is_zero() else b.kind


def tensor_product(a: Tensor, b: Tensor) -> Tensor:
    kind = _check_kinds(a, b)
    acc = {i + j: x * y for i, x in a.entries.items() for j, y in b.entries.items()}
    return _finish(a.shape + b.shape, acc, kind)


def kronecker_product(a: Tensor, b: Tensor) -> Tensor:
    """Pair the first arity(a) factors; index (j, j') on a paired factor becomes j*d' + j'."""
    if a.arity > b.arity:
        raise ArityMismatch("kronecker_product needs arity(a) <= arity(b)")
    kind = _check_kinds(a, b)
    na = a.arity
    shape = tuple(da * db for da, db in zip(a.shape, b.shape)) + b.shape[na:]
    acc = {}
    for i, x in a.entries.items():
        for j, y in b.entries.items():
            idx = tuple(ii * b.shape[k] + jj for k, (ii, jj) in enumerate(zip(i, j))) + j[na:]
            acc[idx] = x * y
    return _finish(shape, acc, kind)


def direct_sum(a: Tensor, b: Tensor) -> Tensor:
    if a.arity != b.arity:
        raise ArityMismatch(f"arity {a.arity} vs {b.arity}")
    kind = _check_kinds(a, b)
    shape = tuple(x + y for x, y in zip(a.shape, b.shape))
    acc = dict(a.entries)
    for j, y in b.entries.items():
        acc[tuple(jj + d for jj, d in zip(j, a.shape))] = y
    return Tensor(shape, {k: _coerce(v, kind) for k, v in acc.items()}, kind)


def contract(t: Tensor, factor: int, f: Sequence[object]) -> Tensor:
    """<f| applied to factor ``factor`` (0-based)."""
    if not 0 <= factor < t.arity:
        raise IndexOutOfShape(f"factor {factor} out of range")
    if len(f) != t.shape[factor]:
        raise DimMismatch(f"covector has length {len(f)}, factor has dim {t.shape[factor]}")
    acc: dict[Index, object] = {}
    for idx, v in t.entries.items():
        c = f[idx[factor]]
        if not c:
            continue
        key = idx[:factor] + idx[factor + 1:]
        term = v * c
        acc[key] = acc[key] + term if key in acc else term
    kind = "eps" if t.kind == "eps" or any(isinstance(c, EpsLaurent) for c in f) else "cyc"
    return _finish(t.shape[:factor] + t.shape[factor + 1:], acc, kind)


def relabel(t: Tensor, maps: Sequence[Sequence[int] | None], shape: Sequence[int] | None = None) -> Tensor:
    """Send basis index j of factor i to maps[i][j] (None leaves a factor alone)."""
    shape = tuple(shape) if shape is not None else t.shape
    out = {}
    for idx, v in t.entries.items():
        new = tuple(m[j] if m is not None else j for j, m in zip(idx, maps))
        out[new] = v
    return build_tensor(shape, out.items(), t.kind)


def permute_factors(t: Tensor, order: Sequence[int]) -> Tensor:
    """Factor k of the result is factor order[k] of t."""
    shape = tuple(t.shape[o] for o in order)
    return Tensor(shape, {tuple(idx[o] for o in order): v for idx, v in t.entries.items()}, t.kind)


@dataclass(frozen=True)
class Bipartition:
    """A cut S | complement over factors 0..n-1 (0-based)."""

    n: int
    members: frozenset[int]

    def __post_init__(self):
        members = frozenset(self.members)
        object.__setattr__(self, "members", members)
        if not members or len(members) >= self.n or any(not 0 <= m < self.n for m in members):
            raise ValueError(f"bipartition {sorted(members)} of {self.n} factors must be nonempty and proper")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> Bipartition:
        return cls(n, frozenset(members))

    def complement(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.members

    def label(self) -> str:
        return ",".join(str(m) for m in sorted(self.members))


def all_bipartitions(n: int) -> list[Bipartition]:
    """One representative per cut: those containing factor 0."""
    out = []
    rest = list(range(1, n))
    for size in range(0, n - 1):
        for combo in itertools.combinations(rest, size):
            out.append(Bipartition(n, frozenset((0,) + combo)))
    return out


def flattening_rows(t: Tensor, rows: Sequence[int]) -> list[dict[int, object]]:
    """Sparse rows of the flattening with row factors ``rows``; lexicographic orderings."""
    rows = sorted(rows)
    cols = [k for k in range(t.arity) if k not in rows]
    col_dims = [t.shape[k] for k in cols]
    table: dict[Index, dict[int, object]] = {}
    for idx, v in t.entries.items():
        r = tuple(idx[k] for k in rows)
        c = 0
        for k, d in zip(cols, col_dims):
            c = c * d + idx[k]
        table.setdefault(r, {})[c] = v
    return [table[r] for r in sorted(table)]


def _flattening_rank(t: Tensor, rows: Sequence[int]) -> int:
    if t.kind != "cyc":
        raise ScalarKindMismatch("ranks are defined for cyclotomic tensors only")
    if t.is_zero():
        return 0
    cols = [k for k in range(t.arity) if k not in rows]
    a = flattening_rows(t, rows)
    b = flattening_rows(t, cols)
    return sparse_rank(a if len(a) <= len(b) else b)


def schmidt_rank(t: Tensor, s: Bipartition) -> int:
    if t.is_zero():
        raise ZeroTensor("Schmidt rank of the zero tensor")
    if s.n != t.arity:
        raise ArityMismatch(f"bipartition over {s.n} factors, tensor has {t.arity}")
    return _flattening_rank(t, sorted(s.members))


def mode_rank(t: Tensor, factor: int) -> int:
    return _flattening_rank(t, [factor])


def multilinear_profile(t: Tensor) -> tuple[list[int], list[bool]]:
    ranks = [mode_rank(t, i) for i in range(t.arity)]
    return ranks, [r == d for r, d in zip(ranks, t.shape)]


def is_concise(t: Tensor, factor: int | None = None) -> bool:
    if factor is not None:
        return mode_rank(t, factor) == t.shape[factor]
    return all(multilinear_profile(t)[1])


@dataclass(frozen=True)
class LocalMap:
    """One matrix per factor; matrices[i][r][c] is <r|A_i|c>."""

    matrices: tuple[tuple[tuple[object, ...], ...], ...]

    def __init__(self, matrices):
        object.__setattr__(self, "matrices", tuple(tuple(tuple(row) for row in m) for m in matrices))

    @property
    def arity(self) -> int:
        return len(self.matrices)

    def in_dims(self) -> tuple[int, ...]:
        return tuple(len(m[0]) for m in self.matrices)

    def out_dims(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.matrices)

    def is_eps(self) -> bool:
        return any(isinstance(x, EpsLaurent) for m in self.matrices for row in m for x in row)

    @classmethod
    def identity(cls, shape: Sequence[int]) -> LocalMap:
        return cls([[[int(r == c) for c in range(d)] for r in range(d)] for d in shape])

    @classmethod
    def diagonal(cls, diags: Sequence[Sequence[object]]) -> LocalMap:
        zero = 0
        return cls([[[diag[r] if r == c else zero for c in range(len(diag))] for r in range(len(diag))] for diag in diags])

    def compose(self, after: LocalMap) -> LocalMap:
        """The map ``after`` o ``self``."""
        from .linalg import matmul

        if after.in_dims() != self.out_dims():
            raise DimMismatch("maps do not compose")
        return LocalMap([matmul(b, a) for a, b in zip(self.matrices, after.matrices)])

    def substitute_power(self, k: int) -> LocalMap:
        """Replace eps by eps^k in every entry."""

        def sub(x):
            if isinstance(x, EpsLaurent):
                return EpsLaurent({e * k: c for e, c in x.terms.items()})
            return x

        return LocalMap([[[sub(x) for x in row] for row in m] for m in self.matrices])


def apply_matrix(vec: Sequence[object], mat: Sequence[Sequence[object]]) -> list[object]:
    if len(vec) != len(mat[0]):
        raise DimMismatch(f"vector of length {len(vec)} vs matrix with {len(mat[0])} columns")
    out = []
    for row in mat:
        acc = 0
        for a, x in zip(row, vec):
            if a and x:
                acc = acc + a * x
        out.append(acc)
    return out


def slocc_apply(t: Tensor, m: LocalMap) -> Tensor:
    if m.arity != t.arity:
        raise ArityMismatch(f"map has {m.arity} factors, tensor has {t.arity}")
    if m.in_dims() != t.shape:
        raise DimMismatch(f"map input dims {m.in_dims()} vs shape {t.shape}")
    kind = "eps" if t.kind == "eps" or m.is_eps() else "cyc"
    entries: dict[Index, object] = dict(t.entries)
    shape = list(t.shape)
    for i, mat in enumerate(m.matrices):
        cols: dict[int, list[tuple[int, object]]] = {}
        for r, row in enumerate(mat):
            for c, a in enumerate(row):
                if a:
                    cols.setdefault(c, []).append((r, a))
        acc: dict[Index, object] = {}
        for idx, v in entries.items():
            for r, a in cols.get(idx[i], ()):
                key = idx[:i] + (r,) + idx[i + 1:]
                term = a * v
                acc[key] = acc[key] + term if key in acc else term
        shape[i] = len(mat)
        entries = _finish(shape, acc, kind).entries
    return Tensor(shape, entries, kind)
