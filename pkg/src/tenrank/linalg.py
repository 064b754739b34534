"""Exact linear algebra over Q and Q(zeta_m).

Rank uses incremental sparse elimination.  Rows with only rational entries
are handled fraction-free over the integers (each row is scaled to a
primitive integer vector after every update); rows with cyclotomic entries
fall back to field elimination with monic pivot rows.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DivisionByZero
from .scalars import Cyclotomic, to_cyc

SparseRow = dict[int, object]


def _rational_row(row: SparseRow) -> dict[int, int] | None:
    out: dict[int, Fraction] = {}
    for j, v in row.items():
        q = v.as_rational() if isinstance(v, Cyclotomic) else Fraction(v)
        if q is None:
            return None
        if q:
            out[j] = q
    den = 1
    for q in out.values():
        den = den * q.denominator // math.gcd(den, q.denominator)
    return _primitive({j: int(q * den) for j, q in out.items()})


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {j: v // g for j, v in row.items()}
    return row


def _rank_integer(rows: list[dict[int, int]]) -> int:
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = {j: v for j, v in row.items() if v}
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = row
                break
            a, p = row[lead], piv[lead]
            g = math.gcd(a, p)
            a, p = a // g, p // g
            new = {j: v * p for j, v in row.items()}
            for j, v in piv.items():
                new[j] = new.get(j, 0) - a * v
            row = _primitive({j: v for j, v in new.items() if v})
    return len(pivots)


def _rank_field(rows: list[SparseRow]) -> int:
    pivots: dict[int, dict[int, Cyclotomic]] = {}
    for row in rows:
        row = {j: to_cyc(v) for j, v in row.items()}
        row = {j: v for j, v in row.items() if not v.is_zero()}
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                inv = row[lead].inverse()
                pivots[lead] = {j: v * inv for j, v in row.items()}
                break
            a = row[lead]
            new = dict(row)
            for j, v in piv.items():
                new[j] = new[j] - a * v if j in new else -(a * v)
            row = {j: v for j, v in new.items() if not v.is_zero()}
    return len(pivots)


def sparse_rank(rows: Iterable[SparseRow]) -> int:
    """Exact rank of a matrix given as sparse rows (column -> scalar)."""
    rows = list(rows)
    ints = []
    for r in rows:
        ir = _rational_row(r)
        if ir is None:
            return _rank_field(rows)
        ints.append(ir)
    return _rank_integer(ints)


def matrix_rank(matrix: Sequence[Sequence[object]]) -> int:
    return sparse_rank({j: v for j, v in enumerate(row) if v} for row in matrix)


def solve(matrix: Sequence[Sequence[object]], rhs: Sequence[object]) -> list[Cyclotomic] | None:
    """One solution x of ``matrix @ x = rhs`` or None if inconsistent."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    aug = [[to_cyc(v) for v in matrix[i]] + [to_cyc(rhs[i])] for i in range(rows)]
    pivcols = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if not aug[i][c].is_zero()), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        inv = aug[r][c].inverse()
        aug[r] = [v * inv for v in aug[r]]
        for i in range(rows):
            if i != r and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivcols.append(c)
        r += 1
    if any(not aug[i][cols].is_zero() for i in range(r, rows)):
        return None
    x = [Cyclotomic() for _ in range(cols)]
    for i, c in enumerate(pivcols):
        x[c] = aug[i][cols]
    return x


def inverse(matrix: Sequence[Sequence[object]]) -> list[list[Cyclotomic]]:
    n = len(matrix)
    aug = [[to_cyc(v) for v in matrix[i]] + [to_cyc(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if not aug[i][c].is_zero()), None)
        if p is None:
            raise DivisionByZero("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        inv = aug[c][c].inverse()
        aug[c] = [v * inv for v in aug[c]]
        for i in range(n):
            if i != c and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def matmul(a: Sequence[Sequence[object]], b: Sequence[Sequence[object]]) -> list[list[object]]:
    inner = len(b)
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            acc = 0
            for k in range(inner):
                if row[k] and b[k][j]:
                    acc = acc + row[k] * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def independent_subset(vectors: Sequence[Sequence[object]]) -> list[int]:
    """Indices of a greedily chosen maximal independent subset, in input order."""
    chosen: list[int] = []
    rank = 0
    rows: list[SparseRow] = []
    for i, v in enumerate(vectors):
        trial = rows + [{j: x for j, x in enumerate(v) if x}]
        r = sparse_rank(trial)
        if r > rank:
            rows, rank = trial, r
            chosen.append(i)
    return chosen
