"""Exact scalars: rationals, cyclotomic numbers and Laurent polynomials in eps.

Rationals are plain :class:`fractions.Fraction` (or ``int``).  A
:class:`Cyclotomic` of order ``m`` lives in Q(zeta_m) with
zeta_m = exp(2 pi i / m).  Internally it keeps a sparse representative in
Q[x]/(x^m - 1) so products of roots of unity stay monomials; the canonical
form (coefficients modulo the cyclotomic polynomial Phi_m) is computed on
demand and is what equality, hashing and printing use.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Union

from .errors import DivisionByZero, ScalarParseError, ZeroPolynomial

RationalLike = Union[int, Fraction]


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    """Divide integer polynomials; ``den`` must be monic and divide ``num``."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c:
            out[k - dn] = c
            for i, di in enumerate(den):
                num[k - dn + i] -= c * di
    if any(num[:dn]):
        raise ArithmeticError("polynomial division is not exact")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, by dividing x^m - 1 by Phi_k for proper divisors k."""
    if m < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (m - 1) + [1]
    for k in range(1, m):
        if m % k == 0:
            poly = _poly_exact_div(poly, list(cyclotomic_polynomial(k)))
    return tuple(poly)


def totient(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


@lru_cache(maxsize=None)
def _reduction_table(m: int) -> tuple[tuple[int, ...], ...]:
    # row k = coefficients of x^k mod Phi_m, for 0 <= k < m
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for i in range(deg):
                cur[i] -= lead * phi[i]
    return tuple(rows)


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


@lru_cache(maxsize=None)
def _normalized_traces(m: int) -> tuple[Fraction, ...]:
    # Tr(zeta_m^k) / phi(m), which does not depend on the ambient field
    out = []
    for k in range(m):
        q = m // math.gcd(k, m)
        out.append(Fraction(_mobius(q), totient(q)))
    return tuple(out)


def _as_rational(x) -> Fraction | int:
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"not a rational: {x!r}")


# ---------------------------------------------------------------------------
# Cyclotomic
# ---------------------------------------------------------------------------


class Cyclotomic:
    """Element of Q(zeta_m).  Immutable."""

    __slots__ = ("order", "_raw", "_canon")

    def __init__(self, order: int = 1, raw: dict[int, RationalLike] | None = None):
        if order < 1:
            raise ValueError("order must be positive")
        self.order = order
        clean: dict[int, RationalLike] = {}
        for k, c in (raw or {}).items():
            if c:
                k %= order
                v = clean.get(k, 0) + c
                if v:
                    clean[k] = v
                else:
                    clean.pop(k, None)
        self._raw = clean
        self._canon: tuple[Fraction, ...] | None = None

    # constructors -----------------------------------------------------
    @classmethod
    def rational(cls, q: RationalLike) -> Cyclotomic:
        return cls(1, {0: _as_rational(q)})

    @classmethod
    def root(cls, m: int, k: int = 1) -> Cyclotomic:
        return cls(m, {k: 1})

    @classmethod
    def from_coeffs(cls, m: int, coeffs) -> Cyclotomic:
        coeffs = list(coeffs)
        if len(coeffs) != totient(m):
            raise ValueError(f"expected {totient(m)} coefficients for order {m}")
        return cls(m, {k: _as_rational(c) for k, c in enumerate(coeffs)})

    # canonical form ---------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        """Coefficients of the reduced representative modulo Phi_m."""
        if self._canon is None:
            table = _reduction_table(self.order)
            acc = [0] * totient(self.order)
            for k, c in self._raw.items():
                for i, r in enumerate(table[k]):
                    if r:
                        acc[i] += c * r
            self._canon = tuple(Fraction(a) for a in acc)
        return self._canon

    def is_zero(self) -> bool:
        if not self._raw:
            return True
        if len(self._raw) == 1:
            return False
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def as_rational(self) -> Fraction | None:
        """The value as a Fraction when it is rational, else None."""
        if not self._raw:
            return Fraction(0)
        if self.order == 1:
            return Fraction(self._raw.get(0, 0))
        c = self.coeffs
        return c[0] if not any(c[1:]) else None

    def lift(self, m: int) -> Cyclotomic:
        """Embed into Q(zeta_m); ``m`` must be a multiple of the order."""
        if m == self.order:
            return self
        if m % self.order:
            raise ValueError(f"cannot lift order {self.order} to {m}")
        f = m // self.order
        return Cyclotomic(m, {k * f: c for k, c in self._raw.items()})

    def _pair(self, other) -> tuple[Cyclotomic, Cyclotomic] | None:
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.rational(other)
            except TypeError:
                return None
        if other.order == self.order:
            return self, other
        if other.order == 1:
            return self, Cyclotomic(self.order, other._raw)
        if self.order == 1:
            return Cyclotomic(other.order, self._raw), other
        m = math.lcm(self.order, other.order)
        return self.lift(m), other.lift(m)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        raw = dict(a._raw)
        for k, c in b._raw.items():
            raw[k] = raw.get(k, 0) + c
        return Cyclotomic(a.order, raw)

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic(self.order, {k: -c for k, c in self._raw.items()})

    def __sub__(self, other):
        if not isinstance(other, (Cyclotomic, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Cyclotomic(self.order)
            return Cyclotomic(self.order, {k: c * other for k, c in self._raw.items()})
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        m = a.order
        raw: dict[int, RationalLike] = {}
        for k1, c1 in a._raw.items():
            for k2, c2 in b._raw.items():
                k = (k1 + k2) % m
                raw[k] = raw.get(k, 0) + c1 * c2
        return Cyclotomic(m, raw)

    __rmul__ = __mul__

    def inverse(self) -> Cyclotomic:
        if self.is_zero():
            raise DivisionByZero("inverse of zero cyclotomic")
        if len(self._raw) == 1:
            (k, c), = self._raw.items()
            return Cyclotomic(self.order, {-k: Fraction(1) / c})
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        inv = _poly_inverse_mod(list(self.coeffs), phi)
        return Cyclotomic.from_coeffs(self.order, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DivisionByZero("division by zero")
            return self * (Fraction(1) / other)
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int) -> Cyclotomic:
        if e < 0:
            return self.inverse() ** (-e)
        result = Cyclotomic.rational(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> Cyclotomic:
        return Cyclotomic(self.order, {-k: c for k, c in self._raw.items()})

    # comparison -------------------------------------------------------
    def __eq__(self, other) -> bool:
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        traces = _normalized_traces(self.order)
        return hash(sum((c * traces[k] for k, c in self._raw.items()), Fraction(0)))

    def to_complex(self) -> complex:
        w = 2 * math.pi / self.order
        return sum(
            (float(c) * complex(math.cos(w * k), math.sin(w * k)) for k, c in enumerate(self.coeffs)),
            0j,
        )

    def __str__(self) -> str:
        return format_cyclotomic(self)

    def __repr__(self) -> str:
        return f"Cyclotomic({self.order}, {format_cyclotomic(self)!r})"


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = _poly_trim(list(a))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        s = len(a) - len(b)
        q[s] = c
        for i, bi in enumerate(b):
            a[s + i] -= c * bi
        _poly_trim(a)
    return q, a


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return _poly_trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _poly_inverse_mod(a: list[Fraction], mod: list[Fraction]) -> list[Fraction]:
    """Inverse of ``a`` modulo the irreducible ``mod`` by the extended Euclidean algorithm."""
    r0, r1 = _poly_trim(list(mod)), _poly_trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1:
        raise DivisionByZero("element is not invertible")
    c = r1[0]
    s1 = _poly_divmod(s1, mod)[1] if len(s1) >= len(mod) else s1
    deg = len(mod) - 1
    out = [x / c for x in s1] + [Fraction(0)] * (deg - len(s1))
    return out[:deg]


def to_cyc(x) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    return Cyclotomic.rational(x)


def cyc_root(m: int, k: int) -> Cyclotomic:
    """zeta_m^k."""
    if m < 1:
        raise ValueError("order must be positive")
    return Cyclotomic.root(m, k)


def cyc_arith(op: str, a, b=None) -> Cyclotomic:
    a = to_cyc(a)
    if op == "add":
        return a + to_cyc(b)
    if op == "mul":
        return a * to_cyc(b)
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


def root_filter_sum(r: int, q: int) -> Fraction:
    """Sum of zeta_r^(p q) over p = 0..r-1, computed in Q(zeta_r)."""
    if r < 1:
        raise ValueError("r must be positive")
    total = Cyclotomic(r)
    for p in range(r):
        total = total + Cyclotomic.root(r, p * q)
    value = total.as_rational()
    assert value is not None, "root filter sum must be rational"
    return value


# ---------------------------------------------------------------------------
# EpsLaurent
# ---------------------------------------------------------------------------


class EpsLaurent:
    """Laurent polynomial in eps with cyclotomic coefficients.  Immutable."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, object] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = to_cyc(c)
            if not c.is_zero():
                clean[int(k)] = c
        self._terms: dict[int, Cyclotomic] = clean

    @classmethod
    def monomial(cls, k: int, coeff=1) -> EpsLaurent:
        return cls({k: coeff})

    @classmethod
    def const(cls, c) -> EpsLaurent:
        return cls({0: c})

    @property
    def terms(self) -> dict[int, Cyclotomic]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coeff(self, k: int) -> Cyclotomic:
        return self._terms.get(k, Cyclotomic())

    def lowest(self) -> tuple[int, Cyclotomic]:
        if not self._terms:
            raise ZeroPolynomial("zero Laurent polynomial has no lowest term")
        k = min(self._terms)
        return k, self._terms[k]

    def highest(self) -> int:
        if not self._terms:
            raise ZeroPolynomial("zero Laurent polynomial has no highest term")
        return max(self._terms)

    def scale_by_power(self, k: int) -> EpsLaurent:
        return EpsLaurent({e + k: c for e, c in self._terms.items()})

    @staticmethod
    def _wrap(x) -> EpsLaurent | None:
        if isinstance(x, EpsLaurent):
            return x
        if isinstance(x, (Cyclotomic, int, Fraction)):
            return EpsLaurent({0: x})
        return None

    def __add__(self, other):
        other = self._wrap(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return EpsLaurent(terms)

    __radd__ = __add__

    def __neg__(self) -> EpsLaurent:
        return EpsLaurent({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._wrap(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Cyclotomic, int, Fraction)):
            return EpsLaurent({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, EpsLaurent):
            return NotImplemented
        terms: dict[int, Cyclotomic] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                v = c1 * c2
                terms[k] = terms[k] + v if k in terms else v
        return EpsLaurent(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Cyclotomic, int, Fraction)):
            return self * (1 / to_cyc(other))
        if isinstance(other, EpsLaurent):
            if len(other._terms) != 1:
                raise DivisionByZero("only division by eps-monomials is exact")
            (k, c), = other._terms.items()
            return self.scale_by_power(-k) * c.inverse()
        return NotImplemented

    def __eq__(self, other) -> bool:
        other = self._wrap(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if set(self._terms) <= {0}:
            return hash(self.coeff(0))
        return hash(tuple(sorted((k, hash(c)) for k, c in self._terms.items())))

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"EpsLaurent({format_scalar(self)!r})"


def eps_arith(op: str, a: EpsLaurent, b) -> EpsLaurent:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale_by_power":
        return a.scale_by_power(int(b))
    raise ValueError(f"unknown op {op!r}")


def eps_lowest(a: EpsLaurent) -> tuple[int, Cyclotomic]:
    return a.lowest()


EPS = EpsLaurent.monomial(1)


def to_eps(x) -> EpsLaurent:
    if isinstance(x, EpsLaurent):
        return x
    return EpsLaurent({0: x})


def is_zero(x) -> bool:
    if isinstance(x, (Cyclotomic, EpsLaurent)):
        return x.is_zero()
    return x == 0


# ---------------------------------------------------------------------------
# literal grammar
# ---------------------------------------------------------------------------


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _cyc_terms(c: Cyclotomic, suffix: str = "") -> list[str]:
    out = []
    for k, q in enumerate(c.coeffs):
        if not q:
            continue
        if k == 0 or c.order == 1:
            if suffix:
                body = suffix if abs(q) == 1 else f"{_fmt_rat(abs(q))}*{suffix}"
            else:
                body = _fmt_rat(abs(q))
        else:
            mono = f"z{c.order}^{k}" + (f"*{suffix}" if suffix else "")
            body = mono if abs(q) == 1 else f"{_fmt_rat(abs(q))}*{mono}"
        out.append(("-" if q < 0 else "+") + body)
    return out


def _join(parts: list[str]) -> str:
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


def format_cyclotomic(c: Cyclotomic) -> str:
    return _join(_cyc_terms(c))


def format_scalar(x) -> str:
    """Canonical literal for a rational, cyclotomic or eps-Laurent scalar."""
    if isinstance(x, EpsLaurent):
        parts = []
        for k in sorted(x._terms):
            parts.extend(_cyc_terms(x._terms[k], f"e^{k}" if k else ""))
        return _join(parts)
    return format_cyclotomic(to_cyc(x))


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|z(?P<zm>\d+)(?:\^(?P<zk>-?\d+))?|e(?:\^(?P<ek>-?\d+))?|(?P<op>[-+*]))")


def parse_scalar(text: str, kind: str | None = None):
    """Parse a scalar literal such as ``2*z12^5-1/3`` or ``z4^1*e^-2+1``.

    Returns a Cyclotomic unless an ``e`` factor appears or ``kind == "eps"``.
    """
    pos, s = 0, text.strip()
    if not s:
        raise ScalarParseError("empty scalar literal")
    terms: list[tuple[int, Cyclotomic]] = []
    sign, factor, exp, expect_factor, seen = 1, Cyclotomic.rational(1), 0, True, False

    def flush():
        terms.append((exp, factor * sign))

    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ScalarParseError(f"bad scalar literal {text!r} at {pos}")
        pos = m.end()
        op = m.group("op")
        if op and op in "+-":
            if expect_factor and not seen:
                sign = -sign if op == "-" else sign
                continue
            if expect_factor:
                raise ScalarParseError(f"dangling operator in {text!r}")
            flush()
            sign, factor, exp, expect_factor, seen = (-1 if op == "-" else 1), Cyclotomic.rational(1), 0, True, False
            continue
        if op == "*":
            if expect_factor:
                raise ScalarParseError(f"dangling '*' in {text!r}")
            expect_factor = True
            continue
        if not expect_factor:
            raise ScalarParseError(f"missing operator in {text!r}")
        if m.group("num") is not None:
            factor = factor * Fraction(m.group("num"))
        elif m.group("zm") is not None:
            order = int(m.group("zm"))
            if order < 1:
                raise ScalarParseError("cyclotomic order must be positive")
            factor = factor * Cyclotomic.root(order, int(m.group("zk") or 1))
        else:
            exp += int(m.group("ek") or 1)
        expect_factor, seen = False, True
    if expect_factor:
        raise ScalarParseError(f"incomplete scalar literal {text!r}")
    flush()
    if kind == "eps" or any(e for e, _ in terms):
        acc = EpsLaurent()
        for e, c in terms:
            acc = acc + EpsLaurent.monomial(e, c)
        return acc
    acc = Cyclotomic()
    for _, c in terms:
        acc = acc + c
    return acc
