"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Values are stored as sparse rational combinations of powers of zeta_N in a
canonical basis: for each prime power p^a dividing N exactly, the top base-p
digit of the exponent mod p^a must differ from p-1.  Exponents violating the
constraint are rewritten with zeta^k = -sum_{j=1..p-1} zeta^{k + j*N/p},
prime by prime.  The order N is always reduced to the conductor of the value,
so equal values have identical (order, coeffs) and hash exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

ORDER_CAP = 2520


class OrderCapError(ValueError):
    """Requested cyclotomic order exceeds the configured cap."""


def set_order_cap(n: int) -> None:
    global ORDER_CAP
    if n < 1:
        raise ValueError("order cap must be positive")
    ORDER_CAP = n


@lru_cache(maxsize=None)
def _prime_powers(n):
    """[(p, p^a, n//p)] for each prime p | n."""
    out = []
    m, p = n, 2
    while p * p <= m:
        if m % p == 0:
            pa = p
            while m % p == 0:
                m //= p
                pa *= p
            out.append((p, pa // p, n // p))
        p += 1
    if m > 1:
        out.append((m, m, n // m))
    return tuple(out)


@lru_cache(maxsize=None)
def _rewrite(n, k):
    """Canonical expansion of zeta_n^k as ((exponent, sign), ...)."""
    terms = {k % n: 1}
    for p, pa, step in _prime_powers(n):
        top_unit = pa // p  # pa = p^a; digit of p^(a-1)
        out = {}
        for e, c in terms.items():
            if (e % pa) // top_unit == p - 1:
                for j in range(1, p):
                    e2 = (e + j * step) % n
                    out[e2] = out.get(e2, 0) - c
            else:
                out[e] = out.get(e, 0) + c
        terms = out
    return tuple(sorted((e, c) for e, c in terms.items() if c))


@lru_cache(maxsize=None)
def _basis_exponents(n):
    return tuple(k for k in range(n) if _rewrite(n, k) == ((k, 1),))


def _canon(n, raw):
    """Reduce a dict {exponent: Fraction} to canonical basis form at order n."""
    out = {}
    for k, c in raw.items():
        if not c:
            continue
        for e, s in _rewrite(n, k % n):
            v = out.get(e, 0) + (c if s > 0 else -c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _gal(n, coeffs, j):
    """Apply zeta_n -> zeta_n^j (gcd(j, n) = 1) and recanonicalize."""
    return _canon(n, _merge({}, (((k * j) % n, c) for k, c in coeffs.items())))


def _merge(out, items):
    for k, c in items:
        out[k] = out.get(k, 0) + c
    return out


@lru_cache(maxsize=None)
def _down_solver(n, d):
    """Row-reduced data expressing order-n canonical vectors in the order-d basis.

    Returns (columns, rowidx, ops) where applying ops to a dense vector over
    _basis_exponents(n) yields the order-d coordinates followed by entries that
    must vanish when the value lies in Q(zeta_d).
    """
    bn = _basis_exponents(n)
    bd = _basis_exponents(d)
    pos = {e: i for i, e in enumerate(bn)}
    cols = []
    for b in bd:
        col = [Fraction(0)] * len(bn)
        for e, c in _canon(n, {(b * (n // d)) % n: Fraction(1)}).items():
            col[pos[e]] = c
        cols.append(col)
    # Gaussian elimination on the transpose-augmented system [M | I].
    rows = len(bn)
    m = [[cols[j][i] for j in range(len(bd))] for i in range(rows)]
    e = [[Fraction(int(i == j)) for j in range(rows)] for i in range(rows)]
    piv = 0
    for col in range(len(bd)):
        sel = next(i for i in range(piv, rows) if m[i][col])
        m[piv], m[sel] = m[sel], m[piv]
        e[piv], e[sel] = e[sel], e[piv]
        inv = 1 / m[piv][col]
        m[piv] = [x * inv for x in m[piv]]
        e[piv] = [x * inv for x in e[piv]]
        for i in range(rows):
            if i != piv and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[piv])]
                e[i] = [a - f * b for a, b in zip(e[i], e[piv])]
        piv += 1
    return bn, bd, e


def _down(n, d, coeffs):
    bn, bd, e = _down_solver(n, d)
    vec = [coeffs.get(k, Fraction(0)) for k in bn]
    sol = [sum(e[i][j] * vec[j] for j in range(len(bn)) if vec[j]) for i in range(len(bn))]
    assert all(x == 0 for x in sol[len(bd):]), "down-conversion applied outside subfield"
    return {b: sol[i] for i, b in enumerate(bd) if sol[i]}


def _conductor_reduce(n, coeffs):
    """Minimize the order so that coeffs live at the value's conductor."""
    changed = True
    while changed and n > 1:
        changed = False
        for p, _, _ in _prime_powers(n):
            d = n // p
            fixing = [j for j in range(1, n, d) if gcd(j, n) == 1]
            if all(_gal(n, coeffs, j) == coeffs for j in fixing if j != 1):
                coeffs = _down(n, d, coeffs)
                n = d
                changed = True
                break
    return n, coeffs


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact rational")


class Cyclotomic:
    """An exact element of Q(zeta_N), stored at its conductor."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order, coeffs, _canonical=False):
        if not _canonical:
            if order > ORDER_CAP:
                raise OrderCapError(f"cyclotomic order {order} exceeds cap {ORDER_CAP}")
            coeffs = _canon(order, {k: _as_fraction(c) for k, c in coeffs.items()})
            order, coeffs = _conductor_reduce(order, coeffs)
        self.order = order
        self.coeffs = coeffs
        self._hash = None

    # construction ---------------------------------------------------------

    @staticmethod
    def rational(q) -> "Cyclotomic":
        q = _as_fraction(q)
        return Cyclotomic(1, {0: q} if q else {}, _canonical=True)

    @staticmethod
    def zeta(n, k=1) -> "Cyclotomic":
        if n < 1:
            raise ValueError("root-of-unity order must be positive")
        return Cyclotomic(n, {k % n: Fraction(1)})

    @staticmethod
    def zero() -> "Cyclotomic":
        return Cyclotomic(1, {}, _canonical=True)

    @staticmethod
    def one() -> "Cyclotomic":
        return Cyclotomic.rational(1)

    @staticmethod
    def coerce(x) -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x
        return Cyclotomic.rational(_as_fraction(x))

    # predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return self.order == 1

    def rational_value(self) -> Fraction:
        if self.order != 1:
            raise ValueError(f"{self} is not rational")
        return self.coeffs.get(0, Fraction(0))

    # embedding ------------------------------------------------------------

    def coeffs_at(self, n):
        """Coefficients of this value in the canonical basis of Q(zeta_n)."""
        if n % self.order:
            raise ValueError(f"order {self.order} does not divide {n}")
        if n > ORDER_CAP:
            raise OrderCapError(f"cyclotomic order {n} exceeds cap {ORDER_CAP}")
        t = n // self.order
        return _canon(n, {(k * t) % n: c for k, c in self.coeffs.items()})

    def sort_key(self, n=None):
        """Deterministic total-order key; comparable across values when a common n is given."""
        n = n or self.order
        c = self.coeffs_at(n)
        return tuple(c.get(k, Fraction(0)) for k in _basis_exponents(n))

    # ring operations ------------------------------------------------------

    def _common(self, other):
        other = Cyclotomic.coerce(other)
        n = lcm(self.order, other.order)
        if n > ORDER_CAP:
            raise OrderCapError(f"cyclotomic order {n} exceeds cap {ORDER_CAP}")
        return n, other

    def __add__(self, other):
        n, other = self._common(other)
        raw = dict(self.coeffs_at(n))
        _merge(raw, other.coeffs_at(n).items())
        return Cyclotomic(n, raw)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, {k: -c for k, c in self.coeffs.items()}, _canonical=True)

    def __sub__(self, other):
        return self + (-Cyclotomic.coerce(other))

    def __rsub__(self, other):
        return Cyclotomic.coerce(other) - self

    def __mul__(self, other):
        other = Cyclotomic.coerce(other)
        if other.is_rational():
            q = other.rational_value()
            if not q:
                return Cyclotomic.zero()
            return Cyclotomic(self.order, {k: c * q for k, c in self.coeffs.items()}, _canonical=True)
        if self.is_rational():
            return other * self
        n, other = self._common(other)
        a, b = self.coeffs_at(n), other.coeffs_at(n)
        raw = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                if k >= n:
                    k -= n
                v = raw.get(k)
                raw[k] = c1 * c2 if v is None else v + c1 * c2
        return Cyclotomic(n, raw)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(zeta_N)")
        if self.is_rational():
            return Cyclotomic.rational(1 / self.rational_value())
        n = self.order
        prod = Cyclotomic.one()
        for j in range(2, n):
            if gcd(j, n) == 1:
                prod = prod * Cyclotomic(n, _gal(n, self.coeffs, j), _canonical=True)
        norm = self * prod
        assert norm.is_rational(), "field norm must be rational"
        return prod * Cyclotomic.rational(1 / norm.rational_value())

    def __truediv__(self, other):
        other = Cyclotomic.coerce(other)
        if other.is_rational():
            if other.is_zero():
                raise ZeroDivisionError("division by zero in Q(zeta_N)")
            return self * Cyclotomic.rational(1 / other.rational_value())
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Cyclotomic.coerce(other) / self

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = Cyclotomic.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def conjugate(self) -> "Cyclotomic":
        """Complex conjugation zeta_N -> zeta_N^{-1}."""
        if self.order == 1:
            return self
        return Cyclotomic(self.order, _gal(self.order, self.coeffs, self.order - 1), _canonical=True)

    def galois(self, j) -> "Cyclotomic":
        """The automorphism zeta_N -> zeta_N^j for gcd(j, N) = 1."""
        if gcd(j, self.order) != 1:
            raise ValueError(f"{j} is not invertible mod {self.order}")
        return Cyclotomic(self.order, _gal(self.order, self.coeffs, j % self.order), _canonical=True)

    # comparisons ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, frozenset(self.coeffs.items())))
        return self._hash

    # root-of-unity recognition --------------------------------------------

    def as_root_of_unity(self):
        """Minimal (k, n) with self = zeta_n^k, or None if not a root of unity."""
        if self.is_zero():
            return None
        if self.is_rational():
            q = self.rational_value()
            if q == 1:
                return (0, 1)
            if q == -1:
                return (1, 2)
            return None
        n = lcm(2, self.order)
        if (self ** n) != Cyclotomic.one():
            return None
        d = next(d for d in sorted(_divisors(n)) if self ** d == Cyclotomic.one())
        for k in range(1, d):
            if gcd(k, d) == 1 and self == Cyclotomic.zeta(d, k):
                return (k, d)
        raise AssertionError("root of unity with no matching power")  # pragma: no cover

    # serialization ---------------------------------------------------------

    def to_string(self) -> str:
        """Exact string form "c0 + c1*z(N)^1 + ...", round-trips bit-exactly."""
        if self.is_zero():
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            parts.append(str(c) if k == 0 else f"{c}*z({self.order})^{k}")
        return " + ".join(parts)

    @staticmethod
    def parse(s) -> "Cyclotomic":
        s = s.strip()
        if s == "0":
            return Cyclotomic.zero()
        order, raw = 1, {}
        for term in s.split(" + "):
            m = re.fullmatch(r"(-?\d+(?:/\d+)?)(?:\*z\((\d+)\)\^(\d+))?", term.strip())
            if not m:
                raise ValueError(f"malformed cyclotomic term {term!r}")
            c = Fraction(m.group(1))
            if m.group(2) is None:
                raw[0] = raw.get(0, Fraction(0)) + c
            else:
                n, k = int(m.group(2)), int(m.group(3))
                if order not in (1, n):
                    raise ValueError("mixed orders in cyclotomic string")
                order = n
                raw[k] = raw.get(k, Fraction(0)) + c
        return Cyclotomic(order, raw)

    def __repr__(self):
        return self.to_string()


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return out


ZERO = Cyclotomic.zero()
ONE = Cyclotomic.one()


def vector_ratio_root(f, g):
    """The root of unity zeta with f = zeta * g entrywise, or None.

    Supports must align exactly; a constant non-root ratio also returns None.
    """
    f = [Cyclotomic.coerce(x) for x in f]
    g = [Cyclotomic.coerce(x) for x in g]
    if len(f) != len(g):
        raise ValueError("vectors must have equal length")
    ratio = None
    for a, b in zip(f, g):
        if a.is_zero() != b.is_zero():
            return None
        if a.is_zero():
            continue
        r = a / b
        if ratio is None:
            ratio = r
        elif ratio != r:
            return None
    if ratio is None:
        return None
    return ratio if ratio.as_root_of_unity() is not None else None
