"""Finite field towers F_p <= F_{p^d} <= F_{p^D} with Frobenius and linearized solving.

Elements of the ambient field F_{p^D} are encoded as integers whose base-p
digits are the coefficients of the residue polynomial; the zero element is 0
and the multiplicative structure is driven by discrete log tables.  Subfield
levels are canonical (the unique subfield of each degree), so no embedding
data is needed.
"""

from __future__ import annotations

from functools import lru_cache
from math import lcm

FIELD_ORDER_CAP = 1 << 20


class TowerCapError(ValueError):
    """Requested ambient field exceeds the configured cap."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _poly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # reduce modulo the monic modulus
    dm = len(mod) - 1
    for i in range(len(out) - 1, dm - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(dm):
                out[i - dm + j] = (out[i - dm + j] - c * mod[j]) % p
    return _poly_trim(out)


def _poly_powmod(base, e, mod, p):
    result = [1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        # a mod b with b made monic
        inv = pow(b[-1], p - 2, p)
        b = [(c * inv) % p for c in b]
        while len(a) >= len(b):
            c = a[-1]
            if c:
                for j in range(len(b)):
                    a[len(a) - len(b) + j] = (a[len(a) - len(b) + j] - c * b[j]) % p
            a.pop()
            _poly_trim(a)
            if not a:
                break
        a, b = b, a
    return a


def _is_irreducible(f, p):
    d = len(f) - 1
    x = [0, 1]
    if _poly_powmod(x, p ** d, f, p) != x:
        return False
    for r in _prime_factors(d):
        xe = _poly_powmod(x, p ** (d // r), f, p)
        diff = [0] * max(len(xe), 2)
        for i, c in enumerate(xe):
            diff[i] = c
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(f, _poly_trim(diff), p)
        if len(g) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, d: int) -> tuple:
    """Coefficients (c_0..c_{d-1}, 1) of the lex-least monic irreducible of degree d."""
    if d == 1:
        return (0, 1)
    for tail in range(p ** d):
        f = [(tail // p ** i) % p for i in range(d)] + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldTower:
    """The ambient field F_{p^D} with all subfield levels d | D materialized on demand."""

    def __init__(self, p: int, degree: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p ** degree > FIELD_ORDER_CAP:
            raise TowerCapError(f"field order {p}^{degree} exceeds cap {FIELD_ORDER_CAP}")
        self.p = p
        self.degree = degree
        self.order = p ** degree
        self.modulus = smallest_irreducible(p, degree)
        self._build_tables()
        self._frob_pows = {0: None}
        self._levels = {}

    def _build_tables(self):
        p, d, q = self.p, self.degree, self.order
        if p == 2:
            mmask = 0
            for i, c in enumerate(self.modulus):
                mmask |= c << i

            def mulmod(a, b):
                out = 0
                while b:
                    if b & 1:
                        out ^= a
                    b >>= 1
                    a <<= 1
                    if (a >> d) & 1:
                        a ^= mmask
                return out
        else:
            mod = list(self.modulus)

            def mulmod(a, b):
                return self._encode(_poly_mulmod(self._decode(a), self._decode(b), mod, p))

        def powmod(a, e):
            r = 1
            while e:
                if e & 1:
                    r = mulmod(r, a)
                a = mulmod(a, a)
                e >>= 1
            return r

        # discrete log tables over a generator of the multiplicative group
        if q == 2:
            gen = 1
        else:
            factors = _prime_factors(q - 1)
            gen = next(c for c in range(2, q) if all(powmod(c, (q - 1) // r) != 1 for r in factors))
        exp = [0] * (q - 1)
        log = [0] * q
        cur = 1
        for i in range(q - 1):
            exp[i] = cur
            log[cur] = i
            cur = mulmod(cur, gen)
        self._exp = exp
        self._log = log
        # x -> x^p as a permutation
        frob = [0] * q
        for x in range(1, q):
            frob[x] = exp[(log[x] * p) % (q - 1)]
        self._frob = frob

    def _decode(self, code):
        p = self.p
        out = []
        for _ in range(self.degree):
            out.append(code % p)
            code //= p
        return _poly_trim(out)

    def _encode(self, poly):
        code = 0
        for i, c in enumerate(poly):
            code += c * self.p ** i
        return code

    # element arithmetic ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        out, mul = 0, 1
        for _ in range(self.degree):
            out += ((a % p + b % p) % p) * mul
            a //= p
            b //= p
            mul *= p
        return out

    def neg(self, a: int) -> int:
        p = self.p
        if p == 2:
            return a
        out, mul = 0, 1
        for _ in range(self.degree):
            out += ((-a) % p) * mul
            a //= p
            mul *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e <= 0:
                raise ZeroDivisionError("0 cannot be raised to a nonpositive power")
            return 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def scalar(self, c: int) -> int:
        return c % self.p

    # Frobenius ----------------------------------------------------------

    def frob_map(self, t: int):
        """The permutation x -> x^(p^t), as an index array."""
        t %= self.degree
        if t not in self._frob_pows:
            prev = self.frob_map(t - 1) if t > 1 else self._frob
            if t == 1:
                self._frob_pows[1] = self._frob
            else:
                self._frob_pows[t] = [self._frob[x] for x in prev]
        return self._frob_pows[t] if t else None

    def frobenius_power(self, x: int, q: int, j: int) -> int:
        """x^(q^j) for q = p^k; j may be negative."""
        k = 0
        qq = q
        while qq > 1:
            if qq % self.p:
                raise ValueError(f"{q} is not a power of {self.p}")
            qq //= self.p
            k += 1
        t = (k * j) % self.degree
        m = self.frob_map(t)
        return x if m is None else m[x]

    # subfield levels ------------------------------------------------------

    def level(self, d: int) -> tuple:
        """All elements of the degree-d subfield, ascending by code."""
        if self.degree % d:
            raise ValueError(f"level {d} does not divide ambient degree {self.degree}")
        if d not in self._levels:
            m = self.frob_map(d)
            if m is None:
                elems = tuple(range(self.order))
            else:
                elems = tuple(x for x in range(self.order) if m[x] == x)
            assert len(elems) == self.p ** d
            self._levels[d] = elems
        return self._levels[d]

    def in_level(self, x: int, d: int) -> bool:
        m = self.frob_map(d % self.degree)
        return m is None or m[x] == x

    def level_basis(self, d: int):
        """An F_p-basis of the degree-d subfield (greedy, deterministic)."""
        basis, span = [], {0}
        for x in self.level(d):
            if x not in span:
                basis.append(x)
                new = set()
                for s in span:
                    cur = s
                    for _ in range(1, self.p):
                        cur = self.add(cur, x)
                        new.add(cur)
                span |= new
            if len(basis) == d:
                break
        return basis

    def coords(self, x: int):
        """Base-p digit vector of an element code."""
        return tuple(self._decode(x) + [0] * (self.degree - len(self._decode(x))))

    # linearized equations -------------------------------------------------

    def solve_linearized(self, terms, c: int, level: int, q: int | None = None):
        """All x in the degree-`level` subfield with sum a_i * x^(q^i) = c.

        `terms` is a sequence of (i, a_i); q defaults to p.  Returns a sorted
        list of element codes, possibly empty (caller escalates the level).
        """
        q = q or self.p
        basis = self.level_basis(level)
        p, D = self.p, self.degree

        def apply(x):
            acc = 0
            for i, a in terms:
                acc = self.add(acc, self.mul(a, self.frobenius_power(x, q, i)))
            return acc

        cols = [self.coords(apply(b)) for b in basis]
        target = list(self.coords(c))
        # Gaussian elimination over F_p on the D x len(basis) system
        m = [[cols[j][i] for j in range(len(basis))] for i in range(D)]
        rhs = target[:]
        pivots = []
        row = 0
        for col in range(len(basis)):
            sel = next((i for i in range(row, D) if m[i][col]), None)
            if sel is None:
                continue
            m[row], m[sel] = m[sel], m[row]
            rhs[row], rhs[sel] = rhs[sel], rhs[row]
            inv = pow(m[row][col], p - 2, p)
            m[row] = [(v * inv) % p for v in m[row]]
            rhs[row] = (rhs[row] * inv) % p
            for i in range(D):
                if i != row and m[i][col]:
                    f = m[i][col]
                    m[i] = [(a - f * b) % p for a, b in zip(m[i], m[row])]
                    rhs[i] = (rhs[i] - f * rhs[row]) % p
            pivots.append(col)
            row += 1
        if any(rhs[i] for i in range(row, D)):
            return []
        part = [0] * len(basis)
        for r, col in enumerate(pivots):
            part[col] = rhs[r]
        free = [c0 for c0 in range(len(basis)) if c0 not in pivots]
        kernel = []
        for fc in free:
            vec = [0] * len(basis)
            vec[fc] = 1
            for r, col in enumerate(pivots):
                vec[col] = (-m[r][fc]) % p
            kernel.append(vec)
        sols = []
        counters = [0] * len(kernel)
        while True:
            vec = part[:]
            for kv, cnt in zip(kernel, counters):
                for idx in range(len(basis)):
                    vec[idx] = (vec[idx] + cnt * kv[idx]) % p
            x = 0
            for idx, coeff in enumerate(vec):
                cur = basis[idx]
                for _ in range(coeff):
                    x = self.add(x, cur)
            sols.append(x)
            i = 0
            while i < len(counters):
                counters[i] += 1
                if counters[i] < p:
                    break
                counters[i] = 0
                i += 1
            else:
                break
            if not kernel:
                break
        return sorted(set(sols))


def build_tower(p: int, degrees) -> FieldTower:
    """Ambient tower of degree lcm(degrees) with the requested levels reachable."""
    degrees = sorted(set(degrees))
    if not degrees or any(d < 1 for d in degrees):
        raise ValueError("degrees must be positive")
    return FieldTower(p, lcm(*degrees))
