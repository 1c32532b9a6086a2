"""Arithmetic in GF(q) for q = p^e.

Elements are plain ints in range(q).  For e = 1 the int is the residue
mod p; for e > 1 it encodes the polynomial-basis coordinates base p
(digit i is the coefficient of x^i).  Multiplication and inversion go
through precomputed tables, which is plenty for the desk scale here
(q <= 64).
"""

from __future__ import annotations

import functools

# Irreducible polynomials over F_p, as coefficient lists [c0, c1, ..., 1]
# of degree e. Only small fields are needed.
_IRREDUCIBLE = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
    (7, 2): (1, 0, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p^e, or raise ValueError."""
    if q < 2:
        raise ValueError(f"not a prime power: {q}")
    p = 2
    while p * p <= q:
        if q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise ValueError(f"not a prime power: {q}")
            return p, e
        p += 1
    return q, 1  # q itself prime


class GF:
    """The field with q elements; elements are ints in range(q)."""

    def __init__(self, q: int):
        p, e = factor_prime_power(q)
        if q > 64:
            raise ValueError(f"q = {q} exceeds the table-based limit of 64")
        self.q = q
        self.p = p
        self.e = e
        if e == 1:
            self.modulus = None
        else:
            try:
                self.modulus = _IRREDUCIBLE[(p, e)]
            except KeyError:
                raise ValueError(f"no built-in irreducible polynomial for GF({p}^{e})")
        self._build_tables()

    def _build_tables(self) -> None:
        q, p, e = self.q, self.p, self.e
        if e == 1:
            self._mul = [[(a * b) % p for b in range(q)] for a in range(q)]
            self._add = [[(a + b) % p for b in range(q)] for a in range(q)]
            self._neg = [(-a) % p for a in range(q)]
        else:
            self._add = [
                [self._digits_to_int([(x + y) % p for x, y in zip(self._int_to_digits(a), self._int_to_digits(b))])
                 for b in range(q)]
                for a in range(q)
            ]
            self._neg = [self._digits_to_int([(-x) % p for x in self._int_to_digits(a)]) for a in range(q)]
            self._mul = [[self._poly_mul_mod(a, b) for b in range(q)] for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    self._inv[a] = b
                    break
            else:
                raise AssertionError(f"no inverse for {a} in GF({q}); bad modulus")
        self._frob = [self.pow(a, p) for a in range(q)]

    def _int_to_digits(self, a: int) -> list[int]:
        p, e = self.p, self.e
        return [(a // p**i) % p for i in range(e)]

    def _digits_to_int(self, digits: list[int]) -> int:
        p = self.p
        return sum(d * p**i for i, d in enumerate(digits))

    def _poly_mul_mod(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        da, db = self._int_to_digits(a), self._int_to_digits(b)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        mod = self.modulus
        for i in range(len(prod) - 1, e - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(e):
                    prod[i - e + j] = (prod[i - e + j] - c * mod[j]) % p
        return self._digits_to_int(prod[:e])

    # -- arithmetic -------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(q)")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        r = 1
        while n:
            if n & 1:
                r = self._mul[r][a]
            a = self._mul[a][a]
            n >>= 1
        return r

    def frobenius(self, a: int, k: int = 1) -> int:
        """a^(p^k).  Identity for e = 1; order-e cycle otherwise."""
        if self.e == 1:
            return a
        for _ in range(k % self.e):
            a = self._frob[a]
        return a

    def from_int(self, n: int) -> int:
        """Embed an integer via F_p (constant polynomial)."""
        return n % self.p

    def coords(self, a: int) -> tuple[int, ...]:
        """Coordinates of a over F_p in the polynomial basis."""
        if self.e == 1:
            return (a,)
        return tuple(self._int_to_digits(a))

    def from_coords(self, digits) -> int:
        if self.e == 1:
            return digits[0] % self.p
        return self._digits_to_int([d % self.p for d in digits])

    def __repr__(self) -> str:
        return f"GF({self.q})"


@functools.lru_cache(maxsize=None)
def gf(q: int) -> GF:
    return GF(q)


def binom_mod_p(n: int, k: int, p: int) -> int:
    """Binomial coefficient C(n, k) mod p via Lucas, n >= 0."""
    if k < 0 or k > n:
        return 0
    r = 1
    while n or k:
        ni, ki = n % p, k % p
        if ki > ni:
            return 0
        num = den = 1
        for i in range(ki):
            num = (num * (ni - i)) % p
            den = (den * (i + 1)) % p
        r = (r * num * pow(den, p - 2, p)) % p
        n //= p
        k //= p
    return r


def neg_binom_mod_p(n: int, k: int, p: int) -> int:
    """C(-n, k) mod p, i.e. (-1)^k C(n+k-1, k) mod p, for n >= 1."""
    c = binom_mod_p(n + k - 1, k, p)
    return c if k % 2 == 0 else (-c) % p
