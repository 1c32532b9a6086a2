"""Sparse multivariate polynomials in the variables t_1, t_2, ... over GF(q).

Monomials are canonical tuples of (variable index, exponent) pairs sorted
by index with positive exponents; the empty tuple is the constant
monomial.  Coefficients are GF ints; zero coefficients are never stored.
"""

from __future__ import annotations

from .field import GF

Mono = tuple  # tuple[tuple[int, int], ...]

ONE_MONO: Mono = ()


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Mono, var: int) -> int:
    for v, e in m:
        if v == var:
            return e
    return 0


def mono_str(m: Mono) -> str:
    if not m:
        return "1"
    return "*".join(f"t{v}" if e == 1 else f"t{v}^{e}" for v, e in m)


class TPoly:
    __slots__ = ("gf", "terms")

    def __init__(self, gf: GF, terms: dict | None = None):
        self.gf = gf
        self.terms: dict[Mono, int] = terms if terms is not None else {}

    @staticmethod
    def zero(gf: GF) -> "TPoly":
        return TPoly(gf)

    @staticmethod
    def const(gf: GF, c: int) -> "TPoly":
        return TPoly(gf, {ONE_MONO: c} if c else {})

    @staticmethod
    def var(gf: GF, v: int, e: int = 1, c: int = 1) -> "TPoly":
        if c == 0:
            return TPoly(gf)
        return TPoly(gf, {((v, e),): c})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def const_value(self) -> int:
        return self.terms.get(ONE_MONO, 0)

    def copy(self) -> "TPoly":
        return TPoly(self.gf, dict(self.terms))

    def __eq__(self, other) -> bool:
        return isinstance(other, TPoly) and self.terms == other.terms

    def __hash__(self):
        return hash((self.gf.q, tuple(sorted(self.terms.items()))))

    def variables(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def degree_in(self, var: int) -> int:
        return max((mono_degree(m, var) for m in self.terms), default=0)

    # -- arithmetic -------------------------------------------------------

    def iadd(self, other: "TPoly", c: int = 1) -> None:
        """self += c * other, in place."""
        if c == 0 or other.is_zero():
            return
        g = self.gf
        t = self.terms
        if c == 1:
            for m, x in other.terms.items():
                y = g.add(t.get(m, 0), x)
                if y:
                    t[m] = y
                elif m in t:
                    del t[m]
        else:
            row = g._mul[c]
            for m, x in other.terms.items():
                y = g.add(t.get(m, 0), row[x])
                if y:
                    t[m] = y
                elif m in t:
                    del t[m]

    def __add__(self, other: "TPoly") -> "TPoly":
        out = self.copy()
        out.iadd(other)
        return out

    def __neg__(self) -> "TPoly":
        g = self.gf
        return TPoly(g, {m: g.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: "TPoly") -> "TPoly":
        out = self.copy()
        out.iadd(-other)
        return out

    def __mul__(self, other: "TPoly") -> "TPoly":
        g = self.gf
        a, b = self.terms, other.terms
        if not a or not b:
            return TPoly(g)
        # singleton fast paths carry the trivial-type workload
        if len(a) == 1 and ONE_MONO in a:
            return other.scale(a[ONE_MONO])
        if len(b) == 1 and ONE_MONO in b:
            return self.scale(b[ONE_MONO])
        out: dict[Mono, int] = {}
        for ma, ca in a.items():
            row = g._mul[ca]
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                y = g.add(out.get(m, 0), row[cb])
                if y:
                    out[m] = y
                elif m in out:
                    del out[m]
        return TPoly(g, out)

    def scale(self, c: int) -> "TPoly":
        g = self.gf
        if c == 0:
            return TPoly(g)
        if c == 1:
            return self
        row = g._mul[c]
        return TPoly(g, {m: row[x] for m, x in self.terms.items()})

    def pow(self, n: int) -> "TPoly":
        r = TPoly.const(self.gf, 1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def coeff_frobenius(self, k: int = 1) -> "TPoly":
        """c -> c^(p^k) on coefficients; monomials fixed."""
        g = self.gf
        return TPoly(g, {m: g.frobenius(c, k) for m, c in self.terms.items()})

    def split_var(self, var: int) -> dict[int, "TPoly"]:
        """Group terms by the exponent of t_var; values omit t_var."""
        g = self.gf
        out: dict[int, TPoly] = {}
        for m, c in self.terms.items():
            e = mono_degree(m, var)
            rest = tuple((v, x) for v, x in m if v != var)
            bucket = out.setdefault(e, TPoly(g))
            y = g.add(bucket.terms.get(rest, 0), c)
            if y:
                bucket.terms[rest] = y
            elif rest in bucket.terms:
                del bucket.terms[rest]
        return {e: p for e, p in out.items() if not p.is_zero()}

    def sorted_terms(self) -> list[tuple[Mono, int]]:
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return "+".join(
            (str(c) if m == ONE_MONO else (mono_str(m) if c == 1 else f"{c}*{mono_str(m)}"))
            for m, c in self.sorted_terms()
        )
