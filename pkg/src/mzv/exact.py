"""Multivariate t-polynomials with exact F_q(theta) coefficients.

The series layer (TruncSeries) works in a finite precision window; this
small exact layer backs the computations that must certify identities
with no floor at all: the ascending-power division producing the kappa
coefficients, the power-sum interpolant solver, and exact verification
of the power-sum expansion formula at small degree.
"""

from __future__ import annotations

from .field import GF
from .theta import RationalFn, ThetaPoly
from .tpoly import Mono, ONE_MONO, mono_mul, mono_str


class KPoly:
    """Polynomial in the t-variables with RationalFn coefficients."""

    __slots__ = ("gf", "terms")

    def __init__(self, gf: GF, terms: dict | None = None):
        self.gf = gf
        self.terms: dict[Mono, RationalFn] = {
            m: c for m, c in (terms or {}).items() if not c.is_zero()
        }

    @staticmethod
    def zero(gf: GF) -> "KPoly":
        return KPoly(gf)

    @staticmethod
    def one(gf: GF) -> "KPoly":
        return KPoly(gf, {ONE_MONO: RationalFn.one(gf)})

    @staticmethod
    def const(gf: GF, c: RationalFn) -> "KPoly":
        return KPoly(gf, {ONE_MONO: c})

    @staticmethod
    def var(gf: GF, v: int, e: int = 1) -> "KPoly":
        return KPoly(gf, {((v, e),): RationalFn.one(gf)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, KPoly) and self.terms == other.terms

    def __add__(self, other: "KPoly") -> "KPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return KPoly(self.gf, out)

    def __neg__(self) -> "KPoly":
        return KPoly(self.gf, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "KPoly") -> "KPoly":
        return self + (-other)

    def __mul__(self, other: "KPoly") -> "KPoly":
        out: dict[Mono, RationalFn] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                p = c1 * c2
                s = out.get(m)
                out[m] = p if s is None else s + p
        return KPoly(self.gf, out)

    def scale(self, c: RationalFn) -> "KPoly":
        if c.is_zero():
            return KPoly(self.gf)
        return KPoly(self.gf, {m: x * c for m, x in self.terms.items()})

    def coefficient(self, m: Mono) -> RationalFn:
        return self.terms.get(m, RationalFn.zero(self.gf))

    def subs_theta_power(self, var: int, n: int) -> "KPoly":
        """Substitute t_var -> theta^n exactly."""
        out = KPoly.zero(self.gf)
        tp = RationalFn(ThetaPoly.theta(self.gf, n))
        for m, c in self.terms.items():
            e = 0
            rest = []
            for v, x in m:
                if v == var:
                    e = x
                else:
                    rest.append((v, x))
            out = out + KPoly(self.gf, {tuple(rest): c * tp.pow(e)})
        return out

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"{c!r}" if m == ONE_MONO else f"{c!r}*{mono_str(m)}"
            for m, c in self.sorted_terms()
        )


class KPolySeries:
    """Polynomials in z with KPoly coefficients, used for the ascending
    division of the one-variable character sums."""

    def __init__(self, gf: GF, coeffs: dict[int, KPoly] | None = None):
        self.gf = gf
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if not c.is_zero()}

    def coefficient(self, e: int) -> KPoly:
        return self.coeffs.get(e, KPoly.zero(self.gf))

    def divide_ascending(self, den: "KPolySeries", order: int) -> "KPolySeries":
        """self / den in ascending powers of z up to z^order; den must have
        an invertible constant term in K (no t-variables)."""
        d0 = den.coefficient(0)
        if set(d0.terms) - {ONE_MONO}:
            raise ValueError("denominator constant term must be t-free")
        c0 = d0.coefficient(ONE_MONO)
        inv0 = c0.inverse()
        out: dict[int, KPoly] = {}
        for e in range(order + 1):
            acc = self.coefficient(e)
            for j in range(e):
                prev = out.get(j)
                if prev is None or prev.is_zero():
                    continue
                dj = den.coefficient(e - j)
                if not dj.is_zero():
                    acc = acc - prev * dj
            out[e] = acc.scale(inv0)
        return KPolySeries(self.gf, out)
