"""Truncated Laurent series in 1/theta with TPoly coefficients.

A TruncSeries stores finitely many theta-exponents e with coefficients in
F_q[t_1, t_2, ...].  Exponents may be positive.  `max_deg` bounds the
largest possibly-nonzero exponent; everything above it is exactly zero.
`floor` is the exactness floor: coefficients at exponents >= floor are
exact, below it they are unknown.  floor = None means the value is exact
everywhere (a Laurent polynomial).

Floor propagation:
  add:  floor(f+g) = max(floor f, floor g)
  mul:  floor(f*g) = max(floor f + max_deg g, floor g + max_deg f)
  frobenius twist by q^k: floor -> q^k * floor
  eval t_j -> theta^(q^k): floor preserved (substitution only raises
  exponents; callers needing guard digits raise precision upstream).
"""

from __future__ import annotations

from .field import GF
from .theta import RationalFn, ThetaPoly
from .tpoly import ONE_MONO, TPoly, mono_str

NEG_INF = None  # floor value meaning "exact everywhere"


def _floor_max(a, b):
    if a is NEG_INF:
        return b
    if b is NEG_INF:
        return a
    return max(a, b)


def _floor_add(floor, shift):
    return NEG_INF if floor is NEG_INF else floor + shift


class TruncSeries:
    __slots__ = ("gf", "coeffs", "floor", "max_deg")

    def __init__(self, gf: GF, coeffs: dict | None = None, floor=NEG_INF, max_deg: int = 0):
        self.gf = gf
        cs = coeffs if coeffs is not None else {}
        if floor is not NEG_INF:
            cs = {e: c for e, c in cs.items() if e >= floor and not c.is_zero()}
        else:
            cs = {e: c for e, c in cs.items() if not c.is_zero()}
        self.coeffs = cs
        self.floor = floor
        if cs:
            max_deg = max(max_deg, max(cs))
        self.max_deg = max_deg

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(gf: GF) -> "TruncSeries":
        return TruncSeries(gf, {}, NEG_INF, 0)

    @staticmethod
    def one(gf: GF) -> "TruncSeries":
        return TruncSeries(gf, {0: TPoly.const(gf, 1)}, NEG_INF, 0)

    @staticmethod
    def monomial(gf: GF, e: int, coeff) -> "TruncSeries":
        if isinstance(coeff, int):
            coeff = TPoly.const(gf, coeff)
        return TruncSeries(gf, {e: coeff}, NEG_INF, e)

    @staticmethod
    def from_theta_poly(p: ThetaPoly) -> "TruncSeries":
        g = p.gf
        return TruncSeries(
            g,
            {e: TPoly.const(g, c) for e, c in enumerate(p.coeffs) if c},
            NEG_INF,
            max(p.degree, 0),
        )

    @staticmethod
    def unknown(gf: GF, floor: int) -> "TruncSeries":
        """Zero within the window, nothing known below floor."""
        return TruncSeries(gf, {}, floor, floor)

    # -- structure --------------------------------------------------------

    def is_exact(self) -> bool:
        return self.floor is NEG_INF

    def is_zero_to_floor(self) -> bool:
        return not self.coeffs

    def copy(self) -> "TruncSeries":
        return TruncSeries(self.gf, dict(self.coeffs), self.floor, self.max_deg)

    def coefficient(self, e: int) -> TPoly:
        return self.coeffs.get(e, TPoly.zero(self.gf))

    def valuation(self):
        """Smallest exponent with a stored nonzero coefficient, or None."""
        return min(self.coeffs) if self.coeffs else None

    def top_degree(self):
        return max(self.coeffs) if self.coeffs else None

    def variables(self) -> set[int]:
        out: set[int] = set()
        for c in self.coeffs.values():
            out |= c.variables()
        return out

    def degree_in_t(self, var: int) -> int:
        return max((c.degree_in(var) for c in self.coeffs.values()), default=0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruncSeries)
            and self.coeffs == other.coeffs
            and self.floor == other.floor
        )

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        floor = _floor_max(self.floor, other.floor)
        out = {e: c.copy() for e, c in self.coeffs.items()}
        for e, c in other.coeffs.items():
            if e in out:
                out[e].iadd(c)
            else:
                out[e] = c.copy()
        return TruncSeries(self.gf, out, floor, max(self.max_deg, other.max_deg))

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(
            self.gf, {e: -c for e, c in self.coeffs.items()}, self.floor, self.max_deg
        )

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        g = self.gf
        if not self.coeffs and self.is_exact():
            return TruncSeries.zero(g) if other.is_exact() else TruncSeries.unknown(g, _floor_add(other.floor, self.max_deg))
        if not other.coeffs and other.is_exact():
            return TruncSeries.zero(g) if self.is_exact() else TruncSeries.unknown(g, _floor_add(self.floor, other.max_deg))
        floor = _floor_max(
            _floor_add(self.floor, other.max_deg),
            _floor_add(other.floor, self.max_deg),
        )
        out: dict[int, TPoly] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if floor is not NEG_INF and e < floor:
                    continue
                prod = c1 * c2
                if prod.is_zero():
                    continue
                if e in out:
                    out[e].iadd(prod)
                else:
                    out[e] = prod.copy()  # prod may alias an input coefficient
        return TruncSeries(g, out, floor, self.max_deg + other.max_deg)

    def scale_tpoly(self, c: TPoly) -> "TruncSeries":
        if c.is_zero():
            return TruncSeries.zero(self.gf) if self.is_exact() else TruncSeries.unknown(self.gf, self.floor)
        return TruncSeries(
            self.gf, {e: x * c for e, x in self.coeffs.items()}, self.floor, self.max_deg
        )

    def scale_int(self, c: int) -> "TruncSeries":
        return self.scale_tpoly(TPoly.const(self.gf, c))

    def shift(self, n: int) -> "TruncSeries":
        """Multiply by theta^n."""
        return TruncSeries(
            self.gf,
            {e + n: c for e, c in self.coeffs.items()},
            _floor_add(self.floor, n),
            self.max_deg + n,
        )

    def mul_theta_poly(self, p: ThetaPoly) -> "TruncSeries":
        return self * TruncSeries.from_theta_poly(p)

    def scale_rational(self, r: RationalFn, floor: int | None = None) -> "TruncSeries":
        """Multiply by an exact rational function.

        The denominator gets inverted as a series.  For an exact (Laurent
        polynomial) input the result is an honest infinite series, so a
        target `floor` must be supplied; truncated inputs derive the
        output floor from their own window.
        """
        num = self.mul_theta_poly(r.num)
        if r.den.degree == 0:
            out = num if r.den.leading() == 1 else num.scale_int(self.gf.inv(r.den.leading()))
            return out if floor is None else out.truncate(floor)
        D = r.den.degree
        if num.is_exact():
            if not num.coeffs:
                return TruncSeries.zero(self.gf)
            if floor is None:
                raise ValueError("scale_rational on an exact series needs an explicit floor")
            target = floor
        else:
            target = num.floor - D
            if floor is not None:
                target = max(target, floor)
        inv = invert_theta_poly(r.den, target - num.max_deg)
        out = (num * inv).truncate(target)
        return TruncSeries(self.gf, out.coeffs, target, num.max_deg - D)

    def truncate(self, new_floor: int) -> "TruncSeries":
        f = _floor_max(self.floor, new_floor)
        return TruncSeries(self.gf, {e: c for e, c in self.coeffs.items() if e >= f}, f, self.max_deg)

    def weaken_floor(self, floor) -> "TruncSeries":
        """Mark the series as only known above `floor` (keeps coefficients)."""
        return self.truncate(floor) if floor is not NEG_INF else self

    # -- semilinear maps ---------------------------------------------------

    def frobenius_twist(self, k: int = 1) -> "TruncSeries":
        """tau^k: theta-exponent e -> q^k e; F_q[t]-coefficients fixed."""
        if k == 0:
            return self
        m = self.gf.q**k
        return TruncSeries(
            self.gf,
            {e * m: c for e, c in self.coeffs.items()},
            _floor_add(self.floor, 0) if self.floor is NEG_INF else self.floor * m,
            self.max_deg * m,
        )

    def coefficient_frobenius(self, k: int = 1) -> "TruncSeries":
        """mu^k: c -> c^(p^k) on K_infinity, F_p[t]-linearly."""
        m = self.gf.p**k
        return TruncSeries(
            self.gf,
            {e * m: c.coeff_frobenius(k) for e, c in self.coeffs.items()},
            self.floor if self.floor is NEG_INF else self.floor * m,
            self.max_deg * m,
        )

    def eval_t(self, var: int, k: int = 0) -> "TruncSeries":
        """Substitute t_var -> theta^(q^k)."""
        step = self.gf.q**k
        out: dict[int, TPoly] = {}
        deg = 0
        for e, c in self.coeffs.items():
            for m, part in c.split_var(var).items():
                deg = max(deg, m)
                e2 = e + step * m
                if e2 in out:
                    out[e2].iadd(part)
                else:
                    out[e2] = part.copy()
        return TruncSeries(self.gf, out, self.floor, self.max_deg + step * deg)

    # -- comparison helpers -------------------------------------------------

    def common_floor(self, other: "TruncSeries"):
        return _floor_max(self.floor, other.floor)

    def residual_top(self, other: "TruncSeries"):
        """Largest exponent where self and other differ above the common
        floor, or None когда equal on the window."""
        floor = self.common_floor(other)
        exps = set(self.coeffs) | set(other.coeffs)
        best = None
        for e in exps:
            if floor is not NEG_INF and e < floor:
                continue
            if self.coefficient(e) != other.coefficient(e):
                best = e if best is None else max(best, e)
        return best

    def agrees_with(self, other: "TruncSeries") -> bool:
        return self.residual_top(other) is None

    # -- rendering ----------------------------------------------------------

    def sorted_items(self):
        return sorted(self.coeffs.items(), reverse=True)

    def text_lines(self) -> list[str]:
        lines = []
        for e, c in self.sorted_items():
            for m, x in c.sorted_terms():
                cof = str(x) if m == ONE_MONO else (
                    mono_str(m) if x == 1 else f"{x}*{mono_str(m)}"
                )
                lines.append(f"{cof} * θ^{e}")
        if not lines:
            lines.append("0")
        return lines

    def to_json(self) -> dict:
        return {
            "floor": self.floor,
            "max_deg": self.max_deg,
            "coeffs": {
                str(e): {mono_str(m): x for m, x in c.sorted_terms()}
                for e, c in self.sorted_items()
            },
        }

    @staticmethod
    def from_json(gf: GF, data: dict) -> "TruncSeries":
        coeffs = {}
        for e_str, terms in data["coeffs"].items():
            t = TPoly(gf)
            for m_str, x in terms.items():
                t.iadd(_mono_from_str(gf, m_str, x))
            coeffs[int(e_str)] = t
        return TruncSeries(gf, coeffs, data["floor"], data["max_deg"])

    def __repr__(self) -> str:
        body = " + ".join(
            f"({c!r})θ^{e}" for e, c in list(self.sorted_items())[:6]
        )
        tail = " + ..." if len(self.coeffs) > 6 else ""
        fl = "exact" if self.is_exact() else f"floor={self.floor}"
        return f"TruncSeries({body or '0'}{tail}; {fl})"


def _mono_from_str(gf: GF, s: str, coeff: int) -> TPoly:
    if s == "1":
        return TPoly.const(gf, coeff)
    mono = []
    for part in s.split("*"):
        body = part[1:]
        if "^" in body:
            v, e = body.split("^")
            mono.append((int(v), int(e)))
        else:
            mono.append((int(body), 1))
    return TPoly(gf, {tuple(sorted(mono)): coeff})


def invert_theta_poly(p: ThetaPoly, floor: int) -> TruncSeries:
    """1/p as a Laurent series, exact down to `floor`.

    p = c * theta^D * (1 + u) with val(u) >= 1 in 1/theta; the geometric
    series for (1+u)^(-1) is accumulated until it drops below the window.
    """
    if p.is_zero():
        raise ZeroDivisionError("series inverse of zero polynomial")
    g = p.gf
    D = p.degree
    c_inv = g.inv(p.leading())
    # u = p/(lead*theta^D) - 1, exponents in [-D, -1]
    u = TruncSeries(
        g,
        {
            i - D: TPoly.const(g, g.mul(p[i], c_inv))
            for i in range(D)
            if p[i]
        },
        NEG_INF,
        -1,
    )
    acc = TruncSeries.one(g)
    term = TruncSeries.one(g)
    rel_floor = floor + D  # window for (1+u)^(-1)
    while True:
        term = (-u) * term
        term = term.truncate(rel_floor) if term.coeffs else term
        term.floor = NEG_INF
        if not term.coeffs or (term.top_degree() is not None and term.top_degree() < rel_floor):
            break
        acc = acc + term
    acc = TruncSeries(g, acc.coeffs, NEG_INF, 0).truncate(rel_floor)
    out = acc.shift(-D).scale_int(c_inv)
    return TruncSeries(g, out.coeffs, floor, -D)


def power_series_pow(f: TruncSeries, n: int, floor: int) -> TruncSeries:
    """f^n within the window above `floor` (n >= 0)."""
    g = f.gf
    r = TruncSeries.one(g)
    base = f
    while n:
        if n & 1:
            r = (r * base).truncate(floor)
        n >>= 1
        if n:
            base = (base * base).truncate(floor)
    return r


def b_series(gf: GF, d: int, var: int) -> TruncSeries:
    """b_d(t_var) = (t_var - theta)(t_var - theta^q)...(t_var - theta^(q^(d-1))),
    as an exact series; b_0 = 1."""
    out = TruncSeries.one(gf)
    for i in range(d):
        factor = TruncSeries(
            gf,
            {0: TPoly.var(gf, var), gf.q**i: TPoly.const(gf, gf.neg(1))},
            NEG_INF,
            gf.q**i,
        )
        out = out * factor
    return out


def b_product_series(gf: GF, d: int, variables) -> TruncSeries:
    """Product of b_d(t_v) over v in `variables` (with multiplicity)."""
    out = TruncSeries.one(gf)
    for v in variables:
        out = out * b_series(gf, d, v)
    return out
