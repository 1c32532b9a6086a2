"""Polynomials in theta over GF(q) and their fraction field.

ThetaPoly is a dense coefficient list (index = theta-degree, trailing
zeros trimmed, [] is the zero polynomial).  RationalFn keeps a canonical
form: denominator monic, gcd-reduced, so equality is structural.
"""

from __future__ import annotations

from .field import GF


class ThetaPoly:
    __slots__ = ("gf", "coeffs")

    def __init__(self, gf: GF, coeffs=()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.gf = gf
        self.coeffs = cs

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(gf: GF) -> "ThetaPoly":
        return ThetaPoly(gf, [])

    @staticmethod
    def one(gf: GF) -> "ThetaPoly":
        return ThetaPoly(gf, [1])

    @staticmethod
    def const(gf: GF, c: int) -> "ThetaPoly":
        return ThetaPoly(gf, [c])

    @staticmethod
    def theta(gf: GF, n: int = 1) -> "ThetaPoly":
        """The monomial theta^n."""
        return ThetaPoly(gf, [0] * n + [1])

    # -- structure --------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self) -> int:
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> int:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __eq__(self, other) -> bool:
        return isinstance(other, ThetaPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.gf.q, tuple(self.coeffs)))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "ThetaPoly") -> "ThetaPoly":
        g = self.gf
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = g.add(out[i], c)
        return ThetaPoly(g, out)

    def __neg__(self) -> "ThetaPoly":
        g = self.gf
        return ThetaPoly(g, [g.neg(c) for c in self.coeffs])

    def __sub__(self, other: "ThetaPoly") -> "ThetaPoly":
        return self + (-other)

    def __mul__(self, other: "ThetaPoly") -> "ThetaPoly":
        g = self.gf
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ThetaPoly.zero(g)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                row = g._mul[x]
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = g.add(out[i + j], row[y])
        return ThetaPoly(g, out)

    def scale(self, c: int) -> "ThetaPoly":
        g = self.gf
        if c == 0:
            return ThetaPoly.zero(g)
        row = g._mul[c]
        return ThetaPoly(g, [row[x] for x in self.coeffs])

    def shift(self, n: int) -> "ThetaPoly":
        """Multiply by theta^n (n >= 0)."""
        if self.is_zero():
            return self
        return ThetaPoly(self.gf, [0] * n + self.coeffs)

    def divmod(self, other: "ThetaPoly") -> tuple["ThetaPoly", "ThetaPoly"]:
        g = self.gf
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        lead_inv = g.inv(other.leading())
        quot = [0] * max(0, len(rem) - db)
        while len(rem) - 1 >= db and rem:
            c = g.mul(rem[-1], lead_inv)
            k = len(rem) - 1 - db
            quot[k] = c
            for i, bc in enumerate(other.coeffs):
                rem[k + i] = g.sub(rem[k + i], g.mul(c, bc))
            while rem and rem[-1] == 0:
                rem.pop()
        return ThetaPoly(g, quot), ThetaPoly(g, rem)

    def __floordiv__(self, other: "ThetaPoly") -> "ThetaPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "ThetaPoly") -> "ThetaPoly":
        return self.divmod(other)[1]

    def monic(self) -> "ThetaPoly":
        if self.is_zero() or self.is_monic():
            return self
        return self.scale(self.gf.inv(self.leading()))

    def gcd(self, other: "ThetaPoly") -> "ThetaPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def pow(self, n: int) -> "ThetaPoly":
        r = ThetaPoly.one(self.gf)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def subst_theta_power(self, n: int) -> "ThetaPoly":
        """Substitute theta -> theta^n (n >= 1)."""
        out = [0] * (n * self.degree + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            if c:
                out[i * n] = c
        return ThetaPoly(self.gf, out)

    def eval_gf(self, x: int) -> int:
        """Evaluate at a field element."""
        g = self.gf
        acc = 0
        for c in reversed(self.coeffs):
            acc = g.add(g.mul(acc, x), c)
        return acc

    def coeff_frobenius(self, k: int = 1) -> "ThetaPoly":
        """Apply c -> c^(p^k) to the coefficients only."""
        g = self.gf
        return ThetaPoly(g, [g.frobenius(c, k) for c in self.coeffs])

    def __repr__(self) -> str:
        return f"ThetaPoly({format_theta_poly(self)})"


def format_theta_poly(p: ThetaPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p[i]
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
        else:
            var = "θ" if i == 1 else f"θ^{i}"
            parts.append(var if c == 1 else f"{c}*{var}")
    return "+".join(parts)


def parse_theta_poly(gf: GF, text: str) -> ThetaPoly:
    """Inverse of format_theta_poly; accepts 'theta' as an ASCII alias."""
    text = text.replace(" ", "").replace("theta", "θ")
    if text in ("0", ""):
        return ThetaPoly.zero(gf)
    out = ThetaPoly.zero(gf)
    for term in text.replace("-", "+-").split("+"):
        if not term:
            continue
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if "θ" in term:
            head, _, tail = term.partition("θ")
            c = int(head.rstrip("*")) if head.rstrip("*") else 1
            e = int(tail[1:]) if tail.startswith("^") else (1 if tail == "" else int(tail))
        else:
            c, e = int(term), 0
        fc = gf.from_int(c)
        if neg:
            fc = gf.neg(fc)
        out = out + ThetaPoly(gf, [0] * e + [fc])
    return out


# -- the standard product families --------------------------------------


def bracket(gf: GF, k: int) -> ThetaPoly:
    """theta^(q^k) - theta."""
    q = gf.q
    return ThetaPoly.theta(gf, q**k) - ThetaPoly.theta(gf, 1)


def l_poly(gf: GF, i: int) -> ThetaPoly:
    """(theta - theta^q)...(theta - theta^(q^i)); empty product is 1."""
    q = gf.q
    out = ThetaPoly.one(gf)
    for j in range(1, i + 1):
        out = out * (ThetaPoly.theta(gf, 1) - ThetaPoly.theta(gf, q**j))
    return out


def d_poly(gf: GF, i: int) -> ThetaPoly:
    """(theta^(q^i) - theta^(q^(i-1)))...(theta^(q^i) - theta); empty product is 1."""
    q = gf.q
    out = ThetaPoly.one(gf)
    for j in range(i):
        out = out * (ThetaPoly.theta(gf, q**i) - ThetaPoly.theta(gf, q**j))
    return out


class RationalFn:
    """num/den in F_q(theta), canonical: den monic, gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: ThetaPoly, den: ThetaPoly | None = None):
        if den is None:
            den = ThetaPoly.one(num.gf)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = ThetaPoly.one(num.gf)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            if not den.is_monic():
                c = num.gf.inv(den.leading())
                num, den = num.scale(c), den.scale(c)
        self.num = num
        self.den = den

    @staticmethod
    def zero(gf: GF) -> "RationalFn":
        return RationalFn(ThetaPoly.zero(gf))

    @staticmethod
    def one(gf: GF) -> "RationalFn":
        return RationalFn(ThetaPoly.one(gf))

    @staticmethod
    def const(gf: GF, c: int) -> "RationalFn":
        return RationalFn(ThetaPoly.const(gf, c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalFn)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __sub__(self, other: "RationalFn") -> "RationalFn":
        return self + (-other)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.num, self.den * other.den)

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFn(self.den, self.num)

    def __truediv__(self, other: "RationalFn") -> "RationalFn":
        return self * other.inverse()

    def scale(self, c: int) -> "RationalFn":
        return RationalFn(self.num.scale(c), self.den)

    def pow(self, n: int) -> "RationalFn":
        if n < 0:
            return self.inverse().pow(-n)
        return RationalFn(self.num.pow(n), self.den.pow(n))

    def __repr__(self) -> str:
        if self.den == ThetaPoly.one(self.num.gf):
            return f"({format_theta_poly(self.num)})"
        return f"({format_theta_poly(self.num)})/({format_theta_poly(self.den)})"
