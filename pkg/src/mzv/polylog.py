"""Multiple polylogarithms, the Carlitz log/exp tables, the Hadamard
product, and the two routes from zeta values to polylogarithms.

The coefficient of an X-monomial of a polylogarithm is a chain product of
trivial-type power sums, so XSeries coefficients are t-free truncated
series.  The interpolation route rewrites a zeta value against diagonal
chain sums (signature descent) and maps each head to its polylogarithm;
the evaluation route sums evaluations at t = theta^(q^k) against powers
of the Carlitz logarithm.  The two agree on trivial values; their
difference is the engine behind the relation families.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .composition import CompositionArray, EMPTY_SET, WeightedSubset, enumerate_admissible
from .context import Context
from .errors import InsufficientPrecision
from .series import NEG_INF, TruncSeries
from .theta import RationalFn, ThetaPoly, d_poly, l_poly
from .zeta import TruncZeta, ZetaCombination, _as_combination, trivial_scan_bound

XMono = tuple  # tuple[(variable, exponent), ...] sorted


def xmono_mul(a: XMono, b: XMono) -> XMono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def xmono_str(m: XMono) -> str:
    if not m:
        return "1"
    return "*".join(f"X{v}" if e == 1 else f"X{v}^{e}" for v, e in m)


@dataclass
class XSeries:
    """Finitely supported map from X-monomials to t-free truncated series."""

    gf: object
    terms: dict = field(default_factory=dict)

    def cleaned(self) -> "XSeries":
        """Drop exact zeros only; zero-to-floor entries stay, recording the
        window in which the coefficient is known to vanish."""
        return XSeries(
            self.gf,
            {m: s for m, s in self.terms.items()
             if not (s.is_exact() and s.is_zero_to_floor())},
        )

    def __add__(self, other: "XSeries") -> "XSeries":
        out = dict(self.terms)
        for m, s in other.terms.items():
            out[m] = out[m] + s if m in out else s
        return XSeries(self.gf, out)

    def __neg__(self) -> "XSeries":
        return XSeries(self.gf, {m: -s for m, s in self.terms.items()})

    def __sub__(self, other: "XSeries") -> "XSeries":
        return self + (-other)

    def scale_series(self, s: TruncSeries) -> "XSeries":
        return XSeries(self.gf, {m: c * s for m, c in self.terms.items()})

    def scale_rational(self, r: RationalFn, floor: int | None = None) -> "XSeries":
        return XSeries(
            self.gf, {m: c.scale_rational(r, floor) for m, c in self.terms.items()}
        )

    def scale_int(self, c: int) -> "XSeries":
        return XSeries(self.gf, {m: s.scale_int(c) for m, s in self.terms.items()})

    def mul(self, other: "XSeries") -> "XSeries":
        out: dict = {}
        for m1, s1 in self.terms.items():
            for m2, s2 in other.terms.items():
                m = xmono_mul(m1, m2)
                prod = s1 * s2
                out[m] = out[m] + prod if m in out else prod
        return XSeries(self.gf, out)

    def hadamard(self, other: "XSeries") -> "XSeries":
        """Coefficientwise product over matching X-monomials."""
        out = {}
        for m, s in self.terms.items():
            o = other.terms.get(m)
            if o is not None:
                out[m] = s * o
        return XSeries(self.gf, out)

    def frobenius_power(self) -> "XSeries":
        """Raise to the q-th power: X-exponents scale by q, coefficients
        get their theta-exponents scaled (F_q coefficients are fixed)."""
        return XSeries(
            self.gf,
            {
                tuple((v, e * self.gf.q) for v, e in m): s.frobenius_twist(1)
                for m, s in self.terms.items()
            },
        )

    def truncate_x(self, cap: int) -> "XSeries":
        return XSeries(
            self.gf,
            {m: s for m, s in self.terms.items() if all(e <= cap for _, e in m)},
        )

    def evaluate_x1(self) -> TruncSeries:
        acc = TruncSeries.zero(self.gf)
        for _, s in self.terms.items():
            acc = acc + s
        return acc

    def residual_top(self, other: "XSeries", absent_floor=NEG_INF):
        """Largest disagreement position across monomials, or None.

        A monomial missing from one side counts as exactly zero unless
        `absent_floor` is given, in which case it counts as zero only in
        the window above that floor (use this when both sides were built
        at a common precision)."""
        worst = None
        for m in set(self.terms) | set(other.terms):
            a = self.terms.get(m)
            b = other.terms.get(m)
            if a is None:
                a = TruncSeries(self.gf, {}, absent_floor, 0)
            if b is None:
                b = TruncSeries(self.gf, {}, absent_floor, 0)
            r = a.residual_top(b)
            if r is not None:
                worst = r if worst is None else max(worst, r)
        return worst

    def agrees_with(self, other: "XSeries", absent_floor=NEG_INF) -> bool:
        return self.residual_top(other, absent_floor) is None

    def is_zero_to_floor(self) -> bool:
        return all(s.is_zero_to_floor() for s in self.terms.values())

    def sorted_items(self):
        return sorted(self.terms.items())


def polylog(ctx: Context, c: CompositionArray, d_max: int | None = None,
            prec: int | None = None) -> XSeries:
    """The polylogarithm of an admissible array: chains d_1 > ... > d_r with
    d_1 < d_max, trivial-type layer products as coefficients, X-exponents
    sum the q^(d_j) per variable."""
    if not c.is_admissible():
        raise ValueError("polylogarithms need admissible arrays")
    d_max = ctx.d_max if d_max is None else d_max
    prec = ctx.prec if prec is None else prec
    g = ctx.gf
    eng = ctx.sums
    floor = -prec
    out: dict = {}

    def rec(idx: int, cap: int, coeff: TruncSeries, expo: dict[int, int]):
        if idx == c.depth:
            m = tuple(sorted(expo.items()))
            out[m] = out[m] + coeff if m in out else coeff
            return
        sigma, n = c.columns[idx]
        for d in range(cap):
            layer = eng.column_sum(EMPTY_SET, n, d, floor)
            if d > 0 and layer.is_zero_to_floor():
                continue
            e2 = dict(expo)
            for v, k in sigma.entries:
                e2[v] = e2.get(v, 0) + k * ctx.q**d
            rec(idx + 1, d, coeff * layer, e2)

    rec(0, d_max, TruncSeries.one(g).weaken_floor(floor), {})
    return XSeries(g, out).cleaned()


def carlitz_log_coeffs(ctx: Context, n: int) -> list[RationalFn]:
    """Coefficients of the Carlitz logarithm at X^(q^d), d = 0..n: 1/l_d."""
    return [RationalFn(ThetaPoly.one(ctx.gf), l_poly(ctx.gf, d)) for d in range(n + 1)]


def carlitz_exp_coeffs(ctx: Context, n: int) -> list[RationalFn]:
    """Coefficients of the Carlitz exponential at X^(q^d), d = 0..n: 1/D_d."""
    return [RationalFn(ThetaPoly.one(ctx.gf), d_poly(ctx.gf, d)) for d in range(n + 1)]


def compose_qlinear(ctx: Context, outer: list[RationalFn],
                    inner: list[RationalFn]) -> list[RationalFn]:
    """Composition of F_q-linear series given by q-power coefficient tables:
    (outer o inner)_m = sum_{i+j=m} outer_i * inner_j^(q^i)."""
    n = min(len(outer), len(inner)) - 1
    out = []
    for m in range(n + 1):
        acc = RationalFn.zero(ctx.gf)
        for i in range(m + 1):
            acc = acc + outer[i] * inner[m - i].pow(ctx.q**i)
        out.append(acc)
    return out


def log_power_xseries(ctx: Context, var: int, i: int, d_max: int,
                      prec: int) -> XSeries:
    """The q^i-th power of the basic polylogarithm in X_var, truncated."""
    g = ctx.gf
    base = {}
    for d in range(d_max):
        coeff = TruncSeries.one(g).scale_rational(
            RationalFn(ThetaPoly.one(g), l_poly(g, d)), floor=-prec
        )
        base[((var, g.q**d),)] = coeff
    out = XSeries(g, base)
    for _ in range(i):
        out = out.frobenius_power()
    return out


@dataclass
class DiagonalForm:
    """One signature-descent step: zeta(head) = zeta_diag(head) +
    sum alpha_i zeta(tail_i), each tail of strictly smaller signature."""

    head: CompositionArray
    tail_terms: list[tuple[int, CompositionArray]] = field(default_factory=list)


def diagonal_decompose(ctx: Context, c: CompositionArray,
                       prec: int | None = None) -> DiagonalForm:
    """Fit the descent step over F_p by matching layers, verified on two
    held-out layers.  Candidates are the admissible arrays of the same
    weight and type with strictly smaller signature."""
    from .powersums import NoSolution  # local to avoid cycle noise

    if not c.is_admissible():
        raise ValueError("diagonal decomposition needs an admissible array")
    if not c.is_basic():
        raise ValueError("diagonal decomposition needs a basic array")
    typ = c.type
    if typ.cardinality >= ctx.q:
        raise ValueError("diagonal decomposition needs |type| < q")
    eng = ctx.sums
    sig = c.signature()
    candidates = [
        cand
        for cand in enumerate_admissible(c.weight, typ, c.weight)
        if cand.signature() < sig
    ]
    if prec is None:
        prec = 2 * c.weight + 3 * ctx.q + 8
    floor = -prec
    lhs = lambda d: eng.power_sum(c, d, floor) - eng.diag_power_sum(c, d, floor)
    val = lambda cand, d: eng.power_sum(cand, d, floor)
    d_fit = c.weight + 2
    if not candidates:
        for d in range(d_fit):
            if not lhs(d).is_zero_to_floor():
                raise NoSolution(f"no candidates but nonzero defect at layer {d}")
        return DiagonalForm(c, [])
    terms = eng._fit_rule(lhs, candidates, val, list(range(d_fit + 1)),
                          [d_fit + 1, d_fit + 2])
    return DiagonalForm(c, terms)


def _min_signature(c: CompositionArray) -> int:
    return sum(1 for s, _ in c.columns if not s.is_empty())


def interp_image(ctx: Context, c: CompositionArray) -> list[tuple[int, CompositionArray]]:
    """The interpolation image of zeta(c) as an F_p-combination of
    polylogarithm arrays, by recursive signature descent."""
    eng = ctx.sums
    cache = getattr(eng, "_interp_cache", None)
    if cache is None:
        cache = eng._interp_cache = {}
    key = c.columns
    hit = cache.get(key)
    if hit is not None:
        return hit
    if c.type.is_empty():
        out = [(1, c)]
    else:
        form = diagonal_decompose(ctx, c)
        acc: dict = {c.columns: 1}
        for alpha, tail in form.tail_terms:
            for beta, arr in interp_image(ctx, tail):
                k2 = arr.columns
                acc[k2] = (acc.get(k2, 0) + alpha * beta) % ctx.gf.p
        out = [
            (v, CompositionArray(k)) for k, v in sorted(acc.items()) if v
        ]
    cache[key] = out
    return out


def harmonic_expand_product(ctx: Context, c1: CompositionArray,
                            c2: CompositionArray) -> list[tuple[int, CompositionArray]]:
    """zeta(c1) * zeta(c2) as an F_p-combination of zeta values, via the
    three layer-product rules (the quasi-shuffle split d>e, d<e, d=e)."""
    eng = ctx.sums
    p = ctx.gf.p
    if c1.depth == 0:
        return [(1, c2)]
    if c2.depth == 0:
        return [(1, c1)]
    acc: dict = {}
    for coeff, arr in eng.harmonic_solve(c1, c2, "d<").terms:
        acc[arr.columns] = (acc.get(arr.columns, 0) + coeff) % p
    for coeff, arr in eng.harmonic_solve(c2, c1, "d<").terms:
        acc[arr.columns] = (acc.get(arr.columns, 0) + coeff) % p
    for coeff, arr in eng.harmonic_solve(c1, c2, "dd").terms:
        acc[arr.columns] = (acc.get(arr.columns, 0) + coeff) % p
    return [(v, CompositionArray(k)) for k, v in sorted(acc.items()) if v]


def combination_as_arrays(ctx: Context, comb: ZetaCombination) -> list[tuple[RationalFn, CompositionArray]]:
    """Flatten products inside a combination through the harmonic rules."""
    out: dict = {}
    gfq = ctx.gf
    for coeff, factors in comb.terms:
        expanded: list[tuple[int, CompositionArray]] = [(1, factors[0])] if factors else [
            (1, CompositionArray())
        ]
        for extra in factors[1:]:
            nxt: dict = {}
            for fp_c, arr in expanded:
                for fp2, arr2 in harmonic_expand_product(ctx, arr, extra):
                    k = arr2.columns
                    nxt[k] = (nxt.get(k, 0) + fp_c * fp2) % gfq.p
            expanded = [(v, CompositionArray(k)) for k, v in nxt.items() if v]
        for fp_c, arr in expanded:
            key = arr.columns
            cur = out.get(key, RationalFn.zero(gfq))
            out[key] = cur + coeff.scale(gfq.from_int(fp_c))
    return [
        (v, CompositionArray(k)) for k, v in sorted(out.items()) if not v.is_zero()
    ]


def to_polylog_interp(ctx: Context, z, d_max: int | None = None,
                      prec: int | None = None) -> XSeries:
    """The interpolation route: signature descent, heads to polylogarithms."""
    comb = _as_combination(z)
    g = ctx.gf
    floor = -(ctx.prec if prec is None else prec)
    acc = XSeries(g, {})
    for coeff, arr in combination_as_arrays(ctx, comb):
        for fp_c, head in interp_image(ctx, arr):
            lam = polylog(ctx, head, d_max, prec).scale_int(g.from_int(fp_c))
            acc = acc + lam.scale_rational(coeff, floor)
    return acc.cleaned()


def interp_coefficient_route(ctx: Context, z, i_max: int,
                             prec: int | None = None) -> XSeries:
    """Independent interpolation route through the coefficient formula

        f_i = sum_{j <= i} f(theta^(q^j)) / (D_j l_{i-j}^(q^j))

    (finitely many i suffice for trivial values; used as a cross-check)."""
    comb = _as_combination(z)
    prec_v = ctx.prec if prec is None else prec
    g = ctx.gf
    support = comb.type.support
    out: dict = {}
    evals: dict = {}
    for combo in itertools.product(range(i_max + 1), repeat=len(support)):
        evals[combo] = comb.eval_at(dict(zip(support, combo)), prec_v)
    for combo in itertools.product(range(i_max + 1), repeat=len(support)):
        acc = TruncSeries.zero(g).weaken_floor(-prec_v)
        for sub in itertools.product(*[range(i + 1) for i in combo]):
            denom = RationalFn.one(g)
            for j, i in zip(sub, combo):
                denom = denom * RationalFn(d_poly(g, j)) * RationalFn(
                    l_poly(g, i - j)
                ).pow(ctx.q**j)
            acc = acc + evals[sub].scale_rational(denom.inverse(), floor=-prec_v)
        if acc.is_zero_to_floor():
            continue
        mono = tuple(
            (v, ctx.q**i) for v, i in zip(support, combo)
        )
        out[mono] = acc
    return XSeries(g, out)


def to_polylog_eval(ctx: Context, z, d_max: int | None = None,
                    prec: int | None = None, scan_bound: int | None = None) -> XSeries:
    """The evaluation route: sum the evaluations at t = theta^(q^k) against
    powers of the basic polylogarithm."""
    comb = _as_combination(z)
    g = ctx.gf
    d_max_v = ctx.d_max if d_max is None else d_max
    prec_v = ctx.prec if prec is None else prec
    support = comb.type.support
    if scan_bound is None:
        scan_bound = trivial_scan_bound(ctx, comb.weight, support) + 1
    acc = XSeries(g, {})
    for combo in itertools.product(range(scan_bound + 1), repeat=len(support)):
        kvec = dict(zip(support, combo))
        val = comb.eval_at(kvec, prec_v)
        if val.is_zero_to_floor():
            continue
        dk = RationalFn.one(g)
        xfac = XSeries(g, {(): TruncSeries.one(g).weaken_floor(-prec_v)})
        for v, k in kvec.items():
            dk = dk * RationalFn(d_poly(g, k))
            xfac = xfac.mul(log_power_xseries(ctx, v, k, d_max_v, prec_v))
        term = xfac.scale_series(val).scale_rational(dk.inverse(), floor=-prec_v)
        acc = acc + term
    return acc.cleaned()


def functional_equation_check(ctx: Context, z, prec: int | None = None,
                              scan_bound: int = 3, x_cap: int | None = None):
    """Compare the evaluation image of the twisted value against the q-th
    power of the image: the twist evaluations are B_1(Sigma)(theta^(q^k))
    times the q-th powers of the shifted evaluations."""
    comb = _as_combination(z)
    g = ctx.gf
    prec_v = ctx.prec if prec is None else prec
    d_max_v = ctx.d_max
    support = comb.type.support
    if x_cap is None:
        x_cap = ctx.q ** (scan_bound + 1)
    rhs = to_polylog_eval(ctx, comb, d_max_v, prec_v, scan_bound).frobenius_power()
    acc = XSeries(g, {})
    for combo in itertools.product(range(1, scan_bound + 2), repeat=len(support)):
        kvec = dict(zip(support, combo))
        prev = comb.eval_at({v: k - 1 for v, k in kvec.items()}, prec_v)
        val = prev.frobenius_twist(1)
        b1 = ThetaPoly.one(g)
        for v, k in kvec.items():
            b1 = b1 * (ThetaPoly.theta(g, ctx.q**k) - ThetaPoly.theta(g, 1))
        val = val.mul_theta_poly(b1)
        if val.is_zero_to_floor():
            continue
        dk = RationalFn.one(g)
        xfac = XSeries(g, {(): TruncSeries.one(g).weaken_floor(-prec_v)})
        for v, k in kvec.items():
            dk = dk * RationalFn(d_poly(g, k))
            xfac = xfac.mul(log_power_xseries(ctx, v, k, d_max_v, prec_v))
        acc = acc + xfac.scale_series(val).scale_rational(dk.inverse(), floor=-prec_v)
    lhs = acc.cleaned().truncate_x(x_cap)
    rhs = rhs.cleaned().truncate_x(x_cap)
    return lhs.residual_top(rhs) is None, lhs.residual_top(rhs)


def thakur_image(ctx: Context, c: CompositionArray) -> list[tuple[int, tuple[int, ...]]]:
    """The trivial-type image of zeta(c) under the interpolation route
    followed by X = 1: arrays map to their weight tuples."""
    out: dict = {}
    for fp_c, arr in interp_image(ctx, c):
        w = arr.weights()
        out[w] = (out.get(w, 0) + fp_c) % ctx.gf.p
    return [(v, w) for w, v in sorted(out.items()) if v]
