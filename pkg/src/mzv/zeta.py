"""Truncated zeta values in Tate algebras and the trivial-value module.

A zeta value is the sum over all layers of the power sums of its array;
we keep the partial sum over layers below a cutoff together with a sound
exactness floor.  Evaluations at t_j = theta^(q^k) go through the array
itself (the column weights absorb q^k), which keeps them exact: no guard
digits are burned on substitution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .composition import CompositionArray, EMPTY_SET, WeightedSubset
from .context import Context
from .errors import InsufficientPrecision, ResidualNonzero
from .series import NEG_INF, TruncSeries, b_product_series
from .theta import RationalFn, ThetaPoly, d_poly


@dataclass
class TruncZeta:
    """A zeta value truncated at layer d_max, exact down to its floor."""

    ctx: Context
    array: CompositionArray
    series: TruncSeries
    d_max: int

    @property
    def weight(self) -> int:
        return self.array.weight

    @property
    def type(self) -> WeightedSubset:
        return self.array.type

    def as_combination(self) -> "ZetaCombination":
        return ZetaCombination(
            self.ctx, [(RationalFn.one(self.ctx.gf), (self.array,))]
        )


def zeta(ctx: Context, c: CompositionArray, d_max: int | None = None,
         prec: int | None = None) -> TruncZeta:
    """Partial sum of the layers of an admissible array."""
    if not c.is_admissible():
        return zeta_nonadmissible(ctx, c, prec)
    d_max = ctx.d_max if d_max is None else d_max
    prec = ctx.prec if prec is None else prec
    eng = ctx.sums
    floor = -prec
    acc = TruncSeries.zero(ctx.gf).weaken_floor(floor)
    for d in range(d_max):
        acc = acc + eng.power_sum(c, d, floor)
    tail = eng.array_tail_val(c, d_max)
    if tail is not None:
        acc = acc.weaken_floor(max(floor, -tail + 1))
    return TruncZeta(ctx, c, acc, d_max)


def zeta_nonadmissible(ctx: Context, c: CompositionArray,
                       prec: int | None = None) -> TruncZeta:
    """Zeta value of an array with some non-positive weights: the layers
    vanish identically past a cutoff found by the vanishing bound, so the
    value is a finite sum."""
    if c.is_admissible():
        return zeta(ctx, c)
    prec = ctx.prec if prec is None else prec
    eng = ctx.sums
    D = eng.stable_cutoff(c, prec)
    floor = -prec
    acc = TruncSeries.zero(ctx.gf).weaken_floor(floor)
    for d in range(D):
        acc = acc + eng.power_sum(c, d, floor)
    return TruncZeta(ctx, c, acc, D)


def sigma_twist(ctx: Context, f, sigma: WeightedSubset) -> TruncSeries:
    """The twist B_1(Sigma) * tau: Frobenius on the theta-coefficients
    followed by multiplication with prod (t_j - theta)."""
    series = f.series if isinstance(f, TruncZeta) else f
    twisted = series.frobenius_twist(1)
    b1 = b_product_series(ctx.gf, 1, [v for v, k in sigma.entries for _ in range(k)])
    return twisted * b1


def generator_array(ctx: Context, k: int, var: int = 1) -> CompositionArray:
    """(({var}), 0, ..., 0; 1, q-1, ..., (q-1)q^(k-1)), depth k+1."""
    q = ctx.q
    cols = [(WeightedSubset.of(var), 1)]
    cols += [(EMPTY_SET, (q - 1) * q**i) for i in range(k)]
    return CompositionArray.of(*cols)


def trivial_generator(ctx: Context, k: int, var: int = 1,
                      d_max: int | None = None, prec: int | None = None) -> TruncZeta:
    """The k-th generator of the trivial module in the variable t_var."""
    return zeta(ctx, generator_array(ctx, k, var), d_max, prec)


def shift_array_eval(c: CompositionArray, q: int, kvec: dict[int, int]) -> CompositionArray:
    """The array computing the evaluation t_j -> theta^(q^(k_j)) for the
    variables in kvec: types lose those variables, weights absorb q^(k_j)
    per multiplicity."""
    cols = []
    for s, n in c.columns:
        drop = 0
        kept = {}
        for v, mult in s.entries:
            if v in kvec:
                drop += mult * q ** kvec[v]
            else:
                kept[v] = mult
        cols.append((WeightedSubset.from_map(kept), n - drop))
    return CompositionArray.of(*cols)


def eval_array_at(ctx: Context, c: CompositionArray, kvec: dict[int, int],
                  prec: int | None = None) -> TruncSeries:
    """zeta(c) evaluated at t_j = theta^(q^(k_j)), computed exactly through
    the shifted array."""
    prec = ctx.prec if prec is None else prec
    if prec <= 0:
        raise InsufficientPrecision("evaluation window is empty", suggested_prec=8)
    shifted = shift_array_eval(c, ctx.q, kvec)
    z = zeta_nonadmissible(ctx, shifted, prec) if not shifted.is_admissible() else zeta(
        ctx, shifted, None, prec
    )
    return z.series


def eval_at_theta_powers(z: TruncZeta, kvec: dict[int, int],
                         prec: int | None = None) -> TruncSeries:
    """Evaluate a truncated zeta value at t_j = theta^(q^(k_j)) for every
    variable of its type."""
    support = set(z.type.support)
    if set(kvec) != support:
        raise ValueError(f"evaluation must cover the type support {support}")
    return eval_array_at(z.ctx, z.array, kvec, prec)


@dataclass
class ZetaCombination:
    """A K-linear combination of products of zeta values.

    Products are kept as factor tuples so that evaluation (a ring map)
    can be pushed through factors exactly."""

    ctx: Context
    terms: list[tuple[RationalFn, tuple[CompositionArray, ...]]] = field(default_factory=list)

    @property
    def weight(self) -> int:
        ws = {sum(a.weight for a in f) for _, f in self.terms}
        if len(ws) != 1:
            raise ValueError("combination is not weight-homogeneous")
        return ws.pop()

    @property
    def type(self) -> WeightedSubset:
        ts = set()
        for _, f in self.terms:
            t = EMPTY_SET
            for a in f:
                t = t.product(a.type)
            ts.add(t)
        if len(ts) != 1:
            raise ValueError("combination is not type-homogeneous")
        return ts.pop()

    def series(self, d_max: int | None = None, prec: int | None = None) -> TruncSeries:
        ctx = self.ctx
        prec_v = ctx.prec if prec is None else prec
        acc = TruncSeries.zero(ctx.gf).weaken_floor(-prec_v)
        for coeff, factors in self.terms:
            prod = TruncSeries.one(ctx.gf)
            for a in factors:
                prod = prod * zeta(ctx, a, d_max, prec_v).series
            acc = acc + prod.scale_rational(coeff, floor=-prec_v)
        return acc

    def eval_at(self, kvec: dict[int, int], prec: int | None = None) -> TruncSeries:
        ctx = self.ctx
        prec_v = ctx.prec if prec is None else prec
        acc = TruncSeries.zero(ctx.gf).weaken_floor(-prec_v)
        for coeff, factors in self.terms:
            prod = TruncSeries.one(ctx.gf)
            for a in factors:
                sub = {v: kvec[v] for v in a.type.support}
                prod = prod * eval_array_at(ctx, a, sub, prec_v)
            acc = acc + prod.scale_rational(coeff, floor=-prec_v)
        return acc


def _as_combination(z) -> ZetaCombination:
    return z.as_combination() if isinstance(z, TruncZeta) else z


def trivial_scan_bound(ctx: Context, weight: int, support: tuple[int, ...]) -> int:
    """Largest single index worth scanning: beyond it the weight bound
    forces zero evaluations for trivial values."""
    q = ctx.q
    k = 0
    while q ** (k + 1) + (len(support) - 1) <= weight:
        k += 1
    return k


def is_trivial(z, k_scan: int = 2, prec: int | None = None):
    """Decide (at precision) whether all but finitely many evaluations at
    t_j = theta^(q^(k_j)) vanish.

    Scans the weight-bounded region (nonzero evaluations of a trivial
    value need weight >= sum q^(k_j)) and `k_scan` further indices beyond
    it; a nonzero evaluation beyond the bound certifies non-triviality.
    Returns (verdict, witnesses) where witnesses lists the nonzero
    in-bound evaluations as (kvec, series)."""
    comb = _as_combination(z)
    ctx = comb.ctx
    typ = comb.type
    if not typ.is_plain() or typ.cardinality >= ctx.q:
        raise ValueError("triviality scan needs a plain type with fewer than q variables")
    weight = comb.weight
    support = typ.support
    bound = trivial_scan_bound(ctx, weight, support)
    witnesses = []
    verdict = True
    for combo in itertools.product(range(bound + k_scan + 1), repeat=len(support)):
        kvec = dict(zip(support, combo))
        val = comb.eval_at(kvec, prec)
        if val.is_zero_to_floor():
            continue
        if sum(ctx.q**k for k in combo) <= weight:
            witnesses.append((kvec, val))
        else:
            verdict = False
            witnesses.append((kvec, val))
    return verdict, witnesses


@dataclass
class TrivialDecomposition:
    """f = sum over multi-indices of (-1)^|k| f_k prod_j xi_{k_j}(t_j) with
    f_k in the trivial-type algebra (here: its truncated series)."""

    coefficients: dict[tuple[tuple[int, int], ...], TruncSeries]
    residual: TruncSeries
    floor: int | None


def trivial_decompose(z, d_max: int | None = None, prec: int | None = None,
                      k_scan: int = 2) -> TrivialDecomposition:
    """Read off the coefficients of a trivial value against the generator
    basis by evaluation, and verify the reconstruction vanishes."""
    comb = _as_combination(z)
    ctx = comb.ctx
    verdict, witnesses = is_trivial(comb, k_scan=k_scan, prec=prec)
    if not verdict:
        raise ValueError("value is not trivial at this precision; no decomposition")
    support = comb.type.support
    coefficients = {}
    recon = comb.series(d_max, prec)
    for kvec, val in witnesses:
        key = tuple(sorted(kvec.items()))
        coefficients[key] = val
        term = val
        sign = sum(kvec.values())
        for v, k in kvec.items():
            term = term * zeta(ctx, generator_array(ctx, k, v), d_max, prec).series
        if sign % 2 == 1:
            term = -term
        recon = recon - term
    if not recon.is_zero_to_floor():
        raise ResidualNonzero(
            f"trivial reconstruction leaves residual above floor {recon.floor}: "
            f"top at theta^{recon.top_degree()}"
        )
    return TrivialDecomposition(coefficients, recon, recon.floor)


def coefficient_frobenius(z, k: int = 1) -> TruncSeries:
    """The p-power map on theta-coefficients, t-variables fixed."""
    series = z.series if isinstance(z, TruncZeta) else z
    return series.coefficient_frobenius(k)


def theta_degree_of_eval(ctx: Context, c: CompositionArray, var: int, k: int,
                         prec: int | None = None) -> int | None:
    """deg_theta of zeta(c) evaluated at t_var = theta^(q^k); None if the
    evaluation vanishes on its window."""
    val = eval_array_at(ctx, c, {var: k}, prec)
    return val.top_degree()
