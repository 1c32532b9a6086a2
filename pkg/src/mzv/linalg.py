"""Exact linear algebra over GF(q) and over F_q(theta).

Gaussian elimination, nullspace bases in reduced echelon form (so output
is reproducible), an F_p-restricted solver for systems whose constants
live in GF(q) = GF(p^e), and RREF over the rational function field for
reducing discovered relation certificates.
"""

from __future__ import annotations

from .field import GF
from .theta import RationalFn


class LinearSystem:
    """Dense matrix over GF(q) with optional row labels."""

    def __init__(self, gf: GF, rows: list[list[int]], ncols: int, labels=None):
        self.gf = gf
        self.rows = [list(r) for r in rows]
        self.ncols = ncols
        self.labels = labels

    def matvec(self, v: list[int]) -> list[int]:
        g = self.gf
        out = []
        for row in self.rows:
            s = 0
            for a, x in zip(row, v):
                if a and x:
                    s = g.add(s, g.mul(a, x))
            out.append(s)
        return out


def rref(gf: GF, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """In-place-style reduced row echelon form; returns (rows, pivot columns)."""
    m = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = gf.inv(m[r][col])
        if inv != 1:
            m[r] = [gf.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                c = m[i][col]
                row_r = m[r]
                m[i] = [gf.sub(x, gf.mul(c, y)) for x, y in zip(m[i], row_r)]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(system: LinearSystem) -> list[list[int]]:
    """Basis of the exact nullspace, reduced echelon over GF(q).

    Basis vectors v satisfy M v = 0 exactly; free variables are set to 1
    one at a time (remaining free variables zero), which gives the
    canonical reduced basis.
    """
    gf = system.gf
    n = system.ncols
    m, pivots = rref(gf, system.rows, n)
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = gf.neg(m[i][f])
        basis.append(v)
    return basis


def solve_fp(gf: GF, equations: list[tuple[list[int], int]], nunknowns: int):
    """Solve sum_i x_i a_i = b with a_i, b in GF(q) but x_i restricted to F_p.

    Each GF(q) equation is expanded into e = [GF(q):F_p] equations over
    F_p.  Returns (solution or None, underdetermined flag).  When the
    system is underdetermined, free unknowns are set to zero (minimal
    support representative).
    """
    p, e = gf.p, gf.e
    fp = GF(p) if p != gf.q else gf
    rows: list[list[int]] = []
    for coeffs, rhs in equations:
        cols = [gf.coords(a) for a in coeffs]
        rc = gf.coords(rhs)
        for j in range(e):
            row = [cols[i][j] for i in range(nunknowns)]
            row.append(rc[j])
            if any(row):
                rows.append(row)
    m, pivots = rref(fp, rows, nunknowns + 1)
    if nunknowns in pivots:
        return None, False  # inconsistent: pivot in the constants column
    x = [0] * nunknowns
    for i, c in enumerate(pivots):
        x[c] = m[i][nunknowns]
    underdetermined = len(pivots) < nunknowns
    return x, underdetermined


def rref_rational(vectors: list[list[RationalFn]]) -> list[list[RationalFn]]:
    """Reduced echelon form of row vectors over F_q(theta).

    Returns a canonical basis of the row span (each row starts with 1 at
    its pivot, zeros above and below the pivots).
    """
    if not vectors:
        return []
    gf = vectors[0][0].num.gf
    zero = RationalFn.zero(gf)
    m = [list(v) for v in vectors]
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if not m[i][col].is_zero():
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][col].is_zero():
                c = m[i][col]
                m[i] = [x - c * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r] if any(not x.is_zero() for x in row)]


def in_rational_span(basis: list[list[RationalFn]], vector: list[RationalFn]) -> bool:
    """Exact membership of `vector` in the row span of `basis`."""
    if all(x.is_zero() for x in vector):
        return True
    combined = rref_rational(list(basis) + [vector])
    return len(combined) == len(rref_rational(list(basis)))
