"""Weighted subsets of N*, the monoid of degrees, and composition arrays.

A weighted subset is a finitely supported map N* -> N, stored as a sorted
tuple of (index, multiplicity) pairs.  Composition arrays are columns
(Sigma_i; n_i); their weight is sum(n_i), their type the product (i.e.
multiplicity-sum) of the Sigma_i.

Text grammar (External Interfaces):
    array  := column+
    column := '(' sigma ';' int ')'
    sigma  := '{}' | '{' entry (',' entry)* '}'
    entry  := index | index '^' multiplicity
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class WeightedSubset:
    entries: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def of(*indices: int) -> "WeightedSubset":
        return WeightedSubset.from_map({i: indices.count(i) for i in indices})

    @staticmethod
    def from_map(m: dict[int, int]) -> "WeightedSubset":
        items = tuple(sorted((v, k) for v, k in m.items() if k))
        for v, k in items:
            if v < 1 or k < 0:
                raise ValueError(f"bad weighted subset entry {v}^{k}")
        return WeightedSubset(items)

    def multiplicity(self, v: int) -> int:
        for w, k in self.entries:
            if w == v:
                return k
        return 0

    @property
    def cardinality(self) -> int:
        return sum(k for _, k in self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.entries)

    def is_empty(self) -> bool:
        return not self.entries

    def is_plain(self) -> bool:
        """A plain subset: all multiplicities are 0 or 1."""
        return all(k == 1 for _, k in self.entries)

    def product(self, other: "WeightedSubset") -> "WeightedSubset":
        """Monoid product: multiplicities add."""
        m = dict(self.entries)
        for v, k in other.entries:
            m[v] = m.get(v, 0) + k
        return WeightedSubset.from_map(m)

    def union_max(self, other: "WeightedSubset") -> "WeightedSubset":
        """The additive operation: pointwise max."""
        m = dict(self.entries)
        for v, k in other.entries:
            m[v] = max(m.get(v, 0), k)
        return WeightedSubset.from_map(m)

    def disjoint_from(self, other: "WeightedSubset") -> bool:
        return not (set(self.support) & set(other.support))

    def le(self, other: "WeightedSubset") -> bool:
        return all(k <= other.multiplicity(v) for v, k in self.entries)

    def power(self, n: int) -> "WeightedSubset":
        """n-fold monoid product (multiplicities scaled by n)."""
        return WeightedSubset.from_map({v: k * n for v, k in self.entries})

    def thicken(self, target: "WeightedSubset") -> "WeightedSubset":
        """Trivial thickening constructor: target must have this support."""
        if tuple(sorted(target.support)) != tuple(sorted(self.support)):
            raise ValueError("thickening must preserve the support")
        return target

    def __str__(self) -> str:
        if not self.entries:
            return "{}"
        return "{" + ",".join(f"{v}" if k == 1 else f"{v}^{k}" for v, k in self.entries) + "}"


EMPTY_SET = WeightedSubset()


@dataclass(frozen=True)
class Degree:
    """An element of the monoid of degrees: a weighted subset and a weight."""

    sigma: WeightedSubset
    n: int

    def __mul__(self, other: "Degree") -> "Degree":
        return Degree(self.sigma.product(other.sigma), self.n + other.n)

    @staticmethod
    def unit() -> "Degree":
        return Degree(EMPTY_SET, 0)


@dataclass(frozen=True)
class CompositionArray:
    columns: tuple[tuple[WeightedSubset, int], ...] = ()

    @staticmethod
    def of(*columns) -> "CompositionArray":
        return CompositionArray(tuple((s, int(n)) for s, n in columns))

    @staticmethod
    def thakur(*weights: int) -> "CompositionArray":
        """Trivial-type array with the given column weights."""
        return CompositionArray(tuple((EMPTY_SET, int(n)) for n in weights))

    @property
    def depth(self) -> int:
        return len(self.columns)

    @property
    def weight(self) -> int:
        return sum(n for _, n in self.columns)

    @property
    def type(self) -> WeightedSubset:
        out = EMPTY_SET
        for s, _ in self.columns:
            out = out.product(s)
        return out

    def is_admissible(self) -> bool:
        return all(n > 0 for _, n in self.columns)

    def is_basic(self) -> bool:
        """Type is a plain subset and the column types are pairwise disjoint."""
        seen: set[int] = set()
        for s, _ in self.columns:
            if not s.is_plain():
                return False
            sup = set(s.support)
            if seen & sup:
                return False
            seen |= sup
        return True

    def signature(self) -> int:
        """Sum of the weights on columns of nonempty type (basic arrays only)."""
        if not self.is_basic():
            raise ValueError("signature is defined for basic composition arrays")
        return sum(n for s, n in self.columns if not s.is_empty())

    def lambda_type_q(self, q: int) -> WeightedSubset:
        """The type seen by the polylogarithm side: each nonempty column's
        type is raised to q^r where r counts the empty columns that follow
        it (before the next nonempty column)."""
        if not self.is_admissible():
            raise ValueError("lambda-type is defined for admissible arrays")
        out = EMPTY_SET
        cols = self.columns
        i = 0
        while i < len(cols):
            s, _ = cols[i]
            if s.is_empty():
                i += 1
                continue
            r = 0
            j = i + 1
            while j < len(cols) and cols[j][0].is_empty():
                r += 1
                j += 1
            out = out.product(s.power(q**r))
            i = j
        return out

    def weights(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.columns)

    def suffix(self, start: int) -> "CompositionArray":
        return CompositionArray(self.columns[start:])

    def frobenius_push(self, q: int) -> "CompositionArray":
        """Type multiplicities and weights both scale by q (the tau action
        at the level of arrays)."""
        return CompositionArray(tuple((s.power(q), n * q) for s, n in self.columns))

    def __str__(self) -> str:
        if not self.columns:
            return "()"
        return "".join(f"({s};{n})" for s, n in self.columns)


EMPTY_ARRAY = CompositionArray()


def format_array(c: CompositionArray) -> str:
    return str(c)


_COLUMN_RE = re.compile(r"\(\s*\{([^{}]*)\}\s*;\s*(-?\d+)\s*\)")


def parse_array(text: str) -> CompositionArray:
    """Parse the column grammar; raises ParseError with a position."""
    pos = 0
    cols: list[tuple[WeightedSubset, int]] = []
    s = text.strip()
    while pos < len(s):
        m = _COLUMN_RE.match(s, pos)
        if not m:
            raise ParseError(f"malformed column near {s[pos:pos+12]!r}", pos)
        body, n = m.group(1).strip(), int(m.group(2))
        entries: dict[int, int] = {}
        if body:
            for item_idx, item in enumerate(body.split(",")):
                item = item.strip()
                em = re.fullmatch(r"(\d+)(?:\^(\d+))?", item)
                if not em:
                    raise ParseError(f"malformed set entry {item!r}", pos)
                v = int(em.group(1))
                k = int(em.group(2)) if em.group(2) else 1
                if v < 1:
                    raise ParseError(f"variable index must be positive, got {v}", pos)
                entries[v] = entries.get(v, 0) + k
        cols.append((WeightedSubset.from_map(entries), n))
        pos = m.end()
    if not cols:
        raise ParseError("expected at least one column", 0)
    return CompositionArray(tuple(cols))


def compositions(n: int, max_parts: int | None = None):
    """Ordered compositions of n into positive parts."""
    if n == 0:
        yield ()
        return
    limit = n if max_parts is None else min(n, max_parts)
    def rec(rest: int, parts: tuple[int, ...], room: int):
        if rest == 0:
            yield parts
            return
        if room == 0:
            return
        for first in range(1, rest + 1):
            yield from rec(rest - first, parts + (first,), room - 1)
    yield from rec(n, (), limit)


def _distributions(total: int, bins: int):
    """All ways to write total = x_1 + ... + x_bins with x_i >= 0."""
    if bins == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _distributions(total - first, bins - 1):
            yield (first,) + rest


def enumerate_admissible(
    weight: int, type_: WeightedSubset = EMPTY_SET, max_depth: int | None = None
) -> list[CompositionArray]:
    """All admissible composition arrays of the given weight and type with
    depth <= max_depth, each exactly once, ordered by (depth, columns)."""
    out: list[CompositionArray] = []
    if weight == 0:
        return [EMPTY_ARRAY] if type_.is_empty() else []
    for parts in compositions(weight, max_depth):
        r = len(parts)
        # distribute each variable's multiplicity over the r columns
        per_var = []
        for v, k in type_.entries:
            per_var.append([(v, dist) for dist in _distributions(k, r)])
        if not per_var:
            out.append(CompositionArray.thakur(*parts))
            continue
        for combo in itertools.product(*per_var):
            cols = []
            for i in range(r):
                m = {v: dist[i] for v, dist in combo if dist[i]}
                cols.append((WeightedSubset.from_map(m), parts[i]))
            out.append(CompositionArray(tuple(cols)))
    out.sort(key=lambda c: (c.depth, [(s.entries, n) for s, n in c.columns]))
    return out
