"""Shared computation context: field choice, defaults, caches."""

from __future__ import annotations

from .field import GF, gf
from .powersums import PowerSumEngine


class Context:
    """Everything downstream hangs off one of these: the field, the default
    precision knobs, and the power-sum engine with its caches."""

    def __init__(self, q: int, prec: int = 24, d_max: int = 10):
        if prec < 4:
            raise ValueError("prec must be at least 4")
        if d_max < 2:
            raise ValueError("d_max must be at least 2")
        self.q = q
        self.gf: GF = gf(q)
        self.p = self.gf.p
        self.e = self.gf.e
        self.prec = prec
        self.d_max = d_max
        self.sums = PowerSumEngine(self.gf)

    def __repr__(self) -> str:
        return f"Context(q={self.q}, prec={self.prec}, d_max={self.d_max})"
