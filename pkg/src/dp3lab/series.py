"""Truncated power series with exact rational coefficients.

A ``SeriesQ`` of order N represents a power series known modulo x^N.
Every operation keeps only the coefficients that are determined by both
operands, so results are valid to the smaller of the two orders.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .exact import to_fmpq, to_fraction


class SeriesQ:
    __slots__ = ("poly", "order", "var")

    def __init__(self, coeffs: Iterable | flint.fmpq_poly, order: int, var: str = "z"):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        if isinstance(coeffs, flint.fmpq_poly):
            poly = coeffs
        elif isinstance(coeffs, flint.fmpz_poly):
            poly = flint.fmpq_poly(coeffs)
        else:
            poly = flint.fmpq_poly([to_fmpq(c) for c in coeffs])
        if poly.degree() >= order:
            poly = flint.fmpq_poly(poly.coeffs()[:order])
        self.poly = poly
        self.order = order
        self.var = var

    @classmethod
    def constant(cls, c, order: int, var: str = "z") -> "SeriesQ":
        return cls([c], order, var)

    @classmethod
    def variable(cls, order: int, var: str = "z") -> "SeriesQ":
        return cls([0, 1], order, var)

    # -- access -------------------------------------------------------------

    def __getitem__(self, n: int) -> Fraction:
        if not 0 <= n < self.order:
            raise IndexError(f"coefficient {n} beyond truncation order {self.order}")
        return to_fraction(self.poly[n]) if n <= self.poly.degree() else Fraction(0)

    @property
    def coefficients(self) -> list[Fraction]:
        return [self[n] for n in range(self.order)]

    def integer_coefficients(self) -> list[int]:
        out = []
        for c in self.coefficients:
            if c.denominator != 1:
                raise ValueError(f"non-integral coefficient {c}")
            out.append(int(c.numerator))
        return out

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coefficients[:8])
        more = ", ..." if self.order > 8 else ""
        return f"SeriesQ([{shown}{more}] + O({self.var}^{self.order}))"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "SeriesQ":
        if isinstance(other, SeriesQ):
            if other.var != self.var:
                raise ValueError(f"series in {self.var} and {other.var} cannot be combined")
            return other
        return SeriesQ.constant(other, self.order, self.var)

    def __add__(self, other) -> "SeriesQ":
        o = self._coerce(other)
        return SeriesQ(self.poly + o.poly, min(self.order, o.order), self.var)

    __radd__ = __add__

    def __neg__(self) -> "SeriesQ":
        return SeriesQ(-self.poly, self.order, self.var)

    def __sub__(self, other) -> "SeriesQ":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "SeriesQ":
        return self._coerce(other) - self

    def __mul__(self, other) -> "SeriesQ":
        if not isinstance(other, SeriesQ):
            return SeriesQ(self.poly * to_fmpq(other), self.order, self.var)
        o = self._coerce(other)
        n = min(self.order, o.order)
        return SeriesQ(self.poly.mul_low(o.poly, n) if n else flint.fmpq_poly(), n, self.var)

    __rmul__ = __mul__

    def inverse(self) -> "SeriesQ":
        c0 = self.poly[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        g = flint.fmpq_poly([1 / c0])
        prec = 1
        while prec < self.order:
            prec = min(2 * prec, self.order)
            e = flint.fmpq_poly([1]) - self.poly.mul_low(g, prec)
            g = g + g.mul_low(e, prec)
        return SeriesQ(g, self.order, self.var)

    def __truediv__(self, other) -> "SeriesQ":
        if isinstance(other, SeriesQ):
            return self * self._coerce(other).inverse()
        return SeriesQ(self.poly / to_fmpq(other), self.order, self.var)

    def __rtruediv__(self, other) -> "SeriesQ":
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int) -> "SeriesQ":
        if e < 0:
            return self.inverse() ** (-e)
        result = SeriesQ.constant(1, self.order, self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesQ):
            return NotImplemented
        n = min(self.order, other.order)
        return self.truncate(n).poly == other.truncate(n).poly

    def __hash__(self):
        return hash((str(self.poly), self.order))

    # -- calculus and structure ---------------------------------------------

    def delta(self) -> "SeriesQ":
        """x d/dx, which keeps the truncation order."""
        cs = self.poly.coeffs()
        return SeriesQ(flint.fmpq_poly([n * c for n, c in enumerate(cs)]), self.order, self.var)

    def derivative(self) -> "SeriesQ":
        return SeriesQ(self.poly.derivative(), max(self.order - 1, 0), self.var)

    def truncate(self, order: int) -> "SeriesQ":
        return SeriesQ(self.poly, min(order, self.order), self.var)

    def compose_poly(self, p: flint.fmpq_poly | Sequence) -> "SeriesQ":
        """p(self) by Horner's rule."""
        p = p if isinstance(p, flint.fmpq_poly) else flint.fmpq_poly([to_fmpq(c) for c in p])
        acc = SeriesQ([], self.order, self.var)
        for c in reversed(p.coeffs()):
            acc = acc * self + c
        return acc

    def valuation(self) -> int | None:
        for n in range(self.order):
            if self.poly[n] != 0:
                return n
        return None
