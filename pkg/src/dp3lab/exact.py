"""Exact arithmetic in the single variable s = a^2.

Polynomials are dense with rational coefficients (backed by FLINT).
Rational functions keep their denominator factored as a product of
(s + k^2)^e and are always stored fully reduced.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import flint

ExactRational = Fraction


def to_fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, (int, flint.fmpz)):
        return flint.fmpq(x)
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    raise TypeError(f"not an exact rational: {x!r}")


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    raise TypeError(f"not an exact rational: {x!r}")


class PolyS:
    """Dense polynomial with exact rational coefficients, lowest power first."""

    __slots__ = ("_p",)

    def __init__(self, coeffs: Iterable = ()):
        if isinstance(coeffs, flint.fmpq_poly):
            self._p = coeffs
        elif isinstance(coeffs, flint.fmpz_poly):
            self._p = flint.fmpq_poly(coeffs)
        else:
            self._p = flint.fmpq_poly([to_fmpq(c) for c in coeffs])

    # construction helpers
    @classmethod
    def constant(cls, c) -> "PolyS":
        return cls([c])

    @classmethod
    def linear(cls, c) -> "PolyS":
        """The polynomial s + c."""
        return cls([c, 1])

    @property
    def flint(self) -> flint.fmpq_poly:
        return self._p

    @property
    def coeffs(self) -> list[Fraction]:
        return [to_fraction(c) for c in self._p.coeffs()]

    def degree(self) -> int:
        return self._p.degree()

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def __len__(self) -> int:
        return self._p.length()

    def __getitem__(self, i: int) -> Fraction:
        return to_fraction(self._p[i])

    def is_integral(self) -> bool:
        return self._p.denom() == 1

    def integer_coeffs(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("polynomial has non-integer coefficients")
        return [int(c) for c in self._p.numer().coeffs()]

    # arithmetic
    @staticmethod
    def _lift(other) -> flint.fmpq_poly:
        if isinstance(other, PolyS):
            return other._p
        return flint.fmpq_poly([to_fmpq(other)])

    def __add__(self, other) -> "PolyS":
        return PolyS(self._p + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other) -> "PolyS":
        return PolyS(self._p - self._lift(other))

    def __rsub__(self, other) -> "PolyS":
        return PolyS(self._lift(other) - self._p)

    def __mul__(self, other) -> "PolyS":
        return PolyS(self._p * self._lift(other))

    __rmul__ = __mul__

    def __neg__(self) -> "PolyS":
        return PolyS(-self._p)

    def __pow__(self, e: int) -> "PolyS":
        return PolyS(self._p ** e)

    def divmod(self, other: "PolyS") -> tuple["PolyS", "PolyS"]:
        q, r = divmod(self._p, other._p)
        return PolyS(q), PolyS(r)

    def exact_div(self, other: "PolyS") -> "PolyS":
        q, r = divmod(self._p, other._p)
        if not r.is_zero():
            raise ValueError("inexact division")
        return PolyS(q)

    def __call__(self, x):
        if isinstance(x, PolyS):
            return PolyS(self._p(x._p))
        if isinstance(x, (complex, float)):
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * x + float(c)
            return acc
        return to_fraction(self._p(to_fmpq(x)))

    def derivative(self) -> "PolyS":
        return PolyS(self._p.derivative())

    def shift(self, c) -> "PolyS":
        """p(s + c)."""
        return PolyS(self._p(flint.fmpq_poly([to_fmpq(c), 1])))

    def truncate(self, n: int) -> "PolyS":
        return PolyS(self._p.truncate(n))

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyS):
            return self._p == other._p
        if isinstance(other, (int, Fraction)):
            return self._p == flint.fmpq_poly([to_fmpq(other)])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs))

    def __repr__(self) -> str:
        return f"PolyS({self.format('s')})"

    def format(self, var: str = "s") -> str:
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and abs(c) == 1:
                body = mono
            elif mono:
                body = f"{abs(c)}*{mono}"
            else:
                body = str(abs(c))
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def poly_arith(op: str, p: PolyS, q: PolyS) -> PolyS:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "exact_div":
        return p.exact_div(q)
    raise ValueError(f"unknown polynomial operation {op!r}")


_LINEAR_POWERS: dict[tuple[int, int], flint.fmpq_poly] = {}


def linear_power(k: int, e: int) -> flint.fmpq_poly:
    """(s + k^2)^e as a FLINT polynomial, memoised."""
    key = (k, e)
    p = _LINEAR_POWERS.get(key)
    if p is None:
        p = flint.fmpq_poly([k * k, 1]) ** e
        _LINEAR_POWERS[key] = p
    return p


class FactoredDenom(Mapping[int, int]):
    """prod_k (s + k^2)^{e_k}; immutable, exponents all positive."""

    __slots__ = ("_items", "_map")

    def __init__(self, factors: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(factors)
        for k, e in items.items():
            if not isinstance(k, int) or k < 1:
                raise ValueError(f"denominator factor index must be a positive integer, got {k!r}")
            if e < 0:
                raise ValueError(f"negative exponent for (s+{k}^2)")
        self._map = {k: e for k, e in sorted(items.items()) if e > 0}
        self._items = tuple(self._map.items())

    def __getitem__(self, k: int) -> int:
        return self._map[k]

    def __iter__(self) -> Iterator[int]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        return hash(self._items)

    def __eq__(self, other) -> bool:
        if isinstance(other, FactoredDenom):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._map == {k: e for k, e in other.items() if e}
        return NotImplemented

    def __repr__(self) -> str:
        return "FactoredDenom(" + " ".join(f"{k}^{e}" for k, e in self._items) + ")"

    def degree(self) -> int:
        return sum(self._map.values())

    def times(self, other: Mapping[int, int]) -> "FactoredDenom":
        out = dict(self._map)
        for k, e in other.items():
            out[k] = out.get(k, 0) + e
        return FactoredDenom(out)

    def lcm(self, other: Mapping[int, int]) -> "FactoredDenom":
        out = dict(self._map)
        for k, e in other.items():
            out[k] = max(out.get(k, 0), e)
        return FactoredDenom(out)

    def cofactor(self, sub: Mapping[int, int]) -> flint.fmpq_poly:
        """Expanded self / sub; sub must divide self."""
        f = flint.fmpq_poly([1])
        for k, e in self._map.items():
            d = e - sub.get(k, 0)
            if d < 0:
                raise ValueError("cofactor of a non-divisor")
            if d:
                f *= linear_power(k, d)
        return f

    def expand(self) -> PolyS:
        return PolyS(self.cofactor({}))

    def evaluate(self, s0) -> Fraction:
        s0 = to_fraction(s0)
        out = Fraction(1)
        for k, e in self._map.items():
            out *= (s0 + k * k) ** e
        return out


def _strip_factors(num: flint.fmpq_poly, den: dict[int, int]) -> tuple[flint.fmpq_poly, dict[int, int]]:
    """Cancel every (s + k^2) that divides the numerator."""
    if num.is_zero():
        return num, {}
    for k in list(den):
        root = flint.fmpq(-k * k)
        lin = flint.fmpq_poly([k * k, 1])
        while den[k] and num(root) == 0:
            num = num // lin
            den[k] -= 1
    return num, den


class RatFuncS:
    """numerator / prod (s + k^2)^{e_k}, kept fully reduced."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator: Mapping[int, int] = (), *, reduced: bool = False):
        num = _as_fmpq_poly(numerator)
        den = dict(denominator)
        if not reduced:
            num, den = _strip_factors(num, den)
        self.numerator = PolyS(num)
        self.denominator = FactoredDenom(den)

    @classmethod
    def from_poly(cls, p) -> "RatFuncS":
        return cls(p if isinstance(p, PolyS) else PolyS(p if isinstance(p, (list, tuple)) else [p]), {}, reduced=True)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __add__(self, other) -> "RatFuncS":
        other = _as_ratfunc(other)
        den = self.denominator.lcm(other.denominator)
        num = self.numerator.flint * den.cofactor(self.denominator) + other.numerator.flint * den.cofactor(other.denominator)
        return RatFuncS(num, den)

    __radd__ = __add__

    def __neg__(self) -> "RatFuncS":
        return RatFuncS(-self.numerator.flint, self.denominator, reduced=True)

    def __sub__(self, other) -> "RatFuncS":
        return self + (-_as_ratfunc(other))

    def __rsub__(self, other) -> "RatFuncS":
        return _as_ratfunc(other) + (-self)

    def __mul__(self, other) -> "RatFuncS":
        other = _as_ratfunc(other)
        return RatFuncS(self.numerator.flint * other.numerator.flint, self.denominator.times(other.denominator))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "RatFuncS":
        if e < 0:
            raise ValueError("negative powers are not representable")
        return RatFuncS(self.numerator.flint ** e, {k: v * e for k, v in self.denominator.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, PolyS)):
            other = _as_ratfunc(other)
        if not isinstance(other, RatFuncS):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def __call__(self, s0):
        if isinstance(s0, (complex, float)):
            den = 1
            for k, e in self.denominator.items():
                den *= (s0 + k * k) ** e
            return self.numerator(s0) / den
        d = self.denominator.evaluate(s0)
        if d == 0:
            raise ZeroDivisionError(f"pole at s = {s0}")
        return self.numerator(s0) / d

    def __repr__(self) -> str:
        den = "*".join(f"(s+{k * k})" + (f"^{e}" if e > 1 else "") for k, e in self.denominator.items())
        return f"({self.numerator.format()})" + (f"/({den})" if den else "")

    def local_expansion(self, k: int, order: int) -> tuple[int, list[Fraction]]:
        """Laurent coefficients in t = s + k^2.

        Returns (e, c) with self = sum_j c[j] t^(j - e), j < order.
        """
        e = self.denominator.get(k, 0)
        t_shift = flint.fmpq_poly([-k * k, 1])
        num = self.numerator.flint(t_shift).truncate(order)
        rest = flint.fmpq_poly([1])
        for j, ej in self.denominator.items():
            if j == k:
                continue
            base = flint.fmpq_poly([j * j - k * k, 1]) ** ej
            rest = rest.mul_low(base.truncate(order), order)
        return e, series_quotient(num, rest, order)


def _as_fmpq_poly(x) -> flint.fmpq_poly:
    if isinstance(x, PolyS):
        return x.flint
    if isinstance(x, flint.fmpq_poly):
        return x
    if isinstance(x, flint.fmpz_poly):
        return flint.fmpq_poly(x)
    if isinstance(x, (int, Fraction)):
        return flint.fmpq_poly([to_fmpq(x)])
    return PolyS(x).flint


def _as_ratfunc(x) -> RatFuncS:
    if isinstance(x, RatFuncS):
        return x
    if isinstance(x, PolyS):
        return RatFuncS.from_poly(x)
    if isinstance(x, (int, Fraction)):
        return RatFuncS.from_poly(PolyS([x]))
    raise TypeError(f"cannot treat {x!r} as a rational function")


def ratfunc_arith(op: str, f: RatFuncS, g: RatFuncS) -> RatFuncS:
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown rational-function operation {op!r}")


def series_quotient(num: flint.fmpq_poly, den: flint.fmpq_poly, order: int) -> list[Fraction]:
    """First `order` Taylor coefficients of num/den (den(0) != 0)."""
    d = [to_fraction(c) for c in den.coeffs()] or [Fraction(0)]
    if d[0] == 0:
        raise ZeroDivisionError("series quotient with vanishing constant term")
    n = [to_fraction(c) for c in num.coeffs()]
    out: list[Fraction] = []
    inv0 = 1 / d[0]
    for i in range(order):
        acc = n[i] if i < len(n) else Fraction(0)
        for j in range(1, min(i, len(d) - 1) + 1):
            acc -= d[j] * out[i - j]
        out.append(acc * inv0)
    return out


class PartialFractions:
    """polynomial_part + sum_{(k,i)} terms[(k,i)] / (s + k^2)^i."""

    __slots__ = ("polynomial_part", "terms")

    def __init__(self, polynomial_part: PolyS, terms: Mapping[tuple[int, int], Fraction]):
        self.polynomial_part = polynomial_part
        self.terms = {key: c for key, c in sorted(terms.items()) if c != 0}

    def recombine(self) -> RatFuncS:
        total = RatFuncS.from_poly(self.polynomial_part)
        for (k, i), c in self.terms.items():
            total = total + RatFuncS(PolyS([c]), {k: i})
        return total

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.terms.get(key, Fraction(0))

    def __repr__(self) -> str:
        return f"PartialFractions(poly={self.polynomial_part!r}, terms={self.terms})"


def partial_fractions(f: RatFuncS) -> PartialFractions:
    num = f.numerator
    den = f.denominator
    poly_part = PolyS([])
    if den and num.degree() >= den.degree():
        poly_part, rem = num.divmod(den.expand())
        f = RatFuncS(rem, den)
    elif not den:
        return PartialFractions(num, {})
    terms: dict[tuple[int, int], Fraction] = {}
    for k, e in f.denominator.items():
        _, coeffs = f.local_expansion(k, e)
        for j, c in enumerate(coeffs):
            terms[(k, e - j)] = c
    return PartialFractions(poly_part, terms)


def content_and_val3(p: PolyS) -> tuple[Fraction, int]:
    if p.is_zero():
        raise ValueError("content of the zero polynomial is undefined")
    if not p.is_integral():
        raise ValueError("content requires integer coefficients")
    c = int(p.flint.numer().content())
    c = abs(c)
    v, rest = 0, c
    while rest % 3 == 0:
        rest //= 3
        v += 1
    return Fraction(c), v


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def solve_linear_exact(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Unique solution of an exact (possibly overdetermined) linear system.

    Returns None when the system is inconsistent; raises when the
    solution is not unique.
    """
    m = len(rows)
    if m == 0:
        raise ValueError("empty linear system")
    n = len(rows[0])
    entries = []
    for row, b in zip(rows, rhs):
        entries.extend(to_fmpq(x) for x in row)
        entries.append(to_fmpq(b))
    aug = flint.fmpq_mat(m, n + 1, entries)
    red, rank = aug.rref()
    pivots = []
    for r in range(rank):
        c = next(c for c in range(n + 1) if red[r, c] != 0)
        if c == n:
            return None
        pivots.append(c)
    if rank < n:
        raise ValueError(f"underdetermined system: rank {rank} < {n} unknowns")
    return [to_fraction(red[r, n]) for r in range(n)]
