"""Small-a generating functions.

Writing u = -(tau/2)(1 + B) with B = sum_k a^{2k} B_k(x), x = tau^2, each
B_k collects the k-th Taylor coefficient in s = a^2 of every u_{2n}.  B_0 is
elementary, 1 + B_0 = (1 - x/2)^{-2}, and each later B_k solves

    x(1-x/2) B'' + (1-5x/2) B' - 2B = RHS_k / (x(1-x/2)),

where RHS_k is assembled from B_0..B_{k-1}.  The rational solutions have
poles only at x = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import flint
import mpmath

from .coeffs import CoeffTable, predicted_structure
from .exact import PolyS, series_quotient, solve_linear_exact, to_fmpq, to_fraction
from .report import Report
from .series import SeriesQ

_XM2 = flint.fmpq_poly([-2, 1])
_X = flint.fmpq_poly([0, 1])


class NoRationalSolution(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# rational functions N(x)/(x-2)^J
# ---------------------------------------------------------------------------


class XRat:
    __slots__ = ("num", "J")

    def __init__(self, num, J: int = 0):
        num = num if isinstance(num, flint.fmpq_poly) else flint.fmpq_poly([to_fmpq(c) for c in num])
        if J < 0:
            num, J = num * _XM2 ** (-J), 0
        if num.is_zero():
            J = 0
        while J > 0 and num(2) == 0:
            num = num // _XM2
            J -= 1
        self.num, self.J = num, J

    @classmethod
    def const(cls, c) -> "XRat":
        return cls([c])

    def _lift(self, J: int) -> flint.fmpq_poly:
        return self.num * _XM2 ** (J - self.J)

    def __add__(self, other) -> "XRat":
        other = other if isinstance(other, XRat) else XRat.const(other)
        J = max(self.J, other.J)
        return XRat(self._lift(J) + other._lift(J), J)

    __radd__ = __add__

    def __neg__(self) -> "XRat":
        return XRat(-self.num, self.J)

    def __sub__(self, other) -> "XRat":
        return self + (-other)

    def __rsub__(self, other) -> "XRat":
        return (-self) + other

    def __mul__(self, other) -> "XRat":
        if isinstance(other, XRat):
            return XRat(self.num * other.num, self.J + other.J)
        return XRat(self.num * to_fmpq(other), self.J)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "XRat":
        if e < 0:
            raise ValueError("negative powers leave the class")
        return XRat(self.num**e, self.J * e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, XRat):
            other = XRat.const(other)
        return self.num == other.num and self.J == other.J

    def __hash__(self):
        return hash((str(self.num), self.J))

    def derivative(self) -> "XRat":
        return XRat(self.num.derivative() * _XM2 - self.J * self.num, self.J + 1)

    def delta(self) -> "XRat":
        d = self.derivative()
        return XRat(_X * d.num, d.J)

    def div_x(self) -> "XRat":
        q, r = divmod(self.num, _X)
        if not r.is_zero():
            raise ArithmeticError("not divisible by x")
        return XRat(q, self.J)

    def __call__(self, x0):
        x0 = Fraction(x0) if isinstance(x0, int) else x0
        return PolyS(self.num)(x0) / (x0 - 2) ** self.J

    def series(self, N: int) -> SeriesQ:
        """Taylor coefficients at x = 0 through x^N."""
        return SeriesQ(series_quotient(self.num, _XM2**self.J, N + 1), N + 1, "x")

    def split(self) -> "RationalAnsatz":
        """Polynomial part plus coefficients of (x-2)^{-j}."""
        shifted = PolyS(self.num).shift(2).coeffs  # coefficients in y = x - 2
        poles = {self.J - i: shifted[i] for i in range(min(self.J, len(shifted))) if shifted[i] != 0}
        poly_y = PolyS(shifted[self.J:])
        return RationalAnsatz(poly_y.shift(-2), poles)

    def __repr__(self) -> str:
        return f"XRat(({PolyS(self.num).format('x')}) / (x-2)^{self.J})"


@dataclass(frozen=True)
class RationalAnsatz:
    """polynomial(x) + sum_j poles[j] / (x-2)^j."""

    polynomial: PolyS
    poles: dict[int, Fraction] = field(default_factory=dict)

    def to_xrat(self) -> XRat:
        total = XRat(self.polynomial.flint)
        for j, c in self.poles.items():
            total = total + XRat([c], j)
        return total

    @property
    def pole_order(self) -> int:
        return max(self.poles, default=0)

    def series(self, N: int) -> SeriesQ:
        return self.to_xrat().series(N)

    def __call__(self, x0):
        return self.to_xrat()(x0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalAnsatz):
            return NotImplemented
        clean = lambda d: {j: c for j, c in d.items() if c != 0}  # noqa: E731
        return self.polynomial == other.polynomial and clean(self.poles) == clean(other.poles)

    def format(self) -> str:
        parts = [self.polynomial.format("x")] if not self.polynomial.is_zero() else []
        parts += [f"({c})/(x-2)^{j}" for j, c in sorted(self.poles.items())]
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# B_0 and the right-hand sides
# ---------------------------------------------------------------------------


def one_plus_b0() -> XRat:
    return XRat([4], 2)


def b0_xrat() -> XRat:
    return one_plus_b0() - 1


def partitions(k: int, max_part: int | None = None) -> Iterator[dict[int, int]]:
    """Partitions of k as {part: multiplicity}, parts bounded by max_part."""
    max_part = k if max_part is None else max_part

    def rec(rest: int, top: int) -> Iterator[list[int]]:
        if rest == 0:
            yield []
            return
        for p in range(min(rest, top), 0, -1):
            for tail in rec(rest - p, p):
                yield [p] + tail

    for parts in rec(k, max_part):
        mult: dict[int, int] = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        yield mult


def _rhs(k: int, beta: dict[int, object], b0, inv_g, one, delta) -> object:
    """Order-a^{2k} right side of δ²(B_k/(1+B_0)) - x B_k = RHS_k.

    beta[i] = B_i/(1+B_0); inv_g = 1/(1+B_0).  Works for XRat and SeriesQ.
    """
    total = one * 0
    for lam in partitions(k, k - 1):
        m = sum(lam.values())
        coef = Fraction((-1) ** m * math.factorial(m - 1), math.prod(math.factorial(v) for v in lam.values()))
        prod = one
        for i, e in lam.items():
            prod = prod * beta[i] ** e
        total = total + coef * delta(delta(prod))
    for lam in partitions(k - 1):
        m = sum(lam.values())
        coef = Fraction((-1) ** m * math.factorial(m), math.prod(math.factorial(v) for v in lam.values()))
        prod = one
        for i, e in lam.items():
            prod = prod * beta[i] ** e
        total = total + coef * ((m - b0) * inv_g * inv_g) * prod
    return total


def b_ode_rhs(k: int) -> RationalAnsatz:
    """RHS_k / (x(1-x/2)), split into polynomial and pole parts."""
    return _reduced_rhs(k).split()


def _reduced_rhs(k: int) -> XRat:
    if k < 1:
        raise ValueError("k must be at least 1")
    inv_g = XRat(_XM2**2 * flint.fmpq(1, 4))
    beta = {i: solve_b_ode(i).to_xrat() * inv_g for i in range(1, k)}
    rhs = _rhs(k, beta, b0_xrat(), inv_g, XRat.const(1), XRat.delta)
    # divide by x(1-x/2) = -x(x-2)/2
    return (rhs * XRat([-2], 1)).div_x()


def apply_operator(b: XRat) -> XRat:
    """x(1-x/2) b'' + (1-5x/2) b' - 2b."""
    d1 = b.derivative()
    d2 = d1.derivative()
    return XRat(_X * (1 - _X * flint.fmpq(1, 2))) * d2 + XRat(1 - _X * flint.fmpq(5, 2)) * d1 - 2 * b


@lru_cache(maxsize=None)
def solve_b_ode(k: int, max_growth: int = 3) -> RationalAnsatz:
    """Rational solution with B_k(0) = 0; the logarithmic homogeneous part is excluded."""
    if k < 1:
        raise ValueError("k must be at least 1")
    target = _reduced_rhs(k)
    parts = target.split()
    D0 = max(parts.polynomial.degree(), 0)
    J0 = max(parts.pole_order + 1, 3)
    for grow in range(max_growth + 1):
        D, J = D0 + grow, J0 + grow
        basis = [XRat([0] * i + [1]) for i in range(D + 1)] + [XRat([1], j) for j in range(1, J + 1)]
        images = [apply_operator(b) for b in basis]
        Jc = max([target.J] + [im.J for im in images])
        cols = [im._lift(Jc) for im in images]
        rhs_num = target._lift(Jc)
        height = max([c.degree() for c in cols] + [rhs_num.degree()]) + 1
        rows = [[to_fraction(c[i]) if i <= c.degree() else Fraction(0) for c in cols] for i in range(height)]
        rhs = [to_fraction(rhs_num[i]) if i <= rhs_num.degree() else Fraction(0) for i in range(height)]
        rows.append([b(Fraction(0)) for b in basis])
        rhs.append(Fraction(0))
        sol = solve_linear_exact(rows, rhs)
        if sol is not None:
            poly = PolyS(sol[: D + 1])
            poles = {j: sol[D + j] for j in range(1, J + 1) if sol[D + j] != 0}
            return RationalAnsatz(poly, poles)
    raise NoRationalSolution("no rational solution at stated ansatz bounds")


# ---------------------------------------------------------------------------
# series paths
# ---------------------------------------------------------------------------


def b_series_from_table(table: CoeffTable, k: int, N: int) -> SeriesQ:
    """Coefficient of x^n is the s^k Taylor coefficient of u_{2n}(s)."""
    if table.depth < N:
        raise ValueError(f"table depth {table.depth} < {N}")
    coeffs = [Fraction(0)]
    for n in range(1, N + 1):
        f = table[n]
        coeffs.append(series_quotient(f.numerator.flint, f.denominator.expand().flint, k + 1)[k])
    return SeriesQ(coeffs, N + 1, "x")


def b_series(k: int, N: int) -> SeriesQ:
    """B_k through x^N by the order-k recursion evaluated on truncated series."""
    if k < 0 or N < 1:
        raise ValueError("need k >= 0 and N >= 1")
    return _extend_b_series(k, N)


_B_SERIES: dict[int, list[SeriesQ]] = {}


def _b_series_list(N: int) -> list[SeriesQ]:
    lst = _B_SERIES.get(N)
    if lst is None:
        x = SeriesQ.variable(N + 1, "x")
        g = (1 - x / 2) ** -2
        lst = _B_SERIES[N] = [g - 1]
    return lst


def _extend_b_series(k: int, N: int) -> SeriesQ:
    lst = _b_series_list(N)
    x = SeriesQ.variable(N + 1, "x")
    b0 = lst[0]
    g = 1 + b0
    inv_g = (1 - x / 2) ** 2
    xg = (x * g).coefficients
    one = SeriesQ.constant(1, N + 1, "x")
    while len(lst) <= k:
        j = len(lst)
        beta = {i: lst[i] * inv_g for i in range(1, j)}
        r = _rhs(j, beta, b0, inv_g, one, SeriesQ.delta).coefficients
        if r[0] != 0:
            raise ArithmeticError(f"RHS_{j} does not vanish at x = 0")
        c = [Fraction(0)] * (N + 1)
        for n in range(1, N + 1):
            c[n] = (r[n] + sum(xg[i] * c[n - i] for i in range(1, n + 1))) / (n * n)
        lst.append(SeriesQ(c, N + 1, "x") * g)
    return lst[k]


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

_U1_SMALL = {1: Fraction(-1), 2: Fraction(-15, 16)}
_U2_SMALL = {
    1: Fraction(1),
    2: Fraction(63, 64),
    3: Fraction(2917, 2592),
    4: Fraction(335485, 331776),
    5: Fraction(382273, 460800),
}
_C61 = Fraction(61, 144)


def closed_forms_u2nk(n: int, k: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    if k == 0:
        return Fraction(n + 1, 2**n)
    if k == 1:
        return _U1_SMALL.get(n) or -_C61 * Fraction((n + 1) ** 2, 2**n)
    if k == 2:
        if n in _U2_SMALL:
            return _U2_SMALL[n]
        return _C61**2 * Fraction((n + 1) ** 2, 2 ** (n + 1)) * (n + Fraction(4 * 29**2 * 89, 25 * 61**2))
    raise ValueError("closed forms exist for k in {0, 1, 2}")


def _sums(n: int) -> tuple[int, Fraction, Fraction]:
    exps, _ = predicted_structure(n)
    prod = math.prod(k ** (2 * e) for k, e in exps.items())
    s1 = sum(Fraction(e, k * k) for k, e in exps.items())
    s2 = sum(Fraction(e, k**4) for k, e in exps.items())
    return prod, s1, s2


def closed_forms_pk(n: int, k: int) -> int:
    prod, s1, s2 = _sums(n)
    if k == 0:
        if n < 1:
            raise ValueError("n must be positive")
        val = Fraction(n + 1, 2**n) * prod
    elif k == 1:
        if n < 3:
            raise ValueError("the closed form for p_1 needs n >= 3")
        val = Fraction((n + 1) ** 2, 2**n) * (s1 / (n + 1) - _C61) * prod
    elif k == 2:
        if n == 5:
            return 3345
        if n < 6:
            raise ValueError("the closed form for p_2 needs n >= 5")
        inner = (s1 / (n + 1) - _C61) ** 2 + Fraction(11 * 73 * 257, 25 * 12**4 * (n + 1)) - s2 / (n + 1) ** 2
        val = Fraction((n + 1) ** 3, 2 ** (n + 1)) * prod * inner
    else:
        raise ValueError("closed forms exist for k in {0, 1, 2}")
    if val.denominator != 1:
        raise ArithmeticError(f"p_{k}({n}) closed form is not an integer: {val}")
    return int(val)


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def b0_identity(N: int = 40) -> bool:
    """δ² ln(1+B_0) = x (1+B_0) through x^N."""
    x = SeriesQ.variable(N + 1, "x")
    b0 = _b_series_list(N)[0]
    lhs = ((b0.delta()) / (1 + b0)).delta()
    return lhs == x * (1 + b0)


def _integrable_solution(tau, c1, c2):
    r = mpmath.sqrt(c1)
    return -c1 * c2 / 4 * tau ** (r - 1) / (1 - c2 * tau**r) ** 2


def integrable_case_check(N: int = 40) -> Report:
    rep = Report("integrable limit a = b = 0")
    worst = mpmath.mpf(0)
    with mpmath.workdps(40):
        for c1, c2, tau in [(4, 0.5, 0.3), (2.25 + 0.5j, 0.7 - 0.2j, 0.8 + 0.1j), (9, -1.5, 0.4j + 0.2)]:
            f = lambda t: _integrable_solution(t, c1, c2)  # noqa: E731
            t = mpmath.mpc(tau)
            u, du, d2u = (mpmath.diff(f, t, i) for i in range(3))
            res = d2u - (du**2 / u - du / t - 8 * u**2 / t)
            worst = max(worst, abs(res) / max(1, abs(d2u)))
    rep.add("two-parameter family solves the integrable equation", worst < 1e-12,
            f"max relative residual {mpmath.nstr(worst, 3)}")
    gap = max(abs(_integrable_solution(t, 4, 0.5) + (t / 2) / (1 - t * t / 2) ** 2) for t in (0.1, 0.5, 1.2, 3.0))
    rep.add("C1=4, C2=1/2 gives -(tau/2)(1-tau^2/2)^(-2)", gap < 1e-14, f"max gap {float(gap):.2g}")
    taylor = [(n + 1) * Fraction(1, 2**n) for n in range(N + 1)]
    series = (1 / (1 - SeriesQ.variable(N + 1, "x") / 2) ** 2).coefficients
    rep.add("Taylor coefficients are (n+1)/2^n", series == taylor, f"n <= {N}")
    rep.add("delta^2 ln(1+B_0) = x (1+B_0)", b0_identity(N), f"through x^{N}")
    return rep


def b_tower_report(table: CoeffTable, N: int = 20) -> Report:
    rep = Report(f"small-a generating functions, depth {N}")
    N = min(N, table.depth)
    for k in (1, 2):
        sol = solve_b_ode(k)
        rep.add(f"B_{k} rational solution equals table Taylor data", sol.series(N) == b_series_from_table(table, k, N),
                sol.format())
        rep.add(f"B_{k} rational solution equals series recursion", sol.series(N) == b_series(k, N))
    for k in (3, 4):
        rep.add(f"B_{k} series recursion equals table Taylor data", b_series(k, N) == b_series_from_table(table, k, N))
    return rep


def closed_form_report(table: CoeffTable, N: int = 40) -> Report:
    N = min(N, table.depth)
    rep = Report(f"closed forms for u_2n^k and p_k(n), n <= {N}")
    for k in (0, 1, 2):
        s = b_series_from_table(table, k, N)
        bad = [n for n in range(1, N + 1) if closed_forms_u2nk(n, k) != s[n]]
        rep.add(f"u_2n^{k} closed form", not bad, f"mismatch at n={bad[:5]}" if bad else f"n=1..{N}")
    for k, n0 in ((0, 1), (1, 3), (2, 5)):
        bad = [n for n in range(n0, N + 1) if closed_forms_pk(n, k) != table.decomposition(n).p_coeffs[k]]
        rep.add(f"p_{k}(n) closed form", not bad, f"mismatch at n={bad[:5]}" if bad else f"n={n0}..{N}")
    return rep
