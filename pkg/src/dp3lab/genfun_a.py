"""Large-a generating functions.

The coefficients of the expansion of u_{2n}(a) in powers of 1/a^2 are
collected into functions A_k(z) = (-1)^k sum_n A_k[n] z^n.  A_0 is the
ternary-tree series, z(1+A_0)^3 = A_0, and every later A_k is a rational
function of w = A_0 produced by a second-order recursion in k.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import IO, Callable, Sequence, TypeVar

import flint
import mpmath

from .coeffs import CoeffTable, predicted_structure
from .exact import PolyS, series_quotient, to_fraction
from .report import Report
from .series import SeriesQ

T = TypeVar("T")

# ---------------------------------------------------------------------------
# A_0
# ---------------------------------------------------------------------------


def fuss_catalan(n: int) -> int:
    return math.comb(3 * n, n) // (2 * n + 1)


def a0_series(N: int) -> SeriesQ:
    if N < 1:
        raise ValueError("order must be at least 1")
    a0 = SeriesQ([0] + [fuss_catalan(n) for n in range(1, N + 1)], N + 1)
    z = SeriesQ.variable(N + 1)
    if z * (1 + a0) ** 3 != a0:
        raise ArithmeticError("A_0 coefficients fail z(1+A_0)^3 = A_0")
    return a0


def a0_eval(z: complex, precision: float = 1e-15) -> complex:
    """Closed-form A_0(z) on principal branches."""
    z = complex(z)
    if abs(z) >= 4 / 27:
        warnings.warn(f"|z|={abs(z):.6g} >= 4/27: principal-branch value may not continue the series",
                      RuntimeWarning, stacklevel=2)
    if z == 0:
        return 0j
    if precision >= 1e-15:
        q = cmath.sqrt(-3 * z)
        return -1 + (2 / q) * cmath.sinh(cmath.asinh(3 * q / 2) / 3)
    dps = int(-math.log10(precision)) + 8
    with mpmath.workdps(dps):
        q = mpmath.sqrt(-3 * mpmath.mpc(z))
        return complex(-1 + (2 / q) * mpmath.sinh(mpmath.asinh(3 * q / 2) / 3))


# ---------------------------------------------------------------------------
# rational functions of w with poles only at w = 1/2 and w = -1
# ---------------------------------------------------------------------------

_ONE_MINUS_2W = flint.fmpq_poly([1, -2])
_ONE_PLUS_W = flint.fmpq_poly([1, 1])


class TowerRat:
    """num(w) / ((1-2w)^d (1+w)^e) with d, e >= 0, kept in lowest terms."""

    __slots__ = ("num", "d", "e")

    def __init__(self, num, d: int = 0, e: int = 0):
        num = num if isinstance(num, flint.fmpq_poly) else flint.fmpq_poly(num)
        if num.is_zero():
            d = e = 0
        while d > 0 and num(flint.fmpq(1, 2)) == 0:
            num = num // _ONE_MINUS_2W
            d -= 1
        while e > 0 and num(-1) == 0:
            num = num // _ONE_PLUS_W
            e -= 1
        self.num, self.d, self.e = num, d, e

    def _lifted(self, d: int, e: int) -> flint.fmpq_poly:
        return self.num * _ONE_MINUS_2W ** (d - self.d) * _ONE_PLUS_W ** (e - self.e)

    def __add__(self, other) -> "TowerRat":
        if not isinstance(other, TowerRat):
            other = TowerRat(flint.fmpq_poly([other]))
        d, e = max(self.d, other.d), max(self.e, other.e)
        return TowerRat(self._lifted(d, e) + other._lifted(d, e), d, e)

    __radd__ = __add__

    def __neg__(self) -> "TowerRat":
        return TowerRat(-self.num, self.d, self.e)

    def __sub__(self, other) -> "TowerRat":
        return self + (-other)

    def __mul__(self, other) -> "TowerRat":
        if not isinstance(other, TowerRat):
            return TowerRat(self.num * other, self.d, self.e)
        return TowerRat(self.num * other.num, self.d + other.d, self.e + other.e)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TowerRat):
            return NotImplemented
        return (self.num, self.d, self.e) == (other.num, other.d, other.e)

    def delta(self) -> "TowerRat":
        """z d/dz, using z dw/dz = w(1+w)/(1-2w)."""
        n, d, e = self.num, self.d, self.e
        w = flint.fmpq_poly([0, 1])
        top = n.derivative() * _ONE_MINUS_2W * _ONE_PLUS_W + 2 * d * n * _ONE_PLUS_W - e * n * _ONE_MINUS_2W
        return TowerRat(w * top, d + 2, e)

    def compose(self, w: SeriesQ) -> SeriesQ:
        return w.compose_poly(self.num) * (1 - 2 * w) ** (-self.d) * (1 + w) ** (-self.e)

    def __call__(self, w0):
        return PolyS(self.num)(w0) / ((1 - 2 * w0) ** self.d * (1 + w0) ** self.e)

    def __repr__(self) -> str:
        return f"TowerRat(({PolyS(self.num).format('w')}) / ((1-2w)^{self.d} (1+w)^{self.e}))"


# ---------------------------------------------------------------------------
# the recursion in k, shared by the symbolic and the series paths
# ---------------------------------------------------------------------------


class _Tower:
    """Holds A_k, δA_k, δ²A_k and the pair sums sum_{i+j=m} A_i A_j."""

    def __init__(self, a0: T, z: T, factor: T, zero: T, delta: Callable[[T], T]):
        self.z, self.factor, self.zero, self.delta = z, factor, zero, delta
        self.A, self.dA, self.d2A, self.P2 = [], [], [], []
        self._push(a0)

    def _push(self, a: T) -> None:
        da = self.delta(a)
        self.A.append(a)
        self.dA.append(da)
        self.d2A.append(self.delta(da))

    def _sum(self, terms) -> T:
        acc = self.zero
        for t in terms:
            acc = acc + t
        return acc

    def extend(self, K: int) -> None:
        A, dA, d2A, P2 = self.A, self.dA, self.d2A, self.P2
        while len(A) <= K:
            k = len(A) - 1
            # sum over i+j = k+1 with 1 <= i, j <= k
            inner = self._sum(A[i] * A[k + 1 - i] for i in range(1, k + 1))
            triple = A[0] * inner + self._sum(A[j] * P2[k + 1 - j] for j in range(1, k + 1))
            bracket = d2A[k] + self._sum(A[i] * d2A[k - i] - dA[i] * dA[k - i] for i in range(k + 1))
            bracket = bracket - self.z * (3 * inner + triple)
            self._push(self.factor * bracket)
            # P2[m] with m = k+1, stored at index m
            if not P2:
                P2.append(A[0] * A[0])
            P2.append(inner + 2 * (A[0] * A[k + 1]))


@lru_cache(maxsize=1)
def _symbolic_tower() -> _Tower:
    w = flint.fmpq_poly([0, 1])
    return _Tower(
        a0=TowerRat(w),
        z=TowerRat(w, 0, 3),
        factor=TowerRat(-_ONE_PLUS_W, 1, 0),
        zero=TowerRat(flint.fmpq_poly()),
        delta=TowerRat.delta,
    )


_SERIES_TOWERS: dict[int, _Tower] = {}


def _series_tower(order: int) -> _Tower:
    t = _SERIES_TOWERS.get(order)
    if t is None:
        a0 = a0_series(max(order - 1, 1)).truncate(order)
        z = SeriesQ.variable(order)
        t = _SERIES_TOWERS[order] = _Tower(
            a0=a0, z=z, factor=(1 + a0) / (2 * a0 - 1), zero=SeriesQ([], order), delta=SeriesQ.delta
        )
    return t


# ---------------------------------------------------------------------------
# public A_k interface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AkRational:
    """A_k = -w (1+w)^{2(k+1)} R(w) / (-1+2w)^{5k-1} with w = A_0."""

    k: int
    R: PolyS
    function: TowerRat

    @property
    def R_half(self) -> Fraction:
        return self.R(Fraction(1, 2))

    def formula(self) -> str:
        return f"-w(1+w)^{2 * (self.k + 1)}/(-1+2w)^{5 * self.k - 1} * ({self.R.format('w')})"


def ak_tower(k: int) -> TowerRat:
    if k < 0:
        raise ValueError("k must be non-negative")
    t = _symbolic_tower()
    t.extend(k)
    return t.A[k]


def ak_rational(k: int) -> AkRational:
    if k < 1:
        raise ValueError("k must be at least 1")
    f = ak_tower(k)
    target = 5 * k - 1
    if f.e != 0 or f.d > target:
        raise ArithmeticError(f"A_{k} is not of the expected shape: {f!r}")
    num = f.num * _ONE_MINUS_2W ** (target - f.d)
    base = flint.fmpq_poly([0, 1]) * _ONE_PLUS_W ** (2 * k + 2)
    R, rem = divmod(num, base)
    if not rem.is_zero():
        raise ArithmeticError(f"A_{k} numerator is not divisible by w(1+w)^{2 * k + 2}")
    return AkRational(k, PolyS((-1) ** k * R), f)


def _unsign(s: SeriesQ, k: int) -> SeriesQ:
    return s if k % 2 == 0 else -s


def ak_series(k: int, N: int) -> SeriesQ:
    """A_k[0..N] from the rational form composed with the A_0 series."""
    if k < 0 or N < 1:
        raise ValueError("need k >= 0 and N >= 1")
    a0 = a0_series(N)
    if k == 0:
        return a0
    return _unsign(ak_tower(k).compose(a0), k)


def ak_series_direct(k: int, N: int) -> SeriesQ:
    """A_k[0..N] by running the recursion on truncated z-series."""
    if k < 0 or N < 1:
        raise ValueError("need k >= 0 and N >= 1")
    t = _series_tower(N + 1)
    t.extend(k)
    return _unsign(t.A[k], k)


def ak_coefficient_table(K: int, N: int) -> list[list[int]]:
    """rows[k][n] = A_k[n] for 0 <= k <= K, 0 <= n <= N (series path)."""
    t = _series_tower(N + 1)
    t.extend(K)
    return [_unsign(t.A[k], k).integer_coefficients() for k in range(K + 1)]


def write_bfile(k: int, N: int, fh: IO[str]) -> None:
    coeffs = ak_series(k, N).integer_coefficients()
    for n in range(1, N + 1):
        fh.write(f"{n} {coeffs[n]}\n")


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def hyp2f1_terminating(a: int | Fraction, b: int, c: int | Fraction, x: int | Fraction) -> Fraction:
    if not (isinstance(b, int) and b <= 0):
        raise ValueError("b must be a non-positive integer")
    total, term = Fraction(0), Fraction(1)
    for j in range(-b + 1):
        total += term
        term = term * (a + j) * (b + j) * x / ((c + j) * (j + 1))
    return total


def a1n_closed(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    F = hyp2f1_terminating(1, -n - 1, 2 * n + 4, -2)
    return Fraction(n + 1, 18) * math.comb(3 * n + 4, n + 1) * (F - Fraction(4 * n + 6, 3 * n + 4))


def a2n_closed(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    F = hyp2f1_terminating(1, -n, 2 * n + 2, -2)
    poly = Fraction(168 * n**3 + 846 * n**2 + 1211 * n + 510, 5)
    return Fraction(n + 1, 128) * math.comb(3 * n + 1, n) * (poly - 3 * (n + 1) * (25 * n + 34) * F)


def inverse_one_minus_two_a0(N: int) -> SeriesQ:
    return 1 / (1 - 2 * a0_series(N))


def central_binomial_3(n: int) -> int:
    """C(3n-1, n), with the n = 0 value 1."""
    return 1 if n == 0 else math.comb(3 * n - 1, n)


# ---------------------------------------------------------------------------
# bridge to the exact coefficient table
# ---------------------------------------------------------------------------


def large_a_expansion(table: CoeffTable, n: int, K: int) -> tuple[int, list[Fraction]]:
    """Coefficients of a^{2n} u_{2n} in powers of 1/a^2.

    Returns (h, c) with a^{2n} u_{2n} = sum_j c[j] (1/a^2)^{j-h}; h > 0 means
    the expansion starts with positive powers of a^2.
    """
    f = table[n]
    P = f.numerator.flint
    D = f.denominator.expand().flint
    h = n + P.degree() - D.degree()
    rev = lambda p: flint.fmpq_poly(list(reversed(p.coeffs())))  # noqa: E731
    return h, series_quotient(rev(P), rev(D), K + max(h, 0) + 1)


def laurent_identity_check(table: CoeffTable, n: int, K: int) -> Report:
    if K < 0:
        raise ValueError("K must be non-negative")
    rep = Report(f"large-a expansion of a^{2 * n} u_{2 * n} against A_k[{n}], k <= {K}")
    h, c = large_a_expansion(table, n, K)
    rep.add("no positive powers of a^2", h <= 0, f"leading power (a^2)^{h}")
    rows = ak_coefficient_table(K, n)
    got = [c[k + h] if k + h >= 0 else Fraction(0) for k in range(K + 1)]
    want = [(-1) ** k * rows[k][n] for k in range(K + 1)]
    bad = [k for k in range(K + 1) if got[k] != want[k]]
    rep.add("coefficient of a^{-2k} equals (-1)^k A_k[n]", not bad,
            f"values {[str(g) for g in got[:6]]}" if not bad else f"mismatch at k={bad[:5]}")
    return rep


def q_polynomial(n: int) -> list[int]:
    """Coefficients of prod_k (1 + k^2 x)^{n_k}, ascending."""
    exps, _ = predicted_structure(n)
    Q = flint.fmpz_poly([1])
    for k, e in exps.items():
        Q *= flint.fmpz_poly([1, k * k]) ** e
    return [int(c) for c in Q.coeffs()]


@dataclass(frozen=True)
class PkFromAk:
    n: int
    m: int
    p_descending: list[int]
    convolution: list[int]

    @property
    def vanishing_ok(self) -> bool:
        return all(c == 0 for c in self.convolution[self.m + 1:])

    @property
    def p_ascending(self) -> list[int]:
        return list(reversed(self.p_descending))


def pk_from_Ak(n: int, K: int | None = None, rows: Sequence[Sequence[int]] | None = None) -> PkFromAk:
    """Numerator coefficients of u_{2n} rebuilt from A_k[n].

    The convolution Q_n(x) * sum_k (-1)^k A_k[n] x^k has the coefficients
    p_m, ..., p_0 at positions 0..m(n) and must vanish afterwards.
    """
    _, m = predicted_structure(n)
    K = m + n if K is None else K
    if K < m:
        raise ValueError(f"K={K} is below m(n)={m}")
    rows = ak_coefficient_table(K, n) if rows is None else rows
    q = q_polynomial(n)
    conv = []
    for k in range(K + 1):
        conv.append(sum((-1) ** (k - i) * q[i] * rows[k - i][n] for i in range(min(k, len(q) - 1) + 1)))
    return PkFromAk(n, m, conv[: m + 1], conv)


# ---------------------------------------------------------------------------
# growth
# ---------------------------------------------------------------------------


def r_half(k: int) -> Fraction:
    return Fraction(-4, 9) if k == 0 else ak_rational(k).R_half


def growth_limit(k: int, dps: int = 30) -> mpmath.mpf:
    with mpmath.workdps(dps):
        R = r_half(k)
        return (mpmath.mpf(3) ** (mpmath.mpf(5 - k) / 2) / mpmath.mpf(2) ** (2 * k + 3)
                * mpmath.mpf(R.numerator) / R.denominator / mpmath.gamma(mpmath.mpf(5 * k - 1) / 2))


def normalized_ratio(k: int, n: int, value: int, dps: int = 30) -> mpmath.mpf:
    with mpmath.workdps(dps):
        return mpmath.mpf(int(value)) * mpmath.mpf(n) ** (-mpmath.mpf(5 * k - 3) / 2) * (mpmath.mpf(4) / 27) ** n


def k_limit(n: int) -> Fraction:
    """Limit of A_k[n]/n^{2k} as k grows."""
    return Fraction(n ** (3 * (n - 1)), 2 ** (n - 1) * math.factorial(n - 1) ** 3)


def growth_checks(k: int, N: int, dps: int = 30) -> Report:
    rep = Report(f"growth of A_{k}[n], n <= {N}")
    rows = ak_coefficient_table(k + 1, N)
    seq, nxt = rows[k], rows[k + 1]
    inc = [n for n in range(1, N) if not seq[n + 1] > seq[n]]
    rep.add("A_k[n] strictly increasing in n", not inc, f"fails at n={inc[:5]}" if inc else f"n=1..{N}")

    with mpmath.workdps(dps):
        L = growth_limit(k, dps)
        r = [normalized_ratio(k, n, seq[n], dps) for n in range(1, N + 1)]
        drops = [n for n in range(1, N) if not r[n] > r[n - 1]]
        onset = drops[-1] + 1 if drops else 1
        above = [n for n in range(onset, N + 1) if not r[n - 1] < L]
        rep.add("normalized ratio increasing in n (eventually)", onset <= N // 2,
                f"increasing from n={onset}, r_{N}={mpmath.nstr(r[-1], 12)}")
        if drops:
            rep.note(f"normalized ratio decreases at n={drops}")
        rep.add("normalized ratio below the limit constant from the onset", not above,
                f"L={mpmath.nstr(L, 12)}, R(1/2)={r_half(k)}" if not above else f"exceeds at n={above[:5]}")

    dom = [n for n in range(2, N + 1) if not nxt[n] > n * n * seq[n]]
    rep.add("A_{k+1}[n] > n^2 A_k[n] for n >= 2, so A_k[n]/n^{2k} grows with k", not dom,
            f"fails at n={dom[:5]}" if dom else f"n=2..{N}")
    cap = [n for n in range(2, N + 1) if not Fraction(seq[n], n ** (2 * k)) < k_limit(n)]
    rep.add("A_k[n]/n^{2k} below its k -> infinity limit", not cap,
            f"fails at n={cap[:5]}" if cap else f"n=2..{N}")
    return rep


def k_asymptotic_exponents(n: int, K: int, dps: int = 30) -> list[mpmath.mpf]:
    """Fitted c_n from successive relative errors err_k = 1 - A_k[n]/(n^{2k} limit).

    With err_k ~ C n^{-2k/c}, consecutive ratios give c = 2 ln n / ln(err_k / err_{k+1}).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rows = ak_coefficient_table(K, n)
    lim = k_limit(n)
    errs = [1 - Fraction(rows[k][n], n ** (2 * k)) / lim for k in range(K + 1)]
    out = []
    with mpmath.workdps(dps):
        for k in range(K):
            ratio = mpmath.mpf(errs[k].numerator) / errs[k].denominator \
                / (mpmath.mpf(errs[k + 1].numerator) / errs[k + 1].denominator)
            out.append(2 * mpmath.log(n) / mpmath.log(ratio))
    return out


# ---------------------------------------------------------------------------
# positivity of the sub-leading numerator coefficient: inequality bookkeeping
# ---------------------------------------------------------------------------


def x_seq(n: int) -> Fraction:
    return Fraction(math.comb(3 * n, n - 1) * 2 ** (2 * n + 1) * (3 * n * n + 3 * n + 2), 3 ** (3 * n + 2) * (n + 1))


def y_seq(n: int) -> Fraction:
    bracket = Fraction((3 * n + 1) * (3 * n + 2), 3 * n) + Fraction(3 * n * n + 3 * n + 2, 4)
    return Fraction(8, 9) * Fraction(4, 27) ** n * math.comb(3 * n, n - 1) * bracket


def z_seq(n: int) -> Fraction:
    s = sum(Fraction(math.comb(3 * n + 4, l + n + 1), 2**l) for l in range(1, 6))
    return Fraction(8, 81) * Fraction(4, 27) ** n * (n + 1) * s


def delta_y_closed(n: int) -> Fraction:
    p = 243 * n**4 + 1170 * n**3 + 1773 * n**2 + 1014 * n + 200
    return Fraction(2 * p, 243 * (n + 1) * (2 * n + 1) * (2 * n + 3)) * math.comb(3 * n, n) * Fraction(4, 27) ** n


def pmn1_lower_bound(n: int) -> Fraction:
    first = math.comb(3 * n, n - 1) * (Fraction((3 * n + 1) * (3 * n + 2), 6 * n) + Fraction(3 * n * n + 3 * n + 2, 8))
    tail = sum(math.comb(3 * n + 4, k) * Fraction(2) ** (n + 1 - k) for k in range(n + 2, n + 7))
    return first - Fraction(n + 1, 18) * (Fraction(3 ** (3 * n + 4), 2 ** (2 * n + 3)) - tail)


def pmn1_inequality_audit(N: int = 60) -> Report:
    N = max(N, 40)
    rep = Report(f"inequalities behind p_(m(n)-1)(n) > 0, n <= {N}")
    X = {n: x_seq(n) for n in range(1, N + 1)}
    rep.add("X_n increasing", all(X[n + 1] > X[n] for n in range(1, N)), f"X_1={X[1]}, X_2={X[2]}")
    rep.add("X_38 < 1 < X_39", X[38] < 1 < X[39], f"X_38={float(X[38]):.6f}, X_39={float(X[39]):.6f}")

    dY = {n: y_seq(n + 1) - y_seq(n) for n in range(1, N)}
    rep.add("Y_(n+1) - Y_n matches its closed form", all(dY[n] == delta_y_closed(n) for n in dY))
    rep.add("Delta Y_n increasing for n >= 1", all(dY[n + 1] > dY[n] for n in range(1, N - 1)))
    rep.add("Delta Y_13 < 1 < Delta Y_14", dY[13] < 1 < dY[14],
            f"Delta Y_13={float(dY[13]):.6f}, Delta Y_14={float(dY[14]):.6f}")
    rep.add("Z_n increasing", all(z_seq(n + 1) > z_seq(n) for n in range(1, N)))

    gap = {n: y_seq(n) + z_seq(n) - (n + 1) for n in range(1, N + 1)}
    scaled = all(gap[n] == Fraction(16, 9) * Fraction(4, 27) ** n * pmn1_lower_bound(n) for n in gap)
    rep.add("Y_n + Z_n - (n+1) is a positive multiple of the lower bound", scaled)
    rep.add("Y_n + Z_n > n + 1 for 3 <= n <= 14", all(gap[n] > 0 for n in range(3, 15)),
            ", ".join(f"{float(gap[n]):.3f}" for n in range(3, 15)))
    rep.add("Y_n + Z_n > n + 1 for all 3 <= n <= N", all(gap[n] > 0 for n in range(3, N + 1)))
    rep.note(f"lower bound at n=1,2,3: {pmn1_lower_bound(1)}, {pmn1_lower_bound(2)}, {pmn1_lower_bound(3)}")
    return rep


def a0_checks(N: int = 30) -> Report:
    rep = Report(f"A_0 identities, n <= {N}")
    a0 = a0_series(N)
    z = SeriesQ.variable(N + 1)
    rep.add("z(1+A_0)^3 = A_0", z * (1 + a0) ** 3 == a0, f"to order z^{N}")
    inv = inverse_one_minus_two_a0(N)
    rep.add("1/(1-2A_0) has coefficients C(3n-1,n)",
            inv.integer_coefficients() == [central_binomial_3(n) for n in range(N + 1)])
    z0 = 0.1
    # the radius is 4/27, so the tail at z=0.1 needs ~80 terms to drop below 1e-12
    partial = sum(float(c) * z0**n for n, c in enumerate(a0_series(80).coefficients))
    rep.add("closed form matches the series at z=0.1", abs(a0_eval(z0) - partial) < 1e-12,
            f"{a0_eval(z0).real:.15f}")
    return rep
