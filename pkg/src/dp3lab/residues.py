"""Residues of u_{2n} at the poles s = -k^2 and their generating functions.

gamma_{k,i}(n) is the coefficient of (s+k^2)^{-i} in the Laurent expansion
of u_{2n} about s = -k^2; for i >= 1 these are the partial-fraction
coefficients, for i <= 0 they are the regular ("junior") part.

For each k the residues are generated by functions v_{k,l}(z), the
coefficients of the small-xi expansion of the rescaled solution V_k, where
xi^{k+1} = s + k^2.  Every v_{k,l} is rational in z with denominator a
power of q = 1 - C_{1,k} z^{k+1}.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable

import flint
import numpy as np

from .coeffs import CoeffTable, predicted_structure
from .exact import PolyS, series_quotient, solve_linear_exact, to_fmpq, to_fraction
from .report import Report

# ---------------------------------------------------------------------------
# residue table
# ---------------------------------------------------------------------------


class ResidueTable:
    """Lazy map (k, i, n) -> gamma_{k,i}(n) backed by exact Laurent expansions."""

    def __init__(self, table: CoeffTable, junior_depth: int = 4):
        self.table = table
        self.junior_depth = junior_depth
        self._laurent: dict[tuple[int, int], tuple[int, list[Fraction]]] = {}

    def laurent(self, k: int, n: int, order: int) -> tuple[int, list[Fraction]]:
        hit = self._laurent.get((k, n))
        if hit is None or len(hit[1]) < order:
            hit = self._laurent[(k, n)] = self.table[n].local_expansion(k, order)
        return hit

    def __call__(self, k: int, i: int, n: int) -> Fraction:
        return self.gamma(k, i, n)

    def gamma(self, k: int, i: int, n: int) -> Fraction:
        if n < 1:
            return Fraction(0)
        e = self.table[n].denominator.get(k, 0)
        j = e - i
        if j < 0:
            return Fraction(0)
        _, c = self.laurent(k, n, max(j + 1, e + self.junior_depth))
        return c[j]

    def pole_order(self, k: int, n: int) -> int:
        return self.table[n].denominator.get(k, 0)

    def senior(self, k: int, n: int) -> Fraction:
        return self.gamma(k, self.pole_order(k, n), n)

    def entries(self, n: int, junior: bool = False) -> Iterable[tuple[int, int, Fraction]]:
        """(k, i, gamma) for every pole of u_{2n}; junior terms down to i = 1 - junior_depth."""
        for k, e in self.table[n].denominator.items():
            low = 1 - self.junior_depth if junior else 1
            for i in range(e, low - 1, -1):
                yield k, i, self.gamma(k, i, n)


def residue_table(table: CoeffTable, junior_depth: int = 4) -> ResidueTable:
    return ResidueTable(table, junior_depth)


def senior_residue(table: CoeffTable, k: int, n: int) -> Fraction:
    """gamma_{k,n_k}(n) = P(-k^2) / prod_{j != k} (j^2 - k^2)^{n_j}."""
    f = table[n]
    if k not in f.denominator:
        raise ValueError(f"u_{2 * n} has no pole at s = -{k * k}")
    val = f.numerator(Fraction(-k * k))
    for j, e in f.denominator.items():
        if j != k:
            val /= Fraction(j * j - k * k) ** e
    return val


def write_residues_csv(rt: ResidueTable, N: int, fh: IO[str], junior: bool = False) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "k", "i", "numerator", "denominator"])
    for n in range(1, N + 1):
        for k, i, g in rt.entries(n, junior):
            w.writerow([n, k, i, g.numerator, g.denominator])


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

_K1_OFFSET1_SMALL = {1: Fraction(0), 2: Fraction(-1, 3), 3: Fraction(37, 96), 4: Fraction(-17, 576)}
_K1_OFFSET2_SMALL = {1: Fraction(0), 3: Fraction(-431, 2304), 5: Fraction(-62743, 552960), 7: Fraction(-222359, 11059200)}


def closed_residues_k1(i_offset: int, n: int) -> Fraction:
    """gamma_{1, n_1 - i_offset}(n) for i_offset in {0, 1, 2}."""
    if n < 1:
        raise ValueError("n must be positive")
    k, odd = (n + 1) // 2, n % 2 == 1
    if i_offset == 0:
        return Fraction(k, 8 ** (k - 1)) if odd else Fraction((2 * k + 1) ** 2, 9 * 8 ** (k - 1))
    if i_offset == 1:
        if n in _K1_OFFSET1_SMALL:
            return _K1_OFFSET1_SMALL[n]
        if odd:
            k -= 1
            return Fraction((128 * k - 3) * (k + 1) ** 2, 162 * 8**k)
        return Fraction((3200 * k * k - 6625 * k - 582) * (2 * k + 1) ** 2, 109350 * 8 ** (k - 1))
    if i_offset == 2:
        if not odd:
            raise ValueError("the second junior closed form covers odd n only")
        if n in _K1_OFFSET2_SMALL:
            return _K1_OFFSET2_SMALL[n]
        k -= 1
        poly = 13107200 * k**3 - 41164800 * k**2 - 22621088 * k + 3402171
        return Fraction(poly * (k + 1) ** 2, 1968300 * 8 ** (k + 2))
    raise ValueError("i_offset must be 0, 1 or 2")


def closed_residues_k2(branch: str, p: int) -> tuple[int, int, Fraction]:
    """Senior residue at s = -4 as (i, n, gamma_{2,i}(n)) for n = 3p+2, 3p or 3p+1."""
    if branch == "3p+2":
        if p < 0:
            raise ValueError("p must be non-negative")
        return p + 1, 3 * p + 2, Fraction((-1) ** (p + 1) * (p + 1), 18**p)
    if branch == "3p":
        if p < 1:
            raise ValueError("p must be at least 1")
        return p, 3 * p, Fraction((-1) ** p * 3 * (3 * p + 1) ** 2, 4 * 18**p)
    if branch == "3p+1":
        if p < 0:
            raise ValueError("p must be non-negative")
        if p == 0:
            return 0, 1, Fraction(-1, 3)
        if p == 1:
            return 1, 4, Fraction(-2, 27)
        return p, 3 * p + 1, Fraction((-1) ** p * 9 * (50 * p - 31) * (3 * p + 2) ** 2, 3200 * 18**p)
    raise ValueError(f"unknown branch {branch!r}")


def c1k_conjecture(k: int) -> Fraction:
    return Fraction((-k) ** (k - 1), 2**k * (k + 1) ** 2 * math.factorial(k - 1) ** 3)


def two_parameter_conjecture(k: int, p: int) -> tuple[Fraction, Fraction]:
    """Predicted gamma_{k,p+1}(p(k+1)+k) and gamma_{k,p}(p(k+1))."""
    f3 = math.factorial(k - 1) ** 3
    first = Fraction((p + 1) * (-k) ** ((p + 1) * (k - 1)), 2 ** ((p + 1) * k - 1) * (k + 1) ** (2 * p) * f3 ** (p + 1))
    second = Fraction((p * k + p + 1) ** 2 * (-k) ** (p * (k - 1)), (k + 2) ** 2 * (k + 1) ** (2 * p - 1) * f3**p)
    second /= Fraction(2) ** (p * k - 2)
    return first, second


def vk0_conjecture(k: int) -> tuple[Fraction, Fraction, Fraction]:
    f = math.factorial(k - 1)
    a = Fraction(4 * (-k) ** (3 * k - 3), 8**k * (k + 2) ** 2 * (k + 1) ** 5 * f**9)
    b = Fraction(4 * (-k) ** (2 * k - 2) * (k * k - 3), 4**k * (k + 2) ** 2 * (k + 1) ** 3 * f**6)
    c = Fraction(4 * (-k) ** (k - 1), 2**k * (k + 1) * f**3)
    return a, b, c


def c1k_determination(table: CoeffTable, k_max: int) -> list[tuple[int, Fraction, Fraction]]:
    """(k, measured C_{1,k}, conjectured C_{1,k}) for k = 1..k_max."""
    if table.depth < k_max:
        raise ValueError(f"table depth {table.depth} < {k_max}")
    out = []
    for k in range(1, k_max + 1):
        measured = senior_residue(table, k, k) / (2 * (k + 1) ** 2)
        out.append((k, measured, c1k_conjecture(k)))
    return out


# ---------------------------------------------------------------------------
# rational functions P(z) / (1 - C z^m)^J
# ---------------------------------------------------------------------------


class ZRat:
    __slots__ = ("num", "J", "C", "m")

    def __init__(self, num, J: int, C: Fraction, m: int):
        num = num if isinstance(num, flint.fmpq_poly) else flint.fmpq_poly([to_fmpq(c) for c in num])
        self.C, self.m = C, m
        q = self.q()
        if num.is_zero():
            J = 0
        while J > 0:
            quo, rem = divmod(num, q)
            if not rem.is_zero():
                break
            num, J = quo, J - 1
        self.num, self.J = num, J

    def q(self) -> flint.fmpq_poly:
        return flint.fmpq_poly([1] + [0] * (self.m - 1) + [-to_fmpq(self.C)])

    def _new(self, num, J) -> "ZRat":
        return ZRat(num, J, self.C, self.m)

    def lift(self, J: int) -> flint.fmpq_poly:
        return self.num * self.q() ** (J - self.J)

    def __add__(self, other) -> "ZRat":
        if not isinstance(other, ZRat):
            other = self._new(flint.fmpq_poly([to_fmpq(other)]), 0)
        J = max(self.J, other.J)
        return self._new(self.lift(J) + other.lift(J), J)

    __radd__ = __add__

    def __neg__(self) -> "ZRat":
        return self._new(-self.num, self.J)

    def __sub__(self, other) -> "ZRat":
        return self + (-other)

    def __rsub__(self, other) -> "ZRat":
        return (-self) + other

    def __mul__(self, other) -> "ZRat":
        if isinstance(other, ZRat):
            return self._new(self.num * other.num, self.J + other.J)
        if isinstance(other, flint.fmpq_poly):
            return self._new(self.num * other, self.J)
        return self._new(self.num * to_fmpq(other), self.J)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZRat):
            return NotImplemented
        return self.num == other.num and self.J == other.J and self.C == other.C

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def delta(self) -> "ZRat":
        q = self.q()
        top = self.num.derivative() * q - self.J * self.num * q.derivative()
        return self._new(flint.fmpq_poly([0, 1]) * top, self.J + 1)

    def taylor(self, N: int) -> list[Fraction]:
        return series_quotient(self.num, self.q() ** self.J, N + 1)

    def format(self, var: str = "z") -> str:
        return f"({PolyS(self.num).format(var)}) / (1 - ({self.C}) {var}^{self.m})^{self.J}"

    def __repr__(self) -> str:
        return f"ZRat({self.format()})"


# ---------------------------------------------------------------------------
# the v_{k,l} tower
# ---------------------------------------------------------------------------


class AnsatzFailure(ArithmeticError):
    pass


def index_map(k: int, l: int, n: int) -> int | None:
    """i such that the z^n coefficient of v_{k,l} is gamma_{k,i}(n); None if it vanishes."""
    m = k + 1
    p, q = divmod(n, m)
    if (l + 1) % m == 0:
        return p + 1 - (l + 1) // m if q == k else None
    i, ql = divmod(l, m)
    return p - i if q == ql else None


@dataclass
class VTower:
    k: int
    C: Fraction
    levels: list[ZRat]

    def __getitem__(self, l: int) -> ZRat:
        return self.levels[l + 1]

    @property
    def top(self) -> int:
        return len(self.levels) - 2


def _v_minus_one(k: int, C: Fraction) -> ZRat:
    return ZRat([0] * k + [2 * (k + 1) ** 2 * C], 2, C, k + 1)


def _linear_operator(vm1: ZRat, dvm1: ZRat, d2vm1: ZRat, z: ZRat):
    coef = d2vm1 - 3 * (z * vm1 * vm1)

    def L(v: ZRat) -> ZRat:
        dv = v.delta()
        return vm1 * dv.delta() - 2 * (dvm1 * dv) + coef * v

    return L


def _inhomogeneity(k: int, v: dict[int, ZRat], n: int, one: ZRat, z: ZRat) -> ZRat:
    """Coefficient of xi^{n-1} in the V_k equation with v_n set to zero."""
    zero = one * 0
    get = lambda l: v.get(l, zero)  # noqa: E731
    dv = {l: f.delta() for l, f in v.items()}
    d2v = {l: f.delta() for l, f in dv.items()}

    F = d2v.get(n - 1, zero) - k * k * get(n - 1) + get(n - k - 2)
    # quadratic terms: v_i δ²v_j - δv_i δv_j over i + j = n-1, i, j in [-1, n-1]
    for i in range(-1, n + 1):
        j = n - 1 - i
        if j < -1 or i > n - 1 or j > n - 1:
            continue
        F = F + get(i) * d2v.get(j, zero) - dv.get(i, zero) * dv.get(j, zero)
    # -z [xi^{n-2}] (1+V)^3
    U = dict(v)
    U[0] = one + get(0)
    U2: dict[int, ZRat] = {}
    for a in U:
        for b in U:
            if a + b <= n - 1:
                U2[a + b] = U2.get(a + b, zero) + U[a] * U[b]
    cube = zero
    for a in U:
        if n - 2 - a in U2:
            cube = cube + U[a] * U2[n - 2 - a]
    return F - z * cube


def _solve_level(L, F: ZRat, k: int, C: Fraction, pin: Fraction, level: int, J0: int, tries: int = 4) -> ZRat:
    m = k + 1
    for grow in range(tries):
        J = J0 + grow
        D = m * (J + level + 2)
        basis = [ZRat([0] * i + [1], J, C, m) for i in range(D + 1)]
        images = [L(b) for b in basis]
        Jc = max([F.J] + [im.J for im in images])
        cols = [im.lift(Jc) for im in images]
        target = (-F).lift(Jc)
        height = max([c.degree() for c in cols] + [target.degree()]) + 1
        rows = [[to_fraction(c[r]) if r <= c.degree() else Fraction(0) for c in cols] for r in range(height)]
        rhs = [to_fraction(target[r]) if r <= target.degree() else Fraction(0) for r in range(height)]
        # pin the z^k Taylor coefficient, which fixes the rational homogeneous solution
        rows.append([Fraction(b.taylor(k)[k]) for b in basis])
        rhs.append(pin)
        sol = solve_linear_exact(rows, rhs)
        if sol is not None:
            return ZRat(flint.fmpq_poly([to_fmpq(c) for c in sol]), J, C, m)
    raise AnsatzFailure(f"no rational v_{{{k},{level}}} with denominator power up to {J0 + tries - 1}")


def v_tower(k: int, levels: int, residues: ResidueTable) -> VTower:
    """v_{k,-1}, ..., v_{k,levels}; C_{1,k} is measured from the residue table."""
    if k < 1 or levels < -1:
        raise ValueError("need k >= 1 and levels >= -1")
    C = residues.senior(k, k) / (2 * (k + 1) ** 2)
    m = k + 1
    one = ZRat([1], 0, C, m)
    z = ZRat([0, 1], 0, C, m)
    vm1 = _v_minus_one(k, C)
    dvm1 = vm1.delta()
    L = _linear_operator(vm1, dvm1, dvm1.delta(), z)
    v: dict[int, ZRat] = {-1: vm1}
    for n in range(0, levels + 1):
        F = _inhomogeneity(k, v, n, one, z)
        i = index_map(k, n, k)
        pin = residues.gamma(k, i, k) if i is not None else Fraction(0)
        v[n] = _solve_level(L, F, k, C, pin, n, J0=n + 3)
    return VTower(k, C, [v[l] for l in range(-1, levels + 1)])


def v_minus_one_residual(k: int, C: Fraction) -> ZRat:
    """v δ²v - (δv)² - z v³ for v = v_{k,-1}; zero identically."""
    v = _v_minus_one(k, C)
    dv = v.delta()
    z = ZRat([0, 1], 0, C, k + 1)
    return v * dv.delta() - dv * dv - z * v * v * v


def tower_against_table(tower: VTower, residues: ResidueTable, N: int) -> Report:
    rep = Report(f"v_(k={tower.k},l) Taylor data against residues, z^n with n <= {N}")
    for l in range(-1, tower.top + 1):
        t = tower[l].taylor(N)
        bad = []
        for n in range(0, N + 1):
            i = index_map(tower.k, l, n)
            want = residues.gamma(tower.k, i, n) if (i is not None and n >= 1) else Fraction(0)
            if t[n] != want:
                bad.append(n)
        rep.add(f"v_({tower.k},{l}) coefficients", not bad, f"mismatch at n={bad[:5]}" if bad else f"n=0..{N}")
    return rep


def vk0_shape_check(k: int, residues: ResidueTable) -> Report:
    rep = Report(f"shape of v_({k},0)")
    tower = v_tower(k, 0, residues)
    a, b, c = vk0_conjecture(k)
    m = k + 1
    expected = ZRat([0] * m + [c] + [0] * k + [b] + [0] * k + [a], 3, tower.C, m)
    rep.add("C_1k measured equals conjecture", tower.C == c1k_conjecture(k), f"C={tower.C}")
    rep.add("v_(k,0) equals the conjectured closed form", tower[0] == expected, tower[0].format())
    return rep


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def residue_sum_relations(residues: ResidueTable, n: int) -> Report:
    rep = Report(f"residue sum relations for u_{2 * n}")
    items = list(residues.entries(n))
    if n > 1:
        s = sum(g for k, i, g in items if i == 1)
        rep.add("sum_k gamma_(k,1) = 0", s == 0, str(s))
    s0 = sum(g / Fraction(k * k) ** i for k, i, g in items)
    rep.add("sum gamma_(k,i)/k^(2i) = (n+1)/2^n", s0 == Fraction(n + 1, 2**n), str(s0))
    if n >= 3:
        s1 = sum(i * g / Fraction(k * k) ** (i + 1) for k, i, g in items)
        want = Fraction(61, 144) * Fraction((n + 1) ** 2, 2**n)
        rep.add("sum i gamma_(k,i)/k^(2i+2) = (61/144)(n+1)^2/2^n", s1 == want, str(s1))
    return rep


def two_parameter_residue_check(table: CoeffTable, k_max: int = 6, p_max: int = 8) -> Report:
    rep = Report(f"two-parameter senior residue formulas, k <= {k_max}, p <= {p_max}")
    bad = []
    for k in range(1, k_max + 1):
        for p in range(1, p_max + 1):
            first, second = two_parameter_conjecture(k, p)
            n1, n2 = p * (k + 1) + k, p * (k + 1)
            if n1 > table.depth:
                raise ValueError(f"table depth {table.depth} < {n1}")
            if senior_residue(table, k, n1) != first or table[n1].denominator.get(k) != p + 1:
                bad.append((k, p, "p(k+1)+k"))
            if senior_residue(table, k, n2) != second or table[n2].denominator.get(k) != p:
                bad.append((k, p, "p(k+1)"))
    rep.add("both families match the exact table", not bad, f"failures {bad[:5]}" if bad else "")
    return rep


def divisor_counts(M: int) -> np.ndarray:
    d = np.zeros(M + 1, dtype=np.int64)
    for i in range(1, M + 1):
        d[i::i] += 1
    return d


def divisor_count_audit(N: int, table: CoeffTable | None = None) -> Report:
    rep = Report(f"pole count against divisor sums, n <= {N}")
    d = divisor_counts(N + 1)
    D = np.cumsum(d)
    bad = []
    for n in range(1, N + 1):
        nk = int(np.sum((n + 1) // np.arange(2, n + 2)))
        if nk != D[n + 1] - (n + 1):
            bad.append(n)
    rep.add("sum n_k = sum_{k<=n+1} d(k) - (n+1)", not bad, f"fails at {bad[:5]}" if bad else f"n=1..{N}")
    if table is not None:
        M = min(N, table.depth)
        obs = [n for n in range(1, M + 1) if sum(table[n].denominator.values()) != D[n + 1] - (n + 1)]
        rep.add("observed pole count of u_2n matches", not obs, f"fails at {obs[:5]}" if obs else f"n=1..{M}")
    n = np.arange(2, N + 1, dtype=float)
    err = np.abs(D[2:N + 1] - (n * np.log(n) + (2 * np.euler_gamma - 1) * n))
    ratio = err / (2.3 * (n * np.log(n)) ** 0.25)
    worst = int(np.argmax(ratio)) + 2
    rep.note(f"max |error| / (2.3 (n ln n)^(1/4)) = {ratio.max():.4f} at n={worst}")
    return rep


def residue_closed_form_report(residues: ResidueTable, N: int) -> Report:
    rep = Report(f"closed-form residues at s=-1 and s=-4, n <= {N}")
    bad = []
    for n in range(1, N + 1):
        n1 = (n + 1) // 2
        for off in (0, 1, 2):
            if off == 2 and n % 2 == 0:
                continue
            if closed_residues_k1(off, n) != residues.gamma(1, n1 - off, n):
                bad.append((1, off, n))
    for branch, start in (("3p+2", 0), ("3p", 1), ("3p+1", 0)):
        p = start
        while True:
            i, n, g = closed_residues_k2(branch, p)
            if n > N:
                break
            if residues.gamma(2, i, n) != g:
                bad.append((2, branch, p))
            p += 1
    rep.add("all closed forms match", not bad, f"failures {bad[:5]}" if bad else "")
    return rep
