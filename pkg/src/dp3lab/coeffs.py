"""Taylor coefficients u_{2n}(a) of the odd solution, as exact functions of s = a^2.

With U = sum_{n>=1} u_{2n} x^n the coefficients obey

    (s+1) u_2 = 1,
    (s+n^2) u_{2n} = 3 u_{2(n-1)} + 3 sum_{j1+j2=n-1} u_{2j1} u_{2j2}
                     + sum_{j1+j2+j3=n-1} u_{2j1} u_{2j2} u_{2j3}
                     - sum_{1<=j, 2j<n} (n-2j)^2 u_{2j} u_{2(n-j)},

all indices starting at 1.  Entries are stored as integer numerators over
factored denominators prod (s+k^2)^{e_k}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import flint

from .exact import FactoredDenom, PolyS, RatFuncS, content_and_val3
from .report import Report

# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

_ZLIN: dict[tuple[int, int], flint.fmpz_poly] = {}


def _zlin(k: int, e: int) -> flint.fmpz_poly:
    p = _ZLIN.get((k, e))
    if p is None:
        p = _ZLIN[(k, e)] = flint.fmpz_poly([k * k, 1]) ** e
    return p


# A raw term is (numerator fmpz_poly, {k: exponent}); nothing is reduced
# until a sum is complete.
_Raw = tuple[flint.fmpz_poly, dict[int, int]]


def _raw_mul(x: _Raw, y: _Raw) -> _Raw:
    e = dict(x[1])
    for k, v in y[1].items():
        e[k] = e.get(k, 0) + v
    return x[0] * y[0], e


def _raw_sum(terms: Iterable[tuple[int, _Raw]]) -> _Raw:
    terms = list(terms)
    common: dict[int, int] = {}
    for _, (_, e) in terms:
        for k, v in e.items():
            if v > common.get(k, 0):
                common[k] = v
    total = flint.fmpz_poly()
    for c, (num, e) in terms:
        lift = flint.fmpz_poly([1])
        for k, v in common.items():
            d = v - e.get(k, 0)
            if d:
                lift *= _zlin(k, d)
        total += c * (num * lift)
    return total, common


def _raw_reduce(x: _Raw) -> _Raw:
    num, e = x[0], dict(x[1])
    if num.is_zero():
        return num, {}
    for k in list(e):
        lin = flint.fmpz_poly([k * k, 1])
        while e[k] and num(-k * k) == 0:
            num = num // lin
            e[k] -= 1
        if not e[k]:
            del e[k]
    return num, e


def _u_raw(N: int) -> list[_Raw]:
    u: list[_Raw] = [(flint.fmpz_poly(), {})]
    pair_sums: dict[int, _Raw] = {}
    for n in range(1, N + 1):
        if n == 1:
            u.append((flint.fmpz_poly([1]), {1: 1}))
            continue
        m = n - 1
        terms: list[tuple[int, _Raw]] = [(3, u[m])]
        if m >= 2:
            pairs = [(1 if 2 * j == m else 2, _raw_mul(u[j], u[m - j])) for j in range(1, m // 2 + 1)]
            pair_sums[m] = _raw_reduce(_raw_sum(pairs))
            terms.append((3, pair_sums[m]))
        if m >= 3:
            triples = [(1, _raw_mul(u[j], pair_sums[m - j])) for j in range(1, m - 1)]
            terms.append((1, _raw_sum(triples)))
        for j in range(1, (n - 1) // 2 + 1):
            terms.append((-((n - 2 * j) ** 2), _raw_mul(u[j], u[n - j])))
        num, e = _raw_sum(terms)
        e[n] = e.get(n, 0) + 1
        u.append(_raw_reduce((num, e)))
    return u


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructuralDecomposition:
    n: int
    exponents: dict[int, int]
    m_observed: int
    numerator: PolyS
    p_coeffs: list[int]
    predicted_exponents: dict[int, int]
    m_predicted: int

    @property
    def exponents_match(self) -> bool:
        return self.exponents == self.predicted_exponents

    @property
    def degree_match(self) -> bool:
        return self.m_observed == self.m_predicted


@dataclass
class CoeffTable:
    entries: list[RatFuncS]
    _decomp: dict[int, StructuralDecomposition] = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def depth(self) -> int:
        return len(self.entries)

    def __getitem__(self, n: int) -> RatFuncS:
        if not 1 <= n <= len(self.entries):
            raise IndexError(f"u_{{2n}} with n={n} outside table depth {len(self.entries)}")
        return self.entries[n - 1]

    def __iter__(self) -> Iterator[RatFuncS]:
        return iter(self.entries)

    def decomposition(self, n: int) -> StructuralDecomposition:
        d = self._decomp.get(n)
        if d is None:
            d = self._decomp[n] = _decompose(self[n], n)
        return d

    def truncated(self, N: int) -> "CoeffTable":
        return CoeffTable(self.entries[:N])


def compute_u_table(N: int) -> CoeffTable:
    if N < 1:
        raise ValueError("table depth must be at least 1")
    raw = _u_raw(N)
    return CoeffTable([RatFuncS(num, e, reduced=True) for num, e in raw[1:]])


def predicted_structure(n: int) -> tuple[dict[int, int], int]:
    if n < 1:
        raise ValueError("n must be positive")
    exps = {k: (n + 1) // (k + 1) for k in range(1, n + 1)}
    return exps, sum(exps.values()) - n


def _decompose(f: RatFuncS, n: int) -> StructuralDecomposition:
    exps, m = predicted_structure(n)
    num = f.numerator
    return StructuralDecomposition(
        n=n,
        exponents=dict(f.denominator),
        m_observed=num.degree(),
        numerator=num,
        p_coeffs=num.integer_coeffs(),
        predicted_exponents=exps,
        m_predicted=m,
    )


def decompose(table: CoeffTable, n: int) -> StructuralDecomposition:
    return table.decomposition(n)


def check_positivity(dec: StructuralDecomposition) -> Report:
    rep = Report(f"numerator coefficients of u_{2 * dec.n}")
    bad = [(dec.n, k, p) for k, p in enumerate(dec.p_coeffs) if p <= 0]
    rep.add(
        "p_k(n) positive integers",
        not bad,
        f"n={dec.n}, p={dec.p_coeffs}" if not bad else f"violations (n,k,p_k): {bad[:5]}",
    )
    return rep


def structure_report(table: CoeffTable, N: int | None = None) -> Report:
    N = table.depth if N is None else N
    rep = Report(f"denominator/numerator structure, n <= {N}")
    exp_bad, deg_bad, pos_bad = [], [], []
    for n in range(1, N + 1):
        d = table.decomposition(n)
        if not d.exponents_match:
            exp_bad.append(n)
        if not d.degree_match:
            deg_bad.append(n)
        if any(p <= 0 for p in d.p_coeffs):
            pos_bad.append(n)
    rep.add("exponent of (s+k^2) equals floor((n+1)/(k+1))", not exp_bad,
            f"first failing n={exp_bad[0]}" if exp_bad else f"n=1..{N}")
    rep.add("numerator degree equals sum n_k - n", not deg_bad,
            f"first failing n={deg_bad[0]}" if deg_bad else f"n=1..{N}")
    rep.add("numerator coefficients are positive integers", not pos_bad,
            f"first failing n={pos_bad[0]}" if pos_bad else f"n=1..{N}")
    cancelled = [n for n in range(1, N + 1) if table[n].denominator.get(n, 0) == 0]
    rep.add("(s+n^2) never cancels from u_{2n}", not cancelled,
            f"cancelled at n={cancelled[:5]}" if cancelled else f"n=1..{N}")
    return rep


# ---------------------------------------------------------------------------
# divisibility of the triple/pair combinations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivisibilityResult:
    k: int
    l: int
    numerator: PolyS
    denominator: FactoredDenom
    divisible: bool
    quotient: PolyS | None

    @property
    def divisor(self) -> PolyS:
        return PolyS.linear((self.l - 1) ** 2)


def _compositions3(M: int) -> Iterator[tuple[int, int, int]]:
    for m1 in range(1, M - 1):
        for m2 in range(1, M - m1):
            yield m1, m2, M - m1 - m2


def strange_divisibility(table: CoeffTable, k: int, l: int) -> DivisibilityResult:
    if k < 4 or l < 2 or k + 2 < 3 * l or (k + 2) % l:
        raise ValueError(f"need k>=4, l>=2, k+2>=3l and l | k+2; got k={k}, l={l}")
    M = (k + 2) // l
    need = l * (M - 1) - 1
    if need > table.depth:
        raise ValueError(f"table depth {table.depth} < {need} required for k={k}, l={l}")

    def u(m: int) -> RatFuncS:
        return table[l * m - 1]

    terms: list[tuple[int, PolyS, FactoredDenom]] = []

    def push(c: int, factors: list[RatFuncS]) -> None:
        num = PolyS([c])
        den = FactoredDenom()
        for f in factors:
            num = num * f.numerator
            den = den.times(f.denominator)
        terms.append((c, num, den))

    for m1, m2, m3 in _compositions3(M):
        push(1, [u(m1), u(m2), u(m3)])
    for m4 in range(1, M):
        m5 = M - m4
        if 2 * m4 < M:
            push(-((l * (m5 - m4)) ** 2), [u(m4), u(m5)])

    common = FactoredDenom()
    for _, _, den in terms:
        common = common.lcm(den)
    total = PolyS([])
    for _, num, den in terms:
        total = total + num * PolyS(common.cofactor(den))

    divisor = PolyS.linear((l - 1) ** 2)
    quotient, rem = total.divmod(divisor)
    divisible = rem.is_zero()
    return DivisibilityResult(k, l, total, common, divisible, quotient if divisible else None)


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

_HEADER = "# u_2n table in s=a^2: n <TAB> numerator coefficients, ascending <TAB> denominator k^e factors"


def dump_table(table: CoeffTable, fh: IO[str]) -> None:
    fh.write(_HEADER + "\n")
    for n, f in enumerate(table, start=1):
        nums = " ".join(str(c) for c in f.numerator.integer_coeffs())
        den = " ".join(f"{k}^{e}" for k, e in f.denominator.items())
        fh.write(f"{n}\t{nums}\t{den}\n")


def load_table(fh: IO[str]) -> CoeffTable:
    entries: list[RatFuncS] = []
    for lineno, line in enumerate(fh, start=1):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        try:
            n_str, nums, den = line.split("\t")
            n = int(n_str)
            coeffs = [int(c) for c in nums.split()]
            factors: dict[int, int] = {}
            for item in den.split():
                k, e = item.split("^")
                factors[int(k)] = int(e)
        except ValueError as exc:
            raise ValueError(f"malformed table record at line {lineno}: {line!r}") from exc
        if n != len(entries) + 1:
            raise ValueError(f"table records out of order at line {lineno}: expected n={len(entries) + 1}")
        entries.append(RatFuncS(flint.fmpz_poly(coeffs), factors, reduced=True))
    return CoeffTable(entries)


def entry_to_json(f: RatFuncS) -> dict:
    return {
        "numerator": [str(c) for c in f.numerator.integer_coeffs()],
        "denominator": {str(k): e for k, e in f.denominator.items()},
    }


def content_valuation(table: CoeffTable, n: int) -> tuple[int, int]:
    c, v = content_and_val3(table[n].numerator)
    return int(c), v
