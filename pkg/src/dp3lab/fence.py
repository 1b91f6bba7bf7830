"""3-adic valuation profile of the numerator content and its fence model.

For each n the numerator of u_{2n} has integer content (n+1)*3^z or
((n+1)/2)*3^z.  The heights z_n form a piecewise-linear profile that is
predicted by gluing a few fixed shapes with prescribed falls between them.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterator

from .coeffs import CoeffTable, content_valuation
from .report import Report


class FenceStructureError(ArithmeticError):
    """The numerator content is not of the form (n+1)*3^z or ((n+1)/2)*3^z."""


# ---------------------------------------------------------------------------
# integer sequences
# ---------------------------------------------------------------------------


def triangular_split(k: int) -> tuple[int, int]:
    """(q, l) with k = q(q+1)/2 + l and 0 <= l <= q."""
    if k < 0:
        raise ValueError("k must be non-negative")
    q = 0
    while (q + 1) * (q + 2) // 2 <= k:
        q += 1
    return q, k - q * (q + 1) // 2


def plaindrome(q: int, l: int) -> int:
    """The plaindrome indexed by the pair (q, l), 0 <= l <= q."""
    if not 0 <= l <= q:
        raise ValueError("need 0 <= l <= q")
    return (3**q + 3**l) // 2 - 1


def plaindromes(count: int) -> list[int]:
    """a_1, ..., a_count: positive integers whose base-3 digits never decrease."""
    if count < 1:
        raise ValueError("count must be positive")
    return [plaindrome(*triangular_split(k)) for k in range(1, count + 1)]


def base3(n: int) -> str:
    digits = []
    while n:
        n, r = divmod(n, 3)
        digits.append(str(r))
    return "".join(reversed(digits)) or "0"


def is_plaindrome(n: int) -> bool:
    d = base3(n)
    return n > 0 and all(a <= b for a, b in zip(d, d[1:]))


def b_k(k: int) -> int:
    return 3 * (3**k - 1) // 2


def b_points(k: int) -> list[int]:
    """b_k^j for j = 0 .. (k+1)(k+4)/2, the predicted solutions of z_n = k below b_{k+1}."""
    if k < 1:
        raise ValueError("k must be positive")
    out: dict[int, int] = {}
    for m in range(k, -2, -1):
        for l in range(m + 2):
            j = (k - m) * (k + m + 5) // 2 + l
            value = Fraction(3, 2) * (3 ** (k + 1) - Fraction(3) ** m - Fraction(3) ** (m - l) - 1)
            assert value.denominator == 1
            out[j] = int(value)
    return [out[j] for j in range(len(out))]


def b_sequences(K: int) -> dict[int, tuple[int, list[int]]]:
    return {k: (b_k(k), b_points(k)) for k in range(1, K + 1)}


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fall:
    """A marked descent landing at n."""

    n: int
    kind: str  # "C1" or "C2"
    nominal: int
    depth: int
    resonant: bool


@dataclass
class FenceProfile:
    heights: list[int]
    source: str
    falls: list[Fall] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.heights)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= len(self.heights):
            raise IndexError(f"z_{n} outside 1..{len(self.heights)}")
        return self.heights[n - 1]

    def truncated(self, N: int) -> "FenceProfile":
        return FenceProfile(self.heights[:N], self.source, [f for f in self.falls if f.n <= N])

    def resonant_points(self) -> set[int]:
        return {f.n for f in self.falls if f.resonant}


def valuation_height(n: int, content: int) -> int:
    base = n + 1 if n % 2 == 0 else (n + 1) // 2
    q, r = divmod(content, base)
    if r or q <= 0:
        raise FenceStructureError(f"n={n}: content {content} is not a multiple of {base}")
    z = 0
    while q % 3 == 0:
        q //= 3
        z += 1
    if q != 1:
        raise FenceStructureError(f"n={n}: content {content} = {base} * 3^{z} * {q}")
    return z


def measured_profile(table: CoeffTable, N: int | None = None) -> FenceProfile:
    N = len(table) if N is None else N
    return FenceProfile([valuation_height(n, content_valuation(table, n)[0]) for n in range(1, N + 1)], "measured")


# ---------------------------------------------------------------------------
# shapes and grammars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Shape:
    name: str
    offsets: tuple[int, ...]


SHAPE_A = Shape("A", (0, 1, 1, 1, 2, 1, 1, 2, 2, 1, 2, 2, 2, 3))
SHAPE_B = Shape("B", (0, 0, 1, 1, 0, 1, 1, 1, 2, 1, 1, 2, 2))
SHAPE_C = Shape("C", (0, 0, 1, 0, 0, 1, 1, 0, 1, 1))

# (index of the arrow's landing point inside Shape C, kind)
_C_ARROWS = ((3, "C1"), (7, "C2"))
# shape type per position and the superscripts of one quasiperiod
_C_TYPES = ("C", "C1", "C2")
C_DIGITS = (1, 2, 2, 1, 3, 2, 1, 2, 3)
# falls after A' in the A/B grammar: (fall, next shape)
_AB_CYCLE = ((2, SHAPE_B), (2, SHAPE_A), (3, SHAPE_B), (2, SHAPE_A), (2, SHAPE_B), (3, SHAPE_A))


def deformed_c(kind: str, j: int) -> Shape:
    """Shape C with the first (C1) or second (C2) arrow falling by j."""
    offs = list(SHAPE_C.offsets)
    idx = dict((k, i) for i, k in _C_ARROWS)[kind]
    for i in range(idx, len(offs)):
        offs[i] -= j - 1
    return Shape(f"{kind}^{j}", tuple(offs))


def ab_symbols() -> Iterator[str]:
    yield "A'"
    for fall, shape in itertools.cycle(_AB_CYCLE):
        yield "2" if fall == 2 else "3+"
        yield shape.name


def c_symbols() -> Iterator[str]:
    for t, d in zip(itertools.cycle(_C_TYPES), itertools.cycle(C_DIGITS)):
        yield "C" if t == "C" else f"{t}^{'3+' if d == 3 else d}"


def grammar_dump(count: int = 18) -> str:
    ab = " ".join(itertools.islice(ab_symbols(), 2 * count))
    c = " ".join(itertools.islice(c_symbols(), count))
    digits = "".join("3+" if d == 3 else str(d) for d in itertools.islice(itertools.cycle(C_DIGITS), count))
    shapes = "\n".join(f"{s.name}: {' '.join(map(str, s.offsets))}" for s in (SHAPE_A, SHAPE_B, SHAPE_C))
    return f"{shapes}\nA/B grammar: {ab} ...\nC grammar:   {c} ...\nC digits:    {digits} ...\n"


def _land(z: list[int], fall: int) -> tuple[int, bool]:
    n = len(z) + 1
    if is_plaindrome(n):
        return 0, True
    return z[-1] - fall, False


def _build_ab(N: int) -> FenceProfile:
    first = SHAPE_A.offsets[2:]
    z = [o - first[0] for o in first]
    falls: list[Fall] = []
    cycle = itertools.cycle(_AB_CYCLE)
    last = SHAPE_A
    while len(z) < N:
        fall, shape = next(cycle)
        h, res = _land(z, fall)
        falls.append(Fall(len(z) + 1, "C1" if last is SHAPE_A else "C2", fall, z[-1] - h, res))
        z.extend(h + o - shape.offsets[0] for o in shape.offsets)
        last = shape
    return FenceProfile(z[:N], "predicted-AB", [f for f in falls if f.n <= N])


def _build_c(N: int) -> FenceProfile:
    z = [0]
    falls: list[Fall] = []
    for t, d in zip(itertools.cycle(_C_TYPES), itertools.cycle(C_DIGITS)):
        if len(z) >= N:
            break
        offs = SHAPE_C.offsets
        for i in range(1, len(offs)):
            arrow = next((k for idx, k in _C_ARROWS if idx == i), None)
            if arrow is None:
                z.append(z[-1] + offs[i] - offs[i - 1])
                continue
            nominal = d if arrow == t else 1
            h, res = _land(z, nominal)
            falls.append(Fall(len(z) + 1, arrow, nominal, z[-1] - h, res))
            z.append(h)
    return FenceProfile(z[:N], "predicted-C", [f for f in falls if f.n <= N])


def build_fence(N: int, grammar: str = "C") -> FenceProfile:
    """Predicted heights z_1..z_N from the A/B grammar or the C grammar."""
    if N < 1:
        raise ValueError("N must be positive")
    if grammar == "AB":
        return _build_ab(N)
    if grammar == "C":
        return _build_c(N)
    raise ValueError("grammar must be 'AB' or 'C'")


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def fence_conjecture_audit(measured: FenceProfile, predicted: FenceProfile) -> Report:
    N = min(len(measured), len(predicted))
    rep = Report(f"fence conjectures, n <= {N}")
    bad = [n for n in range(1, N + 1) if measured[n] != predicted[n]]
    rep.add("measured heights equal the predicted fence", not bad, f"first mismatch at n={bad[:5]}" if bad else f"n=1..{N}")

    zeros = {n for n in range(1, N + 1) if measured[n] == 0}
    plain = {n for n in range(1, N + 1) if is_plaindrome(n)}
    rep.add("z_n = 0 exactly on plaindromes", zeros == plain, f"{len(zeros)} zeros")

    k = 1
    while b_k(k) <= N:
        b = b_k(k)
        below = all(measured[n] < k for n in range(1, b))
        rep.add(f"z_n < {k} for n < b_{k} = {b}, and z_b = {k}", below and measured[b] == k, f"z_b={measured[b]}")
        top = min(b_k(k + 1) - 1, N)
        sols = [n for n in range(1, top + 1) if measured[n] == k]
        family = [p for p in b_points(k) if p <= top]
        complete = b_k(k + 1) - 1 <= N
        rep.add(
            f"solutions of z_n = {k} below b_{k + 1}" + ("" if complete else f" (checked to n={N})"),
            sols == family,
            f"{len(sols)} of {len(b_points(k))} points",
        )
        k += 1

    c1 = sorted((f.n, f.depth) for f in predicted.falls if f.resonant and f.kind == "C1")
    want_c1 = sorted((b_k(q) + 1, q) for q in range(1, 12) if b_k(q) + 1 <= N)
    rep.add("C1 resonances at b_k + 1 with depth k", c1 == want_c1, str(c1))
    for n, depth in want_c1:
        if n + 1 <= N:
            rep.add(f"gap after C1 resonance at n={n}", measured[n - 1] == depth and measured[n] == measured[n + 1] == 0)

    c2 = sorted((f.n, f.depth) for f in predicted.falls if f.resonant and f.kind == "C2")
    want_c2 = sorted(
        (plaindrome(q, l), l - 1) for q in range(2, 12) for l in range(2, q + 1) if plaindrome(q, l) <= N
    )
    rep.add("C2 resonances at a_(q,l) with depth l-1", c2 == want_c2, f"{len(c2)} resonances")
    deep = [(n, d) for n, d in c2 if d > 3]
    listed = {3**q - 1 for q in range(5, 12)}
    extra = [(n, d) for n, d in deep if n not in listed]
    for q in range(5, 12):
        n = 3**q - 1
        if n <= N:
            rep.add(f"deep C2 resonance at 3^{q} - 1 = {n}", (n, q - 1) in deep)
    if extra:
        rep.note(f"deep C2 resonances beyond 3^q - 1: {extra}")
    nonres = [f for f in predicted.falls if not f.resonant and f.nominal == 3 and f.depth != 3]
    rep.add("nonresonant 3+ falls equal 3", not nonres)
    return rep


def grammar_agreement(N: int) -> Report:
    rep = Report(f"A/B grammar against C grammar, n <= {N}")
    ab, c = build_fence(N, "AB"), build_fence(N, "C")
    bad = [n for n in range(1, N + 1) if ab[n] != c[n]]
    rep.add("both grammars give the same heights", not bad, f"first mismatch {bad[:3]}" if bad else f"n=1..{N}")
    return rep


@dataclass(frozen=True)
class ConnectedPart:
    index: int
    start: int
    end: int
    area: Fraction


def _area(profile: FenceProfile, start: int, end: int) -> Fraction:
    return sum((Fraction(profile[n] + profile[n + 1], 2) for n in range(start, end)), Fraction(0))


def connected_parts(profile: FenceProfile) -> tuple[list[ConnectedPart], Report]:
    """Split at the unit gaps (two neighbouring zeros) and measure each complete part."""
    N = len(profile)
    gaps = [n for n in range(1, N) if profile[n] == 0 and profile[n + 1] == 0]
    parts = []
    for k, (g0, g1) in enumerate(zip(gaps, gaps[1:]), start=1):
        parts.append(ConnectedPart(k, g0 + 1, g1, _area(profile, g0 + 1, g1)))

    rep = Report(f"connected parts of the fence, n <= {N}")
    for p in parts:
        b_prev = b_k(p.index - 1) if p.index > 1 else 0
        rep.add(
            f"part {p.index} spans [{p.start}, {p.end}]",
            (p.start, p.end) == (b_prev + 2, b_k(p.index) + 1),
        )
        S = Fraction((2 * p.index - 1) * 3**p.index + 1, 4)
        rep.add(f"S_{p.index} = {S}", p.area == S, f"area {p.area}")
    for k in range(1, len(parts) + 1):
        b_prev, b = (b_k(k - 1) if k > 1 else 0), b_k(k)
        lo, hi = b + 2, 2 * b - b_prev
        if hi > N:
            rep.note(f"self-similarity of part {k} not reachable (needs n={hi})")
            continue
        same = [profile[b_prev + 2 + i] for i in range(b - b_prev - 1)] == [profile[lo + i] for i in range(hi - lo + 1)]
        rep.add(f"part {k} reappears on [{lo}, {hi}]", same, f"old-fragment length {b - b_prev - 1}")
    return parts, rep


def write_profile_csv(measured: FenceProfile | None, predicted: FenceProfile, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "z_measured", "z_predicted", "resonance_flag"])
    resonant = predicted.resonant_points()
    for n in range(1, len(predicted) + 1):
        zm = measured[n] if measured is not None and n <= len(measured) else ""
        w.writerow([n, zm, predicted[n], int(n in resonant)])
