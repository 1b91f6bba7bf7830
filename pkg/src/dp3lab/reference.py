"""Published reference values used by the audit suites.

Polynomials in a^2 are stored as ascending integer coefficient lists in
s = a^2; factored forms are multiplied out on demand.
"""

from __future__ import annotations

from fractions import Fraction

import flint

from .exact import PolyS, RatFuncS
from .residues import ZRat


def _poly(*factors: list[int]) -> PolyS:
    p = flint.fmpz_poly([1])
    for f in factors:
        p *= flint.fmpz_poly(f)
    return PolyS(p)


# u_2 .. u_10 as (numerator in s, {k: exponent of (s + k^2)})
U_TABLE = {
    1: ([1], {1: 1}),
    2: ([3], {1: 1, 2: 1}),
    3: ([18, 12], {1: 2, 2: 1, 3: 1}),
    4: ([180, 55], {1: 2, 2: 1, 3: 1, 4: 1}),
    5: ([10800, 12657, 3345, 273], {1: 3, 2: 2, 3: 1, 4: 1, 5: 1}),
}


def u_entry(n: int) -> RatFuncS:
    num, den = U_TABLE[n]
    return RatFuncS(num, den)


M_OF_N = {1: 0, 2: 0, 3: 1, 4: 1, 5: 3, 6: 3, 7: 5, 8: 6, 9: 8, 10: 8, 11: 12, 12: 12, 13: 14, 14: 16}

# (k, l) -> factored numerator of the triple/pair combination, factors ascending in s
DIVISIBILITY = {
    (4, 2): [[1], [1, 1], [-36, 1]],
    (6, 2): [[6], [1, 1], [-14400, -4676, -455, 6]],
    (8, 2): [[9], [1, 1], [-533433600, -449762544, -128899248, -15895545, -833966, -16186, 139]],
    (7, 3): [[27], [4, 1], [-1800, -1622, -226, 1]],
    (10, 3): [[81], [4, 1], [-1828915200, -1948922208, -573508161, -55847687, -2464380, -42555, 91]],
    (13, 3): [
        [81],
        [4, 1],
        [
            -11292874661376000000, -25866244844475840000, -21696167625164762400, -8649917000534607066,
            -1844596326528992619, -229588162659563852, -17400650459323535, -816781188263163,
            -23690569569496, -413489537329, -4061032152, -16646090, 22702,
        ],
    ],
    (10, 4): [[72], [9, 1], [3, 2], [-6350400, -8718516, -2858377, -272369, -8896, 12]],
    (14, 4): [
        [432],
        [9, 1],
        [3, 2],
        [
            -1434015830016000000, -3496575097981440000, -3170843975740838400, -1396061649915602256,
            -336583346858652920, -47045222366439497, -3930475972840326, -197871121155883,
            -6103132228087, -114944445444, -1235083643, -5756420, 3876,
        ],
    ],
}


def divisibility_numerator(k: int, l: int) -> PolyS:
    return _poly(*DIVISIBILITY[(k, l)])


# A_k[n], n = 1..11, k = 0..3
AK_ROWS = [
    [1, 3, 12, 55, 273, 1428, 7752, 43263, 246675, 1430715, 8414640],
    [1, 15, 162, 1525, 13308, 110691, 890724, 6996474, 53953605, 410084004, 3080715624],
    [1, 63, 1674, 30610, 452619, 5832225, 68232648, 743146326, 7659571500, 75562845204, 719340288408],
    [1, 255, 15924, 546950, 13372449, 262072839, 4394608056, 65619977445, 895717557900, 11382479204349,
     136443463958412],
]

P0_SEQUENCE = [1, 3, 18, 180, 10800, 226800]  # n = 1..6
P1_SEQUENCE = [12, 55, 12657, 176022, 84817044, 10913409936, 11716666225920, 509615533152000]  # n = 3..10
P2_SEQUENCE = [3345, 27825, 35168472, 4617359640, 7902853050240, 260852007650256]  # n = 5..10

# B_1 = poly + sum c_j / (x-2)^j, B_2 likewise
B1_POLY = [Fraction(61, 144), Fraction(-11, 72), Fraction(1, 64)]
B1_POLES = {2: Fraction(61, 36), 3: Fraction(61, 9)}  # (x+2)/(x-2)^3 = 1/(x-2)^2 + 4/(x-2)^3
B2_POLY = [Fraction(-74849, 259200), Fraction(41993, 172800), Fraction(-15923, 230400), Fraction(1643, 172800),
           Fraction(-263, 331776), Fraction(1, 36864)]
B2_POLES = {2: Fraction(-2099, 4800), 3: Fraction(2272, 2025), 4: Fraction(3721, 432)}
B1_TAYLOR = [0, -1, Fraction(-15, 16), Fraction(-61, 72), Fraction(-1525, 2304), Fraction(-61, 128),
             Fraction(-2989, 9216), Fraction(-61, 288)]
B2_TAYLOR = [0, 1, Fraction(63, 64), Fraction(2917, 2592), Fraction(335485, 331776), Fraction(382273, 460800),
             Fraction(21009877, 33177600), Fraction(105619, 230400), Fraction(260899, 819200),
             Fraction(1136621, 5308416)]

# (k, i, n) -> gamma_{k,i}(n); i counts the power of (s + k^2)^{-1}, i = 0 is the regular term
GAMMA = {
    (1, 0, 1): Fraction(0),
    (1, 0, 2): Fraction(-1, 3),
    (1, 1, 3): Fraction(37, 96),
    (1, 1, 4): Fraction(-17, 576),
    (1, -1, 1): Fraction(0),
    (1, 0, 3): Fraction(-431, 2304),
    (1, 1, 5): Fraction(-62743, 552960),
    (1, 2, 7): Fraction(-222359, 11059200),
    (2, 0, 1): Fraction(-1, 3),
    (2, 1, 4): Fraction(-2, 27),
}

C1K = {1: Fraction(1, 8), 2: Fraction(-1, 18), 3: Fraction(9, 1024), 4: Fraction(-1, 1350),
       5: Fraction(625, 15925248), 6: Fraction(-9, 6272000), 7: Fraction(117649, 3057647616000),
       8: Fraction(-2, 2531725875)}

# Y_n + Z_n - (n+1) for n = 3..14, truncated to three decimals
PMN1_GAPS = dict(zip(range(3, 15), ["0.045", "0.133", "0.258", "0.414", "0.599", "0.810", "1.045", "1.303",
                                    "1.584", "1.886", "2.208", "2.552"]))
X_TRUNCATED = {1: "0.1316", 2: "0.1950", 38: "0.9888", 39: "1.002"}
DELTA_Y_TRUNCATED = {13: "0.992", 14: "1.021"}


def _zrat_over(num: list[int], den: int, base: int, J: int, C: Fraction, m: int) -> ZRat:
    """num(z) / (den * (base + sign z^m)^J) rewritten over (1 - C z^m)^J."""
    scale = den * Fraction(base) ** J
    q = flint.fmpq_poly(num) * flint.fmpq(scale.denominator, scale.numerator)
    return ZRat(q, J, C, m)


def _v1(num: list[int], den: int, J: int) -> ZRat:
    # (z^2 - 8)^J = (-8)^J (1 - z^2/8)^J
    return _zrat_over(num, den, -8, J, Fraction(1, 8), 2)


def _v2(num: list[int], den: int, J: int) -> ZRat:
    # (18 + z^3)^J = 18^J (1 + z^3/18)^J
    return _zrat_over(num, den, 18, J, Fraction(-1, 18), 3)


def _sparse(pairs: dict[int, int]) -> list[int]:
    out = [0] * (max(pairs) + 1)
    for e, c in pairs.items():
        out[e] = c
    return out


# numerator of v_{1,3} over 2687385600 (z^2-8)^6, exponent -> coefficient, digits as published
V13_AS_PRINTED = {3: -131784612249600, 5: 1890263236608, 7: 14900362739712, 9: 215484420096, 11: 5050358784,
                  13: -153847552, 15: 188436, 17: -7365, 19: 25}
# two published coefficients lost their last digit; (published, restored)
V13_DROPPED_DIGITS = {5: (1890263236608, 18902632366080), 15: (188436, 1884368)}


def printed_v(k: int, l: int, literal: bool = False) -> ZRat:
    """Closed forms of the residue generating functions v_{k,l}.

    ``literal`` keeps the two truncated coefficients of v_{1,3} as published.
    """
    if (k, l) == (1, -1):
        return ZRat([0, 1], 2, Fraction(1, 8), 2)
    if (k, l) == (1, 0):
        return ZRat(flint.fmpq_poly([0, 0, 576, 0, -16, 0, 1]) / 576, 3, Fraction(1, 8), 2)
    if (k, l) == (1, 1):
        return _v1(_sparse({3: 4091904, 5: 285696, 7: -1920, 9: 80, 11: -1}), 2592, 4)
    if (k, l) == (1, 2):
        return _v1(_sparse({2: 12740198400, 4: -6834585600, 6: -946999296, 8: -10810368, 10: 198784,
                            12: -3128, 14: -25}), 1166400, 5)
    if (k, l) == (1, 3):
        coeffs = dict(V13_AS_PRINTED)
        if not literal:
            coeffs.update({e: fixed for e, (_, fixed) in V13_DROPPED_DIGITS.items()})
        return _v1(_sparse(coeffs), 2687385600, 6)
    if (k, l) == (2, -1):
        return ZRat([0, 0, -1], 2, Fraction(-1, 18), 3)
    if (k, l) == (2, 0):
        return _v2(_sparse({3: -3 * 5184, 6: 3 * 18, 9: -3}), 4, 3)
    if (k, l) == (2, 1):
        return _v2(_sparse({1: -6046617600, 4: -2687385600, 7: 284788224, 10: -468180, 13: 4464, 16: 25}),
                   172800, 4)
    raise KeyError((k, l))


PRINTED_V = [(1, -1), (1, 0), (1, 1), (1, 2), (1, 3), (2, -1), (2, 0), (2, 1)]
