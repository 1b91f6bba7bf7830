from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dp3lab.exact import (
    FactoredDenom,
    PolyS,
    RatFuncS,
    content_and_val3,
    partial_fractions,
    solve_linear_exact,
    valuation,
)

S = sympy.Symbol("s")
rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 100)
polys = st.lists(st.integers(-20, 20), min_size=1, max_size=6).map(PolyS)
denoms = st.dictionaries(st.integers(1, 4), st.integers(1, 3), max_size=3)


def to_sympy(f: RatFuncS):
    num = sum(sympy.Rational(c.numerator, c.denominator) * S**i for i, c in enumerate(f.numerator.coeffs))
    den = sympy.Mul(*[(S + k * k) ** e for k, e in f.denominator.items()])
    return num / den


@given(polys, polys, rationals)
def test_poly_ring_ops_agree_with_evaluation(p, q, x):
    assert (p + q)(x) == p(x) + q(x)
    assert (p * q)(x) == p(x) * q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(polys, polys)
def test_poly_divmod_reconstructs(p, q):
    if q.is_zero():
        return
    d, r = p.divmod(q)
    assert d * q + r == p
    assert r.is_zero() or r.degree() < q.degree()


def test_poly_shift_and_format():
    p = PolyS([1, 2, 1])
    assert p.shift(-1) == PolyS([0, 0, 1])
    assert p.format() == "s^2 + 2*s + 1"
    assert PolyS([0, -3, 0, 1]).format("a") == "a^3 - 3*a"


@given(polys, denoms, polys, denoms, rationals)
def test_ratfunc_arithmetic_agrees_with_evaluation(p, dp, q, dq, x):
    f, g = RatFuncS(p, dp), RatFuncS(q, dq)
    if x < 0 and any(x == -k * k for k in set(dp) | set(dq)):
        return
    assert (f + g)(x) == f(x) + g(x)
    assert (f * g)(x) == f(x) * g(x)


def test_ratfunc_is_reduced():
    f = RatFuncS(PolyS([4, 1]) * PolyS([1, 1]), {1: 2, 2: 1})
    assert dict(f.denominator) == {1: 1}
    assert f.numerator == PolyS([1])


@settings(max_examples=40, deadline=None)
@given(polys, denoms)
def test_partial_fractions_match_sympy_apart(p, d):
    f = RatFuncS(p, d)
    pf = partial_fractions(f)
    assert pf.recombine() == f
    expected = sympy.apart(to_sympy(f), S)
    rebuilt = to_sympy(RatFuncS.from_poly(pf.polynomial_part)) + sum(
        sympy.Rational(c.numerator, c.denominator) / (S + k * k) ** i for (k, i), c in pf.terms.items()
    )
    assert sympy.simplify(expected - rebuilt) == 0


def test_local_expansion_leading_coefficient_is_residue():
    f = RatFuncS([1], {1: 1, 2: 1})  # 1/((s+1)(s+4))
    e, c = f.local_expansion(1, 3)
    assert e == 1
    assert c[0] == Fraction(1, 3)
    assert partial_fractions(f)[(1, 1)] == Fraction(1, 3)
    assert partial_fractions(f)[(2, 1)] == Fraction(-1, 3)


def test_factored_denominator_ops():
    a, b = FactoredDenom({1: 2, 3: 1}), FactoredDenom({1: 1, 2: 1})
    assert a.lcm(b) == {1: 2, 2: 1, 3: 1}
    assert a.times(b) == {1: 3, 2: 1, 3: 1}
    assert a.degree() == 3
    assert a.evaluate(0) == 9
    with pytest.raises(ValueError):
        b.cofactor(a)
    with pytest.raises(ValueError):
        FactoredDenom({0: 1})


def test_content_and_valuation():
    assert content_and_val3(PolyS([18, 27])) == (Fraction(9), 2)
    assert valuation(162, 3) == 4
    with pytest.raises(ValueError):
        content_and_val3(PolyS([Fraction(1, 2)]))
    with pytest.raises(ValueError):
        valuation(0, 3)


def test_solve_linear_exact():
    assert solve_linear_exact([[1, 1], [1, -1], [2, 0]], [3, 1, 4]) == [2, 1]
    assert solve_linear_exact([[1, 1], [1, 1]], [1, 2]) is None
    with pytest.raises(ValueError):
        solve_linear_exact([[1, 1]], [1])
