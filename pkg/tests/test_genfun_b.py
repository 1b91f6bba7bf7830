from fractions import Fraction

import pytest
import sympy

from dp3lab import genfun_b as gb
from dp3lab import reference
from dp3lab.coeffs import compute_u_table
from dp3lab.exact import PolyS


@pytest.fixture(scope="module")
def t40():
    return compute_u_table(40)


def _as_sympy(ansatz, x):
    poly = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(ansatz.polynomial.coeffs))
    return poly + sum(sympy.Rational(c.numerator, c.denominator) / (x - 2) ** j for j, c in ansatz.poles.items())


def test_b1_b2_equal_printed_forms():
    assert gb.solve_b_ode(1) == gb.RationalAnsatz(PolyS(reference.B1_POLY), dict(reference.B1_POLES))
    assert gb.solve_b_ode(2) == gb.RationalAnsatz(PolyS(reference.B2_POLY), dict(reference.B2_POLES))


def test_b1_taylor_by_sympy():
    x = sympy.Symbol("x")
    expr = _as_sympy(gb.solve_b_ode(1), x)
    taylor = sympy.Poly(sympy.series(expr, x, 0, 8).removeO(), x).all_coeffs()[::-1]
    assert [Fraction(int(c.p), int(c.q)) for c in taylor] == reference.B1_TAYLOR
    assert gb.solve_b_ode(2).series(9).coefficients == reference.B2_TAYLOR


@pytest.mark.parametrize("k", [1, 2, 3])
def test_three_routes_agree(t40, k):
    table_route = gb.b_series_from_table(t40, k, 30)
    assert gb.b_series(k, 30) == table_route
    if k <= 2:
        assert gb.solve_b_ode(k).series(30) == table_route


def test_b3_rational_solution_reproduces_table(t40):
    sol = gb.solve_b_ode(3)
    assert sol.series(40) == gb.b_series_from_table(t40, 3, 40)
    assert sol.pole_order >= 4


def test_b0_and_integrable_limit():
    assert gb.b0_identity(40)
    rep = gb.integrable_case_check()
    assert rep.ok, str(rep)
    assert gb.one_plus_b0().series(5).coefficients == [Fraction(n + 1, 2**n) for n in range(6)]


def test_operator_on_known_function():
    # the operator sends x to 1 - 5x/2 - 2x
    out = gb.apply_operator(gb.XRat([0, 1]))
    assert out.series(2).coefficients == [1, Fraction(-9, 2), 0]


def test_closed_forms(t40):
    assert gb.closed_form_report(t40, 40).ok
    assert gb.b_tower_report(t40, 20).ok
    p = [t40.decomposition(n).p_coeffs for n in range(1, 11)]
    assert [p[n - 1][0] for n in range(1, 7)] == reference.P0_SEQUENCE
    assert [p[n - 1][1] for n in range(3, 11)] == reference.P1_SEQUENCE
    assert [p[n - 1][2] for n in range(5, 11)] == reference.P2_SEQUENCE


def test_closed_form_argument_checks():
    with pytest.raises(ValueError):
        gb.closed_forms_u2nk(3, 3)
    with pytest.raises(ValueError):
        gb.closed_forms_pk(2, 1)
    with pytest.raises(ValueError):
        gb.closed_forms_pk(4, 2)
    with pytest.raises(ValueError):
        gb.solve_b_ode(0)


def test_partitions():
    parts = list(gb.partitions(4))
    assert len(parts) == 5
    assert all(sum(p * m for p, m in d.items()) == 4 for d in parts)
    assert len(list(gb.partitions(5, max_part=2))) == 3
