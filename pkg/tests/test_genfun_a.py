import io
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dp3lab import genfun_a as ga
from dp3lab import reference
from dp3lab.coeffs import compute_u_table


def test_a0_is_fuss_catalan():
    assert ga.a0_series(11).integer_coefficients()[1:] == reference.AK_ROWS[0]
    assert ga.a0_checks(30).ok


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=0.12, allow_nan=False, allow_infinity=False))
def test_a0_closed_form_solves_cubic(z):
    w = ga.a0_eval(z)
    assert abs(z * (1 + w) ** 3 - w) < 1e-12


def test_a0_eval_extended_precision_and_warning():
    assert abs(ga.a0_eval(0.05, precision=1e-25) - ga.a0_eval(0.05)) < 1e-15
    with pytest.warns(RuntimeWarning):
        ga.a0_eval(0.2)


def test_printed_rows_and_dual_route():
    rows = ga.ak_coefficient_table(3, 11)
    assert [r[1:] for r in rows] == reference.AK_ROWS
    for k in range(4):
        assert ga.ak_series(k, 11).integer_coefficients() == ga.ak_series_direct(k, 11).integer_coefficients()


def test_first_two_columns_for_k_up_to_30():
    big = ga.ak_coefficient_table(30, 2)
    assert all(big[k][1] == 1 and big[k][2] == 4 ** (k + 1) - 1 for k in range(31))


def test_closed_forms_for_k_1_2():
    rows = ga.ak_coefficient_table(2, 25)
    for n in range(1, 26):
        assert ga.a1n_closed(n) == rows[1][n]
        assert ga.a2n_closed(n) == rows[2][n]


def test_hyp2f1_terminating_against_mpmath():
    for n in range(1, 8):
        exact = ga.hyp2f1_terminating(1, -n, 2 * n + 2, -2)
        assert abs(float(exact) - float(mpmath.hyp2f1(1, -n, 2 * n + 2, -2))) < 1e-12
    with pytest.raises(ValueError):
        ga.hyp2f1_terminating(1, 2, 3, 1)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_rational_form_matches_series(k):
    z = 0.02
    w = ga.a0_eval(z)
    R = ga.ak_rational(k).R
    closed = -w * (1 + w) ** (2 * k + 2) * R(complex(w)) / (-1 + 2 * w) ** (5 * k - 1)
    summed = sum(float(c) * z**n for n, c in enumerate(ga.ak_series(k, 60).coefficients))
    assert abs(closed - (-1) ** k * summed) < 1e-12 * abs(summed)


def test_inverse_one_minus_two_a0():
    assert ga.inverse_one_minus_two_a0(12).integer_coefficients() == [ga.central_binomial_3(n) for n in range(13)]


def test_laurent_bridge_and_numerator_rebuild():
    t = compute_u_table(20)
    for n in range(1, 21):
        assert ga.laurent_identity_check(t, n, 10).ok
        pk = ga.pk_from_Ak(n)
        assert pk.vanishing_ok
        assert pk.p_ascending == t.decomposition(n).p_coeffs
    with pytest.raises(ValueError):
        ga.pk_from_Ak(5, K=1)


def test_q_polynomial_is_denominator_reversed():
    t = compute_u_table(6)
    for n in range(1, 7):
        den = t[n].denominator.expand().coeffs
        assert ga.q_polynomial(n) == [int(c) for c in reversed(den)]


@pytest.mark.parametrize("k", [1, 2])
def test_growth(k):
    rep = ga.growth_checks(k, 60)
    assert rep.ok, str(rep)


def test_k_limit_and_exponents():
    rows = ga.ak_coefficient_table(40, 3)
    for n in (2, 3):
        ratios = [Fraction(rows[k][n], n ** (2 * k)) for k in range(41)]
        assert all(a < b for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] < ga.k_limit(n)
        assert abs(float(ratios[-1] / ga.k_limit(n)) - 1) < 1e-3
    exps = ga.k_asymptotic_exponents(3, 12)
    assert all(e > 0 for e in exps)


def test_bfile_format():
    buf = io.StringIO()
    ga.write_bfile(1, 5, buf)
    assert buf.getvalue().splitlines() == [f"{n} {v}" for n, v in enumerate(reference.AK_ROWS[1][:5], start=1)]


def test_inequality_audit_and_truncations():
    rep = ga.pmn1_inequality_audit()
    assert rep.ok, str(rep)
    assert ga.x_seq(38) < 1 < ga.x_seq(39)
    assert ga.delta_y_closed(13) < 1 < ga.delta_y_closed(14)
    for n, s in reference.PMN1_GAPS.items():
        gap = ga.y_seq(n) + ga.z_seq(n) - (n + 1)
        assert math.floor(float(gap) * 1000) / 1000 == float(s)


def test_argument_validation():
    for bad in (lambda: ga.a0_series(0), lambda: ga.ak_tower(-1), lambda: ga.ak_rational(0),
                lambda: ga.a1n_closed(0), lambda: ga.a2n_closed(0), lambda: ga.k_asymptotic_exponents(1, 3)):
        with pytest.raises(ValueError):
            bad()
