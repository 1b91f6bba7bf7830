import cmath
import io
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dp3lab import numerics as nm

from test_coeffs import recurrence_values


def test_series_coefficients_against_float_recurrence():
    a = 0.3 - 0.7j
    ev = nm.SolutionEvaluator(a, 1.0, horizon=20)
    u = [complex(0)] * 21
    s = a * a
    u[1] = 1 / (s + 1)
    for n in range(2, 21):
        acc = 3 * u[n - 1] + 3 * sum(u[j] * u[n - 1 - j] for j in range(1, n - 1))
        acc += sum(u[i] * u[j] * u[n - 1 - i - j] for i in range(1, n - 1) for j in range(1, n - 1 - i))
        acc -= sum((n - 2 * j) ** 2 * u[j] * u[n - j] for j in range(1, n) if 2 * j < n)
        u[n] = acc / (s + n * n)
    assert np.allclose(ev.coefficients, u[1:], rtol=1e-13, atol=0)


def test_exact_rational_a_gives_exact_coefficients():
    ev = nm.SolutionEvaluator(Fraction(-2, 3), 1.0, horizon=12)
    want = recurrence_values(Fraction(4, 9), 12)
    assert ev.coefficients == [complex(float(w)) for w in want]


def test_series_solves_the_ode():
    ev = nm.SolutionEvaluator(-0.4 + 0.2j, 0.7)
    tau = 0.6 * ev.seed_radius
    h = 1e-4
    u0, p0 = nm.eval_series_with_derivative(ev, tau)
    up, pp = nm.eval_series_with_derivative(ev, tau + h)
    um, pm = nm.eval_series_with_derivative(ev, tau - h)
    assert abs((up - um) / (2 * h) - p0) < 1e-7 * abs(p0)
    d2 = (pp - pm) / (2 * h)
    assert abs(d2 - nm.dp3_rhs(tau, u0, p0, ev.a, ev.b)) < 1e-6 * abs(d2)


params = st.tuples(
    st.floats(-2, 2), st.floats(-0.9, 0.9), st.floats(0.1, 5)
).filter(lambda t: abs(t[0]) > 0.05 or abs(t[1]) > 0.05)


@settings(max_examples=20, deadline=None)
@given(params)
def test_series_ode_agreement_random(p):
    ev = nm.SolutionEvaluator(complex(p[0], p[1]), p[2])
    assert nm.series_ode_agreement(ev) < 1e-9


@pytest.mark.parametrize("a,b", [(-0.5, 1.0), (0.3j, 0.5), (-1.2 + 0.4j, 2.0)])
def test_oddness(a, b):
    assert nm.oddness_check(nm.SolutionEvaluator(a, b), 4.0) < 1e-9


@pytest.mark.parametrize("a,b", [(-0.5, 1.0), (-0.3 + 0.2j, 0.5)])
def test_rotation_symmetry(a, b):
    assert nm.rotation_check(nm.SolutionEvaluator(a, b), 3.0) < 1e-8


def test_extended_precision_agrees():
    ev = nm.SolutionEvaluator(Fraction(-2, 3), 1 / 8)
    hi = nm.eval_ode_mp(ev, 3.0, dps=25)
    assert abs(complex(hi) - nm.eval_ode(ev, 3.0)) < 1e-10 * abs(complex(hi))


def test_local_defect_is_within_tolerance():
    ev = nm.SolutionEvaluator(-0.5, 1.0)
    path = nm.integrate(ev, 30.0)
    assert nm.ode_defect(path) < 10 * ev.rtol


def test_pole_detection():
    with pytest.raises(nm.PoleEncountered) as info:
        nm.eval_ode(nm.SolutionEvaluator(2.0, 1.0), 10.0)
    assert 2.5 < info.value.tau_pole.real < 3.3


def test_domain_errors():
    ev = nm.SolutionEvaluator(-0.5, 1.0)
    with pytest.raises(nm.SeriesDomainError):
        nm.eval_series(ev, 2 * ev.seed_radius)
    with pytest.raises(nm.SeriesDomainError):
        nm.integrate(ev, 5.0, rho_seed=2 * ev.seed_radius)
    with pytest.raises(ValueError):
        nm.SolutionEvaluator(2j, 1.0)
    with pytest.raises(ValueError):
        nm.SolutionEvaluator(0.5, 0)


@given(st.floats(0.01, 0.99))
def test_gates_for_imaginary(alpha):
    strict, weak = nm.gates_for_imaginary(alpha)
    assert weak
    if abs(alpha - 1 / 6) > 1e-9 and abs(alpha - 5 / 6) > 1e-9:
        assert strict == (1 / 6 < alpha < 5 / 6)


def test_gate_violations():
    with pytest.raises(nm.GateViolation, match="strict gate"):
        nm.AsymptoticEvaluator.for_parameters(0.95j, 1.0, gate="strict")
    with pytest.raises(nm.GateViolation, match=r"\|Im a\| < 1"):
        nm.AsymptoticEvaluator.for_parameters(1.5j, 1.0)
    with pytest.raises(ValueError):
        nm.AsymptoticEvaluator.for_parameters(-0.5, -1.0)


@pytest.mark.parametrize("a,form", [(0.3j, "imaginary_a"), (0.7j, "imaginary_a"), (0.5j, "suleimanov"),
                                    (-0.5, "negative_a"), (-2.0, "negative_a")])
def test_special_forms_equal_general(a, form):
    ae = nm.AsymptoticEvaluator.for_parameters(a, 0.8)
    taus = np.linspace(5, 200, 50)
    general = nm.u_asymptotic(ae, taus, "general")
    special = nm.u_asymptotic(ae, taus, form)
    assert np.max(np.abs(general - special)) < 1e-12 * np.max(np.abs(general))
    assert nm.natural_form(a) == form


def test_literal_shift_flips_the_oscillation():
    ae = nm.AsymptoticEvaluator.for_parameters(-0.5, 0.8)
    p = ae.params
    taus = np.linspace(5, 50, 20)
    th = ae.theta(taus)
    osc = lambda z: cmath.sqrt(p.nu_plus_1) * cmath.exp(0.75j * math.pi) * np.cosh(1j * th + p.nu_plus_1 * np.log(th) + z)  # noqa: E731
    assert np.allclose(osc(p.printed_z_shift), -osc(p.z_shift))


@pytest.mark.parametrize("a", [-0.3 + 0.2j, -1 + 0.5j])
def test_general_form_tracks_the_solution(a):
    ev = nm.SolutionEvaluator(a, 1.0)
    ae = nm.AsymptoticEvaluator.for_parameters(a, 1.0, gate="strict")
    cmp = nm.compare_asymptotics(ev, ae, (10, 80), samples=300, form="general")
    assert cmp.report.ok
    assert cmp.sup_error(40, 80) < 0.06


def test_negative_a_error_decays_like_cube_root():
    ev = nm.SolutionEvaluator(Fraction(-2, 3), 1 / 8)
    ae = nm.AsymptoticEvaluator.for_parameters(ev.a, 1 / 8)
    cmp = nm.compare_asymptotics(ev, ae, (10, 160), samples=1600)
    assert 0.2 < nm.decay_exponent(cmp) < 0.5


def test_comparison_csv_is_reproducible():
    ev = nm.SolutionEvaluator(-0.5, 1.0)
    ae = nm.AsymptoticEvaluator.for_parameters(-0.5, 1.0)
    out = []
    for _ in range(2):
        buf = io.StringIO()
        nm.compare_asymptotics(ev, ae, (5, 20), samples=50).write_csv(buf)
        out.append(buf.getvalue())
    assert out[0] == out[1]
    assert out[0].splitlines()[0] == "tau,re_u,im_u,re_u_as,im_u_as,abs_err"
    assert "np.float64" not in out[0]


def test_suleimanov_fit():
    b = 1.0
    ev = nm.SolutionEvaluator((0, 0.5), b)
    taus = np.linspace(20, 200, 4000)
    u = nm.eval_u(ev, taus)
    fit = nm.fit_oscillation(taus, -u.imag, b, log_coefficient=-math.log(2) / (2 * math.pi))
    assert abs(fit.amplitude / nm.suleimanov_amplitude(b) - 1) < 0.05
    assert abs(fit.frequency / (3**1.5 * b ** (1 / 3)) - 1) < 0.01


@pytest.mark.parametrize("a,b", [(Fraction(-2, 3), 1 / 8), (Fraction(-1, 2), 1.0), (Fraction(-1, 5), 2.0)])
def test_negative_a_frequency(a, b):
    ev = nm.SolutionEvaluator(a, b)
    taus = np.linspace(4, 40, 3000)
    u = nm.eval_u(ev, taus)
    lg = math.log1p(-math.exp(2 * math.pi * float(a)))
    fit = nm.fit_oscillation(taus, u.real - b ** (2 / 3) / 2 * taus ** (1 / 3), b, -lg / (2 * math.pi), trend=True)
    assert abs(fit.frequency / (3**1.5 * b ** (1 / 3)) - 1) < 0.01


@pytest.mark.parametrize("name", sorted(nm.FIGURE_PARAMETERS))
def test_positivity(name):
    a, b = nm.FIGURE_PARAMETERS[name]
    assert nm.positivity_scan(nm.SolutionEvaluator(a, b), 40).ok


def test_positivity_requires_admissible_a():
    with pytest.raises(ValueError):
        nm.positivity_scan(nm.SolutionEvaluator(0.5, 1.0), 5)


def test_eval_ratfunc_exact():
    from dp3lab.coeffs import compute_u_table

    f = compute_u_table(3)[3]
    re, im = nm.eval_ratfunc(f, (Fraction(1, 2), Fraction(1, 3)))
    z = mpmath.mpc(0.5, 1 / 3)
    want = complex((18 + 12 * z) / ((z + 1) ** 2 * (z + 4) * (z + 9)))
    assert abs(complex(float(re), float(im)) - want) < 1e-15
