"""Floating-point evaluation of the vanishing odd solution u(tau; a, b).

Near the origin u is summed from the exact Taylor coefficients; further out
the equation

    u'' = u'^2/u - u'/tau + (-8 u^2 + 2ab)/tau + b^2/u

is integrated along a ray with an adaptive embedded Runge-Kutta pair.  Large
tau behaviour is compared with the leading oscillatory asymptotics that are
parameterized by the monodromy data of the solution.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import IO, Sequence

import mpmath
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import curve_fit

from .coeffs import CoeffTable, compute_u_table
from .exact import RatFuncS
from .report import Report

SERIES_MARGIN = 0.25


class SeriesDomainError(ValueError):
    """tau lies outside the disc where the Taylor series is used."""


class PoleEncountered(RuntimeError):
    def __init__(self, tau, tau_pole):
        super().__init__(f"pole near tau = {tau_pole:.6g} (integration stopped at {tau:.6g})")
        self.tau = tau
        self.tau_pole = tau_pole


class GateViolation(ValueError):
    """The monodromy data fall outside the region where the asymptotics hold."""


# ---------------------------------------------------------------------------
# exact coefficients at a numeric parameter
# ---------------------------------------------------------------------------

_GQ = tuple[Fraction, Fraction]  # Gaussian rational (re, im)


def _gq(x) -> _GQ:
    if isinstance(x, tuple):
        return Fraction(x[0]), Fraction(x[1])
    if isinstance(x, complex):
        return Fraction(x.real), Fraction(x.imag)
    return Fraction(x), Fraction(0)


def _gmul(x: _GQ, y: _GQ) -> _GQ:
    return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]


def _gdiv(x: _GQ, y: _GQ) -> _GQ:
    n = y[0] ** 2 + y[1] ** 2
    if n == 0:
        raise ZeroDivisionError("pole of a Taylor coefficient")
    return (x[0] * y[0] + x[1] * y[1]) / n, (x[1] * y[0] - x[0] * y[1]) / n


def eval_ratfunc(f: RatFuncS, s: _GQ) -> _GQ:
    """f(s) computed exactly in Gaussian rationals."""
    acc: _GQ = (Fraction(0), Fraction(0))
    for c in reversed(f.numerator.coeffs):
        acc = _gmul(acc, s)
        acc = (acc[0] + c, acc[1])
    den: _GQ = (Fraction(1), Fraction(0))
    for k, e in f.denominator.items():
        lin = (s[0] + k * k, s[1])
        for _ in range(e):
            den = _gmul(den, lin)
    return _gdiv(acc, den)


@lru_cache(maxsize=4)
def _table(N: int) -> CoeffTable:
    return compute_u_table(N)


def _to_complex(z: _GQ) -> complex:
    return complex(float(z[0]), float(z[1]))


def _in_imaginary_integers(a: complex) -> bool:
    return abs(a.real) < 1e-14 and abs(a.imag - round(a.imag)) < 1e-14


# ---------------------------------------------------------------------------
# the solution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolutionEvaluator:
    """u(tau; a, b) with Taylor data up to u_{2*horizon}.

    ``a`` may be a complex number, a Fraction or a pair of Fractions
    (real, imaginary); exact input keeps the coefficient evaluation exact.
    """

    a_exact: _GQ
    b: complex
    horizon: int = 40
    rtol: float = 1e-10

    def __init__(self, a, b, horizon: int = 40, rtol: float = 1e-10):
        object.__setattr__(self, "a_exact", _gq(a))
        object.__setattr__(self, "b", complex(b))
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "rtol", rtol)
        if self.b == 0:
            raise ValueError("b must be nonzero")
        if _in_imaginary_integers(self.a):
            raise ValueError(f"a = {self.a}: the solution vanishing at the origin does not exist for a in iZ")

    @property
    def a(self) -> complex:
        return _to_complex(self.a_exact)

    @cached_property
    def coefficients(self) -> list[complex]:
        """u_{2n}(a) for n = 1..horizon."""
        s = _gmul(self.a_exact, self.a_exact)
        table = _table(self.horizon)
        return [_to_complex(eval_ratfunc(table[n], s)) for n in range(1, self.horizon + 1)]

    @property
    def seed_radius(self) -> float:
        """Largest |tau| with |b tau^2 / a| = 1/4."""
        return math.sqrt(SERIES_MARGIN * abs(self.a / self.b))

    def with_a(self, a) -> "SolutionEvaluator":
        return SolutionEvaluator(a, self.b, self.horizon, self.rtol)


def _series_terms(ev: SolutionEvaluator, tau: complex, tol: float):
    x = ev.b * tau * tau / ev.a
    if abs(x) > SERIES_MARGIN * (1 + 1e-12):
        raise SeriesDomainError(f"|b tau^2/a| = {abs(x):.3g} > {SERIES_MARGIN}: use ODE continuation")
    s, ds = 1 + 0j, 1 + 0j
    xn = 1 + 0j
    mags: list[float] = []
    for n, c in enumerate(ev.coefficients, start=1):
        xn *= x
        t = c * xn
        s += t
        ds += (2 * n + 1) * t
        mags.append(abs(t))
        if n >= 4:
            ratios = [mags[i] / mags[i - 1] for i in range(n - 3, n) if mags[i - 1] > 0]
            r = max(ratios) if ratios else 0.0
            if r < 1 and mags[-1] * r / (1 - r) * (2 * n + 3) < 0.1 * tol * max(abs(s), 1e-300):
                return s, ds
    raise ArithmeticError(f"Taylor horizon {ev.horizon} too short for tolerance {tol:g} at tau={tau}")


def eval_series(ev: SolutionEvaluator, tau: complex, tol: float = 1e-15) -> complex:
    """u(tau) from the Taylor expansion, refused outside |b tau^2/a| <= 1/4."""
    if tau == 0:
        return 0j
    s, _ = _series_terms(ev, complex(tau), tol)
    return -ev.b / (2 * ev.a) * tau * s


def eval_series_with_derivative(ev: SolutionEvaluator, tau: complex, tol: float = 1e-15) -> tuple[complex, complex]:
    lead = -ev.b / (2 * ev.a)
    if tau == 0:
        return 0j, lead
    s, ds = _series_terms(ev, complex(tau), tol)
    return lead * tau * s, lead * ds


def dp3_rhs(tau: complex, u: complex, p: complex, a: complex, b: complex) -> complex:
    return p * p / u - p / tau + (-8 * u * u + 2 * a * b) / tau + b * b / u


@dataclass
class OdePath:
    """Dense solution along tau = rho * exp(i theta), rho in [rho0, rho1]."""

    ev: SolutionEvaluator
    theta: float
    rho0: float
    rho1: float
    sol: object = field(repr=False)

    def __call__(self, rho) -> np.ndarray:
        return self.sol.sol(rho)[0]

    def state(self, rho) -> np.ndarray:
        return self.sol.sol(rho)


def integrate(
    ev: SolutionEvaluator,
    rho_target: float,
    rho_seed: float | None = None,
    theta: float = 0.0,
    rtol: float | None = None,
    pole_scale: float = 1e8,
) -> OdePath:
    """Integrate from the Taylor seed at rho_seed*e^{i theta} out to rho_target."""
    rtol = ev.rtol if rtol is None else rtol
    rho_seed = ev.seed_radius if rho_seed is None else rho_seed
    if rho_seed <= 0 or rho_seed > ev.seed_radius * (1 + 1e-12):
        raise SeriesDomainError("seed point must lie inside the Taylor disc")
    rot = cmath.exp(1j * theta)
    u0, p0 = eval_series_with_derivative(ev, rot * rho_seed, tol=rtol)
    a, b = ev.a, ev.b
    scale = max(abs(u0), 1.0)

    def f(rho, y):
        tau = rot * rho
        u, p = y
        return [rot * p, rot * dp3_rhs(tau, u, p, a, b)]

    def blowup(rho, y):
        return pole_scale * scale - abs(y[0])

    def vanish(rho, y):
        return abs(y[0]) - 1e-12 * scale

    blowup.terminal = vanish.terminal = True
    sol = solve_ivp(
        f,
        (rho_seed, rho_target),
        np.array([u0, p0], dtype=complex),
        method="DOP853",
        rtol=rtol,
        atol=rtol * 1e-3 * scale,
        dense_output=True,
        events=(blowup, vanish),
    )
    if sol.status == 1 or not sol.success:
        rho = float(sol.t[-1])
        u, p = sol.y[:, -1]
        tau = rot * rho
        if sol.t_events[1].size:
            raise PoleEncountered(tau, tau)
        raise PoleEncountered(tau, tau + 2 * u / p)
    return OdePath(ev, theta, rho_seed, rho_target, sol)


def eval_ode(ev: SolutionEvaluator, tau_target: float, tau_seed: float | None = None) -> complex:
    """u at a real tau_target (either sign) by continuation from the Taylor seed."""
    theta = 0.0 if tau_target >= 0 else math.pi
    rho = abs(tau_target)
    seed = ev.seed_radius if tau_seed is None else abs(tau_seed)
    if rho <= seed:
        return eval_series(ev, tau_target)
    return complex(integrate(ev, rho, seed, theta)(rho))


def eval_u(ev: SolutionEvaluator, taus: Sequence[float], theta: float = 0.0) -> np.ndarray:
    """u at rho*e^{i theta} for each rho in taus (series inside the disc, ODE outside)."""
    rhos = np.asarray(taus, dtype=float)
    out = np.empty(rhos.shape, dtype=complex)
    rot = cmath.exp(1j * theta)
    seed = ev.seed_radius
    inside = rhos <= seed
    for i in np.flatnonzero(inside):
        out[i] = eval_series(ev, rot * rhos[i])
    if (~inside).any():
        path = integrate(ev, float(rhos.max()), seed, theta)
        out[~inside] = path(rhos[~inside])
    return out


def _mpc(z: _GQ) -> mpmath.mpc:
    return mpmath.mpc(mpmath.mpf(z[0].numerator) / z[0].denominator, mpmath.mpf(z[1].numerator) / z[1].denominator)


def eval_ode_mp(ev: SolutionEvaluator, tau_target: float, dps: int = 30) -> mpmath.mpc:
    """Extended-precision continuation along the positive axis (Taylor method)."""
    with mpmath.workdps(dps):
        seed = mpmath.mpf(ev.seed_radius)
        a, b = _mpc(ev.a_exact), mpmath.mpc(ev.b)
        x = b * seed**2 / a
        s = ds = mpmath.mpc(1)
        s_val = _gmul(ev.a_exact, ev.a_exact)
        table = _table(ev.horizon)
        for n in range(1, ev.horizon + 1):
            t = _mpc(eval_ratfunc(table[n], s_val)) * x**n
            s += t
            ds += (2 * n + 1) * t
        lead = -b / (2 * a)
        y0 = [lead * seed * s, lead * ds]

        def F(t, y):
            u, p = y
            return [p, p * p / u - p / t + (-8 * u * u + 2 * a * b) / t + b * b / u]

        return mpmath.odefun(F, seed, y0)(mpmath.mpf(tau_target))[0]


def ode_defect(path: OdePath, factor: float = 1e-3) -> float:
    """Largest relative local defect: each accepted step is redone at a tighter tolerance."""
    ev = path.ev
    rot = cmath.exp(1j * path.theta)
    a, b = ev.a, ev.b
    rtol = ev.rtol * factor

    def f(rho, y):
        return [rot * y[1], rot * dp3_rhs(rot * rho, y[0], y[1], a, b)]

    steps = path.sol.t
    worst = 0.0
    for r0, r1 in zip(steps, steps[1:]):
        y0 = path.state(r0)
        local = solve_ivp(f, (r0, r1), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-3)
        ref = local.y[:, -1]
        got = path.state(r1)
        worst = max(worst, float(np.linalg.norm(got - ref) / np.linalg.norm(ref)))
    return worst


# ---------------------------------------------------------------------------
# monodromy data and asymptotics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonodromyParams:
    a: complex
    s00: complex
    g11g22: complex
    g11g12: complex
    nu_plus_1: complex
    log_branch: int
    z_shift: complex

    @property
    def omega(self) -> complex:
        return self.g11g12

    @property
    def gate_value(self) -> float:
        return abs(self.nu_plus_1.real)

    @property
    def printed_z_shift(self) -> complex:
        """Shift with log(omega ...) taken literally; the oscillation then has the wrong sign."""
        return self.z_shift - 1j * math.pi


def monodromy_params(a: complex) -> MonodromyParams:
    a = complex(a)
    if _in_imaginary_integers(a):
        raise ValueError(f"a = {a}: solution does not exist for a in iZ")
    e = cmath.exp(2 * math.pi * a)
    g11g22 = 1 / (1 - e)
    g11g12 = 1j * cmath.exp(math.pi * a) * g11g22
    L = cmath.log(g11g22)
    k = round((1j * L / (2 * math.pi)).real)
    nu1 = 1j * (L + 2j * math.pi * k) / (2 * math.pi)
    nu1 = complex(nu1.real - 0.0, nu1.imag)
    z = (
        math.log(2 * math.pi) / 2
        - math.pi * 1j / 2
        - 1.5j * math.pi * nu1
        + 1j * a * math.log(2 + math.sqrt(3))
        + nu1 * math.log(12)
        - cmath.log(-g11g12 * cmath.sqrt(nu1) * complex(mpmath.gamma(nu1)))
    )
    return MonodromyParams(a, 2j * cmath.cosh(math.pi * a), g11g22, g11g12, nu1, -k, z)


def check_gate(params: MonodromyParams, gate: str = "strict") -> None:
    if abs(params.a.imag) >= 1:
        raise GateViolation(f"|Im a| < 1 violated (a = {params.a})")
    if gate == "strict" and not params.gate_value < 1 / 6:
        raise GateViolation(f"strict gate |Re(i/2pi ln(g11 g22))| < 1/6 violated: value {params.gate_value:.4g}")
    if gate == "weak" and not params.gate_value < 1 / 2:
        raise GateViolation(f"weak gate |Re(i/2pi ln(g11 g22))| < 1/2 violated: value {params.gate_value:.4g}")
    if gate not in ("strict", "weak"):
        raise ValueError("gate must be 'strict' or 'weak'")


def gates_for_imaginary(alpha: float) -> tuple[bool, bool]:
    """(strict, weak) gate verdicts for a = i*alpha."""
    p = monodromy_params(1j * alpha)
    return p.gate_value < 1 / 6, p.gate_value < 1 / 2 and abs(alpha) < 1


@dataclass(frozen=True)
class AsymptoticEvaluator:
    params: MonodromyParams
    b: float
    gate: str = "weak"

    def __post_init__(self):
        if not (isinstance(self.b, (int, float)) and self.b > 0):
            raise ValueError("the asymptotics need real b > 0")
        check_gate(self.params, self.gate)

    @classmethod
    def for_parameters(cls, a, b: float, gate: str = "weak") -> "AsymptoticEvaluator":
        return cls(monodromy_params(complex(a)), float(b), gate)

    def theta(self, tau):
        return 3**1.5 * self.b ** (1 / 3) * np.asarray(tau, dtype=float) ** (2 / 3)

    @property
    def amplitude(self) -> float:
        """Modulus of the oscillating part of u_as when Re(nu+1) = 0."""
        return self.b**0.5 / 3**0.25 * abs(cmath.sqrt(self.params.nu_plus_1))


def _u_general(ae: AsymptoticEvaluator, tau):
    p = ae.params
    th = ae.theta(tau)
    nu1 = p.nu_plus_1
    pref = ae.b**0.5 / 3**0.25
    arg = 1j * th + nu1 * np.log(th) + p.z_shift
    return pref * (np.sqrt(th / 12) + cmath.sqrt(nu1) * cmath.exp(0.75j * math.pi) * np.cosh(arg))


def _u_imaginary(ae: AsymptoticEvaluator, tau):
    alpha = ae.params.a.imag
    if abs(ae.params.a.real) > 0 or not (0 < alpha < 0.5 or 0.5 < alpha < 1):
        raise ValueError("imaginary_a form needs a = i*alpha with alpha in (0,1/2) or (1/2,1)")
    b = ae.b
    L = math.log(2 * math.sin(math.pi * alpha))
    d = alpha - 0.5
    nu1 = 0.5 * math.sqrt(d * d + L * L / math.pi**2)
    psi = -0.5 * math.atan(L / (math.pi * d)) + math.pi / 4 * (math.copysign(1, d) - 1)
    g = complex(mpmath.gamma(0.5 * d - 1j * L / (2 * math.pi)))
    chi0 = (
        math.log(2 * math.pi) / 2 + L / 4 - alpha * math.log(2 + math.sqrt(3)) + math.log(12) / 2 * d
        - math.log(math.sqrt(nu1) * abs(g))
    )
    phi0 = math.pi / 2 - psi - 0.75 * math.pi * d - math.log(12) / (2 * math.pi) * L - cmath.phase(g)
    th = ae.theta(tau)
    chi = 0.5 * d * np.log(th) + chi0
    phi = th - L / (2 * math.pi) * np.log(th) + phi0
    pref = b**0.5 / 3**0.25 * math.sqrt(nu1)
    s, c = math.sin(math.pi / 4 + psi), math.cos(math.pi / 4 + psi)
    re = b ** (2 / 3) / 2 * np.asarray(tau, dtype=float) ** (1 / 3) + pref * (
        s * np.cosh(chi) * np.cos(phi) + c * np.sinh(chi) * np.sin(phi)
    )
    im = pref * (s * np.sinh(chi) * np.sin(phi) - c * np.cosh(chi) * np.cos(phi))
    return re + 1j * im


def suleimanov_phase(b: float, tau):
    L2 = math.log(2)
    phi0 = 0.75 * math.pi - L2 * math.log(12) / (2 * math.pi) - cmath.phase(complex(mpmath.gamma(-1j * L2 / (2 * math.pi))))
    th = 3**1.5 * b ** (1 / 3) * np.asarray(tau, dtype=float) ** (2 / 3)
    return th - L2 / (2 * math.pi) * np.log(th) + phi0


def suleimanov_amplitude(b: float) -> float:
    return math.sqrt(b * math.sqrt(3) * math.log(2) / (4 * math.pi))


def _u_suleimanov(ae: AsymptoticEvaluator, tau):
    alpha = ae.params.a.imag
    if abs(ae.params.a.real) > 0 or abs(abs(alpha) - 0.5) > 1e-15:
        raise ValueError("suleimanov form needs a = +-i/2")
    b = ae.b
    phi = suleimanov_phase(b, tau)
    re = b ** (2 / 3) / 2 * np.asarray(tau, dtype=float) ** (1 / 3) - math.sqrt(
        b * math.log(2) / (4 * math.pi * math.sqrt(3))
    ) * np.sin(phi)
    im = -math.copysign(1, alpha) * suleimanov_amplitude(b) * np.cos(phi)
    return re + 1j * im


def _u_negative(ae: AsymptoticEvaluator, tau):
    a = ae.params.a
    if a.imag != 0 or not a.real < 0:
        raise ValueError("negative_a form needs real a < 0")
    a = a.real
    b = ae.b
    lg = math.log1p(-math.exp(2 * math.pi * a))
    g = complex(mpmath.gamma(-1j * lg / (2 * math.pi)))
    phi0 = a * math.log(2 + math.sqrt(3)) - math.log(12) * lg / (2 * math.pi) - math.pi / 4 - cmath.phase(g)
    th = 3**1.5 * b ** (1 / 3) * np.asarray(tau, dtype=float) ** (2 / 3)
    amp = b**0.5 / 3**0.25 * math.sqrt(-lg / (2 * math.pi))
    return b ** (2 / 3) / 2 * np.asarray(tau, dtype=float) ** (1 / 3) - amp * np.cos(th - lg / (2 * math.pi) * np.log(th) + phi0)


_FORMS = {"general": _u_general, "imaginary_a": _u_imaginary, "suleimanov": _u_suleimanov, "negative_a": _u_negative}


def u_asymptotic(ae: AsymptoticEvaluator, tau, form: str = "general"):
    """Leading large-tau term u_as(tau); array in, array out."""
    try:
        fn = _FORMS[form]
    except KeyError:
        raise ValueError(f"unknown form {form!r}; choose from {sorted(_FORMS)}") from None
    out = fn(ae, tau)
    return complex(out) if np.ndim(tau) == 0 else np.asarray(out, dtype=complex)


def natural_form(a: complex) -> str:
    a = complex(a)
    if a.imag == 0 and a.real < 0:
        return "negative_a"
    if a.real == 0 and abs(abs(a.imag) - 0.5) < 1e-15:
        return "suleimanov"
    if a.real == 0 and 0 < a.imag < 1:
        return "imaginary_a"
    return "general"


# ---------------------------------------------------------------------------
# comparisons and scans
# ---------------------------------------------------------------------------


@dataclass
class Comparison:
    taus: np.ndarray
    u: np.ndarray
    u_as: np.ndarray
    report: Report

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.u - self.u_as)

    def sup_error(self, lo: float, hi: float) -> float:
        m = (self.taus >= lo) & (self.taus <= hi)
        return float(self.abs_err[m].max())

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau", "re_u", "im_u", "re_u_as", "im_u_as", "abs_err"])
        for t, u, v, e in zip(self.taus, self.u, self.u_as, self.abs_err):
            w.writerow([repr(float(x)) for x in (t, u.real, u.imag, v.real, v.imag, e)])


def compare_asymptotics(
    ev: SolutionEvaluator,
    ae: AsymptoticEvaluator,
    window: tuple[float, float],
    samples: int = 400,
    form: str | None = None,
) -> Comparison:
    T1, T2 = window
    if not 0 < T1 < T2:
        raise ValueError("window must satisfy 0 < T1 < T2")
    form = natural_form(ev.a) if form is None else form
    taus = np.linspace(T1, T2, samples)
    u = eval_u(ev, taus)
    ua = u_asymptotic(ae, taus, form)
    cmp = Comparison(taus, u, ua, Report(f"u against u_as ({form}) for a={ev.a:.6g}, b={ev.b.real:.6g} on [{T1:g}, {T2:g}]"))
    rep = cmp.report
    sup = float(cmp.abs_err.max())
    rep.note(f"sup |u - u_as| = {sup:.4g}; relative to oscillation amplitude {sup / max(ae.amplitude, 1e-300):.4g}")
    T = T1
    windows = []
    while 4 * T <= T2 * (1 + 1e-12):
        windows.append((T, 2 * T, 4 * T))
        T *= 2
    for lo, mid, hi in windows:
        e1, e2 = cmp.sup_error(lo, mid), cmp.sup_error(mid, hi)
        rep.add(f"error decreases from [{lo:g},{mid:g}] to [{mid:g},{hi:g}]", e2 < e1, f"{e1:.4g} -> {e2:.4g}")
    if len(windows) >= 1:
        exps = decay_exponent(cmp)
        rep.note(f"empirical decay exponent of the window sup-error: {exps:.3f}")
    return cmp


def decay_exponent(cmp: Comparison, pieces: int = 6) -> float:
    edges = np.geomspace(cmp.taus[0], cmp.taus[-1], pieces + 1)
    mids = np.sqrt(edges[:-1] * edges[1:])
    sups = np.array([cmp.sup_error(lo, hi) for lo, hi in zip(edges, edges[1:])])
    slope = np.polyfit(np.log(mids), np.log(sups), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class OscillationFit:
    amplitude: float
    frequency: float
    log_coefficient: float
    phase: float
    residual: float


def fit_oscillation(
    taus: np.ndarray, values: np.ndarray, b: float, log_coefficient: float = 0.0, trend: bool = False
) -> OscillationFit:
    """Least-squares A*cos(w t + c ln t + p) in t = tau^(2/3); w is compared with 3^(3/2) b^(1/3).

    With ``trend`` a slowly varying background d0 + d1*tau^(-1/3) is fitted alongside.
    """
    t = np.asarray(taus, dtype=float) ** (2 / 3)
    y = np.asarray(values, dtype=float)
    w0 = 3**1.5 * b ** (1 / 3)

    if trend:

        def model(t, A, w, c, p, d0, d1):
            return A * np.cos(w * t + c * np.log(t) + p) + d0 + d1 / np.sqrt(t)

        y0 = y - np.polyval(np.polyfit(1 / np.sqrt(t), y, 1), 1 / np.sqrt(t))
    else:

        def model(t, A, w, c, p):
            return A * np.cos(w * t + c * np.log(t) + p)

        y0 = y
    A0 = float(np.sqrt(2) * np.std(y0))
    best = None
    for p0 in np.linspace(0, 2 * math.pi, 8, endpoint=False):
        guess = [A0, w0, log_coefficient, p0] + ([0.0, 0.0] if trend else [])
        try:
            popt, _ = curve_fit(model, t, y, p0=guess, maxfev=20000)
        except RuntimeError:
            continue
        res = float(np.sqrt(np.mean((model(t, *popt) - y) ** 2)))
        if best is None or res < best[1]:
            best = (popt, res)
    if best is None:
        raise ArithmeticError("oscillation fit did not converge")
    popt, res = best
    A, w, c, p = popt[:4]
    if A < 0:
        A, p = -A, p + math.pi
    return OscillationFit(float(A), float(w), float(c), float(p % (2 * math.pi)), res)


def positivity_scan(ev: SolutionEvaluator, tau_max: float, grid: int = 2000, tau_min: float = 0.01) -> Report:
    rep = Report(f"Re u > 0 on [{tau_min:g}, {tau_max:g}] for a={ev.a:.6g}, b={ev.b:.6g}")
    a = ev.a
    if not (a.real <= 0 and abs(a.imag) < 1):
        raise ValueError("positivity scans need Re a <= 0 and |Im a| < 1")
    taus = np.linspace(tau_min, tau_max, grid)
    u = eval_u(ev, taus)
    i = int(np.argmin(u.real))
    rep.add("Re u > 0 at every grid point", bool((u.real > 0).all()), f"min Re u = {u.real[i]:.4g} at tau = {taus[i]:.4g}")
    if a.imag == 0 and ev.b.imag == 0:
        rep.add("u is real", float(np.max(np.abs(u.imag))) < 1e-8 * float(np.max(np.abs(u))))
    return rep


def oddness_check(ev: SolutionEvaluator, tau_max: float, samples: int = 50) -> float:
    """max |u(-tau) + u(tau)| / |u(tau)| with independent integrations on each half-axis."""
    taus = np.linspace(ev.seed_radius * 0.5, tau_max, samples)
    plus = eval_u(ev, taus, 0.0)
    minus = eval_u(ev, taus, math.pi)
    return float(np.max(np.abs(plus + minus) / np.abs(plus)))


def rotation_check(ev: SolutionEvaluator, tau_max: float, samples: int = 30) -> float:
    """max |u(tau; a) - i u(i tau; -a)| / |u| on the positive axis, both sides integrated."""
    other = ev.with_a((-ev.a_exact[0], -ev.a_exact[1]))
    taus = np.linspace(min(ev.seed_radius, other.seed_radius) * 0.5, tau_max, samples)
    lhs = eval_u(ev, taus, 0.0)
    rhs = 1j * eval_u(other, taus, math.pi / 2)
    return float(np.max(np.abs(lhs - rhs) / np.abs(lhs)))


def series_ode_agreement(ev: SolutionEvaluator, points: int = 8) -> float:
    """Integrate from half the seed radius across the disc; max relative gap to the series."""
    r = ev.seed_radius
    path = integrate(ev, r, 0.5 * r)
    worst = 0.0
    for rho in np.linspace(0.5 * r, r, points + 1)[1:]:
        u_ode = complex(path(rho))
        u_ser = eval_series(ev, rho)
        worst = max(worst, abs(u_ode - u_ser) / abs(u_ser))
    return worst


FIGURE_PARAMETERS = {
    "a=-2/3,b=1/8": (Fraction(-2, 3), 1 / 8),
    "a=-3,b=10": (Fraction(-3), 10.0),
    "a=2i/7,b=1/80": ((Fraction(0), Fraction(2, 7)), 1 / 80),
    "a=5i/7,b=1": ((Fraction(0), Fraction(5, 7)), 1.0),
}
