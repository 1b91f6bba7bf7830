"""Audit suites run by ``dp3lab verify``; each returns a Report."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

from . import fence, genfun_a, genfun_b, reference, residues
from .coeffs import CoeffTable, compute_u_table, structure_report, strange_divisibility
from .exact import PolyS
from .report import Report


@lru_cache(maxsize=2)
def table(N: int) -> CoeffTable:
    return compute_u_table(N)


def structure_suite(N: int) -> Report:
    t = table(N)
    rep = structure_report(t, N)
    M = min(N, max(reference.M_OF_N))
    bad = [n for n in range(1, M + 1) if t.decomposition(n).m_observed != reference.M_OF_N[n]]
    rep.add(f"numerator degrees m(n) equal the published list, n <= {M}", not bad, f"mismatch at {bad}" if bad else "")
    small = min(N, 5)
    bad = [n for n in range(1, small + 1) if t[n] != reference.u_entry(n)]
    rep.add(f"u_2..u_{2 * small} equal the published closed forms", not bad, f"mismatch at {bad}" if bad else "")
    return rep.merge(residues.divisor_count_audit(N, t))


def divisibility_suite(N: int) -> Report:
    N = max(N, 11)
    t = table(N)
    rep = Report(f"divisibility of the triple/pair combinations, table depth {N}")
    for (k, l) in reference.DIVISIBILITY:
        r = strange_divisibility(t, k, l)
        want = reference.divisibility_numerator(k, l)
        rep.add(f"k={k}, l={l}: numerator equals the published factorization", r.numerator == want)
        rep.add(f"k={k}, l={l}: numerator divisible by s + {(l - 1) ** 2}", r.divisible)
    extra = []
    for l in range(2, N):
        for k in range(3 * l - 2, 3 * N):
            if (k + 2) % l or k < 4 or l * ((k + 2) // l - 1) - 1 > N or (k, l) in reference.DIVISIBILITY:
                continue
            if not strange_divisibility(t, k, l).divisible:
                extra.append((k, l))
    rep.add("every admissible (k, l) within the table is divisible", not extra, f"counterexamples {extra}" if extra else "")
    return rep


def genfun_a_suite(N: int) -> Report:
    rep = genfun_a.a0_checks(min(N, 30))
    rows = genfun_a.ak_coefficient_table(3, 11)
    rep.add("A_0..A_3 rows for n <= 11 equal the published values",
            [r[1:12] for r in rows] == reference.AK_ROWS)
    sym = [genfun_a.ak_series(k, 11).integer_coefficients() for k in range(4)]
    rep.add("rational and series routes give the same A_k rows", sym == rows)
    big = genfun_a.ak_coefficient_table(30, 2)
    rep.add("A_k[1] = 1 and A_k[2] = 2^(2k+2) - 1 for k <= 30",
            all(big[k][1] == 1 and big[k][2] == 2 ** (2 * k + 2) - 1 for k in range(31)))
    M = min(N, 25)
    rows = genfun_a.ak_coefficient_table(2, M)
    rep.add(f"A_1[n] and A_2[n] closed forms, n <= {M}",
            all(genfun_a.a1n_closed(n) == rows[1][n] and genfun_a.a2n_closed(n) == rows[2][n] for n in range(1, M + 1)))
    t = table(N)
    K = 10
    laurent = [genfun_a.laurent_identity_check(t, n, K) for n in range(1, min(N, 20) + 1)]
    rep.add(f"large-a expansion of u_2n against A_k[n], n <= {min(N, 20)}, k <= {K}", all(r.ok for r in laurent),
            "; ".join(c.line() for r in laurent for c in r.failures)[:200])
    bad = []
    for n in range(1, N + 1):
        pk = genfun_a.pk_from_Ak(n)
        if pk.p_ascending != t.decomposition(n).p_coeffs or not pk.vanishing_ok:
            bad.append(n)
    rep.add(f"numerator coefficients rebuilt from A_k[n], with the vanishing identities, n <= {N}", not bad,
            f"failures at {bad[:5]}" if bad else "")
    for k in (1, 2):
        rep.merge(genfun_a.growth_checks(k, max(2 * N, 40)))
    return rep.merge(inequality_suite())


def inequality_suite() -> Report:
    rep = genfun_a.pmn1_inequality_audit()
    trunc = lambda x, d: math.floor(float(x) * 10**d) / 10**d  # noqa: E731
    for n, s in reference.X_TRUNCATED.items():
        rep.add(f"X_{n} = {s}...", trunc(genfun_a.x_seq(n), len(s) - 2) == float(s))
    for n, s in reference.DELTA_Y_TRUNCATED.items():
        rep.add(f"Delta Y_{n} = {s}...", trunc(genfun_a.y_seq(n + 1) - genfun_a.y_seq(n), 3) == float(s))
    gaps = {n: genfun_a.y_seq(n) + genfun_a.z_seq(n) - (n + 1) for n in reference.PMN1_GAPS}
    bad = [n for n, s in reference.PMN1_GAPS.items() if trunc(gaps[n], 3) != float(s)]
    rep.add("Y_n + Z_n - (n+1) for n = 3..14 equal the published decimals", not bad, f"mismatch at {bad}" if bad else "")
    return rep


def _ansatz(poly, poles) -> genfun_b.RationalAnsatz:
    return genfun_b.RationalAnsatz(PolyS(poly), dict(poles))


def genfun_b_suite(N: int) -> Report:
    t = table(max(N, 10))
    rep = genfun_b.integrable_case_check()
    b1, b2 = genfun_b.solve_b_ode(1), genfun_b.solve_b_ode(2)
    rep.add("B_1 equals the published rational form", b1 == _ansatz(reference.B1_POLY, reference.B1_POLES), b1.format())
    rep.add("B_2 equals the published rational form", b2 == _ansatz(reference.B2_POLY, reference.B2_POLES), b2.format())
    rep.add("B_1 Taylor coefficients", b1.series(7).coefficients == reference.B1_TAYLOR)
    rep.add("B_2 Taylor coefficients", b2.series(9).coefficients == reference.B2_TAYLOR)
    rep.merge(genfun_b.b_tower_report(t, min(N, 20)))
    rep.merge(genfun_b.closed_form_report(t, N))
    p = [t.decomposition(n).p_coeffs for n in range(1, 11)]
    rep.add("P_m(n)(0) for n = 1..6", [p[n - 1][0] for n in range(1, 7)] == reference.P0_SEQUENCE)
    rep.add("p_1(n) for n = 3..10", [p[n - 1][1] for n in range(3, 11)] == reference.P1_SEQUENCE)
    rep.add("p_2(n) for n = 5..10", [p[n - 1][2] for n in range(5, 11)] == reference.P2_SEQUENCE)
    return rep


def residues_suite(N: int) -> Report:
    N = max(N, 30)
    t = table(N)
    rt = residues.residue_table(t)
    rep = Report(f"residues, table depth {N}")
    bad = [key for key, g in reference.GAMMA.items() if rt.gamma(*key) != g]
    rep.add("published residue values", not bad, f"mismatch at (k,i,n)={bad}" if bad else f"{len(reference.GAMMA)} values")
    c1 = residues.c1k_determination(t, 8)
    rep.add("C_1k from senior residues equals the published list, k <= 8",
            all(m == reference.C1K[k] for k, m, _ in c1))
    rep.add("C_1k equals (-k)^(k-1) / (2^k (k+1)^2 ((k-1)!)^3), k <= 8", all(m == c for _, m, c in c1))
    towers = {k: residues.v_tower(k, top, rt) for k, top in ((1, 3), (2, 1))}
    for k, l in reference.PRINTED_V:
        rep.add(f"v_({k},{l}) equals the published closed form", towers[k][l] == reference.printed_v(k, l),
                towers[k][l].format())
    literal, fixed = reference.printed_v(1, 3, literal=True), reference.printed_v(1, 3)
    gap = (literal - fixed).num
    ok = all(gap[e] != 0 for e in reference.V13_DROPPED_DIGITS) and sum(1 for c in gap.coeffs() if c != 0) == 2
    rep.add("published v_(1,3) differs only in two coefficients that lost a last digit",
            ok and all(10 * p == f - f % 10 for p, f in reference.V13_DROPPED_DIGITS.values()))
    for k, tower in towers.items():
        rep.merge(residues.tower_against_table(tower, rt, N))
    for k in range(1, 6):
        rep.merge(residues.vk0_shape_check(k, rt))
    rep.merge(residues.residue_closed_form_report(rt, N))
    rel = [residues.residue_sum_relations(rt, n) for n in range(1, N + 1)]
    rep.add(f"residue sum relations hold for n <= {N}", all(r.ok for r in rel),
            "; ".join(c.line() for r in rel for c in r.failures)[:200])
    kmax = max(k for k in range(1, 7) if (k + 1) + k <= N)
    pmax = max(1, min(8, (N - kmax) // (kmax + 1)))
    rep.merge(residues.two_parameter_residue_check(t, kmax, pmax))
    return rep


def fence_suite(N: int) -> Report:
    t = table(N)
    measured = fence.measured_profile(t, N)
    predicted = fence.build_fence(N)
    rep = fence.fence_conjecture_audit(measured, predicted)
    _, parts = fence.connected_parts(measured)
    rep.merge(parts)
    return rep.merge(fence.grammar_agreement(max(N, 1000)))


SUITES: dict[str, Callable[[int], Report]] = {
    "structure": structure_suite,
    "divisibility": divisibility_suite,
    "genfun-a": genfun_a_suite,
    "genfun-b": genfun_b_suite,
    "residues": residues_suite,
    "fence": fence_suite,
}


def run_suite(name: str, N: int) -> list[Report]:
    if name == "all":
        return [fn(N) for fn in SUITES.values()]
    if name == "inequalities":
        return [inequality_suite()]
    try:
        return [SUITES[name](N)]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}") from None
