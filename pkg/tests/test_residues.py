import io
from fractions import Fraction

import pytest
import sympy

from dp3lab import reference, residues
from dp3lab.coeffs import compute_u_table
from dp3lab.residues import ZRat

S = sympy.Symbol("s")
T = sympy.Symbol("t")


@pytest.fixture(scope="module")
def t40():
    return compute_u_table(40)


@pytest.fixture(scope="module")
def rt(t40):
    return residues.residue_table(t40)


def _sympy_entry(f):
    num = sum(sympy.Rational(c.numerator, c.denominator) * S**i for i, c in enumerate(f.numerator.coeffs))
    return num / sympy.Mul(*[(S + k * k) ** e for k, e in f.denominator.items()])


def _sympy_gamma(f, k, i):
    """Coefficient of (s+k^2)^(-i) in the Laurent expansion, via sympy series in t = s + k^2."""
    expr = sympy.cancel(_sympy_entry(f).subs(S, T - k * k))
    ser = sympy.series(expr, T, 0, max(1, 1 - i) + 1).removeO()
    c = sympy.expand(ser).coeff(T, -i)
    return Fraction(int(c.p), int(c.q))


@pytest.mark.parametrize("key", sorted(reference.GAMMA))
def test_printed_gamma_against_sympy(t40, rt, key):
    k, i, n = key
    assert rt.gamma(k, i, n) == reference.GAMMA[key]
    assert _sympy_gamma(t40[n], k, i) == reference.GAMMA[key]


def test_senior_residue_shortcut(t40, rt):
    for n in range(1, 15):
        for k in t40[n].denominator:
            assert residues.senior_residue(t40, k, n) == rt.senior(k, n)
    with pytest.raises(ValueError):
        residues.senior_residue(t40, 5, 1)


def test_c1k(t40):
    for k, measured, conj in residues.c1k_determination(t40, 8):
        assert measured == conj == reference.C1K[k]


@pytest.mark.parametrize("k,l", reference.PRINTED_V)
def test_printed_generating_functions(rt, k, l):
    top = 3 if k == 1 else 1
    assert residues.v_tower(k, top, rt)[l] == reference.printed_v(k, l)


def test_published_v13_lost_two_digits(rt):
    tower = residues.v_tower(1, 3, rt)
    assert tower[3] != reference.printed_v(1, 3, literal=True)
    gap = (reference.printed_v(1, 3, literal=True) - tower[3]).num
    assert [e for e, c in enumerate(gap.coeffs()) if c != 0] == sorted(reference.V13_DROPPED_DIGITS)
    for published, restored in reference.V13_DROPPED_DIGITS.values():
        assert str(restored).startswith(str(published)) and len(str(restored)) == len(str(published)) + 1


def test_towers_generate_the_residues(rt):
    for k, top in ((1, 3), (2, 1), (3, 0)):
        rep = residues.tower_against_table(residues.v_tower(k, top, rt), rt, 40)
        assert rep.ok, str(rep)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_vk0_shape(rt, k):
    assert residues.vk0_shape_check(k, rt).ok


@pytest.mark.parametrize("k", [1, 2, 3])
def test_v_minus_one_solves_its_equation(k):
    assert residues.v_minus_one_residual(k, residues.c1k_conjecture(k)).num.is_zero()


def test_sum_relations_and_closed_forms(rt):
    for n in range(1, 41):
        assert residues.residue_sum_relations(rt, n).ok
    assert residues.residue_closed_form_report(rt, 40).ok
    assert residues.two_parameter_residue_check(rt.table, 4, 6).ok


def test_index_map():
    assert residues.index_map(1, -1, 2) is None
    assert residues.index_map(1, 0, 2) == 1
    assert residues.index_map(2, 1, 4) == 1


def test_zrat_algebra():
    a = ZRat([0, 1], 1, Fraction(1, 8), 2)
    b = ZRat([1], 2, Fraction(1, 8), 2)
    assert (a + b) - b == a
    assert (a * b).J == 3
    ta, tb, tab = a.taylor(8), b.taylor(8), (a * b).taylor(8)
    assert tab == [sum(ta[j] * tb[n - j] for j in range(n + 1)) for n in range(9)]
    assert a.delta().taylor(8) == [n * c for n, c in enumerate(ta)]


def test_residue_csv(rt):
    buf = io.StringIO()
    residues.write_residues_csv(rt, 3, buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "n,k,i,numerator,denominator"
    assert "2,1,1,1,1" in rows and "2,2,1,-1,1" in rows


def test_divisor_audit(t40):
    assert residues.divisor_count_audit(40, t40).ok
    assert list(residues.divisor_counts(6)) == [0, 1, 2, 2, 3, 2, 4]


def test_closed_form_argument_checks():
    with pytest.raises(ValueError):
        residues.closed_residues_k1(2, 4)
    with pytest.raises(ValueError):
        residues.closed_residues_k2("3p+5", 1)
