import io
from fractions import Fraction

import flint
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dp3lab import reference
from dp3lab.coeffs import (
    compute_u_table,
    dump_table,
    load_table,
    predicted_structure,
    strange_divisibility,
    structure_report,
)


def recurrence_values(s: Fraction, N: int) -> list[Fraction]:
    """u_2..u_2N at a fixed rational s straight from the three-term recurrence (oracle)."""
    u = [Fraction(0)] * (N + 1)
    u[1] = 1 / (s + 1)
    for n in range(2, N + 1):
        acc = 3 * u[n - 1]
        acc += 3 * sum(u[j] * u[n - 1 - j] for j in range(1, n - 1))
        acc += sum(u[i] * u[j] * u[n - 1 - i - j] for i in range(1, n - 1) for j in range(1, n - 1 - i))
        acc -= sum((n - 2 * j) ** 2 * u[j] * u[n - j] for j in range(1, n) if 2 * j < n)
        u[n] = acc / (s + n * n)
    return u[1:]


@pytest.fixture(scope="module")
def t25():
    return compute_u_table(25)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=-30, max_value=30, max_denominator=40))
def test_table_matches_recurrence_oracle(t25, s):
    if s.denominator == 1 and s < 0 and round((-s) ** 0.5) ** 2 == -s:
        return
    want = recurrence_values(s, 25)
    assert [t25[n](s) for n in range(1, 26)] == want


def test_small_entries_match_printed(t25):
    for n in range(1, 6):
        assert t25[n] == reference.u_entry(n)


def test_structure_and_positivity(t25):
    rep = structure_report(t25)
    assert rep.ok, str(rep)
    for n, m in reference.M_OF_N.items():
        assert t25.decomposition(n).m_observed == m


def test_predicted_structure():
    exps, m = predicted_structure(5)
    assert exps == {1: 3, 2: 2, 3: 1, 4: 1, 5: 1}
    assert m == 3
    with pytest.raises(ValueError):
        predicted_structure(0)


def test_indexing_and_depth(t25):
    assert len(t25) == t25.depth == 25
    with pytest.raises(IndexError):
        t25[0]
    with pytest.raises(IndexError):
        t25[26]
    assert t25.truncated(3).entries == t25.entries[:3]
    with pytest.raises(ValueError):
        compute_u_table(0)


def test_dump_load_round_trip(t25):
    buf = io.StringIO()
    dump_table(t25, buf)
    buf.seek(0)
    assert load_table(buf).entries == t25.entries


def test_load_rejects_malformed():
    with pytest.raises(ValueError, match="line 1"):
        load_table(io.StringIO("1\tx\t1^1\n"))
    with pytest.raises(ValueError, match="out of order"):
        load_table(io.StringIO("2\t1\t1^1\n"))


@pytest.mark.parametrize("k,l", sorted(reference.DIVISIBILITY))
def test_divisibility_examples(t25, k, l):
    r = strange_divisibility(t25, k, l)
    assert r.numerator == reference.divisibility_numerator(k, l)
    assert r.divisible
    assert r.quotient * r.divisor == r.numerator


def test_divisibility_argument_checks(t25):
    with pytest.raises(ValueError):
        strange_divisibility(t25, 5, 2)
    with pytest.raises(ValueError):
        strange_divisibility(compute_u_table(3), 8, 2)


def test_numerators_are_irreducible(t25):
    for n in range(1, 26):
        P = flint.fmpz_poly(t25.decomposition(n).p_coeffs)
        if P.degree() < 2:
            continue
        _, factors = P.factor()
        assert len(factors) == 1 and factors[0][1] == 1, n
