import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dp3lab import fence
from dp3lab.coeffs import compute_u_table

# z_1 .. z_150 measured from the exact table (frozen)
MEASURED_Z = [
    0, 0, 1, 0, 0, 1, 1, 0, 1, 1, 1, 2, 0, 0, 1, 1, 0, 1, 1, 1, 2, 1, 1, 2, 2, 0, 1, 1, 1, 2, 1, 1, 2, 2, 1, 2, 2, 2,
    3, 0, 0, 1, 1, 0, 1, 1, 1, 2, 1, 1, 2, 2, 0, 1, 1, 1, 2, 1, 1, 2, 2, 1, 2, 2, 2, 3, 1, 1, 2, 2, 1, 2, 2, 2, 3, 2,
    2, 3, 3, 0, 1, 1, 1, 2, 1, 1, 2, 2, 1, 2, 2, 2, 3, 1, 1, 2, 2, 1, 2, 2, 2, 3, 2, 2, 3, 3, 1, 2, 2, 2, 3, 2, 2, 3,
    3, 2, 3, 3, 3, 4, 0, 0, 1, 1, 0, 1, 1, 1, 2, 1, 1, 2, 2, 0, 1, 1, 1, 2, 1, 1, 2, 2, 1, 2, 2, 2, 3, 1, 1, 2,
]


def test_frozen_list_length():
    assert len(MEASURED_Z) == 150


def test_measured_profile_from_table(timed_table150):
    assert fence.measured_profile(timed_table150.table).heights == MEASURED_Z


def test_small_table_profile():
    assert fence.measured_profile(compute_u_table(40)).heights == MEASURED_Z[:40]


def test_valuation_height_rejects_wrong_shape():
    assert fence.valuation_height(4, 5 * 27) == 3
    assert fence.valuation_height(5, 3) == 0
    with pytest.raises(fence.FenceStructureError):
        fence.valuation_height(4, 7)
    with pytest.raises(fence.FenceStructureError):
        fence.valuation_height(4, 5 * 2)


def _brute_plaindromes(limit):
    out = []
    for n in range(1, limit + 1):
        d = np.base_repr(n, 3)
        if list(d) == sorted(d):
            out.append(n)
    return out


def test_plaindromes_against_brute_force():
    brute = _brute_plaindromes(3**7)
    assert fence.plaindromes(len(brute)) == brute
    assert [n for n in range(1, 3**7 + 1) if fence.is_plaindrome(n)] == brute


@given(st.integers(0, 10**9))
def test_base3_round_trip(n):
    assert int(fence.base3(n), 3) == n


@given(st.integers(0, 2000))
def test_triangular_split(k):
    q, l = fence.triangular_split(k)
    assert 0 <= l <= q and q * (q + 1) // 2 + l == k


def test_b_sequences():
    assert [fence.b_k(k) for k in range(1, 7)] == [3, 12, 39, 120, 363, 1092]
    for k in range(1, 5):
        pts = fence.b_points(k)
        assert len(pts) == (k + 1) * (k + 4) // 2 + 1
        assert pts[0] == fence.b_k(k) and pts == sorted(pts) and pts[-1] < fence.b_k(k + 1)


def test_measured_matches_grammar_and_audit():
    m = fence.FenceProfile(MEASURED_Z, "measured")
    p = fence.build_fence(150)
    assert p.heights == MEASURED_Z
    rep = fence.fence_conjecture_audit(m, p)
    assert rep.ok, str(rep)


def test_first_three_parts():
    parts, rep = fence.connected_parts(fence.FenceProfile(MEASURED_Z, "measured"))
    assert [p.area for p in parts[:3]] == [1, 7, 34]
    assert [(p.start, p.end) for p in parts[:3]] == [(2, 4), (5, 13), (14, 40)]
    assert rep.ok


def test_grammars_agree_and_predict_parts_far_out():
    assert fence.grammar_agreement(3000).ok
    parts, _ = fence.connected_parts(fence.build_fence(1200))
    for p in parts[:5]:
        assert p.area == Fraction((2 * p.index - 1) * 3**p.index + 1, 4)


def test_grammar_dump_and_shapes():
    dump = fence.grammar_dump(6)
    assert "A/B grammar: A' 2 B 2 A 3+ B" in dump
    assert "C grammar:   C C1^2 C2^2 C C1^3+ C2^2" in dump
    assert fence.deformed_c("C1", 2).offsets == (0, 0, 1, -1, -1, 0, 0, -1, 0, 0)


def test_profile_csv():
    buf = io.StringIO()
    fence.write_profile_csv(fence.FenceProfile(MEASURED_Z[:12], "m"), fence.build_fence(13), buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "n,z_measured,z_predicted,resonance_flag"
    assert rows[12] == "12,2,2,0" and rows[13] == "13,,0,1"


def test_argument_checks():
    with pytest.raises(ValueError):
        fence.build_fence(0)
    with pytest.raises(ValueError):
        fence.build_fence(10, "D")
    with pytest.raises(ValueError):
        fence.plaindrome(2, 3)
    with pytest.raises(IndexError):
        fence.build_fence(5)[6]
