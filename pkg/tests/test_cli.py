import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dp3lab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, format_complex, main, parse_complex


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize(
    "text,want",
    [
        ("-2/3", (Fraction(-2, 3), 0)),
        ("0.5i", (0, Fraction(1, 2))),
        ("i0.5", (0, Fraction(1, 2))),
        ("-1/3+0.2i", (Fraction(-1, 3), Fraction(1, 5))),
        ("1-i/2", (1, Fraction(-1, 2))),
        ("i", (0, 1)),
        ("-i", (0, -1)),
        ("3+4j", (3, 4)),
        ("1e-3-2e+1i", (Fraction(1, 1000), -20)),
    ],
)
def test_parse_complex(text, want):
    assert parse_complex(text) == want


@pytest.mark.parametrize("text", ["", "abc", "1+ii", "1/0", "2//3"])
def test_parse_complex_rejects(text):
    with pytest.raises(UsageError):
        parse_complex(text)


@given(st.fractions(max_denominator=1000), st.fractions(max_denominator=1000))
def test_format_parse_round_trip(re_, im_):
    assert parse_complex(format_complex((re_, im_))) == (re_, im_)


def test_coeffs_text_and_json():
    code, out, err = run("coeffs", "--n", "5")
    assert code == EXIT_OK
    assert "PASS" in err
    code, out, _ = run("coeffs", "--n", "3", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK and isinstance(data, (dict, list))


def test_coeffs_csv():
    code, out, _ = run("coeffs", "--n", "1", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("n")


def test_verify_suite_and_exit_codes():
    code, out, _ = run("verify", "--suite", "divisibility")
    assert code == EXIT_OK
    assert "FAIL" not in out
    code, out, _ = run("verify", "--suite", "inequalities", "--format", "json")
    assert code == EXIT_OK
    json.loads(out)
    assert run("verify", "--suite", "nonsense")[0] == EXIT_USAGE


def test_eval_values():
    code, out, _ = run("eval", "--alpha", "1/2", "--b", "1", "--tau", "3", "--format", "csv")
    assert code == EXIT_OK
    t, re_u, im_u = out.splitlines()[1].split(",")
    assert abs(float(re_u) - 0.88565) < 1e-4 and abs(float(im_u) - 0.06880) < 1e-4


def test_eval_usage_errors():
    assert run("eval", "--a", "2i", "--b", "1", "--tau", "1")[0] == EXIT_USAGE
    assert run("eval", "--a", "1", "--b", "0", "--tau", "1")[0] == EXIT_USAGE
    assert run("eval", "--a", "1", "--b", "1", "--tau", "-1")[0] == EXIT_USAGE
    assert run("eval", "--alpha", "1+i", "--b", "1", "--tau", "1")[0] == EXIT_USAGE
    assert run("eval", "--b", "1", "--tau", "1")[0] == EXIT_USAGE


def test_eval_pole_is_a_failure():
    code, _, err = run("eval", "--a", "2", "--b", "1", "--tau", "5")
    assert code == EXIT_FAIL and "FAIL" in err


def test_compare_is_byte_identical(tmp_path):
    args = ["compare", "--a", "-1/2", "--b", "1", "--t1", "5", "--t2", "20", "--samples", "60"]
    first, second = tmp_path / "1.csv", tmp_path / "2.csv"
    assert run(*args, "--out", str(first))[0] in (EXIT_OK, EXIT_FAIL)
    run(*args, "--out", str(second))
    assert first.read_bytes() == second.read_bytes()


def test_compare_gates():
    code, _, err = run("compare", "--alpha", "0.999", "--b", "1", "--gate", "strict")
    assert code == EXIT_USAGE and "strict gate" in err
    assert run("compare", "--a", "-1/2", "--b", "1", "--t1", "5", "--t2", "4")[0] == EXIT_USAGE


def test_fence_csv():
    code, out, _ = run("fence", "--n", "40", "--depth", "40")
    assert code == EXIT_OK
    rows = out.splitlines()
    assert rows[0] == "n,z_measured,z_predicted,resonance_flag" and len(rows) == 41
    code, out, _ = run("fence", "--n", "20", "--depth", "0")
    assert code == EXIT_OK and out.splitlines()[1] == "1,,0,0"


def test_save_config_and_replay(tmp_path):
    cfg = tmp_path / "cfg.json"
    code, out1, _ = run("eval", "--a", "-2/3", "--b", "1/8", "--tau", "0.5,2", "--save-config", str(cfg))
    assert code == EXIT_OK
    saved = RunConfig.from_json(cfg.read_text())
    assert saved.a == "-2/3" and saved.b == "1/8" and saved.command == "eval"
    assert RunConfig.from_json(saved.to_json()) == saved
    code, out2, _ = run("replay", str(cfg))
    assert code == EXIT_OK and out1 == out2


def test_replay_rejects_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"command": "eval", "colour": "blue"}))
    assert run("replay", str(bad))[0] == EXIT_USAGE
    assert run("replay", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dp3lab", "verify", "--suite", "inequalities"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "dp3lab", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
