import pytest

from dp3lab import suites


@pytest.mark.parametrize("name", sorted(suites.SUITES))
def test_each_suite_passes_at_small_depth(name):
    for rep in suites.run_suite(name, 12):
        assert rep.ok, str(rep)


def test_inequalities_alias_and_unknown_name():
    (rep,) = suites.run_suite("inequalities", 0)
    assert rep.ok
    with pytest.raises(ValueError):
        suites.run_suite("nope", 5)
