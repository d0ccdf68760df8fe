import pytest

from sl2boundary.verify import SUITES, run_suite


@pytest.mark.parametrize("name", SUITES)
def test_suite_passes(name):
    rep = run_suite(name)
    failed = [c.to_json() for c in rep.cases if not c.passed]
    assert rep.status == "pass", failed[:3]
    assert all(c.name.startswith(f"{name}: ") for c in rep.cases)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
