"""One test per acceptance criterion, each at its stated tolerance.

Every test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary. Run directly with ``python3 tests/test_acceptance.py``
for the lines alone.
"""

import sys

import pytest

from rdperiods import acceptance

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []

SEED = 7


def _run(n):
    fn = acceptance.CRITERIA[n]
    res = fn(SEED) if n == 6 else fn()
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    return res


@pytest.mark.parametrize("n", sorted(acceptance.CRITERIA))
def test_criterion(n):
    res = _run(n)
    detail = [f"{r.name}: expected {r.expected!r}, got {r.computed!r}" for r in res.failures()[:5]]
    assert res.passed, res.line() + "\n" + "\n".join(detail)


def test_criterion_6_counts():
    res = acceptance.criterion_6(SEED)
    instantiations = {tuple(sorted(r.inputs.items())) for r in res.records if r.name.startswith("GM_x")}
    assert len(instantiations) >= 5
    assert len(acceptance.INTEGRABILITY_POINTS) >= 10


def test_criterion_8_covers_every_entry_and_coefficient():
    res = acceptance.criterion_8()
    assert sum(1 for r in res.records if r.source == "negative control" and r.name.startswith("A")) == 18
    assert sum(1 for r in res.records if "coefficient" in r.name) == 13


if __name__ == "__main__":
    ok = True
    for n in sorted(acceptance.CRITERIA):
        ok &= _run(n).passed
    sys.exit(0 if ok else 1)
