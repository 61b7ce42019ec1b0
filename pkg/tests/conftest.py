import pytest

from chemocomp import ModelParams

BASE = dict(d1=1.0, d2=1.0, d3=1.0, chi1=0.1, chi2=0.1, mu1=1.0, mu2=1.0,
            a1=0.5, a2=0.5, alpha=1.0, beta=1.0, gamma=1.0)

# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE = {}


def make_params(**changes):
    d = dict(BASE)
    d.update(changes)
    return ModelParams(**d)


@pytest.fixture
def params():
    return make_params


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
