import warnings

import pytest
from hypothesis import HealthCheck, settings

from qhdual.params import make_params

settings.register_profile(
    "default", deadline=None, max_examples=30, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# a generic point inside the verification region
M1, KAPPA, Z_IN, MU = -0.6 + 0.2j, 1.37, -30 + 0.4j, -0.8 + 1.3j


@pytest.fixture
def region_point():
    def make(m2, l2, **kw):
        d = dict(m1=M1, m2=m2, l2=l2, kappa=KAPPA, z=Z_IN, mu=MU)
        d.update(kw)
        return make_params(**d)

    return make


@pytest.fixture(autouse=True)
def _quiet_region_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", category=RuntimeWarning, message=".*outside.*")
        yield


# acceptance bookkeeping: criterion number -> list of (part, passed, summary)
ACCEPTANCE = {}


def record(criterion: int, part: str, passed: bool, summary: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), summary))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{name}: {s}" for name, _, s in parts)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
