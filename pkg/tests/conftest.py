import numpy as np
import pytest

from krigbound import _fallback

try:
    from krigbound import _core
except ImportError:
    _core = None

BACKENDS = [pytest.param(_fallback, id="fallback")]
if _core is not None:
    BACKENDS.append(pytest.param(_core, id="compiled"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
