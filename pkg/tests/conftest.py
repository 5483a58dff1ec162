import numpy as np
import pytest

from tomosep.checks import export_states


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def state_dir(tmp_path_factory):
    """Bundled example states, generated by the library rather than typed in."""
    d = tmp_path_factory.mktemp("states")
    export_states(d)
    return d


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
