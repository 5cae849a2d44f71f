import numpy as np
import pytest

from seedrel.embed import MappingConfig, VectorSpace


@pytest.fixture
def space2d():
    return VectorSpace.from_dict({
        "cause": [1.0, 0.0],
        "treat": [0.0, 1.0],
        "induce": [0.9, 0.1],
        "develop": [0.8, 0.2],
        "relieve": [0.1, 0.9],
        "be": [0.6, -0.8],
        "aspirin": [0.3, 0.3],
        "headache": [0.2, 0.5],
    })


@pytest.fixture
def mapping():
    return MappingConfig(("cause", "treat"), 0.4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# --- acceptance summary ------------------------------------------------------
# Tests marked ``acceptance(n, title)`` get one PASS/FAIL line each, printed
# after the run.  A test can attach measurements with record_property("detail", ...).

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")
    config.stash[_ACCEPTANCE] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(rep.user_properties).get("detail", "")
        n, title = marker.args
        item.config.stash[_ACCEPTANCE].append((n, title, rep.outcome, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = sorted(config.stash.get(_ACCEPTANCE, []))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, outcome, detail in results:
        status = "PASS" if outcome == "passed" else "FAIL" if outcome == "failed" else "SKIP"
        line = f"[{status}] {n}. {title}"
        terminalreporter.write_line(f"{line}: {detail}" if detail else line)
