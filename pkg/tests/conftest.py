import pytest

from bannai_ito import TensorSpace

MU3 = ("1/2", "1/3", "1/4")
MU4 = ("1/2", "1/3", "1/4", "1/5")


@pytest.fixture(scope="session")
def space3():
    return TensorSpace.uniform(MU3, 4)


@pytest.fixture(scope="session")
def space4():
    return TensorSpace.uniform(MU4, 6)


@pytest.fixture(scope="session")
def space4_small():
    return TensorSpace.uniform(MU4, 4)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, text = RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}")
