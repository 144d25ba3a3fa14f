import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ramanujan_nets.cayley import GroupContext, build_colored_cayley  # noqa: E402
from ramanujan_nets.generators import hilbert_generators, lps_generators, square_table  # noqa: E402
from ramanujan_nets.spectral import spectrum_dense  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lps17_13():
    """p = 17 over N = 13: 1092 vertices, 18-regular."""
    return build_colored_cayley(GroupContext.rational(13), [lps_generators(17, "red")])


@pytest.fixture(scope="session")
def lps17_13_dense(lps17_13):
    return spectrum_dense(lps17_13, "red")


@pytest.fixture(scope="session")
def lps_sets_5_13():
    return lps_generators(5, "red"), lps_generators(13, "blue")


@pytest.fixture(scope="session")
def two_color_29(lps_sets_5_13):
    """(p, q) = (5, 13) over N = 29: 12180 vertices, colors of degree 6 and 14."""
    return build_colored_cayley(GroupContext.rational(29), list(lps_sets_5_13))


@pytest.fixture(scope="session")
def table_5_13(lps_sets_5_13):
    return square_table(*lps_sets_5_13)


@pytest.fixture(scope="session")
def hilbert29():
    return hilbert_generators(29)


@pytest.fixture(scope="session")
def table29(hilbert29):
    return square_table(*hilbert29)
