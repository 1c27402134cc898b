import os
import sys

import pytest

from ccc_rates.constellation import gen_psk, gen_square_qam, gen_hex_qam, gen_star_qam, normalize

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def bpsk():
    return gen_psk(2)


@pytest.fixture(scope="session")
def qpsk():
    return normalize(gen_square_qam(4))


@pytest.fixture(scope="session")
def hqam16():
    return normalize(gen_hex_qam(16))


@pytest.fixture(scope="session")
def star16():
    return normalize(gen_star_qam(16))


@pytest.fixture
def cli_env():
    env = dict(os.environ)
    src = os.path.join(os.path.dirname(__file__), os.pardir, "src")
    env["PYTHONPATH"] = os.path.abspath(src) + os.pathsep + env.get("PYTHONPATH", "")
    return env


@pytest.fixture(scope="session")
def python_exe():
    return sys.executable
