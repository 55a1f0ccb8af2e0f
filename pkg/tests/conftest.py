import numpy as np
import pytest

import blindgraph as bg
from blindgraph.experiments import gen_graph


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def er_spectrum(n=50, p=0.1, seed=0, connected=False):
    return bg.build_shift(gen_graph("er", seed, connected=connected, n=n, p=p))


def cycle_spectrum(n):
    return bg.build_shift(bg.Graph(n), "directed_cycle")


@pytest.fixture
def er50():
    return er_spectrum()


_ACCEPTANCE = {}


@pytest.fixture
def acceptance_record():
    def record(i, ok, detail):
        _ACCEPTANCE[i] = (ok, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[i]
        terminalreporter.write_line(f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
