import numpy as np
import pytest

from pointer_ideality.grid import Wavefunction, make_grid


@pytest.fixture(scope="session")
def grid():
    return make_grid(-12.0, 12.0, 4801)


@pytest.fixture(scope="session")
def wide_grid():
    return make_grid(-10.0, 10.0, 2001)


def box(grid, a, b, height=1.0):
    """Box amplitude on [a, b] with half height on the edge nodes.

    With a and b on even-index nodes the Simpson rule integrates products
    of such boxes exactly.
    """
    x = grid.x
    amp = np.where((x > a) & (x < b), height, 0.0)
    edge = np.isclose(x, a, atol=1e-9) | np.isclose(x, b, atol=1e-9)
    amp[edge] = height / 2
    return Wavefunction(grid, amp)


def free_evolve(psi, t):
    """Free-particle propagation (hbar = m = 1) by FFT; an independent oracle."""
    k = 2 * np.pi * np.fft.fftfreq(psi.grid.n, d=psi.grid.h)
    evolved = np.fft.ifft(np.exp(-0.5j * k**2 * t) * np.fft.fft(psi.amplitudes))
    return psi.with_amplitudes(evolved)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
