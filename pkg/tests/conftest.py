import math

import numpy as np
import pytest
from scipy.optimize import brentq

from measure_spectra.measure import SignedMeasure

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record a one-line acceptance verdict; lines are echoed in the terminal summary."""
    def record(number, passed, detail):
        _ACCEPTANCE.append((number, passed, detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def dirichlet_atom_roots(x0, h, K):
    """Square roots of the first ``K`` eigenvalues of -y'' + h delta(x - x0) y on [0, 1], Dirichlet.

    Independent oracle: ``y = sin(z x)`` left of the atom, matched across it,
    gives ``sin z + h sin(z x0) sin(z (1 - x0)) / z = 0``, bracketed on
    ``[(N - 1/2) pi, (N + 1/2) pi]`` (valid while ``|h| < pi/2``).
    """
    def f(z):
        return math.sin(z) + h * math.sin(z * x0) * math.sin(z * (1 - x0)) / z

    out = np.empty(K)
    for n in range(1, K + 1):
        out[n - 1] = brentq(f, (n - 0.5) * math.pi, (n + 0.5) * math.pi, xtol=1e-15, rtol=1e-15)
    return out


def smooth_density(d0=1.0, d1=-2.0, pieces=40, a=0.0, b=1.0):
    """Zero-mean piecewise-constant density following ``d0 + c t + e t^2`` with exact end values."""
    L = b - a
    # d0 + c + e = d1 and d0 + c/2 + e/3 = 0
    A = np.array([[1.0, 1.0], [0.5, 1 / 3]])
    c, e = np.linalg.solve(A, [d1 - d0, -d0])

    def prim(t):
        return d0 * t + c * t ** 2 / 2 + e * t ** 3 / 3

    t = np.concatenate([[0.0], np.linspace(0.05, 0.95, pieces + 1), [1.0]])
    mids = [(prim(t1) - prim(t0)) / (t1 - t0) for t0, t1 in zip(t[1:-2], t[2:-1])]
    vals = np.array([d0] + mids + [d1])
    w = np.diff(t)
    vals[1:-1] -= np.sum(vals * w) / np.sum(w[1:-1])
    return SignedMeasure.create(a, b, breakpoints=a + L * t, values=vals)
