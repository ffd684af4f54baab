from fractions import Fraction

import numpy as np
import pytest

from igpswitch.model import REFERENCE_PARAMS, PARAM_NAMES, ModelParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ref():
    return REFERENCE_PARAMS


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_params(rng, **fixed) -> ModelParams:
    """Positive rate constants spread around the reference set's magnitudes."""
    vals = {name: float(rng.uniform(0.1, 3.0)) for name in PARAM_NAMES}
    vals["b1"] = float(rng.uniform(1.0, 8.0))
    vals["c"] = float(rng.uniform(0.0, 2.0))
    vals.update(fixed)
    return ModelParams(**vals)


def cramer_exact(p):
    """Exact rational solve of the c = 0 per-capita system."""
    F = Fraction
    M = [[F(p.a11), F(p.a12), F(p.a13)], [F(p.a21), F(0), -F(p.a23)], [F(p.a31), F(p.a32), F(0)]]
    b = [F(p.b1), F(p.b2), F(p.b3)]

    def det(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    d = det(M)
    if d == 0:
        return None
    out = []
    for j in range(3):
        mj = [row[:] for row in M]
        for i in range(3):
            mj[i][j] = b[i]
        out.append(det(mj) / d)
    return out


def companion_roots(s1, s2, s3):
    C = np.array([[-s1, -s2, -s3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return np.linalg.eigvals(C)


def match(a, b):
    """Max distance after greedy nearest matching of two root triples."""
    b = list(b)
    worst = 0.0
    for r in a:
        k = int(np.argmin([abs(r - q) for q in b]))
        worst = max(worst, abs(r - b.pop(k)))
    return worst


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
