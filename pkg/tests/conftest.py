import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from linflow.flowstruct import block_diag, jordan_block

settings.register_profile(
    "linflow",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("linflow")

# eigenvalue menu for structured random generators
REAL_VALUES = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0)
COMPLEX_VALUES = (1j, 2j, 1 + 1j, -1 + 2j, 0.5 - 1j, -2 + 1j)


def well_conditioned(rng, d, spread=0.4):
    """Random basis change close to the identity (condition number below ~10)."""
    while True:
        q = np.eye(d) + spread * rng.standard_normal((d, d))
        if np.linalg.cond(q) < 20:
            return q


def random_jordan_form(rng, d):
    """Random real Jordan matrix of order d built from the eigenvalue menu."""
    blocks = []
    left = d
    while left > 0:
        if left >= 2 and rng.random() < 0.35:
            z = COMPLEX_VALUES[rng.integers(len(COMPLEX_VALUES))]
            m = 1 if left < 4 or rng.random() < 0.7 else 2
            blocks.append(jordan_block(z, m))
            left -= 2 * m
        else:
            lam = REAL_VALUES[rng.integers(len(REAL_VALUES))]
            m = int(rng.integers(1, min(left, 3) + 1))
            blocks.append(jordan_block(lam, m))
            left -= m
    return block_diag(*blocks)


def random_structured(rng, d):
    """Conjugated random Jordan matrix."""
    j = random_jordan_form(rng, d)
    q = well_conditioned(rng, d)
    return q @ j @ np.linalg.inv(q)


def random_pair(rng, dmax=4):
    """Pair of generators mixing structured, scaled-similar and Gaussian cases."""
    d = int(rng.integers(1, dmax + 1))
    kind = rng.integers(4)
    a = random_structured(rng, d) if rng.random() < 0.7 else rng.standard_normal((d, d))
    if kind == 0:
        b = rng.standard_normal((d, d))
    elif kind == 1:
        c = (0.5, 1.0, 2.0, -1.0, -0.5)[rng.integers(5)]
        q = well_conditioned(rng, d)
        b = c * q @ a @ np.linalg.inv(q)
    elif kind == 2:
        b = random_structured(rng, d)
    else:
        b = np.diag(np.sign(np.linalg.eigvals(a).real) + 0.5 * rng.random(d))
    return a, b


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
N_CRITERIA = 9


def record(number: int, passed: bool, detail: str) -> None:
    """Store the outcome of an acceptance criterion and print its line."""
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, N_CRITERIA + 1):
        if k in ACCEPTANCE:
            ok, detail = ACCEPTANCE[k]
            terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})")
        else:
            terminalreporter.write_line(f"criterion {k}: FAIL (did not run to completion)")
