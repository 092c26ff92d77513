from __future__ import annotations

import numpy as np
import pytest

from wki.scattering import InitialProfile
from wki.soliton import SolitonParams, soliton_field

PLANTED_Z = 0.5 + 0.8j
PLANTED_C = 1.0


@pytest.fixture(scope="session")
def planted_params() -> SolitonParams:
    return SolitonParams.single(PLANTED_Z, PLANTED_C, 1.0)


@pytest.fixture(scope="session")
def planted_profile(planted_params) -> InitialProfile:
    x = np.linspace(-40.0, 40.0, 3201)
    q = soliton_field(planted_params, x, 0.0).q
    return InitialProfile(x, q, q[-1], q[0])


@pytest.fixture(scope="session")
def bump_profile() -> InitialProfile:
    """Small localized perturbation of a constant background, no bound states."""
    x = np.linspace(-30.0, 30.0, 1201)
    q = 0.5 * (1 + 0.2 * np.exp(-x ** 2 / 8) * np.exp(0.3j * x))
    return InitialProfile(x, q, q[-1], q[0])


# acceptance criterion -> one summary line, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
