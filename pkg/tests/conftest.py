import math

import numpy as np
import pytest

from warpeinstein import family as fam
from warpeinstein.profiles import constant, exponential, linear, quadratic
from warpeinstein.signature import DirectionVector, Signature
from warpeinstein.warp import DomainBox, WarpSpec


def random_profile(rng, positive=False):
    """A catalog profile whose value stays in [0.5, 3] on |xi| <= 1 when ``positive``."""
    kind = rng.integers(4)
    if kind == 0:
        return constant(rng.uniform(1.0, 2.0) if positive else rng.uniform(-1.0, 1.0))
    if kind == 1:
        return linear(rng.uniform(-0.4, 0.4), rng.uniform(1.0, 2.0))
    if kind == 2:
        return quadratic(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(1.2, 2.0))
    return exponential(rng.uniform(0.1, 0.4), rng.uniform(-0.8, 0.8), rng.uniform(0.8, 1.5))


def random_spec(rng, n1=None, n2=None, d=None):
    n1 = n1 or int(rng.integers(3, 5))
    n2 = n2 or int(rng.integers(3, 5))
    d = d or int(rng.integers(2, 4))
    eps1 = Signature(tuple(int(s) for s in rng.choice([-1, 1], n1)))
    eps2 = Signature(tuple(int(s) for s in rng.choice([-1, 1], n2)))
    a1 = DirectionVector(tuple(rng.uniform(-0.6, 0.6, n1)))
    a2 = DirectionVector(tuple(rng.uniform(-0.6, 0.6, n2)))
    # coordinates in [-0.5, 0.5] keep |xi| <= 0.9 < 1
    box = DomainBox(tuple((-0.5, 0.5) for _ in range(n1 + n2 + d)))
    return WarpSpec(n1, n2, d, eps1, eps2, a1, a2,
                    random_profile(rng, True), random_profile(rng, True),
                    random_profile(rng, True), random_profile(rng, True),
                    float(rng.uniform(-2, 2)), domain=box)


@pytest.fixture(scope="session")
def fp3():
    return fam.FamilyParams(3, 1.0, 3)


def integrate_default(fp, beta0=8.0, gamma0=2.0, omega0=1.0, efolds=3.2, **kw):
    controls = fam.Controls(beta_stop=abs(beta0) * math.exp(-efolds), **kw)
    return fam.integrate_family(fp, fam.FamilyState(0.0, beta0, gamma0, omega0), (0.0, 50 * abs(beta0) / fp.m), controls)


@pytest.fixture(scope="session")
def traj3(fp3):
    return integrate_default(fp3)


@pytest.fixture(scope="session")
def family_spec3(traj3):
    return fam.reconstruct_profiles(traj3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
