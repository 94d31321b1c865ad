import numpy as np
import pytest

from monotet.geometry import Tetrahedron
from monotet.scene import reference_scene
from monotet.tipping import obtuse_paths
from monotet.zones import enumerate_zones


def random_tetra(rng, size=100.0):
    """Gaussian vertices scaled so the body is around ``size`` mm across."""
    while True:
        try:
            return Tetrahedron(size * rng.standard_normal((4, 3)))
        except ValueError:
            continue


def regular_tetra(size=100.0):
    p = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return Tetrahedron(size / 2 / np.sqrt(2) * p)


@pytest.fixture(scope="session")
def ref_tetra():
    return reference_scene().tetrahedron


@pytest.fixture(scope="session")
def ref_report(ref_tetra):
    return enumerate_zones(ref_tetra)


@pytest.fixture(scope="session")
def ref_path(ref_tetra):
    (path,) = obtuse_paths(ref_tetra)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
