"""
Pytest configuration and shared fixtures for hypsurf tests.
"""
import math
import sys
from pathlib import Path

import pytest

# Add the src directory to the path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

SYSTOLE_G2 = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


@pytest.fixture(autouse=True)
def _settings_cache_isolation(monkeypatch):
    """Drop the cached settings dict before/after every test.

    Prevents env-override pollution (``--tolerance`` writes
    ``HYPSURF_TOLERANCE``) from leaking between tests via the module-level
    cache in ``settings_service``.
    """
    from hypsurf.config.settings_service import TOLERANCE_ENV, clear_cache

    monkeypatch.delenv(TOLERANCE_ENV, raising=False)
    clear_cache()
    yield
    clear_cache()


@pytest.fixture(scope="session")
def genus2():
    """The regular genus-2 surface: octagon with opposite sides paired."""
    from hypsurf.surfaces.regular import build_regular_surface
    return build_regular_surface(2)


@pytest.fixture(scope="session")
def genus3():
    from hypsurf.surfaces.regular import build_regular_surface
    return build_regular_surface(3)


@pytest.fixture(scope="session")
def census_g2_short(genus2):
    """Classes up to just past the systole: only the systole classes."""
    from hypsurf.census.geodesics import enumerate_closed_geodesics
    return enumerate_closed_geodesics(genus2, 3.1)


@pytest.fixture(scope="session")
def census_g2_medium(genus2):
    """Classes up to 6.2, which takes in the squares of the systole classes."""
    from hypsurf.census.geodesics import enumerate_closed_geodesics
    return enumerate_closed_geodesics(genus2, 6.2)


@pytest.fixture
def run_config(tmp_path):
    """Default RunConfig writing into a temp directory."""
    from hypsurf.config.run_config import RunConfig
    return RunConfig.from_settings().with_overrides(out=str(tmp_path / "out"), seed=7)


@pytest.fixture(scope="session")
def census_g2_long(genus2):
    """Classes up to 8.1: the first self-intersecting classes and the L = 8 band."""
    from hypsurf.census.geodesics import enumerate_closed_geodesics
    return enumerate_closed_geodesics(genus2, 8.1)
