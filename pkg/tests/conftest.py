"""
Test Fixtures and Configuration for the kpsolver Package

Shared pytest fixtures for the numerics and utils test suites: mock loggers,
soliton scattering data and small grids.

Key Fixture Categories:
- Logging Mocks
- Scattering Data (one-soliton, two-soliton, shifted experiment, zero-amplitude)
- Evaluation Grids (inclusive and periodic)

Dependencies:
- pytest: Testing framework
- unittest.mock: Mocking utilities
- numpy: Array comparisons
"""

import logging
import math

import numpy as np
import pytest
from unittest.mock import MagicMock

from kpsolver.numerics.fields import Grid2D
from kpsolver.numerics.scattering import make_data
from kpsolver.utils.config import DEFAULT_XSHIFT, DEFAULT_YSHIFT


@pytest.fixture
def mock_logger():
    """
    Create a mock logger that can be used in tests.

    Returns:
        MagicMock: A mock logger object with common logging methods
    """
    logger = MagicMock(spec=logging.Logger)
    logger.debug = MagicMock()
    logger.info = MagicMock()
    logger.warning = MagicMock()
    logger.error = MagicMock()
    logger.critical = MagicMock()
    return logger


@pytest.fixture
def one_soliton():
    """Single soliton a=1.55, b=1.45 used by the closed-form oracles."""
    return make_data([(1.55, 1.45)])


@pytest.fixture
def two_soliton():
    """The two-soliton interaction data (1.55, 1.45) + (1.3, 0)."""
    return make_data([(1.55, 1.45), (1.3, 0.0)])


@pytest.fixture
def experiment_data():
    """Two-soliton data with the default kernel shift of kpsolve runs."""
    return make_data(
        [(1.55, 1.45), (1.3, 0.0)], xshift=DEFAULT_XSHIFT, yshift=DEFAULT_YSHIFT
    )


@pytest.fixture
def experiment_grid():
    """The 2^7 x 2^7 inclusive grid on the 10 pi box."""
    return Grid2D(10 * math.pi, 10 * math.pi, 128, 128)


@pytest.fixture
def zero_data():
    """Zero-amplitude data: every kernel sample is exactly zero."""
    return make_data([(1.0, 1.0, 0.0)])


@pytest.fixture
def small_grid():
    """Coarse inclusive grid on the 10 pi box."""
    return Grid2D(10 * math.pi, 10 * math.pi, 17, 9)


@pytest.fixture
def periodic_grid():
    """Power-of-two periodic grid for the spectral integrator."""
    return Grid2D(10 * math.pi, 10 * math.pi, 32, 32, periodic=True)


@pytest.fixture
def rng():
    """Seeded generator so random spot checks are reproducible."""
    return np.random.default_rng(20240601)
