"""
This file contains shared fixtures for all tests.
"""

import os
from pathlib import Path
from typing import Dict

import numpy as np
import pytest

from mcfauc.cli.config import Configuration
from mcfauc.model.cohort import Cohort
from tests.helpers import hand_cohort, simulated_cohort, write_cohort_files

# Monte Carlo acceptance checks take minutes; opt in with MCFAUC_RUN_SLOW=1.
RUN_SLOW = os.getenv("MCFAUC_RUN_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="set MCFAUC_RUN_SLOW=1 to run Monte Carlo checks")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def test_config() -> Configuration:
    """A Configuration with the built-in defaults and fixed output settings."""
    return Configuration(
        {
            "analysis": {"alpha": 0.05},
            "output": {"format": "json", "digits": None},
            "simulation": {"threads": 1, "max_failure_rate": 0.01, "block_size": 4},
            "logging": {"level": "WARNING"},
        }
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def small_cohort() -> Cohort:
    """Two subjects per arm, no deaths, follow-up to 2."""
    return hand_cohort()


@pytest.fixture(scope="session")
def case1_cohort() -> Cohort:
    """A simulated Case 1 trial with 400 subjects and three covariates."""
    return simulated_cohort(case=1, theta=-0.32, n=400, seed=11)


@pytest.fixture
def cohort_files(tmp_path: Path, case1_cohort: Cohort) -> Dict[str, Path]:
    """The Case 1 cohort written as subjects.csv and events.csv."""
    return write_cohort_files(case1_cohort, tmp_path)
