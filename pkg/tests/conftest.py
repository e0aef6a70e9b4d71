import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))  # for the synth helper

from substrat.dataset import load_csv

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
FLIGHT_CSV = os.path.join(DATA_DIR, "flight_reviews.csv")


@pytest.fixture(scope="session")
def flight_csv():
    return FLIGHT_CSV


@pytest.fixture(scope="session")
def flight_reviews():
    """The flight service review example: 10x5, target Satisfied."""
    return load_csv(FLIGHT_CSV, "Satisfied", name="flight_reviews")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
