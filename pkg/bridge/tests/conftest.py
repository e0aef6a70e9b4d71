import os

import pytest

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def fixture_csv():
    return os.path.join(DATA_DIR, "reviews.csv")


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR
