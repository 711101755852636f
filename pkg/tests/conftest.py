import os
import pathlib

import numpy as np
import pytest

from diracmech.modelfile import load_model
from diracmech.report import run_analysis

ROOT = pathlib.Path(__file__).resolve().parents[1]
MODELS = ROOT / "models"
SEED = int(os.environ.get("DIRAC_MECH_SEED", "0"))


def model_path(name: str) -> str:
    return str(MODELS / f"{name}.json")


def _load(name):
    m = load_model(model_path(name))
    return m, run_analysis(m)


@pytest.fixture(scope="session")
def model_a():
    return _load("nonintegrable_a")


@pytest.fixture(scope="session")
def model_b():
    return _load("nonconstant_rank_b")


@pytest.fixture(scope="session")
def model_gauge():
    return _load("gauge_rank2")


@pytest.fixture(scope="session")
def model_free():
    return _load("empty_free_particle")


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
