"""Define dynamic fixtures."""
import json

import pytest

from unidefect.catalog import spectral_matrix_s6
from unidefect.fourier import fourier_matrix

from .common import fixture_path, load_fixture


@pytest.fixture(name="fourier_4")
def fourier_4_fixture():
    """Define a fixture to return F_4."""
    return fourier_matrix(4)


@pytest.fixture(name="fourier_4_json_path")
def fourier_4_json_path_fixture():
    """Define a fixture to return the path of F_4 in the JSON format."""
    return fixture_path("fourier_4.json")


@pytest.fixture(name="fourier_4_text_path")
def fourier_4_text_path_fixture():
    """Define a fixture to return the path of F_4 in the text format."""
    return fixture_path("fourier_4.txt")


@pytest.fixture(name="fourier_defects", scope="session")
def fourier_defects_fixture():
    """Define a fixture to return the known d(F_N) values for N = 1..32."""
    return json.loads(load_fixture("fourier_defects.json"))["defects"]


@pytest.fixture(name="malformed_path")
def malformed_path_fixture():
    """Define a fixture to return the path of a truncated matrix file."""
    return fixture_path("malformed.txt")


@pytest.fixture(name="not_unitary_path")
def not_unitary_path_fixture():
    """Define a fixture to return the path of a non-unitary matrix."""
    return fixture_path("not_unitary.txt")


@pytest.fixture(name="pcm_document", scope="session")
def pcm_document_fixture():
    """Define a fixture to return a PCM document for N = 4."""
    return json.loads(load_fixture("pcm_4.json"))


@pytest.fixture(name="s6")
def s6_fixture():
    """Define a fixture to return S_6."""
    return spectral_matrix_s6()
