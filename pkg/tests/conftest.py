import numpy as np
import pytest

from neutralctl import NeutralSystem

Z2 = np.zeros((2, 2))


@pytest.fixture
def ex3():
    # double integrator chain with neutral coupling, fully controllable
    return NeutralSystem(
        n=2, m=1, p=0,
        A_minus1=[[0, 1], [0, 0]],
        A0=[[0, 1], [0, 0]],
        A1=Z2,
        B=[[0], [1]],
    )


@pytest.fixture
def ex3_transposed_observed():
    # transposed partner of ex3; its second component finally observes it
    return NeutralSystem(
        n=2, m=1, p=1,
        A_minus1=[[0, 0], [1, 0]],
        A0=[[0, 0], [1, 0]],
        A1=Z2,
        B=[[0], [0]],
        C=[[0, 1]],
    )


@pytest.fixture
def ex4():
    # observability fixture: no meaningful input, delayed output y = z_1(t-1)
    return NeutralSystem(
        n=2, m=1, p=1,
        A_minus1=[[0, -1], [0, 1]],
        A0=Z2,
        A1=[[0, 1], [0, 0]],
        B=[[0], [0]],
        C=[[1, 0]],
    )


@pytest.fixture
def ex5():
    # neutral coefficient with one immovable-looking eigenvalue at 1 that the
    # input can reach; null controllable but not fully controllable
    return NeutralSystem(
        n=2, m=1, p=0,
        A_minus1=[[1, 0], [0, 0]],
        A0=[[0, 0], [1, 0]],
        A1=Z2,
        B=[[1], [0]],
    )


@pytest.fixture
def ex5_transposed():
    # transposed partner of ex5 with the output that finally observes it
    return NeutralSystem(
        n=2, m=1, p=1,
        A_minus1=[[1, 0], [0, 0]],
        A0=[[0, 1], [0, 0]],
        A1=Z2,
        B=[[0], [0]],
        C=[[1, 0]],
    )


EX5_JSON = """{
  "n": 2, "m": 1, "p": 0,
  "A_minus1": [[1, 0], [0, 0]],
  "A0": [[0, 0], [1, 0]],
  "A1": [[0, 0], [0, 0]],
  "B": [[1], [0]]
}
"""

EX3_JSON = """{
  "n": 2, "m": 1, "p": 0,
  "A_minus1": [[0, 1], [0, 0]],
  "A0": [[0, 1], [0, 0]],
  "A1": [[0, 0], [0, 0]],
  "B": [[0], [1]]
}
"""

EX4_JSON = """{
  "n": 2, "m": 1, "p": 1,
  "A_minus1": [[0, -1], [0, 1]],
  "A0": [[0, 0], [0, 0]],
  "A1": [[0, 1], [0, 0]],
  "B": [[0], [0]],
  "C": [[1, 0]]
}
"""


@pytest.fixture
def ex5_file(tmp_path):
    path = tmp_path / "ex5.json"
    path.write_text(EX5_JSON)
    return path


@pytest.fixture
def ex3_file(tmp_path):
    path = tmp_path / "ex3.json"
    path.write_text(EX3_JSON)
    return path


@pytest.fixture
def ex4_file(tmp_path):
    path = tmp_path / "ex4.json"
    path.write_text(EX4_JSON)
    return path


def random_pair(rng, n_max=6, m_max=3):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    A = rng.integers(-2, 3, size=(n, n)).astype(float)
    B = rng.integers(-2, 3, size=(n, m)).astype(float)
    return A, B
