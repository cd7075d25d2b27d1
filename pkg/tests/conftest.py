import numpy as np
import pytest

from holonewt import Dataset

XOR_INPUTS = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=complex)
XOR_TARGETS = np.array([[0], [1], [1], [0]], dtype=complex)


@pytest.fixture
def xor_dataset():
    return Dataset(XOR_INPUTS.copy(), XOR_TARGETS.copy())
