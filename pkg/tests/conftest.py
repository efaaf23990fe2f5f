import numpy as np
import pytest

from pencilradius.pencil import Pencil


def rand_complex(rng, rows, cols, scale=1.0):
    return scale * (rng.standard_normal((rows, cols))
                    + 1j * rng.standard_normal((rows, cols)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


# the four hand-analyzed pencils used throughout

def swap_pencil():
    """T = diag(1,2) against the coordinate swap; drop points at +-sqrt(2)."""
    return Pencil(np.diag([1.0, 2.0]).astype(complex),
                  np.array([[0, 1], [1, 0]], dtype=complex))


def diag_pencil():
    """T = diag(1/2, 2) against the identity; gamma_m = 2^-m exactly."""
    return Pencil(np.diag([0.5, 2.0]).astype(complex), np.eye(2, dtype=complex))


def rect_pencil():
    """2x3 pencil whose rows become dependent exactly at lambda = 1; k = 0."""
    return Pencil(np.array([[1, 0, 0], [0, 1, 0]], dtype=complex),
                  np.array([[0, 0, 0], [-1, 1, 0]], dtype=complex))


def kpos_pencil():
    """diag(1, 0) against the identity; kernel dimension jumps at 0, k = 1."""
    return Pencil(np.array([[1, 0], [0, 0]], dtype=complex), np.eye(2, dtype=complex))


def inf_pencil():
    """(I, 0): the pencil never loses rank, every estimate is infinite."""
    return Pencil(np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex))
