import numpy as np
import pytest

from cieig.problems import (
    Grid2D,
    assemble_thermal,
    dense_ground_truth,
    grf_sample,
    target_count,
)
from cieig.sparse import MatrixPencil, SparseMatrix


def diag_pencil(diag_a, diag_b=None):
    """Diagonal test pencil with analytically known spectrum."""
    a = np.diag(np.asarray(diag_a, dtype=float))
    if diag_b is None:
        b = np.eye(len(diag_a))
    else:
        b = np.diag(np.asarray(diag_b, dtype=float))
    return MatrixPencil(
        a=SparseMatrix.from_dense(a),
        b=SparseMatrix.from_dense(b),
        hermitian=True,
        b_positive_definite=True,
        problem_id="diag",
    )


@pytest.fixture(scope="session")
def thermal10():
    grid = Grid2D(10, 10)
    fld = grf_sample(grid, 1.0, 0.1, 0.2, seed=7)
    return assemble_thermal(fld, 1.0)


@pytest.fixture(scope="session")
def thermal20():
    grid = Grid2D(20, 20)
    fld = grf_sample(grid, 1.0, 0.1, 0.2, seed=11)
    return assemble_thermal(fld, 1.0)


@pytest.fixture(scope="session")
def thermal20_truth(thermal20):
    return dense_ground_truth(thermal20, target_count(thermal20.n))
