"""
Define fixtures.
"""


from tempfile import NamedTemporaryFile

import numpy as np
import pytest

from spectralservo.geometry import PointCloud, generate_shape


@pytest.fixture()
def path_to_tmp_file() -> str:
    """Get path to empty temporary file."""
    with NamedTemporaryFile() as tmp_file:
        yield tmp_file.name


path_to_another_tmp_file = path_to_tmp_file


@pytest.fixture(scope='session')
def ellipsoid_cloud() -> PointCloud:
    """Get cloud sampled from ellipsoid without rotational symmetry."""
    return generate_shape(
        'ellipsoid', {'semi_axes': [0.06, 0.04, 0.025]}, 3000, seed=0
    )


@pytest.fixture()
def rng() -> np.random.Generator:
    """Get seeded random numbers generator."""
    return np.random.default_rng(42)
