"""
Test `spectralservo.geometry.rotations` module.
"""


import numpy as np
import pytest

from spectralservo.geometry.rotations import (
    EulerZyz,
    RigidTransform,
    compose,
    exp_so3,
    geodesic_angle,
    hat,
    identity_transform,
    inverse,
    log_so3,
    make_rigid_transform,
    matrix_to_zyz,
    nearest_rotation,
    random_rotation,
    rotation_to_quaternion,
    to_center_free,
    vee,
    wrap_angle,
    zyz_to_matrix,
)


@pytest.mark.parametrize(
    "first, second",
    [
        (
            # `first`
            np.array([1.0, 2.0, 3.0]),
            # `second`
            np.array([-0.5, 0.2, 4.0]),
        ),
        (
            # `first`
            np.array([0.0, 0.0, 1.0]),
            # `second`
            np.array([1.0, 0.0, 0.0]),
        ),
    ]
)
def test_hat(first: np.ndarray, second: np.ndarray) -> None:
    """Test that `hat` gives matrix of cross product and `vee` inverts it."""
    np.testing.assert_allclose(hat(first) @ second, np.cross(first, second))
    np.testing.assert_allclose(vee(hat(first)), first)


@pytest.mark.parametrize(
    "vector, expected",
    [
        (
            # `vector`
            np.zeros(3),
            # `expected`
            np.eye(3)
        ),
        (
            # `vector`
            np.array([0.0, 0.0, np.pi / 2]),
            # `expected`
            np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        ),
        (
            # `vector`
            np.array([np.pi, 0.0, 0.0]),
            # `expected`
            np.diag([1.0, -1.0, -1.0])
        ),
        (
            # `vector`
            np.array([1e-12, 0.0, 0.0]),
            # `expected`
            np.eye(3)
        ),
    ]
)
def test_exp_so3(vector: np.ndarray, expected: np.ndarray) -> None:
    """Test `exp_so3` function."""
    result = exp_so3(vector)
    np.testing.assert_allclose(result, expected, atol=1e-11)


def test_log_so3_inverts_exp_so3(rng: np.random.Generator) -> None:
    """Test that `log_so3` is inverse of `exp_so3` for angles below pi."""
    for _ in range(20):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        vector = rng.uniform(0, 3) * axis
        np.testing.assert_allclose(log_so3(exp_so3(vector)), vector, atol=1e-9)


def test_zyz_round_trip(rng: np.random.Generator) -> None:
    """Test that conversion to Euler angles and back is identity."""
    for _ in range(50):
        rotation = random_rotation(rng)
        angles = matrix_to_zyz(rotation)
        assert 0 <= angles.alpha < 2 * np.pi
        assert 0 <= angles.beta <= np.pi
        assert 0 <= angles.gamma < 2 * np.pi
        np.testing.assert_allclose(zyz_to_matrix(angles), rotation, atol=1e-10)


@pytest.mark.parametrize(
    "angles",
    [
        # `angles`
        EulerZyz(0.7, 0.0, 0.5),
        EulerZyz(0.3, np.pi, 1.1),
        EulerZyz(0.0, 0.0, 0.0),
        EulerZyz(5.0, 1e-14, 0.0),
    ]
)
def test_matrix_to_zyz_at_gimbal_lock(angles: EulerZyz) -> None:
    """Test that degenerate rotations still reproduce the same matrix."""
    rotation = zyz_to_matrix(angles)
    result = matrix_to_zyz(rotation)
    assert result.gamma == 0.0
    np.testing.assert_allclose(zyz_to_matrix(result), rotation, atol=1e-10)


def test_zyz_to_matrix_is_product_of_exponents() -> None:
    """Test `zyz_to_matrix` function against product of elementary rotations."""
    alpha, beta, gamma = 0.4, 1.2, 2.5
    expected = (
        exp_so3([0, 0, alpha]) @ exp_so3([0, beta, 0]) @ exp_so3([0, 0, gamma])
    )
    result = zyz_to_matrix(EulerZyz(alpha, beta, gamma))
    np.testing.assert_allclose(result, expected, atol=1e-12)


@pytest.mark.parametrize(
    "angle, expected",
    [
        (0.5, 0.5),
        (-0.5, 2 * np.pi - 0.5),
        (2 * np.pi, 0.0),
        (-1e-20, 0.0),
    ]
)
def test_wrap_angle(angle: float, expected: float) -> None:
    """Test `wrap_angle` function."""
    result = wrap_angle(angle)
    assert 0 <= result < 2 * np.pi
    assert result == pytest.approx(expected)


def test_nearest_rotation(rng: np.random.Generator) -> None:
    """Test that drifted rotation is projected back to SO(3)."""
    rotation = random_rotation(rng)
    drifted = rotation + 1e-4 * rng.normal(size=(3, 3))
    result = nearest_rotation(drifted)
    np.testing.assert_allclose(result.T @ result, np.eye(3), atol=1e-12)
    assert np.linalg.det(result) == pytest.approx(1.0)
    np.testing.assert_allclose(result, rotation, atol=1e-3)


@pytest.mark.parametrize(
    "vector, expected",
    [
        (np.array([0.0, 0.0, 0.3]), 0.3),
        (np.array([1.0, 1.0, 0.0]), np.sqrt(2)),
        (np.zeros(3), 0.0),
    ]
)
def test_geodesic_angle(vector: np.ndarray, expected: float) -> None:
    """Test `geodesic_angle` function."""
    rotation = random_rotation(np.random.default_rng(1))
    result = geodesic_angle(rotation, rotation @ exp_so3(vector))
    assert result == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize(
    "vector, expected",
    [
        (np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0])),
        (
            np.array([0.0, 0.0, np.pi / 2]),
            np.array([np.sqrt(0.5), 0.0, 0.0, np.sqrt(0.5)])
        ),
        (
            np.array([0.0, 0.0, -np.pi / 2]),
            np.array([np.sqrt(0.5), 0.0, 0.0, -np.sqrt(0.5)])
        ),
    ]
)
def test_rotation_to_quaternion(vector: np.ndarray, expected: np.ndarray) -> None:
    """Test `rotation_to_quaternion` function."""
    result = rotation_to_quaternion(exp_so3(vector))
    np.testing.assert_allclose(result, expected, atol=1e-12)


def test_random_rotation_respects_max_angle(rng: np.random.Generator) -> None:
    """Test that random rotations do not exceed maximum angle."""
    for _ in range(100):
        rotation = random_rotation(rng, np.pi / 3)
        assert geodesic_angle(np.eye(3), rotation) <= np.pi / 3 + 1e-9


@pytest.mark.parametrize(
    "rotation, translation, match",
    [
        (
            # `rotation`
            2 * np.eye(3),
            # `translation`
            np.zeros(3),
            # `match`
            "Matrix is not a rotation matrix"
        ),
        (
            # `rotation`
            np.diag([1.0, 1.0, -1.0]),
            # `translation`
            np.zeros(3),
            # `match`
            "Matrix is not a rotation matrix"
        ),
        (
            # `rotation`
            np.eye(3),
            # `translation`
            np.array([0.0, np.nan, 0.0]),
            # `match`
            "Invalid translation"
        ),
    ]
)
def test_make_rigid_transform_with_invalid_input(
        rotation: np.ndarray, translation: np.ndarray, match: str
) -> None:
    """Test that `make_rigid_transform` rejects invalid input."""
    with pytest.raises(ValueError, match=match):
        make_rigid_transform(rotation, translation)


def test_compose_with_inverse(rng: np.random.Generator) -> None:
    """Test that composition of transform and its inverse is identity."""
    transform = RigidTransform(random_rotation(rng), rng.normal(size=3))
    for result in [
            compose(inverse(transform), transform),
            compose(transform, inverse(transform))
    ]:
        expected = identity_transform()
        np.testing.assert_allclose(result.rotation, expected.rotation, atol=1e-12)
        np.testing.assert_allclose(
            result.translation, expected.translation, atol=1e-12
        )


def test_to_center_free(rng: np.random.Generator) -> None:
    """Test that transform about center is re-expressed about origin."""
    transform = RigidTransform(random_rotation(rng), rng.normal(size=3))
    center = rng.normal(size=3)
    point = rng.normal(size=3)
    expected = (
        transform.rotation @ (point - center) + center + transform.translation
    )
    result = to_center_free(transform, center)
    np.testing.assert_allclose(
        result.rotation @ point + result.translation, expected, atol=1e-12
    )
