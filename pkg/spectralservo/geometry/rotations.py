"""
Do algebra of rotations and rigid transforms.

Rotations are 3x3 arrays. A rigid transform pairs a rotation with
a translation in meters and is applied about a center point, so that
a point `p` goes to `R (p - c) + c + T`.
"""


from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial.transform import Rotation


class RigidTransform(NamedTuple):
    """Rotation and translation (in meters)."""

    rotation: np.ndarray
    translation: np.ndarray


class EulerZyz(NamedTuple):
    """ZYZ Euler angles (in radians) such that `R = Rz(alpha) Ry(beta) Rz(gamma)`."""

    alpha: float
    beta: float
    gamma: float


def hat(vector: np.ndarray) -> np.ndarray:
    """
    Map a 3-vector to the skew-symmetric matrix of cross product with it.

    :param vector:
        array of shape (3,)
    :return:
        skew-symmetric array of shape (3, 3)
    """
    x, y, z = vector
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def vee(matrix: np.ndarray) -> np.ndarray:
    """
    Map a skew-symmetric matrix back to its 3-vector.

    :param matrix:
        skew-symmetric array of shape (3, 3)
    :return:
        array of shape (3,)
    """
    return np.array([matrix[2, 1], matrix[0, 2], matrix[1, 0]])


def exp_so3(vector: np.ndarray) -> np.ndarray:
    """
    Compute rotation matrix from rotation vector (Rodrigues formula).

    :param vector:
        rotation vector, i.e., unit axis multiplied by angle in radians
    :return:
        rotation matrix
    """
    vector = np.asarray(vector, dtype=float)
    angle = np.linalg.norm(vector)
    skew = hat(vector)
    if angle < 1e-8:
        return np.eye(3) + skew + 0.5 * skew @ skew
    first_coef = np.sin(angle) / angle
    second_coef = (1 - np.cos(angle)) / angle ** 2
    return np.eye(3) + first_coef * skew + second_coef * skew @ skew


def log_so3(rotation: np.ndarray) -> np.ndarray:
    """
    Compute rotation vector of a rotation matrix.

    :param rotation:
        rotation matrix
    :return:
        rotation vector with norm in [0, pi]
    """
    return Rotation.from_matrix(rotation).as_rotvec()


def zyz_to_matrix(angles: EulerZyz) -> np.ndarray:
    """
    Convert ZYZ Euler angles to rotation matrix.

    :param angles:
        ZYZ Euler angles
    :return:
        rotation matrix
    """
    z_axis = np.array([0.0, 0.0, 1.0])
    y_axis = np.array([0.0, 1.0, 0.0])
    return (
        exp_so3(angles.alpha * z_axis)
        @ exp_so3(angles.beta * y_axis)
        @ exp_so3(angles.gamma * z_axis)
    )


def matrix_to_zyz(rotation: np.ndarray, atol: float = 1e-12) -> EulerZyz:
    """
    Convert rotation matrix to ZYZ Euler angles.

    In the gimbal-lock cases (`beta` equal to 0 or to pi), `gamma` is set
    to 0 and the whole rotation about Z is put to `alpha`.

    :param rotation:
        rotation matrix
    :param atol:
        threshold for detection of gimbal lock
    :return:
        angles with `alpha` and `gamma` in [0, 2 pi) and `beta` in [0, pi]
    """
    validate_rotation(rotation)
    sin_beta = np.hypot(rotation[0, 2], rotation[1, 2])
    if sin_beta < atol:
        gamma = 0.0
        if rotation[2, 2] > 0:
            beta = 0.0
            alpha = np.arctan2(rotation[1, 0], rotation[0, 0])
        else:
            beta = np.pi
            alpha = np.arctan2(-rotation[1, 0], rotation[1, 1])
    else:
        alpha = np.arctan2(rotation[1, 2], rotation[0, 2])
        beta = np.arctan2(sin_beta, rotation[2, 2])
        gamma = np.arctan2(rotation[2, 1], -rotation[2, 0])
    return EulerZyz(wrap_angle(alpha), float(beta), wrap_angle(gamma))


def wrap_angle(angle: float) -> float:
    """
    Bring angle to [0, 2 pi).

    :param angle:
        angle in radians
    :return:
        equivalent angle from [0, 2 pi)
    """
    wrapped = float(np.mod(angle, 2 * np.pi))
    if wrapped >= 2 * np.pi:
        wrapped = 0.0
    return wrapped


def is_rotation(matrix: np.ndarray, atol: float = 1e-6) -> bool:
    """
    Check that a matrix is orthonormal and has determinant 1.

    :param matrix:
        matrix to be checked
    :param atol:
        absolute tolerance
    :return:
        `True` if the matrix is a rotation matrix, `False` else
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (3, 3) or not np.all(np.isfinite(matrix)):
        return False
    orthonormal = np.allclose(matrix.T @ matrix, np.eye(3), atol=atol)
    return orthonormal and abs(np.linalg.det(matrix) - 1) < atol


def validate_rotation(matrix: np.ndarray, atol: float = 1e-6) -> None:
    """
    Check that a matrix is a rotation matrix.

    :param matrix:
        matrix to be checked
    :param atol:
        absolute tolerance
    :return:
        None
    """
    if not is_rotation(matrix, atol):
        raise ValueError(f"Matrix is not a rotation matrix: {matrix}.")


def nearest_rotation(matrix: np.ndarray) -> np.ndarray:
    """
    Project a matrix onto SO(3) with singular value decomposition.

    :param matrix:
        array of shape (3, 3), usually a slightly drifted rotation matrix
    :return:
        the closest (in Frobenius norm) rotation matrix
    """
    left, _, right = np.linalg.svd(matrix)
    correction = np.diag([1.0, 1.0, np.sign(np.linalg.det(left @ right))])
    return left @ correction @ right


def geodesic_angle(first: np.ndarray, second: np.ndarray) -> float:
    """
    Compute angle of relative rotation between two rotations.

    :param first:
        rotation matrix
    :param second:
        rotation matrix
    :return:
        angle in radians from [0, pi]
    """
    return float(Rotation.from_matrix(first.T @ second).magnitude())


def rotation_to_quaternion(rotation: np.ndarray) -> np.ndarray:
    """
    Convert rotation matrix to unit quaternion.

    :param rotation:
        rotation matrix
    :return:
        quaternion (w, x, y, z) with non-negative `w`
    """
    x, y, z, w = Rotation.from_matrix(rotation).as_quat()
    quaternion = np.array([w, x, y, z])
    if w < 0:
        quaternion = -quaternion
    return quaternion


def random_rotation(
        rng: np.random.Generator, max_angle: float = np.pi
) -> np.ndarray:
    """
    Draw rotation with uniformly distributed axis and angle.

    :param rng:
        random numbers generator
    :param max_angle:
        maximum angle of rotation (in radians)
    :return:
        rotation matrix
    """
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0, max_angle)
    return exp_so3(angle * axis)


def make_rigid_transform(
        rotation: Optional[np.ndarray] = None,
        translation: Optional[np.ndarray] = None
) -> RigidTransform:
    """
    Make rigid transform and validate it.

    :param rotation:
        rotation matrix, identity by default
    :param translation:
        translation in meters, zero by default
    :return:
        rigid transform
    """
    rotation = np.eye(3) if rotation is None else np.array(rotation, float)
    translation = (
        np.zeros(3) if translation is None else np.array(translation, float)
    )
    validate_rotation(rotation)
    if translation.shape != (3,) or not np.all(np.isfinite(translation)):
        raise ValueError(f"Invalid translation: {translation}.")
    return RigidTransform(rotation, translation)


def identity_transform() -> RigidTransform:
    """Make transform that changes nothing."""
    return RigidTransform(np.eye(3), np.zeros(3))


def compose(second: RigidTransform, first: RigidTransform) -> RigidTransform:
    """
    Compose two transforms applied about the same center.

    :param second:
        transform to be applied after `first`
    :param first:
        transform to be applied before `second`
    :return:
        transform equivalent to applying `first` and then `second`
    """
    rotation = second.rotation @ first.rotation
    translation = second.rotation @ first.translation + second.translation
    return RigidTransform(rotation, translation)


def inverse(transform: RigidTransform) -> RigidTransform:
    """
    Invert transform applied about a fixed center.

    :param transform:
        rigid transform
    :return:
        transform that cancels `transform`
    """
    rotation = transform.rotation.T
    return RigidTransform(rotation, -rotation @ transform.translation)


def to_center_free(
        transform: RigidTransform, center: np.ndarray
) -> RigidTransform:
    """
    Re-express transform applied about `center` as transform about origin.

    :param transform:
        rigid transform applied about `center`
    :param center:
        center of rotation
    :return:
        transform `(R, t)` such that a point goes to `R p + t`
    """
    rotation = transform.rotation
    translation = center - rotation @ center + transform.translation
    return RigidTransform(rotation, translation)
