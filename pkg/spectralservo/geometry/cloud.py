"""
Represent oriented point clouds and move them around.
"""


from typing import List, NamedTuple, Optional

import numpy as np

from .rotations import RigidTransform


NORMAL_TOLERANCE = 1e-6


class PointCloud(NamedTuple):
    """Points (in meters) with unit outward normals, both of shape (n, 3)."""

    points: np.ndarray
    normals: np.ndarray

    @property
    def n_points(self) -> int:
        """Return number of points."""
        return self.points.shape[0]


def make_point_cloud(
        points: np.ndarray,
        normals: np.ndarray,
        renormalize: bool = False
) -> PointCloud:
    """
    Make point cloud and validate it.

    :param points:
        array of shape (n, 3)
    :param normals:
        array of shape (n, 3) with unit rows
    :param renormalize:
        if it is `True`, normals are scaled to unit length instead of
        being rejected
    :return:
        read-only point cloud
    """
    points = np.array(points, dtype=float).reshape(-1, 3)
    normals = np.array(normals, dtype=float).reshape(-1, 3)
    if points.shape != normals.shape:
        raise ValueError(
            f"Number of points ({points.shape[0]}) and "
            f"number of normals ({normals.shape[0]}) mismatch."
        )
    if not (np.all(np.isfinite(points)) and np.all(np.isfinite(normals))):
        raise ValueError("Point cloud contains non-finite values.")
    lengths = np.linalg.norm(normals, axis=1)
    if renormalize:
        if np.any(lengths == 0):
            position = int(np.argmin(lengths))
            raise ValueError(f"Normal #{position} is a zero vector.")
        normals /= lengths[:, np.newaxis]
    else:
        deviations = np.abs(lengths - 1)
        if np.any(deviations > NORMAL_TOLERANCE):
            position = int(np.argmax(deviations))
            raise ValueError(
                f"Normal #{position} has length {lengths[position]}, "
                f"but unit length is required."
            )
    points.flags.writeable = False
    normals.flags.writeable = False
    return PointCloud(points, normals)


def centroid(cloud: PointCloud) -> np.ndarray:
    """
    Compute mean of points.

    :param cloud:
        non-empty point cloud
    :return:
        array of shape (3,)
    """
    if cloud.n_points == 0:
        raise ValueError("Centroid of an empty cloud is undefined.")
    return cloud.points.mean(axis=0)


def apply_transform(
        cloud: PointCloud,
        transform: RigidTransform,
        center: Optional[np.ndarray] = None
) -> PointCloud:
    """
    Rotate cloud about a center and then translate it.

    Points go to `R (p - c) + c + T` and normals go to `R n`.

    :param cloud:
        point cloud
    :param transform:
        rigid transform
    :param center:
        center of rotation, centroid of the cloud by default
    :return:
        transformed cloud
    """
    rotation, translation = transform
    if np.array_equal(rotation, np.eye(3)):
        if not np.any(translation):
            return cloud
        return make_point_cloud(cloud.points + translation, cloud.normals)
    if cloud.n_points == 0:
        return cloud
    center = centroid(cloud) if center is None else np.asarray(center)
    points = (cloud.points - center) @ rotation.T + center + translation
    normals = cloud.normals @ rotation.T
    return make_point_cloud(points, normals, renormalize=True)


def partial_view(cloud: PointCloud, viewpoint: np.ndarray) -> PointCloud:
    """
    Keep points whose normals face a viewpoint.

    :param cloud:
        non-empty point cloud
    :param viewpoint:
        position of sensor
    :return:
        points with `dot(n, viewpoint - p) > 0`
    """
    if cloud.n_points == 0:
        raise ValueError("Can not take a view of an empty cloud.")
    directions = np.asarray(viewpoint, dtype=float) - cloud.points
    is_visible = np.einsum('ij,ij->i', cloud.normals, directions) > 0
    return PointCloud(cloud.points[is_visible], cloud.normals[is_visible])


def merge_clouds(clouds: List[PointCloud]) -> PointCloud:
    """
    Concatenate point clouds.

    :param clouds:
        list of point clouds
    :return:
        point cloud with all points
    """
    if not clouds:
        return make_point_cloud(np.zeros((0, 3)), np.zeros((0, 3)))
    points = np.vstack([cloud.points for cloud in clouds])
    normals = np.vstack([cloud.normals for cloud in clouds])
    return make_point_cloud(points, normals)


def add_position_noise(
        cloud: PointCloud, sigma: float, rng: np.random.Generator
) -> PointCloud:
    """
    Add isotropic Gaussian noise to positions of points.

    :param cloud:
        point cloud
    :param sigma:
        standard deviation of noise (in meters)
    :param rng:
        random numbers generator
    :return:
        noisy cloud with the same normals
    """
    if sigma < 0:
        raise ValueError(f"Standard deviation must be non-negative, got {sigma}.")
    if sigma == 0:
        return cloud
    noise = rng.normal(scale=sigma, size=cloud.points.shape)
    return make_point_cloud(cloud.points + noise, cloud.normals)
