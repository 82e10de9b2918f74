"""
Sample synthetic oriented point clouds from simple shapes.

Every shape is centered at origin (unless `center` parameter is passed)
and its sampling depends only on parameters and seed.
"""


from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .cloud import PointCloud, apply_transform, make_point_cloud, merge_clouds
from .rotations import RigidTransform, exp_so3


def _as_positive_vector(value: Any, name: str) -> np.ndarray:
    vector = np.broadcast_to(np.asarray(value, dtype=float), (3,)).copy()
    if np.any(vector <= 0):
        raise ValueError(f"`{name}` must be positive, got {value}.")
    return vector


def _as_positive_number(value: Any, name: str) -> float:
    value = float(value)
    if value <= 0:
        raise ValueError(f"`{name}` must be positive, got {value}.")
    return value


def _draw_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    vectors = rng.normal(size=(n, 3))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def sample_sphere(
        rng: np.random.Generator, sample_count: int, radius: float = 0.05
) -> PointCloud:
    """
    Sample points from sphere surface.

    :param rng:
        random numbers generator
    :param sample_count:
        number of points
    :param radius:
        radius of sphere (in meters)
    :return:
        point cloud
    """
    radius = _as_positive_number(radius, 'radius')
    normals = _draw_unit_vectors(rng, sample_count)
    return make_point_cloud(radius * normals, normals)


def sample_box(
        rng: np.random.Generator,
        sample_count: int,
        sizes: Any = (0.1, 0.08, 0.06)
) -> PointCloud:
    """
    Sample points from box surface, faces are chosen proportionally to area.

    :param rng:
        random numbers generator
    :param sample_count:
        number of points
    :param sizes:
        lengths of edges along X, Y, and Z (in meters) or one common length
    :return:
        point cloud
    """
    sizes = _as_positive_vector(sizes, 'sizes')
    areas = np.array([sizes[1] * sizes[2], sizes[0] * sizes[2], sizes[0] * sizes[1]])
    face_probabilities = np.repeat(areas, 2) / (2 * areas.sum())
    faces = rng.choice(6, size=sample_count, p=face_probabilities)
    points = rng.uniform(-0.5, 0.5, size=(sample_count, 3)) * sizes
    normals = np.zeros((sample_count, 3))
    axes = faces // 2
    signs = np.where(faces % 2 == 0, 1.0, -1.0)
    rows = np.arange(sample_count)
    points[rows, axes] = signs * sizes[axes] / 2
    normals[rows, axes] = signs
    return make_point_cloud(points, normals)


def sample_cylinder(
        rng: np.random.Generator,
        sample_count: int,
        radius: float = 0.04,
        height: float = 0.12
) -> PointCloud:
    """
    Sample points from surface of a closed cylinder with axis along Z.

    :param rng:
        random numbers generator
    :param sample_count:
        number of points
    :param radius:
        radius of cylinder (in meters)
    :param height:
        height of cylinder (in meters)
    :return:
        point cloud
    """
    radius = _as_positive_number(radius, 'radius')
    height = _as_positive_number(height, 'height')
    side_area = 2 * np.pi * radius * height
    cap_area = np.pi * radius ** 2
    total_area = side_area + 2 * cap_area
    parts = rng.choice(
        3, size=sample_count,
        p=[side_area / total_area, cap_area / total_area, cap_area / total_area]
    )
    angles = rng.uniform(0, 2 * np.pi, size=sample_count)
    heights = rng.uniform(-height / 2, height / 2, size=sample_count)
    distances = radius * np.sqrt(rng.uniform(size=sample_count))

    is_side = parts == 0
    signs = np.where(parts == 1, 1.0, -1.0)
    radii = np.where(is_side, radius, distances)
    points = np.column_stack([
        radii * np.cos(angles),
        radii * np.sin(angles),
        np.where(is_side, heights, signs * height / 2),
    ])
    normals = np.column_stack([
        np.where(is_side, np.cos(angles), 0.0),
        np.where(is_side, np.sin(angles), 0.0),
        np.where(is_side, 0.0, signs),
    ])
    return make_point_cloud(points, normals)


def sample_ellipsoid(
        rng: np.random.Generator,
        sample_count: int,
        semi_axes: Any = (0.06, 0.04, 0.025)
) -> PointCloud:
    """
    Sample points from ellipsoid surface.

    Points are images of uniformly distributed unit vectors, so sampling
    is denser near the ends of the shortest semi-axis.

    :param rng:
        random numbers generator
    :param sample_count:
        number of points
    :param semi_axes:
        semi-axes along X, Y, and Z (in meters)
    :return:
        point cloud
    """
    semi_axes = _as_positive_vector(semi_axes, 'semi_axes')
    points = _draw_unit_vectors(rng, sample_count) * semi_axes
    normals = points / semi_axes ** 2
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    return make_point_cloud(points, normals)


def get_shapes_registry() -> Dict[str, Callable]:
    """
    Get mapping from shape name to function that samples it.

    :return:
        registry of shapes
    """
    registry = {
        'sphere': sample_sphere,
        'box': sample_box,
        'cylinder': sample_cylinder,
        'ellipsoid': sample_ellipsoid,
    }
    return registry


def generate_shape(
        kind: str,
        params: Optional[Dict[str, Any]] = None,
        sample_count: int = 2000,
        seed: int = 0
) -> PointCloud:
    """
    Sample oriented point cloud from surface of a shape.

    :param kind:
        name of shape, one of 'sphere', 'box', 'cylinder', and 'ellipsoid'
    :param params:
        parameters of the shape; `center` is a special parameter
        that shifts the shape from origin
    :return:
        point cloud
    """
    registry = get_shapes_registry()
    if kind not in registry:
        raise ValueError(
            f"Unknown shape: {kind}, allowed shapes are {sorted(registry)}."
        )
    if int(sample_count) != sample_count or sample_count < 1:
        raise ValueError(
            f"Number of points must be a positive integer, got {sample_count}."
        )
    params = dict(params or {})
    center = np.asarray(params.pop('center', np.zeros(3)), dtype=float)
    rng = np.random.default_rng(seed)
    try:
        cloud = registry[kind](rng, int(sample_count), **params)
    except TypeError as e:
        raise ValueError(f"Invalid parameters of {kind}: {params}.") from e
    if np.any(center):
        cloud = make_point_cloud(cloud.points + center, cloud.normals)
    return cloud


def compose_scene(objects: List[Dict[str, Any]], seed: int = 0) -> PointCloud:
    """
    Place several shapes into one scene.

    :param objects:
        descriptions of objects; each of them has keys 'kind', 'params',
        'sample_count', 'position', and 'rotation_vector' (all but the first
        one are optional)
    :param seed:
        base seed, i-th object is sampled with `seed + i`
    :return:
        merged point cloud
    """
    clouds = []
    for i, description in enumerate(objects):
        cloud = generate_shape(
            description['kind'],
            description.get('params'),
            description.get('sample_count', 2000),
            seed + i
        )
        rotation = exp_so3(description.get('rotation_vector', np.zeros(3)))
        position = np.asarray(description.get('position', np.zeros(3)), float)
        cloud = apply_transform(
            cloud, RigidTransform(rotation, position), np.zeros(3)
        )
        clouds.append(cloud)
    return merge_clouds(clouds)
