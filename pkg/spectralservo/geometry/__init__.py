"""
Handle oriented point clouds, rotations, and synthetic shapes.
"""


from .cloud import (
    PointCloud,
    add_position_noise,
    apply_transform,
    centroid,
    make_point_cloud,
    merge_clouds,
    partial_view,
)
from .rotations import (
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
    validate_rotation,
    vee,
    zyz_to_matrix,
)
from .shapes import compose_scene, generate_shape, get_shapes_registry


__all__ = [
    'EulerZyz',
    'PointCloud',
    'RigidTransform',
    'add_position_noise',
    'apply_transform',
    'centroid',
    'compose',
    'compose_scene',
    'exp_so3',
    'generate_shape',
    'geodesic_angle',
    'get_shapes_registry',
    'hat',
    'identity_transform',
    'inverse',
    'log_so3',
    'make_point_cloud',
    'make_rigid_transform',
    'matrix_to_zyz',
    'merge_clouds',
    'nearest_rotation',
    'partial_view',
    'random_rotation',
    'rotation_to_quaternion',
    'to_center_free',
    'validate_rotation',
    'vee',
    'zyz_to_matrix',
]
