"""
Extract voxel grids and extended Gaussian images from point clouds.
"""


from .egi import (
    Egi,
    SphereGrid,
    build_egi,
    cartesian_to_spherical,
    dump_egi,
    make_sphere_grid,
    nearest_node,
    node_directions,
    spherical_to_cartesian,
)
from .voxel_grid import (
    GridSpec,
    VoxelGrid,
    crop_to_grid,
    dump_voxel_grid,
    make_grid_spec,
    validate_grid_spec,
    voxel_index,
    voxel_indices,
    voxelize,
)


__all__ = [
    'Egi',
    'GridSpec',
    'SphereGrid',
    'VoxelGrid',
    'build_egi',
    'cartesian_to_spherical',
    'crop_to_grid',
    'dump_egi',
    'dump_voxel_grid',
    'make_grid_spec',
    'make_sphere_grid',
    'nearest_node',
    'node_directions',
    'spherical_to_cartesian',
    'validate_grid_spec',
    'voxel_index',
    'voxel_indices',
    'voxelize',
]
