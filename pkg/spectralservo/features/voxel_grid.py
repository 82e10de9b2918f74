"""
Rasterize point clouds to regular 3D occupancy grids.
"""


from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from spectralservo.geometry import PointCloud
from spectralservo.utils.misc import is_power_of_two, next_power_of_two


AXES_NAMES = 'xyz'


class GridSpec(NamedTuple):
    """Geometry of a voxel grid."""

    resolution: float
    origin: np.ndarray
    dims: Tuple[int, int, int]

    @property
    def n_cells(self) -> int:
        """Return total number of voxels."""
        return int(np.prod(self.dims))


class VoxelGrid(NamedTuple):
    """Voxel values on a grid of a given geometry."""

    spec: GridSpec
    values: np.ndarray


def validate_grid_spec(spec: GridSpec) -> None:
    """
    Check that grid geometry is valid.

    :param spec:
        geometry of grid
    :return:
        None
    """
    if not spec.resolution > 0:
        raise ValueError(f"Resolution must be positive, got {spec.resolution}.")
    if len(spec.dims) != 3:
        raise ValueError(f"Grid must be 3D, got dimensions {spec.dims}.")
    for axis_name, dim in zip(AXES_NAMES, spec.dims):
        if not is_power_of_two(dim):
            raise ValueError(
                f"Grid size along axis {axis_name} must be "
                f"a power of two, got {dim}."
            )


def make_grid_spec(
        clouds: List[PointCloud],
        resolution: float = 0.008,
        dims: Optional[int] = None,
        padding: float = 0.1
) -> GridSpec:
    """
    Fit cubic grid around clouds.

    :param clouds:
        clouds that must fit into the grid (at least one point in total)
    :param resolution:
        edge of a voxel (in meters)
    :param dims:
        number of voxels along each axis; if it is not passed, the least
        power of two that covers the clouds with padding is used
    :param padding:
        margin (in meters) around bounding box of the clouds
    :return:
        geometry of grid centered at bounding box center
    """
    points = np.vstack([cloud.points for cloud in clouds])
    if points.shape[0] == 0:
        raise ValueError("Can not fit grid around empty clouds.")
    if padding < 0:
        raise ValueError(f"Padding must be non-negative, got {padding}.")
    lower = points.min(axis=0)
    upper = points.max(axis=0)
    extent = float(np.max(upper - lower)) + 2 * padding
    n_voxels_needed = int(np.ceil(extent / resolution))
    if dims is None:
        dims = next_power_of_two(max(n_voxels_needed, 2))
    elif dims < n_voxels_needed:
        raise ValueError(
            f"Grid of {dims} voxels with resolution {resolution} can not "
            f"hold clouds with padded extent of {extent} meters."
        )
    center = (lower + upper) / 2
    origin = center - resolution * dims / 2
    spec = GridSpec(float(resolution), origin, (dims, dims, dims))
    validate_grid_spec(spec)
    return spec


def voxel_indices(points: np.ndarray, spec: GridSpec) -> np.ndarray:
    """
    Find voxels containing points.

    :param points:
        array of shape (n, 3)
    :param spec:
        geometry of grid
    :return:
        integer array of shape (n, 3)
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    indices = np.floor((points - spec.origin) / spec.resolution).astype(int)
    is_outside = (indices < 0) | (indices >= np.array(spec.dims))
    if np.any(is_outside):
        row, axis = np.argwhere(is_outside)[0]
        raise ValueError(
            f"Point {points[row]} lies outside the grid "
            f"along axis {AXES_NAMES[axis]}."
        )
    return indices


def voxel_index(point: np.ndarray, spec: GridSpec) -> Tuple[int, int, int]:
    """
    Find voxel containing a point.

    :param point:
        array of shape (3,)
    :param spec:
        geometry of grid
    :return:
        indices of voxel along X, Y, and Z
    """
    indices = voxel_indices(point, spec)[0]
    return tuple(int(x) for x in indices)


def crop_to_grid(cloud: PointCloud, spec: GridSpec) -> PointCloud:
    """
    Drop points that lie outside of grid.

    :param cloud:
        point cloud
    :param spec:
        geometry of grid
    :return:
        point cloud with the rest of points
    """
    indices = np.floor((cloud.points - spec.origin) / spec.resolution)
    is_inside = np.all((indices >= 0) & (indices < np.array(spec.dims)), axis=1)
    return PointCloud(cloud.points[is_inside], cloud.normals[is_inside])


def voxelize(
        cloud: PointCloud, spec: GridSpec, mode: str = 'binary'
) -> VoxelGrid:
    """
    Rasterize point cloud.

    :param cloud:
        point cloud
    :param spec:
        geometry of grid
    :param mode:
        'binary' for occupancy indicator or 'count' for number of points
    :return:
        voxel grid
    """
    validate_grid_spec(spec)
    values = np.zeros(spec.dims)
    indices = voxel_indices(cloud.points, spec)
    if mode == 'binary':
        values[tuple(indices.T)] = 1.0
    elif mode == 'count':
        np.add.at(values, tuple(indices.T), 1.0)
    else:
        raise ValueError(
            f"Unknown occupancy mode: {mode}, allowed modes are "
            f"'binary' and 'count'."
        )
    return VoxelGrid(spec, values)


def dump_voxel_grid(grid: VoxelGrid) -> str:
    """
    Represent non-empty voxels as text.

    :param grid:
        voxel grid
    :return:
        header line 'M N L r ox oy oz' and then
        'i j k value' line per non-empty voxel
    """
    dims = ' '.join(str(x) for x in grid.spec.dims)
    origin = ' '.join(repr(float(x)) for x in grid.spec.origin)
    lines = [f"{dims} {grid.spec.resolution!r} {origin}"]
    for i, j, k in np.argwhere(grid.values != 0):
        lines.append(f"{i} {j} {k} {grid.values[i, j, k]:g}")
    return '\n'.join(lines) + '\n'
