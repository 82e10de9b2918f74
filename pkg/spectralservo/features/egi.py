"""
Build extended Gaussian images (EGI), i.e., histograms of normals
over an equiangular grid on the unit sphere.

Node (j, k) of the grid of bandwidth B is located at
`theta_j = pi (2j + 1) / (4B)` and `phi_k = pi k / B`.
"""


from typing import NamedTuple, Tuple

import numpy as np

from spectralservo.geometry import PointCloud
from spectralservo.utils.misc import is_power_of_two


class SphereGrid(NamedTuple):
    """Equiangular 2B x 2B grid on the unit sphere."""

    bandwidth: int
    theta_nodes: np.ndarray
    phi_nodes: np.ndarray


class Egi(NamedTuple):
    """Counts of normals that are nearest to each node of a sphere grid."""

    grid: SphereGrid
    counts: np.ndarray

    @property
    def total(self) -> int:
        """Return total count."""
        return int(self.counts.sum())


def make_sphere_grid(bandwidth: int) -> SphereGrid:
    """
    Make equiangular grid on the unit sphere.

    :param bandwidth:
        bandwidth B, a power of two
    :return:
        grid with 2B polar nodes and 2B azimuthal nodes
    """
    if not is_power_of_two(bandwidth):
        raise ValueError(f"Bandwidth must be a power of two, got {bandwidth}.")
    theta_nodes = np.pi * (2 * np.arange(2 * bandwidth) + 1) / (4 * bandwidth)
    phi_nodes = np.pi * np.arange(2 * bandwidth) / bandwidth
    return SphereGrid(bandwidth, theta_nodes, phi_nodes)


def cartesian_to_spherical(directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Convert unit vectors to polar and azimuthal angles.

    :param directions:
        array of shape (..., 3) with unit vectors
    :return:
        polar angles from [0, pi] and azimuthal angles from [0, 2 pi)
    """
    directions = np.asarray(directions, dtype=float)
    lengths = np.linalg.norm(directions, axis=-1)
    if np.any(np.abs(lengths - 1) > 1e-6):
        raise ValueError("Directions must be unit vectors.")
    x, y, z = directions[..., 0], directions[..., 1], directions[..., 2]
    theta = np.arctan2(np.hypot(x, y), z)
    phi = np.mod(np.arctan2(y, x), 2 * np.pi)
    phi = np.where(phi >= 2 * np.pi, 0.0, phi)
    return theta, phi


def spherical_to_cartesian(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """
    Convert polar and azimuthal angles to unit vectors.

    :param theta:
        polar angles
    :param phi:
        azimuthal angles
    :return:
        array of shape (..., 3)
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([
        np.sin(theta) * np.cos(phi),
        np.sin(theta) * np.sin(phi),
        np.cos(theta),
    ], axis=-1)


def node_directions(grid: SphereGrid) -> np.ndarray:
    """
    Get unit vectors of all grid nodes.

    :param grid:
        sphere grid
    :return:
        array of shape (2B, 2B, 3), its element (j, k) is node (j, k)
    """
    theta, phi = np.meshgrid(grid.theta_nodes, grid.phi_nodes, indexing='ij')
    return spherical_to_cartesian(theta, phi)


def nearest_node(
        theta: np.ndarray, phi: np.ndarray, grid: SphereGrid
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Find indices of nearest (in angles) grid nodes.

    Ties are broken towards the lower index and polar caps
    are attributed to the extreme rows.

    :param theta:
        polar angles from [0, pi]
    :param phi:
        azimuthal angles from [0, 2 pi)
    :param grid:
        sphere grid
    :return:
        polar indices and azimuthal indices
    """
    n_nodes = 2 * grid.bandwidth
    polar_position = np.asarray(theta) * n_nodes / np.pi - 0.5
    polar_indices = np.clip(np.ceil(polar_position - 0.5), 0, n_nodes - 1)
    azimuthal_position = np.asarray(phi) * grid.bandwidth / np.pi
    azimuthal_indices = np.mod(np.ceil(azimuthal_position - 0.5), n_nodes)
    return polar_indices.astype(int), azimuthal_indices.astype(int)


def build_egi(cloud: PointCloud, bandwidth: int) -> Egi:
    """
    Build extended Gaussian image of a point cloud.

    :param cloud:
        non-empty point cloud
    :param bandwidth:
        bandwidth B, a power of two
    :return:
        EGI with counts summing up to number of points
    """
    grid = make_sphere_grid(bandwidth)
    if cloud.n_points == 0:
        raise ValueError("Can not build EGI of an empty cloud.")
    theta, phi = cartesian_to_spherical(cloud.normals)
    polar_indices, azimuthal_indices = nearest_node(theta, phi, grid)
    n_nodes = 2 * bandwidth
    flat_indices = polar_indices * n_nodes + azimuthal_indices
    counts = np.bincount(flat_indices, minlength=n_nodes ** 2)
    return Egi(grid, counts.reshape(n_nodes, n_nodes).astype(np.int64))


def dump_egi(egi: Egi) -> str:
    """
    Represent EGI as text.

    :param egi:
        extended Gaussian image
    :return:
        bandwidth line and then one line of counts per polar node
    """
    lines = [str(egi.grid.bandwidth)]
    lines.extend(' '.join(str(x) for x in row) for row in egi.counts)
    return '\n'.join(lines) + '\n'
