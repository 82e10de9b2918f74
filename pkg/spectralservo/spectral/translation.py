"""
Estimate translation between voxel grids by phase correlation.

If `g(x) = f(x - s)`, normalized cross-power spectrum of `f` and `g`
transforms back to a delta function at `-s` (modulo grid size), so the peak
location is the shift that brings `g` back onto `f`.
"""


from typing import NamedTuple, Optional, Tuple

import numpy as np

from spectralservo.features import GridSpec, VoxelGrid


MAGNITUDE_THRESHOLD = 1e-12


class SpectralVolume(NamedTuple):
    """3D discrete Fourier transform of a voxel grid."""

    coefficients: np.ndarray
    spec: GridSpec


class TranslationEstimate(NamedTuple):
    """Result of phase correlation."""

    grad_t: np.ndarray
    peak_value: float
    peak_index: Tuple[int, int, int]


def dft3(grid: VoxelGrid) -> SpectralVolume:
    """
    Compute 3D discrete Fourier transform of a voxel grid.

    :param grid:
        voxel grid
    :return:
        complex spectrum of the same shape
    """
    return SpectralVolume(np.fft.fftn(grid.values), grid.spec)


def check_specs_match(first: GridSpec, second: GridSpec) -> None:
    """
    Check that two grids have the same geometry.

    :param first:
        geometry of the first grid
    :param second:
        geometry of the second grid
    :return:
        None
    """
    same_dims = tuple(first.dims) == tuple(second.dims)
    same_resolution = np.isclose(first.resolution, second.resolution)
    same_origin = np.allclose(first.origin, second.origin)
    if not (same_dims and same_resolution and same_origin):
        raise ValueError(f"Grid geometries mismatch: {first} and {second}.")


def decode_peak(index: Tuple[int, ...], dims: Tuple[int, ...]) -> np.ndarray:
    """
    Convert circular peak location to signed shift in voxels.

    :param index:
        indices of peak
    :param dims:
        grid dimensions
    :return:
        integer shifts; index `i > dim / 2` means shift `i - dim`
    """
    index = np.asarray(index, dtype=int)
    dims = np.asarray(dims, dtype=int)
    return np.where(index > dims / 2, index - dims, index)


def _refine_along_axis(
        delta: np.ndarray, peak: Tuple[int, ...], axis: int
) -> float:
    dim = delta.shape[axis]
    neighbours = []
    for offset in [-1, 0, 1]:
        position = list(peak)
        position[axis] = (position[axis] + offset) % dim
        neighbours.append(delta[tuple(position)])
    left, center, right = neighbours
    curvature = left - 2 * center + right
    if curvature >= 0:
        return 0.0
    return float(np.clip(0.5 * (left - right) / curvature, -0.5, 0.5))


def phase_correlate(
        reference: SpectralVolume,
        current: SpectralVolume,
        subvoxel_refinement: bool = False
) -> TranslationEstimate:
    """
    Estimate translation that moves current grid onto reference grid.

    :param reference:
        spectrum of reference grid
    :param current:
        spectrum of current grid
    :param subvoxel_refinement:
        if it is `True`, peak location is refined with a parabola
        through neighbouring voxels along each axis
    :return:
        translation (in meters), correlation peak value, and peak location
    """
    check_specs_match(reference.spec, current.spec)
    if not (np.any(reference.coefficients) or np.any(current.coefficients)):
        raise ValueError("Both grids are empty.")
    cross_power = reference.coefficients * np.conj(current.coefficients)
    magnitudes = np.abs(cross_power)
    normalized = np.divide(
        cross_power, magnitudes,
        out=np.zeros_like(cross_power),
        where=magnitudes > MAGNITUDE_THRESHOLD
    )
    delta = np.real(np.fft.ifftn(normalized))
    peak = np.unravel_index(np.argmax(delta), delta.shape)
    peak = tuple(int(x) for x in peak)
    shift = decode_peak(peak, delta.shape).astype(float)
    if subvoxel_refinement:
        shift += [_refine_along_axis(delta, peak, axis) for axis in range(3)]
    grad_t = reference.spec.resolution * shift
    return TranslationEstimate(grad_t, float(delta[peak]), peak)


def shift_grid(grid: VoxelGrid, cells: np.ndarray) -> VoxelGrid:
    """
    Circularly shift grid values.

    :param grid:
        voxel grid
    :param cells:
        integer shift along each axis; value from voxel `x` goes to
        voxel `x + cells`
    :return:
        shifted grid
    """
    cells = tuple(int(x) for x in cells)
    return VoxelGrid(grid.spec, np.roll(grid.values, cells, axis=(0, 1, 2)))


def translation_cost(
        reference: VoxelGrid,
        current: VoxelGrid,
        translation: Optional[np.ndarray] = None
) -> float:
    """
    Compute half of squared difference between grids after translation.

    The reference grid is sampled at `x + T` with `T` rounded to the nearest
    voxel, so the cost is zero when `current(x) = reference(x + T)`.

    :param reference:
        reference grid
    :param current:
        current grid
    :param translation:
        translation `T` (in meters), zero by default
    :return:
        cost
    """
    check_specs_match(reference.spec, current.spec)
    translation = np.zeros(3) if translation is None else translation
    cells = np.round(np.asarray(translation) / reference.spec.resolution)
    shifted = shift_grid(reference, -cells.astype(int))
    return 0.5 * float(np.sum((current.values - shifted.values) ** 2))
