"""
Expand functions on the sphere over real spherical harmonics.

Real harmonics are obtained from complex ones (with Condon-Shortley phase)
as `S^l = T^l Y^l` where rows of `T^l` are indexed by `m = -l, ..., l`:
    m < 0: (i Y_l^m - i (-1)^m Y_l^{-m}) / sqrt(2),
    m = 0: Y_l^0,
    m > 0: (Y_l^{-m} + (-1)^m Y_l^m) / sqrt(2).
For degree 1, this gives functions proportional to y, z, and x.

Sampling is done on the equiangular 2B x 2B grid and integration uses
Fejer-type quadrature in polar angle, so analysis is exact for
band-limited functions of degree below B.
"""


import functools
from typing import NamedTuple, Optional

import numpy as np

try:
    from scipy.special import sph_harm_y
except ImportError:  # pragma: no cover
    from scipy.special import sph_harm

    def sph_harm_y(degree, order, theta, phi):
        return sph_harm(order, degree, phi, theta)

from spectralservo.features import Egi, SphereGrid, make_sphere_grid


IMAGINARY_RESIDUE_TOLERANCE = 1e-10


class RealShBasis(NamedTuple):
    """Real spherical harmonics sampled at nodes of a sphere grid."""

    grid: SphereGrid
    l_max: int
    values: np.ndarray
    weights: np.ndarray


class ShCoefficients(NamedTuple):
    """
    Real spherical harmonic coefficients of all degrees up to `l_max`.

    Coefficient of degree `l` and order `m` is stored at `l^2 + l + m`.
    """

    values: np.ndarray

    @property
    def l_max(self) -> int:
        """Return maximum degree."""
        return int(round(np.sqrt(len(self.values)))) - 1

    def degree(self, l: int) -> np.ndarray:
        """Return coefficients of degree `l` ordered by `m`."""
        return self.values[l ** 2:(l + 1) ** 2]


@functools.lru_cache(maxsize=None)
def complex_to_real_matrix(l: int) -> np.ndarray:
    """
    Get unitary matrix that maps complex harmonics of degree `l` to real ones.

    :param l:
        degree
    :return:
        complex array of shape (2l + 1, 2l + 1)
    """
    size = 2 * l + 1
    matrix = np.zeros((size, size), dtype=complex)
    coef = 1 / np.sqrt(2)
    for m in range(-l, l + 1):
        sign = (-1) ** abs(m)
        if m < 0:
            matrix[m + l, m + l] = 1j * coef
            matrix[m + l, -m + l] = -sign * 1j * coef
        elif m == 0:
            matrix[l, l] = 1.0
        else:
            matrix[m + l, -m + l] = coef
            matrix[m + l, m + l] = sign * coef
    matrix.flags.writeable = False
    return matrix


def real_spherical_harmonics(
        l: int, theta: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """
    Evaluate real spherical harmonics of degree `l`.

    :param l:
        degree
    :param theta:
        polar angles
    :param phi:
        azimuthal angles
    :return:
        array of shape (2l + 1, ...) with orders from -l to l
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    complex_values = np.stack([
        sph_harm_y(l, m, theta, phi) for m in range(-l, l + 1)
    ])
    values = np.tensordot(complex_to_real_matrix(l), complex_values, axes=1)
    residue = np.max(np.abs(values.imag)) if values.size else 0.0
    if residue > IMAGINARY_RESIDUE_TOLERANCE:
        raise RuntimeError(
            f"Real harmonics of degree {l} have imaginary residue {residue}."
        )
    return values.real


def quadrature_weights(bandwidth: int) -> np.ndarray:
    """
    Get weights of polar nodes for integration over [-1, 1] in `cos(theta)`.

    :param bandwidth:
        bandwidth B
    :return:
        array of shape (2B,) summing up to 2
    """
    grid = make_sphere_grid(bandwidth)
    theta = grid.theta_nodes
    odd_numbers = 2 * np.arange(bandwidth) + 1
    series = np.sin(np.outer(theta, odd_numbers)) / odd_numbers
    return 2 / bandwidth * np.sin(theta) * series.sum(axis=1)


def make_real_sh_basis(
        bandwidth: int, l_max: Optional[int] = None
) -> RealShBasis:
    """
    Sample real spherical harmonics on the equiangular grid.

    :param bandwidth:
        bandwidth B, a power of two
    :param l_max:
        maximum degree, B - 1 by default; larger values are allowed up to
        2B - 1, but then analysis is not exact anymore
    :return:
        basis
    """
    grid = make_sphere_grid(bandwidth)
    l_max = bandwidth - 1 if l_max is None else l_max
    if not 0 <= l_max <= 2 * bandwidth - 1:
        raise ValueError(
            f"Maximum degree must be from 0 to {2 * bandwidth - 1} "
            f"for bandwidth {bandwidth}, got {l_max}."
        )
    theta, phi = np.meshgrid(grid.theta_nodes, grid.phi_nodes, indexing='ij')
    values = np.concatenate([
        real_spherical_harmonics(l, theta, phi) for l in range(l_max + 1)
    ])
    polar_weights = quadrature_weights(bandwidth)
    weights = np.outer(polar_weights, np.full(2 * bandwidth, np.pi / bandwidth))
    return RealShBasis(grid, l_max, values, weights)


def sh_analyze(samples: np.ndarray, basis: RealShBasis) -> ShCoefficients:
    """
    Expand function sampled at grid nodes over real harmonics.

    :param samples:
        array of shape (2B, 2B)
    :param basis:
        basis
    :return:
        coefficients
    """
    if samples.shape != basis.weights.shape:
        raise ValueError(
            f"Samples of shape {samples.shape} do not match "
            f"grid of shape {basis.weights.shape}."
        )
    weighted = basis.weights * samples
    return ShCoefficients(np.tensordot(basis.values, weighted, axes=2))


def sh_forward(egi: Egi, basis: RealShBasis) -> ShCoefficients:
    """
    Compute real spherical harmonic coefficients of EGI.

    :param egi:
        extended Gaussian image
    :param basis:
        basis of the same bandwidth
    :return:
        coefficients
    """
    if egi.grid.bandwidth != basis.grid.bandwidth:
        raise ValueError(
            f"EGI bandwidth {egi.grid.bandwidth} does not match "
            f"basis bandwidth {basis.grid.bandwidth}."
        )
    return sh_analyze(egi.counts.astype(float), basis)


def sh_inverse(coefficients: ShCoefficients, basis: RealShBasis) -> np.ndarray:
    """
    Synthesize function at grid nodes from its coefficients.

    :param coefficients:
        coefficients with maximum degree not above that of basis
    :param basis:
        basis
    :return:
        array of shape (2B, 2B)
    """
    n_coefficients = len(coefficients.values)
    if n_coefficients > basis.values.shape[0]:
        raise ValueError("Coefficients have higher degree than basis.")
    return np.tensordot(
        coefficients.values, basis.values[:n_coefficients], axes=1
    )


def normalize_coefficients(coefficients: ShCoefficients) -> ShCoefficients:
    """
    Scale coefficients to unit Euclidean norm.

    :param coefficients:
        coefficients
    :return:
        scaled coefficients (zero coefficients are returned as is)
    """
    norm = np.linalg.norm(coefficients.values)
    if norm == 0:
        return coefficients
    return ShCoefficients(coefficients.values / norm)


def dump_coefficients(coefficients: ShCoefficients) -> str:
    """
    Represent coefficients as text.

    :param coefficients:
        coefficients
    :return:
        one 'l m value' line per coefficient
    """
    lines = []
    for l in range(coefficients.l_max + 1):
        for m, value in zip(range(-l, l + 1), coefficients.degree(l)):
            lines.append(f"{l} {m} {float(value)!r}")
    return '\n'.join(lines) + '\n'
