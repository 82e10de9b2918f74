"""
Compute matrices of rotations acting on spherical harmonics.

Complex Wigner matrices are `D^l(alpha, beta, gamma) =
exp(-i alpha J_z) d^l(beta) exp(-i gamma J_z)` where the small matrix
`d^l(beta) = exp(-i beta J_y)` comes from eigendecomposition of
angular momentum operator `J_y`. Matrices `U^l(R)` act on real harmonic
coefficients, so that if `g(n) = f(R^T n)`, then `G^l = U^l(R) F^l`.
"""


import functools
from typing import NamedTuple, Tuple

import numpy as np

from spectralservo.geometry import matrix_to_zyz, validate_rotation
from .harmonics import complex_to_real_matrix


IMAGINARY_RESIDUE_TOLERANCE = 1e-9


class WignerBlocks(NamedTuple):
    """Per-degree real rotation matrices and their generators."""

    rotation_blocks: Tuple[np.ndarray, ...]
    derivative_blocks: Tuple[Tuple[np.ndarray, ...], ...]


@functools.lru_cache(maxsize=None)
def angular_momentum(l: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Get angular momentum operators in basis of complex harmonics of degree `l`.

    :param l:
        degree
    :return:
        complex arrays `J_x`, `J_y`, and `J_z` of shape (2l + 1, 2l + 1)
    """
    orders = np.arange(-l, l + 1)
    raising = np.zeros((2 * l + 1, 2 * l + 1), dtype=complex)
    for m in orders[:-1]:
        raising[m + l + 1, m + l] = np.sqrt((l - m) * (l + m + 1))
    lowering = raising.conj().T
    j_x = (raising + lowering) / 2
    j_y = (raising - lowering) / 2j
    j_z = np.diag(orders).astype(complex)
    return j_x, j_y, j_z


@functools.lru_cache(maxsize=None)
def _j_y_eigensystem(l: int) -> Tuple[np.ndarray, np.ndarray]:
    _, j_y, _ = angular_momentum(l)
    return np.linalg.eigh(j_y)


def wigner_small_d(l: int, beta: float) -> np.ndarray:
    """
    Compute Wigner small d-matrix.

    :param l:
        degree
    :param beta:
        angle of rotation about Y (in radians)
    :return:
        real array of shape (2l + 1, 2l + 1) indexed by (m' + l, m + l)
    """
    eigenvalues, eigenvectors = _j_y_eigensystem(l)
    phases = np.exp(-1j * beta * eigenvalues)
    matrix = (eigenvectors * phases) @ eigenvectors.conj().T
    return matrix.real


def wigner_d(l: int, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """
    Compute complex Wigner D-matrix for ZYZ Euler angles.

    :param l:
        degree
    :param alpha:
        first angle (in radians)
    :param beta:
        second angle (in radians)
    :param gamma:
        third angle (in radians)
    :return:
        complex array of shape (2l + 1, 2l + 1)
    """
    orders = np.arange(-l, l + 1)
    left = np.exp(-1j * alpha * orders)
    right = np.exp(-1j * gamma * orders)
    return left[:, np.newaxis] * wigner_small_d(l, beta) * right[np.newaxis, :]


def _to_real(l: int, matrix: np.ndarray) -> np.ndarray:
    change_of_basis = complex_to_real_matrix(l)
    result = change_of_basis.conj() @ matrix @ change_of_basis.T
    residue = np.max(np.abs(result.imag))
    if residue > IMAGINARY_RESIDUE_TOLERANCE:
        raise RuntimeError(
            f"Real Wigner matrix of degree {l} has imaginary residue {residue}."
        )
    return result.real


@functools.lru_cache(maxsize=None)
def _derivative_blocks(l_max: int) -> Tuple[Tuple[np.ndarray, ...], ...]:
    blocks = []
    for axis in range(3):
        blocks.append(tuple(
            _to_real(l, -1j * angular_momentum(l)[axis])
            for l in range(l_max + 1)
        ))
    return tuple(blocks)


def wigner_u_derivative(axis: int, l_max: int) -> Tuple[np.ndarray, ...]:
    """
    Get generators of rotations about a coordinate axis for real harmonics.

    :param axis:
        0 for X, 1 for Y, and 2 for Z
    :param l_max:
        maximum degree
    :return:
        skew-symmetric matrices `d/de U^l(exp(e k))` at `e = 0` for all degrees
    """
    if axis not in (0, 1, 2):
        raise ValueError(f"Axis must be 0, 1, or 2, got {axis}.")
    return _derivative_blocks(l_max)[axis]


def wigner_u(rotation: np.ndarray, l_max: int) -> WignerBlocks:
    """
    Compute real Wigner matrices of a rotation.

    :param rotation:
        rotation matrix
    :param l_max:
        maximum degree
    :return:
        orthogonal matrices `U^l(R)` and generators for all degrees
    """
    validate_rotation(rotation)
    alpha, beta, gamma = matrix_to_zyz(rotation)
    rotation_blocks = tuple(
        _to_real(l, wigner_d(l, alpha, beta, gamma)) for l in range(l_max + 1)
    )
    return WignerBlocks(rotation_blocks, _derivative_blocks(l_max))
