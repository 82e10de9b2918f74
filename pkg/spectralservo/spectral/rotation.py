"""
Correlate functions on the sphere over rotations.

Correlation `C(R) = 1 / (4 pi) * sum_l G^l . U^l(R) F^l` is the inner
product of `g` and `f` rotated by `R` (up to band limit). Its gradient
with respect to right perturbation `R exp(hat(eta))` has components
`1 / (4 pi) * sum_l G^l . U^l(R) u^l(e_k) F^l`.
"""


import numpy as np

from spectralservo.features import (
    Egi,
    cartesian_to_spherical,
    nearest_node,
    node_directions,
)
from .harmonics import ShCoefficients
from .wigner import wigner_u, wigner_u_derivative


def _check_degrees_match(first: ShCoefficients, second: ShCoefficients) -> int:
    if first.l_max != second.l_max:
        raise ValueError(
            f"Maximum degrees mismatch: {first.l_max} and {second.l_max}."
        )
    return first.l_max


def so3_correlation(
        observed: ShCoefficients,
        reference: ShCoefficients,
        rotation: np.ndarray
) -> float:
    """
    Compute correlation of reference and rotated observed function.

    :param observed:
        coefficients of function `f` that is rotated
    :param reference:
        coefficients of function `g`
    :param rotation:
        rotation matrix `R`
    :return:
        value of correlation
    """
    l_max = _check_degrees_match(observed, reference)
    blocks = wigner_u(rotation, l_max).rotation_blocks
    total = sum(
        reference.degree(l) @ blocks[l] @ observed.degree(l)
        for l in range(l_max + 1)
    )
    return float(total) / (4 * np.pi)


def degree_gradients(
        observed: ShCoefficients,
        reference: ShCoefficients,
        rotation: np.ndarray
) -> np.ndarray:
    """
    Compute contributions of each degree to gradient of correlation.

    :param observed:
        coefficients of function `f` that is rotated
    :param reference:
        coefficients of function `g`
    :param rotation:
        rotation matrix `R`
    :return:
        array of shape (l_max + 1, 3); its sum over the first axis is
        the gradient for update `R exp(hat(eta))`
    """
    l_max = _check_degrees_match(observed, reference)
    wigner_blocks = wigner_u(rotation, l_max)
    gradients = np.zeros((l_max + 1, 3))
    for l in range(l_max + 1):
        left = reference.degree(l) @ wigner_blocks.rotation_blocks[l]
        right = observed.degree(l)
        for axis in range(3):
            generator = wigner_blocks.derivative_blocks[axis][l]
            gradients[l, axis] = left @ generator @ right
    return gradients / (4 * np.pi)


def so3_correlation_gradient(
        observed: ShCoefficients,
        reference: ShCoefficients,
        rotation: np.ndarray
) -> np.ndarray:
    """
    Compute gradient of correlation with respect to rotation.

    :param observed:
        coefficients of function `f` that is rotated
    :param reference:
        coefficients of function `g`
    :param rotation:
        rotation matrix `R`
    :return:
        array of shape (3,), direction `eta` of the steepest ascent
        for update `R exp(hat(eta))`
    """
    return degree_gradients(observed, reference, rotation).sum(axis=0)


def degree_metrics(coefficients: ShCoefficients) -> np.ndarray:
    """
    Compute contributions of each degree to curvature of autocorrelation.

    Near its maximum, correlation decreases as `-1 / 2 eta^T M eta`
    where `M` is the sum of returned matrices.

    :param coefficients:
        coefficients of function
    :return:
        array of shape (l_max + 1, 3, 3) of symmetric positive
        semi-definite matrices `1 / (4 pi) (u^l_i F^l) . (u^l_j F^l)`
    """
    metrics = np.zeros((coefficients.l_max + 1, 3, 3))
    for l in range(coefficients.l_max + 1):
        derivatives = np.array([
            wigner_u_derivative(axis, coefficients.l_max)[l]
            @ coefficients.degree(l)
            for axis in range(3)
        ])
        metrics[l] = derivatives @ derivatives.T
    return metrics / (4 * np.pi)


def smoothing_weights(l_max: int, width: float) -> np.ndarray:
    """
    Get weights of degrees in correlation of functions smoothed by heat kernel.

    :param l_max:
        maximum degree
    :param width:
        angular width of smoothing (in radians)
    :return:
        array of shape (l_max + 1,) with `exp(-l (l + 1) width^2)`
    """
    degrees = np.arange(l_max + 1)
    return np.exp(-degrees * (degrees + 1) * width ** 2)


def correlation_curvature(reference: ShCoefficients) -> float:
    """
    Estimate curvature of correlation peak averaged over directions.

    :param reference:
        coefficients of function at the peak
    :return:
        mean over coordinate axes of `1 / (4 pi) * sum_l |u^l G^l|^2`
    """
    return float(np.trace(degree_metrics(reference).sum(axis=0))) / 3


def rotation_cost(
        observed: Egi,
        reference: Egi,
        rotation: np.ndarray,
        normalize: bool = False
) -> float:
    """
    Compute half of squared difference between reference EGI and rotated EGI.

    Rotated EGI is sampled at `R^T n` for every node `n` with
    nearest-node lookup.

    :param observed:
        EGI `f` that is rotated
    :param reference:
        EGI `g`
    :param rotation:
        rotation matrix `R`
    :param normalize:
        if it is `True`, both EGIs are scaled to unit total count first
    :return:
        cost
    """
    if observed.grid.bandwidth != reference.grid.bandwidth:
        raise ValueError(
            f"Bandwidths mismatch: {observed.grid.bandwidth} "
            f"and {reference.grid.bandwidth}."
        )
    directions = node_directions(reference.grid) @ rotation
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    theta, phi = cartesian_to_spherical(directions)
    polar_indices, azimuthal_indices = nearest_node(theta, phi, reference.grid)
    resampled = observed.counts[polar_indices, azimuthal_indices].astype(float)
    target = reference.counts.astype(float)
    if normalize:
        resampled /= max(observed.total, 1)
        target /= max(reference.total, 1)
    return 0.5 * float(np.sum((target - resampled) ** 2))
