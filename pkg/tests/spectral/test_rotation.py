"""
Test `spectralservo.spectral.rotation` module.
"""


import numpy as np
import pytest

from spectralservo.features import (
    Egi,
    build_egi,
    make_sphere_grid,
)
from spectralservo.geometry import (
    PointCloud,
    RigidTransform,
    apply_transform,
    exp_so3,
    random_rotation,
)
from spectralservo.spectral.harmonics import (
    ShCoefficients,
    make_real_sh_basis,
    normalize_coefficients,
    sh_forward,
)
from spectralservo.spectral.rotation import (
    correlation_curvature,
    degree_gradients,
    degree_metrics,
    rotation_cost,
    smoothing_weights,
    so3_correlation,
    so3_correlation_gradient,
)


def test_gradient_against_central_differences(rng: np.random.Generator) -> None:
    """Test analytic gradient of correlation against numerical one."""
    epsilon = 1e-5
    for _ in range(100):
        observed = ShCoefficients(rng.normal(size=25))
        reference = ShCoefficients(rng.normal(size=25))
        rotation = random_rotation(rng)
        gradient = so3_correlation_gradient(observed, reference, rotation)
        numerical = np.zeros(3)
        for axis in range(3):
            step = np.zeros(3)
            step[axis] = epsilon
            plus = so3_correlation(observed, reference, rotation @ exp_so3(step))
            minus = so3_correlation(observed, reference, rotation @ exp_so3(-step))
            numerical[axis] = (plus - minus) / (2 * epsilon)
        np.testing.assert_allclose(
            gradient, numerical, rtol=1e-5, atol=1e-5 * np.linalg.norm(numerical)
        )


def test_self_correlation_is_maximal_at_identity(
        rng: np.random.Generator
) -> None:
    """Test that function correlates with itself best without rotation."""
    coefficients = ShCoefficients(rng.normal(size=36))
    at_identity = so3_correlation(coefficients, coefficients, np.eye(3))
    expected = np.sum(coefficients.values ** 2) / (4 * np.pi)
    assert at_identity == pytest.approx(expected)
    for _ in range(1000):
        rotation = random_rotation(rng)
        assert so3_correlation(coefficients, coefficients, rotation) <= (
            at_identity + 1e-12
        )
    gradient = so3_correlation_gradient(coefficients, coefficients, np.eye(3))
    np.testing.assert_allclose(gradient, np.zeros(3), atol=1e-12)


def test_correlation_is_maximal_at_true_rotation(
        ellipsoid_cloud: PointCloud
) -> None:
    """Test that correlation of rotated EGI peaks near the rotation."""
    basis = make_real_sh_basis(16, 15)
    rotation = exp_so3([0.0, 0.0, np.radians(30)])
    rotated = apply_transform(
        ellipsoid_cloud, RigidTransform(rotation, np.zeros(3))
    )
    observed = normalize_coefficients(sh_forward(build_egi(ellipsoid_cloud, 16), basis))
    reference = normalize_coefficients(sh_forward(build_egi(rotated, 16), basis))
    at_truth = so3_correlation(observed, reference, rotation)
    at_identity = so3_correlation(observed, reference, np.eye(3))
    assert at_truth > at_identity
    gradient = so3_correlation_gradient(observed, reference, np.eye(3))
    assert gradient[2] > 0
    assert abs(gradient[0]) < 0.1 * gradient[2]
    assert abs(gradient[1]) < 0.1 * gradient[2]


def test_correlation_with_mismatched_degrees() -> None:
    """Test that coefficients of different degrees are rejected."""
    with pytest.raises(ValueError, match="Maximum degrees mismatch"):
        so3_correlation(
            ShCoefficients(np.ones(4)), ShCoefficients(np.ones(9)), np.eye(3)
        )


def test_correlation_curvature(rng: np.random.Generator) -> None:
    """Test that curvature is zero for constants and positive otherwise."""
    constant = ShCoefficients(np.array([1.0, 0.0, 0.0, 0.0]))
    assert correlation_curvature(constant) == pytest.approx(0.0, abs=1e-15)
    first_degree = ShCoefficients(np.array([0.0, 0.0, 1.0, 0.0]))
    # Only two of three axes tilt Z, each with unit rate.
    expected = 2 / (3 * 4 * np.pi)
    assert correlation_curvature(first_degree) == pytest.approx(expected)
    assert correlation_curvature(ShCoefficients(rng.normal(size=16))) > 0


def test_correlation_curvature_matches_second_derivative(
        rng: np.random.Generator
) -> None:
    """Test that curvature is mean second derivative of self-correlation."""
    coefficients = ShCoefficients(rng.normal(size=25))
    epsilon = 1e-3
    at_identity = so3_correlation(coefficients, coefficients, np.eye(3))
    second_derivatives = []
    for axis in range(3):
        step = np.zeros(3)
        step[axis] = epsilon
        plus = so3_correlation(coefficients, coefficients, exp_so3(step))
        minus = so3_correlation(coefficients, coefficients, exp_so3(-step))
        second_derivatives.append((plus - 2 * at_identity + minus) / epsilon ** 2)
    result = correlation_curvature(coefficients)
    assert result == pytest.approx(-np.mean(second_derivatives), rel=1e-4)


def test_rotation_cost_of_identical_egis(ellipsoid_cloud: PointCloud) -> None:
    """Test that identical EGIs have zero cost without rotation."""
    egi = build_egi(ellipsoid_cloud, 8)
    assert rotation_cost(egi, egi, np.eye(3)) == 0.0
    assert rotation_cost(egi, egi, np.eye(3), normalize=True) == 0.0
    assert rotation_cost(egi, egi, exp_so3([0.3, 0.2, 0.1])) > 0


def test_rotation_cost_with_azimuthal_step(rng: np.random.Generator) -> None:
    """Test that azimuthal shift of columns is undone by rotation about Z."""
    bandwidth = 8
    grid = make_sphere_grid(bandwidth)
    counts = rng.integers(0, 10, size=(16, 16))
    observed = Egi(grid, counts)
    reference = Egi(grid, np.roll(counts, 1, axis=1))
    rotation = exp_so3([0.0, 0.0, np.pi / bandwidth])
    assert rotation_cost(observed, reference, rotation) == 0.0
    assert rotation_cost(observed, reference, np.eye(3)) > 0


def test_rotation_cost_with_mismatched_bandwidths() -> None:
    """Test that EGIs of different bandwidths are rejected."""
    first = Egi(make_sphere_grid(4), np.zeros((8, 8), dtype=int))
    second = Egi(make_sphere_grid(8), np.zeros((16, 16), dtype=int))
    with pytest.raises(ValueError, match="Bandwidths mismatch"):
        rotation_cost(first, second, np.eye(3))


def test_degree_gradients_sum_to_gradient(rng: np.random.Generator) -> None:
    """Test that gradients of degrees add up to full gradient."""
    observed = ShCoefficients(rng.normal(size=36))
    reference = ShCoefficients(rng.normal(size=36))
    rotation = random_rotation(rng)
    result = degree_gradients(observed, reference, rotation)
    assert result.shape == (6, 3)
    np.testing.assert_allclose(result[0], np.zeros(3), atol=1e-15)
    np.testing.assert_allclose(
        result.sum(axis=0),
        so3_correlation_gradient(observed, reference, rotation)
    )


def test_degree_metrics_match_second_derivatives(
        rng: np.random.Generator
) -> None:
    """Test that summed metrics are negated Hessian of self-correlation."""
    coefficients = ShCoefficients(rng.normal(size=25))
    epsilon = 1e-3
    hessian = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            first, second = np.zeros(3), np.zeros(3)
            first[i] = epsilon
            second[j] = epsilon
            values = [
                so3_correlation(
                    coefficients, coefficients, exp_so3(sign_i * first + sign_j * second)
                )
                for sign_i, sign_j in [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            ]
            hessian[i, j] = (
                values[0] - values[1] - values[2] + values[3]
            ) / (4 * epsilon ** 2)
    metrics = degree_metrics(coefficients)
    assert metrics.shape == (5, 3, 3)
    result = metrics.sum(axis=0)
    np.testing.assert_allclose(result, result.T, atol=1e-12)
    np.testing.assert_allclose(
        result, -hessian, rtol=1e-3, atol=1e-4 * np.abs(hessian).max()
    )
    for metric in metrics:
        assert np.linalg.eigvalsh(metric).min() > -1e-12


@pytest.mark.parametrize(
    "l_max, width, expected",
    [
        (
            # `l_max`
            2,
            # `width`
            0.0,
            # `expected`
            [1.0, 1.0, 1.0]
        ),
        (
            # `l_max`
            3,
            # `width`
            0.5,
            # `expected`
            [1.0, np.exp(-0.5), np.exp(-1.5), np.exp(-3.0)]
        ),
    ]
)
def test_smoothing_weights(l_max: int, width: float, expected: list) -> None:
    """Test `smoothing_weights` function."""
    np.testing.assert_allclose(smoothing_weights(l_max, width), expected)
