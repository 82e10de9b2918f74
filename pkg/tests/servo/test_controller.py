"""
Test `spectralservo.servo.controller` module.
"""


from typing import Any, Dict

import numpy as np
import pytest

from spectralservo.features import make_grid_spec
from spectralservo.geometry import (
    PointCloud,
    RigidTransform,
    apply_transform,
    centroid,
    exp_so3,
    geodesic_angle,
    make_point_cloud,
)
from spectralservo.servo.controller import (
    ControllerConfig,
    compute_convergence_measure,
    compute_rotation_direction,
    extract_reference_features,
    initial_state,
    make_controller_config,
    measure_step_norms,
    run_alignment,
    servo_step,
)
from spectralservo.spectral import (
    ShCoefficients,
    degree_gradients,
    degree_metrics,
    normalize_coefficients,
    wigner_u,
)


def make_features(reference: PointCloud, target: PointCloud, config: ControllerConfig):
    """Extract reference features on grid that holds both clouds."""
    spec = make_grid_spec(
        [reference, target], config.resolution, config.grid_dims,
        config.grid_padding
    )
    return extract_reference_features(reference, spec, config)


def test_servo_step_with_aligned_clouds(ellipsoid_cloud: PointCloud) -> None:
    """Test that aligned clouds are a fixed point."""
    config = ControllerConfig()
    features = make_features(ellipsoid_cloud, ellipsoid_cloud, config)
    state = servo_step(initial_state(), features, ellipsoid_cloud, config)
    np.testing.assert_allclose(state.grad_t, np.zeros(3), atol=1e-12)
    assert np.linalg.norm(state.grad_r) < 1e-6
    np.testing.assert_allclose(state.h.rotation, np.eye(3), atol=1e-6)
    np.testing.assert_allclose(state.h.translation, np.zeros(3), atol=1e-6)
    assert state.iteration == 1
    assert state.j_t == 0.0


def test_servo_step_with_translation(ellipsoid_cloud: PointCloud) -> None:
    """Test that translation residual is halved and its cost decreases."""
    config = ControllerConfig(lambda_t=0.5, subvoxel_refinement=False)
    offset = np.array([3 * config.resolution, 0.0, 0.0])
    target = make_point_cloud(
        ellipsoid_cloud.points + offset, ellipsoid_cloud.normals
    )
    features = make_features(ellipsoid_cloud, target, config)
    first_state = servo_step(initial_state(), features, target, config)
    np.testing.assert_allclose(first_state.grad_t, -offset, atol=1e-12)
    np.testing.assert_allclose(first_state.h.translation, -offset / 2, atol=1e-12)
    second_state = servo_step(first_state, features, target, config)
    assert second_state.j_t < first_state.j_t
    assert np.linalg.norm(first_state.grad_r) < 1e-6


def test_servo_step_with_subvoxel_translation(ellipsoid_cloud: PointCloud) -> None:
    """Test that refined peak drives translation below a voxel."""
    config = ControllerConfig()
    offset = np.array([0.0184, -0.0052, 0.0])
    target = make_point_cloud(
        ellipsoid_cloud.points + offset, ellipsoid_cloud.normals
    )
    features = make_features(ellipsoid_cloud, target, config)
    state = initial_state()
    for _ in range(15):
        state = servo_step(state, features, target, config)
    residual = state.h.translation + offset
    assert np.max(np.abs(residual)) < 0.15 * config.resolution



def test_servo_step_with_rotation_about_z(ellipsoid_cloud: PointCloud) -> None:
    """Test that rotation gradient points to rotation about Z that undoes offset."""
    config = ControllerConfig()
    rotation = exp_so3([0.0, 0.0, np.radians(30)])
    target = apply_transform(
        ellipsoid_cloud, RigidTransform(rotation, np.zeros(3)), np.zeros(3)
    )
    features = make_features(ellipsoid_cloud, target, config)
    state = servo_step(initial_state(), features, target, config)
    grad_r = state.grad_r
    assert grad_r[2] < 0
    assert abs(grad_r[0]) < 0.1 * abs(grad_r[2])
    assert abs(grad_r[1]) < 0.1 * abs(grad_r[2])


def test_decoupling(ellipsoid_cloud: PointCloud) -> None:
    """Test that each channel is quiet when only the other one is off."""
    config = ControllerConfig()
    center = centroid(ellipsoid_cloud)
    translation = np.array([0.02, -0.01, 0.03])
    translated = make_point_cloud(
        ellipsoid_cloud.points + translation, ellipsoid_cloud.normals
    )
    rotation = exp_so3([0.0, 0.0, np.radians(30)])
    rotated = apply_transform(
        ellipsoid_cloud, RigidTransform(rotation, np.zeros(3)), center
    )
    features = make_features(ellipsoid_cloud, translated, config)
    translated_state = servo_step(initial_state(), features, translated, config)
    rotated_state = servo_step(initial_state(), features, rotated, config)

    assert (
        np.linalg.norm(translated_state.grad_r)
        < 0.05 * np.linalg.norm(rotated_state.grad_r)
    )
    assert (
        np.linalg.norm(rotated_state.grad_t)
        < 0.05 * np.linalg.norm(translated_state.grad_t)
    )


def test_servo_step_with_empty_target(ellipsoid_cloud: PointCloud) -> None:
    """Test that empty target is rejected."""
    config = ControllerConfig()
    features = make_features(ellipsoid_cloud, ellipsoid_cloud, config)
    empty = make_point_cloud(np.zeros((0, 3)), np.zeros((0, 3)))
    with pytest.raises(ValueError, match="Target cloud is empty"):
        servo_step(initial_state(), features, empty, config)


def test_servo_step_with_cloud_outside_of_grid(ellipsoid_cloud: PointCloud) -> None:
    """Test that cloud leaving grid is reported with axis."""
    config = ControllerConfig()
    features = make_features(ellipsoid_cloud, ellipsoid_cloud, config)
    far_cloud = make_point_cloud(
        ellipsoid_cloud.points + np.array([0.0, 1.0, 0.0]),
        ellipsoid_cloud.normals
    )
    with pytest.raises(ValueError, match="along axis y"):
        servo_step(initial_state(), features, far_cloud, config)


def test_run_alignment_with_identical_clouds(ellipsoid_cloud: PointCloud) -> None:
    """Test that identical clouds converge at the first iteration."""
    result = run_alignment(ellipsoid_cloud, ellipsoid_cloud, ControllerConfig())
    assert result.converged
    assert result.iterations == 1
    assert len(result.trace) == 1
    np.testing.assert_allclose(result.transform.rotation, np.eye(3), atol=1e-9)
    np.testing.assert_allclose(
        result.transform.translation, np.zeros(3), atol=1e-12
    )


@pytest.mark.parametrize(
    "rotation_vector, translation",
    [
        (
            # `rotation_vector`
            np.radians([10.0, -20.0, 25.0]),
            # `translation`
            np.array([0.04, -0.02, 0.016])
        ),
        (
            # `rotation_vector`
            np.radians([-30.0, 0.0, 15.0]),
            # `translation`
            np.array([-0.03, 0.05, 0.0])
        ),
        (
            # `rotation_vector`
            np.radians([0.0, 0.0, 55.0]),
            # `translation`
            np.array([0.06, -0.05, 0.07])
        ),
    ]
)
def test_run_alignment_recovers_transform(
        ellipsoid_cloud: PointCloud,
        rotation_vector: np.ndarray,
        translation: np.ndarray
) -> None:
    """Test that known transform of full cloud is recovered."""
    truth = RigidTransform(exp_so3(rotation_vector), translation)
    target = apply_transform(ellipsoid_cloud, truth, centroid(ellipsoid_cloud))
    result = run_alignment(ellipsoid_cloud, target, ControllerConfig())
    assert result.converged
    translation_error = result.transform.translation + translation
    assert np.max(np.abs(translation_error)) < 0.008
    rotation_error = geodesic_angle(result.transform.rotation, truth.rotation.T)
    assert np.degrees(rotation_error) < 5
    last = result.trace[-1]
    assert last.grad_t_norm < 0.5 * ControllerConfig().resolution
    assert last.grad_r_norm < 1e-2 * result.trace[0].grad_r_norm
    np.testing.assert_allclose(
        result.transform.rotation.T @ result.transform.rotation, np.eye(3),
        atol=1e-6
    )


def test_run_alignment_with_iterations_limit(
        ellipsoid_cloud: PointCloud
) -> None:
    """Test that alignment stops after maximum number of iterations."""
    config = ControllerConfig(max_iters=3)
    truth = RigidTransform(exp_so3(np.radians([0.0, 40.0, 0.0])), np.zeros(3))
    target = apply_transform(ellipsoid_cloud, truth)
    result = run_alignment(ellipsoid_cloud, target, config)
    assert not result.converged
    assert result.iterations == 3
    assert [record.iteration for record in result.trace] == [1, 2, 3]


@pytest.mark.parametrize(
    "settings, match",
    [
        ({'lambda_t': 1.5}, "`lambda_t` must be in"),
        ({'lambda_r': 0.0}, "`lambda_r` must be in"),
        ({'max_iters': 0}, "`max_iters` must be a positive integer"),
        ({'bandwidth': 4, 'l_max': 8}, "`l_max` must be from 0 to 7"),
        ({'occupancy_mode': 'density'}, "Unknown value of `occupancy_mode`"),
        ({'epsilon_g': -1.0}, "`epsilon_g` must be positive"),
        ({'rotation_smoothing': -1.0}, "`rotation_smoothing` must be non-negative"),
        ({'rotation_gain_mode': 'newton'}, "Unknown value of `rotation_gain_mode`"),
    ]
)
def test_make_controller_config_with_invalid_settings(
        settings: Dict[str, Any], match: str
) -> None:
    """Test that invalid settings are rejected."""
    with pytest.raises(ValueError, match=match):
        make_controller_config(settings)


def test_make_controller_config_ignores_other_keys() -> None:
    """Test that run settings unrelated to controller are ignored."""
    config = make_controller_config({'lambda_t': 0.3, 'seed': 5})
    assert config.lambda_t == 0.3
    assert config.lambda_r == ControllerConfig().lambda_r


@pytest.mark.parametrize(
    "grad_t, grad_r, direction, initial_norms, mode, expected",
    [
        (
            # `grad_t`
            np.array([0.004, 0.0, 0.0]),
            # `grad_r`
            np.array([0.0, 0.5, 0.0]),
            # `direction`
            np.array([0.0, 0.01, 0.0]),
            # `initial_norms`
            np.array([0.008, 0.1]),
            # `mode`
            'normalized',
            # `expected`
            0.6
        ),
        (
            # `grad_t`
            np.array([0.0001, 0.0, 0.0]),
            # `grad_r`
            np.array([0.0, 0.5, 0.0]),
            # `direction`
            np.array([0.0, 0.01, 0.0]),
            # `initial_norms`
            np.array([0.008, 0.1]),
            # `mode`
            'normalized',
            # `expected`
            0.1
        ),
        (
            # `grad_t`
            np.array([0.0, 0.008, 0.0]),
            # `grad_r`
            np.array([0.0, 0.0, 0.0]),
            # `direction`
            np.array([0.0, 0.0, 0.0]),
            # `initial_norms`
            np.array([0.0, 0.1]),
            # `mode`
            'normalized',
            # `expected`
            50.0
        ),
        (
            # `grad_t`
            np.array([0.0, 0.0, 0.0]),
            # `grad_r`
            np.array([0.0, 1e-12, 0.0]),
            # `direction`
            np.array([0.0, 1e-10, 0.0]),
            # `initial_norms`
            np.array([0.0, 1e-10]),
            # `mode`
            'normalized',
            # `expected`
            0.0
        ),
        (
            # `grad_t`
            np.array([0.004, 0.0, 0.0]),
            # `grad_r`
            np.array([0.0, 0.01, 0.0]),
            # `direction`
            np.array([0.0, 0.5, 0.0]),
            # `initial_norms`
            np.array([0.008, 0.1]),
            # `mode`
            'raw',
            # `expected`
            0.014
        ),
    ]
)
def test_compute_convergence_measure(
        grad_t: np.ndarray,
        grad_r: np.ndarray,
        direction: np.ndarray,
        initial_norms: np.ndarray,
        mode: str,
        expected: float
) -> None:
    """Test `compute_convergence_measure` function."""
    state = initial_state()._replace(
        grad_t=grad_t, grad_r=grad_r, rotation_direction=direction
    )
    config = ControllerConfig(gradient_norm_mode=mode)
    result = compute_convergence_measure(state, initial_norms, config)
    assert result == pytest.approx(expected)


def test_measure_step_norms() -> None:
    """Test that norms of translation gradient and rotation direction are taken."""
    state = initial_state()._replace(
        grad_t=np.array([0.003, 0.0, 0.004]),
        grad_r=np.array([1.0, 1.0, 1.0]),
        rotation_direction=np.array([0.0, -0.2, 0.0])
    )
    np.testing.assert_allclose(measure_step_norms(state), [0.005, 0.2])


def random_coefficients(rng: np.random.Generator, l_max: int) -> ShCoefficients:
    """Draw coefficients of unit norm."""
    return normalize_coefficients(ShCoefficients(rng.normal(size=(l_max + 1) ** 2)))


def rotate_coefficients(
        coefficients: ShCoefficients, rotation: np.ndarray
) -> ShCoefficients:
    """Get coefficients of rotated function."""
    blocks = wigner_u(rotation, coefficients.l_max).rotation_blocks
    return ShCoefficients(np.concatenate([
        block @ coefficients.degree(l) for l, block in enumerate(blocks)
    ]))


@pytest.mark.parametrize(
    "rotation_vector",
    [
        np.radians([2.0, 0.0, 0.0]),
        np.radians([0.0, -1.5, 1.0]),
        np.radians([0.5, 0.5, -2.0]),
    ]
)
def test_compute_rotation_direction_near_peak(
        rng: np.random.Generator, rotation_vector: np.ndarray
) -> None:
    """Test that direction with curvature matrix estimates remaining rotation."""
    observed = random_coefficients(rng, 7)
    reference = rotate_coefficients(observed, exp_so3(rotation_vector))
    config = ControllerConfig(rotation_smoothing=0.0)
    gradients = degree_gradients(observed, reference, np.eye(3))
    result = compute_rotation_direction(
        gradients, degree_metrics(observed), 1.0, config
    )
    np.testing.assert_allclose(result, rotation_vector, rtol=0.05, atol=1e-3)


@pytest.mark.parametrize("seed", list(range(5)))
def test_compute_rotation_direction_far_from_peak(seed: int) -> None:
    """Test that smoothed direction points to the peak from afar."""
    rng = np.random.default_rng(seed)
    values = rng.normal(size=64)
    degrees = np.repeat(np.arange(8), 2 * np.arange(8) + 1)
    observed = normalize_coefficients(ShCoefficients(values / (degrees + 1)))
    axis = rng.normal(size=3)
    rotation_vector = np.radians(30) * axis / np.linalg.norm(axis)
    reference = rotate_coefficients(observed, exp_so3(rotation_vector))
    gradients = degree_gradients(observed, reference, np.eye(3))
    result = compute_rotation_direction(
        gradients, degree_metrics(observed), 1.0, ControllerConfig()
    )
    cosine = result @ rotation_vector / (
        np.linalg.norm(result) * np.linalg.norm(rotation_vector)
    )
    assert cosine > 0.7
    assert np.linalg.norm(result) <= np.pi


@pytest.mark.parametrize(
    "mode, curvature, expected",
    [
        ('raw', 2.0, [0.2, -0.4, 0.6]),
        ('curvature', 2.0, [0.1, -0.2, 0.3]),
        ('curvature', 0.0, [0.0, 0.0, 0.0]),
    ]
)
def test_compute_rotation_direction_with_scalar_gain(
        mode: str, curvature: float, expected: np.ndarray
) -> None:
    """Test rotation directions that do not use curvature matrix."""
    gradients = np.array([[0.0, 0.0, 0.0], [0.1, -0.3, 0.4], [0.1, -0.1, 0.2]])
    config = ControllerConfig(rotation_gain_mode=mode)
    result = compute_rotation_direction(
        gradients, np.zeros((3, 3, 3)), curvature, config
    )
    np.testing.assert_allclose(result, expected)


def test_compute_rotation_direction_without_curvature() -> None:
    """Test that flat correlation gives zero rotation."""
    result = compute_rotation_direction(
        np.ones((4, 3)), np.zeros((4, 3, 3)), 0.0, ControllerConfig()
    )
    np.testing.assert_array_equal(result, np.zeros(3))


def test_make_trace_record_keeps_measured_pose(
        ellipsoid_cloud: PointCloud
) -> None:
    """Test that row of trace holds transform at which its costs are measured."""
    config = ControllerConfig(max_iters=2)
    offset = np.array([0.024, 0.0, -0.016])
    target = make_point_cloud(
        ellipsoid_cloud.points + offset, ellipsoid_cloud.normals
    )
    result = run_alignment(ellipsoid_cloud, target, config)
    first, second = result.trace
    np.testing.assert_array_equal(first.translation, np.zeros(3))
    np.testing.assert_allclose(first.quaternion, [1.0, 0.0, 0.0, 0.0])
    assert np.linalg.norm(second.translation) == pytest.approx(
        config.lambda_t * first.grad_t_norm
    )
    assert second.j_t < first.j_t
