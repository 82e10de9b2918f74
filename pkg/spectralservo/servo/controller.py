"""
Align point clouds with decoupled spectral gradients.

Transform `H = (R, T)` maps target cloud to reference cloud and it is
applied about target centroid, so rotation updates keep centroid of
the current cloud in place. Translation gradient comes from phase
correlation of voxel grids and rotation gradient comes from correlation
of EGIs over rotations.

By default, rotation gradient is turned into a step with the curvature
matrix of correlation peak. Far from the peak, degrees are smoothed
with heat kernel, and smoothing fades as the estimated remaining
rotation shrinks.
"""


import time
from typing import Any, Dict, List, NamedTuple, Optional

import numpy as np

from spectralservo.features import (
    Egi,
    GridSpec,
    VoxelGrid,
    build_egi,
    make_grid_spec,
    voxelize,
)
from spectralservo.geometry import (
    PointCloud,
    RigidTransform,
    apply_transform,
    centroid,
    exp_so3,
    identity_transform,
    nearest_rotation,
    rotation_to_quaternion,
)
from spectralservo.spectral import (
    RealShBasis,
    ShCoefficients,
    SpectralVolume,
    correlation_curvature,
    degree_gradients,
    degree_metrics,
    dft3,
    make_real_sh_basis,
    normalize_coefficients,
    phase_correlate,
    rotation_cost,
    sh_forward,
    smoothing_weights,
    translation_cost,
)
from spectralservo.utils.misc import count_trailing_increases


ROTATION_STEP_FLOOR = 1e-9
CURVATURE_FLOOR = 1e-12
METRIC_DAMPING = 1e-2
SMOOTHING_TO_ROTATION_RATIO = 0.5


class ControllerConfig(NamedTuple):
    """Settings of feature extraction and of gradient-based alignment."""

    lambda_t: float = 0.5
    lambda_r: float = 0.1
    epsilon_g: float = 1e-3
    max_iters: int = 500
    resolution: float = 0.008
    grid_dims: Optional[int] = 64
    grid_padding: float = 0.1
    occupancy_mode: str = 'binary'
    bandwidth: int = 16
    l_max: int = 15
    gradient_norm_mode: str = 'normalized'
    rotation_gain_mode: str = 'metric'
    rotation_smoothing: float = 20.0
    subvoxel_refinement: bool = True
    translation_tolerance: float = 0.02
    divergence_window: int = 25
    reorthonormalize_every: int = 100
    verbose: bool = False


class ReferenceFeatures(NamedTuple):
    """Features of reference cloud that are computed once."""

    grid: VoxelGrid
    spectrum: SpectralVolume
    egi: Egi
    coefficients: ShCoefficients
    curvature: float
    basis: RealShBasis


class ServoState(NamedTuple):
    """
    Current estimate of transform and quantities measured for it.

    `rotation_direction` is the rotation vector that is scaled by
    `lambda_r` to make rotation update.
    """

    h: RigidTransform
    iteration: int
    grad_t: np.ndarray
    grad_r: np.ndarray
    j_t: float
    j_r: float
    peak_value: float
    rotation_direction: np.ndarray


class TraceRecord(NamedTuple):
    """Row of alignment trace."""

    iteration: int
    j_t: float
    j_r: float
    grad_t_norm: float
    grad_r_norm: float
    translation: np.ndarray
    quaternion: np.ndarray
    wall_time: float


class AlignmentResult(NamedTuple):
    """Outcome of alignment."""

    transform: RigidTransform
    center: np.ndarray
    trace: List[TraceRecord]
    converged: bool
    iterations: int


def make_controller_config(settings: Dict[str, Any]) -> ControllerConfig:
    """
    Pick controller settings from run settings and validate them.

    :param settings:
        run settings, keys unknown to controller are ignored
    :return:
        controller settings
    """
    fields = ControllerConfig._fields
    config = ControllerConfig(**{k: v for k, v in settings.items() if k in fields})
    validate_controller_config(config)
    return config


def validate_controller_config(config: ControllerConfig) -> None:
    """
    Check that controller settings are valid.

    :param config:
        controller settings
    :return:
        None
    """
    for name in ['lambda_t', 'lambda_r']:
        value = getattr(config, name)
        if not 0 < value < 1:
            raise ValueError(f"`{name}` must be in (0, 1), got {value}.")
    for name in ['epsilon_g', 'resolution']:
        value = getattr(config, name)
        if not value > 0:
            raise ValueError(f"`{name}` must be positive, got {value}.")
    for name in ['rotation_smoothing', 'translation_tolerance']:
        value = getattr(config, name)
        if not value >= 0:
            raise ValueError(f"`{name}` must be non-negative, got {value}.")
    for name in ['max_iters', 'divergence_window', 'reorthonormalize_every']:
        value = getattr(config, name)
        if not (isinstance(value, int) and value > 0):
            raise ValueError(f"`{name}` must be a positive integer, got {value}.")
    if not 0 <= config.l_max <= 2 * config.bandwidth - 1:
        raise ValueError(
            f"`l_max` must be from 0 to {2 * config.bandwidth - 1}, "
            f"got {config.l_max}."
        )
    allowed_values = {
        'occupancy_mode': ['binary', 'count'],
        'gradient_norm_mode': ['normalized', 'raw'],
        'rotation_gain_mode': ['metric', 'curvature', 'raw'],
    }
    for name, values in allowed_values.items():
        value = getattr(config, name)
        if value not in values:
            raise ValueError(
                f"Unknown value of `{name}`: {value}, allowed values are {values}."
            )


def extract_reference_features(
        reference: PointCloud,
        spec: GridSpec,
        config: ControllerConfig,
        basis: Optional[RealShBasis] = None
) -> ReferenceFeatures:
    """
    Compute features of reference cloud.

    :param reference:
        non-empty reference cloud
    :param spec:
        geometry of grid
    :param config:
        controller settings
    :param basis:
        basis of real harmonics, it is created if it is not passed
    :return:
        reference features
    """
    if reference.n_points == 0:
        raise ValueError("Reference cloud is empty.")
    basis = basis or make_real_sh_basis(config.bandwidth, config.l_max)
    grid = voxelize(reference, spec, config.occupancy_mode)
    egi = build_egi(reference, config.bandwidth)
    coefficients = normalize_coefficients(sh_forward(egi, basis))
    curvature = correlation_curvature(coefficients)
    return ReferenceFeatures(grid, dft3(grid), egi, coefficients, curvature, basis)


def initial_state() -> ServoState:
    """Make state with identity transform before the first iteration."""
    return ServoState(
        identity_transform(), 0, np.zeros(3), np.zeros(3), 0.0, 0.0, 0.0,
        np.zeros(3)
    )


def _add_timing(
        timings: Optional[Dict[str, float]], stage: str, start: float
) -> float:
    now = time.perf_counter()
    if timings is not None:
        timings[stage] = timings.get(stage, 0.0) + now - start
    return now


def solve_with_metric(
        gradients: np.ndarray, metrics: np.ndarray, width: float
) -> np.ndarray:
    """
    Estimate rotation vector to correlation peak from smoothed correlation.

    :param gradients:
        contributions of degrees to gradient, array of shape (l_max + 1, 3)
    :param metrics:
        contributions of degrees to curvature matrix,
        array of shape (l_max + 1, 3, 3)
    :param width:
        angular width of smoothing (in radians)
    :return:
        rotation vector of norm not above pi
    """
    weights = smoothing_weights(len(gradients) - 1, width)
    metric = np.tensordot(weights, metrics, axes=1)
    trace = np.trace(metric)
    if trace < CURVATURE_FLOOR:
        return np.zeros(3)
    metric += METRIC_DAMPING * trace / 3 * np.eye(3)
    direction = np.linalg.solve(metric, weights @ gradients)
    norm = np.linalg.norm(direction)
    if norm > np.pi:
        direction *= np.pi / norm
    return direction


def compute_rotation_direction(
        gradients: np.ndarray,
        metrics: np.ndarray,
        curvature: float,
        config: ControllerConfig
) -> np.ndarray:
    """
    Turn rotation gradient into rotation vector that is scaled by `lambda_r`.

    :param gradients:
        contributions of degrees to gradient, array of shape (l_max + 1, 3)
    :param metrics:
        contributions of degrees to curvature matrix of observed
        function, array of shape (l_max + 1, 3, 3)
    :param curvature:
        mean curvature of reference correlation peak
    :param config:
        controller settings
    :return:
        rotation vector
    """
    if config.rotation_gain_mode == 'raw':
        return gradients.sum(axis=0)
    if config.rotation_gain_mode == 'curvature':
        if curvature < CURVATURE_FLOOR:
            return np.zeros(3)
        return gradients.sum(axis=0) / curvature
    max_width = np.radians(config.rotation_smoothing)
    coarse = solve_with_metric(gradients, metrics, max_width)
    width = min(max_width, SMOOTHING_TO_ROTATION_RATIO * np.linalg.norm(coarse))
    return solve_with_metric(gradients, metrics, width)


def servo_step(
        state: ServoState,
        reference: ReferenceFeatures,
        target: PointCloud,
        config: ControllerConfig,
        timings: Optional[Dict[str, float]] = None
) -> ServoState:
    """
    Make one iteration of alignment.

    :param state:
        state after previous iteration
    :param reference:
        reference features
    :param target:
        acquired target cloud (in its own frame)
    :param config:
        controller settings
    :param timings:
        if it is passed, durations (in seconds) of stages are added to it
    :return:
        new state; gradients and costs in it are measured at the
        transform of `state`
    """
    if target.n_points == 0:
        raise ValueError("Target cloud is empty.")
    rotation, translation = state.h
    start = time.perf_counter()

    current = apply_transform(target, state.h, centroid(target))
    grid = voxelize(current, reference.grid.spec, config.occupancy_mode)
    start = _add_timing(timings, 'voxelize', start)

    estimate = phase_correlate(
        reference.spectrum, dft3(grid), config.subvoxel_refinement
    )
    start = _add_timing(timings, 'fft', start)

    egi = build_egi(target, config.bandwidth)
    coefficients = normalize_coefficients(sh_forward(egi, reference.basis))
    start = _add_timing(timings, 'sh', start)

    gradients = degree_gradients(coefficients, reference.coefficients, rotation)
    direction = compute_rotation_direction(
        gradients, degree_metrics(coefficients), reference.curvature, config
    )
    start = _add_timing(timings, 'gradient', start)

    j_t = translation_cost(reference.grid, grid) / reference.grid.spec.n_cells
    j_r = rotation_cost(egi, reference.egi, rotation, normalize=True)
    new_transform = RigidTransform(
        rotation @ exp_so3(config.lambda_r * direction),
        translation + config.lambda_t * estimate.grad_t
    )
    _add_timing(timings, 'update', start)
    return ServoState(
        new_transform, state.iteration + 1, estimate.grad_t,
        gradients.sum(axis=0), j_t, j_r, estimate.peak_value, direction
    )


def measure_step_norms(state: ServoState) -> np.ndarray:
    """
    Get norms that are compared with their initial values for convergence.

    :param state:
        state after an iteration
    :return:
        norms of translation gradient and of rotation direction
    """
    return np.array([
        np.linalg.norm(state.grad_t), np.linalg.norm(state.rotation_direction)
    ])


def compute_convergence_measure(
        state: ServoState,
        initial_norms: Optional[np.ndarray],
        config: ControllerConfig
) -> float:
    """
    Combine norms of gradients to a number that is compared with threshold.

    In normalized mode, translation gradient and rotation direction are
    divided by their norms at the first iteration. Norms not above their
    floors count as zero, where the translation floor is
    `translation_tolerance` voxels.

    :param state:
        current state
    :param initial_norms:
        values of `measure_step_norms` at the first iteration
    :param config:
        controller settings
    :return:
        sum of raw norms of gradients or sum of normalized norms
    """
    if config.gradient_norm_mode == 'raw' or initial_norms is None:
        return float(
            np.linalg.norm(state.grad_t) + np.linalg.norm(state.grad_r)
        )
    floors = np.array([
        config.translation_tolerance * config.resolution, ROTATION_STEP_FLOOR
    ])
    measure = 0.0
    norms = measure_step_norms(state)
    for norm, initial_norm, floor in zip(norms, initial_norms, floors):
        if norm > floor:
            measure += norm / max(initial_norm, floor)
    return float(measure)


def make_trace_record(
        state: ServoState, measured_at: RigidTransform, wall_time: float
) -> TraceRecord:
    """
    Make trace row from state.

    :param state:
        state after an iteration
    :param measured_at:
        transform at which costs and gradients of `state` are measured,
        i.e., transform before the update of the iteration
    :param wall_time:
        duration of the iteration (in seconds)
    :return:
        trace row
    """
    return TraceRecord(
        state.iteration,
        state.j_t,
        state.j_r,
        float(np.linalg.norm(state.grad_t)),
        float(np.linalg.norm(state.grad_r)),
        measured_at.translation.copy(),
        rotation_to_quaternion(measured_at.rotation),
        wall_time
    )


def run_alignment(
        reference: PointCloud,
        target: PointCloud,
        config: ControllerConfig
) -> AlignmentResult:
    """
    Find transform that moves target cloud onto reference cloud.

    :param reference:
        non-empty reference cloud
    :param target:
        non-empty target cloud
    :param config:
        controller settings
    :return:
        final transform (applied about target centroid), trace,
        and convergence status
    """
    validate_controller_config(config)
    if target.n_points == 0:
        raise ValueError("Target cloud is empty.")
    spec = make_grid_spec(
        [reference, target], config.resolution, config.grid_dims,
        config.grid_padding
    )
    features = extract_reference_features(reference, spec, config)
    state = initial_state()
    trace = []
    total_costs = []
    initial_norms = None
    converged = False
    for _ in range(config.max_iters):
        start = time.perf_counter()
        measured_at = state.h
        state = servo_step(state, features, target, config)
        trace.append(
            make_trace_record(state, measured_at, time.perf_counter() - start)
        )
        if initial_norms is None:
            initial_norms = measure_step_norms(state)
        measure = compute_convergence_measure(state, initial_norms, config)
        if config.verbose:
            print(
                f"Iteration {state.iteration}: J_t = {state.j_t:.6g}, "
                f"J_r = {state.j_r:.6g}, convergence measure = {measure:.6g}"
            )
        if measure < config.epsilon_g:
            converged = True
            break
        total_costs.append(state.j_t + state.j_r)
        if count_trailing_increases(total_costs) >= config.divergence_window:
            raise RuntimeError(
                f"Cost has been increasing for {config.divergence_window} "
                f"iterations in a row, alignment diverges."
            )
        if state.iteration % config.reorthonormalize_every == 0:
            rotation = nearest_rotation(state.h.rotation)
            state = state._replace(
                h=RigidTransform(rotation, state.h.translation)
            )
    return AlignmentResult(
        state.h, centroid(target), trace, converged, state.iteration
    )
