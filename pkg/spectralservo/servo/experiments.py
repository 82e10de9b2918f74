"""
Evaluate registration on synthetic trials with known ground truth.

Kinds of trials are:
    C1: full model against full model moved by a random transform;
    C2: full model against a partial view of the moved model;
    C3: full model against a scene with the moved model and clutter.
"""


from typing import Any, Dict, List, NamedTuple, Tuple

import numpy as np

from spectralservo.geometry import (
    PointCloud,
    RigidTransform,
    add_position_noise,
    apply_transform,
    centroid,
    compose_scene,
    generate_shape,
    geodesic_angle,
    merge_clouds,
    partial_view,
    random_rotation,
)
from spectralservo.utils.misc import imap_in_parallel
from .controller import make_controller_config, run_alignment


TRIAL_KINDS = ['C1', 'C2', 'C3']
MAX_VIEW_ATTEMPTS = 100
CLUTTER_GRID_PADDING = 0.05


class TrialResult(NamedTuple):
    """Outcome of a registration trial."""

    kind: str
    seed: int
    status: str
    iterations: int
    translation_error: float
    rotation_error_in_degrees: float
    final_grad_t_norm: float
    final_grad_r_norm: float
    final_j_t: float
    final_j_r: float
    mean_iteration_time: float
    visible_share: float


def make_object_model(settings: Dict[str, Any], seed: int) -> PointCloud:
    """
    Sample model of the object that is registered.

    :param settings:
        run settings
    :param seed:
        seed of sampling
    :return:
        point cloud
    """
    return generate_shape(
        settings.get('object_kind', 'ellipsoid'),
        settings.get('object_params'),
        settings.get('sample_count', 3000),
        seed
    )


def draw_ground_truth(
        rng: np.random.Generator, settings: Dict[str, Any]
) -> RigidTransform:
    """
    Draw random rotation and translation within bounds from settings.

    :param rng:
        random numbers generator
    :param settings:
        run settings
    :return:
        transform applied to reference about its centroid
    """
    max_angle = np.radians(settings['max_rotation_in_degrees'])
    rotation = random_rotation(rng, max_angle)
    max_shift = settings['max_translation_in_voxels'] * settings['resolution']
    translation = rng.uniform(-max_shift, max_shift, size=3)
    return RigidTransform(rotation, translation)


def take_partial_view(
        cloud: PointCloud, rng: np.random.Generator, min_visible_share: float
) -> Tuple[PointCloud, float]:
    """
    Take view from random direction that shows enough points.

    :param cloud:
        full cloud
    :param rng:
        random numbers generator
    :param min_visible_share:
        minimum share of visible points
    :return:
        visible part of the cloud and its share
    """
    center = centroid(cloud)
    for _ in range(MAX_VIEW_ATTEMPTS):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        view = partial_view(cloud, center + direction)
        share = view.n_points / cloud.n_points
        if share >= min_visible_share:
            return view, share
    raise RuntimeError(
        f"No view shows at least {min_visible_share} of points "
        f"after {MAX_VIEW_ATTEMPTS} attempts."
    )


def add_clutter(cloud: PointCloud, seed: int) -> PointCloud:
    """
    Put two more objects near a cloud.

    :param cloud:
        object cloud
    :param seed:
        seed of sampling
    :return:
        scene cloud
    """
    center = centroid(cloud)
    clutter = compose_scene([
        {
            'kind': 'box',
            'params': {'sizes': [0.05, 0.05, 0.05]},
            'sample_count': 1000,
            'position': center + np.array([0.09, 0.0, 0.0]),
            'rotation_vector': [0.0, 0.0, 0.3],
        },
        {
            'kind': 'cylinder',
            'params': {'radius': 0.025, 'height': 0.06},
            'sample_count': 1000,
            'position': center + np.array([0.0, -0.09, 0.0]),
        },
    ], seed)
    return merge_clouds([cloud, clutter])


def run_registration_trial(
        kind: str, seed: int, settings: Dict[str, Any]
) -> TrialResult:
    """
    Run a registration trial and compare result with ground truth.

    :param kind:
        kind of trial, one of 'C1', 'C2', and 'C3'
    :param seed:
        seed of the trial
    :param settings:
        run settings
    :return:
        result of the trial
    """
    if kind not in TRIAL_KINDS:
        raise ValueError(
            f"Unknown kind of trial: {kind}, allowed kinds are {TRIAL_KINDS}."
        )
    config = make_controller_config(settings)
    rng = np.random.default_rng(seed)
    reference = make_object_model(settings, seed)
    reference_center = centroid(reference)
    truth = draw_ground_truth(rng, settings)
    target = apply_transform(reference, truth, reference_center)
    visible_share = 1.0
    if kind == 'C2':
        target, visible_share = take_partial_view(
            target, rng, settings['min_visible_share']
        )
    elif kind == 'C3':
        target = add_clutter(target, seed + 1)
        config = config._replace(
            grid_padding=min(config.grid_padding, CLUTTER_GRID_PADDING)
        )
    target = add_position_noise(target, settings.get('noise_sigma', 0.0), rng)

    try:
        result = run_alignment(reference, target, config)
    except RuntimeError as e:
        if config.verbose:
            print(f"Trial {kind} with seed {seed} failed: {e}")
        nan = float('nan')
        return TrialResult(
            kind, seed, 'diverged', 0, nan, nan, nan, nan, nan, nan, nan,
            visible_share
        )

    target_center = result.center
    true_rotation = truth.rotation.T
    true_translation = (
        true_rotation @ (target_center - reference_center - truth.translation)
        + reference_center - target_center
    )
    translation_error = np.max(
        np.abs(result.transform.translation - true_translation)
    )
    rotation_error = np.degrees(
        geodesic_angle(result.transform.rotation, true_rotation)
    )
    last = result.trace[-1]
    return TrialResult(
        kind,
        seed,
        'converged' if result.converged else 'max_iters',
        result.iterations,
        float(translation_error),
        float(rotation_error),
        last.grad_t_norm,
        last.grad_r_norm,
        last.j_t,
        last.j_r,
        float(np.mean([record.wall_time for record in result.trace])),
        visible_share
    )


def _run_trial_with_packed_args(args: Tuple[str, int, Dict[str, Any]]) -> TrialResult:
    return run_registration_trial(*args)


def run_registration_suite(
        kind: str,
        settings: Dict[str, Any],
        pool_kwargs: Dict[str, Any] = None
) -> List[TrialResult]:
    """
    Run trials of a kind with consecutive seeds in parallel.

    :param kind:
        kind of trials
    :param settings:
        run settings with `seed` for the first trial and `n_trials`
    :param pool_kwargs:
        parameters of pool of processes
    :return:
        results of trials ordered by seed
    """
    n_trials = settings['n_trials']
    if not (isinstance(n_trials, int) and n_trials > 0):
        raise ValueError(f"Number of trials must be positive, got {n_trials}.")
    first_seed = settings['seed']
    args = ((kind, first_seed + i, settings) for i in range(n_trials))
    results = imap_in_parallel(_run_trial_with_packed_args, args, pool_kwargs)
    return list(results)


def summarize_trials(results: List[TrialResult]) -> Dict[str, Any]:
    """
    Aggregate results of trials.

    :param results:
        results of trials
    :return:
        counts of statuses and statistics of errors over finished trials
    """
    finished = [r for r in results if r.status != 'diverged']
    summary = {
        'n_trials': len(results),
        'n_converged': sum(r.status == 'converged' for r in results),
        'n_diverged': len(results) - len(finished),
    }
    summary['convergence_rate'] = summary['n_converged'] / max(len(results), 1)
    if not finished:
        return summary
    translation_errors = [r.translation_error for r in finished]
    rotation_errors = [r.rotation_error_in_degrees for r in finished]
    summary.update({
        'median_translation_error': float(np.median(translation_errors)),
        'max_translation_error': float(np.max(translation_errors)),
        'median_rotation_error_in_degrees': float(np.median(rotation_errors)),
        'max_rotation_error_in_degrees': float(np.max(rotation_errors)),
        'median_final_j_t': float(np.median([r.final_j_t for r in finished])),
        'median_final_j_r': float(np.median([r.final_j_r for r in finished])),
        'mean_iterations': float(np.mean([r.iterations for r in finished])),
        'mean_iteration_time': float(
            np.mean([r.mean_iteration_time for r in finished])
        ),
    })
    return summary
