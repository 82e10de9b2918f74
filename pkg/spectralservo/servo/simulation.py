"""
Run closed-loop visual servoing of a camera with simulated sensor.

At each tick, the scene is observed from the current camera pose, one
alignment step from identity is made against the reference view, and
the camera is moved so that its next observation is the current one
moved by the increment of that step.
"""


import time
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from spectralservo.features import crop_to_grid, make_grid_spec
from spectralservo.geometry import (
    PointCloud,
    RigidTransform,
    add_position_noise,
    apply_transform,
    centroid,
    compose,
    compose_scene,
    log_so3,
    make_point_cloud,
    partial_view,
)
from .controller import (
    ControllerConfig,
    compute_convergence_measure,
    extract_reference_features,
    initial_state,
    measure_step_norms,
    servo_step,
    validate_controller_config,
)
from .robot import (
    SimulatedArm,
    apply_twist,
    forward_kinematics,
    move_by_twist,
    solve_inverse_kinematics,
)


class TrajectoryPoint(NamedTuple):
    """Camera pose at a tick with costs measured there."""

    tick: int
    pose: RigidTransform
    j_t: float
    j_r: float
    q: Optional[np.ndarray]


class ServoTrajectory(NamedTuple):
    """Outcome of servoing."""

    points: List[TrajectoryPoint]
    converged: bool
    final_pose: RigidTransform
    mean_tick_time: float

    @property
    def path_length(self) -> float:
        """Return total distance travelled by camera (in meters)."""
        positions = np.array([p.pose.translation for p in self.points])
        if len(positions) < 2:
            return 0.0
        return float(np.sum(np.linalg.norm(np.diff(positions, axis=0), axis=1)))


def observe(
        scene: PointCloud,
        camera_pose: RigidTransform,
        noise_sigma: float = 0.0,
        rng: Optional[np.random.Generator] = None
) -> PointCloud:
    """
    Acquire cloud with virtual depth sensor.

    :param scene:
        scene in world frame
    :param camera_pose:
        pose of camera in world frame
    :param noise_sigma:
        standard deviation of position noise (in meters)
    :param rng:
        random numbers generator, required if there is noise
    :return:
        surfaces facing the camera, in camera frame
    """
    rotation, translation = camera_pose
    points = (scene.points - translation) @ rotation
    normals = scene.normals @ rotation
    cloud = partial_view(make_point_cloud(points, normals, True), np.zeros(3))
    if noise_sigma > 0:
        cloud = add_position_noise(cloud, noise_sigma, rng)
    return cloud


def increment_to_twist(
        increment: RigidTransform,
        center: np.ndarray,
        camera_pose: RigidTransform
) -> np.ndarray:
    """
    Convert alignment increment of observation to displacement of camera.

    :param increment:
        transform of observation (about `center`) made by one step
    :param center:
        centroid of observation (in camera frame)
    :param camera_pose:
        current camera pose
    :return:
        twist with linear and angular parts in world frame
    """
    rotation, translation = increment
    camera_rotation = camera_pose.rotation
    linear = camera_rotation @ (center - rotation.T @ (center + translation))
    angular = -camera_rotation @ log_so3(rotation)
    return np.concatenate([linear, angular])


def place_at_home_pose(
        arm: SimulatedArm,
        scene: PointCloud,
        start_pose: RigidTransform,
        goal_pose: RigidTransform
) -> Tuple[PointCloud, RigidTransform, RigidTransform, RigidTransform]:
    """
    Move scene and camera poses from frame of home camera pose to base frame of arm.

    :param arm:
        arm; its current joint positions define home pose
    :param scene:
        scene in frame of camera at home pose
    :param start_pose:
        initial camera pose relative to home pose
    :param goal_pose:
        goal camera pose relative to home pose
    :return:
        scene, start pose, and goal pose in base frame
        and also home pose itself
    """
    home_pose, _ = forward_kinematics(arm, arm.q)
    return (
        apply_transform(scene, home_pose, np.zeros(3)),
        compose(home_pose, start_pose),
        compose(home_pose, goal_pose),
        home_pose,
    )


def run_servo_sim(
        scene: PointCloud,
        start_pose: RigidTransform,
        goal_pose: RigidTransform,
        config: ControllerConfig,
        arm: Optional[SimulatedArm] = None,
        noise_sigma: float = 0.0,
        seed: int = 0
) -> ServoTrajectory:
    """
    Servo camera from start pose to goal pose using only observations.

    :param scene:
        scene in world frame
    :param start_pose:
        initial camera pose
    :param goal_pose:
        camera pose from which reference view is taken
    :param config:
        controller settings
    :param arm:
        arm carrying camera; if it is not passed, camera is free-flying
    :param noise_sigma:
        standard deviation of sensor noise (in meters)
    :param seed:
        seed of noise
    :return:
        trajectory of camera
    """
    validate_controller_config(config)
    rng = np.random.default_rng(seed)
    reference = observe(scene, goal_pose)
    if reference.n_points == 0:
        raise RuntimeError("Scene is not visible from goal pose.")
    spec = make_grid_spec(
        [reference], config.resolution, config.grid_dims, config.grid_padding
    )
    features = extract_reference_features(reference, spec, config)

    q = None
    pose = start_pose
    if arm is not None:
        q = solve_inverse_kinematics(arm, start_pose)
        pose, _ = forward_kinematics(arm, q)

    points = []
    tick_times = []
    initial_norms = None
    converged = False
    for tick in range(1, config.max_iters + 1):
        start = time.perf_counter()
        observation = crop_to_grid(observe(scene, pose, noise_sigma, rng), spec)
        if observation.n_points == 0:
            raise RuntimeError(f"Nothing is observed at tick {tick}.")
        state = servo_step(initial_state(), features, observation, config)
        points.append(TrajectoryPoint(tick, pose, state.j_t, state.j_r, q))
        if initial_norms is None:
            initial_norms = measure_step_norms(state)
        measure = compute_convergence_measure(state, initial_norms, config)
        if config.verbose:
            print(
                f"Tick {tick}: J_t = {state.j_t:.6g}, J_r = {state.j_r:.6g}, "
                f"convergence measure = {measure:.6g}"
            )
        if measure < config.epsilon_g:
            converged = True
            tick_times.append(time.perf_counter() - start)
            break
        twist = increment_to_twist(
            state.h, centroid(observation), pose
        )
        if arm is None:
            pose = apply_twist(pose, twist)
        else:
            q = move_by_twist(arm, q, twist)
            pose, _ = forward_kinematics(arm, q)
        tick_times.append(time.perf_counter() - start)
    return ServoTrajectory(points, converged, pose, float(np.mean(tick_times)))


def make_demo_scene(seed: int = 0) -> PointCloud:
    """
    Make scene with three objects in front of camera at identity pose.

    :param seed:
        seed of sampling
    :return:
        scene in world frame
    """
    return compose_scene([
        {
            'kind': 'ellipsoid',
            'params': {'semi_axes': [0.06, 0.04, 0.025]},
            'sample_count': 3000,
            'position': [0.0, 0.0, 0.45],
            'rotation_vector': [0.3, 0.2, 0.0],
        },
        {
            'kind': 'box',
            'params': {'sizes': [0.05, 0.04, 0.03]},
            'sample_count': 1500,
            'position': [0.1, 0.02, 0.5],
            'rotation_vector': [0.0, 0.4, 0.5],
        },
        {
            'kind': 'cylinder',
            'params': {'radius': 0.02, 'height': 0.06},
            'sample_count': 1500,
            'position': [-0.08, -0.06, 0.48],
            'rotation_vector': [1.2, 0.0, 0.0],
        },
    ], seed)
