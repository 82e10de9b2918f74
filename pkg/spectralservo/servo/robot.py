"""
Simulate a serial arm with a camera mounted on its flange.

Kinematics follows standard Denavit-Hartenberg convention: transform of
joint `i` is `Rz(q_i + offset_i) Tz(d_i) Tx(a_i) Rx(alpha_i)`.
"""


from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from spectralservo.geometry import RigidTransform, exp_so3, log_so3


HOME_POSITIONS = np.radians([0.0, 30.0, 0.0, -60.0, 0.0, 45.0, 0.0])


class SimulatedArm(NamedTuple):
    """Kinematic model of arm with camera."""

    dh_parameters: np.ndarray
    joint_limits: np.ndarray
    camera_mount: RigidTransform
    q: np.ndarray

    @property
    def n_joints(self) -> int:
        """Return number of joints."""
        return self.dh_parameters.shape[0]


def make_seven_joint_arm(q: Optional[np.ndarray] = None) -> SimulatedArm:
    """
    Make redundant 7-joint arm with dimensions of a typical collaborative arm.

    :param q:
        initial joint positions (in radians), bent home configuration
        by default
    :return:
        arm
    """
    half_pi = np.pi / 2
    # Columns are a, alpha, d, and offset of joint angle.
    dh_parameters = np.array([
        [0.0, -half_pi, 0.34, 0.0],
        [0.0, half_pi, 0.0, 0.0],
        [0.0, half_pi, 0.40, 0.0],
        [0.0, -half_pi, 0.0, 0.0],
        [0.0, -half_pi, 0.40, 0.0],
        [0.0, half_pi, 0.0, 0.0],
        [0.0, 0.0, 0.126, 0.0],
    ])
    limits = np.radians([170, 120, 170, 120, 170, 120, 175])
    joint_limits = np.column_stack([-limits, limits])
    camera_mount = RigidTransform(np.eye(3), np.array([0.0, 0.0, 0.05]))
    q = HOME_POSITIONS.copy() if q is None else np.asarray(q, dtype=float)
    return SimulatedArm(dh_parameters, joint_limits, camera_mount, q)


def _dh_matrix(a: float, alpha: float, d: float, theta: float) -> np.ndarray:
    cos_theta, sin_theta = np.cos(theta), np.sin(theta)
    cos_alpha, sin_alpha = np.cos(alpha), np.sin(alpha)
    return np.array([
        [cos_theta, -sin_theta * cos_alpha, sin_theta * sin_alpha, a * cos_theta],
        [sin_theta, cos_theta * cos_alpha, -cos_theta * sin_alpha, a * sin_theta],
        [0.0, sin_alpha, cos_alpha, d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def forward_kinematics(
        arm: SimulatedArm, q: np.ndarray
) -> Tuple[RigidTransform, List[np.ndarray]]:
    """
    Find camera pose in base frame.

    :param arm:
        arm
    :param q:
        joint positions (in radians)
    :return:
        camera pose and 4x4 poses of frames of base and all joints
    """
    frames = [np.eye(4)]
    for (a, alpha, d, offset), angle in zip(arm.dh_parameters, q):
        frames.append(frames[-1] @ _dh_matrix(a, alpha, d, angle + offset))
    flange = frames[-1]
    rotation = flange[:3, :3] @ arm.camera_mount.rotation
    translation = flange[:3, :3] @ arm.camera_mount.translation + flange[:3, 3]
    return RigidTransform(rotation, translation), frames


def geometric_jacobian(arm: SimulatedArm, q: np.ndarray) -> np.ndarray:
    """
    Compute geometric Jacobian of camera origin.

    :param arm:
        arm
    :param q:
        joint positions (in radians)
    :return:
        array of shape (6, n_joints) with linear velocity rows
        and then angular velocity rows (both in base frame)
    """
    pose, frames = forward_kinematics(arm, q)
    jacobian = np.zeros((6, arm.n_joints))
    for i in range(arm.n_joints):
        axis = frames[i][:3, 2]
        lever = pose.translation - frames[i][:3, 3]
        jacobian[:3, i] = np.cross(axis, lever)
        jacobian[3:, i] = axis
    return jacobian


def jacobian_pinv(jacobian: np.ndarray, rcond: float = 1e-8) -> np.ndarray:
    """
    Compute Moore-Penrose pseudo-inverse with truncation of small singular values.

    :param jacobian:
        array of shape (6, n) where n >= 6
    :param rcond:
        singular values below `rcond` times the largest one are treated as 0
    :return:
        array of shape (n, 6)
    """
    if jacobian.shape[0] != 6 or jacobian.shape[1] < 6:
        raise ValueError(
            f"Jacobian of shape (6, n) with n >= 6 is expected, "
            f"got {jacobian.shape}."
        )
    return np.linalg.pinv(jacobian, rcond=rcond)


def check_joint_limits(arm: SimulatedArm, q: np.ndarray) -> None:
    """
    Check that joint positions are within limits.

    :param arm:
        arm
    :param q:
        joint positions (in radians)
    :return:
        None
    """
    lower, upper = arm.joint_limits[:, 0], arm.joint_limits[:, 1]
    is_violated = (q < lower) | (q > upper)
    if np.any(is_violated):
        joint = int(np.argmax(is_violated))
        raise RuntimeError(
            f"Joint {joint} is out of its limits: {np.degrees(q[joint]):.2f} "
            f"degrees while allowed range is "
            f"[{np.degrees(lower[joint]):.2f}, {np.degrees(upper[joint]):.2f}]."
        )


def pose_error(current: RigidTransform, goal: RigidTransform) -> np.ndarray:
    """
    Compute twist that moves current pose to goal pose in one unit of time.

    :param current:
        current pose
    :param goal:
        goal pose
    :return:
        array of shape (6,) with linear and angular parts (in base frame)
    """
    linear = goal.translation - current.translation
    angular = log_so3(goal.rotation @ current.rotation.T)
    return np.concatenate([linear, angular])


def solve_inverse_kinematics(
        arm: SimulatedArm,
        goal: RigidTransform,
        q_initial: Optional[np.ndarray] = None,
        max_iters: int = 500,
        tolerance: float = 1e-9
) -> np.ndarray:
    """
    Find joint positions that put camera at a pose.

    :param arm:
        arm
    :param goal:
        camera pose in base frame
    :param q_initial:
        starting joint positions, current positions of arm by default
    :param max_iters:
        maximum number of Newton iterations
    :param tolerance:
        threshold for norm of pose error
    :return:
        joint positions
    """
    q = np.array(arm.q if q_initial is None else q_initial, dtype=float)
    for _ in range(max_iters):
        pose, _ = forward_kinematics(arm, q)
        error = pose_error(pose, goal)
        if np.linalg.norm(error) < tolerance:
            check_joint_limits(arm, q)
            return q
        q += jacobian_pinv(geometric_jacobian(arm, q)) @ error
    raise RuntimeError("Inverse kinematics has not converged.")


def move_by_twist(
        arm: SimulatedArm, q: np.ndarray, twist: np.ndarray
) -> np.ndarray:
    """
    Update joint positions with resolved-rate control.

    :param arm:
        arm
    :param q:
        joint positions (in radians)
    :param twist:
        desired displacement of camera (linear and angular parts in base frame)
    :return:
        new joint positions
    """
    q_new = q + jacobian_pinv(geometric_jacobian(arm, q)) @ twist
    check_joint_limits(arm, q_new)
    return q_new


def apply_twist(pose: RigidTransform, twist: np.ndarray) -> RigidTransform:
    """
    Move free-flying camera by a twist.

    :param pose:
        camera pose
    :param twist:
        displacement (linear and angular parts in base frame)
    :return:
        new pose
    """
    rotation = exp_so3(twist[3:]) @ pose.rotation
    return RigidTransform(rotation, pose.translation + twist[:3])
