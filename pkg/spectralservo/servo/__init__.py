"""
Align clouds and servo camera with spectral gradients.
"""


from .controller import (
    AlignmentResult,
    ControllerConfig,
    ReferenceFeatures,
    ServoState,
    TraceRecord,
    extract_reference_features,
    initial_state,
    make_controller_config,
    run_alignment,
    servo_step,
    validate_controller_config,
)
from .experiments import (
    TrialResult,
    run_registration_suite,
    run_registration_trial,
    summarize_trials,
)
from .robot import (
    SimulatedArm,
    forward_kinematics,
    geometric_jacobian,
    jacobian_pinv,
    make_seven_joint_arm,
    solve_inverse_kinematics,
)
from .simulation import ServoTrajectory, observe, run_servo_sim


__all__ = [
    'AlignmentResult',
    'ControllerConfig',
    'ReferenceFeatures',
    'ServoState',
    'ServoTrajectory',
    'SimulatedArm',
    'TraceRecord',
    'TrialResult',
    'extract_reference_features',
    'forward_kinematics',
    'geometric_jacobian',
    'initial_state',
    'jacobian_pinv',
    'make_controller_config',
    'make_seven_joint_arm',
    'observe',
    'run_alignment',
    'run_registration_suite',
    'run_registration_trial',
    'run_servo_sim',
    'servo_step',
    'solve_inverse_kinematics',
    'summarize_trials',
    'validate_controller_config',
]
