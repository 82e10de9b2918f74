"""
Generate clouds, register them, and run visual servoing from command line.
"""


import argparse
import os
import sys
import time
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from spectralservo.features import (
    build_egi,
    dump_egi,
    dump_voxel_grid,
    make_grid_spec,
    voxelize,
)
from spectralservo.geometry import (
    RigidTransform,
    apply_transform,
    centroid,
    compose,
    exp_so3,
    generate_shape,
    geodesic_angle,
    get_shapes_registry,
    identity_transform,
    inverse,
    rotation_to_quaternion,
    to_center_free,
)
from spectralservo.servo import (
    extract_reference_features,
    initial_state,
    make_controller_config,
    make_seven_joint_arm,
    run_alignment,
    run_registration_suite,
    run_servo_sim,
    servo_step,
    summarize_trials,
)
from spectralservo.servo.experiments import draw_ground_truth, make_object_model
from spectralservo.servo.simulation import make_demo_scene, place_at_home_pose
from spectralservo.spectral import dump_coefficients, make_real_sh_basis, sh_forward
from spectralservo.utils import (
    load_cloud,
    read_settings,
    save_cloud,
    transform_to_dict,
    write_json,
    write_settings,
    write_table,
    write_trace,
)


EXIT_SUCCESS = 0
EXIT_NOT_CONVERGED = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
SLOW_ITERATION_THRESHOLD = 0.1


class ArgumentParser(argparse.ArgumentParser):
    """Parser that reports usage errors with validation exit code."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def parse_pose(text: str) -> RigidTransform:
    """
    Parse camera pose from 'x,y,z,rx,ry,rz' string.

    :param text:
        position (in meters) and rotation vector (in degrees)
    :return:
        pose
    """
    try:
        values = [float(x) for x in text.split(',')]
    except ValueError:
        values = []
    if len(values) != 6:
        raise argparse.ArgumentTypeError(
            f"Pose must be 'x,y,z,rx,ry,rz', got '{text}'."
        )
    rotation = exp_so3(np.radians(values[3:]))
    return RigidTransform(rotation, np.array(values[:3]))


def parse_cli_args(args: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse arguments passed via Command Line Interface (CLI).

    :param args:
        arguments, `sys.argv[1:]` by default
    :return:
        namespace with arguments
    """
    parser = ArgumentParser(
        prog='spectralservo',
        description='Point cloud registration and visual servoing in spectral domain'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    gen_parser = subparsers.add_parser('gen', help='sample synthetic cloud')
    gen_parser.add_argument(
        '--shape', type=str, required=True,
        choices=sorted(get_shapes_registry()), help='kind of shape'
    )
    gen_parser.add_argument('--radius', type=float, help='radius (in meters)')
    gen_parser.add_argument('--height', type=float, help='height (in meters)')
    gen_parser.add_argument(
        '--sizes', type=float, nargs=3, help='edges of box (in meters)'
    )
    gen_parser.add_argument(
        '--semi_axes', type=float, nargs=3, help='semi-axes of ellipsoid (in meters)'
    )
    gen_parser.add_argument('--n', type=int, default=2000, help='number of points')
    gen_parser.add_argument('--seed', type=int, default=0, help='random seed')
    gen_parser.add_argument('--out', type=str, required=True, help='output path')

    register_parser = subparsers.add_parser(
        'register', help='find transform that moves target onto reference'
    )
    register_parser.add_argument('reference_path', type=str)
    register_parser.add_argument('target_path', type=str)

    servo_parser = subparsers.add_parser(
        'servo', help='servo simulated camera from start pose to goal pose'
    )
    servo_parser.add_argument(
        'scene_path', type=str, nargs='?', default=None,
        help='path to scene cloud, demo scene is used if it is omitted'
    )
    servo_parser.add_argument(
        '--start', type=parse_pose, required=True,
        help="start pose as 'x,y,z,rx,ry,rz' (meters and degrees)"
    )
    servo_parser.add_argument(
        '--goal', type=parse_pose, default=parse_pose('0,0,0,0,0,0'),
        help="goal pose as 'x,y,z,rx,ry,rz' (meters and degrees)"
    )

    dump_parser = subparsers.add_parser('dump', help='print features of a cloud')
    dump_parser.add_argument('cloud_path', type=str)
    dump_parser.add_argument(
        '--what', type=str, required=True, choices=['voxels', 'egi', 'sh']
    )

    bench_parser = subparsers.add_parser('bench', help='time alignment iterations')
    bench_parser.add_argument(
        '--n', type=int, default=20, help='number of iterations'
    )

    subparsers.add_parser('experiment', help='run synthetic registration trials')

    for subparser in subparsers.choices.values():
        subparser.add_argument(
            '-c', '--config_path', type=str, default=None,
            help='path to configuration file'
        )
        if subparser.prog.split()[-1] in ['register', 'servo', 'experiment']:
            subparser.add_argument(
                '-o', '--output_dir', type=str, default='results',
                help='path to directory for outputs'
            )
        if subparser.prog.split()[-1] in ['register', 'servo', 'dump']:
            subparser.add_argument(
                '--renormalize', action='store_true',
                help='scale non-unit normals of input clouds instead of failing'
            )

    cli_args = parser.parse_args(args)
    return cli_args


def prepare_output_dir(output_dir: str, settings: Dict[str, Any]) -> None:
    """
    Create directory for outputs and save resolved settings there.

    :param output_dir:
        path to directory
    :param settings:
        resolved settings
    :return:
        None
    """
    os.makedirs(output_dir, exist_ok=True)
    write_settings(settings, os.path.join(output_dir, 'run_config.yml'))


def cmd_gen(cli_args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """Sample synthetic cloud and save it."""
    if cli_args.n < 1:
        raise ValueError(f"Number of points must be positive, got {cli_args.n}.")
    params = {
        name: getattr(cli_args, name)
        for name in ['radius', 'height', 'sizes', 'semi_axes']
        if getattr(cli_args, name) is not None
    }
    cloud = generate_shape(cli_args.shape, params, cli_args.n, cli_args.seed)
    save_cloud(cloud, cli_args.out)
    print(f"Cloud of {cloud.n_points} points is saved to '{cli_args.out}'.")
    return EXIT_SUCCESS


def cmd_register(cli_args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """Register target cloud to reference cloud and save outputs."""
    config = make_controller_config(settings)
    reference = load_cloud(cli_args.reference_path, cli_args.renormalize)
    target = load_cloud(cli_args.target_path, cli_args.renormalize)
    prepare_output_dir(cli_args.output_dir, settings)

    result = run_alignment(reference, target, config)
    last = result.trace[-1]
    transform = to_center_free(result.transform, result.center)
    transform_data = transform_to_dict(transform)
    transform_data.update({
        'iterations': result.iterations,
        'converged': result.converged,
        'Jt': last.j_t,
        'Jr': last.j_r,
    })
    write_json(transform_data, os.path.join(cli_args.output_dir, 'transform.json'))
    write_trace(result.trace, os.path.join(cli_args.output_dir, 'trace.csv'))
    summary = {
        'converged': result.converged,
        'iterations': result.iterations,
        'final_Jt': last.j_t,
        'final_Jr': last.j_r,
        'final_grad_t_norm': last.grad_t_norm,
        'final_grad_r_norm': last.grad_r_norm,
        'mean_iteration_time': float(
            np.mean([record.wall_time for record in result.trace])
        ),
        'rotation_center': result.center.tolist(),
    }
    write_json(summary, os.path.join(cli_args.output_dir, 'summary.json'))
    status = 'converged' if result.converged else 'has not converged'
    print(
        f"Alignment {status} after {result.iterations} iterations, "
        f"outputs are saved to '{cli_args.output_dir}'."
    )
    return EXIT_SUCCESS if result.converged else EXIT_NOT_CONVERGED


def cmd_servo(cli_args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """
    Run closed-loop servoing and save trajectory.

    Poses and scene are given relative to camera at its initial pose:
    identity for free-flying camera and home pose for camera on arm.
    """
    config = make_controller_config(settings)
    if settings['arm'] not in ['free_flying', 'seven_joint']:
        raise ValueError(
            f"Unknown arm: {settings['arm']}, "
            f"allowed values are 'free_flying' and 'seven_joint'."
        )
    if cli_args.scene_path is None:
        scene = make_demo_scene(settings['seed'])
    else:
        scene = load_cloud(cli_args.scene_path, cli_args.renormalize)
    start, goal = cli_args.start, cli_args.goal
    frame = identity_transform()
    arm = None
    if settings['arm'] == 'seven_joint':
        arm = make_seven_joint_arm()
        scene, start, goal, frame = place_at_home_pose(arm, scene, start, goal)
    prepare_output_dir(cli_args.output_dir, settings)

    trajectory = run_servo_sim(
        scene, start, goal, config, arm,
        settings['noise_sigma'], settings['seed']
    )
    to_frame = inverse(frame)
    header = [
        'tick', 'J_t', 'J_r', 'x', 'y', 'z', 'qw', 'qx', 'qy', 'qz'
    ]
    rows = []
    for point in trajectory.points:
        pose = compose(to_frame, point.pose)
        rows.append([
            point.tick, point.j_t, point.j_r,
            *pose.translation.tolist(),
            *rotation_to_quaternion(pose.rotation).tolist()
        ])
    write_table(rows, header, os.path.join(cli_args.output_dir, 'trajectory.csv'))
    final_pose = compose(to_frame, trajectory.final_pose)
    goal = cli_args.goal
    summary = {
        'converged': trajectory.converged,
        'ticks': len(trajectory.points),
        'position_error': float(
            np.linalg.norm(final_pose.translation - goal.translation)
        ),
        'rotation_error_in_degrees': float(
            np.degrees(geodesic_angle(final_pose.rotation, goal.rotation))
        ),
        'path_length': trajectory.path_length,
        'mean_tick_time': trajectory.mean_tick_time,
    }
    write_json(summary, os.path.join(cli_args.output_dir, 'summary.json'))
    print(
        f"Final pose error is {1000 * summary['position_error']:.2f} mm and "
        f"{summary['rotation_error_in_degrees']:.2f} degrees."
    )
    return EXIT_SUCCESS if trajectory.converged else EXIT_NOT_CONVERGED


def cmd_dump(cli_args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """Print features of a cloud."""
    cloud = load_cloud(cli_args.cloud_path, cli_args.renormalize)
    if cli_args.what == 'voxels':
        spec = make_grid_spec(
            [cloud], settings['resolution'], None, settings['grid_padding']
        )
        text = dump_voxel_grid(voxelize(cloud, spec, settings['occupancy_mode']))
    elif cli_args.what == 'egi':
        text = dump_egi(build_egi(cloud, settings['bandwidth']))
    else:
        basis = make_real_sh_basis(settings['bandwidth'], settings['l_max'])
        egi = build_egi(cloud, settings['bandwidth'])
        text = dump_coefficients(sh_forward(egi, basis))
    sys.stdout.write(text)
    return EXIT_SUCCESS


def cmd_bench(cli_args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """Time alignment iterations on synthetic pair and report per-stage breakdown."""
    if cli_args.n < 1:
        raise ValueError(
            f"Number of iterations must be positive, got {cli_args.n}."
        )
    config = make_controller_config(settings)
    seed = settings['seed']
    rng = np.random.default_rng(seed)
    reference = make_object_model(settings, seed)
    truth = draw_ground_truth(rng, settings)
    target = apply_transform(reference, truth, centroid(reference))
    spec = make_grid_spec(
        [reference, target], config.resolution, config.grid_dims,
        config.grid_padding
    )
    features = extract_reference_features(reference, spec, config)

    state = initial_state()
    timings = {}
    durations = []
    for _ in range(cli_args.n):
        start = time.perf_counter()
        state = servo_step(state, features, target, config, timings)
        durations.append(time.perf_counter() - start)
    durations_in_ms = 1000 * np.array(durations)
    print(f"Grid dimensions: {'x'.join(str(x) for x in spec.dims)}")
    print(f"Bandwidth: {config.bandwidth}, maximum degree: {config.l_max}")
    print(f"Iterations: {state.iteration}")
    print(f"Mean time per iteration: {durations_in_ms.mean():.2f} ms")
    print(f"Median time per iteration: {np.median(durations_in_ms):.2f} ms")
    for stage in ['voxelize', 'fft', 'sh', 'gradient', 'update']:
        stage_time = 1000 * timings.get(stage, 0.0) / cli_args.n
        print(f"    {stage}: {stage_time:.2f} ms")
    if np.mean(durations) > SLOW_ITERATION_THRESHOLD:
        print(
            f"Warning: mean time per iteration exceeds "
            f"{1000 * SLOW_ITERATION_THRESHOLD:.0f} ms."
        )
    return EXIT_SUCCESS


def cmd_experiment(cli_args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """Run synthetic registration trials and save their results."""
    kind = settings['experiment']
    prepare_output_dir(cli_args.output_dir, settings)
    pool_kwargs = {'n_processes': settings['n_processes']}
    results = run_registration_suite(kind, settings, pool_kwargs)
    if settings['verbose']:
        for result in results:
            print(
                f"Trial with seed {result.seed}: {result.status} after "
                f"{result.iterations} iterations, translation error is "
                f"{result.translation_error:.4f} m, rotation error is "
                f"{result.rotation_error_in_degrees:.2f} degrees."
            )
    header = list(results[0]._fields)
    rows = [list(result) for result in results]
    write_table(rows, header, os.path.join(cli_args.output_dir, 'trials.csv'))
    summary = summarize_trials(results)
    write_json(summary, os.path.join(cli_args.output_dir, 'summary.json'))
    print(
        f"{summary['n_converged']} of {summary['n_trials']} trials of {kind} "
        f"have converged, outputs are saved to '{cli_args.output_dir}'."
    )
    if summary['n_converged'] == summary['n_trials']:
        return EXIT_SUCCESS
    return EXIT_NOT_CONVERGED


def get_commands_registry() -> Dict[str, Any]:
    """
    Get mapping from sub-command name to function that runs it.

    :return:
        registry of commands
    """
    registry = {
        'gen': cmd_gen,
        'register': cmd_register,
        'servo': cmd_servo,
        'dump': cmd_dump,
        'bench': cmd_bench,
        'experiment': cmd_experiment,
    }
    return registry


def run(args: Optional[List[str]] = None) -> int:
    """
    Run sub-command and convert its outcome to exit code.

    :param args:
        command line arguments
    :return:
        exit code
    """
    cli_args = parse_cli_args(args)
    try:
        settings = read_settings(cli_args.config_path)
        if cli_args.command == 'experiment' and settings['experiment'] == 'servo':
            cli_args.start = parse_pose('0.05,0.03,-0.04,0,20,0')
            cli_args.goal = parse_pose('0,0,0,0,0,0')
            cli_args.scene_path = None
            return cmd_servo(cli_args, settings)
        command = get_commands_registry()[cli_args.command]
        return command(cli_args, settings)
    except (ValueError, yaml.YAMLError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except RuntimeError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


def main() -> None:
    """Parse CLI arguments, run sub-command, and exit with its code."""
    sys.exit(run())


if __name__ == '__main__':
    main()
