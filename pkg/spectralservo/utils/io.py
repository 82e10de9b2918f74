"""
Read from some formats and write to some formats.
"""


import csv
import json
import os
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from spectralservo.geometry import (
    PointCloud,
    RigidTransform,
    make_point_cloud,
    rotation_to_quaternion,
)
from spectralservo.geometry.cloud import NORMAL_TOLERANCE


DEFAULT_CONFIG_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    'configs', 'default_config.yml'
)


def load_cloud(path: str, renormalize: bool = False) -> PointCloud:
    """
    Read oriented point cloud from text file.

    Each line has 'x y z nx ny nz'. Empty lines and lines starting
    with '#' are skipped.

    :param path:
        path to file
    :param renormalize:
        if it is `True`, non-unit normals are scaled instead of being rejected
    :return:
        point cloud
    """
    rows = []
    with open(path) as in_file:
        for line_number, line in enumerate(in_file, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            fields = line.split()
            if len(fields) != 6:
                raise ValueError(
                    f"Line {line_number} of '{path}' has {len(fields)} fields, "
                    f"but 6 fields are expected."
                )
            try:
                row = [float(x) for x in fields]
            except ValueError as e:
                raise ValueError(
                    f"Line {line_number} of '{path}' contains non-numeric field."
                ) from e
            normal_length = np.linalg.norm(row[3:])
            if not renormalize and abs(normal_length - 1) > NORMAL_TOLERANCE:
                raise ValueError(
                    f"Line {line_number} of '{path}' has normal of length "
                    f"{normal_length}, but unit length is required."
                )
            rows.append(row)
    data = np.array(rows, dtype=float).reshape(-1, 6)
    return make_point_cloud(data[:, :3], data[:, 3:], renormalize)


def save_cloud(cloud: PointCloud, path: str) -> None:
    """
    Write oriented point cloud to text file without loss of precision.

    :param cloud:
        point cloud
    :param path:
        path to file
    :return:
        None
    """
    with open(path, 'w') as out_file:
        for point, normal in zip(cloud.points, cloud.normals):
            fields = [repr(float(x)) for x in np.concatenate([point, normal])]
            out_file.write(' '.join(fields) + '\n')


def write_table(
        rows: List[List[Any]], header: List[str], path: str
) -> None:
    """
    Write rows to CSV file.

    :param rows:
        rows of values
    :param header:
        names of columns
    :param path:
        path to file
    :return:
        None
    """
    with open(path, 'w', newline='') as out_file:
        writer = csv.writer(out_file)
        writer.writerow(header)
        writer.writerows(rows)


def write_trace(trace: List[Any], path: str) -> None:
    """
    Write alignment trace to CSV file.

    Pose in a row is the transform at which costs and gradients of the
    row are measured. Duration of iteration goes after the pose.

    :param trace:
        records of alignment iterations
    :param path:
        path to file
    :return:
        None
    """
    header = [
        'iter', 'Jt', 'Jr', 'grad_t_norm', 'grad_cr_norm',
        'tx', 'ty', 'tz', 'qw', 'qx', 'qy', 'qz', 'wall_time'
    ]
    rows = [
        [
            record.iteration, record.j_t, record.j_r,
            record.grad_t_norm, record.grad_r_norm,
            *record.translation.tolist(), *record.quaternion.tolist(),
            record.wall_time
        ]
        for record in trace
    ]
    write_table(rows, header, path)


def transform_to_dict(transform: RigidTransform) -> Dict[str, List[float]]:
    """
    Represent transform with JSON-compatible values.

    :param transform:
        rigid transform
    :return:
        row-major rotation matrix, quaternion (w, x, y, z), and translation
    """
    return {
        'rotation': transform.rotation.ravel().tolist(),
        'quaternion': rotation_to_quaternion(transform.rotation).tolist(),
        'translation': transform.translation.tolist(),
    }


def write_json(data: Dict[str, Any], path: str) -> None:
    """
    Write dictionary to JSON file.

    :param data:
        JSON-compatible dictionary
    :param path:
        path to file
    :return:
        None
    """
    with open(path, 'w') as out_file:
        json.dump(data, out_file, indent=4)
        out_file.write('\n')


def read_settings(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Read settings from YAML file on top of default settings.

    :param config_path:
        path to user configuration file
    :return:
        settings
    """
    with open(DEFAULT_CONFIG_PATH) as config_file:
        settings = yaml.safe_load(config_file)
    if config_path is None:
        return settings
    with open(config_path) as config_file:
        user_settings = yaml.safe_load(config_file) or {}
    if not isinstance(user_settings, dict):
        raise ValueError(f"Configuration file '{config_path}' is not a mapping.")
    unknown_keys = sorted(set(user_settings) - set(settings))
    if unknown_keys:
        raise ValueError(
            f"Unknown keys in configuration file '{config_path}': {unknown_keys}."
        )
    settings.update(user_settings)
    return settings


def write_settings(settings: Dict[str, Any], path: str) -> None:
    """
    Write settings to YAML file.

    :param settings:
        settings
    :param path:
        path to file
    :return:
        None
    """
    with open(path, 'w') as out_file:
        yaml.safe_dump(settings, out_file, default_flow_style=False)
