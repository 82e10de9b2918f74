"""
Do auxiliary tasks.
"""


from .io import (
    load_cloud,
    read_settings,
    save_cloud,
    transform_to_dict,
    write_json,
    write_settings,
    write_table,
    write_trace,
)
from .misc import (
    count_trailing_increases,
    imap_in_parallel,
    is_power_of_two,
    next_power_of_two,
)


__all__ = [
    'count_trailing_increases',
    'imap_in_parallel',
    'is_power_of_two',
    'load_cloud',
    'next_power_of_two',
    'read_settings',
    'save_cloud',
    'transform_to_dict',
    'write_json',
    'write_settings',
    'write_table',
    'write_trace',
]
