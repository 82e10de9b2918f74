"""
Do miscellaneous auxiliary tasks.
"""


import multiprocessing as mp
from typing import Any, Callable, Dict, Iterator, List, Optional


def is_power_of_two(number: int) -> bool:
    """
    Check that a number is a positive integer power of two.

    :param number:
        number to be checked
    :return:
        `True` if number is 1, 2, 4, 8 and so on, `False` else
    """
    return isinstance(number, int) and number > 0 and number & (number - 1) == 0


def next_power_of_two(number: float) -> int:
    """
    Find the least power of two that is not less than a given number.

    :param number:
        positive number
    :return:
        power of two
    """
    result = 1
    while result < number:
        result *= 2
    return result


def count_trailing_increases(values: List[float]) -> int:
    """
    Count how many times in a row values have strictly increased at the end.

    :param values:
        history of values
    :return:
        length of the final run of strict increases
    """
    count = 0
    for previous, current in zip(values[-2::-1], values[::-1]):
        if current > previous:
            count += 1
        else:
            break
    return count


def imap_in_parallel(
        fn: Callable,
        args: Iterator[Any],
        pool_kwargs: Optional[Dict[str, Any]] = None
) -> Iterator[Any]:
    """
    Apply function to each argument from given iterable in parallel.

    This function contains boilerplate code that is needed for correct work
    of `pytest-cov`. Usage of `mp.Pool` as context manager is not alternative
    to this function, because some covered lines of code may be not marked
    as covered and some files like '.coverage.hostname.*' may be not deleted.

    If `n_processes` is 1, no pool is created at all.

    :param fn:
        function
    :param args:
        generator of arguments
    :param pool_kwargs:
        parameters of pool such as number of processes and maximum number of
        tasks for a worker before it is replaced with a new one
    :return:
        results of applying the function to the arguments
    """
    pool_kwargs = dict(pool_kwargs or {})
    if pool_kwargs.get('n_processes') == 1:
        return iter([fn(arg) for arg in args])
    pool_kwargs['processes'] = pool_kwargs.get('n_processes')
    pool_kwargs['maxtasksperchild'] = pool_kwargs.get('max_tasks_per_child')
    old_keys = ['n_processes', 'max_tasks_per_child']
    pool_kwargs = {k: v for k, v in pool_kwargs.items() if k not in old_keys}
    pool = mp.Pool(**pool_kwargs)
    try:
        results = pool.imap(fn, args)
    finally:
        pool.close()
        pool.join()
    return results
