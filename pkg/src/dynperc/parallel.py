"""Replication fan-out with schedule-independent results.

Every replication gets its own stream derived from the master stream and
the replication id alone, so the set of random draws does not depend on
how many workers execute them; the pool only changes wall-clock time.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import InvalidParameterError
from .geometry import RngStream

__all__ = ["THREADS_ENV_VAR", "resolve_threads", "map_replications"]

THREADS_ENV_VAR = "DYNPERC_THREADS"


def resolve_threads(flag: int | None = None, config_value: int | None = None) -> int:
    """Worker count: environment variable beats the flag beats the config."""
    env = os.environ.get(THREADS_ENV_VAR)
    for source, raw in (("env", env), ("flag", flag), ("config", config_value)):
        if raw is None:
            continue
        try:
            n = int(raw)
        except ValueError:
            raise InvalidParameterError(f"thread count from {source} is not an integer: {raw!r}")
        if n < 1:
            raise InvalidParameterError(f"thread count from {source} must be >= 1, got {n}")
        return n
    return 1


def _invoke(task):
    fn, rep_id, stream = task
    return fn(rep_id, stream)


def map_replications(fn, n: int, stream: RngStream, n_workers: int = 1, purpose: str = "rep") -> list:
    """Run fn(rep_id, substream) for rep_id in 0..n-1, in replication order.

    fn must be picklable (module level or a partial of one) when n_workers
    exceeds 1.
    """
    if n < 0:
        raise InvalidParameterError(f"replication count must be >= 0, got {n}")
    tasks = [(fn, i, stream.substream(purpose, i)) for i in range(n)]
    if n_workers <= 1 or n <= 1:
        return [_invoke(t) for t in tasks]
    chunk = max(1, n // (4 * n_workers))
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_invoke, tasks, chunksize=chunk))
