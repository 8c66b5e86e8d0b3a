"""Replication scheduling.

Replications are pure functions of ``(config, index)``.  They are split into
contiguous shards, executed serially or in a process pool, and returned in
index order, so results never depend on the worker count.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

from ..errors import ConfigError

ENV_WORKERS = "SPIKELAB_WORKERS"


def resolve_workers(flag: int | None = None) -> int:
    """Worker count: the flag, else ``SPIKELAB_WORKERS``, else the CPU count."""
    if flag is not None:
        n = flag
    elif os.environ.get(ENV_WORKERS):
        try:
            n = int(os.environ[ENV_WORKERS])
        except ValueError as exc:
            raise ConfigError(f"{ENV_WORKERS} must be an integer") from exc
    else:
        n = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
    if n < 1:
        raise ConfigError(f"worker count must be positive, got {n}")
    return n


def _run_shard(func: Callable, config, indices: Sequence[int]) -> list:
    return [func(config, i) for i in indices]


def run_replications(func: Callable, config, indices: Sequence[int], workers: int = 1) -> list:
    """Evaluate ``func(config, i)`` for every index, in index order.

    ``func`` must be a module-level function so it can be sent to worker
    processes.
    """
    indices = list(indices)
    if workers <= 1 or len(indices) <= 1:
        return _run_shard(func, config, indices)
    n_shards = min(len(indices), 4 * workers)
    size = -(-len(indices) // n_shards)
    shards = [indices[k:k + size] for k in range(0, len(indices), size)]
    out: list = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_shard, [func] * len(shards), [config] * len(shards), shards):
            out.extend(part)
    return out
