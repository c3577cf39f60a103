"""Seed derivation and deterministic parallel mapping."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """Return the next splitmix64 output for ``state``."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Derive an independent 64-bit seed for sub-task ``path`` of ``seed``.

    Each index is folded in with one splitmix64 step, so ``derive_seed(s, i)``
    and ``derive_seed(s, i, j)`` never depend on thread scheduling.
    """
    state = seed & _MASK64
    for index in path:
        state = splitmix64(state ^ splitmix64(index & _MASK64))
    return state


def rng_for(seed: int, *path: int) -> np.random.Generator:
    """Seeded generator for sub-task ``path``."""
    return np.random.default_rng(derive_seed(seed, *path))


def thread_cap(requested: Optional[int] = None) -> int:
    """Number of worker threads, capped by GPT_SPECTRA_THREADS."""
    env = os.environ.get("GPT_SPECTRA_THREADS")
    cap = max(1, int(env)) if env else (os.cpu_count() or 1)
    return max(1, min(requested or 1, cap))


def parallel_map(
    fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> list[R]:
    """Map ``fn`` over ``items``; results keep input order."""
    items = list(items)
    workers = thread_cap(threads)
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
