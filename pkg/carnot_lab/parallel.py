#!/usr/bin/env python3
"""
Parallel Helpers - Carnot Lab
Order-preserving worker pool and deterministic summation.
"""

import os
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

_default_workers: Optional[int] = None


def default_workers() -> int:
    """Worker count used when callers pass none"""
    if _default_workers is not None:
        return _default_workers
    return os.cpu_count() or 1


def set_default_workers(workers: Optional[int]) -> None:
    global _default_workers
    if workers is not None and workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    _default_workers = workers


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Map fn over items; results come back in input order for any worker count"""
    items = list(items)
    workers = workers or default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def fsum_rows(values: Sequence[np.ndarray]) -> np.ndarray:
    """Componentwise math.fsum over a sequence of equally shaped arrays"""
    if len(values) == 0:
        return np.zeros(0)
    stacked = np.stack([np.atleast_1d(np.asarray(v, dtype=float)) for v in values])
    flat = stacked.reshape(len(values), -1)
    out = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])])
    return out.reshape(stacked.shape[1:])
