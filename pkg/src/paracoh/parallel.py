"""Deterministic parallel map, capped by PARACOH_THREADS."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_budget() -> int:
    raw = os.environ.get("PARACOH_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(os.cpu_count() or 1, 8)
    return n


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Apply a pure function to every item; results keep submit order."""
    items = list(items)
    workers = min(thread_budget(), max(len(items), 1))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
