"""Small shared helpers: worker resolution and index-range splitting."""

from __future__ import annotations

import os

WORKERS_ENV = "BOSONSIM_WORKERS"


def resolve_workers(workers: int | None) -> int:
    """Return an explicit worker count, falling back to the environment default."""
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def split_ranges(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    """Partition [lo, hi) into at most `parts` contiguous nonempty ranges."""
    total = hi - lo
    if total <= 0:
        return []
    parts = min(parts, total)
    step, rem = divmod(total, parts)
    ranges = []
    start = lo
    for i in range(parts):
        stop = start + step + (1 if i < rem else 0)
        ranges.append((start, stop))
        start = stop
    return ranges
