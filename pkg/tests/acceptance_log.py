"""Collects one summary line per acceptance criterion for the terminal report."""

import time
from contextlib import contextmanager

LINES = []


@contextmanager
def criterion(number, title, limit):
    """Time a block; record PASS only if it finished cleanly within ``limit`` seconds."""
    start = time.perf_counter()
    outcome = {"note": ""}
    try:
        yield outcome
    except BaseException:
        elapsed = time.perf_counter() - start
        LINES.append(f"FAIL criterion {number} ({title}): {elapsed:.2f}s / {limit}s {outcome['note']}".rstrip())
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < limit
    LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {elapsed:.2f}s / {limit}s {outcome['note']}".rstrip())
    assert ok, f"criterion {number} took {elapsed:.2f}s, limit {limit}s"
