"""Work partitioning shared by the kernels.

Partitioning is always a contiguous chunking of some independent axis
(output rows, channel groups, row blocks), with remainder units going to the
lowest-index workers.  Because workers own disjoint output regions and the
per-element accumulation order never depends on the chunking, results are
bitwise identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def chunk_ranges(n_units: int, workers: int) -> list[tuple[int, int]]:
    """Split [0, n_units) into `workers` contiguous half-open ranges.

    Remainder units go to the lowest-index workers; trailing workers may get
    empty ranges when there are fewer units than workers.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    base, extra = divmod(n_units, workers)
    out = []
    start = 0
    for w in range(workers):
        size = base + (1 if w < extra else 0)
        out.append((start, start + size))
        start += size
    return out


def block_zones(total: int, block: int) -> list[tuple[np.ndarray, int]]:
    """Cover [0, total) with `block`-sized blocks plus one remainder block.

    Returns [(block_start_indices, span), ...]: one entry for the full-size
    blocks (all executed in lockstep) and, if total % block != 0, one entry
    for the single smaller edge block.
    """
    zones = []
    nfull, rem = divmod(total, block)
    if nfull:
        zones.append((np.arange(nfull) * block, block))
    if rem:
        zones.append((np.array([nfull * block]), rem))
    return zones


def unit_zones(total: int, block: int, u0: int, u1: int) -> list[tuple[np.ndarray, int]]:
    """block_zones restricted to block units [u0, u1) of the axis.

    Unit u covers [u*block, min((u+1)*block, total)); the last unit may be a
    smaller remainder block.  Used when workers split a blocked axis by unit.
    """
    nfull = total // block
    zones = []
    lo = min(u1, nfull)
    if u0 < lo:
        zones.append((np.arange(u0, lo) * block, block))
    if u1 > nfull and total % block:
        zones.append((np.array([nfull * block]), total % block))
    return zones


def run_workers(tasks) -> None:
    """Run one callable per worker; real threads when there is more than one.

    Workers write disjoint regions, so no synchronization beyond the join is
    needed.  Exceptions propagate to the caller.
    """
    if len(tasks) == 1:
        tasks[0]()
        return
    with ThreadPoolExecutor(max_workers=len(tasks)) as pool:
        for fut in [pool.submit(t) for t in tasks]:
            fut.result()
