"""Optimized depthwise-convolution kernels.

Two implementations with very different register<->cache behavior:

dwconv_baseline
    Row-parallel, loop nest l / k' / n / kk / m / channel-group.  Every FMA
    re-loads its input, filter and output vectors and stores the output back
    (4 transfers per FMA -> AI = 1/8).  With cache_filter=True the filter row
    for the current n is held in registers across the kk loop, amortizing the
    filter loads to 1/w_ob per FMA -> AI = 1/((3 + 1/w_ob)*2), still < 1/6.

dwconv_hp
    Channel-parallel with register tiling.  Each worker owns a contiguous
    range of 4-channel groups; per group the whole H_f x W_f filter tile is
    loaded into the virtual register file once (the first (l', k') block) and
    stays resident for every output block.  Each h_ob x w_ob output tile is
    loaded once, updated by H_f*W_f FMAs per element, and stored once, so
    besides the amortized filter traffic only the input vector per FMA moves.

Both kernels execute their per-block instruction sequence in lockstep across
all blocks of equal shape (see backend.py); edge blocks in H_o/W_o run as
smaller tiles and a channel remainder (C % 4) runs through the scalar ops.
Per-output-element accumulation is (n, m) ascending in both kernels and in
dwconv_naive, independent of blocking and worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from math import ceil

import numpy as np

from .backend import NUM_VEC_REGISTERS, SimdBackend
from .containers import ConvGeometry, DwFilter, Tensor3
from .partition import block_zones, chunk_ranges, run_workers


class BlockingError(ValueError):
    """Tile sizes that do not fit the virtual register file."""


@dataclass(frozen=True)
class DwBlocking:
    """Output-tile sizes for dwconv_hp (h_ob x w_ob elements per tile)."""

    h_ob: int = 2
    w_ob: int = 2

    def __post_init__(self):
        if self.h_ob < 1 or self.w_ob < 1:
            raise ValueError(f"blocking must be >= 1, got {self}")

    def register_demand(self, h_f: int, w_f: int) -> int:
        # filter tile + output tile + one input scratch register
        return h_f * w_f + self.h_ob * self.w_ob + 1

    def check_budget(self, h_f: int, w_f: int) -> None:
        demand = self.register_demand(h_f, w_f)
        if demand > NUM_VEC_REGISTERS:
            raise BlockingError(
                f"{h_f}x{w_f} filter with {self.h_ob}x{self.w_ob} output tile "
                f"needs {demand} vector registers, budget is {NUM_VEC_REGISTERS}"
            )


def dwconv_baseline(
    inp: Tensor3,
    filt: DwFilter,
    stride: int = 1,
    w_ob: int = 4,
    workers: int = 1,
    *,
    cache_filter: bool = False,
    backend: SimdBackend | None = None,
) -> Tensor3:
    """Row-parallel depthwise convolution streaming the output through registers."""
    if w_ob < 1:
        raise ValueError(f"w_ob must be >= 1, got {w_ob}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    bk = backend if backend is not None else SimdBackend()
    g = ConvGeometry.of(inp, filt, stride)
    out = Tensor3.new(g.h_o, g.w_o, g.channels)
    parts = [bk.fork() for _ in range(workers)]
    tasks = [
        partial(_baseline_worker, parts[w], inp, filt, out, g, w_ob, cache_filter, l0, l1)
        for w, (l0, l1) in enumerate(chunk_ranges(g.h_o, workers))
    ]
    run_workers(tasks)
    bk.merge(parts)
    return out


def _baseline_worker(bk, inp, filt, out, g, w_ob, cache_filter, l0, l1):
    if l1 <= l0:
        return
    s, wi, wo, c = g.stride, g.w_i, g.w_o, g.channels
    hf, wf = g.h_f, g.w_f
    src, fil, dst = inp.data, filt.data, out.data
    rows = np.arange(l0, l1)[:, None, None]

    def run_block(groups, load, store, fmadd):
        # groups: channel base offsets, vector groups or scalar tail channels
        for k0, span in block_zones(wo, w_ob):
            cols = k0[None, :, None]
            shape = np.broadcast_shapes(rows.shape, cols.shape, groups.shape)
            for n in range(hf):
                if cache_filter:
                    # filter row n pinned in registers for the whole kk loop
                    vf = [
                        load(fil, np.broadcast_to((n * wf + m) * c + groups, shape))
                        for m in range(wf)
                    ]
                for kk in range(span):
                    off_o = (rows * wo + (cols + kk)) * c + groups
                    for m in range(wf):
                        off_i = ((rows * s + n) * wi + ((cols + kk) * s + m)) * c + groups
                        vi = load(src, off_i)
                        if cache_filter:
                            vfil = vf[m]
                        else:
                            vfil = load(fil, np.broadcast_to((n * wf + m) * c + groups, shape))
                        vo = load(dst, off_o)
                        store(dst, off_o, fmadd(vi, vfil, vo))

    n_groups = c // 4
    if n_groups:
        run_block((np.arange(n_groups) * 4)[None, None, :], bk.load, bk.store, bk.fma)
    if c % 4:
        tail = np.arange(n_groups * 4, c)[None, None, :]
        run_block(tail, bk.load_scalar, bk.store_scalar, bk.fma_scalar)


def dwconv_hp(
    inp: Tensor3,
    filt: DwFilter,
    stride: int = 1,
    blocking: DwBlocking | None = None,
    workers: int = 1,
    *,
    backend: SimdBackend | None = None,
) -> Tensor3:
    """Channel-parallel register-tiled depthwise convolution."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    blk = blocking if blocking is not None else DwBlocking()
    bk = backend if backend is not None else SimdBackend()
    g = ConvGeometry.of(inp, filt, stride)
    blk.check_budget(g.h_f, g.w_f)
    out = Tensor3.new(g.h_o, g.w_o, g.channels)
    n_groups = g.channels // 4
    parts = [bk.fork() for _ in range(workers)]
    tasks = []
    for w, (g0, g1) in enumerate(chunk_ranges(n_groups, workers)):
        with_tail = w == workers - 1 and g.channels % 4 != 0
        tasks.append(partial(_hp_worker, parts[w], inp, filt, out, g, blk, g0, g1, with_tail))
    run_workers(tasks)
    bk.merge(parts)
    return out


def _hp_worker(bk, inp, filt, out, g, blk, g0, g1, with_tail):
    s, wi, wo, c = g.stride, g.w_i, g.w_o, g.channels
    hf, wf = g.h_f, g.w_f
    src, fil, dst = inp.data, filt.data, out.data

    def run_block(ch, load, store, fmadd):
        # ch: (n, 1, 1) channel base offsets this worker owns
        # filter tile loaded once per channel group (the l'==0 && k'==0 block)
        # and resident across every (l', k') output block
        vfilt = [load(fil, (n * wf + m) * c + ch) for n in range(hf) for m in range(wf)]
        for lstarts, h_span in block_zones(g.h_o, blk.h_ob):
            lrow = lstarts[None, :, None]
            for kstarts, w_span in block_zones(g.w_o, blk.w_ob):
                kcol = kstarts[None, None, :]
                tile_offs = {}
                vout = {}
                for ll in range(h_span):
                    for kk in range(w_span):
                        off = ((lrow + ll) * wo + (kcol + kk)) * c + ch
                        tile_offs[ll, kk] = off
                        vout[ll, kk] = load(dst, off)
                for ll in range(h_span):
                    for kk in range(w_span):
                        acc = vout[ll, kk]
                        for n in range(hf):
                            for m in range(wf):
                                off_i = (((lrow + ll) * s + n) * wi
                                         + ((kcol + kk) * s + m)) * c + ch
                                acc = fmadd(load(src, off_i), vfilt[n * wf + m], acc)
                        vout[ll, kk] = acc
                for key, off in tile_offs.items():
                    store(dst, off, vout[key])

    if g1 > g0:
        run_block((np.arange(g0, g1) * 4)[:, None, None], bk.load, bk.store, bk.fma)
    if with_tail:
        tail = np.arange((c // 4) * 4, c)[:, None, None]
        run_block(tail, bk.load_scalar, bk.store_scalar, bk.fma_scalar)


def dw_thread_footprint(filt: DwFilter, workers: int, scheme: str) -> int:
    """Filter elements the busiest worker must pull through its registers.

    Row-parallel partitioning gives every worker the whole filter; splitting
    the channel groups instead divides the filter with the channels, which is
    what makes dwconv_hp's per-worker footprint shrink as workers grow.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    per_position = filt.height * filt.width
    if scheme == "row-parallel":
        return per_position * filt.channels
    if scheme == "channel-parallel":
        groups = ceil(filt.channels / 4)
        biggest_chunk = ceil(groups / workers)
        return per_position * min(filt.channels, biggest_chunk * 4)
    raise ValueError(f"unknown scheme {scheme!r} (row-parallel or channel-parallel)")
