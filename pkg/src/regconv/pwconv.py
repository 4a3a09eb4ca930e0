"""Register-tiled matrix multiply and pointwise (1x1) convolution.

A pointwise convolution over an H x W x C_i tensor is the matrix product
D = A @ B with A the input reshaped (zero-copy) to G x C_i rows of pixels,
G = H*W, and B the C_i x C_o filter.  Both kernels tile D into g_b x c_ob
register blocks and differ in which operand stays resident:

mm_rtra ("reuse the A tile")
    Loop order i' (sequential) / g' (parallel) / j'.  The g_b x c_ib A tile
    is vector-loaded once per (i', g') and reused for every j'; elements are
    lane-duplicated out of the resident registers at zero memory cost.  The
    price is that the D tile holds partial sums in memory: it is loaded and
    stored around every k panel, 2*g_b*c_ob elements per call.

mm_rtrd ("reuse the D tile")
    Loop order g' (parallel) / j' / i' (sequential innermost).  The D tile is
    loaded once, accumulates in registers across the entire k dimension, and
    is stored once.  A elements are broadcast-loaded (4 bytes each) per use;
    B rows are vector-loaded per use in both kernels.

Per D element the accumulation order is k ascending in both kernels and in
mm_naive, for any blocking or worker count, so results are bitwise identical.
Workers split the g' row blocks contiguously (disjoint D rows, no races).
Blocks execute in lockstep batches (see backend.py): full g'/j' blocks form
one batch, edge blocks run as smaller tiles, and D-column remainders (span %
4) go through the scalar ops.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from math import ceil

import numpy as np

from .backend import NUM_VEC_REGISTERS, SimdBackend
from .containers import GeometryError, Matrix, Tensor3, reshape_to_matrix
from .dwconv import BlockingError
from .partition import block_zones, chunk_ranges, run_workers, unit_zones
from .reference import pwconv_naive

PW_ENGINES = ("naive", "rtra", "rtrd")


@dataclass(frozen=True)
class MmBlocking:
    """Register-tile sizes: g_b x c_ib A panel, g_b x c_ob D tile."""

    g_b: int
    c_ib: int
    c_ob: int

    def __post_init__(self):
        if self.g_b < 1 or self.c_ib < 1 or self.c_ob < 1:
            raise ValueError(f"blocking must be >= 1, got {self}")
        if self.c_ob % 4:
            raise ValueError(f"c_ob must be a multiple of the 4 vector lanes, got {self.c_ob}")

    def register_demand_rtra(self) -> int:
        # resident A tile + D tile + one B scratch register per column lane
        return self.g_b * ceil(self.c_ib / 4) + self.g_b * (self.c_ob // 4) + self.c_ob // 4

    def register_demand_rtrd(self) -> int:
        # resident D tile + one broadcast A register per row + B scratch
        return self.g_b * (self.c_ob // 4) + self.g_b + self.c_ob // 4

    def check_budget_rtra(self) -> None:
        demand = self.register_demand_rtra()
        if demand > NUM_VEC_REGISTERS:
            raise BlockingError(
                f"{self} needs {demand} vector registers with a resident A tile, "
                f"budget is {NUM_VEC_REGISTERS}"
            )

    def check_budget_rtrd(self) -> None:
        demand = self.register_demand_rtrd()
        if demand > NUM_VEC_REGISTERS:
            raise BlockingError(
                f"{self} needs {demand} vector registers with a resident D tile, "
                f"budget is {NUM_VEC_REGISTERS}"
            )


RTRA_TILES = MmBlocking(g_b=8, c_ib=8, c_ob=4)
RTRD_TILES = MmBlocking(g_b=8, c_ib=4, c_ob=8)


def _steps(total: int, block: int) -> list[tuple[int, int]]:
    """Sequential (start, span) steps covering [0, total) in block strides."""
    out = [(s, block) for s in range(0, total - block + 1, block)]
    if total % block:
        out.append((total - total % block, total % block))
    return out


def mm_rtra(
    a: Matrix,
    b: Matrix,
    blocking: MmBlocking | None = None,
    workers: int = 1,
    *,
    backend: SimdBackend | None = None,
) -> Matrix:
    """D = A @ B keeping the A tile resident in registers."""
    return _mm_tiled(a, b, blocking or RTRA_TILES, workers, backend, _rtra_worker, "rtra")


def mm_rtrd(
    a: Matrix,
    b: Matrix,
    blocking: MmBlocking | None = None,
    workers: int = 1,
    *,
    backend: SimdBackend | None = None,
) -> Matrix:
    """D = A @ B keeping the D tile resident in registers."""
    return _mm_tiled(a, b, blocking or RTRD_TILES, workers, backend, _rtrd_worker, "rtrd")


def _mm_tiled(a, b, blk, workers, backend, worker_fn, which):
    if a.cols != b.rows:
        raise GeometryError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if which == "rtra":
        blk.check_budget_rtra()
    else:
        blk.check_budget_rtrd()
    bk = backend if backend is not None else SimdBackend()
    d = Matrix.new(a.rows, b.cols)
    n_units = ceil(a.rows / blk.g_b)
    parts = [bk.fork() for _ in range(workers)]
    tasks = [
        partial(worker_fn, parts[w], a, b, d, blk, u0, u1)
        for w, (u0, u1) in enumerate(chunk_ranges(n_units, workers))
    ]
    run_workers(tasks)
    bk.merge(parts)
    return d


def _dtile_offsets(grow, jcol, co, g_span, vec_ct, sc_ct):
    sc_base = 4 * vec_ct
    off_v = [[(grow + r) * co + jcol + 4 * t for t in range(vec_ct)] for r in range(g_span)]
    off_s = [[(grow + r) * co + jcol + sc_base + u for u in range(sc_ct)] for r in range(g_span)]
    return off_v, off_s


def _rtra_worker(bk, a, b, d, blk, u0, u1):
    if u1 <= u0:
        return
    ci, co = a.cols, b.cols
    adata, bdata, ddata = a.data, b.data, d.data
    gzones = unit_zones(a.rows, blk.g_b, u0, u1)
    jzones = block_zones(co, blk.c_ob)
    for i0, i_span in _steps(ci, blk.c_ib):
        a_vec_ct, a_sc_ct = i_span // 4, i_span % 4
        for gstarts, g_span in gzones:
            grow = gstarts[:, None]
            # A tile vector-loaded once per (i', g') block, resident across j'
            va = [
                [bk.load(adata, (grow + r) * ci + i0 + 4 * t) for t in range(a_vec_ct)]
                for r in range(g_span)
            ]
            va_tail = [
                [
                    bk.load_scalar(adata, (grow + r) * ci + i0 + 4 * a_vec_ct + u)
                    for u in range(a_sc_ct)
                ]
                for r in range(g_span)
            ]
            for jstarts, j_span in jzones:
                jcol = jstarts[None, :]
                shape = np.broadcast_shapes(grow.shape, jcol.shape)
                vec_ct, sc_ct = j_span // 4, j_span % 4
                sc_base = 4 * vec_ct
                off_v, off_s = _dtile_offsets(grow, jcol, co, g_span, vec_ct, sc_ct)
                # D tile holds partial sums in memory: load, update, store back
                acc_v = [[bk.load(ddata, o) for o in row] for row in off_v]
                acc_s = [[bk.load_scalar(ddata, o) for o in row] for row in off_s]
                for k in range(i_span):
                    vb = [
                        bk.load(bdata, np.broadcast_to((i0 + k) * co + jcol + 4 * t, shape))
                        for t in range(vec_ct)
                    ]
                    sb = [
                        bk.load_scalar(
                            bdata, np.broadcast_to((i0 + k) * co + jcol + sc_base + u, shape)
                        )
                        for u in range(sc_ct)
                    ]
                    for r in range(g_span):
                        # lane-duplicate A[gstart+r, i0+k] out of the resident
                        # tile: a register permute, no memory traffic
                        if k < 4 * a_vec_ct:
                            dup_s = va[r][k // 4][..., k % 4]
                            dup = va[r][k // 4][..., k % 4 : k % 4 + 1]
                        else:
                            dup_s = va_tail[r][k - 4 * a_vec_ct]
                            dup = dup_s[..., None]
                        for t in range(vec_ct):
                            acc_v[r][t] = bk.fma(vb[t], dup, acc_v[r][t])
                        for u in range(sc_ct):
                            acc_s[r][u] = bk.fma_scalar(sb[u], dup_s, acc_s[r][u])
                for r in range(g_span):
                    for t in range(vec_ct):
                        bk.store(ddata, off_v[r][t], acc_v[r][t])
                    for u in range(sc_ct):
                        bk.store_scalar(ddata, off_s[r][u], acc_s[r][u])


def _rtrd_worker(bk, a, b, d, blk, u0, u1):
    if u1 <= u0:
        return
    ci, co = a.cols, b.cols
    adata, bdata, ddata = a.data, b.data, d.data
    for gstarts, g_span in unit_zones(a.rows, blk.g_b, u0, u1):
        grow = gstarts[:, None]
        for jstarts, j_span in block_zones(co, blk.c_ob):
            jcol = jstarts[None, :]
            shape = np.broadcast_shapes(grow.shape, jcol.shape)
            vec_ct, sc_ct = j_span // 4, j_span % 4
            sc_base = 4 * vec_ct
            off_v, off_s = _dtile_offsets(grow, jcol, co, g_span, vec_ct, sc_ct)
            # D tile loaded once and resident across the whole k dimension
            acc_v = [[bk.load(ddata, o) for o in row] for row in off_v]
            acc_s = [[bk.load_scalar(ddata, o) for o in row] for row in off_s]
            for i0, i_span in _steps(ci, blk.c_ib):
                for k in range(i_span):
                    vb = [
                        bk.load(bdata, np.broadcast_to((i0 + k) * co + jcol + 4 * t, shape))
                        for t in range(vec_ct)
                    ]
                    sb = [
                        bk.load_scalar(
                            bdata, np.broadcast_to((i0 + k) * co + jcol + sc_base + u, shape)
                        )
                        for u in range(sc_ct)
                    ]
                    for r in range(g_span):
                        # A[gstart+r, i0+k] broadcast-loaded: 4 bytes per use
                        dup = bk.load_broadcast(
                            adata, np.broadcast_to((grow + r) * ci + i0 + k, shape)
                        )
                        for t in range(vec_ct):
                            acc_v[r][t] = bk.fma(vb[t], dup, acc_v[r][t])
                        dup_s = dup[..., 0]
                        for u in range(sc_ct):
                            acc_s[r][u] = bk.fma_scalar(sb[u], dup_s, acc_s[r][u])
            for r in range(g_span):
                for t in range(vec_ct):
                    bk.store(ddata, off_v[r][t], acc_v[r][t])
                for u in range(sc_ct):
                    bk.store_scalar(ddata, off_s[r][u], acc_s[r][u])


def pwconv(
    inp: Tensor3,
    filt: Matrix,
    engine: str = "rtrd",
    blocking: MmBlocking | None = None,
    workers: int = 1,
    *,
    backend: SimdBackend | None = None,
) -> Tensor3:
    """Pointwise convolution: reshape to G x C_i, multiply, reshape back."""
    if inp.channels != filt.rows:
        raise GeometryError(
            f"input has {inp.channels} channels but filter expects {filt.rows}"
        )
    if engine == "naive":
        if blocking is not None or workers != 1 or backend is not None:
            raise ValueError("engine 'naive' takes no blocking, workers, or backend")
        return pwconv_naive(inp, filt)
    if engine == "rtra":
        d = mm_rtra(reshape_to_matrix(inp), filt, blocking, workers, backend=backend)
    elif engine == "rtrd":
        d = mm_rtrd(reshape_to_matrix(inp), filt, blocking, workers, backend=backend)
    else:
        raise ValueError(f"unknown engine {engine!r}, expected one of {PW_ENGINES}")
    return d.to_tensor3(inp.height, inp.width)
