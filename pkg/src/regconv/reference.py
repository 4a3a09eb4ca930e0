"""Deliberately simple reference kernels.

Every optimized kernel in this package is accepted only by equivalence to
these.  They are single-threaded, ignore the SIMD backend entirely, and fix
the accumulation order so their outputs are bit-reproducible:

  * dwconv_naive / pwconv_naive / mm_naive all accumulate each output element
    over ascending reduction indices ((n, m) row-major for DWConv, k ascending
    for the matrix forms).
  * The innermost loop runs as one numpy row operation purely for speed; that
    does not change any element's accumulation sequence, and the fully scalar
    re-implementation in the test suite pins this down bitwise.
"""

from __future__ import annotations

import numpy as np

from .containers import ConvGeometry, DwFilter, Matrix, Tensor3


def dwconv_naive(inp: Tensor3, filt: DwFilter, stride: int = 1) -> Tensor3:
    """Valid-mode depthwise convolution, plain loop nest.

    O[l,k,i] = sum_{n,m} I[l*s+n, k*s+m, i] * F[n,m,i]; channel i of the
    filter only ever touches channel i of the input.
    """
    g = ConvGeometry.of(inp, filt, stride)
    src = inp.data.reshape(g.h_i, g.w_i, g.channels)
    fil = filt.data.reshape(g.h_f, g.w_f, g.channels)
    out = np.zeros((g.h_o, g.w_o, g.channels), dtype=np.float32)
    s = stride
    for l in range(g.h_o):
        for k in range(g.w_o):
            for n in range(g.h_f):
                for m in range(g.w_f):
                    # all channels at once; per-channel order is (n, m) ascending
                    out[l, k, :] += src[l * s + n, k * s + m, :] * fil[n, m, :]
    return Tensor3(g.h_o, g.w_o, g.channels, out.reshape(-1))


def pwconv_naive(inp: Tensor3, filt: Matrix) -> Tensor3:
    """1x1 convolution: O[h,w,j] = sum_i I[h,w,i] * F[i,j]; spatial dims unchanged."""
    if filt.rows != inp.channels:
        raise ValueError(
            f"filter rows ({filt.rows}) must equal input channels ({inp.channels})"
        )
    pixels = inp.height * inp.width
    src = inp.data.reshape(pixels, inp.channels)
    fil = filt.data.reshape(filt.rows, filt.cols)
    out = np.zeros((pixels, filt.cols), dtype=np.float32)
    for gidx in range(pixels):
        row = out[gidx]
        for i in range(inp.channels):
            row += src[gidx, i] * fil[i]
    return Tensor3(inp.height, inp.width, filt.cols, out.reshape(-1))


def mm_naive(a: Matrix, b: Matrix) -> Matrix:
    """Triple-loop matrix product, i-k-j order fixed for determinism."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: ({a.rows}x{a.cols}) x ({b.rows}x{b.cols})")
    lhs = a.data.reshape(a.rows, a.cols)
    rhs = b.data.reshape(b.rows, b.cols)
    out = np.zeros((a.rows, b.cols), dtype=np.float32)
    for i in range(a.rows):
        row = out[i]
        for k in range(a.cols):
            row += lhs[i, k] * rhs[k]
    return Matrix(a.rows, b.cols, out.reshape(-1))
