"""Brute-force scalar re-implementations used to check the library's reference
kernels.

These were written before the library and intentionally share no code with it:
element-by-element float32 arithmetic over flat lists, nothing vectorized.
They are far too slow for real sizes — that is the point; there is nothing in
them that can be subtly wrong in the same way as the real kernels.

Layout conventions (fixed here and mirrored by the library):
  feature maps / filters: offset(h, w, c) = (h*W + w)*C + c   (channels innermost)
  matrices:               offset(r, c)    = r*cols + c        (row major)
"""

import numpy as np

f32 = np.float32


def dwconv_scalar(idata, fdata, h_i, w_i, c, h_f, w_f, stride):
    """Valid-mode depthwise convolution, one multiply-accumulate at a time."""
    h_o = (h_i - h_f) // stride + 1
    w_o = (w_i - w_f) // stride + 1
    out = [f32(0.0)] * (h_o * w_o * c)
    for l in range(h_o):
        for k in range(w_o):
            for i in range(c):
                acc = f32(0.0)
                for n in range(h_f):
                    for m in range(w_f):
                        a = f32(idata[((l * stride + n) * w_i + (k * stride + m)) * c + i])
                        b = f32(fdata[(n * w_f + m) * c + i])
                        acc = f32(acc + f32(a * b))
                out[(l * w_o + k) * c + i] = acc
    return out


def mm_scalar(adata, bdata, m, k, n):
    """Triple-loop matrix product, i-k-j order, float32 at every step."""
    out = [f32(0.0)] * (m * n)
    for i in range(m):
        for kk in range(k):
            for j in range(n):
                prod = f32(f32(adata[i * k + kk]) * f32(bdata[kk * n + j]))
                out[i * n + j] = f32(out[i * n + j] + prod)
    return out


def pwconv_scalar(idata, fdata, h, w, c_i, c_o):
    """1x1 convolution: per-pixel channel mix, same accumulation order as mm_scalar."""
    out = [f32(0.0)] * (h * w * c_o)
    for g in range(h * w):
        for i in range(c_i):
            for j in range(c_o):
                prod = f32(f32(idata[g * c_i + i]) * f32(fdata[i * c_o + j]))
                out[g * c_o + j] = f32(out[g * c_o + j] + prod)
    return out
