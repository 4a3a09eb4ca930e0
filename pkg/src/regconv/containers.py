"""Dense float32 containers for convolution kernels.

All data lives in flat float32 numpy arrays with channels innermost
(HWC / NHWC-without-N), so the 4 channels a SIMD lane group touches are
always contiguous no matter the spatial stride:

    Tensor3 / DwFilter:  offset(h, w, c) = (h*W + w)*C + c
    Matrix:              offset(r, c)    = r*cols + c

Reshaping a Tensor3 to a (H*W) x C matrix is therefore free (same buffer),
which is exactly what turns a 1x1 convolution into a plain matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    """Convolution geometry that cannot be computed in valid mode."""


def _fill_data(count: int, fill) -> np.ndarray:
    """Build a flat float32 array for one of the supported fill specs.

    fill is "zeros", "sequential", ("constant", v) or ("random", seed).
    seeded-random is uniform [0, 1) and deterministic per seed.
    """
    if isinstance(fill, str):
        if fill == "zeros":
            return np.zeros(count, dtype=np.float32)
        if fill == "sequential":
            return np.arange(count, dtype=np.float32)
    elif isinstance(fill, tuple) and len(fill) == 2:
        kind, arg = fill
        if kind == "constant":
            return np.full(count, arg, dtype=np.float32)
        if kind == "random":
            return np.random.default_rng(arg).random(count, dtype=np.float32)
    raise ValueError(f"unknown fill spec {fill!r}")


def _check_dims(what: str, *dims: int) -> None:
    for d in dims:
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise ValueError(f"{what} dimensions must be integers >= 1, got {dims}")


@dataclass(eq=False)
class Tensor3:
    """A H x W x C feature map over a flat float32 buffer."""

    height: int
    width: int
    channels: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.dtype != np.float32 or self.data.ndim != 1:
            raise ValueError("Tensor3 data must be a flat float32 array")
        if self.data.size != self.height * self.width * self.channels:
            raise ValueError("Tensor3 data length does not match dims")

    @classmethod
    def new(cls, height: int, width: int, channels: int, fill="zeros") -> Tensor3:
        _check_dims("Tensor3", height, width, channels)
        return cls(height, width, channels, _fill_data(height * width * channels, fill))

    def offset_of(self, h: int, w: int, c: int) -> int:
        return (h * self.width + w) * self.channels + c

    def at(self, h: int, w: int, c: int) -> float:
        return float(self.data[self.offset_of(h, w, c)])

    def to_matrix(self) -> "Matrix":
        # zero-copy: row g = h*W + w holds the C channels of pixel (h, w)
        return Matrix(self.height * self.width, self.channels, self.data)


@dataclass(eq=False)
class DwFilter:
    """A H_f x W_f x C depthwise filter; channel c applies only to input channel c."""

    height: int
    width: int
    channels: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.dtype != np.float32 or self.data.ndim != 1:
            raise ValueError("DwFilter data must be a flat float32 array")
        if self.data.size != self.height * self.width * self.channels:
            raise ValueError("DwFilter data length does not match dims")

    @classmethod
    def new(cls, height: int, width: int, channels: int, fill="zeros") -> DwFilter:
        _check_dims("DwFilter", height, width, channels)
        return cls(height, width, channels, _fill_data(height * width * channels, fill))

    def offset_of(self, n: int, m: int, c: int) -> int:
        return (n * self.width + m) * self.channels + c


@dataclass(eq=False)
class Matrix:
    """A rows x cols row-major float32 matrix."""

    rows: int
    cols: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.dtype != np.float32 or self.data.ndim != 1:
            raise ValueError("Matrix data must be a flat float32 array")
        if self.data.size != self.rows * self.cols:
            raise ValueError("Matrix data length does not match dims")

    @classmethod
    def new(cls, rows: int, cols: int, fill="zeros") -> Matrix:
        _check_dims("Matrix", rows, cols)
        return cls(rows, cols, _fill_data(rows * cols, fill))

    def offset_of(self, r: int, c: int) -> int:
        return r * self.cols + c

    def at(self, r: int, c: int) -> float:
        return float(self.data[self.offset_of(r, c)])

    def to_tensor3(self, height: int, width: int) -> Tensor3:
        if height * width != self.rows:
            raise ValueError(
                f"cannot reshape {self.rows} rows to {height}x{width} spatial dims"
            )
        return Tensor3(height, width, self.cols, self.data)


def reshape_to_matrix(t: Tensor3) -> Matrix:
    """View a feature map as a (H*W) x C matrix (shared buffer, no copy)."""
    return t.to_matrix()


@dataclass(frozen=True)
class ConvGeometry:
    """Valid-mode convolution geometry: output dim = (input - filter)/stride + 1."""

    stride: int
    h_i: int
    w_i: int
    channels: int
    h_f: int
    w_f: int
    h_o: int
    w_o: int

    @classmethod
    def of(cls, inp: Tensor3, filt: DwFilter, stride: int) -> ConvGeometry:
        if stride < 1:
            raise GeometryError(f"stride must be >= 1, got {stride}")
        if inp.channels != filt.channels:
            raise GeometryError(
                f"channel mismatch: input has {inp.channels}, filter has {filt.channels}"
            )
        if filt.height > inp.height or filt.width > inp.width:
            raise GeometryError(
                f"filter {filt.height}x{filt.width} larger than input "
                f"{inp.height}x{inp.width}"
            )
        # no padding, so the filter must step off the input exactly
        if (inp.height - filt.height) % stride or (inp.width - filt.width) % stride:
            raise GeometryError(
                f"(input - filter) not divisible by stride: "
                f"({inp.height}-{filt.height}, {inp.width}-{filt.width}) vs s={stride}"
            )
        return cls(
            stride=stride,
            h_i=inp.height,
            w_i=inp.width,
            channels=inp.channels,
            h_f=filt.height,
            w_f=filt.width,
            h_o=(inp.height - filt.height) // stride + 1,
            w_o=(inp.width - filt.width) // stride + 1,
        )


def max_rel_diff(a, b, eps: float = 1e-30) -> float:
    """Largest elementwise relative difference, |x-y| / max(|x|, |y|, eps).

    The eps floor makes exact-zero pairs compare as 0 instead of 0/0.
    Containers must have identical dims.
    """
    if type(a) is not type(b):
        raise ValueError(f"cannot compare {type(a).__name__} with {type(b).__name__}")
    if a.data.size != b.data.size:
        raise ValueError("shape mismatch in max_rel_diff")
    if isinstance(a, (Tensor3, DwFilter)):
        if (a.height, a.width, a.channels) != (b.height, b.width, b.channels):
            raise ValueError("shape mismatch in max_rel_diff")
    elif isinstance(a, Matrix):
        if (a.rows, a.cols) != (b.rows, b.cols):
            raise ValueError("shape mismatch in max_rel_diff")
    x = a.data.astype(np.float64)
    y = b.data.astype(np.float64)
    denom = np.maximum(np.maximum(np.abs(x), np.abs(y)), eps)
    return float(np.max(np.abs(x - y) / denom))
