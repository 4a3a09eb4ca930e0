"""Closed-form arithmetic-intensity formulas and roofline arithmetic.

Arithmetic intensity (AI) here is flops per byte moved between the register
file and the cache — the quantity the counting backend measures along with
the kernels' execution.  Each kernel's AI has an exact closed form under the
transfer-cost model (16-byte vector load/store, 4-byte broadcast/scalar load,
8 flops per vector FMA):

baseline depthwise      1/8 uncached; 1/((3 + 1/w_ob)*2) with the filter row
                        cached across a w_ob output block (< 1/6 for any w_ob)
register-tiled depthwise  full blocked form with the filter tile amortized
                        over all (h_o/h_ob)*(w_o/w_ob) blocks; its
                        large-output simplification h_f*w_f/((2 + h_f*w_f)*2)
                        is 9/22 for 3x3 filters and approaches 1/2 from below
rtra matrix multiply    resident A tile, D re-loaded/stored per k panel
rtrd matrix multiply    resident D tile, A broadcast-loaded per use

Operational intensity (OI) is the roofline x-axis: flops per byte moved
between cache and main memory, estimated with the compulsory-traffic model
(each operand crosses once, ideal cache).

The exact tile forms are the primary API; the *_canonical helpers are the
specialized views for the default tile sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .layers import LayerConfig


@dataclass(frozen=True)
class RooflineParams:
    """The roofline's two asymptotes, in flops/second and bytes/second."""

    peak_flops: float
    mem_bandwidth: float

    def __post_init__(self):
        if self.peak_flops <= 0 or self.mem_bandwidth <= 0:
            raise ValueError(f"roofline parameters must be positive, got {self}")


@dataclass(frozen=True)
class IntensityReport:
    """Analytical (and optionally measured) intensity for one strategy run."""

    strategy: str
    analytical_ai: float
    flops: int
    bytes_total: int
    measured_ai: float | None = None

    @property
    def rel_deviation(self) -> float | None:
        """|measured - analytical| / analytical, when a measurement exists."""
        if self.measured_ai is None:
            return None
        return abs(self.measured_ai - self.analytical_ai) / self.analytical_ai


def _check_positive(**kwargs):
    for key, val in kwargs.items():
        if val < 1:
            raise ValueError(f"{key} must be >= 1, got {val}")


def ai_dw_baseline(w_ob: int = 4, cached_filter: bool = False) -> float:
    """AI of the row-streaming depthwise kernel.

    Uncached, every FMA moves four vectors (input, filter, output load and
    store): 8 flops / 64 bytes = 1/8.  Caching the filter row across a w_ob
    output block amortizes its load to 1/w_ob per FMA, which can only reach
    1/6 in the limit.
    """
    _check_positive(w_ob=w_ob)
    if not cached_filter:
        return 1.0 / 8.0
    return 1.0 / ((3.0 + 1.0 / w_ob) * 2.0)


def ai_dw_hp(h_f: int, w_f: int, h_ob: int, w_ob: int, h_o: int, w_o: int) -> float:
    """AI of the register-tiled depthwise kernel, exact blocked form.

    Per h_ob x w_ob output block: w = h_ob*w_ob*h_f*w_f FMAs (8w flops), one
    input vector per FMA, the output tile loaded and stored once, and the
    filter tile's h_f*w_f loads amortized over all (h_o/h_ob)*(w_o/w_ob)
    blocks of the output.  Exact for traffic when h_o, w_o divide evenly.
    """
    _check_positive(h_f=h_f, w_f=w_f, h_ob=h_ob, w_ob=w_ob, h_o=h_o, w_o=w_o)
    w = h_ob * w_ob * h_f * w_f
    per_block_vectors = h_f * w_f / ((w_o / w_ob) * (h_o / h_ob)) + 2.0 * h_ob * w_ob + w
    return 8.0 * w / (16.0 * per_block_vectors)


def ai_dw_hp_simplified(h_f: int, w_f: int) -> float:
    """Large-output limit of ai_dw_hp: h_f*w_f / ((2 + h_f*w_f) * 2).

    Drops the amortized filter term and the 1/(h_ob*w_ob) factor of the
    output-tile term, leaving a lower bound that depends only on the filter
    size: 9/22 for 3x3, 25/54 for 5x5, approaching 1/2 from below.
    """
    _check_positive(h_f=h_f, w_f=w_f)
    taps = h_f * w_f
    return taps / ((2.0 + taps) * 2.0)


def ai_rtra(g_b: int, c_ib: int, c_ob: int, c_o: int) -> float:
    """AI of the resident-A-tile matrix multiply, exact tile form.

    Per (i', g', j') call: 2*g_b*c_ib*c_ob flops; the D tile is loaded and
    stored (2*g_b*c_ob elements), the B panel loaded (c_ib*c_ob), and the A
    tile's g_b*c_ib load amortized over the c_o/c_ob calls that reuse it.
    """
    _check_positive(g_b=g_b, c_ib=c_ib, c_ob=c_ob, c_o=c_o)
    flops = 2.0 * g_b * c_ib * c_ob
    elements = 2.0 * g_b * c_ob + c_ib * c_ob + g_b * c_ib * c_ob / c_o
    return flops / (4.0 * elements)


def ai_rtra_canonical(c_o: int) -> float:
    """ai_rtra at the default 8x8 A tile and 8x4 D tile: 4 / (3 + 8/c_o)."""
    _check_positive(c_o=c_o)
    return 4.0 / (3.0 + 8.0 / c_o)


def ai_rtrd(g_b: int, c_ib: int, c_ob: int, c_i: int) -> float:
    """AI of the resident-D-tile matrix multiply, exact tile form.

    Per (g', j', i') call: 2*g_b*c_ib*c_ob flops; A elements broadcast-loaded
    (g_b*c_ib elements at 4 bytes), the B panel loaded (c_ib*c_ob), and the D
    tile's load+store amortized over the c_i/c_ib calls it stays resident for.
    """
    _check_positive(g_b=g_b, c_ib=c_ib, c_ob=c_ob, c_i=c_i)
    flops = 2.0 * g_b * c_ib * c_ob
    elements = g_b * c_ib + c_ib * c_ob + 2.0 * g_b * c_ob * c_ib / c_i
    return flops / (4.0 * elements)


def ai_rtrd_canonical(c_i: int) -> float:
    """ai_rtrd at the default 8x4 A panel and 8x8 D tile: 2 / (1 + 8/c_i)."""
    _check_positive(c_i=c_i)
    return 2.0 / (1.0 + 8.0 / c_i)


def roofline_attainable(params: RooflineParams, oi: float) -> float:
    """Attainable flops/second at operational intensity oi: min(peak, oi*bw)."""
    if oi < 0:
        raise ValueError(f"operational intensity must be >= 0, got {oi}")
    return min(params.peak_flops, oi * params.mem_bandwidth)


def layer_flops(config: LayerConfig) -> int:
    """Total useful flops of a layer (multiply and add counted separately)."""
    if config.kind == "dwconv":
        return 2 * config.h_o * config.w_o * config.c_i * config.h_f * config.w_f
    return 2 * config.h_i * config.w_i * config.c_i * config.c_o


def layer_compulsory_bytes(config: LayerConfig) -> int:
    """Bytes if every operand crosses the cache<->memory boundary exactly once."""
    if config.kind == "dwconv":
        elements = (
            config.h_i * config.w_i * config.c_i
            + config.h_f * config.w_f * config.c_i
            + config.h_o * config.w_o * config.c_i
        )
    else:
        g = config.h_i * config.w_i
        elements = g * config.c_i + config.c_i * config.c_o + g * config.c_o
    return 4 * elements


def oi_conv_layer(config: LayerConfig) -> float:
    """Operational intensity under the compulsory-traffic model."""
    return layer_flops(config) / layer_compulsory_bytes(config)
