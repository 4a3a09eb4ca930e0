"""Register-tiled depthwise/pointwise convolution kernels on a 4-lane
vector backend, with brute-force references, an instruction-counting
backend for measuring register<->cache traffic, and closed-form
arithmetic-intensity / roofline models the measurements are checked
against.  The `regconv` command line drives validation, traffic
measurement, benchmarking and roofline analysis over JSON layer configs.
"""

from .backend import (
    FLOPS_PER_FMA,
    FLOPS_PER_SCALAR_FMA,
    NUM_VEC_REGISTERS,
    SCALAR_BYTES,
    VEC_BYTES,
    VEC_LANES,
    CountingBackend,
    SimdBackend,
    TrafficCounters,
)
from .containers import (
    ConvGeometry,
    DwFilter,
    GeometryError,
    Matrix,
    Tensor3,
    max_rel_diff,
    reshape_to_matrix,
)
from .dwconv import (
    BlockingError,
    DwBlocking,
    dw_thread_footprint,
    dwconv_baseline,
    dwconv_hp,
)
from .intensity import (
    IntensityReport,
    RooflineParams,
    ai_dw_baseline,
    ai_dw_hp,
    ai_dw_hp_simplified,
    ai_rtra,
    ai_rtra_canonical,
    ai_rtrd,
    ai_rtrd_canonical,
    layer_compulsory_bytes,
    layer_flops,
    oi_conv_layer,
    roofline_attainable,
)
from .layers import ConfigError, LayerConfig, load_layer_configs
from .pwconv import (
    PW_ENGINES,
    RTRA_TILES,
    RTRD_TILES,
    MmBlocking,
    mm_rtra,
    mm_rtrd,
    pwconv,
)
from .reference import dwconv_naive, mm_naive, pwconv_naive

__version__ = "0.1.0"

__all__ = [
    "BlockingError",
    "ConfigError",
    "ConvGeometry",
    "CountingBackend",
    "DwBlocking",
    "DwFilter",
    "FLOPS_PER_FMA",
    "FLOPS_PER_SCALAR_FMA",
    "GeometryError",
    "IntensityReport",
    "LayerConfig",
    "Matrix",
    "MmBlocking",
    "NUM_VEC_REGISTERS",
    "PW_ENGINES",
    "RTRA_TILES",
    "RTRD_TILES",
    "RooflineParams",
    "SCALAR_BYTES",
    "SimdBackend",
    "Tensor3",
    "TrafficCounters",
    "VEC_BYTES",
    "VEC_LANES",
    "ai_dw_baseline",
    "ai_dw_hp",
    "ai_dw_hp_simplified",
    "ai_rtra",
    "ai_rtra_canonical",
    "ai_rtrd",
    "ai_rtrd_canonical",
    "dw_thread_footprint",
    "dwconv_baseline",
    "dwconv_hp",
    "dwconv_naive",
    "layer_compulsory_bytes",
    "layer_flops",
    "load_layer_configs",
    "max_rel_diff",
    "mm_naive",
    "mm_rtra",
    "mm_rtrd",
    "oi_conv_layer",
    "pwconv",
    "pwconv_naive",
    "reshape_to_matrix",
    "roofline_attainable",
]
