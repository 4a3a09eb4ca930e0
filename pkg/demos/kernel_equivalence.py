"""Every optimized kernel reproduces its brute-force reference bit for bit.

The optimized kernels in this package never reassociate arithmetic: each
output element accumulates its products in exactly the order the naive
reference uses (filter taps in row-major order for depthwise, the shared
dimension in ascending order for matmul).  Blocking and multithreading only
change *which* elements are computed together, never the per-element order,
so the float32 results are identical down to the last bit — not merely
"close".  This script demonstrates that on awkward, nothing-divides-anything
shapes, across worker counts.

Run:  python3 demos/kernel_equivalence.py
"""

import numpy as np

from regconv import (
    DwBlocking,
    DwFilter,
    Matrix,
    MmBlocking,
    Tensor3,
    dwconv_baseline,
    dwconv_hp,
    dwconv_naive,
    mm_naive,
    mm_rtra,
    mm_rtrd,
    pwconv,
    pwconv_naive,
)


def check(label, out, ref):
    same = np.array_equal(out.data, ref.data)
    print(f"  {label:<46} {'bitwise identical' if same else 'MISMATCH'}")
    assert same


def main():
    print("Depthwise: 11x9 input, 6 channels, 3x3 filter, stride 2")
    print("(5x4 output: rows, 4-wide blocks and channel groups all have tails)")
    inp = Tensor3.new(11, 9, 6, fill=("random", (0, 1)))
    fil = DwFilter.new(3, 3, 6, fill=("random", (0, 2)))
    ref = dwconv_naive(inp, fil, stride=2)
    for workers in (1, 2, 4, 8):
        check(f"baseline, workers={workers}", dwconv_baseline(inp, fil, 2, workers=workers), ref)
        check(
            f"baseline + cached filter, workers={workers}",
            dwconv_baseline(inp, fil, 2, cache_filter=True, workers=workers),
            ref,
        )
        check(f"high-reuse, workers={workers}", dwconv_hp(inp, fil, 2, workers=workers), ref)
    for h_ob, w_ob in ((1, 1), (3, 3), (2, 4)):
        check(
            f"high-reuse, {h_ob}x{w_ob} output blocks",
            dwconv_hp(inp, fil, 2, blocking=DwBlocking(h_ob, w_ob)),
            ref,
        )

    print()
    print("Matrix multiply: 17x11 by 11x13 (prime-ish everything)")
    a = Matrix.new(17, 11, fill=("random", (0, 3)))
    b = Matrix.new(11, 13, fill=("random", (0, 4)))
    ref = mm_naive(a, b)
    check("A-resident tiling (rtra)", mm_rtra(a, b), ref)
    check("D-resident tiling (rtrd)", mm_rtrd(a, b), ref)
    check(
        "odd custom tiles (g_b=3, c_ib=5, c_ob=4)",
        mm_rtrd(a, b, blocking=MmBlocking(3, 5, 4)),
        ref,
    )

    print()
    print("Pointwise: 9x9 plane, 7 -> 9 channels (reshape + matmul, zero copies)")
    pin = Tensor3.new(9, 9, 7, fill=("random", (0, 5)))
    pfil = Matrix.new(7, 9, fill=("random", (0, 6)))
    ref = pwconv_naive(pin, pfil)
    for engine in ("naive", "rtra", "rtrd"):
        for workers in (1, 3) if engine != "naive" else (1,):
            kw = {"workers": workers} if engine != "naive" else {}
            check(f"engine={engine}, workers={workers}", pwconv(pin, pfil, engine=engine, **kw), ref)

    print()
    print("All outputs bitwise identical to their references.")


if __name__ == "__main__":
    main()
