"""How register blocking moves depthwise convolution off the memory wall.

A depthwise convolution does very little arithmetic per byte: each output
element needs h_f*w_f fused multiply-adds, and a 4-lane FMA yields 8 flops
while its operands cost up to 16 bytes of traffic.  The three strategies
below differ only in what they keep in registers:

  baseline          nothing resident: every FMA loads input, filter and the
                    output accumulator, then stores the accumulator.
                    Intensity is exactly 8 / 64 = 1/8, independent of shape.
  baseline+cache    the filter column stays in registers across a w_ob-wide
                    row block.  Intensity 1 / ((3 + 1/w_ob) * 2), which can
                    never reach 1/6 no matter how wide the block.
  high-reuse        the whole filter and an h_ob x w_ob block of outputs stay
                    resident; accumulation happens in registers.  Intensity
                    approaches h_f*w_f / ((2 + h_f*w_f) * 2)  (9/22 for 3x3).

Every run below executes the real kernel on a counting backend that charges
each vector load/store 16 bytes and each scalar access 4 bytes, then compares
the measured flops-per-byte against the closed-form prediction.

Run:  python3 demos/dwconv_traffic.py
"""

from regconv import (
    CountingBackend,
    DwFilter,
    Tensor3,
    ai_dw_baseline,
    ai_dw_hp,
    ai_dw_hp_simplified,
    dwconv_baseline,
    dwconv_hp,
)


def measure(fn, inp, fil, **kw):
    bk = CountingBackend()
    fn(inp, fil, backend=bk, **kw)
    c = bk.counters
    return c.measured_ai, c.flops, c.bytes_total


def main():
    h_i = w_i = 58  # 56x56 output, the classic mid-network depthwise plane
    c = 32
    inp = Tensor3.new(h_i, w_i, c)
    fil = DwFilter.new(3, 3, c)
    h_o = w_o = h_i - 2

    rows = [
        ("baseline", measure(dwconv_baseline, inp, fil), ai_dw_baseline(4)),
        (
            "baseline + cached filter",
            measure(dwconv_baseline, inp, fil, cache_filter=True),
            ai_dw_baseline(4, cached_filter=True),
        ),
        (
            "high-reuse (2x2 blocks)",
            measure(dwconv_hp, inp, fil),
            ai_dw_hp(3, 3, 2, 2, h_o, w_o),
        ),
    ]

    print(f"3x3 depthwise, {h_i}x{w_i}x{c} input -> {h_o}x{w_o}x{c} output\n")
    print(f"{'strategy':<26} {'flops':>10} {'bytes':>10} {'measured':>9} {'predicted':>9}")
    for name, (ai, flops, total), predicted in rows:
        print(f"{name:<26} {flops:>10} {total:>10} {ai:>9.5f} {predicted:>9.5f}")
        assert abs(ai - predicted) < 1e-12

    print()
    print("Same arithmetic every time — only the traffic changes:")
    base = rows[0][1][2]
    for name, (_, _, total), _ in rows:
        print(f"  {name:<26} {base / total:5.2f}x less traffic than baseline"
              if total != base else f"  {name:<26}  1.00x (reference point)")

    print()
    print("The high-reuse intensity climbs toward its infinite-plane limit:")
    limit = ai_dw_hp_simplified(3, 3)
    for n in (4, 8, 16, 56, 112, 1024):
        ai = ai_dw_hp(3, 3, 2, 2, n, n)
        bar = "#" * int(round(ai / limit * 40))
        print(f"  {n:>5}x{n:<5} {ai:.6f}  {bar}")
    print(f"  {'limit':>11} {limit:.6f}  (= 9/22 for a 3x3 filter)")

    print()
    print("Even so, 9/22 flops per byte is deeply memory-bound on real parts —")
    print("see demos/roofline.py for what that means in attainable GFLOP/s.")


if __name__ == "__main__":
    main()
