"""Virtual 4-lane SIMD backend with register<->cache traffic accounting.

Every kernel in this package is written against this small instruction set:

    load / store          one 4-lane vector transfer       = 16 bytes
    load_broadcast        scalar load + duplicate to lanes =  4 bytes
    load_scalar / store_scalar                             =  4 bytes
    fma(a, b, acc)        4-lane multiply-add              =  8 flops
    fma_scalar                                             =  2 flops

Two interchangeable implementations exist: SimdBackend executes the
arithmetic, CountingBackend executes the identical arithmetic *and* tallies
traffic, so a kernel's arithmetic intensity can be measured by running it
unchanged on the counting backend.  Both produce bit-identical numerics.

Execution model: a "register" is a float32 ndarray of shape batch + (4,)
(batch + (1,) for broadcasts, plain batch for scalars).  Memory operands are
flat float32 arrays addressed by an integer offset array of shape `batch`.
One backend call executes the same instruction in lockstep across a batch of
independent output blocks, so a kernel's loop nest only iterates the
*within-block* indices and numpy carries the block axes.  Each call counts as
offsets.size concrete instructions, which keeps traffic totals exactly equal
to a strictly sequential per-block execution.  Callers that want an
instruction charged once per block instance must broadcast the offsets to the
full batch shape first (e.g. a filter row that is re-loaded by every output
block).

Traffic accounting is intentionally data-independent: counts depend only on
the instruction stream, never on the values moved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VEC_LANES = 4
VEC_BYTES = 16
SCALAR_BYTES = 4
FLOPS_PER_FMA = 8         # 4 multiplies + 4 adds
FLOPS_PER_SCALAR_FMA = 2
NUM_VEC_REGISTERS = 32    # architectural budget kernels must block within

_LANE = np.arange(VEC_LANES)


@dataclass
class TrafficCounters:
    """Monotonic tallies of flops and register<->cache bytes."""

    flops: int = 0
    bytes_loaded: int = 0
    bytes_stored: int = 0

    @property
    def bytes_total(self) -> int:
        return self.bytes_loaded + self.bytes_stored

    @property
    def measured_ai(self) -> float:
        """Arithmetic intensity, flops per byte moved. Undefined with no traffic."""
        if self.bytes_total == 0:
            raise ValueError("measured_ai undefined: no bytes transferred")
        return self.flops / self.bytes_total

    def add(self, other: "TrafficCounters") -> None:
        self.flops += other.flops
        self.bytes_loaded += other.bytes_loaded
        self.bytes_stored += other.bytes_stored


class SimdBackend:
    """Native backend: performs the arithmetic, counts nothing."""

    counting = False

    # -- worker plumbing ----------------------------------------------------
    # Kernels fork one backend per worker and merge after the join; the
    # native backend is stateless so everyone can share this instance.

    def fork(self) -> "SimdBackend":
        return self

    def merge(self, parts) -> None:
        pass

    # -- vector ops ----------------------------------------------------------

    def load(self, mem: np.ndarray, offs) -> np.ndarray:
        offs = np.asarray(offs)
        return mem[offs[..., None] + _LANE]

    def store(self, mem: np.ndarray, offs, reg: np.ndarray) -> None:
        offs = np.asarray(offs)
        mem[offs[..., None] + _LANE] = reg

    def load_broadcast(self, mem: np.ndarray, offs) -> np.ndarray:
        # one scalar pulled from cache, duplicated across lanes; shape
        # batch + (1,) broadcasts against full vectors in fma()
        offs = np.asarray(offs)
        return mem[offs][..., None]

    def fma(self, a: np.ndarray, b: np.ndarray, acc: np.ndarray) -> np.ndarray:
        return a * b + acc

    # -- scalar ops (tail handling) -------------------------------------------

    def load_scalar(self, mem: np.ndarray, offs) -> np.ndarray:
        return mem[np.asarray(offs)]

    def store_scalar(self, mem: np.ndarray, offs, reg) -> None:
        mem[np.asarray(offs)] = reg

    def fma_scalar(self, a, b, acc):
        return a * b + acc


class CountingBackend(SimdBackend):
    """Same arithmetic as SimdBackend plus per-instruction traffic tallies.

    Per-array tallies are kept so tests can split traffic by operand (input
    vs filter vs output).  With track_touched=True the backend also records
    the distinct element offsets loaded from each array, which is how
    per-worker filter footprints are measured.
    """

    counting = True

    def __init__(self, track_touched: bool = False):
        self.counters = TrafficCounters()
        self.track_touched = track_touched
        self._by_array: dict[int, list[int]] = {}   # id(mem) -> [loaded, stored]
        self._touched: dict[int, set[int]] = {}     # id(mem) -> element offsets loaded
        self.parts: list[CountingBackend] = []      # per-worker backends of last run

    # -- worker plumbing ----------------------------------------------------

    def fork(self) -> "CountingBackend":
        return CountingBackend(track_touched=self.track_touched)

    def merge(self, parts) -> None:
        self.parts = list(parts)
        for p in self.parts:
            self.counters.add(p.counters)
            for key, (ld, st) in p._by_array.items():
                mine = self._by_array.setdefault(key, [0, 0])
                mine[0] += ld
                mine[1] += st
            for key, offs in p._touched.items():
                self._touched.setdefault(key, set()).update(offs)

    # -- per-array queries ----------------------------------------------------

    def loaded_from(self, mem: np.ndarray) -> int:
        return self._by_array.get(id(mem), [0, 0])[0]

    def stored_to(self, mem: np.ndarray) -> int:
        return self._by_array.get(id(mem), [0, 0])[1]

    def touched_count(self, mem: np.ndarray) -> int:
        """Distinct elements loaded from mem (requires track_touched)."""
        if not self.track_touched:
            raise ValueError("touched_count requires track_touched=True")
        return len(self._touched.get(id(mem), ()))

    # -- counting helpers ----------------------------------------------------

    def _count_load(self, mem, offs, per_bytes, lanes):
        n = offs.size
        self.counters.bytes_loaded += per_bytes * n
        slot = self._by_array.setdefault(id(mem), [0, 0])
        slot[0] += per_bytes * n
        if self.track_touched:
            touched = self._touched.setdefault(id(mem), set())
            if lanes > 1:
                touched.update((offs.ravel()[:, None] + np.arange(lanes)).ravel().tolist())
            else:
                touched.update(np.asarray(offs).ravel().tolist())

    def _count_store(self, mem, offs, per_bytes):
        n = offs.size
        self.counters.bytes_stored += per_bytes * n
        self._by_array.setdefault(id(mem), [0, 0])[1] += per_bytes * n

    # -- counted ops ----------------------------------------------------------

    def load(self, mem, offs):
        offs = np.asarray(offs)
        self._count_load(mem, offs, VEC_BYTES, VEC_LANES)
        return super().load(mem, offs)

    def store(self, mem, offs, reg):
        offs = np.asarray(offs)
        self._count_store(mem, offs, VEC_BYTES)
        super().store(mem, offs, reg)

    def load_broadcast(self, mem, offs):
        offs = np.asarray(offs)
        self._count_load(mem, offs, SCALAR_BYTES, 1)
        return super().load_broadcast(mem, offs)

    def fma(self, a, b, acc):
        out = super().fma(a, b, acc)
        self.counters.flops += FLOPS_PER_FMA * (out.size // VEC_LANES)
        return out

    def load_scalar(self, mem, offs):
        offs = np.asarray(offs)
        self._count_load(mem, offs, SCALAR_BYTES, 1)
        return super().load_scalar(mem, offs)

    def store_scalar(self, mem, offs, reg):
        offs = np.asarray(offs)
        self._count_store(mem, offs, SCALAR_BYTES)
        super().store_scalar(mem, offs, reg)

    def fma_scalar(self, a, b, acc):
        out = super().fma_scalar(a, b, acc)
        self.counters.flops += FLOPS_PER_SCALAR_FMA * np.asarray(out).size
        return out
