"""Bit-layer arithmetic on single samples.

Conventions used everywhere in this package:

* A sample's *raw* form is its unsigned bit pattern (for 16-bit audio, the
  two's-complement pattern). Bit-layer operations act on raw samples.
* Its *value* is the interpreted number: unsigned for 8-bit, signed for
  16-bit. Distances are measured on values, so an adjustment that crosses
  the sign boundary is scored by audible amplitude error.
* Layer j addresses the bit with place value 2**(j-1); layer 1 is the LSB.
* Bit patterns are ordered lowest target layer first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class LayerMask:
    """The set of bit layers that carry payload within one sample."""

    layers: tuple[int, ...]
    bit_depth: int

    def __post_init__(self):
        if self.bit_depth not in (8, 16):
            raise ValueError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        layers = tuple(sorted(self.layers))
        if not layers:
            raise ValueError("layer mask must not be empty")
        if len(set(layers)) != len(layers):
            raise ValueError(f"duplicate layers in {layers}")
        if layers[0] < 1 or layers[-1] > self.bit_depth:
            raise ValueError(f"layers {layers} out of range 1..{self.bit_depth}")
        object.__setattr__(self, "layers", layers)

    @property
    def k(self) -> int:
        """Payload bits carried per sample."""
        return len(self.layers)

    @property
    def bits(self) -> int:
        """The mask as an integer (1 at every target position)."""
        m = 0
        for layer in self.layers:
            m |= 1 << (layer - 1)
        return m

    def pack(self, pattern: Sequence[int]) -> int:
        """Place a lowest-layer-first bit pattern at the mask positions."""
        if len(pattern) != self.k:
            raise ValueError(f"pattern length {len(pattern)} != mask size {self.k}")
        v = 0
        for layer, bit in zip(self.layers, pattern):
            if bit not in (0, 1):
                raise ValueError(f"pattern bits must be 0 or 1, got {bit!r}")
            v |= bit << (layer - 1)
        return v

    def unpack(self, raw: int) -> tuple[int, ...]:
        """Read the mask positions of a raw sample, lowest layer first."""
        return tuple((raw >> (layer - 1)) & 1 for layer in self.layers)


def sample_value(raw: int, bit_depth: int) -> int:
    """Interpret a raw sample: unsigned for 8-bit, two's complement for 16-bit."""
    if bit_depth == 16 and raw >= 1 << 15:
        return raw - (1 << 16)
    return raw


def sample_raw(value: int, bit_depth: int) -> int:
    """Inverse of sample_value."""
    return value & ((1 << bit_depth) - 1)


def distance(a_raw: int, b_raw: int, bit_depth: int) -> int:
    """|value(a) - value(b)|, the per-sample distortion measure."""
    return abs(sample_value(a_raw, bit_depth) - sample_value(b_raw, bit_depth))


def read_bits(sample: int, mask: LayerMask) -> tuple[int, ...]:
    """Extract the payload bits a raw sample carries at the mask."""
    return mask.unpack(sample)


def alter(sample: int, mask: LayerMask, pattern: Sequence[int]) -> int:
    """Substitute the pattern into the target layers; all other bits unchanged."""
    return (sample & ~mask.bits) | mask.pack(pattern)


# --- nearest-valid-value adjustment -------------------------------------------
#
# Both the adjuster and the oracle reason in a "biased" domain where unsigned
# order equals value order: 16-bit raw samples are XORed with 0x8000, 8-bit
# samples are already ordered. Fixing the target bits leaves the free bits,
# and the candidate value is strictly increasing in the free-bit field, so
# the nearest candidates are the floor and ceiling of that monotone map.


def _bias_bit(bit_depth: int) -> int:
    return 1 << 15 if bit_depth == 16 else 0


def _free_positions(mask_bits: int, bit_depth: int) -> list[int]:
    return [p for p in range(bit_depth) if not (mask_bits >> p) & 1]


def _scatter(field: int, positions: list[int]) -> int:
    v = 0
    for i, p in enumerate(positions):
        v |= ((field >> i) & 1) << p
    return v


def _gather(raw: int, positions: list[int]) -> int:
    f = 0
    for i, p in enumerate(positions):
        f |= ((raw >> p) & 1) << i
    return f


def adjust_nearest(sample: int, mask: LayerMask, pattern: Sequence[int]) -> int:
    """Nearest raw value that carries `pattern` at `mask`.

    Minimizes |value(result) - value(sample)|; ties go to the smaller value.
    Contract-equivalent to oracle_nearest, which defines optimality by
    exhaustive enumeration.
    """
    return adjust_nearest_packed(sample, mask, mask.pack(pattern))


def adjust_nearest_packed(sample: int, mask: LayerMask, pattern_bits: int) -> int:
    """adjust_nearest with the pattern already packed at the mask positions."""
    bd = mask.bit_depth
    bias = _bias_bit(bd)
    mask_bits = mask.bits
    sb = sample ^ bias
    pb = pattern_bits ^ (mask_bits & bias)

    free = _free_positions(mask_bits, bd)
    if not free:
        return pattern_bits

    def candidate(field: int) -> int:
        return _scatter(field, free) | pb

    # Binary search the largest free field whose candidate is <= the sample.
    f_max = (1 << len(free)) - 1
    lo_f = None
    if candidate(0) <= sb:
        lo, hi = 0, f_max
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if candidate(mid) <= sb:
                lo = mid
            else:
                hi = mid - 1
        lo_f = lo

    if lo_f is None:
        best = candidate(0)
    elif lo_f == f_max:
        best = candidate(f_max)
    else:
        below, above = candidate(lo_f), candidate(lo_f + 1)
        best = below if sb - below <= above - sb else above

    return best ^ bias


def oracle_nearest(sample: int, mask: LayerMask, pattern: Sequence[int]) -> int:
    """Ground-truth optimum by enumerating every raw value of the bit depth.

    Kept deliberately naive and independent of adjust_nearest; cheap at
    8-bit, usable at 16-bit in tests.
    """
    bd = mask.bit_depth
    mask_bits = mask.bits
    pattern_bits = mask.pack(pattern)
    s_val = sample_value(sample, bd)
    best = None
    best_key = None
    for v in range(1 << bd):
        if v & mask_bits != pattern_bits:
            continue
        val = sample_value(v, bd)
        key = (abs(val - s_val), val)
        if best_key is None or key < best_key:
            best, best_key = v, key
    assert best is not None
    return best


def oracle_nearest_bulk(
    samples: np.ndarray, mask: LayerMask, pattern_bits: np.ndarray
) -> np.ndarray:
    """Vectorized enumeration oracle: one optimum per (sample, pattern) row.

    Same filter-and-minimize brute force as oracle_nearest, evaluated with
    numpy so test sweeps over many 16-bit cases stay fast. `samples` and
    `pattern_bits` are raw int64 arrays of equal shape (n,).
    """
    bd = mask.bit_depth
    space = np.arange(1 << bd, dtype=np.int64)
    values = space.copy()
    if bd == 16:
        values[space >= 1 << 15] -= 1 << 16
    masked = space & mask.bits
    s_vals = np.asarray(samples, dtype=np.int64)
    if bd == 16:
        s_vals = np.where(s_vals >= 1 << 15, s_vals - (1 << 16), s_vals)

    out = np.empty(len(samples), dtype=np.int64)
    for i in range(len(samples)):
        ok = masked == pattern_bits[i]
        cand_vals = values[ok]
        dist = np.abs(cand_vals - s_vals[i])
        best = np.flatnonzero(dist == dist.min())
        # among distance ties, the smaller value wins
        pick = best[np.argmin(cand_vals[best])]
        out[i] = space[ok][pick]
    return out
