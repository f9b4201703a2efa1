"""All keyed randomness: seed derivation, index permutation, XOR keystream.

Stego files and key files are exchanged between machines, so every keyed
decision comes from one small, fully specified generator rather than a
platform default. The definitions below are normative; test vectors live in
the test suite and README.

Generator (SplitMix64):
    state' = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state'
    z = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    output = z XOR (z >> 31)

Derived draws:
    next_below(n) = floor(next64() * n / 2**64)      (one output per draw, n < 2**32)
    byte stream   = each next64() emitted as 8 bytes, little-endian

Seed mixing:
    mix64(z)      = SplitMix64 output for state z (one step)
    derive_seed(key, purpose, index)
                  = mix64(mix64(key.seed XOR fnv1a64(purpose)) XOR index)
    where fnv1a64 is the 64-bit FNV-1a hash of the purpose string's UTF-8 bytes.

The XOR keystream is obfuscation keyed by the master seed, not cryptography;
anyone who knows the seed recovers the message by design.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return h


class SplitMix64:
    """The normative PRNG stream. Deterministic, portable, tiny state."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform draw in [0, n) for 1 <= n < 2**32; consumes exactly one output.

        Multiply-shift mapping: floor(u * n / 2**64). The residual bias is
        below 2**-32 per draw, far beneath anything observable here.
        """
        return (self.next64() * n) >> 64

    def next_bytes(self, count: int) -> bytes:
        out = bytearray()
        while len(out) < count:
            out += self.next64().to_bytes(8, "little")
        return bytes(out[:count])


def mix64(z: int) -> int:
    """One SplitMix64 step applied to state z; the seed-mixing primitive."""
    return SplitMix64(z).next64()


@dataclass(frozen=True)
class MasterKey:
    """The user's secret. Any integer is accepted and reduced mod 2**64."""

    seed: int

    def __post_init__(self):
        object.__setattr__(self, "seed", self.seed & MASK64)

    def hex(self) -> str:
        return f"{self.seed:016x}"


def derive_seed(key: MasterKey, purpose: str, index: int) -> int:
    """Deterministic 64-bit seed for one (purpose, index) slot under a key.

    Distinct purposes give independent streams; the pipeline uses "encrypt",
    "permute" and "ga" (the latter indexed by sample position).
    """
    h = mix64(key.seed ^ fnv1a64(purpose.encode("utf-8")))
    return mix64(h ^ (index & MASK64))


def permute_indices(n: int, key: MasterKey) -> list[int]:
    """Keyed Fisher-Yates permutation of range(n).

    Walk i = n-1 .. 1, swap position i with position next_below(i+1). The
    stream is seeded from derive_seed(key, "permute", 0).
    """
    out = list(range(n))
    if n < 2:
        return out
    # Draws are precomputed in bulk; the closed-form stream makes this
    # identical to stepping a SplitMix64 and calling next_below(i + 1).
    draws = stream_outputs(derive_seed(key, "permute", 0), 1, n - 1)
    bounds = np.arange(n, 1, -1, dtype=np.uint64)
    js = _mulhi_small(draws, bounds).tolist()
    for i, j in zip(range(n - 1, 0, -1), js):
        out[i], out[j] = out[j], out[i]
    return out


def xor_keystream(data: bytes, key: MasterKey) -> bytes:
    """XOR data with the keyed byte stream; applying it twice is a no-op."""
    rng = SplitMix64(derive_seed(key, "encrypt", 0))
    ks = rng.next_bytes(len(data))
    return bytes(a ^ b for a, b in zip(data, ks))


# --- vectorized stream access -------------------------------------------------
#
# SplitMix64's state advances by adding GAMMA, so output t of a stream seeded
# with s is scramble(s + t*GAMMA) with t counted from 1. That closed form lets
# batch code read any window of any stream without stepping through it.


def _scramble(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def stream_outputs(seed: int | np.ndarray, first: int, count: int) -> np.ndarray:
    """Outputs number first..first+count-1 (1-based) of one or many streams.

    `seed` may be a scalar or a uint64 array of shape (S,); the result is
    (count,) or (S, count) respectively.
    """
    ts = np.arange(first, first + count, dtype=np.uint64) * np.uint64(GAMMA)
    seeds = np.asarray(seed, dtype=np.uint64)
    if seeds.ndim == 0:
        return _scramble(seeds + ts)
    return _scramble(seeds[:, None] + ts[None, :])


def _mulhi_small(u: np.ndarray, n: np.ndarray | int) -> np.ndarray:
    """floor(u * n / 2**64) for uint64 u and n < 2**32, without 128-bit ints."""
    n = np.asarray(n, dtype=np.uint64)
    lo = (u & np.uint64(0xFFFFFFFF)) * n
    hi = (u >> np.uint64(32)) * n
    return (hi + (lo >> np.uint64(32))) >> np.uint64(32)
