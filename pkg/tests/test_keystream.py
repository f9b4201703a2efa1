"""Keyed randomness: golden vectors, statistical behavior, batch equivalence."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gastego.keystream import (
    GAMMA,
    MASK64,
    MasterKey,
    SplitMix64,
    _mulhi_small,
    derive_seed,
    fnv1a64,
    mix64,
    permute_indices,
    stream_outputs,
    xor_keystream,
)


def reference_splitmix64(seed):
    """Independent transliteration of the reference C code; yields outputs."""
    state = seed & MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield z ^ (z >> 31)


class TestSplitMix64:
    def test_published_vectors_seed_zero(self):
        rng = SplitMix64(0)
        assert rng.next64() == 0xE220A8397B1DCDAF
        assert rng.next64() == 0x6E789E6AA1B965F4
        assert rng.next64() == 0x06C45D188009454F

    def test_published_vectors_seed_1234567(self):
        rng = SplitMix64(1234567)
        assert rng.next64() == 6457827717110365317
        assert rng.next64() == 3203168211198807973

    def test_matches_reference_transliteration(self):
        rnd = random.Random(1)
        for _ in range(50):
            seed = rnd.getrandbits(64)
            rng = SplitMix64(seed)
            ref = reference_splitmix64(seed)
            assert [rng.next64() for _ in range(20)] == [next(ref) for _ in range(20)]

    def test_next_below_range_and_value(self):
        rng = SplitMix64(99)
        for n in (1, 2, 7, 255, 65536, 2**32 - 1):
            probe = SplitMix64(rng.state)
            expected = (probe.next64() * n) >> 64
            got = SplitMix64(rng.state).next_below(n)
            assert got == expected
            assert 0 <= got < n
            rng.next64()

    def test_next_bytes_little_endian(self):
        rng = SplitMix64(0)
        first = SplitMix64(0).next64()
        assert rng.next_bytes(8) == first.to_bytes(8, "little")
        assert SplitMix64(0).next_bytes(3) == first.to_bytes(8, "little")[:3]

    def test_stream_outputs_closed_form(self):
        rng = SplitMix64(424242)
        seq = [rng.next64() for _ in range(40)]
        assert stream_outputs(424242, 1, 40).tolist() == seq
        assert stream_outputs(424242, 11, 5).tolist() == seq[10:15]

    def test_stream_outputs_many_seeds(self):
        seeds = np.array([0, 1, 2**63, MASK64], dtype=np.uint64)
        block = stream_outputs(seeds, 3, 4)
        for row, seed in enumerate(seeds):
            rng = SplitMix64(int(seed))
            rng.next64(), rng.next64()
            assert block[row].tolist() == [rng.next64() for _ in range(4)]


@given(st.integers(0, MASK64), st.integers(1, 2**32 - 1))
@settings(max_examples=300)
def test_mulhi_small_matches_bigint(u, n):
    got = _mulhi_small(np.array([u], dtype=np.uint64), n)
    assert int(got[0]) == (u * n) >> 64


class TestFnv1a64:
    def test_published_vectors(self):
        assert fnv1a64(b"") == 0xCBF29CE484222325
        assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
        assert fnv1a64(b"foobar") == 0x85944171F73967E8


class TestDeriveSeed:
    def test_golden_values(self):
        assert derive_seed(MasterKey(0), "permute", 0) == 0x0E5C79FAC43999B3
        assert derive_seed(MasterKey(0), "encrypt", 0) == 0x0CB33AE04ABEFB69
        assert derive_seed(MasterKey(0), "ga", 7) == 0x6045D46EB7AB6E34
        assert derive_seed(MasterKey(123456789), "ga", 1) == 0x4BB37486F0FA95E8

    def test_deterministic(self):
        k = MasterKey(987654321)
        assert derive_seed(k, "ga", 5) == derive_seed(k, "ga", 5)

    def test_purpose_separation_no_collisions(self):
        rnd = random.Random(7)
        for _ in range(10_000):
            k = MasterKey(rnd.getrandbits(64))
            assert derive_seed(k, "permute", 0) != derive_seed(k, "encrypt", 0)

    def test_bit_avalanche(self):
        rnd = random.Random(3)
        flips = 0
        trials = 2000
        for _ in range(trials):
            seed = rnd.getrandbits(64)
            bit = 1 << rnd.randrange(64)
            a = derive_seed(MasterKey(seed), "ga", 1)
            b = derive_seed(MasterKey(seed ^ bit), "ga", 1)
            flips += bin(a ^ b).count("1")
        mean = flips / trials
        assert 24 <= mean <= 40

    def test_masterkey_reduces_mod_2_64(self):
        assert MasterKey(-1).seed == MASK64
        assert MasterKey(2**64 + 5).seed == 5
        assert MasterKey(0).hex() == "0" * 16


class TestPermuteIndices:
    def test_empty_and_single(self):
        assert permute_indices(0, MasterKey(1)) == []
        assert permute_indices(1, MasterKey(1)) == [0]

    def test_golden(self):
        assert permute_indices(8, MasterKey(42)) == [0, 6, 4, 1, 2, 3, 7, 5]
        assert permute_indices(16, MasterKey(0)) == [
            1, 5, 3, 14, 9, 12, 13, 4, 7, 11, 15, 8, 0, 10, 2, 6,
        ]

    @given(st.integers(0, 400), st.integers(0, MASK64))
    @settings(max_examples=100)
    def test_bijection(self, n, seed):
        assert sorted(permute_indices(n, MasterKey(seed))) == list(range(n))

    def test_matches_stepwise_fisher_yates(self):
        rnd = random.Random(8)
        for _ in range(30):
            n = rnd.randrange(0, 300)
            key = MasterKey(rnd.getrandbits(64))
            out = list(range(n))
            rng = SplitMix64(derive_seed(key, "permute", 0))
            for i in range(n - 1, 0, -1):
                j = rng.next_below(i + 1)
                out[i], out[j] = out[j], out[i]
            assert permute_indices(n, key) == out

    def test_same_key_same_permutation(self):
        assert permute_indices(1000, MasterKey(5)) == permute_indices(1000, MasterKey(5))

    def test_distinct_keys_disagree_widely(self):
        rnd = random.Random(9)
        for _ in range(5):
            a_key, b_key = rnd.getrandbits(64), rnd.getrandbits(64)
            if a_key == b_key:
                continue
            a = permute_indices(1024, MasterKey(a_key))
            b = permute_indices(1024, MasterKey(b_key))
            assert sum(x != y for x, y in zip(a, b)) >= 1000


class TestXorKeystream:
    def test_golden(self):
        assert xor_keystream(bytes(16), MasterKey(0)).hex() == (
            "3a77b4204c85053fa9ee06ce11ce183f"
        )
        assert xor_keystream(bytes(16), MasterKey(2**64 - 1)).hex() == (
            "21f2080839fcfd1f2f96ba860c7eea6a"
        )

    @given(st.binary(max_size=512), st.integers(0, MASK64))
    @settings(max_examples=150)
    def test_involution_and_length(self, data, seed):
        key = MasterKey(seed)
        out = xor_keystream(data, key)
        assert len(out) == len(data)
        assert xor_keystream(out, key) == data

    def test_empty(self):
        assert xor_keystream(b"", MasterKey(1)) == b""

    def test_keystream_byte_uniformity_chi_square(self):
        # 1 MB of zeros exposes the raw keystream; chi-square against a
        # uniform byte distribution, df=255, alpha=0.001 -> critical 330.52
        data = xor_keystream(bytes(1 << 20), MasterKey(20260810))
        counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
        expected = len(data) / 256
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < 330.52


def test_mix64_is_one_splitmix_step():
    for z in (0, 1, GAMMA, MASK64):
        assert mix64(z) == SplitMix64(z).next64()
