"""End-to-end embedding and extraction.

Embedding walks the cover's samples in a keyed pseudo-random order. Each
visited sample is altered to carry the next payload bits, re-shaped by the
configured engine to sit as close as possible to the original, then verified
against the distortion threshold: accepted samples enter the output, rejected
ones stay original and the same bits retry at the next position. Extraction
replays the same walk, skipping the recorded rejections.

The stego key file is the only thing an extractor needs besides the stego
audio. Its format is fixed: UTF-8 text, one "name = value" per line, the
twelve fields below in any order, nothing else.

    version = 1
    seed = 00000000000004d2        16 lowercase hex digits
    bit_depth = 16                 8 or 16
    layers = 1,5                   ascending, comma-separated
    mode = ga                      plain | nearest | ga
    threshold = inf                non-negative integer or "inf"
    ga_pop = 16
    ga_gens = 64
    ga_pc = 0.8
    ga_pm = 0.1
    payload_len = 42               bytes of message
    skipped = 17,130               rejected sample indices, may be empty

The XOR keystream behind "seed" is obfuscation, not cryptography; treat the
key file as the secret.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bitplane
from .bitplane import LayerMask
from .errors import (
    BitDepthMismatch,
    CapacityExhaustedBySkips,
    InsufficientCapacity,
    KeyMismatch,
    KeyParseError,
    LengthMismatch,
    SnrNotDefined,
)
from .ga_adjust import GaParams, run_ga_batch
from .keystream import MasterKey, derive_seed, permute_indices, xor_keystream
from .wav_io import AudioBuffer

MODES = ("plain", "nearest", "ga")
KEY_FORMAT_VERSION = 1


@dataclass(frozen=True)
class EmbedConfig:
    mask: LayerMask
    key: MasterKey
    mode: str = "ga"
    threshold: int | float = math.inf
    ga_params: GaParams = field(default_factory=GaParams)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        _check_threshold(self.threshold)


@dataclass(frozen=True)
class StegoKey:
    """Everything extraction needs; serializable via format_key_file."""

    key: MasterKey
    mask: LayerMask
    mode: str
    threshold: int | float
    ga_params: GaParams
    payload_len_bytes: int
    skipped_indices: tuple[int, ...]
    format_version: int = KEY_FORMAT_VERSION

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        _check_threshold(self.threshold)
        if self.payload_len_bytes < 0:
            raise ValueError("payload_len_bytes must be >= 0")
        skipped = tuple(self.skipped_indices)
        if any(b <= a for a, b in zip(skipped, skipped[1:])):
            raise ValueError("skipped_indices must be strictly increasing")
        object.__setattr__(self, "skipped_indices", skipped)


@dataclass
class EmbedReport:
    samples_used: int
    samples_skipped: int
    max_deviation: int
    snr_db: float
    capacity_bits: int

    def to_dict(self) -> dict:
        d = dict(
            samples_used=self.samples_used,
            samples_skipped=self.samples_skipped,
            max_deviation=self.max_deviation,
            snr_db=None if math.isinf(self.snr_db) else self.snr_db,
            capacity_bits=self.capacity_bits,
        )
        return d


def _check_threshold(threshold) -> None:
    if isinstance(threshold, float) and math.isinf(threshold) and threshold > 0:
        return
    if isinstance(threshold, int) and not isinstance(threshold, bool) and threshold >= 0:
        return
    raise ValueError(
        f"threshold must be a non-negative integer or infinity, got {threshold!r}"
    )


def capacity_bits(buffer: AudioBuffer, mask: LayerMask) -> int:
    """Payload bits the buffer can hold: samples times layers per sample."""
    if mask.bit_depth != buffer.bit_depth:
        raise BitDepthMismatch(
            f"mask is {mask.bit_depth}-bit but buffer is {buffer.bit_depth}-bit"
        )
    return len(buffer.samples) * mask.k


def verify_sample(original: int, modified: int, threshold: int | float) -> bool:
    """Accept iff the sample-value deviation is within the threshold."""
    return abs(original - modified) <= threshold


def snr_db(original: AudioBuffer, stego: AudioBuffer) -> float:
    """Signal-to-noise ratio of the embedding, in dB, on sample values.

    Identical buffers give math.inf. A silent original with nonzero noise has
    no meaningful ratio and raises SnrNotDefined.
    """
    if (
        len(original.samples) != len(stego.samples)
        or original.bit_depth != stego.bit_depth
        or original.channels != stego.channels
    ):
        raise LengthMismatch("buffers differ in length, bit depth, or channels")
    a = np.asarray(original.samples, dtype=np.int64)
    b = np.asarray(stego.samples, dtype=np.int64)
    noise = int(((a - b) ** 2).sum())
    if noise == 0:
        return math.inf
    signal = int((a**2).sum())
    if signal == 0:
        raise SnrNotDefined("original signal has zero energy but noise is present")
    return 10.0 * math.log10(signal / noise)


# --- embedding -----------------------------------------------------------------


def embed(
    cover: AudioBuffer, message: bytes, config: EmbedConfig
) -> tuple[AudioBuffer, StegoKey, EmbedReport]:
    """Hide message bytes in a copy of the cover; the cover is not modified.

    Returns the stego buffer, the key an extractor needs, and quality metrics.
    Raises InsufficientCapacity if the payload cannot fit at all, and
    CapacityExhaustedBySkips if threshold rejections use up the samples.
    """
    mask = config.mask
    if mask.bit_depth != cover.bit_depth:
        raise BitDepthMismatch(
            f"mask is {mask.bit_depth}-bit but cover is {cover.bit_depth}-bit"
        )
    n = len(cover.samples)
    ciphertext = xor_keystream(bytes(message), config.key)
    groups = _pattern_groups(ciphertext, mask)
    m = len(groups)
    if m > n:
        raise InsufficientCapacity(
            f"{len(message)} message bytes need {m} samples, cover has {n}"
        )

    values = np.asarray(cover.samples, dtype=np.int64)
    raw = values & ((1 << cover.bit_depth) - 1)
    stego_raw = raw.copy()
    perm = permute_indices(n, config.key)
    engine = _make_engine(config, raw)

    skipped: list[int] = []
    max_dev = 0
    pos = 0  # cursor into the permuted walk
    g = 0  # next unplaced payload group
    while g < m:
        if pos >= n:
            raise CapacityExhaustedBySkips(
                f"placed {g} of {m} groups before running out of samples "
                f"({len(skipped)} rejections)"
            )
        window = min(m - g, n - pos)
        idxs = np.asarray(perm[pos : pos + window])
        modified = engine(idxs, groups[g : g + window])
        devs = np.abs(
            _values_of(modified, cover.bit_depth) - values[idxs]
        )
        rejected = np.flatnonzero(devs > config.threshold)
        accept_upto = int(rejected[0]) if len(rejected) else window
        if accept_upto:
            take = idxs[:accept_upto]
            stego_raw[take] = modified[:accept_upto]
            max_dev = max(max_dev, int(devs[:accept_upto].max()))
        g += accept_upto
        if accept_upto < window:
            # the sample at the first rejection stays original; its bits
            # retry at the next position in the walk
            skipped.append(int(idxs[accept_upto]))
            pos += accept_upto + 1
        else:
            pos += window

    stego = AudioBuffer(
        _values_of(stego_raw, cover.bit_depth).tolist(),
        cover.bit_depth,
        cover.sample_rate,
        cover.channels,
    )
    key = StegoKey(
        key=config.key,
        mask=mask,
        mode=config.mode,
        threshold=config.threshold,
        ga_params=config.ga_params,
        payload_len_bytes=len(message),
        skipped_indices=tuple(sorted(skipped)),
    )
    report = EmbedReport(
        samples_used=m,
        samples_skipped=len(skipped),
        max_deviation=max_dev,
        snr_db=snr_db(cover, stego),
        capacity_bits=capacity_bits(cover, mask),
    )
    return stego, key, report


def extract(stego: AudioBuffer, key: StegoKey) -> bytes:
    """Recover the message bytes using the stego key; inverse of embed."""
    if key.mask.bit_depth != stego.bit_depth:
        raise BitDepthMismatch(
            f"key is {key.mask.bit_depth}-bit but stego is {stego.bit_depth}-bit"
        )
    if key.payload_len_bytes == 0:
        return b""
    n = len(stego.samples)
    k = key.mask.k
    m = -(-8 * key.payload_len_bytes // k)  # groups, padded like embed
    perm = permute_indices(n, key.key)
    skip = set(key.skipped_indices)
    used: list[int] = []
    for i in perm:
        if i not in skip:
            used.append(i)
            if len(used) == m:
                break
    if len(used) < m:
        raise KeyMismatch(
            f"key declares {key.payload_len_bytes} payload bytes but the "
            f"stego buffer yields only {len(used)} usable samples of {m}"
        )
    raw = (
        np.asarray(stego.samples, dtype=np.int64)[used]
        & ((1 << stego.bit_depth) - 1)
    )
    shifts = np.array([layer - 1 for layer in key.mask.layers], dtype=np.int64)
    bits = (raw[:, None] >> shifts[None, :]) & 1
    flat = bits.reshape(-1)[: 8 * key.payload_len_bytes]
    ciphertext = np.packbits(flat.astype(np.uint8)).tobytes()
    return xor_keystream(ciphertext, key.key)


def _pattern_groups(ciphertext: bytes, mask: LayerMask) -> np.ndarray:
    """Ciphertext as one packed bit pattern per sample, zero-padded at the end.

    Bytes are consumed most-significant-bit first; within one group the first
    bit goes to the lowest target layer.
    """
    if not ciphertext:
        return np.empty(0, dtype=np.int64)
    bits = np.unpackbits(np.frombuffer(ciphertext, dtype=np.uint8)).astype(np.int64)
    k = mask.k
    pad = (-len(bits)) % k
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.int64)])
    place = np.array([1 << (layer - 1) for layer in mask.layers], dtype=np.int64)
    return bits.reshape(-1, k) @ place


def _values_of(raw: np.ndarray, bit_depth: int) -> np.ndarray:
    if bit_depth == 16:
        return np.where(raw >= 1 << 15, raw - (1 << 16), raw)
    return raw


def _make_engine(config: EmbedConfig, raw: np.ndarray):
    """Returns f(indices, pattern_bits) -> modified raw samples."""
    mask = config.mask
    mask_bits = mask.bits

    if config.mode == "plain":

        def engine(idxs, pats):
            return (raw[idxs] & ~mask_bits) | pats

    elif config.mode == "nearest":

        def engine(idxs, pats):
            return np.array(
                [
                    bitplane.adjust_nearest_packed(int(s), mask, int(p))
                    for s, p in zip(raw[idxs], pats)
                ],
                dtype=np.int64,
            )

    else:  # ga

        def engine(idxs, pats):
            seeds = np.array(
                [derive_seed(config.key, "ga", int(i)) for i in idxs],
                dtype=np.uint64,
            )
            return run_ga_batch(raw[idxs], pats, mask, config.ga_params, seeds)

    return engine


# --- key file serialization ------------------------------------------------------

_KEY_FIELDS = (
    "version",
    "seed",
    "bit_depth",
    "layers",
    "mode",
    "threshold",
    "ga_pop",
    "ga_gens",
    "ga_pc",
    "ga_pm",
    "payload_len",
    "skipped",
)


def format_key_file(key: StegoKey) -> str:
    """Render a StegoKey in the documented key file format."""
    threshold = "inf" if math.isinf(key.threshold) else str(key.threshold)
    lines = [
        f"version = {key.format_version}",
        f"seed = {key.key.hex()}",
        f"bit_depth = {key.mask.bit_depth}",
        f"layers = {','.join(str(l) for l in key.mask.layers)}",
        f"mode = {key.mode}",
        f"threshold = {threshold}",
        f"ga_pop = {key.ga_params.population_size}",
        f"ga_gens = {key.ga_params.generations}",
        f"ga_pc = {key.ga_params.crossover_prob!r}",
        f"ga_pm = {key.ga_params.mutation_prob!r}",
        f"payload_len = {key.payload_len_bytes}",
        f"skipped = {','.join(str(i) for i in key.skipped_indices)}",
    ]
    return "\n".join(lines) + "\n"


def parse_key_file(text: str) -> StegoKey:
    """Parse the documented key file format; strict about fields and values."""
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise KeyParseError(f"line {lineno}: expected 'name = value'")
        name = name.strip()
        if name not in _KEY_FIELDS:
            raise KeyParseError(f"line {lineno}: unknown field {name!r}")
        if name in fields:
            raise KeyParseError(f"line {lineno}: duplicate field {name!r}")
        fields[name] = value.strip()
    missing = [f for f in _KEY_FIELDS if f not in fields]
    if missing:
        raise KeyParseError(f"missing fields: {', '.join(missing)}")

    def intval(name, minval=None):
        try:
            v = int(fields[name])
        except ValueError:
            raise KeyParseError(f"field {name}: {fields[name]!r} is not an integer")
        if minval is not None and v < minval:
            raise KeyParseError(f"field {name}: {v} below minimum {minval}")
        return v

    def floatval(name):
        try:
            v = float(fields[name])
        except ValueError:
            raise KeyParseError(f"field {name}: {fields[name]!r} is not a number")
        if not 0.0 <= v <= 1.0:
            raise KeyParseError(f"field {name}: {v} outside [0, 1]")
        return v

    if intval("version") != KEY_FORMAT_VERSION:
        raise KeyParseError(
            f"unsupported key format version {fields['version']}"
        )
    seed_text = fields["seed"]
    if len(seed_text) != 16 or any(c not in "0123456789abcdef" for c in seed_text):
        raise KeyParseError("field seed: expected 16 lowercase hex digits")
    bit_depth = intval("bit_depth")
    try:
        layer_list = tuple(int(x) for x in fields["layers"].split(","))
        mask = LayerMask(layer_list, bit_depth)
        if layer_list != mask.layers:
            raise KeyParseError("field layers: must be ascending")
    except KeyParseError:
        raise
    except ValueError as exc:
        raise KeyParseError(f"field layers/bit_depth: {exc}")
    mode = fields["mode"]
    if mode not in MODES:
        raise KeyParseError(f"field mode: {mode!r} not one of {MODES}")
    if fields["threshold"] == "inf":
        threshold: int | float = math.inf
    else:
        threshold = intval("threshold", minval=0)
    try:
        ga = GaParams(
            population_size=intval("ga_pop"),
            generations=intval("ga_gens"),
            crossover_prob=floatval("ga_pc"),
            mutation_prob=floatval("ga_pm"),
        )
    except ValueError as exc:
        raise KeyParseError(f"ga parameters: {exc}")
    payload_len = intval("payload_len", minval=0)
    if fields["skipped"]:
        try:
            skipped = tuple(int(x) for x in fields["skipped"].split(","))
        except ValueError:
            raise KeyParseError("field skipped: expected comma-separated integers")
    else:
        skipped = ()
    try:
        return StegoKey(
            key=MasterKey(int(seed_text, 16)),
            mask=mask,
            mode=mode,
            threshold=threshold,
            ga_params=ga,
            payload_len_bytes=payload_len,
            skipped_indices=skipped,
        )
    except ValueError as exc:
        raise KeyParseError(str(exc))
