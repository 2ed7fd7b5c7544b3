"""Seeded Toeplitz-hashing randomness extractor over GF(2).

An m x n binary Toeplitz matrix T is built from a seed of n+m-1 bits with
the diagonal-constant convention

    T[i][j] = seed[i - j + (n - 1)],   i in [0, m), j in [0, n),

so the first row reads seed[n-1] down to seed[0] left to right.  Extraction
is the GF(2) matrix-vector product y = T x per n-bit input block.

The fast kernel packs the matrix columns into bytes and folds eight input
bits at a time through 256-entry XOR lookup tables, processing batches of
blocks at once.  A naive double-loop product is kept as the reference
oracle for testing.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bits import BitStream, slice_bits
from .errors import DomainError, InsufficientDataError

_BATCH_BLOCKS = 4096


@dataclass(frozen=True)
class ExtractorConfig:
    """Block geometry: n raw bits in, m extracted bits out."""

    m: int = 1024
    n: int = 1360

    def __post_init__(self) -> None:
        if not 0 < self.m <= self.n:
            raise DomainError(f"need 0 < m <= n, got m={self.m}, n={self.n}")

    @property
    def seed_bit_count(self) -> int:
        return self.n + self.m - 1

    @property
    def ratio(self) -> float:
        return self.m / self.n


# Identical-stream geometry used after post-selection.
IDENTICAL_CONFIG = ExtractorConfig(m=1024, n=1920)


@dataclass(frozen=True)
class ToeplitzSeed:
    """Exactly n+m-1 seed bits for a given extractor geometry."""

    bits: BitStream
    config: ExtractorConfig

    def __post_init__(self) -> None:
        if self.bits.bit_count != self.config.seed_bit_count:
            raise DomainError(
                f"seed holds {self.bits.bit_count} bits, config needs "
                f"{self.config.seed_bit_count}"
            )


def build_seed(source: BitStream | int, config: ExtractorConfig) -> ToeplitzSeed:
    """Take the first n+m-1 bits of ``source`` as the Toeplitz seed.

    ``source`` is either a pre-stored random BitStream (e.g. loaded from a
    TBBS seed file) or an integer, in which case a deterministic Philox
    stream keyed by that integer supplies the bits (intended for
    reproducible test runs, not for production seeding).
    """
    need = config.seed_bit_count
    if isinstance(source, BitStream):
        if source.bit_count < need:
            raise InsufficientDataError(
                f"seed source has {source.bit_count} bits, need {need}"
            )
        return ToeplitzSeed(slice_bits(source, 0, need), config)
    rng = np.random.Generator(np.random.Philox(key=int(source)))
    raw = np.frombuffer(rng.bytes((need + 7) // 8), dtype=np.uint8)
    return ToeplitzSeed(BitStream.from_bits(np.unpackbits(raw)[:need]), config)


class _ToeplitzKernel:
    """Byte-table GF(2) kernel for one (seed, config) pair.

    Column j of T is the m-bit window seed[n-1-j : n-1-j+m].  Packed column
    bytes are folded into per-byte-position lookup tables so each input
    byte costs one table gather and one XOR over the packed output row.
    """

    def __init__(self, seed: ToeplitzSeed):
        m, n = seed.config.m, seed.config.n
        self.m, self.n = m, n
        self.out_bytes = (m + 7) // 8
        self.in_bytes = (n + 7) // 8
        seed_bits = seed.bits.bits()
        # windows[k] = seed[k : k+m]; column j = windows[n-1-j]
        windows = np.lib.stride_tricks.sliding_window_view(seed_bits, m)
        col_bytes = np.packbits(windows[::-1], axis=1)  # (n, out_bytes)
        tables = np.zeros((self.in_bytes, 256, self.out_bytes), dtype=np.uint8)
        values = np.arange(256, dtype=np.uint16)
        for pos in range(self.in_bytes):
            for q in range(8):
                j = 8 * pos + q
                if j >= n:
                    break
                hit = (values >> (7 - q)) & 1 == 1
                tables[pos, hit] ^= col_bytes[j]
        self._tables_u8 = tables
        if self.out_bytes % 8 == 0:
            # XOR in 64-bit words; byte order inside a word is irrelevant.
            self._tables = tables.view(np.uint64).reshape(
                self.in_bytes, 256, self.out_bytes // 8
            )
        else:
            self._tables = tables

    def extract_packed(self, block_bytes: np.ndarray) -> np.ndarray:
        """(nblocks, in_bytes) uint8 -> (nblocks, out_bytes) uint8."""
        nblocks = block_bytes.shape[0]
        tables = self._tables
        acc = tables[0][block_bytes[:, 0]].copy()
        scratch = np.empty_like(acc)
        for pos in range(1, self.in_bytes):
            np.take(tables[pos], block_bytes[:, pos], axis=0, out=scratch)
            np.bitwise_xor(acc, scratch, out=acc)
        if acc.dtype != np.uint8:
            acc = acc.view(np.uint8).reshape(nblocks, self.out_bytes)
        return acc


def _block_matrix(raw: BitStream, n: int, nblocks: int) -> np.ndarray:
    """Repack the first nblocks*n bits into an (nblocks, ceil(n/8)) byte matrix."""
    if n % 8 == 0:
        nbytes = n // 8
        buf = np.frombuffer(raw.payload, dtype=np.uint8, count=nblocks * nbytes)
        return buf.reshape(nblocks, nbytes)
    bits = raw.bits()[: nblocks * n].reshape(nblocks, n)
    return np.packbits(bits, axis=1)


def extract_block(raw: BitStream, seed: ToeplitzSeed) -> BitStream:
    """GF(2) product of the seeded Toeplitz matrix with one n-bit block."""
    cfg = seed.config
    if raw.bit_count != cfg.n:
        raise DomainError(f"block holds {raw.bit_count} bits, config n={cfg.n}")
    kernel = _ToeplitzKernel(seed)
    out = kernel.extract_packed(_block_matrix(raw, cfg.n, 1))[0]
    return BitStream.from_bits(np.unpackbits(out)[: cfg.m])


def extract_stream(
    raw: BitStream,
    config: ExtractorConfig,
    seed: ToeplitzSeed,
    batch_blocks: int = _BATCH_BLOCKS,
) -> BitStream:
    """Extract every full n-bit block of ``raw``; a trailing partial block
    is discarded (zero-padding it would bias the final output block).

    Output length is floor(raw.bit_count / n) * m bits.  Blocks are
    processed in batches; the result is bit-identical to per-block
    extraction in sequence order.
    """
    if seed.config != config:
        raise DomainError("seed was built for a different extractor config")
    nblocks = raw.bit_count // config.n
    if nblocks == 0:
        return BitStream.empty()
    kernel = _ToeplitzKernel(seed)
    mat = _block_matrix(raw, config.n, nblocks)
    chunks = []
    for lo in range(0, nblocks, batch_blocks):
        chunks.append(kernel.extract_packed(mat[lo : lo + batch_blocks]))
    packed = np.concatenate(chunks, axis=0)
    if config.m % 8 == 0:
        return BitStream(nblocks * config.m, packed.tobytes())
    bits = np.unpackbits(packed, axis=1)[:, : config.m]
    return BitStream.from_bits(bits.reshape(-1))


def extract_block_naive(raw_bits, seed_bits, m: int, n: int) -> list[int]:
    """Reference double-loop GF(2) Toeplitz product (oracle for tests)."""
    raw_bits = list(raw_bits)
    seed_bits = list(seed_bits)
    if len(raw_bits) != n:
        raise DomainError(f"expected {n} input bits, got {len(raw_bits)}")
    if len(seed_bits) != n + m - 1:
        raise DomainError(f"expected {n + m - 1} seed bits, got {len(seed_bits)}")
    out = []
    for i in range(m):
        acc = 0
        for j in range(n):
            acc ^= seed_bits[i - j + n - 1] & raw_bits[j]
        out.append(acc)
    return out


def throughput_bench(
    config: ExtractorConfig,
    payload_bits: int,
    rng_seed: int = 0,
    batch_blocks: int = _BATCH_BLOCKS,
) -> dict:
    """Wall-clock throughput of the extractor on uniform random input.

    Returns output bits/second plus block count and per-block latency
    percentiles (batch time divided by blocks in the batch, sampled over
    batches).
    """
    nblocks = payload_bits // config.n
    if nblocks < 1:
        raise InsufficientDataError("payload must cover at least one block")
    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    mat_bits = nblocks * config.n
    payload = bytearray(rng.bytes((mat_bits + 7) // 8))
    if mat_bits % 8:
        payload[-1] &= 0xFF << (8 - mat_bits % 8)  # container wants zero pad bits
    raw = BitStream(mat_bits, bytes(payload))
    kernel = _ToeplitzKernel(build_seed(rng_seed, config))
    mat = _block_matrix(raw, config.n, nblocks)
    per_block: list[float] = []
    out_bits = 0
    t0 = time.perf_counter()
    for lo in range(0, nblocks, batch_blocks):
        batch = mat[lo : lo + batch_blocks]
        tb = time.perf_counter()
        kernel.extract_packed(batch)
        per_block.append((time.perf_counter() - tb) / batch.shape[0])
        out_bits += batch.shape[0] * config.m
    elapsed = time.perf_counter() - t0
    lat = np.array(per_block)
    return {
        "config": {"m": config.m, "n": config.n},
        "input_bits": nblocks * config.n,
        "output_bits": out_bits,
        "blocks": nblocks,
        "elapsed_s": elapsed,
        "throughput_bps": out_bits / elapsed,
        "block_latency_s": {
            "p50": float(np.percentile(lat, 50)),
            "p90": float(np.percentile(lat, 90)),
            "p99": float(np.percentile(lat, 99)),
        },
    }


def _ensure_seed(config: ExtractorConfig, rng_seed: int) -> ToeplitzSeed:
    return build_seed(rng_seed, config)
