"""Length-counted, MSB-first packed bit sequences."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class BitStream:
    """A packed bit sequence.

    ``payload`` holds ``ceil(bit_count / 8)`` bytes.  Bit 0 of the stream is
    the most significant bit of ``payload[0]``; unused trailing bits of the
    last byte are zero.
    """

    bit_count: int
    payload: bytes
    bit_order: str = "msb"

    def __post_init__(self) -> None:
        if self.bit_order != "msb":
            raise DomainError("only MSB-first bit order is supported")
        if self.bit_count < 0:
            raise DomainError("bit_count must be non-negative")
        expected = (self.bit_count + 7) // 8
        if len(self.payload) != expected:
            raise DomainError(
                f"payload holds {len(self.payload)} bytes, expected {expected}"
            )
        pad = 8 * expected - self.bit_count
        if pad and self.payload[-1] & ((1 << pad) - 1):
            raise DomainError("trailing pad bits must be zero")

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> "BitStream":
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise DomainError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise DomainError("bit values must be 0 or 1")
        return cls(int(arr.size), np.packbits(arr).tobytes())

    @classmethod
    def empty(cls) -> "BitStream":
        return cls(0, b"")

    def bits(self) -> np.ndarray:
        """Unpacked 0/1 uint8 array of length ``bit_count``."""
        return np.unpackbits(
            np.frombuffer(self.payload, dtype=np.uint8), count=self.bit_count
        )

    def __len__(self) -> int:
        return self.bit_count


def concat(streams: Iterable[BitStream]) -> BitStream:
    """Concatenate streams in order (bitwise, not bytewise)."""
    chunks = [s for s in streams if s.bit_count]
    if not chunks:
        return BitStream.empty()
    if len(chunks) == 1:
        return chunks[0]
    if all(s.bit_count % 8 == 0 for s in chunks[:-1]):
        return BitStream(
            sum(s.bit_count for s in chunks), b"".join(s.payload for s in chunks)
        )
    return BitStream.from_bits(np.concatenate([s.bits() for s in chunks]))


def slice_bits(stream: BitStream, start: int, stop: int) -> BitStream:
    """Sub-stream covering bit positions [start, stop)."""
    if not 0 <= start <= stop <= stream.bit_count:
        raise DomainError(
            f"slice [{start}, {stop}) out of range for {stream.bit_count} bits"
        )
    if start % 8 == 0:
        nbits = stop - start
        payload = stream.payload[start // 8 : (stop + 7) // 8]
        pad = 8 * len(payload) - nbits
        if pad:
            last = payload[-1] & (0xFF << pad) & 0xFF
            payload = payload[:-1] + bytes([last])
        return BitStream(nbits, payload)
    return BitStream.from_bits(stream.bits()[start:stop])
