"""Fixed-length bit strings.

A ``Bits`` value is an immutable sequence of bits backed by a Python int.
Bit index 0 is the *first* bit: it is the constant coefficient when the
string is read as a polynomial over GF(2), and it is the first bit sent
when the string is parsed left to right (prefix codes, "first l bits"
truncation, concatenation).  With that convention, the first ``l`` bits
of ``b`` are simply ``b.value & ((1 << l) - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class Bits:
    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.value < 0 or (self.length < self.value.bit_length()):
            raise ValueError(f"value {self.value:#x} does not fit in {self.length} bits")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, length: int) -> "Bits":
        return cls(0, length)

    @classmethod
    def from_01(cls, text: str) -> "Bits":
        """Parse a transmission-order string: first character is bit 0."""
        text = text.strip()
        if text and set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        value = 0
        for i, ch in enumerate(text):
            if ch == "1":
                value |= 1 << i
        return cls(value, len(text))

    @classmethod
    def from_array(cls, arr) -> "Bits":
        """Build from a 0/1 array; element i becomes bit i."""
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("expected a 1-d array")
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(int.from_bytes(packed, "little"), int(arr.size))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "Bits":
        nbytes = (length + 7) // 8
        value = int.from_bytes(rng.bytes(nbytes), "little") & ((1 << length) - 1)
        return cls(value, length)

    # -- views -------------------------------------------------------------

    def to_01(self) -> str:
        return "".join("1" if (self.value >> i) & 1 else "0" for i in range(self.length))

    def to_array(self) -> np.ndarray:
        raw = self.value.to_bytes((self.length + 7) // 8 or 1, "little")
        arr = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return arr[: self.length].copy()

    def to_bytes(self) -> bytes:
        """Length-prefixed little-endian packing (4-byte length in bits)."""
        nbytes = (self.length + 7) // 8
        return self.length.to_bytes(4, "little") + self.value.to_bytes(nbytes, "little")

    @classmethod
    def from_bytes(cls, raw: bytes) -> tuple["Bits", bytes]:
        """Inverse of :meth:`to_bytes`; returns the value and leftover bytes."""
        length = int.from_bytes(raw[:4], "little")
        nbytes = (length + 7) // 8
        value = int.from_bytes(raw[4 : 4 + nbytes], "little")
        return cls(value, length), raw[4 + nbytes :]

    def hex(self) -> str:
        nbytes = (self.length + 7) // 8
        return self.value.to_bytes(max(nbytes, 1), "little").hex() if self.length else ""

    @classmethod
    def from_hex(cls, text: str, length: int) -> "Bits":
        value = int.from_bytes(bytes.fromhex(text), "little") if text else 0
        return cls(value & ((1 << length) - 1), length)

    # -- operations --------------------------------------------------------

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i):
        if isinstance(i, slice):
            start, stop, step = i.indices(self.length)
            if step != 1:
                raise ValueError("only contiguous slices are supported")
            width = max(stop - start, 0)
            return Bits((self.value >> start) & ((1 << width) - 1), width)
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __xor__(self, other: "Bits") -> "Bits":
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return Bits(self.value ^ other.value, self.length)

    def concat(self, other: "Bits") -> "Bits":
        return Bits(self.value | (other.value << self.length), self.length + other.length)

    def first(self, l: int) -> "Bits":
        if l > self.length:
            raise ValueError(f"cannot take {l} bits from {self.length}")
        return Bits(self.value & ((1 << l) - 1), l)

    def weight(self) -> int:
        return self.value.bit_count()

    def flip(self, i: int) -> "Bits":
        if not 0 <= i < self.length:
            raise IndexError(i)
        return Bits(self.value ^ (1 << i), self.length)

    def __repr__(self) -> str:
        body = self.to_01() if self.length <= 64 else self.to_01()[:61] + "..."
        return f"Bits<{self.length}>({body})"
