"""Binary field arithmetic GF(2^nu) and the truncated multiplicative hash.

Field elements are nu-bit strings read as polynomials over GF(2) with bit 0
as the constant coefficient.  Every supported degree has exactly one
reduction polynomial: the table below pins the published choices, and any
other degree gets the lexicographically smallest irreducible polynomial
x^nu + tail (smallest tail value), generated deterministically and cached.
Serialized artifacts always carry the modulus so results are reproducible.

The hash ``phi(w, x, l)`` is the first l bits of w*x.  Over the full seed
space it is two-universal; the protocol layer draws w nonzero so that the
product can later be inverted, at the cost of a 2^-nu seed bias.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import Bits


class DegreeMismatchError(ValueError):
    """Operands belong to fields of different degree."""


class NonInvertibleError(ZeroDivisionError):
    """Zero has no multiplicative inverse."""


# ---------------------------------------------------------------------------
# carry-less polynomial arithmetic on plain ints
# ---------------------------------------------------------------------------

def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials packed in ints."""
    if a == 0 or b == 0:
        return 0
    if a.bit_count() > b.bit_count():
        a, b = b, a
    # shift-and-add over the sparser operand; the 256-entry window table
    # only pays for itself once there are hundreds of set bits
    if a.bit_count() <= 512:
        r = 0
        while a:
            low = a & -a
            r ^= b << (low.bit_length() - 1)
            a ^= low
        return r
    table = [0] * 256
    for i in range(1, 256):
        lsb = i & -i
        table[i] = table[i ^ lsb] ^ (b << (lsb.bit_length() - 1))
    r = 0
    for k, byte in enumerate(a.to_bytes((a.bit_length() + 7) // 8, "little")):
        if byte:
            r ^= table[byte] << (8 * k)
    return r


_SPREAD = np.zeros(256, dtype=np.uint16)
for _b in range(256):
    _s = 0
    for _i in range(8):
        if (_b >> _i) & 1:
            _s |= 1 << (2 * _i)
    _SPREAD[_b] = _s
del _b, _s, _i


def clsq(a: int) -> int:
    """Carry-less square: spreads the bits of a (a(x)^2 = a(x^2) over GF(2))."""
    if a == 0:
        return 0
    raw = np.frombuffer(a.to_bytes((a.bit_length() + 7) // 8, "little"), dtype=np.uint8)
    return int.from_bytes(_SPREAD[raw].tobytes(), "little")


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mod(p: int, m: int) -> int:
    """Reduce p modulo m. Folds through x^deg(m) = m_low, fast for sparse tails."""
    deg = poly_degree(m)
    low = m ^ (1 << deg)
    low_shifts = [i for i in range(low.bit_length()) if (low >> i) & 1]
    mask = (1 << deg) - 1
    while p.bit_length() > deg:
        high = p >> deg
        p &= mask
        # x^deg == m_low (mod m): fold the high part back through each tail term
        for shift in low_shifts:
            p ^= high << shift
        # bits can spill past deg again when deg(m_low) > 0; the loop refolds
    return p


def poly_divmod(p: int, m: int) -> tuple[int, int]:
    dm = poly_degree(m)
    q = 0
    while p.bit_length() - 1 >= dm and p:
        shift = p.bit_length() - 1 - dm
        q |= 1 << shift
        p ^= m << shift
    return q, p


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return a


def poly_invmod(a: int, m: int) -> int:
    """Inverse of a modulo the irreducible m, by extended Euclid."""
    if poly_mod(a, m) == 0:
        raise NonInvertibleError("zero is not invertible")
    r0, r1 = m, poly_mod(a, m)
    s0, s1 = 0, 1
    while r1:
        q, rem = poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 ^ clmul(q, s1)
    if r0 != 1:  # m reducible; unreachable for field moduli
        raise NonInvertibleError(f"gcd is {r0:#x}, not 1")
    return poly_mod(s0, m)


def _mulmod(a: int, b: int, m: int) -> int:
    return poly_mod(clmul(a, b), m)


def _sqmod(a: int, m: int) -> int:
    return poly_mod(clsq(a), m)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin's test, with cheap gcd screens against small-degree factors."""
    deg = poly_degree(f)
    if deg <= 0:
        return False
    if deg == 1:
        return True
    if f & 1 == 0:  # divisible by x
        return False
    if bin(f).count("1") % 2 == 0:  # f(1) == 0, divisible by x+1
        return False
    # iterate h = x^(2^k) mod f; screen early, checkpoint at deg//p
    checkpoints = {deg // p for p in _prime_factors(deg)}
    screens = {k for k in (4, 8, 16) if k < deg}
    h = 2  # the polynomial x
    for k in range(1, deg + 1):
        h = _sqmod(h, f)
        if (k in screens or k in checkpoints) and k < deg:
            if poly_gcd(h ^ 2, f) != 1:
                return False
    return h == 2  # x^(2^deg) == x (mod f)


# ---------------------------------------------------------------------------
# reduction-polynomial registry
# ---------------------------------------------------------------------------

# Published table: for each pinned degree, the full modulus x^nu + tail.
# Every entry is the smallest-tail irreducible polynomial of its degree
# (the deterministic rule implemented by generate_modulus); the large
# protocol-scale degrees were generated once with the same rule and are
# pinned here so that sessions start without a search.
PINNED_MODULI: dict[int, int] = {
    3: (1 << 3) | 0b011,
    4: (1 << 4) | 0b0011,
    8: (1 << 8) | 0b00011011,
    16: (1 << 16) | 0b0000000000101011,
    32: (1 << 32) | 0b10001101,
    64: (1 << 64) | 0b00011011,
    128: (1 << 128) | 0b10000111,
    256: (1 << 256) | 0b10000100101,
    # protocol-scale extractor and seed fields (same smallest-tail rule)
    2528: (1 << 2528) | 0b10011111,
    2560: (1 << 2560) | 0b1000001011,
    6656: (1 << 6656) | 0b1101001101101,
    9728: (1 << 9728) | 0b111110100011,
}

_CACHE_ENV = "TAMPERSTORE_CACHE"


def _cache_path() -> str:
    root = os.environ.get(_CACHE_ENV) or os.path.join(
        os.path.expanduser("~"), ".cache", "tamperstore"
    )
    return os.path.join(root, "gf2_moduli.json")


def _load_disk_cache() -> dict[int, int]:
    try:
        with open(_cache_path()) as fh:
            return {int(k): int(v) for k, v in json.load(fh).items()}
    except (OSError, ValueError):
        return {}


def _store_disk_cache(entries: dict[int, int]) -> None:
    path = _cache_path()
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as fh:
            json.dump({str(k): str(v) for k, v in entries.items()}, fh)
    except OSError:
        pass


@lru_cache(maxsize=None)
def generate_modulus(degree: int) -> int:
    """Deterministic reduction polynomial for GF(2^degree).

    Returns the pinned table entry when there is one, otherwise the
    smallest-tail irreducible x^degree + tail.  Freshly generated values
    for degrees above 256 are cached on disk because the search is slow.
    """
    if degree < 1:
        raise ValueError("degree must be positive")
    if degree == 1:
        return 0b11  # x + 1
    if degree in PINNED_MODULI:
        return PINNED_MODULI[degree]
    disk = _load_disk_cache() if degree > 256 else {}
    if degree in disk and is_irreducible(disk[degree]):
        return disk[degree]
    top = 1 << degree
    tail = 1
    while True:
        f = top | tail
        if is_irreducible(f):
            break
        tail += 2  # constant term must be 1
    if degree > 256:
        disk[degree] = f
        _store_disk_cache(disk)
    return f


# ---------------------------------------------------------------------------
# field and element types
# ---------------------------------------------------------------------------

class GF2Field:
    """The field GF(2^degree) with a fixed reduction polynomial."""

    def __init__(self, degree: int, modulus: int | None = None):
        if degree < 1:
            raise ValueError("degree must be positive")
        self.degree = degree
        self.modulus = modulus if modulus is not None else generate_modulus(degree)
        if poly_degree(self.modulus) != degree:
            raise ValueError("modulus degree does not match field degree")
        self._mask = (1 << degree) - 1

    # int-level fast paths -------------------------------------------------

    def mul_int(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.modulus)

    def inv_int(self, a: int) -> int:
        return poly_invmod(a, self.modulus)

    def pow_int(self, a: int, e: int) -> int:
        r, base = 1, a
        while e:
            if e & 1:
                r = self.mul_int(r, base)
            base = _sqmod(base, self.modulus)
            e >>= 1
        return r

    # element interface ------------------------------------------------------

    def element(self, value) -> "FieldElement":
        if isinstance(value, Bits):
            if value.length != self.degree:
                raise DegreeMismatchError(
                    f"bit string of length {value.length} in GF(2^{self.degree})"
                )
            value = value.value
        value = int(value)
        if not 0 <= value <= self._mask:
            raise ValueError(f"value out of range for GF(2^{self.degree})")
        return FieldElement(self, value)

    def random_element(self, rng: np.random.Generator) -> "FieldElement":
        return self.element(Bits.random(self.degree, rng).value)

    def random_nonzero(self, rng: np.random.Generator) -> "FieldElement":
        """Uniform over the 2^degree - 1 invertible elements."""
        while True:
            e = self.random_element(rng)
            if e.value != 0:
                return e

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def __eq__(self, other):
        return (
            isinstance(other, GF2Field)
            and other.degree == self.degree
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash((self.degree, self.modulus))

    def __repr__(self):
        return f"GF2Field(degree={self.degree}, modulus={self.modulus:#x})"


@dataclass(frozen=True, slots=True)
class FieldElement:
    field: GF2Field
    value: int

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise DegreeMismatchError(
                f"GF(2^{self.field.degree}) vs GF(2^{other.field.degree})"
            )

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.value ^ other.value)

    __xor__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.mul_int(self.value, other.value))

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise NonInvertibleError("zero is not invertible")
        return FieldElement(self.field, self.field.inv_int(self.value))

    @property
    def bits(self) -> Bits:
        return Bits(self.value, self.field.degree)

    def to_bytes(self) -> bytes:
        """Element bytes prefixed with the field's modulus identifier."""
        mod_bits = Bits(self.field.modulus, self.field.degree + 1)
        return mod_bits.to_bytes() + self.bits.to_bytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> tuple["FieldElement", bytes]:
        mod_bits, rest = Bits.from_bytes(raw)
        value_bits, rest = Bits.from_bytes(rest)
        field = GF2Field(mod_bits.length - 1, mod_bits.value)
        return field.element(value_bits.value), rest

    def __repr__(self):
        return f"FieldElement(GF(2^{self.field.degree}), {self.value:#x})"


# ---------------------------------------------------------------------------
# truncated multiplicative hash
# ---------------------------------------------------------------------------

def phi(w: FieldElement, x: FieldElement, l: int) -> Bits:
    """First l bits of w*x; two-universal over uniform w."""
    if not isinstance(w, FieldElement) or not isinstance(x, FieldElement):
        raise TypeError("phi expects field elements")
    w._check(x)
    if l > w.field.degree:
        raise ValueError(f"output length {l} exceeds field degree {w.field.degree}")
    return (w * x).bits.first(l)


def phi_invert(w: FieldElement, p: FieldElement) -> FieldElement:
    """Recover x from the full product p = w*x; requires w != 0."""
    w._check(p)
    if w.value == 0:
        raise NonInvertibleError("seed w = 0 cannot be inverted")
    return w.inverse() * p
