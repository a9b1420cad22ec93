"""Message preparation: prefix-code compression with random padding, then
invertible extraction through the truncated multiplicative hash.

``compress`` maps every message to a fixed-length string whose tail is
uniform padding; because the code is prefix-free the padding needs no
delimiter and costs nothing to remember.  ``randomize`` multiplies that
string by a nonzero seed in GF(2^l0) and splits the product into the
near-uniform part ``m`` and the locally stored remainder ``m_nabla``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .bits import Bits
from .entropy import DiscreteDistribution
from .gf2 import FieldElement, GF2Field, NonInvertibleError


class ParseError(ValueError):
    """No codeword is a prefix of the given string."""


class UnknownMessageError(KeyError):
    """Message has no codeword in the prefix code."""


@dataclass(frozen=True)
class PrefixCode:
    codewords: dict[int, Bits]
    name: str = ""

    def __post_init__(self):
        if not self.codewords:
            raise ValueError("empty codeword table")
        decode = {
            (cw.length, cw.value): message for message, cw in self.codewords.items()
        }
        if len(decode) != len(self.codewords):
            raise ValueError("duplicate codewords")
        object.__setattr__(self, "_decode", decode)
        strings = sorted(cw.to_01() for cw in self.codewords.values())
        for a, b in zip(strings, strings[1:]):
            if b.startswith(a):
                raise ValueError(f"codeword {a} is a prefix of {b}")
        if self.kraft_sum() > 1 + 1e-12:
            raise ValueError("Kraft sum exceeds 1")

    @property
    def max_len(self) -> int:
        """Length of the longest codeword; the padded length l0."""
        return max(cw.length for cw in self.codewords.values())

    def kraft_sum(self) -> float:
        return float(sum(2.0 ** -cw.length for cw in self.codewords.values()))

    def average_length(self, dist: DiscreteDistribution) -> float:
        return float(
            sum(p * self.codewords[int(o)].length for o, p in zip(dist.outcomes, dist.probs))
        )

    def parse(self, word: Bits) -> tuple[int, int]:
        """Parse the unique codeword prefix; returns (message, codeword length)."""
        decode = self.__dict__["_decode"]
        for length in range(0, word.length + 1):
            message = decode.get((length, word.first(length).value))
            if message is not None:
                return message, length
        raise ParseError(f"no codeword prefixes {word!r}")

    # -- text form: "message-id codeword" per line --------------------------

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for message in sorted(self.codewords):
                fh.write(f"{message} {self.codewords[message].to_01()}\n")

    @classmethod
    def load(cls, path) -> "PrefixCode":
        table = {}
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                ident, word = line.split()
                table[int(ident)] = Bits.from_01(word)
        return cls(table)


def build_prefix_code(dist: DiscreteDistribution) -> PrefixCode:
    """Huffman code with deterministic tie-breaking (stable by message id)."""
    if dist.support_size == 0:
        raise ValueError("empty support")
    order = np.argsort(dist.outcomes)
    heap = []
    for seq, idx in enumerate(order):
        heap.append((float(dist.probs[idx]), seq, int(dist.outcomes[idx])))
    if len(heap) == 1:
        return PrefixCode({heap[0][2]: Bits.zeros(0)}, dist.name)
    heapq.heapify(heap)
    counter = len(heap)
    trees: dict[int, object] = {item[1]: item[2] for item in heap}
    while len(heap) > 1:
        p1, s1, _ = heapq.heappop(heap)
        p2, s2, _ = heapq.heappop(heap)
        trees[counter] = (trees.pop(s1), trees.pop(s2))
        heapq.heappush(heap, (p1 + p2, counter, -1))
        counter += 1
    table: dict[int, Bits] = {}
    stack = [(trees.popitem()[1], "")]
    while stack:
        node, word = stack.pop()
        if isinstance(node, tuple):
            stack.append((node[0], word + "0"))
            stack.append((node[1], word + "1"))
        else:
            table[node] = Bits.from_01(word)
    return PrefixCode(table, dist.name)


def example1_code(L: int, mu0: int | None = None) -> PrefixCode:
    """The explicit code behind :func:`tamperstore.entropy.example1`.

    The heavy message gets the single bit '1'; every other message mu is
    sent as '0' followed by the L bits of mu.
    """
    if mu0 is None:
        mu0 = (1 << L) - 1
    table = {mu0: Bits.from_01("1")}
    for mu in range(1 << L):
        if mu != mu0:
            table[mu] = Bits.from_01("0").concat(Bits(mu, L))
    return PrefixCode(table, f"example1(L={L})")


def compress(message: int, code: PrefixCode, rng: np.random.Generator) -> Bits:
    """Codeword followed by uniform padding up to the longest-codeword length."""
    try:
        cw = code.codewords[message]
    except KeyError:
        raise UnknownMessageError(message) from None
    return cw.concat(Bits.random(code.max_len - cw.length, rng))


def decompress(padded: Bits, code: PrefixCode) -> int:
    """Parse the unique codeword prefix and discard the padding."""
    message, _ = code.parse(padded)
    return message


@dataclass(frozen=True)
class RandomizedMessage:
    m: Bits
    m_nabla: Bits
    w: FieldElement

    @property
    def product(self) -> Bits:
        return self.m.concat(self.m_nabla)


def randomize(padded: Bits, w: FieldElement, l: int) -> RandomizedMessage:
    """Split w * padded into the first l bits and the remainder."""
    if w.value == 0:
        raise NonInvertibleError("seed w must be nonzero")
    field = w.field
    if field.degree != padded.length:
        raise ValueError(f"padded length {padded.length} != field degree {field.degree}")
    if l > field.degree:
        raise ValueError("l exceeds the padded length")
    product = (w * field.element(padded)).bits
    return RandomizedMessage(product.first(l), product[l:], w)


def derandomize(m: Bits, m_nabla: Bits, w: FieldElement) -> Bits:
    """Invert :func:`randomize`: multiply the reassembled product by w^-1."""
    if w.value == 0:
        raise NonInvertibleError("seed w must be nonzero")
    product = m.concat(m_nabla)
    if product.length != w.field.degree:
        raise ValueError("m || m_nabla length does not match the field degree")
    return (w.inverse() * w.field.element(product)).bits
