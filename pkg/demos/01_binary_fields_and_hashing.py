"""Binary field arithmetic and the truncated multiplicative hash.

Walks through GF(2^nu) basics, counts hash collisions exhaustively to
show two-universality, and round-trips the invertible extraction that
the protocol uses to randomise messages.
"""

import itertools

import numpy as np

from tamperstore import GF2Field, phi, phi_invert

###############################################################################
# A field instance fixes one reduction polynomial per degree, so elements
# serialized anywhere always say which polynomial they meant.

field = GF2Field(8)
print(f"GF(2^8) reduction polynomial: {field.modulus:#x}")

rng = np.random.default_rng(1)
a, b = field.random_element(rng), field.random_element(rng)
print(f"a = {a.value:#04x}, b = {b.value:#04x}")
print(f"a * b = {(a * b).value:#04x}")
print(f"a + b = a XOR b = {(a ^ b).value:#04x}")
print(f"a * a^-1 = {(a * a.inverse()).value:#x}")

###############################################################################
# The hash phi(w, x, l) keeps the first l bits of w * x.  Over a uniform
# seed w (zero included) every distinct pair collides on exactly a 2^-l
# fraction of seeds: count them, no sampling needed.

small = GF2Field(3)
for l in (1, 2):
    counts = []
    for x, xp in itertools.combinations(range(8), 2):
        hits = sum(
            phi(small.element(w), small.element(x), l)
            == phi(small.element(w), small.element(xp), l)
            for w in range(8)
        )
        counts.append(hits)
    print(f"l = {l}: collision count per pair = {set(counts)} out of 8 seeds "
          f"(2^-l fraction = {8 >> l})")

###############################################################################
# With a nonzero seed the full product is invertible, which is what lets
# the message owner undo the randomisation later.

w = field.random_nonzero(rng)
x = field.random_element(rng)
product = w * x
print(f"recovered x == x: {phi_invert(w, product) == x}")
