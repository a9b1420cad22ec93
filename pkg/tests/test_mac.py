import itertools
import math

import numpy as np
import pytest

from tamperstore.bits import Bits
from tamperstore.gf2 import GF2Field
from tamperstore.mac import (
    MacKey,
    OversizeMessageError,
    forgery_bound,
    mac_sizes,
    tag,
    verify,
)


def all_keys(lam):
    return [MacKey(a, b, lam) for a in range(1 << lam) for b in range(1 << lam)]


def test_completeness_every_key_and_message():
    rng = np.random.default_rng(0)
    for lam in (1, 3, 4, 8):
        cap = min(4 * lam, lam * (1 << lam))
        for _ in range(30):
            key = MacKey.random(lam, rng)
            msg = Bits.random(int(rng.integers(0, cap + 1)), rng)
            assert verify(key, msg, tag(key, msg))


def test_degenerate_zero_a_still_complete():
    lam = 4
    rng = np.random.default_rng(1)
    for b in (0, 7, 15):
        key = MacKey(0, b, lam)
        m1, m2 = Bits.random(8, rng), Bits.random(12, rng)
        assert tag(key, m1) == tag(key, m2) == Bits(b, lam)
        assert verify(key, m1, tag(key, m1))


def test_tag_is_polynomial_evaluation():
    # independent oracle: explicit sum of m_i * a^i plus b
    lam = 4
    field = GF2Field(lam)
    rng = np.random.default_rng(2)
    for _ in range(50):
        key = MacKey.random(lam, rng)
        msg = Bits.random(11, rng)
        blocks = [msg[0:4].value, msg[4:8].value, msg[8:11].value, 1 + (11 % 15)]
        expected = key.b
        for i, block in enumerate(blocks, start=1):
            expected ^= field.mul_int(block, field.pow_int(key.a, i))
        assert tag(key, msg).value == expected


def test_exhaustive_forgery_bound_lambda4():
    # 2-block messages, lam = 4: success over keys is at most (B+1)/2^lam = 3/16
    lam = 4
    field = GF2Field(lam)
    msg_len = 8

    def content_poly_values(msg_value):
        out = []
        for a in range(1 << lam):
            acc = 0
            blocks = [msg_value & 15, msg_value >> 4, 1 + (msg_len % 15)]
            for block in reversed(blocks):
                acc = field.mul_int(acc ^ block, a)
            out.append(acc)
        return out

    m = 0b10110100
    base = content_poly_values(m)
    worst = 0
    for mp in range(1 << msg_len):
        if mp == m:
            continue
        diff = [pv ^ bv for pv, bv in zip(content_poly_values(mp), base)]
        counts = np.bincount(diff, minlength=1 << lam)
        worst = max(worst, int(counts.max()))
    assert worst <= 3  # degree-3 difference polynomial: at most 3 roots
    assert worst / 2.0**lam <= forgery_bound(lam, msg_len) == 3 / 16


def test_bit_flip_rejection_rate_exhaustive():
    lam = 4
    msg = Bits.from_01("10110100")
    bound = forgery_bound(lam, msg.length)
    for i in range(msg.length):
        flipped = msg.flip(i)
        accepted = sum(
            verify(key, flipped, tag(key, msg)) for key in all_keys(lam)
        )
        assert accepted / len(all_keys(lam)) <= bound


def test_tag_flip_always_rejected():
    rng = np.random.default_rng(3)
    key = MacKey.random(6, rng)
    msg = Bits.random(20, rng)
    theta = tag(key, msg)
    for i in range(theta.length):
        assert not verify(key, msg, theta.flip(i))


def test_zero_padding_does_not_collide():
    # messages that pad to identical blocks still get distinct tags a.s.
    lam = 4
    cases = [
        (Bits.zeros(0), Bits.zeros(16)),
        (Bits.from_01("1"), Bits.from_01("10")),
        (Bits.from_01("101"), Bits.from_01("1010")),
    ]
    for m1, m2 in cases:
        collisions = sum(tag(k, m1) == tag(k, m2) for k in all_keys(lam))
        assert collisions / len(all_keys(lam)) <= forgery_bound(lam, max(m1.length, m2.length))


def test_oversize_rejected():
    lam = 2
    key = MacKey(1, 1, lam)
    with pytest.raises(OversizeMessageError):
        tag(key, Bits.zeros(lam * 2**lam + 1))


def test_mac_sizes_reference_values():
    sizes = mac_sizes(2.0**-32, 2**20)
    assert sizes.den_boer_key_bits == pytest.approx(64 + 2 * math.log2(20), abs=1e-9)
    assert sizes.den_boer_key_bits == pytest.approx(72.6, abs=0.1)
    assert sizes.den_boer_tag_bits == pytest.approx(32 + math.log2(20), abs=1e-9)


def test_mac_sizes_vacuous_security():
    assert mac_sizes(1.0, 2**10).lam == 1


@pytest.mark.parametrize("lam_target", [4, 5, 6])
def test_lambda_formula_meets_exhaustive_bound(lam_target):
    # pick eps so that the formula lands on lam_target, then check the
    # worst-case forgery probability really is below eps
    msg_len = 2 * lam_target
    blocks = -(-msg_len // lam_target)
    eps = (blocks + 1) / 2.0**lam_target
    sizes = mac_sizes(eps, 2**msg_len)
    assert sizes.lam <= lam_target
    assert forgery_bound(sizes.lam, msg_len) <= eps


def test_key_bits_round_trip():
    rng = np.random.default_rng(4)
    key = MacKey.random(5, rng)
    assert MacKey.from_bits(key.to_bits()) == key
    assert key.bit_size == 10
