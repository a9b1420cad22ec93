import numpy as np
import pytest

from tamperstore.bits import Bits
from tamperstore.qsim import (
    PUBLIC_EVE_API,
    EveView,
    InterceptResend,
    PassiveEve,
    QubitRegister,
    TrapLayout,
    apply_storage_noise,
    measure,
    prepare,
)


def random_setup(total, r, rng):
    xi = Bits.random(total, rng)
    layout = TrapLayout.random(total, r, rng)
    reg = prepare(xi, layout.t, r)
    return xi, layout, reg


def test_same_basis_measurement_is_faithful():
    rng = np.random.default_rng(0)
    xi, layout, reg = random_setup(200, 50, rng)
    assert measure(reg, layout.t, rng) == xi


def test_all_standard_degenerate_layout():
    rng = np.random.default_rng(1)
    xi = Bits.random(64, rng)
    reg = prepare(xi, Bits.zeros(64), 0)
    assert measure(reg, Bits.zeros(64), rng) == xi


def test_weight_mismatch_rejected():
    rng = np.random.default_rng(2)
    with pytest.raises(ValueError):
        prepare(Bits.random(8, rng), Bits.from_01("11000000"), 3)
    with pytest.raises(ValueError):
        TrapLayout(Bits.from_01("110"), 3)


def test_checkpoint_round_trip_preserves_hidden_state():
    rng = np.random.default_rng(3)
    _, layout, reg = random_setup(77, 20, rng)
    blob = reg.to_bytes()
    clone = QubitRegister.from_bytes(blob)
    assert clone.to_bytes() == blob  # byte-compare oracle
    rng_a, rng_b = np.random.default_rng(9), np.random.default_rng(9)
    assert measure(reg, layout.t, rng_a) == measure(clone, layout.t, rng_b)


def test_noise_identity_at_zero():
    rng = np.random.default_rng(4)
    xi, layout, reg = random_setup(500, 100, rng)
    before = reg.to_bytes()
    apply_storage_noise(reg, 0.0, rng)
    assert reg.to_bytes() == before


def test_noise_flip_rate_confidence_interval():
    rng = np.random.default_rng(5)
    n, beta0 = 100_000, 0.05
    xi = Bits.random(n, rng)
    reg = prepare(xi, Bits.zeros(n), 0)
    apply_storage_noise(reg, beta0, rng)
    out = measure(reg, Bits.zeros(n), rng)
    rate = (out ^ xi).weight() / n
    sigma = (beta0 * (1 - beta0) / n) ** 0.5
    assert abs(rate - beta0) <= 3 * sigma


def test_noise_composition_convolution():
    rng = np.random.default_rng(6)
    n, b0, b1 = 100_000, 0.05, 0.1
    xi = Bits.random(n, rng)
    reg = prepare(xi, Bits.zeros(n), 0)
    apply_storage_noise(reg, b0, rng)
    apply_storage_noise(reg, b1, rng)
    out = measure(reg, Bits.zeros(n), rng)
    expected = b0 * (1 - b1) + b1 * (1 - b0)
    rate = (out ^ xi).weight() / n
    sigma = (expected * (1 - expected) / n) ** 0.5
    assert abs(rate - expected) <= 3 * sigma


def test_cross_basis_outcomes_uniform():
    rng = np.random.default_rng(7)
    n = 100_000
    xi = Bits.random(n, rng)
    reg = prepare(xi, Bits.zeros(n), 0)  # all standard
    ones = Bits((1 << n) - 1, n)
    out = measure(reg, ones, rng)  # all Hadamard
    freq = out.weight() / n
    assert abs(freq - 0.5) <= 0.005


def test_measurement_collapses():
    rng = np.random.default_rng(8)
    n = 1000
    xi = Bits.random(n, rng)
    reg = prepare(xi, Bits.zeros(n), 0)
    bases = Bits.random(n, rng)
    first = measure(reg, bases, rng)
    again = measure(reg, bases, rng)
    assert first == again


def test_intercept_resend_random_basis_error_rate():
    rng = np.random.default_rng(9)
    n = 100_000
    xi = Bits.random(n, rng)
    t = Bits.zeros(n)
    reg = prepare(xi, t, 0)
    InterceptResend(policy="random-basis").apply(EveView(reg), {}, rng)
    out = measure(reg, t, rng)
    rate = (out ^ xi).weight() / n
    sigma = (0.25 * 0.75 / n) ** 0.5
    assert abs(rate - 0.25) <= 3 * sigma


def test_intercept_resend_all_standard_split_rates():
    rng = np.random.default_rng(10)
    n = 100_000
    xi = Bits.random(n, rng)
    layout = TrapLayout.random(n, n // 2, rng)
    reg = prepare(xi, layout.t, n // 2)
    InterceptResend(policy="all-standard").apply(EveView(reg), {}, rng)
    out = measure(reg, layout.t, rng)
    errors = (out ^ xi).to_array()
    standard_rate = errors[layout.payload_indices].mean()
    trap_rate = errors[layout.trap_indices].mean()
    assert standard_rate == 0.0  # matching basis, no disturbance
    sigma = (0.25 / (n / 2)) ** 0.5
    assert abs(trap_rate - 0.5) <= 3 * sigma


def test_passive_strategy_is_identity():
    rng = np.random.default_rng(11)
    xi, layout, reg = random_setup(300, 60, rng)
    before = reg.to_bytes()
    PassiveEve().apply(EveView(reg), {}, rng)
    assert reg.to_bytes() == before


def test_eve_view_exposes_only_legal_surface():
    rng = np.random.default_rng(12)
    _, _, reg = random_setup(16, 4, rng)
    view = EveView(reg)
    public = {name for name in dir(view) if not name.startswith("_")}
    assert public == set(PUBLIC_EVE_API)
    for leaky in ("basis", "value", "reg", "register", "_basis", "_value"):
        with pytest.raises(AttributeError):
            getattr(view, leaky)


def test_eve_cannot_read_preparation_without_disturbance():
    # cross-basis measurement through the view returns fresh coin flips
    rng = np.random.default_rng(13)
    n = 40_000
    xi = Bits.zeros(n)  # deterministic preparation values
    reg = prepare(xi, Bits.zeros(n), 0)
    view = EveView(reg)
    out = view.measure(np.arange(n), np.ones(n, dtype=np.uint8), rng)
    assert abs(out.mean() - 0.5) <= 3 * (0.25 / n) ** 0.5


def test_trap_layout_split_merge_round_trip():
    rng = np.random.default_rng(14)
    word = Bits.random(50, rng)
    layout = TrapLayout.random(50, 13, rng)
    v, x = layout.split(word)
    assert v.length == 13 and x.length == 37
    assert layout.merge(v, x) == word


def test_trap_layout_uniformity_smoke():
    rng = np.random.default_rng(15)
    counts = np.zeros(6)
    for _ in range(6000):
        layout = TrapLayout.random(6, 2, rng)
        counts[layout.trap_indices] += 1
    expected = 6000 * 2 / 6
    assert np.all(np.abs(counts - expected) < 5 * expected**0.5)
