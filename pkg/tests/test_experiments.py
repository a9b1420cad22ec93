import numpy as np
import pytest

from tamperstore.experiments import (
    ExperimentConfig,
    build_instance,
    make_strategy,
    parse_dist,
    run_correctness_experiment,
    run_tamper_experiment,
    tamper_acceptance_bound,
    trial_rng,
    wilson_interval,
)
from tamperstore.protocol import ProtocolInstance
from tamperstore.qsim import ClassicalTamper, InterceptResend, PassiveEve, apply_storage_noise
from tamperstore.randomizer import example1_code


@pytest.fixture(scope="module")
def noiseless_instance():
    return ProtocolInstance.derive(0.05, 0.0, 4, example1_code(12))


def test_wilson_interval_values():
    low, high = wilson_interval(0, 100)
    assert low == 0.0 and 0.03 < high < 0.05
    low, high = wilson_interval(50, 100)
    assert low == pytest.approx(0.404, abs=1e-3)
    assert high == pytest.approx(0.596, abs=1e-3)
    with pytest.raises(ValueError):
        wilson_interval(1, 0)


def test_trial_rng_is_order_independent():
    a = [trial_rng(9, i).integers(0, 1 << 30) for i in (0, 1, 2)]
    b = [trial_rng(9, i).integers(0, 1 << 30) for i in (2, 0, 1)]
    assert a[0] == b[1] and a[1] == b[2] and a[2] == b[0]
    assert len(set(a)) == 3


def test_parse_dist_specs(tmp_path):
    assert parse_dist("uniform:8").support_size == 8
    assert parse_dist("example1:4").support_size == 16
    path = tmp_path / "d.txt"
    path.write_text("0 0.5\n1 0.5\n")
    assert parse_dist(f"file:{path}").support_size == 2
    with pytest.raises(ValueError):
        parse_dist("nope:1")


def test_make_strategy():
    assert isinstance(make_strategy("passive"), PassiveEve)
    s = make_strategy("intercept-resend/all-standard")
    assert isinstance(s, InterceptResend) and s.policy == "all-standard"
    t = make_strategy("flip-c/3")
    assert isinstance(t, ClassicalTamper) and t.bit == 3
    with pytest.raises(ValueError):
        make_strategy("unknown")


def test_correctness_noiseless_zero_failures(noiseless_instance):
    config = ExperimentConfig("correctness", 0.05, 0.0, 4, trials=40, master_seed=5)
    report = run_correctness_experiment(config, instance=noiseless_instance)
    assert report.event_count == 0
    assert report.verdict == "consistent"
    assert report.bound_value <= 0.05


def test_report_reproducible_bit_for_bit(tmp_path, noiseless_instance):
    config = ExperimentConfig("correctness", 0.05, 0.0, 4, trials=10, master_seed=11)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_correctness_experiment(config, instance=noiseless_instance).to_csv(a)
    run_correctness_experiment(config, instance=noiseless_instance).to_csv(b)
    assert a.read_bytes() == b.read_bytes()
    body = a.read_text()
    assert "master_seed,11" in body
    assert "bound_name,correctness_failure_bound" in body
    assert "version," in body


def test_sanity_inversion_noise_beyond_budget(noiseless_instance):
    # drive the channel far above beta + nu: failures must dominate
    inst = noiseless_instance
    rng = np.random.default_rng(3)
    failures = 0
    for _ in range(15):
        bundle, secrets = inst.store(7, rng)
        apply_storage_noise(bundle.register, 0.4, rng)
        out = inst.retrieve(bundle, secrets, rng)
        failures += out.omega == 0
    assert failures >= 14


def test_tamper_classical_flip_rejected(noiseless_instance):
    config = ExperimentConfig(
        "tamper", 0.05, 0.0, 4, strategy="flip-c/0", trials=40, master_seed=6
    )
    report = run_tamper_experiment(config, instance=noiseless_instance)
    assert report.bound_name == "mac_forgery_bound"
    assert report.bound_value == 0.05 / 8
    assert report.event_count == 0
    assert report.verdict == "consistent"
    reasons = {reason for _, reason in report.outcomes}
    assert reasons == {"mac"}


def test_tamper_intercept_resend_detected(noiseless_instance):
    config = ExperimentConfig(
        "tamper", 0.05, 0.0, 4, strategy="intercept-resend/random-basis",
        trials=40, master_seed=7,
    )
    report = run_tamper_experiment(config, instance=noiseless_instance)
    assert report.event_count == 0
    assert report.bound_value < 1e-6  # binomial tail far below beta r
    assert report.verdict == "consistent"
    assert {"trap", "decode"} >= {reason for _, reason in report.outcomes}


def test_tamper_bound_names(noiseless_instance):
    params = noiseless_instance.params
    name, value = tamper_acceptance_bound(params, InterceptResend(policy="random-basis"))
    assert "binom_cdf" in name and 0 <= value < 1e-6
    name, value = tamper_acceptance_bound(params, ClassicalTamper())
    assert name == "mac_forgery_bound" and value == params.eps_mac
    name, value = tamper_acceptance_bound(params, InterceptResend(policy="all-hadamard"))
    assert value == 1.0  # traps cannot see an attack in their own basis


def test_eve_payload_proxy_unit():
    from tamperstore.experiments import _eve_payload_proxy
    from tamperstore.bits import Bits
    from tamperstore.qsim import TrapLayout

    rng = np.random.default_rng(8)
    layout = TrapLayout.random(10, 3, rng)

    class FakeSecrets:
        pass

    secrets = FakeSecrets()
    secrets.layout = layout
    bases = np.zeros(10, dtype=np.uint8)
    bases[layout.payload_indices[:3]] = 1  # three payload cells in the wrong basis
    transcript = {"eve_records": [(bases, np.zeros(10, dtype=np.uint8))]}
    proxy = _eve_payload_proxy(transcript, secrets)
    assert proxy == pytest.approx(4 / 7)
    assert _eve_payload_proxy({}, secrets) is None


def test_config_file_round_trip(tmp_path):
    config = ExperimentConfig(
        "tamper", 0.01, 0.05, 3, dist="uniform:64", strategy="flip-c/1",
        trials=123, master_seed=99,
    )
    path = tmp_path / "config.txt"
    config.dump(path)
    assert ExperimentConfig.load(path) == config


def test_scenario_mismatch_rejected():
    config = ExperimentConfig("correctness", 0.05, 0.0, 4, trials=1)
    with pytest.raises(ValueError):
        run_tamper_experiment(config)
