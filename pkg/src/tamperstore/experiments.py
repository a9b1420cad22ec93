"""Monte-Carlo experiment runner: bound-versus-measurement comparisons.

Each trial gets its own generator, keyed by the master seed and the trial
index through a counter-based bit generator, so trial sets are
order-independent and a report is reproducible bit for bit from its
config.  Frequencies come with Wilson 95% intervals; a bound is declared
violated only when it lies below the interval's lower edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import binom

from . import __version__, kv
from .bits import Bits
from .entropy import DiscreteDistribution, example1, load_distribution, uniform
from .gf2 import GF2Field
from .params import ProtocolParams, correctness_bound
from .protocol import ProtocolInstance, ServerBundle
from .qsim import ClassicalTamper, EveStrategy, EveView, InterceptResend, PassiveEve
from .randomizer import build_prefix_code, example1_code

WILSON_Z = 1.959963984540054  # two-sided 95%


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials**2))
    low = 0.0 if successes == 0 else max(0.0, centre - half)
    high = 1.0 if successes == trials else min(1.0, centre + half)
    return low, high


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Counter-mode stream: independent of evaluation order."""
    return np.random.Generator(np.random.Philox(key=master_seed, counter=[0, 0, index, 0]))


def parse_dist(spec: str) -> DiscreteDistribution:
    """"example1:12", "uniform:256", or "file:<path>"."""
    kind, _, arg = spec.partition(":")
    if kind == "example1":
        return example1(int(arg))
    if kind == "uniform":
        return uniform(int(arg))
    if kind == "file":
        return load_distribution(arg)
    raise ValueError(f"unknown distribution spec {spec!r}")


def prefix_code_for(spec: str):
    kind, _, arg = spec.partition(":")
    if kind == "example1":
        return example1_code(int(arg))
    return build_prefix_code(parse_dist(spec))


def make_strategy(name: str) -> EveStrategy:
    if name == "passive":
        return PassiveEve()
    if name.startswith("intercept-resend"):
        _, _, policy = name.partition("/")
        return InterceptResend(policy=policy or "random-basis")
    if name.startswith("flip-c"):
        _, _, bit = name.partition("/")
        return ClassicalTamper(field="c", bit=int(bit) if bit else 0)
    raise ValueError(f"unknown strategy {name!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str  # "correctness" or "tamper"
    epsilon: float
    beta0: float
    ell: int
    dist: str = "example1:12"
    strategy: str = "passive"
    trials: int = 1000
    master_seed: int = 2024
    out: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trial count must be at least 1")

    def to_kv(self) -> dict:
        return {
            "scenario": self.scenario,
            "epsilon": self.epsilon,
            "beta0": self.beta0,
            "ell": self.ell,
            "dist": self.dist,
            "strategy": self.strategy,
            "trials": self.trials,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_kv(cls, mapping: dict) -> "ExperimentConfig":
        return cls(**{k: mapping[k] for k in mapping if k != "out"})

    def dump(self, path) -> None:
        kv.dump(path, "config", self.to_kv())

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        kind, mapping = kv.load(path)
        if kind != "config":
            raise ValueError(f"expected a config file, got {kind!r}")
        return cls.from_kv(mapping)


@dataclass(frozen=True)
class ExperimentReport:
    scenario: str
    strategy: str
    trials: int
    master_seed: int
    event_name: str  # what was counted
    event_count: int
    frequency: float
    wilson_low: float
    wilson_high: float
    bound_name: str
    bound_value: float
    verdict: str  # "consistent" or "violated"
    params_summary: dict
    extras: dict = field(default_factory=dict)
    outcomes: list = field(default_factory=list, repr=False)
    version: str = __version__

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("key,value\n")
            meta = {
                "scenario": self.scenario,
                "strategy": self.strategy,
                "trials": self.trials,
                "master_seed": self.master_seed,
                "event": self.event_name,
                "event_count": self.event_count,
                "frequency": repr(self.frequency),
                "wilson_low": repr(self.wilson_low),
                "wilson_high": repr(self.wilson_high),
                "bound_name": self.bound_name,
                "bound_value": repr(self.bound_value),
                "verdict": self.verdict,
                "version": self.version,
            }
            for key, value in self.params_summary.items():
                meta[f"params.{key}"] = value
            for key, value in self.extras.items():
                meta[f"extras.{key}"] = value
            for key, value in meta.items():
                fh.write(f"{key},{value}\n")
            fh.write("trial,omega,reason\n")
            for i, (omega, reason) in enumerate(self.outcomes):
                fh.write(f"{i},{omega},{reason}\n")


def _params_summary(params: ProtocolParams) -> dict:
    return {
        "code": params.code_name,
        "n": params.n,
        "r": params.r,
        "kappa": params.kappa,
        "ell": params.ell,
        "ell0": params.ell0,
        "lam": params.lam,
        "beta": repr(params.beta),
        "nu": repr(params.nu),
    }


def _verdict(bound: float, low: float) -> str:
    return "violated" if low > bound else "consistent"


def build_instance(config: ExperimentConfig) -> tuple[ProtocolInstance, DiscreteDistribution]:
    dist = parse_dist(config.dist)
    prefix = prefix_code_for(config.dist)
    instance = ProtocolInstance.derive(config.epsilon, config.beta0, config.ell, prefix)
    return instance, dist


def run_correctness_experiment(
    config: ExperimentConfig, instance: ProtocolInstance | None = None
) -> ExperimentReport:
    """Honest channel: count retrieval failures against the theory bound."""
    if config.scenario != "correctness":
        raise ValueError("config.scenario must be 'correctness'")
    if instance is None:
        instance, dist = build_instance(config)
    else:
        dist = parse_dist(config.dist)
    failures = 0
    outcomes = []
    for index in range(config.trials):
        rng = trial_rng(config.master_seed, index)
        message = int(dist.sample(rng))
        bundle, secrets = instance.store(message, rng)
        instance.apply_noise(bundle, rng)
        out = instance.retrieve(bundle, secrets, rng)
        ok = out.omega == 1 and out.message == message
        failures += not ok
        outcomes.append((out.omega, out.abort_reason))
    low, high = wilson_interval(failures, config.trials)
    bound = correctness_bound(instance.params)
    return ExperimentReport(
        scenario=config.scenario,
        strategy="passive",
        trials=config.trials,
        master_seed=config.master_seed,
        event_name="retrieval_failure",
        event_count=failures,
        frequency=failures / config.trials,
        wilson_low=low,
        wilson_high=high,
        bound_name="correctness_failure_bound",
        bound_value=bound,
        verdict=_verdict(bound, low),
        params_summary=_params_summary(instance.params),
        outcomes=outcomes,
    )


def _apply_strategy(
    strategy: EveStrategy,
    bundle: ServerBundle,
    params: ProtocolParams,
    rng: np.random.Generator,
) -> tuple[ServerBundle, dict]:
    transcript = {
        "w": bundle.w.bits,
        "u": bundle.u,
        "c": bundle.c,
        "theta": bundle.theta,
    }
    strategy.apply(EveView(bundle.register), transcript, rng)
    seed_field = GF2Field(params.ell0)
    tampered = replace(
        bundle,
        w=seed_field.element(transcript["w"]),
        u=transcript["u"],
        c=transcript["c"],
        theta=transcript["theta"],
    )
    return tampered, transcript


def tamper_acceptance_bound(params: ProtocolParams, strategy: EveStrategy) -> tuple[str, float]:
    if isinstance(strategy, InterceptResend):
        if strategy.policy == "random-basis":
            flip = 0.25
        elif strategy.policy == "all-standard":
            flip = 0.5  # every trap sits in the other basis
        else:
            flip = 0.5 * params.n / (params.n + params.r)  # payload-basis attack
        if strategy.policy == "all-hadamard":
            # traps undisturbed: the trap test cannot see this attack
            return "trivial_bound", 1.0
        threshold = math.floor(params.beta * params.r)
        return (
            f"binom_cdf(r={params.r}, p={flip}, k<={threshold})",
            float(binom.cdf(threshold, params.r, flip)),
        )
    if isinstance(strategy, ClassicalTamper):
        return "mac_forgery_bound", params.eps_mac
    return "trivial_bound", 1.0


def _eve_payload_proxy(transcript: dict, secrets) -> float | None:
    """Fraction of payload bits Eve measured in their preparation basis.

    Matching-basis outcomes equal the stored payload bits, so this is the
    fraction of the payload the attacker actually learned.
    """
    records = transcript.get("eve_records")
    if not records:
        return None
    payload_idx = secrets.layout.payload_indices
    bases, _ = records[0]
    return float((bases[payload_idx] == 0).mean())


def run_tamper_experiment(
    config: ExperimentConfig, instance: ProtocolInstance | None = None
) -> ExperimentReport:
    """Active adversary: count acceptances against the detection bound."""
    if config.scenario != "tamper":
        raise ValueError("config.scenario must be 'tamper'")
    if instance is None:
        instance, dist = build_instance(config)
    else:
        dist = parse_dist(config.dist)
    strategy = make_strategy(config.strategy)
    accepted = 0
    proxies = []
    outcomes = []
    for index in range(config.trials):
        rng = trial_rng(config.master_seed, index)
        message = int(dist.sample(rng))
        bundle, secrets = instance.store(message, rng)
        instance.apply_noise(bundle, rng)
        tampered, transcript = _apply_strategy(strategy, bundle, instance.params, rng)
        out = instance.retrieve(tampered, secrets, rng)
        if out.omega == 1:
            accepted += 1
            proxy = _eve_payload_proxy(transcript, secrets)
            if proxy is not None:
                proxies.append(proxy)
        outcomes.append((out.omega, out.abort_reason))
    low, high = wilson_interval(accepted, config.trials)
    bound_name, bound = tamper_acceptance_bound(instance.params, strategy)
    extras = {}
    if proxies:
        extras["payload_fraction_learned_given_acc"] = repr(float(np.mean(proxies)))
    return ExperimentReport(
        scenario=config.scenario,
        strategy=config.strategy,
        trials=config.trials,
        master_seed=config.master_seed,
        event_name="acceptance_under_attack",
        event_count=accepted,
        frequency=accepted / config.trials,
        wilson_low=low,
        wilson_high=high,
        bound_name=bound_name,
        bound_value=bound,
        verdict=_verdict(bound, low),
        params_summary=_params_summary(instance.params),
        extras=extras,
        outcomes=outcomes,
    )
