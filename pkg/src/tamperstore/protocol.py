"""The delegated-storage state machines: store, retrieve, usefulness
accounting, and recursive delegation.

``store`` runs the five preparation steps (compress, randomise, encode
into qubits with hidden traps, extract a one-time pad and syndrome, tag)
and returns the server bundle next to the client secrets; everything else
is discarded.  ``retrieve`` runs the four testing/decryption steps against
a possibly tampered bundle and returns an outcome flag instead of raising:
aborts are regular results.

Variable homes (the classical state of one session):
  server bundle   w, u, c, theta, qubit register
  client secrets  mac key, trap layout, trap values v, syndrome s, m_nabla
  discarded       xi, x, z, p, m, m0 and every other intermediate
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kv
from .bits import Bits
from .entropy import binary_entropy
from .gf2 import FieldElement, GF2Field
from .linear_code import CodeRegistry, LinearCode, default_registry
from .mac import MacKey, tag, verify
from .params import InfeasibleParamsError, ProtocolParams, derive_params
from .qsim import QubitRegister, TrapLayout, apply_storage_noise, measure, prepare
from .randomizer import ParseError, PrefixCode, compress, decompress, derandomize, randomize

BUNDLE_VARS = ("w", "u", "c", "theta", "register")
SECRET_VARS = ("mac_key", "layout", "v", "s", "m_nabla")
DISCARDED_VARS = ("xi", "x", "z", "p", "m", "m0", "mu")


class RecursionUnprofitableError(ValueError):
    """A delegation level whose syndrome is no smaller than its message."""


@dataclass(frozen=True)
class ServerBundle:
    """Everything stored remotely.  All of it may come back modified."""

    w: FieldElement
    u: Bits
    c: Bits
    theta: Bits
    register: QubitRegister

    def classical_bits(self) -> Bits:
        """The authenticated transcript w || u || c."""
        return self.w.bits.concat(self.u).concat(self.c)

    def to_kv(self) -> dict:
        return {
            "w": self.w.bits,
            "w_modulus": Bits(self.w.field.modulus, self.w.field.degree + 1),
            "u": self.u,
            "c": self.c,
            "theta": self.theta,
            "register": self.register.to_bytes(),
            "register_note": "simulation checkpoint, not physically transferable",
        }

    @classmethod
    def from_kv(cls, mapping: dict) -> "ServerBundle":
        mod = mapping["w_modulus"]
        field = GF2Field(mod.length - 1, mod.value)
        return cls(
            w=field.element(mapping["w"]),
            u=mapping["u"],
            c=mapping["c"],
            theta=mapping["theta"],
            register=QubitRegister.from_bytes(mapping["register"]),
        )

    def dump(self, path) -> None:
        kv.dump(path, "bundle", self.to_kv())

    @classmethod
    def load(cls, path) -> "ServerBundle":
        kind, mapping = kv.load(path)
        if kind != "bundle":
            raise ValueError(f"expected a bundle file, got {kind!r}")
        return cls.from_kv(mapping)


@dataclass(frozen=True)
class ClientSecrets:
    """Everything kept locally; its bit size is the protocol's whole cost."""

    mac_key: MacKey
    layout: TrapLayout
    v: Bits
    s: Bits | None
    m_nabla: Bits
    code_name: str
    prefix_code_name: str

    def storage_bits(self) -> int:
        """Local key material in bits, counting the trap set positionally."""
        total = self.layout.t.length
        r = self.layout.r
        trap_bits = math.ceil(math.log2(math.comb(total, r))) if 0 < r < total else 0
        syndrome_bits = self.s.length if self.s is not None else 0
        return (
            trap_bits
            + self.v.length
            + syndrome_bits
            + self.mac_key.bit_size
            + self.m_nabla.length
        )

    def to_kv(self) -> dict:
        mapping = {
            "mac_key": self.mac_key.to_bits(),
            "t": self.layout.t,
            "r": self.layout.r,
            "v": self.v,
            "m_nabla": self.m_nabla,
            "code_name": self.code_name,
            "prefix_code_name": self.prefix_code_name,
        }
        if self.s is not None:
            mapping["s"] = self.s
        return mapping

    @classmethod
    def from_kv(cls, mapping: dict) -> "ClientSecrets":
        return cls(
            mac_key=MacKey.from_bits(mapping["mac_key"]),
            layout=TrapLayout(mapping["t"], mapping["r"]),
            v=mapping["v"],
            s=mapping.get("s"),
            m_nabla=mapping["m_nabla"],
            code_name=mapping["code_name"],
            prefix_code_name=mapping["prefix_code_name"],
        )

    def dump(self, path) -> None:
        kv.dump(path, "secrets", self.to_kv())

    @classmethod
    def load(cls, path) -> "ClientSecrets":
        kind, mapping = kv.load(path)
        if kind != "secrets":
            raise ValueError(f"expected a secrets file, got {kind!r}")
        return cls.from_kv(mapping)


@dataclass(frozen=True)
class RetrievalOutcome:
    omega: int
    message: int | None
    abort_reason: str  # "mac", "trap", "decode", or "none"

    def __post_init__(self):
        if (self.omega == 1) != (self.message is not None):
            raise ValueError("message must be present exactly when omega = 1")


def one_time_pad(u: Bits, x: Bits, ell: int, field: GF2Field) -> Bits:
    """z = first ell bits of u * x in GF(2^n); the seed may be zero."""
    if u.length != field.degree or x.length != field.degree:
        raise ValueError("seed and payload must both have the field degree")
    return Bits(field.mul_int(u.value, x.value) & ((1 << ell) - 1), ell)


def _check_shapes(params: ProtocolParams, code: LinearCode, prefix_code: PrefixCode | None):
    params.validate()
    if code.n != params.n or code.kappa != params.kappa:
        raise ValueError(
            f"code {code.name} is ({code.n},{code.kappa}); params want "
            f"({params.n},{params.kappa})"
        )
    if prefix_code is not None and prefix_code.max_len != params.ell0:
        raise ValueError(
            f"prefix code pads to {prefix_code.max_len}, params.ell0 = {params.ell0}"
        )


def _store_padded(
    m0: Bits,
    params: ProtocolParams,
    code: LinearCode,
    rng: np.random.Generator,
    prefix_code_name: str,
) -> tuple[ServerBundle, ClientSecrets]:
    seed_field = GF2Field(params.ell0)
    w = seed_field.random_nonzero(rng)
    rm = randomize(m0, w, params.ell)

    total = params.n + params.r
    xi = Bits.random(total, rng)
    layout = TrapLayout.random(total, params.r, rng)
    v, x = layout.split(xi)
    register = prepare(xi, layout.t, params.r)

    u = Bits.random(params.d, rng)
    s = code.syn(x)
    z = one_time_pad(u, x, params.ell, GF2Field(params.n))
    c = rm.m ^ z

    mac_key = MacKey.random(params.lam, rng)  # fresh key: used for this one tag
    bundle = ServerBundle(
        w=w,
        u=u,
        c=c,
        theta=tag(mac_key, w.bits.concat(u).concat(c)),
        register=register,
    )
    secrets = ClientSecrets(
        mac_key=mac_key,
        layout=layout,
        v=v,
        s=s,
        m_nabla=rm.m_nabla,
        code_name=code.name,
        prefix_code_name=prefix_code_name,
    )
    return bundle, secrets


def store(
    message: int,
    params: ProtocolParams,
    code: LinearCode,
    prefix_code: PrefixCode,
    rng: np.random.Generator,
) -> tuple[ServerBundle, ClientSecrets]:
    """Steps 1-5: compress, randomise, prepare qubits, pad, tag."""
    _check_shapes(params, code, prefix_code)
    m0 = compress(message, prefix_code, rng)
    return _store_padded(m0, params, code, rng, prefix_code.name or "custom")


def _retrieve_padded(
    bundle: ServerBundle,
    secrets: ClientSecrets,
    params: ProtocolParams,
    code: LinearCode,
    rng: np.random.Generator,
) -> tuple[str, Bits | None]:
    """Steps 6-9 up to derandomisation; returns (abort_reason, m0_hat)."""
    if secrets.s is None:
        raise ValueError("syndrome unavailable (delegated and not yet recovered)")
    transcript = bundle.classical_bits()
    if not verify(secrets.mac_key, transcript, bundle.theta):
        return "mac", None

    word = measure(bundle.register, secrets.layout.t, rng)
    v_prime, x_prime = secrets.layout.split(word)
    if (v_prime ^ secrets.v).weight() > params.beta * params.r:
        return "trap", None

    pattern = code.syn_dec(secrets.s ^ code.syn(x_prime))
    if pattern is None:
        return "decode", None
    x_hat = x_prime ^ pattern
    z_hat = one_time_pad(bundle.u, x_hat, params.ell, GF2Field(params.n))
    m_hat = z_hat ^ bundle.c
    m0_hat = derandomize(m_hat, secrets.m_nabla, bundle.w)
    return "none", m0_hat


def retrieve(
    bundle: ServerBundle,
    secrets: ClientSecrets,
    params: ProtocolParams,
    code: LinearCode,
    prefix_code: PrefixCode,
    rng: np.random.Generator,
) -> RetrievalOutcome:
    """Steps 6-9 against a possibly tampered bundle; aborts are outcomes."""
    _check_shapes(params, code, prefix_code)
    reason, m0_hat = _retrieve_padded(bundle, secrets, params, code, rng)
    if reason != "none":
        return RetrievalOutcome(0, None, reason)
    try:
        message = decompress(m0_hat, prefix_code)
    except ParseError:
        # only reachable through tampering that survives every other test
        return RetrievalOutcome(0, None, "decode")
    return RetrievalOutcome(1, message, "none")


# ---------------------------------------------------------------------------
# usefulness accounting
# ---------------------------------------------------------------------------

def usefulness(secrets: ClientSecrets, message_bits: float) -> float:
    """Y = (message bits - locally stored bits) / message bits.

    Positive Y means delegation actually saves storage; callers should
    treat Y <= 0 as "not useful".
    """
    if message_bits <= 0:
        raise ValueError("message_bits must be positive")
    return (message_bits - secrets.storage_bits()) / message_bits


def usefulness_cardinality(secrets: ClientSecrets, message_space: int) -> float:
    """The set-size reading (|M| - |K|) / |M|, exposed for completeness.

    With |K| = 2^(stored bits) this is essentially 1 whenever the key is
    even a single bit shorter than the message, which is why the bit-length
    reading above is the operative one.
    """
    keys = 2 ** secrets.storage_bits()
    return (message_space - keys) / message_space


def ideal_usefulness(beta0: float) -> float:
    """Asymptotic Y when only the syndrome counts: 1 - h/(1-h)."""
    h = binary_entropy(beta0)
    return 1 - h / (1 - h)


# ---------------------------------------------------------------------------
# recursive delegation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DelegationLevel:
    bundle: ServerBundle
    secrets: ClientSecrets  # syndrome stripped on every level but the deepest
    params: ProtocolParams
    delegated_syndrome: bool


@dataclass(frozen=True)
class DelegationChain:
    levels: list[DelegationLevel]
    prefix_code_name: str

    @property
    def depth(self) -> int:
        return len(self.levels)

    def total_qubits(self) -> int:
        return sum(lv.params.n + lv.params.r for lv in self.levels)

    def local_bits(self) -> int:
        return sum(lv.secrets.storage_bits() for lv in self.levels)


def recursive_store(
    message: int,
    params: ProtocolParams,
    depth: int,
    rng: np.random.Generator,
    prefix_code: PrefixCode,
    registry: CodeRegistry | None = None,
    check_profitable: bool = True,
) -> DelegationChain:
    """Store the message, then delegate each level's syndrome to the next.

    Level i >= 2 treats the previous syndrome (a uniform bit string, since
    the parity map has full rank) as its message, with identity
    compression.  With ``check_profitable`` a level whose syndrome is not
    smaller than its own message raises: at desk scale real codes have
    rate far below 1/2, so recursion only pays off asymptotically - see
    ``ideal_recursion_accounting`` for that regime.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    registry = registry or default_registry()
    code = registry.by_name(params.code_name)
    _check_shapes(params, code, prefix_code)
    m0 = compress(message, prefix_code, rng)
    levels: list[DelegationLevel] = []
    level_params = params
    message_bits = params.ell0
    for level in range(depth):
        bundle, secrets = _store_padded(
            m0, level_params, code, rng,
            prefix_code.name if level == 0 else "identity",
        )
        last = level == depth - 1
        syndrome = secrets.s
        if check_profitable and not last and syndrome.length >= message_bits:
            raise RecursionUnprofitableError(
                f"level {level + 1} syndrome has {syndrome.length} bits, its "
                f"message only {message_bits}; delegation would grow storage"
            )
        levels.append(
            DelegationLevel(
                bundle=bundle,
                secrets=secrets if last else replace(secrets, s=None),
                params=level_params,
                delegated_syndrome=not last,
            )
        )
        if last:
            break
        message_bits = syndrome.length
        ell_next = min(level_params.ell, syndrome.length)
        level_params = derive_params(
            level_params.epsilon,
            level_params.beta0,
            ell_next,
            ell0=syndrome.length,
            registry=registry,
        )
        code = registry.by_name(level_params.code_name)
        m0 = syndrome
    return DelegationChain(levels, prefix_code.name)


def recursive_retrieve(
    chain: DelegationChain,
    prefix_code: PrefixCode,
    rng: np.random.Generator,
    registry: CodeRegistry | None = None,
) -> RetrievalOutcome:
    """Unwind the chain from the deepest level back to the message."""
    registry = registry or default_registry()
    recovered: Bits | None = None
    for index in range(chain.depth - 1, -1, -1):
        level = chain.levels[index]
        secrets = level.secrets
        if level.delegated_syndrome:
            if recovered is None:
                raise ValueError("missing recovered syndrome for a delegated level")
            secrets = replace(secrets, s=recovered)
        code = registry.by_name(level.params.code_name)
        reason, m0_hat = _retrieve_padded(level.bundle, secrets, level.params, code, rng)
        if reason != "none":
            return RetrievalOutcome(0, None, reason)
        recovered = m0_hat
    try:
        message = decompress(recovered, prefix_code)
    except ParseError:
        return RetrievalOutcome(0, None, "decode")
    return RetrievalOutcome(1, message, "none")


def ideal_recursion_accounting(
    beta0: float,
    ell: float,
    residual_threshold: float | None = None,
    depth: int | None = None,
) -> dict:
    """Geometric bookkeeping of the recursion with capacity-rate codes.

    Each level stores a message of m_i bits with m_i/(1 - h) qubits and
    leaves a syndrome of m_i * h/(1 - h) bits for the next level.  Stops
    after ``depth`` levels or when the residual drops under the threshold.
    """
    if depth is None and residual_threshold is None:
        raise ValueError("need a stopping rule")
    h = binary_entropy(beta0)
    if 1 - 2 * h <= 0:
        raise ValueError("beta0 at or above the usefulness threshold")
    g = h / (1 - h)
    rows = []
    message_bits = float(ell)
    total_qubits = 0.0
    level = 0
    while True:
        level += 1
        qubits = message_bits / (1 - h)
        syndrome = message_bits * g
        total_qubits += qubits
        rows.append(
            {
                "level": level,
                "message_bits": message_bits,
                "qubits": qubits,
                "syndrome_bits": syndrome,
            }
        )
        message_bits = syndrome
        if depth is not None and level >= depth:
            break
        if residual_threshold is not None and message_bits < residual_threshold:
            break
    return {
        "levels": rows,
        "total_qubits": total_qubits,
        "residual_bits": message_bits,
        "limit_qubits": ell / (1 - 2 * h),
    }


# ---------------------------------------------------------------------------
# session convenience wrapper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolInstance:
    """A parameter set, code, and prefix code wired together."""

    params: ProtocolParams
    code: LinearCode
    prefix_code: PrefixCode

    @classmethod
    def derive(
        cls,
        epsilon: float,
        beta0: float,
        ell: int,
        prefix_code: PrefixCode,
        registry: CodeRegistry | None = None,
    ) -> "ProtocolInstance":
        registry = registry or default_registry()
        params = derive_params(
            epsilon, beta0, ell, ell0=prefix_code.max_len, registry=registry
        )
        return cls(params, registry.by_name(params.code_name), prefix_code)

    def store(self, message: int, rng: np.random.Generator):
        return store(message, self.params, self.code, self.prefix_code, rng)

    def apply_noise(self, bundle: ServerBundle, rng: np.random.Generator) -> None:
        if self.params.beta0 > 0:
            apply_storage_noise(bundle.register, self.params.beta0, rng)

    def retrieve(self, bundle, secrets, rng: np.random.Generator) -> RetrievalOutcome:
        return retrieve(bundle, secrets, self.params, self.code, self.prefix_code, rng)
