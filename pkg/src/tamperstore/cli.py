"""Command-line surface.

Subcommands: params, store, retrieve, simulate, attack-support, rates,
selftest.  Exit status 0 on success, 1 on usage or configuration errors,
2 when selftest finds a bound violation.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from pathlib import Path

import numpy as np

from . import kv
from .attack_lab import bb84_toy, best_permutation, load_scheme, advantage_floor, run_support
from .entropy import example1, load_distribution, uniform
from .experiments import (
    ExperimentConfig,
    build_instance,
    parse_dist,
    prefix_code_for,
    run_correctness_experiment,
    run_tamper_experiment,
)
from .gf2 import GF2Field, phi
from .linear_code import default_registry, hamming_code
from .mac import MacKey, forgery_bound, tag as mac_tag
from .params import (
    InfeasibleParamsError,
    ProtocolParams,
    asymptotic_rates,
    correctness_bound,
    derive_params,
    security_bound,
)
from .protocol import (
    ProtocolInstance,
    RecursionUnprofitableError,
    ServerBundle,
    ClientSecrets,
    recursive_store,
    retrieve as protocol_retrieve,
    store as protocol_store,
)
from .randomizer import PrefixCode, build_prefix_code

USAGE_EXIT = 1
VIOLATION_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _out_dir(value: str | None) -> Path:
    base = value or os.environ.get("TAMPERSTORE_OUT") or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _params_to_kv(params: ProtocolParams) -> dict:
    return {
        "epsilon": params.epsilon,
        "eps0": params.eps0,
        "eps_mac": params.eps_mac,
        "eps_qp": params.eps_qp,
        "beta0": params.beta0,
        "beta": params.beta,
        "nu": params.nu,
        "r": params.r,
        "n": params.n,
        "kappa": params.kappa,
        "ell": params.ell,
        "ell0": params.ell0,
        "d": params.d,
        "lam": params.lam,
        "code_name": params.code_name,
        "delta": params.delta,
        "correctness_bound": correctness_bound(params),
        "security_bound": security_bound(params),
    }


def _params_from_kv(mapping: dict) -> ProtocolParams:
    names = (
        "epsilon eps0 eps_mac eps_qp beta0 beta nu r n kappa ell ell0 d lam code_name"
    ).split()
    return ProtocolParams(**{name: mapping[name] for name in names})


def _cmd_params(args) -> int:
    params = derive_params(args.epsilon, args.ber, args.ell, ell0=args.ell0)
    text = kv.dumps("params", _params_to_kv(params))
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def _load_message(args) -> int:
    if args.message is not None:
        return args.message
    if args.message_file:
        return int(Path(args.message_file).read_text().split()[0], 0)
    raise InfeasibleParamsError("no message given (use --message or --message-file)", "cli")


def _dist_spec(args) -> str:
    if args.dist_file:
        return f"file:{args.dist_file}"
    return args.dist


def _cmd_store(args) -> int:
    spec = _dist_spec(args)
    prefix = prefix_code_for(spec)
    params = derive_params(args.epsilon, args.ber, args.ell, ell0=prefix.max_len)
    registry = default_registry()
    code = registry.by_name(params.code_name)
    message = _load_message(args)
    rng = np.random.default_rng(args.seed)
    out = _out_dir(args.out)
    prefix.dump(out / "prefix_code.txt")
    kv.dump(out / "params.txt", "params", _params_to_kv(params))
    if args.depth > 1:
        chain = recursive_store(
            message, params, args.depth, rng, prefix,
            check_profitable=not args.force_unprofitable,
        )
        for i, level in enumerate(chain.levels, start=1):
            level.bundle.dump(out / f"bundle_level{i}.txt")
            level.secrets.dump(out / f"secrets_level{i}.txt")
            kv.dump(out / f"params_level{i}.txt", "params", _params_to_kv(level.params))
        print(f"stored message at depth {chain.depth}; qubits: {chain.total_qubits()}, "
              f"local bits: {chain.local_bits()}")
        return 0
    bundle, secrets = protocol_store(message, params, code, prefix, rng)
    bundle.dump(out / "bundle.txt")
    secrets.dump(out / "secrets.txt")
    print(f"stored message {message}: bundle.txt, secrets.txt, params.txt, "
          f"prefix_code.txt in {out}")
    print(f"qubits: {params.n + params.r}, local bits: {secrets.storage_bits()}")
    return 0


def _cmd_retrieve(args) -> int:
    out = _out_dir(args.out)
    _, mapping = kv.load(out / "params.txt")
    params = _params_from_kv(mapping)
    code = default_registry().by_name(params.code_name)
    prefix = PrefixCode.load(out / "prefix_code.txt")
    bundle = ServerBundle.load(out / "bundle.txt")
    secrets = ClientSecrets.load(out / "secrets.txt")
    rng = np.random.default_rng(args.seed)
    outcome = protocol_retrieve(bundle, secrets, params, code, prefix, rng)
    print(f"omega = {outcome.omega}, abort_reason = {outcome.abort_reason}, "
          f"message = {outcome.message}")
    return 0


def _cmd_simulate(args) -> int:
    config = ExperimentConfig(
        scenario=args.scenario,
        epsilon=args.epsilon,
        beta0=args.ber,
        ell=args.ell,
        dist=_dist_spec(args),
        strategy=args.strategy,
        trials=args.trials,
        master_seed=args.seed,
    )
    runner = run_correctness_experiment if args.scenario == "correctness" else run_tamper_experiment
    report = runner(config)
    print(f"{report.scenario} [{report.strategy}]: {report.event_name} "
          f"{report.event_count}/{report.trials} = {report.frequency:.6f}")
    print(f"wilson95 = [{report.wilson_low:.6f}, {report.wilson_high:.6f}], "
          f"{report.bound_name} = {report.bound_value:.6g} -> {report.verdict}")
    if args.out:
        report.to_csv(args.out)
        print(f"report written to {args.out}")
    return 0


def _cmd_attack_support(args) -> int:
    if args.scheme == "toy-bb84":
        scheme = bb84_toy(2, 1)
    elif os.path.exists(args.scheme):
        scheme = load_scheme(args.scheme)
    else:
        raise InfeasibleParamsError(f"unknown scheme {args.scheme!r}", "cli")
    report = run_support(scheme)
    floor = advantage_floor(
        report.p_star, len(scheme.keys), len(scheme.messages)
    )
    print(f"scheme = {report.scheme}, m* = {report.m_star}, p* = {report.p_star}")
    print(f"Pr[WIN] = {report.pr_win:.9f}")
    print(f"Pr[acc] = {report.pr_acc:.9f}")
    print(f"Pr[WIN|acc] = {report.pr_win_given_acc:.9f}")
    print(f"advantage = {report.advantage:.9f} (guaranteed floor {floor:.9f})")
    if args.out:
        report.to_csv(args.out)
        print(f"per-(message,key) rows written to {args.out}")
    return 0


def _cmd_rates(args) -> int:
    if args.ber_max is not None:
        points = np.linspace(args.ber, args.ber_max, args.steps)
    else:
        points = [args.ber]
    lines = ["beta0,n_per_ell,syndrome_per_ell,recursive_per_ell"]
    for beta0 in points:
        rates = asymptotic_rates(float(beta0))
        rec = "inf" if not np.isfinite(rates.recursive_per_ell) else f"{rates.recursive_per_ell:.6f}"
        lines.append(f"{float(beta0):.6f},{rates.n_per_ell:.6f},{rates.syndrome_per_ell:.6f},{rec}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def _selftest_checks():
    # universal hash exactness, exhaustively over GF(2^3)
    field = GF2Field(3)
    ok = True
    for l in (1, 2, 3):
        expected = 8 >> l
        for x, xp in itertools.combinations(range(8), 2):
            hits = sum(
                phi(field.element(w), field.element(x), l)
                == phi(field.element(w), field.element(xp), l)
                for w in range(8)
            )
            ok &= hits == expected
    yield "universal-hash-exact", ok, "collision count 2^(nu-l) for every pair"

    # one-time MAC forgery bound, exhaustively at lam = 4
    lam, msg_bits = 4, 8
    worst = 0
    keys = [MacKey(a, b, lam) for a in range(16) for b in range(16)]
    from .bits import Bits

    msg = Bits.from_01("10110100")
    theta = {k: mac_tag(k, msg) for k in keys}
    for target in range(1 << msg_bits):
        if target == msg.value:
            continue
        forged = Bits(target, msg_bits)
        best = {}
        for k in keys:  # 16 keys share each observed tag; count forgery hits
            pair = (theta[k], mac_tag(k, forged))
            best[pair] = best.get(pair, 0) + 1
        worst = max(worst, max(best.values()))
    ok = worst / 16 <= forgery_bound(lam, msg_bits)
    yield "mac-forgery-exhaustive", ok, f"worst class {worst}/16 vs bound {forgery_bound(lam, msg_bits)}"

    # syndrome decoding within the guaranteed radius
    code = hamming_code(3)
    from .bits import Bits as B

    ok = all(
        code.syn_dec(code.syn(B(1 << i, 7))) == B(1 << i, 7) for i in range(7)
    ) and code.syn_dec(B.zeros(3)) == B.zeros(7)
    yield "hamming-exhaustive-decode", ok, "all single-bit patterns"

    # support attack on the toy scheme
    report = run_support(bb84_toy(2, 1))
    floor = advantage_floor(report.p_star, 2, 4)
    ok = (
        abs(report.win_and_acc_given_star - 1) <= 1e-10
        and report.pr_acc >= report.p_star - 1e-10
        and report.advantage >= floor - 1e-9
    )
    yield "support-attack-exact", ok, f"advantage {report.advantage:.4f} >= floor {floor:.4f}"

    # parameter recipe plug-backs
    params = derive_params(0.05, 0.05, 4, ell0=13)
    ok = (
        correctness_bound(params) <= params.epsilon
        and security_bound(params) <= params.epsilon + 1e-9
        and abs(params.delta - params.epsilon / 8) <= 1e-9
    )
    yield "recipe-plug-backs", ok, (
        f"delta_c = {correctness_bound(params):.4f}, security = {security_bound(params):.4f}"
    )

    # asymptotics
    rates = asymptotic_rates(0.05)
    ok = (
        abs(rates.n_per_ell - 1.4014) <= 1e-3
        and abs(rates.syndrome_per_ell - 0.4014) <= 1e-3
        and abs(rates.recursive_per_ell - 2.3412) <= 1e-3
        and abs(rates.qkd_threshold - 0.110028) <= 1e-6
    )
    yield "asymptotic-rates", ok, f"threshold {rates.qkd_threshold:.6f}"


def _cmd_selftest(args) -> int:
    failures = 0
    for name, ok, detail in _selftest_checks():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += not ok
    if failures:
        print(f"{failures} bound violation(s)")
        return VIOLATION_EXIT
    print("all selftest checks passed")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="tamperstore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derive protocol parameters", parents=[])
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--ber", type=float, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--ell0", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_params)

    p = sub.add_parser("store", help="run the storage phase, write a session dir")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--ber", type=float, required=True)
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--dist", default="example1:12")
    p.add_argument("--dist-file", default=None)
    p.add_argument("--message", type=int, default=None)
    p.add_argument("--message-file", default=None)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--depth", type=int, default=1, help="recursive delegation levels")
    p.add_argument("--force-unprofitable", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_store)

    p = sub.add_parser("retrieve", help="run the retrieval phase from a session dir")
    p.add_argument("--seed", type=int, default=4048)
    p.add_argument("--out", default=None, help="session dir written by store")
    p.set_defaults(func=_cmd_retrieve)

    p = sub.add_parser("simulate", help="Monte-Carlo bound-consistency runs")
    p.add_argument("--scenario", choices=("correctness", "tamper"), default="correctness")
    p.add_argument("--strategy", default="passive",
                   help="passive, intercept-resend[/policy], flip-c[/bit]")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--ber", type=float, required=True)
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--dist", default="example1:12")
    p.add_argument("--dist-file", default=None)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("attack-support", help="exact support-measurement attack report")
    p.add_argument("--scheme", default="toy-bb84")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_attack_support)

    p = sub.add_parser("rates", help="asymptotic ratios as CSV")
    p.add_argument("--ber", type=float, required=True)
    p.add_argument("--ber-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    except (InfeasibleParamsError, RecursionUnprofitableError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
