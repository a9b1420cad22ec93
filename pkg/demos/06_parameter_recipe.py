"""The finite-size parameter recipe and the asymptotic ratios.

Sweeps the security target and channel error rate, showing which code the
registry picks, how many qubits a session costs, and how the plugged-back
bounds always land at or under the target.  Ends with the asymptotic
ratios that the finite instances crawl toward.
"""

from tamperstore.params import (
    InfeasibleParamsError,
    asymptotic_rates,
    correctness_bound,
    derive_params,
    ideal_code_scaling,
    security_bound,
)

###############################################################################
# Desk-scale derivations.  The registry's concatenated family tops out
# around a guaranteed radius fraction of 1/8, so channel rates much above
# 9% are reported as infeasible rather than silently weakened.

print(f"{'eps':>6} {'beta0':>6} | {'code':>18} {'n':>6} {'r':>6} "
      f"{'beta+nu':>8} {'delta_c':>9} {'security':>9}")
for eps in (0.05, 0.01):
    for beta0 in (0.0, 0.02, 0.05, 0.08, 0.1):
        try:
            p = derive_params(eps, beta0, ell=4)
            print(f"{eps:>6} {beta0:>6} | {p.code_name:>18} {p.n:>6} {p.r:>6} "
                  f"{p.beta + p.nu:>8.4f} {correctness_bound(p):>9.4f} "
                  f"{security_bound(p):>9.4f}")
        except InfeasibleParamsError as exc:
            print(f"{eps:>6} {beta0:>6} | infeasible: {exc.constraint}")

###############################################################################
# Asymptotics: qubits per message bit, syndrome per message bit, and the
# recursive total; the usefulness threshold is the BB84 noise ceiling.

print("\nbeta0   n/l      syndrome/l  recursive/l")
for beta0 in (0.0, 0.02, 0.05, 0.08, 0.1):
    rates = asymptotic_rates(beta0)
    print(f"{beta0:5.2f}  {rates.n_per_ell:8.4f}  {rates.syndrome_per_ell:9.4f}  "
          f"{rates.recursive_per_ell:10.4f}")
print(f"usefulness threshold: beta0 = {asymptotic_rates(0.05).qkd_threshold:.6f}")

###############################################################################
# With ideal capacity-rate codes the finite-size overhead melts away as
# the message grows; the trap-scaling exponent controls how fast.

for alpha in (0.5, 1.0):
    rows = ideal_code_scaling(0.05, 0.05, alpha, [10**3, 10**4, 10**5, 10**6])
    ratios = ", ".join(f"{row['n_per_ell']:.4f}" for row in rows)
    print(f"alpha = {alpha}: n/l over growing lengths -> {ratios}")
print(f"capacity limit: {asymptotic_rates(0.05).n_per_ell:.4f}")
