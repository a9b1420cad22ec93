"""The support-measurement attack, computed exactly.

Without the randomisation stage, a skewed message prior is fatal: the
attacker projects onto the support of the likeliest message's possible
encryptions.  A right guess never disturbs the state, so detection only
triggers where the attack already lost.  The numbers below are exact
linear algebra on a two-qubit scheme.
"""

import numpy as np

from tamperstore.attack_lab import (
    bb84_toy,
    best_permutation,
    classical_otp_toy,
    permutation_average_win_given_not_star,
    advantage_floor,
    run_support,
    fixed_advantage_witness,
)

###############################################################################
# Two message bits, one shared basis bit: |M| = 4, |K| = 2.

scheme = bb84_toy(2, 1)
report = run_support(scheme)
print(f"scheme {report.scheme}, uniform prior, m* = {report.m_star}")
print(f"  Pr[WIN and acc | m = m*] = {report.win_and_acc_given_star:.12f}")
print(f"  Pr[acc]       = {report.pr_acc:.6f}  (never below p* = {report.p_star})")
print(f"  Pr[WIN | acc] = {report.pr_win_given_acc:.6f}")
print(f"  advantage     = {report.advantage:.6f}")

###############################################################################
# A skewed prior with the best message placement: the advantage stays
# above the guaranteed floor p*(1-p*)(1 - |K|/|M|).

probs = np.array([0.5, 0.25, 0.125, 0.125])
perm, advantage, info = best_permutation(scheme, probs)
floor = advantage_floor(0.5, len(scheme.keys), len(scheme.messages))
print(f"skewed prior, best of {info['messages']}! placements: "
      f"advantage {advantage:.6f} >= floor {floor:.6f}")

average = permutation_average_win_given_not_star(scheme, probs)
print(f"average over placements of Pr[WIN | M != m*] = {average:.4f} "
      f">= 1 - |K|/|M| = {1 - 0.5}")

###############################################################################
# A one-time pad with a full-length key is immune: the supports cover
# everything and the floor degenerates to zero.

otp = classical_otp_toy(2)
_, otp_advantage, _ = best_permutation(otp, np.full(4, 0.25))
print(f"classical one-time pad: floor {advantage_floor(0.25, 4, 4)}, "
      f"measured advantage {otp_advantage:.2e}")

###############################################################################
# The no-go angle: fix the key-to-message ratio and grow the message.
# The floor does not shrink, so no security level below it is reachable.

witness = fixed_advantage_witness(0.5, qubit_sizes=(2, 3, 4))
print(f"key fraction 1/2 across sizes (floor {witness['floor']}):")
for row in witness["rows"]:
    print(f"  |M| = {row['messages']:3d}, |K| = {row['keys']:3d}: "
          f"measured advantage {row['measured_advantage']:.4f}")
