"""Recursive delegation: storing the syndrome with the same machinery.

Asymptotically each level shrinks the local key by h/(1-h) and the total
qubit bill converges to l / (1 - 2 h(beta0)).  At desk scale real codes
run far below capacity, so the syndrome exceeds the message and honest
recursion is unprofitable; the chain mechanics still work, as the
two-level run at the end shows.
"""

import numpy as np

from tamperstore.protocol import (
    ProtocolInstance,
    ideal_recursion_accounting,
    recursive_retrieve,
    recursive_store,
)
from tamperstore.randomizer import example1_code

###############################################################################
# The ideal ledger at beta0 = 0.05 for a megabit message.

accounting = ideal_recursion_accounting(0.05, 1e6, residual_threshold=1e3)
print("level  message_bits      qubits     syndrome_bits")
for row in accounting["levels"]:
    print(f"{row['level']:>5}  {row['message_bits']:>12.1f}  {row['qubits']:>10.1f}  "
          f"{row['syndrome_bits']:>13.1f}")
print(f"total qubits: {accounting['total_qubits']:.1f}")
print(f"geometric limit l/(1-2h): {accounting['limit_qubits']:.1f}")
print(f"residual local bits: {accounting['residual_bits']:.1f}")

###############################################################################
# An honest two-level chain.  Profitability checking is disabled on
# purpose: with desk-scale codes the level-two syndrome dwarfs the
# original message, and the error message would say exactly that.

rng = np.random.default_rng(8)
prefix = example1_code(12)
inst = ProtocolInstance.derive(epsilon=0.05, beta0=0.0, ell=4, prefix_code=prefix)

chain = recursive_store(777, inst.params, 2, rng, prefix, check_profitable=False)
print(f"chain depth {chain.depth}, total qubits {chain.total_qubits()}")
for i, level in enumerate(chain.levels, start=1):
    delegated = "delegated" if level.delegated_syndrome else "kept locally"
    print(f"  level {i}: code {level.params.code_name}, message l0 = "
          f"{level.params.ell0}, syndrome {level.params.syndrome_len} bits ({delegated})")
print(f"local bits across the chain: {chain.local_bits()}")

out = recursive_retrieve(chain, prefix, rng)
print(f"unwound retrieval: omega = {out.omega}, message = {out.message}")
