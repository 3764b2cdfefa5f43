"""Friendliness versus noncontextuality.

Give each superobserver a third choice. The extra data break a noncontextual
story, while the friend-based premises are still met.
"""
from math import pi

from ewfcheck.polytope import nc_inequality_value, prepare_measure_behavior
from ewfcheck.quantum import make_bloch_state, pauli_xz_measurement
from ewfcheck.verifier import verify_appendix_b

# the four-state, two-measurement prepare-and-measure scenario
states = [make_bloch_state(t) for t in (pi / 4, 5 * pi / 4, 3 * pi / 4, 7 * pi / 4)]
pm = prepare_measure_behavior(states, [pauli_xz_measurement(pi / 2), pauli_xz_measurement(0.0)])
print("noncontextuality value (classical bound 2):", nc_inequality_value(pm))

rep = verify_appendix_b()
print("Eve's view, with and without the extra rotation:")
for k, v in rep.eve_gaps.items():
    print(f"  {k}: {v:.9f}")
print("x,y in {1,2} block inside the local polytope:", rep.restricted_membership.feasible,
      f"(CHSH {rep.restricted_chsh:.9f})")
print("friend-based marginals admit a joint:", rep.of_result.feasible)
print("witness constraints satisfied:", all(c.passed for c in rep.witness_checks))
print("verdict:", rep.verdict.value)
