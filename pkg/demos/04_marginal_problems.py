"""Marginal problems by linear programming, with answers you can re-check by hand."""
import numpy as np

from ewfcheck.marginal_lp import MarginalConstraintSet, fine_check, lp_feasibility, validate_certificate

same = np.array([0.5, 0, 0, 0.5])     # perfectly correlated bits
diff = np.array([0, 0.5, 0.5, 0])     # perfectly anticorrelated bits

# a = b, a = d, c = b, c = d: fine
print("all equal:", fine_check(same, same, same, same).feasible)

# ...but a != b with the other three equal is a contradiction
res = fine_check(diff, same, same, same)
print("one odd pair:", res.feasible)
print("Farkas certificate:", res.certificate.round(3))
print("margin:", res.slack)

# any marginal problem works, not just the four-cycle
cs = MarginalConstraintSet(
    variables=[("u", 3), ("v", 2)],
    constraints=[(("u",), [0.2, 0.3, 0.5]), (("v",), [0.6, 0.4])])
sol = lp_feasibility(cs)
print("independent product witness:", sol.witness.reshape(3, 2).round(3))
print("re-validated:", validate_certificate(cs, sol))
