"""Two labs sharing a singlet. The same question, now with spacelike-separated friends."""
from ewfcheck.polytope import correlators
from ewfcheck.quantum import basis_state, tensor
from ewfcheck.scenarios import LFConfig, run_lf_scenario
from ewfcheck.verifier import verify_lf_theorem

b = run_lf_scenario()
print("correlators E[x, y]:")
print(correlators(b).round(6))

rep = verify_lf_theorem()
print(rep.verdict.value, "CHSH =", rep.chsh)
print("certificate checks out:", rep.certificate_valid)

# without entanglement the pairwise tables are explained by one joint distribution
product = LFConfig(shared_state=tensor(basis_state(2, 0), basis_state(2, 0)))
print("product state:", verify_lf_theorem(product).verdict.value)
