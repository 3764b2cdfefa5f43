"""The single-system protocol: Alice prepares, two friends measure, two superobservers
may undo them. Does one joint distribution over a, b, c, d exist?"""
from math import pi

from ewfcheck.scenarios import OFConfig, eve_tap_run, run_of_scenario
from ewfcheck.verifier import verify_of_theorem

cfg = OFConfig()   # preparations at pi/4, 5pi/4; Charlie at 3pi/4; Debbie Z; Bob X
behavior = run_of_scenario(cfg)
print(behavior.to_pretty())

# Eve copies Charlie's record and never gives it back. Given her copy, nothing
# Alice does changes what Debbie sees:
for x in (0, 1):
    cond = eve_tap_run(cfg, x, 0, tap=("c", "d")).conditional(["d"], ["c"])
    print(f"p(d|c, x={x}) =", cond.round(6).tolist())

report = verify_of_theorem(cfg)
print("largest premise deviation:", report.max_premise_diff)
print("CHSH of the pairwise tables:", report.chsh)
print("verdict:", report.verdict.value)

# move Charlie and Debbie onto the preparation basis: now a joint exists
relaxed = verify_of_theorem(OFConfig(charlie_basis_angle=pi / 4, debbie_basis_angle=pi / 4))
print("aligned with the preparations:", relaxed.verdict.value, round(relaxed.chsh, 9))
