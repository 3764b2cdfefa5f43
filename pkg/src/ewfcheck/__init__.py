"""Numerical verification of extended Wigner's friend no-go arguments.

Exact simulation of the Local Friendliness (LF) and Operational Friendliness
(OF) protocols, Eve-mode checks of every agency premise, and marginal-problem
LPs with checkable infeasibility certificates.
"""
from .behavior import Behavior, JointDistribution
from .marginal_lp import (FeasibilityResult, MarginalConstraintSet, fine_check, lp_feasibility,
                          validate_certificate)
from .polytope import (DeterministicStrategy, ScenarioShape, chsh_value, enumerate_vertices,
                       membership, nc_inequality_value)
from .quantum import (DensityOperator, ProjectiveMeasurement, PureState, UnitaryOp, born,
                      make_bloch_state, measurement_dilation, mix, pauli_xz_measurement, tensor)
from .scenarios import (ExtendedOFConfig, LFConfig, OFConfig, check_preparation_equivalence,
                        eve_tap_run, run_extended_of_scenario, run_lf_scenario, run_of_scenario)
from .verifier import (AgencyCheck, ContradictionReport, Verdict, construct_witness_distribution,
                       identify_of_marginals, verify_appendix_b, verify_lf_theorem,
                       verify_of_theorem)

__version__ = "0.1.0"
