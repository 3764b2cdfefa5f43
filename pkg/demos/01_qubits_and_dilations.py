"""Qubit states in the x-z plane, and measurements modelled as reversible unitaries."""
from math import pi

import numpy as np

from ewfcheck.quantum import (basis_state, born, fidelity, make_bloch_state, measurement_dilation,
                              mix, partial_trace, pauli_xz_measurement, tensor, trace_distance)

psi = make_bloch_state(pi / 4)          # cos(pi/8)|0> + sin(pi/8)|1>
print("amplitudes:", psi.amplitudes.real)

Z = pauli_xz_measurement(0.0)            # angle 0 is Z, pi/2 is X
X = pauli_xz_measurement(pi / 2)
print("p(Z outcome):", born(psi, Z))     # [cos^2(pi/8), sin^2(pi/8)]
print("p(X outcome):", born(psi, X))

# overlaps only depend on the angle difference
for t in (0, pi / 2, pi):
    print(f"|<P_0|P_{t:.3f}>|^2 = {fidelity(make_bloch_state(0), make_bloch_state(t)):.6f}")

# a friend's measurement as a unitary on system (x) memory
U = measurement_dilation(Z)
before = tensor(psi, basis_state(2, 0))
after = U(before)
memory = partial_trace(after.density().matrix, (2, 2), keep=[1])
print("memory populations:", np.diag(memory).real)   # same as the Born probabilities

# the superobserver undoes it exactly
print("fidelity after undo:", fidelity(U.dagger(after), before))

# two different ensembles, one density matrix
P = {k: make_bloch_state(k * pi / 4) for k in (1, 3, 5, 7)}
left = mix([(0.5, P[1]), (0.5, P[5])])
right = mix([(0.5, P[3]), (0.5, P[7])])
print("trace distance of the two mixtures:", trace_distance(left, right))
