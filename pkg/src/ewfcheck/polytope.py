"""Local (and, via the Bell <-> prepare-and-measure map, noncontextual) polytopes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .behavior import Behavior
from .marginal_lp import FeasibilityResult, MarginalConstraintSet, lp_feasibility
from .quantum import ProjectiveMeasurement, PureState, born

MAX_VERTICES = 10 ** 6
EQUIV_TOL = 1e-9
DEFAULT_SIGNS = (1, -1)


class ShapeError(ValueError):
    pass


class EquivalenceError(ValueError):
    """The preparations do not satisfy the mixing equivalence the mapping relies on."""


@dataclass(frozen=True)
class ScenarioShape:
    n_settings_alice: int = 2
    n_settings_bob: int = 2
    n_outcomes_alice: int = 2
    n_outcomes_bob: int = 2

    def __post_init__(self):
        if min(self.n_settings_alice, self.n_settings_bob,
               self.n_outcomes_alice, self.n_outcomes_bob) < 1:
            raise ShapeError(f"all shape entries must be >= 1: {self}")

    @property
    def n_vertices(self) -> int:
        return (self.n_outcomes_alice ** self.n_settings_alice
                * self.n_outcomes_bob ** self.n_settings_bob)

    @classmethod
    def of(cls, behavior: Behavior) -> "ScenarioShape":
        (_, nx), (_, ny) = behavior.setting_variables
        (_, na), (_, nb) = behavior.outcome_variables
        return cls(nx, ny, na, nb)


@dataclass(frozen=True)
class DeterministicStrategy:
    alice_map: tuple  # alice_map[x] = a
    bob_map: tuple    # bob_map[y] = b

    def behavior(self, shape: ScenarioShape) -> Behavior:
        table = {}
        for x in range(shape.n_settings_alice):
            for y in range(shape.n_settings_bob):
                p = np.zeros((shape.n_outcomes_alice, shape.n_outcomes_bob))
                p[self.alice_map[x], self.bob_map[y]] = 1.0
                table[(x, y)] = p.reshape(-1)
        return Behavior((("x", shape.n_settings_alice), ("y", shape.n_settings_bob)),
                        (("a", shape.n_outcomes_alice), ("b", shape.n_outcomes_bob)), table)


def enumerate_strategies(shape: ScenarioShape) -> list:
    if shape.n_vertices > MAX_VERTICES:
        raise ShapeError(f"{shape.n_vertices} vertices exceeds the cap of {MAX_VERTICES}")
    alice = itertools.product(range(shape.n_outcomes_alice), repeat=shape.n_settings_alice)
    bob = list(itertools.product(range(shape.n_outcomes_bob), repeat=shape.n_settings_bob))
    return [DeterministicStrategy(a, b) for a in alice for b in bob]


def enumerate_vertices(shape: ScenarioShape) -> list:
    """One deterministic Behavior per strategy, in the order of :func:`enumerate_strategies`."""
    return [s.behavior(shape) for s in enumerate_strategies(shape)]


def local_constraint_set(behavior: Behavior, shape: ScenarioShape) -> MarginalConstraintSet:
    """Marginal problem over (a_0..a_{nx-1}, b_0..b_{ny-1}); its joint points are the
    deterministic strategies, so a joint distribution is a vertex weighting."""
    if ScenarioShape.of(behavior) != shape:
        raise ShapeError(f"behavior has shape {ScenarioShape.of(behavior)}, expected {shape}")
    variables = ([(f"a{x}", shape.n_outcomes_alice) for x in range(shape.n_settings_alice)]
                 + [(f"b{y}", shape.n_outcomes_bob) for y in range(shape.n_settings_bob)])
    cons = [((f"a{x}", f"b{y}"), behavior.table[(x, y)])
            for x in range(shape.n_settings_alice) for y in range(shape.n_settings_bob)]
    return MarginalConstraintSet(variables, cons)


def membership(behavior: Behavior, shape: ScenarioShape = None) -> FeasibilityResult:
    """Is ``behavior`` a convex combination of the deterministic vertices?

    On success the witness holds the vertex weights.
    """
    shape = shape or ScenarioShape.of(behavior)
    return lp_feasibility(local_constraint_set(behavior, shape))


def _sign_table(outcome_sign_map, party: str, setting: int) -> np.ndarray:
    if outcome_sign_map is None:
        return np.array(DEFAULT_SIGNS, dtype=float)
    if isinstance(outcome_sign_map, dict):
        return np.array(outcome_sign_map.get((party, setting), DEFAULT_SIGNS), dtype=float)
    return np.array(outcome_sign_map, dtype=float)


def correlators(behavior: Behavior, outcome_sign_map=None) -> np.ndarray:
    """E[x, y] = sum_ab s(a) s(b) p(a, b | x, y) for a 2x2-setting, binary behavior.

    ``outcome_sign_map`` is either one pair of signs for every outcome slot, or a
    dict keyed by ``("A", x)`` / ``("B", y)``; missing keys use (+1, -1).
    """
    if ScenarioShape.of(behavior) != ScenarioShape(2, 2, 2, 2):
        raise ShapeError("CHSH needs two binary-outcome settings per party")
    E = np.zeros((2, 2))
    for x in range(2):
        for y in range(2):
            sa = _sign_table(outcome_sign_map, "A", x)
            sb = _sign_table(outcome_sign_map, "B", y)
            E[x, y] = sa @ behavior.dist(x, y) @ sb
    return E


def chsh_value(behavior: Behavior, outcome_sign_map=None) -> float:
    """max over the 8 facet sign patterns of |sum E - 2 E_k|."""
    E = correlators(behavior, outcome_sign_map).reshape(-1)
    total = E.sum()
    return float(max(abs(total - 2 * e) for e in E))


def prepare_measure_behavior(states: Sequence[PureState],
                             measurements: Sequence[ProjectiveMeasurement]) -> Behavior:
    """Born-rule table p(k | measurement, preparation) for four preparations.

    Preparation index 2*x + a stands for the steered state of Alice's setting x
    and outcome a.
    """
    if len(states) != 4:
        raise ShapeError("the mapping needs four preparations")
    table = {(i, m): born(s, M) for i, s in enumerate(states) for m, M in enumerate(measurements)}
    return Behavior((("prep", 4), ("meas", len(measurements))), (("k", 2),), table)


def pm_to_bell(pm_behavior: Behavior) -> Behavior:
    """Bell behavior p(a, b | x, y) = 1/2 p(b | y, P_{x,a}).

    Requires (1/2) P_{0,0} + (1/2) P_{0,1} to be operationally equivalent to
    (1/2) P_{1,0} + (1/2) P_{1,1} on every measurement in the table: that is what
    makes Alice's marginal uniform and Bob's marginal independent of x.
    """
    if [k for _, k in pm_behavior.setting_variables] != [4, 2] or pm_behavior.outcome_shape != (2,):
        raise ShapeError("expected 4 preparations, 2 measurements, binary outcomes")
    for y in range(2):
        left = 0.5 * (pm_behavior.table[(0, y)] + pm_behavior.table[(1, y)])
        right = 0.5 * (pm_behavior.table[(2, y)] + pm_behavior.table[(3, y)])
        gap = float(np.abs(left - right).max())
        if gap > EQUIV_TOL:
            raise EquivalenceError(f"measurement {y}: mixtures differ by {gap:.3e}")
    table = {}
    for x in range(2):
        for y in range(2):
            table[(x, y)] = 0.5 * np.stack([pm_behavior.table[(2 * x + a, y)] for a in range(2)]).reshape(-1)
    return Behavior((("x", 2), ("y", 2)), (("a", 2), ("b", 2)), table)


def nc_inequality_value(pm_behavior: Behavior) -> float:
    """CHSH value of the Bell image of a prepare-and-measure table; > 2 rules out
    a preparation-noncontextual model."""
    return chsh_value(pm_to_bell(pm_behavior))
