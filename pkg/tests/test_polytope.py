import itertools
from math import pi, sqrt

import numpy as np
import pytest

from ewfcheck.behavior import Behavior
from ewfcheck.marginal_lp import validate_certificate
from ewfcheck.polytope import (EquivalenceError, ScenarioShape, ShapeError, chsh_value,
                               correlators, enumerate_strategies, enumerate_vertices,
                               local_constraint_set, membership, nc_inequality_value,
                               pm_to_bell, prepare_measure_behavior)
from ewfcheck.quantum import make_bloch_state, pauli_xz_measurement

from oracles import LOCAL_BOXES, PR_BOXES, chsh_from_correlators, correlator, random_ns_box

CHSH_SHAPE = ScenarioShape(2, 2, 2, 2)


def box_behavior(box):
    return Behavior((("x", 2), ("y", 2)), (("a", 2), ("b", 2)),
                    {s: np.asarray(p).reshape(-1) for s, p in box.items()})


def simplest_pm(thetas=(pi / 4, 5 * pi / 4, 3 * pi / 4, 7 * pi / 4), meas=(pi / 2, 0.0)):
    return prepare_measure_behavior([make_bloch_state(t) for t in thetas],
                                    [pauli_xz_measurement(m) for m in meas])


@pytest.mark.parametrize("shape, count", [(ScenarioShape(2, 2, 2, 2), 16),
                                          (ScenarioShape(3, 3, 2, 2), 64),
                                          (ScenarioShape(2, 3, 3, 2), 72)])
def test_vertex_counts_and_distinctness(shape, count):
    verts = enumerate_vertices(shape)
    assert len(verts) == shape.n_vertices == count
    flat = {tuple(np.concatenate([v.table[s] for s in v.settings()])) for v in verts}
    assert len(flat) == count


def test_vertex_cap():
    with pytest.raises(ShapeError):
        enumerate_strategies(ScenarioShape(20, 1, 2, 2))


def test_every_vertex_scores_exactly_two():
    assert [chsh_value(v) for v in enumerate_vertices(CHSH_SHAPE)] == [2.0] * 16


def test_pr_box_scores_four_and_is_outside():
    b = box_behavior(PR_BOXES[0])
    assert chsh_value(b) == pytest.approx(4)
    res = membership(b)
    assert res.infeasible
    assert validate_certificate(local_constraint_set(b, CHSH_SHAPE), res)


def test_uniform_noise_is_local_with_vertex_weights():
    u = {s: np.full((2, 2), 0.25) for s in itertools.product(range(2), repeat=2)}
    res = membership(box_behavior(u))
    assert res.feasible
    assert res.witness.shape == (16,)
    assert res.witness.sum() == pytest.approx(1)


def test_tsirelson_behavior_is_outside():
    r = 1 / sqrt(2)
    E = {(0, 0): r, (0, 1): r, (1, 0): r, (1, 1): -r}
    box = {s: np.array([[1 + e, 1 - e], [1 - e, 1 + e]]) / 4 for s, e in E.items()}
    b = box_behavior(box)
    assert chsh_value(b) == pytest.approx(2 * sqrt(2), abs=1e-12)
    assert membership(b).infeasible


def test_correlators_with_sign_maps():
    b = box_behavior(LOCAL_BOXES[0])  # all outcomes 0
    assert np.all(correlators(b) == 1)
    flipped = correlators(b, {("A", 0): (-1, 1)})
    np.testing.assert_array_equal(flipped, [[-1, -1], [1, 1]])
    np.testing.assert_array_equal(correlators(b, (0, 1)), np.zeros((2, 2)))


@pytest.mark.parametrize("seed", range(20))
def test_chsh_is_invariant_under_relabelling(seed):
    rng = np.random.default_rng(seed)
    box = random_ns_box(rng)
    base = chsh_value(box_behavior(box))
    flip_a = {s: p[::-1, :] if s[0] == 1 else p for s, p in box.items()}
    swap_xy = {(x, y): box[(1 - x, y)] for x, y in box}
    parties = {(x, y): box[(y, x)].T for x, y in box}
    for variant in (flip_a, swap_xy, parties):
        assert chsh_value(box_behavior(variant)) == pytest.approx(base, abs=1e-12)


def test_membership_agrees_with_chsh_on_500_behaviors():
    rng = np.random.default_rng(99)
    agree = 0
    for _ in range(500):
        box = random_ns_box(rng)
        E = [correlator(box[s]) for s in ((0, 0), (0, 1), (1, 0), (1, 1))]
        agree += membership(box_behavior(box)).feasible == (chsh_from_correlators(E) <= 2 + 1e-9)
    assert agree == 500


def test_restrict_rejects_wrong_shape():
    b = box_behavior(PR_BOXES[0])
    with pytest.raises(ShapeError):
        local_constraint_set(b, ScenarioShape(3, 2, 2, 2))


def test_simplest_pm_scenario_reaches_two_root_two():
    assert nc_inequality_value(simplest_pm()) == pytest.approx(2 * sqrt(2), abs=1e-9)


def test_pm_with_commuting_measurements_stays_classical():
    assert nc_inequality_value(simplest_pm(meas=(0.0, 0.0))) <= 2 + 1e-9


def test_pm_with_identical_preparations_gives_zero():
    pm = simplest_pm(thetas=(0.0, 0.0, 0.0, 0.0))
    assert nc_inequality_value(pm) == pytest.approx(0, abs=1e-12)


def test_pm_bell_image_has_uniform_alice_marginal():
    bell = pm_to_bell(simplest_pm())
    for s in bell.settings():
        np.testing.assert_allclose(bell.marginal(s, 0), [0.5, 0.5], atol=1e-12)


def test_pm_mapping_refuses_inequivalent_preparations():
    with pytest.raises(EquivalenceError):
        pm_to_bell(simplest_pm(thetas=(0.0, pi, 0.0, pi / 2)))
