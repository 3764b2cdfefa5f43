import itertools
from math import cos, pi

import numpy as np
import pytest

from ewfcheck.behavior import Behavior, BehaviorError, JointDistribution
from ewfcheck.quantum import PureState, basis_state, make_bloch_state
from ewfcheck.scenarios import (ExtendedOFConfig, LFConfig, OFConfig, check_preparation_equivalence,
                                eve_conditional_system, eve_tap_run, of_system_after_alice,
                                run_extended_of_scenario, run_lf_scenario, run_of_scenario,
                                sample_behavior)
from ewfcheck.verifier import of_premise_checks

from oracles import SINGLET, bipartite_table, of_collapse_table, of_eve_table, qubit

SETTINGS_2 = list(itertools.product(range(2), repeat=2))


def random_of_config(rng):
    return OFConfig(preparation_angles=tuple(rng.uniform(0, 2 * pi, 2)),
                    charlie_basis_angle=rng.uniform(0, 2 * pi),
                    debbie_basis_angle=rng.uniform(0, 2 * pi),
                    bob_basis_angle=rng.uniform(0, 2 * pi),
                    prior=(lambda p: (p, 1 - p))(rng.uniform(0.05, 0.95)))


def test_default_of_table_entries():
    b = run_of_scenario()
    # 1/2 cos^2(3pi/8) and 1/2 cos^2(pi/8)
    assert b.dist(0, 0)[0, 0] == pytest.approx(0.5 * cos(3 * pi / 8) ** 2, abs=1e-12)
    assert b.dist(1, 1)[0, 0] == pytest.approx(0.5 * cos(pi / 8) ** 2, abs=1e-12)
    assert b.labels[(0, 0)] == ("c", "d") and b.labels[(1, 1)] == ("a", "b")


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("x, y", SETTINGS_2)
def test_of_matches_collapse_oracle(seed, x, y):
    cfg = random_of_config(np.random.default_rng(seed))
    expected = of_collapse_table(cfg.preparation_angles, cfg.charlie_basis_angle,
                                 cfg.debbie_basis_angle, cfg.bob_basis_angle, x, y, cfg.prior)
    np.testing.assert_allclose(run_of_scenario(cfg).dist(x, y), expected, atol=1e-12)


@pytest.mark.parametrize("x, y", list(itertools.product(range(3), repeat=2)))
def test_extended_of_matches_collapse_oracle(x, y):
    cfg = ExtendedOFConfig()
    base = cfg.base
    expected = of_collapse_table(base.preparation_angles, base.charlie_basis_angle,
                                 base.debbie_basis_angle, base.bob_basis_angle, x, y, base.prior,
                                 rotation=cfg.alice_x2_rotation_angle, bob_y2=cfg.bob_y2_basis_angle)
    np.testing.assert_allclose(run_extended_of_scenario(cfg).dist(x, y), expected, atol=1e-12)


@pytest.mark.parametrize("x, y", SETTINGS_2)
def test_lf_singlet_matches_brute_force_born(x, y):
    cfg = LFConfig()
    alice = (cfg.charlie_angle, cfg.alice_undo_angle)[x]
    bob = (cfg.debbie_angle, cfg.bob_undo_angle)[y]
    np.testing.assert_allclose(run_lf_scenario(cfg).dist(x, y),
                               bipartite_table(SINGLET, alice, bob), atol=1e-12)


def test_lf_default_correlators():
    b = run_lf_scenario()
    E = [b.dist(x, y)[0, 0] - b.dist(x, y)[0, 1] - b.dist(x, y)[1, 0] + b.dist(x, y)[1, 1]
         for x, y in SETTINGS_2]
    r = 1 / np.sqrt(2)
    np.testing.assert_allclose(E, [-r, -r, -r, r], atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_lf_random_state_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi = v / np.linalg.norm(v)
    angs = rng.uniform(0, 2 * pi, 4)
    cfg = LFConfig(PureState(psi), *angs)
    b = run_lf_scenario(cfg)
    for x, y in SETTINGS_2:
        np.testing.assert_allclose(b.dist(x, y), bipartite_table(psi, angs[[0, 2][x]], angs[[1, 3][y]]),
                                   atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("x", range(3))
def test_eve_joint_matches_oracle(seed, x):
    rng = np.random.default_rng(seed)
    base = random_of_config(rng)
    cfg = ExtendedOFConfig(base, rng.uniform(-pi, pi), rng.uniform(0, 2 * pi))
    j = eve_tap_run(cfg, x, 0, tap=("c",))
    expected = of_eve_table(base.preparation_angles, base.charlie_basis_angle,
                            base.debbie_basis_angle, x, base.prior, cfg.alice_x2_rotation_angle)
    np.testing.assert_allclose(j.marginal(["a", "c", "d"]), expected, atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_eve_restoration_lemma(seed):
    # conditioned on Eve's copy, Alice's undo leaves S in the eigenstate phi_c
    cfg = random_of_config(np.random.default_rng(seed))
    for c in (0, 1):
        try:
            rho = eve_conditional_system(cfg, c)
        except ValueError:
            continue
        phi = qubit(cfg.charlie_basis_angle + c * pi)
        np.testing.assert_allclose(rho, np.outer(phi, phi), atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_undo_without_eve_restores_preparation(seed):
    cfg = OFConfig() if seed == 0 else random_of_config(np.random.default_rng(seed))
    regs = of_system_after_alice(cfg, x=1, tap_c=False)
    zero = basis_state(2, 0).amplitudes
    # registers A, S, Mc, Md: the undo returns sum_a sqrt(p_a)|a>|P_a>|0>|0>
    want = sum(np.sqrt(p) * np.kron(np.kron(basis_state(2, a).amplitudes, qubit(t)), np.kron(zero, zero))
               for a, (p, t) in enumerate(zip(cfg.prior, cfg.preparation_angles)))
    assert abs(np.vdot(want, regs.vector)) ** 2 >= 1 - 1e-12


@pytest.mark.parametrize("seed", range(50))
def test_agency_premises_hold_for_random_configs(seed):
    cfg = random_of_config(np.random.default_rng(seed))
    checks = of_premise_checks(cfg)
    assert len(checks) == 10
    assert max(c.max_abs_diff for c in checks) <= 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_empirical_ad_equals_d_tapped_eve(seed):
    cfg = random_of_config(np.random.default_rng(seed))
    emp = run_of_scenario(cfg).dist(1, 0)
    for y in (0, 1):
        np.testing.assert_allclose(eve_tap_run(cfg, 1, y, tap=("d",)).marginal(["a", "d"]), emp,
                                   atol=1e-12)


def test_c_tap_disturbs_ad_when_undo_matters():
    # a copy of c blocks the undo, which is why the (a, d) premise uses a d-only tap
    cfg = OFConfig()
    tapped = eve_tap_run(cfg, 1, 0, tap=("c", "d")).marginal(["a", "d"])
    assert np.abs(tapped - run_of_scenario(cfg).dist(1, 0)).max() > 0.1


def test_extended_behavior_has_nine_settings():
    b = run_extended_of_scenario()
    assert len(b.settings()) == 9
    assert b.labels[(2, 2)] == ("a", "b")


@pytest.mark.parametrize("run", [run_of_scenario, run_lf_scenario, run_extended_of_scenario])
def test_behavior_json_round_trip_is_exact(run):
    b = run()
    again = Behavior.from_json(b.to_json())
    for s in b.settings():
        assert np.array_equal(again.table[s], b.table[s])
    assert again.labels == b.labels
    assert again.to_json() == b.to_json()


def test_behavior_rejects_bad_tables():
    with pytest.raises(BehaviorError):
        Behavior((("x", 1),), (("a", 2),), {(0,): [0.7, 0.7]})
    with pytest.raises(BehaviorError):
        Behavior((("x", 2),), (("a", 2),), {(0,): [0.5, 0.5]})


def test_joint_conditional_marks_impossible_events():
    j = JointDistribution((("c", 2), ("d", 2)), np.array([[0.5, 0.5], [0.0, 0.0]]))
    cond = j.conditional(["d"], ["c"])
    np.testing.assert_allclose(cond[0], [0.5, 0.5])
    assert np.isnan(cond[1]).all()


def test_preparation_equivalence_examples():
    P = {k: make_bloch_state(k * pi / 4) for k in range(8)}
    ok, d = check_preparation_equivalence([(0.5, P[1]), (0.5, P[5])], [(0.5, P[3]), (0.5, P[7])])
    assert ok and d <= 1e-12
    ok, d = check_preparation_equivalence([(0.5, P[0]), (0.5, P[4])], [(1.0, P[0])])
    assert not ok and d == pytest.approx(0.5)


def test_sampled_behavior_is_deterministic_per_seed():
    b = run_of_scenario()
    s1, s2 = sample_behavior(b, 1000, seed=3), sample_behavior(b, 1000, seed=3)
    assert all(np.array_equal(s1.table[s], s2.table[s]) for s in b.settings())
