"""Step-by-step simulation of the friend/superobserver protocols.

Each protocol is run on explicit registers:

* ``A``  - purification of Alice's preparation label a (OF only; never acted on)
* ``R``, ``S`` - the measured systems (OF uses only ``S``)
* ``Mc``, ``Md`` - Charlie's and Debbie's memories
* ``Ec``, ``Ed`` - optional eavesdropper copies of the memories ("Eve taps")

All probabilities come straight from the Born rule on the final pure state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Iterable, Optional, Sequence

import numpy as np

from .behavior import Behavior, JointDistribution
from .quantum import (ProjectiveMeasurement, PureState, basis_state, computational_measurement,
                      make_bloch_state, measurement_dilation, mix, normalize_angle,
                      pauli_xz_measurement, singlet, trace_distance, y_rotation)
from .registers import Registers

EQUIV_TOL = 1e-12

_Z = computational_measurement(2)
_COPY = measurement_dilation(_Z)  # CNOT: |m>|e> -> |m>|e + m>


@dataclass(frozen=True)
class OFConfig:
    """Single-system protocol: Alice prepares P_a, Charlie measures, Debbie measures."""

    preparation_angles: tuple = (pi / 4, 5 * pi / 4)
    charlie_basis_angle: float = 3 * pi / 4
    debbie_basis_angle: float = 0.0
    bob_basis_angle: float = pi / 2
    prior: tuple = (0.5, 0.5)

    def __post_init__(self):
        if len(self.preparation_angles) != 2:
            raise ValueError("OF needs exactly two preparation angles")
        object.__setattr__(self, "preparation_angles",
                           tuple(normalize_angle(t) for t in self.preparation_angles))
        for name in ("charlie_basis_angle", "debbie_basis_angle", "bob_basis_angle"):
            object.__setattr__(self, name, normalize_angle(getattr(self, name)))
        prior = tuple(float(p) for p in self.prior)
        if len(prior) != 2 or min(prior) < 0 or abs(sum(prior) - 1) > 1e-12:
            raise ValueError(f"prior must be a distribution over a in {{0, 1}}, got {prior}")
        object.__setattr__(self, "prior", prior)


@dataclass(frozen=True)
class LFConfig:
    """Bipartite protocol: Charlie holds R, Debbie holds S of a shared state."""

    shared_state: PureState = field(default_factory=singlet)
    charlie_angle: float = pi / 4
    debbie_angle: float = 0.0
    alice_undo_angle: float = -pi / 4
    bob_undo_angle: float = pi / 2

    def __post_init__(self):
        if self.shared_state.dim != 4:
            raise ValueError("shared state must live on two qubits")
        for name in ("charlie_angle", "debbie_angle", "alice_undo_angle", "bob_undo_angle"):
            object.__setattr__(self, name, normalize_angle(getattr(self, name)))


def appendix_b_base() -> OFConfig:
    """Z-eigenstate preparations, Charlie and Debbie in X, Bob's y=1 in Z."""
    return OFConfig(preparation_angles=(0.0, pi), charlie_basis_angle=pi / 2,
                    debbie_basis_angle=pi / 2, bob_basis_angle=0.0)


@dataclass(frozen=True)
class ExtendedOFConfig:
    """OF protocol with a third choice for each superobserver.

    x=2: undo Charlie, then rotate S about the y-axis by ``alice_x2_rotation_angle``.
    y=2: undo Debbie, then measure S at ``bob_y2_basis_angle``.

    The rotation sign is a convention: -pi/4 sends the Z eigenvectors to the
    (Z - X)/sqrt(2) eigenvectors.
    """

    base: OFConfig = field(default_factory=appendix_b_base)
    alice_x2_rotation_angle: float = -pi / 4
    bob_y2_basis_angle: float = pi / 4

    def __post_init__(self):
        object.__setattr__(self, "alice_x2_rotation_angle", float(self.alice_x2_rotation_angle))
        object.__setattr__(self, "bob_y2_basis_angle", normalize_angle(self.bob_y2_basis_angle))


def _extend(regs: Registers, name: str, dim: int = 2) -> Registers:
    amps = np.kron(regs.vector, basis_state(dim, 0).amplitudes)
    return Registers(regs.names + (name,), regs.dims + (dim,), amps)


def _prepared_of_registers(cfg: OFConfig) -> Registers:
    amps = sum(np.sqrt(p) * np.kron(basis_state(2, a).amplitudes,
                                    make_bloch_state(t).amplitudes)
               for a, (p, t) in enumerate(zip(cfg.prior, cfg.preparation_angles)))
    regs = Registers(("A", "S"), (2, 2), amps)
    for name in ("Mc", "Md"):
        regs = _extend(regs, name)
    return regs


def _split(scenario):
    if isinstance(scenario, ExtendedOFConfig):
        return scenario.base, scenario
    return scenario, None


def _of_final(scenario, x: int, y: int, tap: Sequence[str] = ()) -> tuple:
    base, ext = _split(scenario)
    max_setting = 2 if ext is not None else 1
    if not (0 <= x <= max_setting and 0 <= y <= max_setting):
        raise ValueError(f"setting (x={x}, y={y}) outside the protocol")
    u_c = measurement_dilation(pauli_xz_measurement(base.charlie_basis_angle))
    u_d = measurement_dilation(pauli_xz_measurement(base.debbie_basis_angle))

    regs = _prepared_of_registers(base)
    for t in tap:
        regs = _extend(regs, "E" + t)

    regs = regs.apply(u_c, ("S", "Mc"))
    if "c" in tap:
        regs = regs.apply(_COPY, ("Mc", "Ec"))
    if x >= 1:
        regs = regs.apply(u_c.dagger, ("S", "Mc"))
    if x == 2:
        regs = regs.apply(y_rotation(ext.alice_x2_rotation_angle), ("S",))
    regs = regs.apply(u_d, ("S", "Md"))
    if "d" in tap:
        regs = regs.apply(_COPY, ("Md", "Ed"))
    if y >= 1:
        regs = regs.apply(u_d.dagger, ("S", "Md"))

    meas = {"a": ("A", _Z)}
    if "c" in tap:
        meas["c"] = ("Ec", _Z)
    elif x == 0:
        meas["c"] = ("Mc", _Z)
    if "d" in tap:
        meas["d"] = ("Ed", _Z)
    elif y == 0:
        meas["d"] = ("Md", _Z)
    if y >= 1:
        angle = base.bob_basis_angle if y == 1 else ext.bob_y2_basis_angle
        meas["b"] = ("S", pauli_xz_measurement(angle))
    return regs, meas


def _joint(regs: Registers, meas: dict) -> JointDistribution:
    p = regs.joint({reg: m for reg, m in meas.values()})
    return JointDistribution(tuple((name, 2) for name in meas), p)


def _lf_final(cfg: LFConfig, x: int, y: int, tap: Sequence[str] = ()) -> tuple:
    if x not in (0, 1) or y not in (0, 1):
        raise ValueError(f"setting (x={x}, y={y}) outside the protocol")
    u_c = measurement_dilation(pauli_xz_measurement(cfg.charlie_angle))
    u_d = measurement_dilation(pauli_xz_measurement(cfg.debbie_angle))
    regs = Registers.product([(("R", "S"), cfg.shared_state)])
    for name in ("Mc", "Md"):
        regs = _extend(regs, name)
    for t in tap:
        regs = _extend(regs, "E" + t)

    regs = regs.apply(u_c, ("R", "Mc")).apply(u_d, ("S", "Md"))
    if "c" in tap:
        regs = regs.apply(_COPY, ("Mc", "Ec"))
    if "d" in tap:
        regs = regs.apply(_COPY, ("Md", "Ed"))
    if x == 1:
        regs = regs.apply(u_c.dagger, ("R", "Mc"))
    if y == 1:
        regs = regs.apply(u_d.dagger, ("S", "Md"))

    meas = {}
    if x == 1:
        meas["a"] = ("R", pauli_xz_measurement(cfg.alice_undo_angle))
    if "c" in tap:
        meas["c"] = ("Ec", _Z)
    elif x == 0:
        meas["c"] = ("Mc", _Z)
    if "d" in tap:
        meas["d"] = ("Ed", _Z)
    elif y == 0:
        meas["d"] = ("Md", _Z)
    if y == 1:
        meas["b"] = ("S", pauli_xz_measurement(cfg.bob_undo_angle))
    return regs, meas


def _observed(x: int, y: int) -> tuple:
    return ("c" if x == 0 else "a", "d" if y == 0 else "b")


def _behavior(scenario, n_settings: int, final) -> Behavior:
    table, labels = {}, {}
    for x in range(n_settings):
        for y in range(n_settings):
            names = _observed(x, y)
            joint = _joint(*final(scenario, x, y))
            table[(x, y)] = joint.marginal(names).reshape(-1)
            labels[(x, y)] = names
    return Behavior((("x", n_settings), ("y", n_settings)),
                    (("alice", 2), ("bob", 2)), table, labels)


def run_of_scenario(cfg: Optional[OFConfig] = None) -> Behavior:
    """Empirical tables p(c,d|0,0), p(c,b|0,1), p(a,d|1,0), p(a,b|1,1) of the OF protocol.

    Alice's slot holds c when x=0 and the preparation label a when x=1; Bob's
    slot holds d when y=0 and b when y=1.
    """
    return _behavior(cfg or OFConfig(), 2, _of_final)


def run_lf_scenario(cfg: Optional[LFConfig] = None) -> Behavior:
    """Empirical tables of the bipartite protocol, same layout as :func:`run_of_scenario`."""
    return _behavior(cfg or LFConfig(), 2, _lf_final)


def run_extended_of_scenario(cfg: Optional[ExtendedOFConfig] = None) -> Behavior:
    """3x3-setting OF behavior (x, y in {0, 1, 2})."""
    return _behavior(cfg or ExtendedOFConfig(), 3, _of_final)


def eve_tap_run(scenario, x: int, y: int, tap: Iterable[str] = ("c",)) -> JointDistribution:
    """Joint distribution with eavesdropper copies of the friends' records.

    ``tap`` selects which memories are copied (``"c"``, ``"d"`` or both) right
    after the corresponding friend's measurement; the copies are never touched
    again. The result holds a (OF: the preparation label; LF: Alice's outcome when
    x=1), the tapped records, and Bob's observed variable.
    """
    tap = tuple(sorted(set(tap)))
    if not set(tap) <= {"c", "d"}:
        raise ValueError(f"can only tap 'c' and 'd', got {tap}")
    final = _lf_final if isinstance(scenario, LFConfig) else _of_final
    return _joint(*final(scenario, x, y, tap))


def of_system_after_alice(cfg: OFConfig, x: int, tap_c: bool) -> Registers:
    """Registers right after Alice's step (before Debbie), for inspecting the undo."""
    u_c = measurement_dilation(pauli_xz_measurement(cfg.charlie_basis_angle))
    regs = _prepared_of_registers(cfg)
    if tap_c:
        regs = _extend(regs, "Ec")
    regs = regs.apply(u_c, ("S", "Mc"))
    if tap_c:
        regs = regs.apply(_COPY, ("Mc", "Ec"))
    if x == 1:
        regs = regs.apply(u_c.dagger, ("S", "Mc"))
    return regs


def eve_conditional_system(cfg: OFConfig, c: int) -> np.ndarray:
    """State of S given Eve's record c, after Alice undoes Charlie's measurement."""
    regs = of_system_after_alice(cfg, x=1, tap_c=True)
    branch = regs.project("Ec", _Z.projectors[c])
    w = branch.norm2()
    if w == 0:
        raise ValueError(f"Eve never records c={c} in this configuration")
    return branch.reduced(("S",)) / w


def check_preparation_equivalence(lhs, rhs) -> tuple:
    """Compare two mixtures of pure states; returns (equivalent, trace distance)."""
    d = trace_distance(mix(lhs), mix(rhs))
    return d <= EQUIV_TOL, d


def sample_behavior(behavior: Behavior, shots: int, seed: int = 0) -> Behavior:
    """Finite-statistics version of ``behavior`` (relative frequencies).

    Demonstration only; verifications always use exact Born probabilities.
    """
    rng = np.random.default_rng(seed)
    table = {s: rng.multinomial(shots, p / p.sum()) / shots for s, p in behavior.table.items()}
    return Behavior(behavior.setting_variables, behavior.outcome_variables, table, behavior.labels)
