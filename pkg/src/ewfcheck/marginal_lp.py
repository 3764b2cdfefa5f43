"""Marginal problems: does a joint distribution with prescribed marginals exist?

Feasibility is decided by a dense phase-one simplex (Bland's rule). When no
joint exists the dual of the phase-one optimum gives a Farkas certificate: a
vector y over the scalar marginal constraints such that the functional
q -> y . (M q) is positive on every joint distribution q, while the value the
targets demand, y . t, is negative.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import jsonfmt

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-12
MAX_JOINT = 10 ** 6


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MarginalConstraintSet:
    """Variables ``[(name, cardinality), ...]`` and constraints ``[(subset, target), ...]``.

    Each target is a probability vector over the subset's outcomes in row-major
    order of the subset as listed.
    """

    variables: tuple
    constraints: tuple

    def __post_init__(self):
        variables = tuple((str(n), int(k)) for n, k in self.variables)
        names = [n for n, _ in variables]
        if len(set(names)) != len(names):
            raise ConstraintError(f"duplicate variable names: {names}")
        card = dict(variables)
        constraints = []
        for i, (subset, target) in enumerate(self.constraints):
            subset = tuple(str(s) for s in subset)
            unknown = [s for s in subset if s not in card]
            if unknown:
                raise ConstraintError(f"constraint {i} references undeclared variables {unknown}")
            if len(set(subset)) != len(subset) or not subset:
                raise ConstraintError(f"constraint {i} has an invalid subset {list(subset)}")
            t = np.array(target, dtype=float).reshape(-1)
            size = int(np.prod([card[s] for s in subset]))
            if t.size != size:
                raise ConstraintError(f"constraint {i}: target has {t.size} entries, expected {size}")
            if (t < -FEAS_TOL).any() or abs(t.sum() - 1.0) > FEAS_TOL:
                raise ConstraintError(f"constraint {i}: target is not a probability vector")
            t.setflags(write=False)
            constraints.append((subset, t))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", tuple(constraints))

    @property
    def names(self) -> list:
        return [n for n, _ in self.variables]

    @property
    def joint_shape(self) -> tuple:
        return tuple(k for _, k in self.variables)

    @property
    def joint_size(self) -> int:
        return int(np.prod(self.joint_shape))

    def system(self) -> tuple:
        """(M, t): M[r, j] = 1 iff joint point j projects onto the outcome of row r."""
        if self.joint_size > MAX_JOINT:
            raise ConstraintError(f"joint outcome space of size {self.joint_size} exceeds {MAX_JOINT}")
        points = np.array(list(itertools.product(*(range(k) for k in self.joint_shape))),
                          dtype=int).reshape(self.joint_size, len(self.variables))
        card = dict(self.variables)
        blocks, targets = [], []
        for subset, target in self.constraints:
            cols = [self.names.index(s) for s in subset]
            sub_card = [card[s] for s in subset]
            flat = np.ravel_multi_index(points[:, cols].T, sub_card) if cols else np.zeros(len(points), int)
            block = np.zeros((target.size, self.joint_size))
            block[flat, np.arange(self.joint_size)] = 1.0
            blocks.append(block)
            targets.append(target)
        if not blocks:
            return np.ones((1, self.joint_size)), np.ones(1)
        return np.vstack(blocks), np.concatenate(targets)

    def block_slices(self) -> list:
        out, start = [], 0
        for _, t in self.constraints:
            out.append(slice(start, start + t.size))
            start += t.size
        return out

    def to_dict(self) -> dict:
        return {
            "variables": [[n, k] for n, k in self.variables],
            "constraints": [{"subset": list(s), "target": t} for s, t in self.constraints],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MarginalConstraintSet":
        if "variables" not in d:
            raise ConstraintError("missing field 'variables'")
        if "constraints" not in d:
            raise ConstraintError("missing field 'constraints'")
        cons = []
        for i, c in enumerate(d["constraints"]):
            for key in ("subset", "target"):
                if key not in c:
                    raise ConstraintError(f"constraints[{i}] is missing field {key!r}")
            cons.append((c["subset"], c["target"]))
        return cls(d["variables"], cons)

    def to_json(self) -> str:
        return jsonfmt.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MarginalConstraintSet":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    feasible: bool
    witness: Optional[np.ndarray] = None
    certificate: Optional[np.ndarray] = None
    slack: float = 0.0

    @property
    def infeasible(self) -> bool:
        return not self.feasible

    def to_dict(self) -> dict:
        return {
            "feasible": bool(self.feasible),
            "witness": None if self.witness is None else self.witness,
            "certificate": None if self.certificate is None else self.certificate,
            "slack": float(self.slack),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeasibilityResult":
        arr = lambda v: None if v is None else np.asarray(v, dtype=float)
        return cls(bool(d["feasible"]), arr(d.get("witness")), arr(d.get("certificate")),
                   float(d.get("slack", 0.0)))


def _phase_one(A: np.ndarray, b: np.ndarray) -> tuple:
    """min 1.s  s.t.  A q + s = b, q, s >= 0, with b >= 0.

    Returns (optimum, q, y) where y are the phase-one duals.
    """
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    while True:
        # Bland: lowest-index improving column, lowest-index basic variable on ties
        entering = next((j for j in range(n + m) if T[m, j] < -PIVOT_TOL), None)
        if entering is None:
            break
        col = T[:m, entering]
        rows = np.flatnonzero(col > PIVOT_TOL)
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL]
        r = min(ties, key=lambda i: basis[i])
        T[r] /= T[r, entering]
        for i in range(m + 1):
            if i != r and T[i, entering] != 0.0:
                T[i] -= T[i, entering] * T[r]
        basis[r] = entering

    q = np.zeros(n)
    for i, j in enumerate(basis):
        if j < n:
            q[j] = T[i, -1]
    # reduced cost of artificial i is 1 - y_i
    y = 1.0 - T[m, n:n + m]
    return -T[m, -1], q, y


def lp_feasibility(cs: MarginalConstraintSet) -> FeasibilityResult:
    """Decide whether some joint distribution reproduces every target of ``cs``."""
    M, t = cs.system()
    sign = np.where(t < 0, -1.0, 1.0)
    opt, q, y_phase = _phase_one(M * sign[:, None], t * sign)

    if opt <= FEAS_TOL:
        q = np.clip(q, 0.0, None)
        q = q / q.sum()
        spread = _max_entropy_witness(M, t, cs)
        if spread is not None:
            q = spread
        slack = float(np.abs(M @ q - t).max())
        return FeasibilityResult(True, witness=q, slack=slack)

    y = _normalize_certificate(cs, M, t, -sign * y_phase)
    return FeasibilityResult(False, certificate=y, slack=_margin(M, t, y))


def _max_entropy_witness(M, t, cs, sweeps: int = 500, tol: float = 1e-13):
    """Iterative proportional fitting from the uniform joint.

    Gives the least-committal joint (uniform for product marginals) instead of
    a simplex vertex; None if it has not converged to ``tol``.
    """
    q = np.full(M.shape[1], 1.0 / M.shape[1])
    slices = cs.block_slices() if cs.constraints else [slice(0, 1)]
    for _ in range(sweeps):
        for sl in slices:
            rows, target = M[sl], t[sl]
            current = rows @ q
            with np.errstate(invalid="ignore", divide="ignore"):
                ratio = np.where(current > 0, target / current, 0.0)
            q = q * (rows.T @ ratio)
        if np.abs(M @ q - t).max() <= tol:
            return q / q.sum()
    return None


def _normalize_certificate(cs, M, t, y) -> np.ndarray:
    # Shifting one block of y by k moves both y.Mq and y.t by k (block rows
    # partition the joint points, block targets sum to one). Centre the gap
    # around zero, then scale to unit max-norm.
    y = np.array(y, dtype=float)
    f = M.T @ y
    gap = f.min() - y @ t
    if cs.constraints:
        k = gap / 2 - f.min()
        y[cs.block_slices()[0]] += k
    return y / np.abs(y).max()


def _margin(M, t, y) -> float:
    return float(min((M.T @ y).min(), -(y @ t)))


def fine_check(pair_ab, pair_ad, pair_cb, pair_cd) -> FeasibilityResult:
    """Joint p(a, b, c, d) over binary variables with the four pair marginals?

    Each table is 2x2, rows indexed by the first-named variable. Inconsistent
    single-variable marginals simply make the problem infeasible.
    """
    cs = fine_constraint_set(pair_ab, pair_ad, pair_cb, pair_cd)
    return lp_feasibility(cs)


def fine_constraint_set(pair_ab, pair_ad, pair_cb, pair_cd) -> MarginalConstraintSet:
    pairs = {("a", "b"): pair_ab, ("a", "d"): pair_ad, ("c", "b"): pair_cb, ("c", "d"): pair_cd}
    return MarginalConstraintSet(
        (("a", 2), ("b", 2), ("c", 2), ("d", 2)),
        tuple((k, np.asarray(v, dtype=float).reshape(-1)) for k, v in pairs.items()))


def validate_certificate(cs: MarginalConstraintSet, result: FeasibilityResult) -> bool:
    """Re-check a result by direct arithmetic, without touching the solver."""
    M, t = cs.system()
    if result.feasible:
        w = result.witness
        if w is None or w.shape != (cs.joint_size,):
            return False
        if w.min() < -PIVOT_TOL or abs(w.sum() - 1.0) > FEAS_TOL:
            return False
        return bool(np.abs(M @ w - t).max() <= FEAS_TOL)
    y = result.certificate
    if y is None or y.shape != t.shape or result.slack <= FEAS_TOL:
        return False
    # functional must reach the claimed margin on every joint point...
    if (M.T @ y).min() < result.slack - PIVOT_TOL:
        return False
    # ...while the targets demand a negative value
    return bool(y @ t <= -FEAS_TOL)
