"""Conditional probability tables and small labelled joint distributions."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import jsonfmt

PROB_TOL = 1e-9


class BehaviorError(ValueError):
    pass


def _vars(pairs) -> tuple:
    out = tuple((str(n), int(k)) for n, k in pairs)
    for n, k in out:
        if k < 1:
            raise BehaviorError(f"variable {n!r} has cardinality {k}")
    return out


def setting_key(names: Sequence[str], values: Sequence[int]) -> str:
    return ",".join(f"{n}={v}" for n, v in zip(names, values))


def parse_setting_key(key: str, names: Sequence[str]) -> tuple:
    vals = {}
    for part in key.split(","):
        n, _, v = part.partition("=")
        vals[n.strip()] = int(v)
    if set(vals) != set(names):
        raise BehaviorError(f"setting key {key!r} does not name exactly {list(names)}")
    return tuple(vals[n] for n in names)


@dataclass(frozen=True, eq=False)
class Behavior:
    """p(outcome tuple | setting tuple).

    ``table[s]`` is a flat probability vector over outcome tuples in row-major
    order of ``outcome_variables``. ``labels`` optionally records, per setting,
    which physical variable each outcome slot stands for (e.g. ``("c", "d")``).
    """

    setting_variables: tuple
    outcome_variables: tuple
    table: Mapping
    labels: Optional[Mapping] = field(default=None)

    def __post_init__(self):
        sv = _vars(self.setting_variables)
        ov = _vars(self.outcome_variables)
        object.__setattr__(self, "setting_variables", sv)
        object.__setattr__(self, "outcome_variables", ov)
        n_out = int(np.prod([k for _, k in ov]))
        table = {}
        for s in self.settings():
            if s not in self.table:
                raise BehaviorError(f"no entry for setting {s}")
            p = np.array(self.table[s], dtype=float).reshape(-1)
            if p.size != n_out:
                raise BehaviorError(f"setting {s}: expected {n_out} probabilities, got {p.size}")
            if (p < -PROB_TOL).any() or abs(p.sum() - 1.0) > PROB_TOL:
                raise BehaviorError(f"setting {s}: not a probability vector: {p}")
            p.setflags(write=False)
            table[s] = p
        extra = set(self.table) - set(table)
        if extra:
            raise BehaviorError(f"settings outside the declared space: {sorted(extra)}")
        object.__setattr__(self, "table", table)
        if self.labels is not None:
            labels = {tuple(s): tuple(v) for s, v in self.labels.items()}
            object.__setattr__(self, "labels", labels)

    def settings(self) -> list:
        return list(itertools.product(*(range(k) for _, k in self.setting_variables)))

    @property
    def outcome_shape(self) -> tuple:
        return tuple(k for _, k in self.outcome_variables)

    def dist(self, *setting) -> np.ndarray:
        """Probability array for one setting, one axis per outcome variable."""
        return self.table[tuple(setting)].reshape(self.outcome_shape)

    def marginal(self, setting, axis: int) -> np.ndarray:
        d = self.dist(*setting)
        others = tuple(i for i in range(d.ndim) if i != axis)
        return d.sum(axis=others)

    def restrict(self, **ranges) -> "Behavior":
        """Sub-behavior on selected setting values, relabelled 0..k-1.

        ``b.restrict(x=[1, 2], y=[1, 2])``
        """
        keep = []
        for name, card in self.setting_variables:
            keep.append(list(ranges.get(name, range(card))))
        sv = tuple((n, len(vals)) for (n, _), vals in zip(self.setting_variables, keep))
        table, labels = {}, {}
        for new in itertools.product(*(range(len(v)) for v in keep)):
            old = tuple(vals[i] for vals, i in zip(keep, new))
            table[new] = self.table[old]
            if self.labels:
                labels[new] = self.labels[old]
        return Behavior(sv, self.outcome_variables, table, labels or None)

    # serialization

    def to_dict(self) -> dict:
        names = [n for n, _ in self.setting_variables]
        d = {
            "settings": [[n, k] for n, k in self.setting_variables],
            "outcomes": [[n, k] for n, k in self.outcome_variables],
            "table": {setting_key(names, s): self.table[s] for s in self.settings()},
        }
        if self.labels:
            d["labels"] = {setting_key(names, s): list(self.labels[s]) for s in self.settings()}
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Behavior":
        for key in ("settings", "outcomes", "table"):
            if key not in d:
                raise BehaviorError(f"behavior JSON is missing field {key!r}")
        sv = _vars(d["settings"])
        names = [n for n, _ in sv]
        table = {parse_setting_key(k, names): v for k, v in d["table"].items()}
        labels = None
        if d.get("labels"):
            labels = {parse_setting_key(k, names): v for k, v in d["labels"].items()}
        return cls(sv, d["outcomes"], table, labels)

    def to_json(self) -> str:
        return jsonfmt.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Behavior":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        names = [n for n, _ in self.setting_variables]
        outs = list(itertools.product(*(range(k) for k in self.outcome_shape)))
        onames = [n for n, _ in self.outcome_variables]
        header = names + ["p(" + ",".join(f"{n}={v}" for n, v in zip(onames, o)) + ")" for o in outs]
        lines = [",".join(header)]
        for s in self.settings():
            row = [str(v) for v in s] + [jsonfmt.format_float(p) for p in self.table[s]]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_pretty(self) -> str:
        names = [n for n, _ in self.setting_variables]
        outs = list(itertools.product(*(range(k) for k in self.outcome_shape)))
        lines = []
        for s in self.settings():
            lab = self.labels[s] if self.labels else [n for n, _ in self.outcome_variables]
            cells = "  ".join(
                f"p({','.join(f'{n}={v}' for n, v in zip(lab, o))})={p:.6f}"
                for o, p in zip(outs, self.table[s]))
            lines.append(f"{setting_key(names, s):>10}  {cells}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability array with one named axis per variable."""

    variables: tuple
    probs: np.ndarray

    def __post_init__(self):
        v = _vars(self.variables)
        p = np.array(self.probs, dtype=float).reshape(tuple(k for _, k in v))
        if abs(p.sum() - 1.0) > PROB_TOL or (p < -PROB_TOL).any():
            raise BehaviorError("joint is not a probability distribution")
        p.setflags(write=False)
        object.__setattr__(self, "variables", v)
        object.__setattr__(self, "probs", p)

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.variables)

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        idx = [self.names.index(n) for n in names]
        drop = tuple(i for i in range(len(self.names)) if i not in idx)
        m = self.probs.sum(axis=drop)
        # remaining axes are in original order; permute to requested order
        order = sorted(idx)
        return np.transpose(m, [order.index(i) for i in idx])

    def conditional(self, target: Sequence[str], given: Sequence[str]) -> np.ndarray:
        """p(target | given), axes (given..., target...). Rows with p(given)=0 are NaN."""
        j = self.marginal(list(given) + list(target))
        g = self.marginal(given)
        shape = g.shape + (1,) * len(target)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(g.reshape(shape) > 0, j / g.reshape(shape), np.nan)
