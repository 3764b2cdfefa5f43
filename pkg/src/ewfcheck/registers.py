"""Named tensor-product registers carrying one pure state."""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .quantum import ProjectiveMeasurement, PureState, UnitaryOp, partial_trace


class Registers:
    """A pure state on a product of named subsystems.

    Operations return new objects; the underlying array is never mutated.
    """

    def __init__(self, names: Sequence[str], dims: Sequence[int], amplitudes):
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}")
        self.names = tuple(names)
        self.dims = tuple(int(d) for d in dims)
        amps = np.asarray(amplitudes, dtype=complex).reshape(self.dims)
        amps.setflags(write=False)
        self._psi = amps

    @classmethod
    def product(cls, parts: Sequence[tuple]) -> "Registers":
        """Build from ``(name, PureState)`` pairs, or ``((name1, name2), PureState)``
        for a state spanning several registers of dimension 2."""
        names, dims = [], []
        amps = np.ones(1, dtype=complex)
        for name, state in parts:
            if isinstance(name, tuple):
                k = len(name)
                sub = [int(round(state.dim ** (1 / k)))] * k
                if int(np.prod(sub)) != state.dim:
                    raise ValueError(f"cannot split dimension {state.dim} over {name}")
                names.extend(name)
                dims.extend(sub)
            else:
                names.append(name)
                dims.append(state.dim)
            amps = np.kron(amps, state.amplitudes)
        return cls(names, dims, amps)

    def _axes(self, regs: Sequence[str]) -> list:
        try:
            return [self.names.index(r) for r in regs]
        except ValueError:
            raise KeyError(f"unknown register in {regs}; have {self.names}") from None

    @property
    def vector(self) -> np.ndarray:
        return self._psi.reshape(-1)

    def state(self) -> PureState:
        return PureState(self.vector)

    def apply(self, op, regs: Sequence[str]) -> "Registers":
        """Apply ``op`` (UnitaryOp or matrix) to the listed registers, in that order."""
        if isinstance(regs, str):
            regs = (regs,)
        mat = op.matrix if isinstance(op, UnitaryOp) else np.asarray(op)
        axes = self._axes(regs)
        sub = [self.dims[a] for a in axes]
        dsub = int(np.prod(sub))
        if mat.shape != (dsub, dsub):
            raise ValueError(f"operator shape {mat.shape} does not fit registers {regs}")
        t = np.moveaxis(self._psi, axes, range(len(axes)))
        rest = t.shape[len(axes):]
        t = (mat @ t.reshape(dsub, -1)).reshape(tuple(sub) + rest)
        t = np.moveaxis(t, range(len(axes)), axes)
        return Registers(self.names, self.dims, t)

    def joint(self, measurements: Mapping[str, ProjectiveMeasurement]) -> np.ndarray:
        """Born-rule joint distribution of commuting measurements on distinct registers.

        Returned array has one axis per entry of ``measurements`` (insertion order).
        """
        t = self._psi
        lead = 0
        for reg, meas in measurements.items():
            ax = lead + self.names.index(reg)
            moved = np.moveaxis(t, ax, -1)
            # outcome axis goes after earlier outcome axes; branch_k = Pi_k on reg
            branches = np.stack([moved @ P.T for P in meas.projectors], axis=lead)
            t = np.moveaxis(branches, -1, ax + 1)
            lead += 1
        p = (np.abs(t) ** 2).reshape(t.shape[:lead] + (-1,)).sum(axis=-1)
        return p

    def reduced(self, keep: Sequence[str]) -> np.ndarray:
        """Reduced density matrix on ``keep`` (ordered as in ``self.names``)."""
        psi = self.vector
        rho = np.outer(psi, psi.conj())
        return partial_trace(rho, self.dims, self._axes(keep))

    def project(self, reg: str, proj) -> "Registers":
        """Unnormalized branch after applying a projector to ``reg``."""
        mat = np.asarray(proj)
        ax = self._axes([reg])[0]
        t = np.moveaxis(np.moveaxis(self._psi, ax, -1) @ mat.T, -1, ax)
        return Registers(self.names, self.dims, t)

    def norm2(self) -> float:
        return float(np.vdot(self._psi, self._psi).real)
