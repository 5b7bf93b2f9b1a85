"""Pointwise BGK collision integrators.

Both integrators keep the conservative moments of every node unchanged, so
the equilibrium can be computed once from the incoming distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularCollisionError
from .lattice import LatticeModel, conserved, maxwellian


@dataclass(frozen=True)
class RelaxationParams:
    tau: float = 0.0
    singular_tol: float = 1e-12

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"relaxation time must be nonnegative, got {self.tau}")
        if not self.singular_tol > 0:
            raise ValueError("singular_tol must be positive")


def c2_denominator(dt, params: RelaxationParams):
    """``2 tau + dt`` and whether it passes the singularity guard."""
    denom = 2.0 * params.tau + dt
    if params.tau == 0:
        return denom, True
    scale = max(abs(dt), params.tau, 1.0)
    return denom, abs(denom) > params.singular_tol * scale


def collide_c1(f, dt, params: RelaxationParams, model: LatticeModel) -> np.ndarray:
    """Implicit Euler relaxation ``(dt f_eq + tau f) / (dt + tau)``."""
    f = np.asarray(f)
    feq = maxwellian(conserved(f), model)
    if params.tau == 0:
        return feq
    denom = dt + params.tau
    if abs(denom) <= params.singular_tol * max(abs(dt), params.tau, 1.0):
        raise SingularCollisionError(f"dt + tau vanishes for dt={dt}", dt=dt)
    return (dt * feq + params.tau * f) / denom


def collide_c2(f, dt, params: RelaxationParams, model: LatticeModel, stage=None) -> np.ndarray:
    """Crank-Nicolson relaxation ``((2tau - dt) f + 2 dt f_eq) / (2tau + dt)``.

    At ``tau = 0`` this is the reflection ``2 f_eq - f`` whatever ``dt``.
    """
    f = np.asarray(f)
    feq = maxwellian(conserved(f), model)
    if params.tau == 0:
        return 2.0 * feq - f
    if dt == 0:
        return f.copy()
    denom, ok = c2_denominator(dt, params)
    if not ok:
        where = f" at stage {stage}" if stage is not None else ""
        raise SingularCollisionError(
            f"2*tau + dt = {denom:.3e} is singular{where} (tau={params.tau}, dt={dt})",
            stage=stage,
            dt=dt,
        )
    return ((2.0 * params.tau - dt) * f + 2.0 * dt * feq) / denom
