"""Vectorial two-velocity lattice representation of a system of m conservation laws.

Distribution values are stored on the last axis with interleaved pairing:
index ``2k`` carries velocity ``-lam`` and ``2k+1`` carries ``+lam`` for the
conserved component ``k``.  Every function here accepts arrays of arbitrary
leading shape, real or complex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ModelEvaluationError

FluxFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LatticeModel:
    """m conservation laws with flux ``flux`` relaxed on the lattice ``(-lam, +lam)``.

    Attributes
    ----------
    m : int
        Number of conserved variables.
    lam : float
        Lattice speed, must be positive.
    flux : callable
        Maps ``w[..., m]`` to ``q(w)[..., m]``.  Must be analytic (no abs,
        no sqrt of the state) so that complex states are supported.
    max_wave_speed : callable
        Maps real ``w[..., m]`` to the spectral radius of the flux Jacobian.
    name : str
        Short tag used in reports.
    """

    m: int
    lam: float
    flux: FluxFn
    max_wave_speed: FluxFn
    name: str = "custom"
    variables: tuple = ()

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not self.lam > 0:
            raise ValueError(f"lattice speed must be positive, got {self.lam}")

    @property
    def nv(self) -> int:
        return 2 * self.m

    @property
    def velocities(self) -> np.ndarray:
        return np.tile([-self.lam, self.lam], self.m)


def maxwellian(w, model: LatticeModel) -> np.ndarray:
    """Equilibrium distribution whose moments are ``(w, q(w))``."""
    w = np.asarray(w)
    if w.shape[-1] != model.m:
        raise ValueError(f"state has {w.shape[-1]} components, model expects {model.m}")
    try:
        q = np.asarray(model.flux(w))
    except ZeroDivisionError as exc:
        raise ModelEvaluationError(str(exc)) from exc
    dtype = np.result_type(w, q, float)
    feq = np.empty(w.shape[:-1] + (2 * model.m,), dtype=dtype)
    half_q = q / (2.0 * model.lam)
    feq[..., 0::2] = 0.5 * w - half_q
    feq[..., 1::2] = 0.5 * w + half_q
    return feq


def moments(f, model: LatticeModel):
    """Return ``(w, z)``: densities and first moments of the distribution."""
    f = np.asarray(f)
    if f.shape[-1] != 2 * model.m:
        raise ValueError(f"distribution has {f.shape[-1]} components, expected {2 * model.m}")
    w = f[..., 0::2] + f[..., 1::2]
    z = model.lam * (f[..., 1::2] - f[..., 0::2])
    return w, z


def conserved(f) -> np.ndarray:
    """Conservative variables only (cheaper than :func:`moments`)."""
    f = np.asarray(f)
    return f[..., 0::2] + f[..., 1::2]


def check_subcharacteristic(model: LatticeModel, states) -> float:
    """Smallest ``lam - max_wave_speed(w)`` over ``states``.

    Complex states are judged by their real part.  A margin ``<= 0`` means
    the lattice is too slow for the system; callers decide what to do.
    """
    states = np.real(np.asarray(states, dtype=complex if np.iscomplexobj(states) else float))
    states = np.atleast_2d(states)
    if states.size == 0:
        raise ValueError("no states given")
    speeds = np.asarray(model.max_wave_speed(states))
    return float(model.lam - np.max(speeds))


def reverse_velocities(f) -> np.ndarray:
    """Swap the ``-lam`` and ``+lam`` components at every node (returns a copy)."""
    f = np.asarray(f)
    out = np.empty_like(f)
    out[..., 0::2] = f[..., 1::2]
    out[..., 1::2] = f[..., 0::2]
    return out
