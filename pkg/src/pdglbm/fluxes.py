"""Isothermal and polytropic Euler fluxes written rationally in the conservative variables.

The rational form keeps the fluxes analytic so the same code runs on
complex states during complex-time-step compositions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleStateError, SingularFluxError
from .lattice import LatticeModel


@dataclass(frozen=True)
class IsothermalParams:
    c: float = 0.6

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"sound speed must be positive, got {self.c}")


@dataclass(frozen=True)
class PolytropicParams:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"polytropic exponent must exceed 1, got {self.gamma}")


def _density(w):
    rho = w[..., 0]
    if np.any(rho == 0):
        raise SingularFluxError("flux is singular at zero density")
    return rho


def isothermal_flux(w, params: IsothermalParams) -> np.ndarray:
    w = np.asarray(w)
    rho = _density(w)
    mom = w[..., 1]
    q = np.empty_like(w, dtype=np.result_type(w, float))
    q[..., 0] = mom
    q[..., 1] = mom * mom / rho + params.c**2 * rho
    return q


def euler_pressure(w, params: PolytropicParams):
    w = np.asarray(w)
    rho = _density(w)
    return (params.gamma - 1.0) * (w[..., 2] - 0.5 * w[..., 1] ** 2 / rho)


def euler_flux(w, params: PolytropicParams) -> np.ndarray:
    w = np.asarray(w)
    rho = _density(w)
    mom, energy = w[..., 1], w[..., 2]
    u = mom / rho
    p = (params.gamma - 1.0) * (energy - 0.5 * mom * u)
    q = np.empty_like(w, dtype=np.result_type(w, float))
    q[..., 0] = mom
    q[..., 1] = mom * u + p
    q[..., 2] = (energy + p) * u
    return q


def max_wave_speed_isothermal(w, params: IsothermalParams):
    w = np.real(np.asarray(w))
    rho = w[..., 0]
    if np.any(rho <= 0):
        raise InadmissibleStateError("non-positive density")
    return np.abs(w[..., 1] / rho) + params.c


def max_wave_speed_euler(w, params: PolytropicParams):
    w = np.real(np.asarray(w))
    rho = w[..., 0]
    if np.any(rho <= 0):
        raise InadmissibleStateError("non-positive density")
    p = euler_pressure(w, params)
    if np.any(p <= 0):
        raise InadmissibleStateError("non-positive pressure")
    return np.abs(w[..., 1] / rho) + np.sqrt(params.gamma * p / rho)


def euler_conservative(rho, u, p, params: PolytropicParams) -> np.ndarray:
    """Conservative state from primitive ``(rho, u, p)`` arrays."""
    rho, u, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, u, p)))
    return np.stack([rho, rho * u, 0.5 * rho * u**2 + p / (params.gamma - 1.0)], axis=-1)


def isothermal_conservative(rho, u) -> np.ndarray:
    rho, u = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(u, dtype=float))
    return np.stack([rho, rho * u], axis=-1)


def primitive(w, model: LatticeModel) -> dict:
    """Primitive variables for reporting: rho, u and (Euler only) p."""
    w = np.asarray(w)
    rho = w[..., 0]
    out = {"rho": rho, "u": w[..., 1] / rho}
    if model.name == "euler":
        out["p"] = (model.params.gamma - 1.0) * (w[..., 2] - 0.5 * w[..., 1] ** 2 / rho)
    return out


@dataclass(frozen=True)
class _BoundModel(LatticeModel):
    params: object = None


def isothermal_model(c: float = 0.6, lam: float = 2.0) -> LatticeModel:
    params = IsothermalParams(c)
    return _BoundModel(
        m=2,
        lam=lam,
        flux=lambda w: isothermal_flux(w, params),
        max_wave_speed=lambda w: max_wave_speed_isothermal(w, params),
        name="isothermal",
        variables=("rho", "u"),
        params=params,
    )


def euler_model(gamma: float = 1.4, lam: float = 2.0) -> LatticeModel:
    params = PolytropicParams(gamma)
    return _BoundModel(
        m=3,
        lam=lam,
        flux=lambda w: euler_flux(w, params),
        max_wave_speed=lambda w: max_wave_speed_euler(w, params),
        name="euler",
        variables=("rho", "u", "p"),
        params=params,
    )


def make_model(name: str, lam: float, c: float = 0.6, gamma: float = 1.4) -> LatticeModel:
    if name == "isothermal":
        return isothermal_model(c, lam)
    if name == "euler":
        return euler_model(gamma, lam)
    raise ValueError(f"unknown model {name!r} (expected 'isothermal' or 'euler')")
