"""Reference solutions and error measurement.

Exact isothermal Riemann solver, the erf contact wave of the Euler system,
the smooth isothermal pulse, quadrature-based L2 errors and observed orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from .dg import DgMesh
from .fluxes import PolytropicParams, euler_conservative, isothermal_conservative
from .lattice import LatticeModel, conserved

ROUNDOFF_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# isothermal Riemann problem
# ---------------------------------------------------------------------------


def _wave_curve(rho, rho_side, c):
    """Velocity jump across a wave connecting ``rho_side`` to ``rho``.

    Rarefaction branch for ``rho <= rho_side``, shock branch otherwise.
    """
    if rho <= rho_side:
        return c * math.log(rho / rho_side)
    return c * (rho - rho_side) / math.sqrt(rho * rho_side)


@dataclass(frozen=True)
class RiemannSolutionIsothermal:
    rho_l: float
    u_l: float
    rho_r: float
    u_r: float
    c: float
    rho_star: float
    u_star: float

    @property
    def left_wave(self) -> str:
        return "shock" if self.rho_star > self.rho_l else "rarefaction"

    @property
    def right_wave(self) -> str:
        return "shock" if self.rho_star > self.rho_r else "rarefaction"

    def shock_speed(self, side: str) -> float:
        """Mass Rankine-Hugoniot speed of the shock on ``side`` ('left' or 'right')."""
        rho_k, u_k = (self.rho_l, self.u_l) if side == "left" else (self.rho_r, self.u_r)
        if self.rho_star == rho_k:
            return self.u_star + (-self.c if side == "left" else self.c)
        return (self.rho_star * self.u_star - rho_k * u_k) / (self.rho_star - rho_k)

    def wave_fronts(self):
        """``(lo, hi)`` speed ranges of the left and right waves."""
        c = self.c
        if self.left_wave == "shock":
            s = self.shock_speed("left")
            left = (s, s)
        else:
            left = (self.u_l - c, self.u_star - c)
        if self.right_wave == "shock":
            s = self.shock_speed("right")
            right = (s, s)
        else:
            right = (self.u_star + c, self.u_r + c)
        return left, right

    def sample(self, xi):
        """Density and velocity at similarity coordinates ``xi = x / t``."""
        xi = np.asarray(xi, dtype=float)
        c = self.c
        rho = np.empty_like(xi)
        u = np.empty_like(xi)
        (l0, l1), (r0, r1) = self.wave_fronts()

        left = xi < l0
        rho[left], u[left] = self.rho_l, self.u_l
        fan = (xi >= l0) & (xi < l1)
        u[fan] = xi[fan] + c
        rho[fan] = self.rho_l * np.exp((self.u_l - u[fan]) / c)
        star = (xi >= l1) & (xi < r0)
        rho[star], u[star] = self.rho_star, self.u_star
        fan = (xi >= r0) & (xi < r1)
        u[fan] = xi[fan] - c
        rho[fan] = self.rho_r * np.exp((u[fan] - self.u_r) / c)
        right = xi >= r1
        rho[right], u[right] = self.rho_r, self.u_r
        return rho, u

    def conservative(self, x, t):
        if t <= 0:
            rho = np.where(np.asarray(x) < 0, self.rho_l, self.rho_r)
            u = np.where(np.asarray(x) < 0, self.u_l, self.u_r)
        else:
            rho, u = self.sample(np.asarray(x, dtype=float) / t)
        return isothermal_conservative(rho, u)


def solve_riemann_isothermal(rho_l, u_l, rho_r, u_r, c, tol=1e-12) -> RiemannSolutionIsothermal:
    if rho_l <= 0 or rho_r <= 0:
        raise ValueError("densities must be positive")

    def mismatch(rho):
        return _wave_curve(rho, rho_l, c) + _wave_curve(rho, rho_r, c) + u_r - u_l

    lo, hi = min(rho_l, rho_r), max(rho_l, rho_r)
    while mismatch(lo) > 0:
        lo *= 0.5
        if lo < 1e-300:
            raise ArithmeticError("no positive intermediate density")
    while mismatch(hi) < 0:
        hi *= 2.0
    if mismatch(lo) == 0:
        rho_star = lo
    elif mismatch(hi) == 0:
        rho_star = hi
    else:
        rho_star = brentq(mismatch, lo, hi, xtol=tol * hi, rtol=4 * np.finfo(float).eps)
    u_star = u_l - _wave_curve(rho_star, rho_l, c)
    return RiemannSolutionIsothermal(rho_l, u_l, rho_r, u_r, c, rho_star, u_star)


# ---------------------------------------------------------------------------
# smooth exact / initial data
# ---------------------------------------------------------------------------

CONTACT_U = 0.01
CONTACT_P = 1.0
CONTACT_RHO = (2.0, 1.0)


def contact_wave_exact(x, t, gamma=1.4) -> np.ndarray:
    """Slowly moving erf-shaped contact discontinuity, an exact Euler solution."""
    x = np.asarray(x, dtype=float)
    omega = 0.5 * (1.0 - erf(10.0 * (x - CONTACT_U * t)))
    rho = omega * CONTACT_RHO[0] + (1.0 - omega) * CONTACT_RHO[1]
    return euler_conservative(rho, CONTACT_U, CONTACT_P, PolytropicParams(gamma))


def smooth_pulse_init(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return isothermal_conservative(1.0 + np.exp(-30.0 * x * x), np.zeros_like(x))


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class L2Error:
    total: float
    per_variable: tuple


def l2_error(f_a, f_b, mesh: DgMesh, model: LatticeModel | None = None) -> L2Error:
    """Quadrature L2 norm of ``f_a - f_b`` over cells, nodes and components.

    ``f_b`` may be an array of the same shape or a callable of the node
    coordinates returning such an array.  With ``model`` the norms of the
    conservative variables are reported too.
    """
    f_a = np.asarray(f_a)
    if callable(f_b):
        f_b = f_b(mesh.x)
    f_b = np.asarray(f_b)
    if f_a.shape != f_b.shape:
        raise ValueError(f"shape mismatch: {f_a.shape} vs {f_b.shape}")
    diff = f_a - f_b
    total = mesh.norm(diff)
    per_var = ()
    if model is not None:
        dw = conserved(diff)
        per_var = tuple(float(np.sqrt(np.real(mesh.integrate(np.abs(dw[..., k]) ** 2)))) for k in range(model.m))
    return L2Error(total, per_var)


def observed_order(errors, sizes):
    """Pairwise slopes ``log(e_i / e_{i+1}) / log(h_i / h_{i+1})``.

    Pairs whose finer error is non-positive or below the round-off floor
    yield ``nan``.
    """
    errors = [float(e) for e in errors]
    sizes = [float(h) for h in sizes]
    if len(errors) != len(sizes) or len(errors) < 2:
        raise ValueError("need at least two (error, size) pairs")
    slopes = []
    for e0, e1, h0, h1 in zip(errors, errors[1:], sizes, sizes[1:]):
        if not (e0 > 0 and e1 > 0) or e1 < ROUNDOFF_FLOOR or not np.isfinite(e0 * e1):
            slopes.append(float("nan"))
        else:
            slopes.append(math.log(e0 / e1) / math.log(h0 / h1))
    return slopes


# ---------------------------------------------------------------------------
# columnar cache of kinetic fields
# ---------------------------------------------------------------------------


def save_field(path, f, mesh: DgMesh):
    """Write ``f`` as text columns ``x f0 .. f{2m-1}`` (``_re``/``_im`` pairs if complex)."""
    f = np.asarray(f)
    nv = f.shape[-1]
    cols = [mesh.x.ravel()]
    names = ["x"]
    for k in range(nv):
        comp = f[..., k].ravel()
        if np.iscomplexobj(f):
            cols += [comp.real, comp.imag]
            names += [f"f{k}_re", f"f{k}_im"]
        else:
            cols.append(comp)
            names.append(f"f{k}")
    header = f"a={mesh.a!r} b={mesh.b!r} n_cells={mesh.n_cells} degree={mesh.degree}\n" + " ".join(names)
    np.savetxt(path, np.column_stack(cols), header=header, fmt="%.17e")


def load_field(path):
    """Inverse of :func:`save_field`: returns ``(f, mesh)``."""
    with open(path, encoding="utf-8") as fh:
        meta = fh.readline().lstrip("#").split()
        names = fh.readline().lstrip("#").split()
    info = dict(item.split("=") for item in meta)
    mesh = DgMesh(float(info["a"]), float(info["b"]), int(info["n_cells"]), int(info["degree"]))
    data = np.loadtxt(path)
    cplx = any(n.endswith("_im") for n in names)
    vals = data[:, 1:]
    if cplx:
        vals = vals[:, 0::2] + 1j * vals[:, 1::2]
    return vals.reshape(mesh.n_cells, mesh.n_nodes, -1), mesh
