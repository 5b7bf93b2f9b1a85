"""Upwind nodal DG for constant-speed transport on the two-velocity lattice.

Fields have shape ``(n_cells, degree + 1, 2m)``.  The mass matrix is the
diagonal Gauss-Lobatto one, so on each cell and each velocity the
semi-discrete operator reads (for ``v > 0``)::

    (L f)_j = v (2/h) [D f_j - (up_j - f_j[0]) e_0 / w_0]

with ``up_j`` the right trace of the upstream cell.  The implicit system
``(I + dt L) g = f`` is block lower-triangular in flow order, so it is solved
cell by cell without assembling anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
from numpy.polynomial import legendre
from scipy.signal import lfilter

from .errors import TransportSolverError
from .lattice import LatticeModel, maxwellian, reverse_velocities

MAX_DEGREE = 8
COND_LIMIT = 1e12


@lru_cache(maxsize=None)
def _gauss_lobatto(d: int):
    coef = np.zeros(d + 1)
    coef[-1] = 1.0
    interior = legendre.legroots(legendre.legder(coef)) if d > 1 else np.array([])
    nodes = np.concatenate(([-1.0], np.sort(interior.real), [1.0]))
    # Newton polish on P'_d for the interior points
    for _ in range(3):
        if d < 2:
            break
        inner = nodes[1:-1]
        dp = legendre.legval(inner, legendre.legder(coef))
        ddp = legendre.legval(inner, legendre.legder(coef, 2))
        nodes[1:-1] = inner - dp / ddp
    weights = 2.0 / (d * (d + 1) * legendre.legval(nodes, coef) ** 2)

    # barycentric differentiation matrix
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    D = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    for arr in (nodes, weights, D):
        arr.setflags(write=False)
    return nodes, weights, D


def gauss_lobatto(d: int):
    """Reference Gauss-Lobatto nodes, weights and nodal derivative matrix on [-1, 1].

    Supported degrees are 1 to 8.  ``D[i, j]`` is the derivative of the
    j-th Lagrange basis polynomial at node i, so ``D @ u`` differentiates
    the interpolant of ``u``.
    """
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= MAX_DEGREE:
        raise ValueError(f"unsupported degree {d!r}; expected 1..{MAX_DEGREE}")
    return _gauss_lobatto(int(d))


@dataclass(frozen=True)
class DgMesh:
    a: float
    b: float
    n_cells: int
    degree: int
    ref_nodes: np.ndarray = field(init=False, repr=False)
    ref_weights: np.ndarray = field(init=False, repr=False)
    deriv_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("n_cells must be positive")
        if not self.b > self.a:
            raise ValueError("domain must satisfy a < b")
        nodes, weights, D = gauss_lobatto(self.degree)
        object.__setattr__(self, "ref_nodes", nodes)
        object.__setattr__(self, "ref_weights", weights)
        object.__setattr__(self, "deriv_matrix", D)

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.degree + 1

    @property
    def delta(self) -> float:
        """Smallest distance between two interpolation points of one cell."""
        return 0.5 * self.h * float(self.ref_nodes[1] - self.ref_nodes[0])

    @property
    def cell_left(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n_cells)

    @property
    def x(self) -> np.ndarray:
        """Physical node coordinates, shape ``(n_cells, degree + 1)``."""
        return self.cell_left[:, None] + 0.5 * self.h * (self.ref_nodes[None, :] + 1.0)

    @property
    def weights(self) -> np.ndarray:
        """Physical quadrature weights per node (each cell sums to h)."""
        return np.broadcast_to(0.5 * self.h * self.ref_weights, (self.n_cells, self.n_nodes))

    def integrate(self, values) -> np.ndarray:
        """Gauss-Lobatto integral over the domain of ``values[cell, node, ...]``."""
        values = np.asarray(values)
        w = 0.5 * self.h * self.ref_weights
        return np.tensordot(values, w, axes=([1], [0])).sum(axis=0)

    def norm(self, f) -> float:
        """Discrete L2 norm summed over all velocity components."""
        return float(np.sqrt(np.real(self.integrate(np.abs(f) ** 2)).sum()))

    def evaluate(self, f, points) -> np.ndarray:
        """Evaluate the piecewise polynomial ``f`` at arbitrary ``points``.

        Each point uses the polynomial of the cell containing it; points on
        an interface take the cell to their right (the last cell for ``b``).
        """
        f = np.asarray(f)
        points = np.asarray(points, dtype=float)
        flat = points.ravel()
        cell = np.clip(np.floor((flat - self.a) / self.h).astype(int), 0, self.n_cells - 1)
        xi = 2.0 * (flat - self.cell_left[cell]) / self.h - 1.0
        basis = lagrange_basis(self.ref_nodes, xi)
        vals = np.einsum("pj,pj...->p...", basis, f[cell])
        return vals.reshape(points.shape + f.shape[2:])


def lagrange_basis(nodes, xi) -> np.ndarray:
    """Values of the Lagrange polynomials on ``nodes`` at points ``xi``: shape (len(xi), len(nodes))."""
    nodes = np.asarray(nodes)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    n = len(nodes)
    out = np.ones((len(xi), n))
    for j in range(n):
        for k in range(n):
            if k != j:
                out[:, j] *= (xi - nodes[k]) / (nodes[j] - nodes[k])
    return out


def cfl_dt(beta: float, mesh: DgMesh, lam: float) -> float:
    return beta * mesh.delta / lam


@dataclass(frozen=True)
class BoundaryCondition:
    """Time-independent equilibrium inflow states at both ends."""

    left_state: np.ndarray
    right_state: np.ndarray

    def traces(self, model: LatticeModel):
        left = maxwellian(np.asarray(self.left_state, dtype=float), model)
        right = maxwellian(np.asarray(self.right_state, dtype=float), model)
        return left, right


class Transport:
    """Implicit upwind DG transport for every lattice velocity at once.

    Parameters
    ----------
    mesh : DgMesh
    model : LatticeModel
        Only ``lam`` and ``m`` are used.
    bc : BoundaryCondition
        Equilibrium inflow data; outflow ends need nothing.
    """

    def __init__(self, mesh: DgMesh, model: LatticeModel, bc: BoundaryCondition, cache_size=64):
        self.mesh = mesh
        self.model = model
        self.lam = model.lam
        self.left_trace, self.right_trace = bc.traces(model)
        self._cache = {}
        self._cache_size = cache_size

    # -- explicit operator -------------------------------------------------
    def apply(self, f, traces=None) -> np.ndarray:
        """Explicit application of L_h (upwind residual, same units as df/dt)."""
        left, right = traces if traces is not None else (self.left_trace, self.right_trace)
        f = np.asarray(f)
        mesh = self.mesh
        D, w = mesh.deriv_matrix, mesh.ref_weights
        d = mesh.degree
        scale = 2.0 * self.lam / mesh.h
        out = np.empty(f.shape, dtype=np.result_type(f, left, float))

        fp = f[..., 1::2]
        up = np.concatenate([left[1::2][None, :], fp[:-1, d, :]], axis=0)
        res = np.matmul(D, fp)
        res[:, 0, :] -= (up - fp[:, 0, :]) / w[0]
        out[..., 1::2] = scale * res

        fm = f[..., 0::2]
        up = np.concatenate([fm[1:, 0, :], right[0::2][None, :]], axis=0)
        res = np.matmul(D, fm)
        res[:, d, :] += (up - fm[:, d, :]) / w[d]
        out[..., 0::2] = -scale * res
        return out

    # -- local implicit blocks ---------------------------------------------
    def _blocks(self, dt):
        key = complex(dt)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        mesh = self.mesh
        D, w = mesh.deriv_matrix, mesh.ref_weights
        n, d = mesh.n_nodes, mesh.degree
        kappa = dt * 2.0 * self.lam / mesh.h
        eye = np.eye(n)
        blocks = []
        # +lam: inflow at node 0; -lam: inflow at node d
        for sign, node in ((1.0, 0), (-1.0, d)):
            k = sign * kappa
            A = eye + k * D
            A[node, node] += kappa / w[node]
            cond = np.linalg.cond(A)
            if not np.isfinite(cond) or cond > COND_LIMIT:
                raise TransportSolverError(
                    f"local transport block is singular (cond={cond:.3e}) for dt={dt}"
                )
            lu = scipy.linalg.lu_factor(A)
            P = scipy.linalg.lu_solve(lu, eye.astype(A.dtype))
            b = kappa / w[node] * P[:, node]
            blocks.append((P, b))
        if len(self._cache) >= self._cache_size:
            self._cache.pop(next(iter(self._cache)))
        self._cache[key] = blocks
        return blocks

    # -- implicit solves ---------------------------------------------------
    def solve_t1(self, f, dt, out=None, traces=None) -> np.ndarray:
        """Solve ``(I + dt L_h) g = f`` by flow-ordered cell sweeps.

        ``out`` may be ``f`` itself: every cell reads only its own old values
        and the already updated upstream trace.
        """
        f = np.asarray(f)
        if dt == 0:
            if out is None:
                return f.copy()
            if out is not f:
                out[...] = f
            return out
        left, right = traces if traces is not None else (self.left_trace, self.right_trace)
        (Pp, bp), (Pm, bm) = self._blocks(dt)
        d = self.mesh.degree
        dtype = np.result_type(f, Pp)
        if out is None:
            out = np.empty(f.shape, dtype=dtype)
        elif not np.can_cast(dtype, out.dtype):
            raise TypeError(f"cannot store {dtype} result in {out.dtype} array")

        # +lam components, left to right; upstream trace is node d of the previous cell
        a = np.tensordot(Pp, f[..., 1::2], axes=([1], [1]))  # (node, cell, k)
        up = _propagate(a[d], bp[d], left[1::2])
        a += bp[:, None, None] * up[None]
        out[..., 1::2] = a.transpose(1, 0, 2)

        # -lam components, right to left; upstream trace is node 0 of the next cell
        a = np.tensordot(Pm, f[..., 0::2], axes=([1], [1]))
        up = _propagate(a[0, ::-1], bm[0], right[0::2])[::-1]
        a += bm[:, None, None] * up[None]
        out[..., 0::2] = a.transpose(1, 0, 2)
        return out

    def solve_t2(self, f, dt, out=None, traces=None) -> np.ndarray:
        """Crank-Nicolson transport ``(I - dt/2 L)(I + dt/2 L)^-1 f`` computed as ``2g - f``."""
        f = np.asarray(f)
        if dt == 0:
            return self.solve_t1(f, 0, out=out)
        g = self.solve_t1(f, 0.5 * dt, traces=traces)
        g *= 2.0
        g -= f
        if out is None:
            return g
        out[...] = g
        return out

    def transport_signed(self, f, dt, out=None) -> np.ndarray:
        """T2 for any time step; negative real parts go through velocity reversal."""
        if np.real(dt) >= 0:
            return self.solve_t2(f, dt, out=out)
        traces = (reverse_velocities(self.left_trace), reverse_velocities(self.right_trace))
        g = self.solve_t2(reverse_velocities(f), -dt, traces=traces)
        g = reverse_velocities(g)
        if out is None:
            return g
        out[...] = g
        return out


def _propagate(a_out, r, inflow):
    """Upstream traces of each cell along the sweep.

    With ``s_0 = inflow`` and ``s_{j+1} = a_out[j] + r s_j`` (the outflow
    trace of cell j), returns ``s_0 .. s_{n-1}``, shape ``(n_cells, m)``.
    """
    zi = (r * inflow)[None, :]
    s, _ = lfilter([1.0], [1.0, -r], a_out, axis=0, zi=zi)
    return np.concatenate([np.asarray(inflow, dtype=s.dtype)[None, :], s[:-1]], axis=0)
