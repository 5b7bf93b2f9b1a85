import sys

import numpy as np
import pytest

from pdglbm.lattice import LatticeModel


def linear_model(m=1, lam=1.0, speed=0.5):
    """Lattice for ``w_t + speed * w_x = 0``; transport tests only need lam and m."""
    return LatticeModel(
        m=m,
        lam=lam,
        flux=lambda w: speed * w,
        max_wave_speed=lambda w: abs(speed) + 0.0 * np.real(w[..., 0]),
        name="linear",
    )


def dense_upwind(mesh, velocity, inflow):
    """Globally assembled upwind DG operator ``L f = A f + c`` for one velocity.

    Built from the textbook weak form with the diagonal Gauss-Lobatto mass
    matrix; unknowns are ordered cell by cell, node by node.
    """
    nodes, w, D = mesh.ref_nodes, mesh.ref_weights, mesh.deriv_matrix
    n, d, nc = len(nodes), mesh.degree, mesh.n_cells
    scale = 2.0 * abs(velocity) / mesh.h
    A = np.zeros((nc * n, nc * n))
    c = np.zeros(nc * n, dtype=np.result_type(inflow, float))
    for j in range(nc):
        blk = slice(j * n, (j + 1) * n)
        if velocity > 0:
            A[blk, blk] += scale * D
            row = j * n  # inflow node 0
            A[row, row] += scale / w[0]
            if j > 0:
                A[row, (j - 1) * n + d] -= scale / w[0]
            else:
                c[row] -= scale / w[0] * inflow
        else:
            A[blk, blk] -= scale * D
            row = j * n + d  # inflow node d
            A[row, row] += scale / w[d]
            if j < nc - 1:
                A[row, (j + 1) * n] -= scale / w[d]
            else:
                c[row] -= scale / w[d] * inflow
    return A, c


def dense_t1(mesh, lam, f, dt, left, right):
    """Oracle for ``(I + dt L) g = f`` via a dense direct solve of every component."""
    f = np.asarray(f)
    out = np.empty(f.shape, dtype=np.result_type(f, dt, float))
    nv = f.shape[-1]
    eye = np.eye(mesh.n_cells * mesh.n_nodes)
    for k in range(nv):
        v = lam if k % 2 else -lam
        A, c = dense_upwind(mesh, v, left[k] if v > 0 else right[k])
        rhs = f[..., k].ravel() - dt * c
        out[..., k] = np.linalg.solve(eye + dt * A, rhs).reshape(f.shape[:2])
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
