import mpmath
import numpy as np
import pytest
from conftest import dense_t1, dense_upwind, linear_model
from hypothesis import given, settings
from hypothesis import strategies as st

from pdglbm.dg import BoundaryCondition, DgMesh, Transport, cfl_dt, gauss_lobatto, lagrange_basis
from pdglbm.errors import TransportSolverError


def _gl_oracle(d):
    """Gauss-Lobatto nodes and weights at 40 digits with mpmath."""
    with mpmath.workdps(40):
        # monomial coefficients of P_d from the three-term recurrence, highest first
        p_prev, p = [mpmath.mpf(1)], [mpmath.mpf(1), mpmath.mpf(0)]
        for n in range(1, d):
            a = [(2 * n + 1) * c / (n + 1) for c in p] + [mpmath.mpf(0)]
            b = [mpmath.mpf(0)] * 2 + [n * c / (n + 1) for c in p_prev]
            p_prev, p = p, [x - y for x, y in zip(a, b)]
        coeffs = p if d > 0 else p_prev
        deg = len(coeffs) - 1
        dp = [c * (deg - i) for i, c in enumerate(coeffs[:-1])]
        interior = sorted(mpmath.re(r) for r in mpmath.polyroots(dp, maxsteps=200, extraprec=200)) if d > 1 else []
        nodes = [mpmath.mpf(-1)] + interior + [mpmath.mpf(1)]
        weights = [2 / (d * (d + 1) * mpmath.polyval(coeffs, x) ** 2) for x in nodes]
        return np.array([float(x) for x in nodes]), np.array([float(w) for w in weights])


@pytest.mark.parametrize("d", range(1, 9))
def test_gauss_lobatto_matches_high_precision(d):
    nodes, weights, _ = gauss_lobatto(d)
    ref_nodes, ref_weights = _gl_oracle(d)
    np.testing.assert_allclose(nodes, ref_nodes, rtol=0, atol=2e-16)
    np.testing.assert_allclose(weights, ref_weights, rtol=2e-15, atol=0)


def test_gauss_lobatto_small_cases():
    nodes, weights, D = gauss_lobatto(1)
    np.testing.assert_array_equal(nodes, [-1, 1])
    np.testing.assert_array_equal(weights, [1, 1])
    np.testing.assert_allclose(D, [[-0.5, 0.5], [-0.5, 0.5]])
    nodes, weights, _ = gauss_lobatto(2)
    np.testing.assert_allclose(nodes, [-1, 0, 1], atol=1e-16)
    np.testing.assert_allclose(weights, [1 / 3, 4 / 3, 1 / 3], rtol=1e-15)


@pytest.mark.parametrize("d", range(1, 9))
def test_quadrature_exact_to_degree_2d_minus_1(d):
    nodes, weights, _ = gauss_lobatto(d)
    for k in range(2 * d):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert weights @ nodes**k == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("d", range(1, 9))
def test_derivative_matrix_exact_on_polynomials(d):
    nodes, _, D = gauss_lobatto(d)
    np.testing.assert_allclose(D @ np.ones(d + 1), 0.0, atol=1e-13)
    for k in range(1, d + 1):
        np.testing.assert_allclose(D @ nodes**k, k * nodes ** (k - 1), atol=2e-12)


@pytest.mark.parametrize("d", [0, 9, 2.0])
def test_unsupported_degree(d):
    with pytest.raises(ValueError):
        gauss_lobatto(d)


def test_gauss_lobatto_arrays_are_read_only():
    nodes, _, _ = gauss_lobatto(3)
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_mesh_geometry():
    mesh = DgMesh(-2.0, 2.0, 8, 3)
    assert mesh.h == 0.5
    assert mesh.x.shape == (8, 4)
    assert mesh.x[0, 0] == -2.0 and mesh.x[-1, -1] == 2.0
    # interfaces are shared by two nodes
    np.testing.assert_allclose(mesh.x[:-1, -1], mesh.x[1:, 0], atol=1e-15)
    assert float(mesh.integrate(np.ones((8, 4)))) == pytest.approx(4.0, rel=1e-15)
    assert float(mesh.integrate(mesh.x**2)) == pytest.approx(16.0 / 3.0, rel=1e-14)


def test_mesh_evaluate_reproduces_polynomials():
    mesh = DgMesh(0.0, 1.0, 5, 4)
    f = (mesh.x**4 - 2 * mesh.x)[..., None]
    pts = np.linspace(0.0, 1.0, 37)
    np.testing.assert_allclose(mesh.evaluate(f, pts)[:, 0], pts**4 - 2 * pts, atol=1e-13)


def test_lagrange_basis_is_cardinal():
    nodes, _, _ = gauss_lobatto(5)
    np.testing.assert_allclose(lagrange_basis(nodes, nodes), np.eye(6), atol=1e-14)


def test_cfl_dt_definition():
    mesh = DgMesh(-2.0, 2.0, 100, 5)
    # first interior d=5 Gauss-Lobatto node: -sqrt(1/3 + 2 sqrt(7)/21)
    x1 = -np.sqrt(1.0 / 3.0 + 2.0 * np.sqrt(7.0) / 21.0)
    delta = 0.04 * (x1 + 1.0) / 2.0
    assert cfl_dt(5.0, mesh, 2.0) == pytest.approx(5.0 * delta / 2.0, rel=1e-14)
    assert cfl_dt(5.0, DgMesh(-2.0, 2.0, 200, 5), 2.0) == pytest.approx(0.5 * cfl_dt(5.0, mesh, 2.0), rel=1e-14)


# ---------------------------------------------------------------------------
# upwind operator
# ---------------------------------------------------------------------------


def _transport(mesh, lam=1.0, left=None, right=None, m=1):
    model = linear_model(m=m, lam=lam)
    left = np.zeros(m) if left is None else np.array(left, float)
    right = np.zeros(m) if right is None else np.array(right, float)
    return Transport(mesh, model, BoundaryCondition(left, right))


def test_apply_hand_assembled_single_cell():
    # d = 1, h = 2, lam = 1: L f = D f - (up - f_0) e_0 for the +lam component
    mesh = DgMesh(-1.0, 1.0, 1, 1)
    tr = _transport(mesh, left=(0.0,), right=(0.0,))
    tr.left_trace = np.array([0.0, 3.0])
    tr.right_trace = np.array([5.0, 0.0])
    f = np.array([[[1.0, 1.0], [2.0, 2.0]]])  # f0 = f1 = (1, 2)
    out = tr.apply(f)
    # +lam: D f = (0.5, 0.5); node 0 penalty -(3 - 1) = -2
    np.testing.assert_allclose(out[0, :, 1], [-1.5, 0.5])
    # -lam: -(D f + (5 - 2) e_1) = -(0.5, 3.5)
    np.testing.assert_allclose(out[0, :, 0], [-0.5, -3.5])


def test_apply_matches_dense_assembly(rng):
    mesh = DgMesh(0.0, 2.0, 6, 3)
    tr = _transport(mesh, lam=1.7, m=2)
    tr.left_trace = rng.normal(size=4)
    tr.right_trace = rng.normal(size=4)
    f = rng.normal(size=(6, 4, 4))
    out = tr.apply(f)
    for k in range(4):
        v = 1.7 if k % 2 else -1.7
        A, c = dense_upwind(mesh, v, tr.left_trace[k] if v > 0 else tr.right_trace[k])
        np.testing.assert_allclose(out[..., k].ravel(), A @ f[..., k].ravel() + c, atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_apply_converges_to_derivative(d):
    errors = []
    for n in (8, 16, 32):
        mesh = DgMesh(0.0, 1.0, n, d)
        tr = _transport(mesh, lam=1.0)
        tr.left_trace = np.array([0.0, np.sin(0.0)])
        tr.right_trace = np.array([np.sin(1.0), 0.0])
        f = np.sin(mesh.x)[..., None].repeat(2, axis=-1)
        exact = np.cos(mesh.x)
        out = tr.apply(f)
        errors.append(mesh.norm(out[..., 1] - exact) + mesh.norm(out[..., 0] + exact))
    slopes = np.log2(np.array(errors[:-1]) / errors[1:])
    assert slopes.min() >= d - 0.3


# ---------------------------------------------------------------------------
# implicit solves
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("dt", [0.05, 0.7, 30.0, 0.1 + 0.05j, 0.4 - 0.2j])
def test_solve_t1_matches_dense_solve(rng, dt):
    mesh = DgMesh(-1.0, 1.0, 7, 3)
    tr = _transport(mesh, lam=2.0, m=2)
    tr.left_trace = rng.normal(size=4)
    tr.right_trace = rng.normal(size=4)
    f = rng.normal(size=(7, 4, 4))
    g = tr.solve_t1(f, dt)
    np.testing.assert_allclose(g, dense_t1(mesh, 2.0, f, dt, tr.left_trace, tr.right_trace), rtol=0, atol=1e-12)


def test_solve_t1_residual(rng):
    mesh = DgMesh(0.0, 1.0, 20, 5)
    tr = _transport(mesh, lam=2.0, left=(0.3,), right=(0.1,))
    f = rng.normal(size=(20, 6, 2))
    for dt in (1e-3, 0.2, 5.0, 0.3 + 0.1j):
        g = tr.solve_t1(f, dt)
        np.testing.assert_allclose(g + dt * tr.apply(g), f, atol=1e-11)


def test_solve_t1_in_place(rng):
    mesh = DgMesh(0.0, 1.0, 9, 4)
    tr = _transport(mesh, left=(1.0,), right=(2.0,))
    f = rng.normal(size=(9, 5, 2))
    expected = tr.solve_t1(f, 0.3)
    work = f.copy()
    tr.solve_t1(work, 0.3, out=work)
    np.testing.assert_array_equal(work, expected)
    assert np.array_equal(tr.solve_t1(f, 0), f)


def test_solve_t1_rejects_complex_into_real_buffer(rng):
    mesh = DgMesh(0.0, 1.0, 3, 2)
    tr = _transport(mesh)
    f = rng.normal(size=(3, 3, 2))
    with pytest.raises(TypeError):
        tr.solve_t1(f, 0.1 + 0.1j, out=f)


def test_singular_block_raises():
    # choose dt so that I + kappa (D + e_0 e_0^T / w_0) has a zero eigenvalue
    mesh = DgMesh(0.0, 2.0, 2, 3)
    tr = _transport(mesh, lam=1.0)
    _, w, D = gauss_lobatto(3)
    M = D.copy()
    M[0, 0] += 1.0 / w[0]
    mu = np.linalg.eigvals(M)[0]
    kappa = -1.0 / mu
    dt = kappa * mesh.h / 2.0
    with pytest.raises(TransportSolverError):
        tr.solve_t1(np.ones((2, 4, 2)), dt)


def test_t2_equals_both_paths(rng):
    # (I - dt/2 L) g with g = T1(dt/2) f must equal 2 g - f
    mesh = DgMesh(-1.0, 1.0, 10, 4)
    tr = _transport(mesh, lam=2.0, left=(0.2,), right=(0.7,))
    f = rng.normal(size=(10, 5, 2))
    for dt in (0.05, 1.0, 0.2 + 0.1j):
        g = tr.solve_t1(f, dt / 2)
        np.testing.assert_allclose(tr.solve_t2(f, dt), g - dt / 2 * tr.apply(g), atol=1e-12)


def _pulse(x):
    return np.exp(-40.0 * x * x)


def test_t2_second_order_in_time():
    mesh = DgMesh(-1.0, 1.0, 80, 6)
    tr = _transport(mesh, lam=1.0)
    f0 = np.stack([_pulse(mesh.x + 0.2), _pulse(mesh.x - 0.2)], axis=-1)
    t = 0.2
    exact = np.stack([_pulse(mesh.x + 0.2 + t), _pulse(mesh.x - 0.2 - t)], axis=-1)
    errors = []
    for n in (8, 16, 32):
        f = f0
        for _ in range(n):
            f = tr.solve_t2(f, t / n)
        errors.append(mesh.norm(f - exact))
    slopes = np.log2(np.array(errors[:-1]) / errors[1:])
    np.testing.assert_allclose(slopes, 2.0, atol=0.1)


def test_negative_step_is_spatial_mirror():
    # for even data and symmetric zero inflow, T(-dt) f is the mirror image of T(dt) f
    mesh = DgMesh(-1.0, 1.0, 12, 4)
    tr = _transport(mesh, lam=1.5)
    f = np.stack([_pulse(mesh.x) + 0.3 * mesh.x**2, 0.5 * _pulse(mesh.x)], axis=-1)
    fwd = tr.transport_signed(f, 0.13)
    back = tr.transport_signed(f, -0.13)
    np.testing.assert_allclose(back, fwd[::-1, ::-1, :], atol=1e-13)


def test_transport_preserves_equilibrium_constant(rng):
    mesh = DgMesh(0.0, 1.0, 10, 3)
    tr = _transport(mesh, lam=2.0, left=(1.3,), right=(1.3,))
    const = np.broadcast_to(tr.left_trace, (10, 4, 2)).copy()
    for dt in (0.1, -0.1, 0.2 + 0.1j, -0.3 + 0.05j, 4.0):
        np.testing.assert_allclose(tr.transport_signed(const, dt), const, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(-3, 3), beta=st.floats(-3, 3), seed=st.integers(0, 1000))
def test_solve_t1_linear_with_zero_inflow(alpha, beta, seed):
    r = np.random.default_rng(seed)
    mesh = DgMesh(0.0, 1.0, 5, 3)
    tr = _transport(mesh, lam=1.0)
    f, g = r.normal(size=(2, 5, 4, 2))
    lhs = tr.solve_t1(alpha * f + beta * g, 0.37)
    rhs = alpha * tr.solve_t1(f, 0.37) + beta * tr.solve_t1(g, 0.37)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_reversal_consistency(rng):
    # R T(dt) R on reversed traces equals the solve on the reversed velocities
    mesh = DgMesh(-1.0, 1.0, 6, 3)
    tr = _transport(mesh, lam=1.0, m=2)
    tr.left_trace = rng.normal(size=4)
    tr.right_trace = rng.normal(size=4)
    f = rng.normal(size=(6, 4, 4))
    out = tr.transport_signed(f, -0.2)
    rev = lambda a: a[..., [1, 0, 3, 2]]  # noqa: E731
    g = dense_t1(mesh, 1.0, rev(f), 0.1, rev(tr.left_trace), rev(tr.right_trace))
    np.testing.assert_allclose(out, rev(2 * g - rev(f)), atol=1e-12)
