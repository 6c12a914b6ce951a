import numpy as np
import pytest
from numpy.testing import assert_allclose

from bdryfronts.systems import (GENUINELY_NONLINEAR, LINEARLY_DEGENERATE,
                                HyperbolicityError,
                                MultipleCharacteristicFieldsError, SystemDef,
                                burgers, classify_boundary_field,
                                directional_eigenvalue_derivative,
                                eigen_structure, lagrangian_euler,
                                linear_system, make_system, p_system,
                                raw_eigenvalues, validate_system)


def catalogue_systems():
    return [
        linear_system(np.diag([-1.0, 1.0])),
        linear_system(np.diag([-1.0, 1.0]), D=[[1.0, 0.0], [1.0, 1.0]]),
        burgers(),
        burgers(shift=0.3),
        p_system(gamma=2.0),
        p_system(gamma=2.0, viscosity="navier-stokes"),
        lagrangian_euler(),
        lagrangian_euler(viscosity="navier-stokes"),
    ]


def ball_states(sys, count, seed=7):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, sys.dimension))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    radii = rng.uniform(size=(count, 1)) ** (1.0 / sys.dimension)
    return sys.ref_state + 0.95 * sys.radius * x * radii


@pytest.mark.parametrize("sys", catalogue_systems(), ids=lambda s: s.name + str(s.params.get("viscosity", "")))
def test_eigen_residuals_over_ball(sys):
    # (df - lambda dg) r = 0 and biorthogonality on 100 random ball states.
    for v in ball_states(sys, 100):
        dec = eigen_structure(sys, v)
        A = sys.df(v)
        G = sys.dg(v)
        for k in range(sys.dimension):
            res = (A - dec.lam(k) * G) @ dec.r(k)
            assert np.abs(res).max() <= 1e-10 * (1 + np.abs(A).max()) * max(
                1.0, np.linalg.norm(dec.r(k)))
        assert_allclose(dec.left @ dec.right, np.eye(sys.dimension),
                        atol=1e-10)


@pytest.mark.parametrize("sys", catalogue_systems(), ids=lambda s: s.name + str(s.params.get("viscosity", "")))
def test_eigen_normalization_over_ball(sys):
    # Independent oracle: central difference of the sorted eigenvalues along
    # the returned eigenvector direction.
    for v in ball_states(sys, 25, seed=8):
        dec = eigen_structure(sys, v)
        for k in range(sys.dimension):
            d = directional_eigenvalue_derivative(sys, v, k, dec.r(k))
            if sys.field_kinds[k] == GENUINELY_NONLINEAR:
                assert abs(d - 1.0) <= 1e-8
            else:
                assert_allclose(np.linalg.norm(dec.r(k)), 1.0, atol=1e-12)
                assert abs(d) <= 1e-8


def test_linear_diagonal_eigenstructure():
    sys = linear_system(np.diag([-1.0, 1.0]))
    dec = eigen_structure(sys, [0.7, -0.2])
    assert_allclose(dec.eigenvalues, [-1.0, 1.0], atol=1e-14)
    assert_allclose(np.abs(dec.right), np.eye(2), atol=1e-14)


def test_burgers_eigenstructure():
    sys = burgers()
    dec = eigen_structure(sys, [2.0])
    assert_allclose(dec.eigenvalues, [2.0], atol=1e-14)
    assert_allclose(dec.right, [[1.0]], atol=1e-10)


def test_p_system_sound_speeds():
    # Oracle: numerical eigendecomposition of the finite-difference Jacobian,
    # cross-checked against the analytic speeds -+sqrt(-p'(v)).
    gamma = 2.0
    sys = p_system(gamma=gamma)
    v = np.array([1.0, 0.0])

    def flux(w):
        return np.array([-w[1], w[0] ** -gamma])

    h = 1e-6
    J = np.column_stack([
        (flux(v + h * e) - flux(v - h * e)) / (2 * h)
        for e in np.eye(2)
    ])
    lam_fd = np.sort(np.linalg.eigvals(J).real)
    dec = eigen_structure(sys, v)
    assert_allclose(dec.eigenvalues, lam_fd, atol=1e-6)
    assert_allclose(dec.eigenvalues, [-np.sqrt(2.0), np.sqrt(2.0)], atol=1e-12)


def test_lagrangian_euler_middle_eigenvalue_vanishes():
    sys = lagrangian_euler()
    for v in ball_states(sys, 30, seed=3):
        lam = raw_eigenvalues(sys, v)
        assert abs(lam[1]) <= 1e-12
        assert lam[0] < -0.1 and lam[2] > 0.1


def test_classify_boundary_field():
    assert classify_boundary_field(linear_system(np.diag([-1.0, 1.0])),
                                   [0.0, 0.0]) is None
    assert classify_boundary_field(lagrangian_euler(),
                                   [1.0, 0.0, 2.5]) == 1
    assert classify_boundary_field(burgers(shift=0.3), [0.3]) == 0
    # stable under tiny perturbations of the query state
    sys = p_system(gamma=2.0)
    rng = np.random.default_rng(11)
    for v in ball_states(sys, 20, seed=5):
        base = classify_boundary_field(sys, v)
        for _ in range(3):
            pert = v + rng.uniform(-1e-12, 1e-12, size=2)
            assert classify_boundary_field(sys, pert) == base


def test_classify_multiple_fields_rejected():
    # decoupled pair of convex scalar fields, both crossing zero in the ball
    sys = SystemDef(
        dimension=2,
        flux=lambda v: np.array([0.5 * v[0] ** 2, 0.5 * v[1] ** 2]),
        flux_jac=lambda v: np.diag([v[0], v[1]]),
        viscosity=lambda v: np.eye(2),
        field_kinds=(GENUINELY_NONLINEAR, GENUINELY_NONLINEAR),
        ref_state=np.array([-0.1, 0.1]),
        radius=0.5,
    )
    with pytest.raises(MultipleCharacteristicFieldsError):
        classify_boundary_field(sys, [-0.1, 0.1])


def test_hyperbolicity_violations_detected():
    # rotation matrix: complex eigenvalues
    with pytest.raises(HyperbolicityError):
        linear_system([[0.0, -1.0], [1.0, 0.0]])
    # coalescing eigenvalues
    with pytest.raises(HyperbolicityError):
        linear_system(np.eye(2))


def test_viscosity_block_form_enforced():
    bad = SystemDef(
        dimension=2,
        flux=lambda v: np.array([-v[1], v[0] ** -2.0]),
        viscosity=lambda v: np.array([[0.0, 1.0], [0.0, 1.0]]),
        field_kinds=(GENUINELY_NONLINEAR, GENUINELY_NONLINEAR),
        ref_state=np.array([1.0, 0.0]),
    )
    with pytest.raises(ValueError):
        validate_system(bad)


def test_coupling_condition_warning():
    # e1 is an eigenvector of A and lies in ker D: coupling fails.
    with pytest.warns(UserWarning):
        linear_system(np.diag([-1.0, 1.0]), D=[[0.0, 0.0], [0.0, 1.0]])


def test_fd_jacobian_fallback_matches_exact():
    gamma = 2.0
    exact = p_system(gamma=gamma)
    approx = SystemDef(
        dimension=2,
        flux=lambda w: np.array([-w[1], w[0] ** -gamma]),
        viscosity=lambda w: np.eye(2),
        field_kinds=(GENUINELY_NONLINEAR, GENUINELY_NONLINEAR),
        ref_state=np.array([1.0, 0.0]),
        radius=0.5,
    )
    for v in ball_states(exact, 10, seed=9):
        d_exact = eigen_structure(exact, v)
        d_fd = eigen_structure(approx, v)
        assert_allclose(d_fd.eigenvalues, d_exact.eigenvalues, atol=1e-7)
        assert_allclose(d_fd.right, d_exact.right, atol=1e-4)


def test_make_system_dispatch():
    sys = make_system("p-system", gamma=2.0, viscosity="navier-stokes")
    assert sys.n_hyperbolic == 1 and sys.n_parabolic == 1
    sys = make_system("burgers")
    assert sys.n_hyperbolic == 0
    with pytest.raises(ValueError):
        make_system("nope")
