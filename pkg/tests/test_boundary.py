import numpy as np
import pytest
from numpy.testing import assert_allclose

from bdryfronts.boundary import (BoundaryRiemannError,
                                 CharacteristicHyperbolicBlockError,
                                 LinearBoundaryProblem, MarginalSpectrumError,
                                 RELATION_STAR, check_inviscid_trace,
                                 check_viscous_trace, layer_equation_residual,
                                 linear_boundary_trace,
                                 mixed_boundary_residual, reintegrate_profile,
                                 solve_boundary_layer, solve_boundary_riemann,
                                 stable_subspace)
from bdryfronts.riemann import rankine_hugoniot_residual, lax_admissible
from bdryfronts.systems import (burgers, lagrangian_euler, linear_system,
                                p_system, raw_eigenvalues)

BURGERS = burgers()
GISCLON_A = np.diag([-1.0, 1.0])
GISCLON_D = np.array([[1.0, 0.0], [1.0, 1.0]])


# ----------------------------------------------------------------------
# stable subspace
# ----------------------------------------------------------------------

def test_stable_subspace_diagonal():
    B = stable_subspace(np.diag([-1.0, 1.0]))
    assert B.shape == (2, 1)
    assert_allclose(np.abs(B[:, 0]), [1.0, 0.0], atol=1e-14)


def test_stable_subspace_coupled():
    # eigenvector for -1 of [[-1,0],[1,1]] is (2,-1)/sqrt(5)
    M = np.array([[-1.0, 0.0], [1.0, 1.0]])
    B = stable_subspace(M)
    assert B.shape == (2, 1)
    direction = B[:, 0] * np.sign(B[0, 0])
    assert_allclose(direction, [2 / np.sqrt(5), -1 / np.sqrt(5)], atol=1e-12)
    # invariance: M B = B (B^T M B)
    assert np.linalg.norm(M @ B - B @ (B.T @ M @ B)) <= 1e-10
    assert np.linalg.eigvals(B.T @ M @ B).real.max() < 0


def test_stable_subspace_full_space():
    B = stable_subspace(-np.eye(3))
    assert B.shape == (3, 3)


def test_stable_subspace_marginal_spectrum():
    with pytest.raises(MarginalSpectrumError):
        stable_subspace(np.diag([0.0, 1.0]))


@pytest.mark.parametrize("seed", range(5))
def test_stable_subspace_invariance_random(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(4, 4))
    eigs = np.linalg.eigvals(M)
    if np.abs(eigs.real).min() <= 1e-10:
        pytest.skip("random matrix accidentally marginal")
    B = stable_subspace(M)
    if B.size:
        assert np.linalg.norm(M @ B - B @ (B.T @ M @ B)) <= 1e-10
        assert np.linalg.eigvals(B.T @ M @ B).real.max() < 0


# ----------------------------------------------------------------------
# linear boundary trace
# ----------------------------------------------------------------------

def test_linear_trace_identity_diffusion():
    prob = LinearBoundaryProblem(matrix=GISCLON_A, diffusion=np.eye(2),
                                 initial=[0.0, 0.0], datum=[1.0, 1.0])
    trace, fan = linear_boundary_trace(prob)
    assert_allclose(trace, [0.0, 1.0], atol=1e-12)
    assert len(fan.waves) == 1
    w = fan.waves[0]
    assert_allclose(w.speed, 1.0)
    assert_allclose(w.left, [0.0, 1.0], atol=1e-12)
    assert_allclose(w.right, [0.0, 0.0], atol=1e-12)
    # datum - trace in the stable subspace of D^-1 A = A
    S = stable_subspace(GISCLON_A)
    resid = (np.eye(2) - S @ S.T) @ (np.array([1.0, 1.0]) - trace)
    assert np.abs(resid).max() <= 1e-10


def test_linear_trace_depends_on_diffusion():
    prob = LinearBoundaryProblem(matrix=GISCLON_A, diffusion=GISCLON_D,
                                 initial=[0.0, 0.0], datum=[1.0, 1.0])
    trace, fan = linear_boundary_trace(prob)
    assert_allclose(trace, [0.0, 1.5], atol=1e-12)
    # same advection, different diffusion: traces differ by 0.5
    prob_id = LinearBoundaryProblem(matrix=GISCLON_A, diffusion=np.eye(2),
                                    initial=[0.0, 0.0], datum=[1.0, 1.0])
    trace_id, _ = linear_boundary_trace(prob_id)
    assert np.abs(trace - trace_id).max() >= 0.5 - 1e-12


def test_linear_trace_equal_data_trivial():
    c = np.array([0.3, -0.2])
    prob = LinearBoundaryProblem(matrix=GISCLON_A, diffusion=np.eye(2),
                                 initial=c, datum=c)
    trace, fan = linear_boundary_trace(prob)
    assert_allclose(trace, c, atol=1e-14)
    assert fan.waves == ()


# ----------------------------------------------------------------------
# mixed boundary condition
# ----------------------------------------------------------------------

def test_mixed_residual_full_dirichlet():
    assert_allclose(mixed_boundary_residual(BURGERS, [0.3], [0.3]), [0.0])
    r = mixed_boundary_residual(BURGERS, [0.4], [0.1])
    assert_allclose(r, [0.3])


def test_mixed_residual_velocity_only_for_piston():
    sys = p_system(gamma=2.0, viscosity="navier-stokes")
    r = mixed_boundary_residual(sys, [1.1, 0.25], [1.0, 0.1])
    # the hyperbolic (volume) transport coefficient vanishes identically:
    # only the parabolic velocity component is constrained
    assert r.shape == (1,)
    assert_allclose(r, [0.15])


def test_mixed_residual_characteristic_block_rejected():
    # a genuinely varying sub-block eigenvalue near zero is ill-posed
    from bdryfronts.systems import (GENUINELY_NONLINEAR, SystemDef)
    sys = SystemDef(
        dimension=2,
        flux=lambda v: np.array([0.5 * v[0] ** 2, v[1]]),
        flux_jac=lambda v: np.array([[v[0], 0.0], [0.0, 1.0]]),
        viscosity=lambda v: np.diag([0.0, 1.0]),
        field_kinds=(GENUINELY_NONLINEAR, GENUINELY_NONLINEAR),
        ref_state=np.array([0.0, 0.0]),
        radius=0.5,
    )
    with pytest.raises(CharacteristicHyperbolicBlockError):
        mixed_boundary_residual(sys, [0.1, 0.2], [0.0, 0.0])


# ----------------------------------------------------------------------
# boundary layers
# ----------------------------------------------------------------------

def test_burgers_layer_matches_tanh():
    # closed form of w' = (w^2 - 1)/2 with w(0) = 0: w(y) = -tanh(y/2)
    prof = solve_boundary_layer(BURGERS, [-1.0], [0.0])
    assert prof is not None
    mask = prof.y <= 20.0
    assert np.abs(prof.w[mask, 0] + np.tanh(prof.y[mask] / 2)).max() <= 1e-6
    assert prof.endpoint_residual <= 1e-6
    assert layer_equation_residual(BURGERS, prof) <= 1e-7
    assert prof.center_size == 0.0
    # shooting consistency: forward re-integration returns to the far field
    assert np.abs(reintegrate_profile(BURGERS, prof) - (-1.0)).max() <= 1e-6


def test_burgers_layer_unstable_side_rejected():
    # the orbit from w(0)=0 decays to -1, never to +1
    assert solve_boundary_layer(BURGERS, [1.0], [0.0]) is None


def test_trivial_layer_equal_states():
    prof = solve_boundary_layer(BURGERS, [0.4], [0.4])
    assert prof is not None
    assert prof.is_constant
    assert prof.center_size == 0.0


def test_center_layer_algebraic_decay():
    # sonic far field: w' = w^2/2 from w(0) = -1/2 decays like -2/y
    prof = solve_boundary_layer(BURGERS, [0.0], [-0.5])
    assert prof is not None
    w_exact = -0.5 / (1 + 0.25 * prof.y)
    assert np.abs(prof.w[:, 0] - w_exact).max() <= 1e-7
    assert prof.center_size == pytest.approx(-0.5, abs=1e-8)
    assert prof.endpoint_residual <= 1e-6
    # growth side of the center manifold admits no layer
    assert solve_boundary_layer(BURGERS, [0.0], [0.5]) is None


def test_psystem_layer_roundtrip():
    # build a wall state by shooting, then recover the layer from it
    from bdryfronts.boundary import _LayerShoot
    sys = p_system(gamma=2.0)
    shoot = _LayerShoot(sys, np.array([1.0, 0.0]))
    wall = shoot.wall_state(np.array([0.05]))
    prof = solve_boundary_layer(sys, [1.0, 0.0], wall)
    assert prof is not None
    assert np.abs(prof.wall_state - wall).max() <= 1e-7
    assert layer_equation_residual(sys, prof) <= 1e-7
    assert prof.endpoint_residual <= 1e-6


def test_lagrangian_viscosity_only_trivial_layers():
    sys = p_system(gamma=2.0, viscosity="navier-stokes")
    # matching velocity: constant profile regardless of the volume component
    prof = solve_boundary_layer(sys, [1.1, 0.05], [0.9, 0.05])
    assert prof is not None and prof.is_constant
    # mismatched velocity: no steady profile exists
    assert solve_boundary_layer(sys, [1.0, 0.05], [1.0, 0.1]) is None


# ----------------------------------------------------------------------
# trace relations
# ----------------------------------------------------------------------

def test_viscous_trace_equal_states():
    w = check_viscous_trace(BURGERS, [0.25], [0.25])
    assert w is not None
    assert w.boundary_shock is None
    assert w.profile.is_constant


def test_viscous_trace_burgers_layer():
    w = check_viscous_trace(BURGERS, [-1.0], [0.0])
    assert w is not None
    assert_allclose(w.subtrace, [-1.0])


def test_viscous_trace_zero_speed_shock_orientation():
    # The parked shock is compressive with the subtrace on the left:
    # lambda(sub) >= 0 >= lambda(trace).  The flux-matching partner of the
    # trace -1/2 is +1/2; with datum ~ +1/2 the relation holds through the
    # parked shock, while the mirrored orientation admits no layer.
    w = check_viscous_trace(BURGERS, [-0.5], [0.5])
    assert w is not None
    assert w.subtrace[0] == pytest.approx(0.5, abs=1e-6)
    # viscous-oracle-confirmed negative case: a trace with positive speed
    # cannot be reached from a datum on the other side of the sonic point
    assert check_viscous_trace(BURGERS, [0.5], [-0.5 - 0.01]) is None


def test_viscous_trace_nontrivial_shock_witness():
    # datum slightly below the flux partner: layer into +0.502.. then shock
    w = check_viscous_trace(BURGERS, [-0.5], [0.45])
    assert w is not None
    if w.boundary_shock is not None:
        assert lax_admissible(BURGERS, w.boundary_shock)
        assert rankine_hugoniot_residual(BURGERS, w.boundary_shock) <= 1e-9


def test_noncharacteristic_witness_is_trace():
    # p-system is non-characteristic: the witness far field equals the trace
    sys = p_system(gamma=2.0)
    from bdryfronts.boundary import _LayerShoot
    shoot = _LayerShoot(sys, np.array([1.0, 0.0]))
    wall = shoot.wall_state(np.array([0.03]))
    w = check_viscous_trace(sys, [1.0, 0.0], wall)
    assert w is not None
    assert np.array_equal(w.subtrace, np.array([1.0, 0.0]))
    assert w.boundary_shock is None


def test_inviscid_trace_relation():
    # Riemann fan from datum 0.5 to trace -0.6 is a single shock with
    # sigma < 0: related; trace +0.6 gives entering waves: not related
    assert check_inviscid_trace(BURGERS, [-0.6], [0.5])
    assert not check_inviscid_trace(BURGERS, [0.6], [0.5])


# ----------------------------------------------------------------------
# boundary Riemann solver
# ----------------------------------------------------------------------

def test_boundary_riemann_trivial():
    fan = solve_boundary_riemann(BURGERS, [0.3], [0.3])
    assert fan.waves == ()
    assert_allclose(fan.trace, [0.3], atol=1e-9)


def test_boundary_riemann_matches_linear_theory():
    for D in (np.eye(2), GISCLON_D):
        lin = linear_system(GISCLON_A, D=D)
        fan = solve_boundary_riemann(lin, [0.0, 0.0], [1.0, 1.0])
        prob = LinearBoundaryProblem(matrix=GISCLON_A, diffusion=D,
                                     initial=[0.0, 0.0], datum=[1.0, 1.0])
        trace, _ = linear_boundary_trace(prob)
        assert np.abs(fan.trace - trace).max() <= 1e-8
        for w in fan.waves:
            assert w.min_speed > 0


@pytest.mark.parametrize("interior,datum,expect", [
    (0.8, -0.5, "center"),      # sonic layer + entering rarefaction
    (-0.3, -0.5, "direct"),     # trace reached by the layer alone
    (0.3, 0.5, "entering"),     # entering shock
    (0.8, 0.5, "entering"),     # entering rarefaction
    (-0.7, 0.5, "direct"),      # hitting state absorbed
    (-0.5, 0.5, "parked"),      # 0-speed shock parked at the wall
])
def test_boundary_riemann_burgers_structures(interior, datum, expect):
    fan = solve_boundary_riemann(BURGERS, [interior], [datum])
    assert fan.template == expect
    # outgoing waves compose from the trace to the interior state
    state = fan.trace.copy()
    for w in fan.waves:
        assert np.abs(w.left - state).max() <= 1e-8
        state = w.right
        assert w.min_speed > -1e-9
    assert np.abs(state - interior).max() <= 1e-7
    # the witness relation holds for the produced trace
    wtn = check_viscous_trace(BURGERS, fan.trace, [datum])
    assert wtn is not None


def test_boundary_riemann_center_case_values():
    fan = solve_boundary_riemann(BURGERS, [0.8], [-0.5])
    assert_allclose(fan.trace, [0.0], atol=1e-8)
    assert fan.char_size == pytest.approx(-0.5, abs=1e-6)
    assert len(fan.waves) == 1
    assert fan.waves[0].kind == "rarefaction"
    assert fan.waves[0].speed_range[1] == pytest.approx(0.8, abs=1e-8)


def test_boundary_riemann_piston():
    sys = p_system(gamma=2.0, viscosity="navier-stokes")
    fan = solve_boundary_riemann(sys, [1.0, 0.0], [1.05, 0.02])
    # only the velocity is prescribed at a piston
    assert fan.trace[1] == pytest.approx(0.02, abs=1e-9)
    assert all(w.min_speed > 0 for w in fan.waves)


def test_boundary_riemann_euler_parked_contact():
    sys = lagrangian_euler(viscosity="navier-stokes")
    vstar = sys.ref_state
    datum = vstar + np.array([0.02, 0.01, -0.01])
    interior = vstar + np.array([-0.01, 0.0, 0.02])
    fan = solve_boundary_riemann(sys, interior, datum)
    assert fan.template == "contact"
    assert fan.boundary_shock is not None
    assert fan.boundary_shock.kind == "contact"
    assert abs(fan.boundary_shock.speed) <= 1e-9
    assert fan.char_size == pytest.approx(fan.boundary_shock.strength)
    # velocity and energy take the datum values at the wall
    assert np.abs(fan.layer.wall_state[1:] - datum[1:]).max() <= 1e-8
    state = fan.trace.copy()
    for w in fan.waves:
        state = w.right
    assert np.abs(state - interior).max() <= 1e-7


def test_boundary_riemann_star_relation():
    # Gisclon data: the Riemann-based trace keeps only non-entering waves
    lin = linear_system(GISCLON_A, D=GISCLON_D)
    fan = solve_boundary_riemann(lin, [0.0, 0.0], [1.0, 1.0],
                                 relation=RELATION_STAR)
    assert_allclose(fan.trace, [0.0, 1.0], atol=1e-12)
    fan_visc = solve_boundary_riemann(lin, [0.0, 0.0], [1.0, 1.0])
    assert np.abs(fan.trace - fan_visc.trace).max() >= 0.1


def test_boundary_riemann_star_agrees_when_diffusion_identity():
    lin = linear_system(GISCLON_A, D=np.eye(2))
    fan_star = solve_boundary_riemann(lin, [0.0, 0.0], [1.0, 1.0],
                                      relation=RELATION_STAR)
    fan_visc = solve_boundary_riemann(lin, [0.0, 0.0], [1.0, 1.0])
    assert np.abs(fan_star.trace - fan_visc.trace).max() <= 1e-8
