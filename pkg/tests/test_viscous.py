import numpy as np
import pytest
from numpy.testing import assert_allclose

from bdryfronts.boundary import LinearBoundaryProblem, linear_boundary_trace
from bdryfronts.systems import burgers, linear_system, p_system
from bdryfronts.viscous import (ViscousRegimeError, ghost_state, make_grid,
                                viscous_solve, viscous_step)

GISCLON_A = np.diag([-1.0, 1.0])


def test_constant_data_steady():
    lin = linear_system(GISCLON_A)
    sol = viscous_solve(lin, [0.3, 0.2], [0.3, 0.2], epsilon=1e-2,
                        t_end=0.05, dx=0.01, length=1.0)
    assert np.abs(sol.profiles[-1] - [0.3, 0.2]).max() == 0.0


def test_diffusion_max_principle():
    # pure heat block (A = 0 is not invertible; use tiny advection-free
    # check through a symmetric system with small wave content): instead
    # verify the discrete max principle on the scalar heat case directly.
    bu = burgers(diffusion=1.0)
    rng = np.random.default_rng(3)
    grid = make_grid(bu, epsilon=0.05, dx=0.02, length=1.0,
                     initial=lambda x: np.array([0.1 * np.sin(8 * x)]),
                     datum=[0.0])
    lo, hi = grid.states.min(), grid.states.max()
    for _ in range(50):
        viscous_step(grid)
        assert grid.states.min() >= lo - 1e-12
        assert grid.states.max() <= hi + 1e-12


def test_conservation_per_step():
    ps = p_system(gamma=2.0)
    grid = make_grid(ps, epsilon=1e-2, dx=0.01, length=1.0,
                     initial=lambda x: np.array([1.0 + 0.02 * (x > 0.5), 0.0]),
                     datum=[1.0, 0.0])
    for _ in range(40):
        viscous_step(grid)
    assert grid.conservation_defect <= 1e-10


def test_ghost_full_dirichlet_for_invertible_viscosity():
    lin = linear_system(GISCLON_A)
    grid = make_grid(lin, epsilon=1e-2, dx=0.01, length=0.5,
                     initial=[0.0, 0.0], datum=[0.5, -0.25])
    g = ghost_state(grid)
    assert_allclose(0.5 * (g + grid.states[0]), [0.5, -0.25], atol=1e-12)


def test_ghost_velocity_only_for_piston():
    sys = p_system(gamma=2.0, viscosity="navier-stokes")
    grid = make_grid(sys, epsilon=1e-2, dx=0.01, length=0.5,
                     initial=[1.05, 0.0], datum=[1.0, 0.1])
    g = ghost_state(grid)
    wall = 0.5 * (g + grid.states[0])
    # velocity takes the datum value; volume is free (zero gradient)
    assert wall[1] == pytest.approx(0.1, abs=1e-10)
    assert g[0] == pytest.approx(grid.states[0][0], abs=1e-10)


def test_burgers_travelling_viscous_shock_speed():
    bu = burgers()

    def init(x):
        return np.array([1.0]) if x < 2.0 else np.array([0.0])

    sol = viscous_solve(bu, init, [1.0], epsilon=0.01, t_end=1.0, dx=0.005,
                        length=6.0, sample_times=[0.5, 1.0])

    def crossing(profile, x):
        u = profile[:, 0]
        idx = int(np.where(u <= 0.5)[0][0])
        x0, x1 = x[idx - 1], x[idx]
        u0, u1 = u[idx - 1], u[idx]
        return x0 + (0.5 - u0) / (u1 - u0) * (x1 - x0)

    speed = ((crossing(sol.profiles[1], sol.x)
              - crossing(sol.profiles[0], sol.x))
             / (sol.times[1] - sol.times[0]))
    assert speed == pytest.approx(0.5, abs=0.02)


@pytest.mark.parametrize("D,expected", [
    (np.eye(2), [0.0, 1.0]),
    (np.array([[1.0, 0.0], [1.0, 1.0]]), [0.0, 1.5]),
])
def test_trace_estimates_match_linear_theory(D, expected):
    lin = linear_system(GISCLON_A, D=D)
    sol = viscous_solve(lin, [0.0, 0.0], [1.0, 1.0], epsilon=1e-3,
                        t_end=0.15, dx=1e-4, length=0.5)
    assert np.abs(sol.trace_estimates[-1] - expected).max() <= 5e-2
    prob = LinearBoundaryProblem(matrix=GISCLON_A, diffusion=D,
                                 initial=[0.0, 0.0], datum=[1.0, 1.0])
    trace, _ = linear_boundary_trace(prob)
    assert np.abs(sol.trace_estimates[-1] - trace).max() <= 5e-2


def test_layer_width_contained():
    # the region where the solution deviates from the trace estimate by
    # more than 10% of the datum-trace gap sits within x <= 30 eps
    lin = linear_system(GISCLON_A, D=np.eye(2))
    eps = 2e-3
    sol = viscous_solve(lin, [0.0, 0.0], [1.0, 1.0], epsilon=eps,
                        t_end=0.15, dx=2e-4, length=0.5)
    prof = sol.profiles[-1]
    trace = sol.trace_estimates[-1]
    gap = np.abs(np.array([1.0, 1.0]) - trace).max()
    dev = np.abs(prof - trace).max(axis=1)
    pre_wave = sol.x < 0.1     # stay away from the outgoing contact
    bad = pre_wave & (dev > 0.1 * gap)
    assert sol.x[bad].max(initial=0.0) <= 30 * eps


def test_out_of_regime_detected():
    ps = p_system(gamma=2.0)
    grid = make_grid(ps, epsilon=1e-2, dx=0.02, length=1.0,
                     initial=[1.0, 0.0], datum=[1.0, 2.5])
    with pytest.raises(ViscousRegimeError):
        for _ in range(2000):
            viscous_step(grid)


@pytest.mark.slow
def test_epsilon_refinement_monotone_linear():
    # L1 distance to the inviscid limit decreases along the epsilon sweep
    lin = linear_system(GISCLON_A, D=np.eye(2))
    prob = LinearBoundaryProblem(matrix=GISCLON_A, diffusion=np.eye(2),
                                 initial=[0.0, 0.0], datum=[1.0, 1.0])
    trace, _ = linear_boundary_trace(prob)
    t_end = 0.1

    def inviscid(x):
        # trace for x < t, initial state beyond the outgoing contact
        return np.where(x[:, None] < t_end, trace, [0.0, 0.0])

    errs = []
    for eps in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3):
        sol = viscous_solve(lin, [0.0, 0.0], [1.0, 1.0], epsilon=eps,
                            t_end=t_end, dx=min(eps / 5, 2e-3), length=0.5)
        window = (sol.x > 50 * 1e-3) & (sol.x < 0.4)
        diff = np.abs(sol.profiles[-1] - inviscid(sol.x)).sum(axis=1)
        errs.append(np.trapezoid(diff[window], sol.x[window]))
    assert all(a > b for a, b in zip(errs, errs[1:]))
