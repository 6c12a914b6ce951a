import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad, solve_ivp

from bdryfronts.riemann import (CONTACT, RAREFACTION, SHOCK, SmallDataError,
                                discretize_rarefaction, fan_speeds_consistent,
                                hugoniot_state, lax_admissible, make_wave,
                                rankine_hugoniot_residual, sample_fan,
                                solve_riemann, wave_curve,
                                zero_speed_companion)
from bdryfronts.systems import (burgers, lagrangian_euler, p_system,
                                raw_eigenvalues)

BURGERS = burgers()
PSYS = p_system(gamma=2.0)
EULER = lagrangian_euler()


def test_wave_curve_identity_at_zero():
    v0 = np.array([1.0, 0.05])
    assert_allclose(wave_curve(PSYS, v0, 0, 0.0), v0, atol=0)
    assert_allclose(wave_curve(PSYS, v0, 1, 0.0), v0, atol=0)


def test_burgers_shock_branch():
    # Rankine-Hugoniot gives sigma = (u_l + u_r) / 2 for the quadratic flux.
    state = wave_curve(BURGERS, [1.0], 0, -1.0, s_max=2.0)
    assert_allclose(state, [0.0], atol=1e-9)
    w = make_wave(BURGERS, [1.0], 0, -1.0, s_max=2.0)
    assert w.kind == SHOCK
    assert_allclose(w.speed, 0.5, atol=1e-9)
    assert rankine_hugoniot_residual(BURGERS, w) <= 1e-9 * (1 + 0.5)
    assert lax_admissible(BURGERS, w)


def _psystem_rarefaction_oracle(v0, s):
    """High-accuracy integration of dw/ds = r_2(w) with its own eigenvector
    code, normalized so that d(lambda_2)/ds = 1 along the curve."""
    gamma = 2.0

    def rhs(_, w):
        dp = -gamma * w[0] ** (-gamma - 1.0)
        lam2 = np.sqrt(-dp)
        r = np.array([1.0, -lam2])          # (df - lam) r = 0
        # d(lambda)/dv along r, analytic: lambda = sqrt(gamma) v^-(g+1)/2
        dlam_dv = -0.5 * (gamma + 1.0) * np.sqrt(gamma) * w[0] ** (
            -(gamma + 3.0) / 2.0)
        d = dlam_dv * r[0]
        return r / d

    sol = solve_ivp(rhs, (0.0, s), np.asarray(v0, float), rtol=1e-12,
                    atol=1e-14, dense_output=True)
    return sol.y[:, -1]


def test_p_system_rarefaction_curve_against_ode_oracle():
    v0 = np.array([1.0, 0.0])
    s = 0.1
    expected = _psystem_rarefaction_oracle(v0, s)
    state = wave_curve(PSYS, v0, 1, s)
    assert_allclose(state, expected, atol=1e-8)

    # Riemann invariant u + int sqrt(-p'(v)) dv is constant on 2-curves.
    def invariant(w):
        val = quad(lambda t: np.sqrt(2.0) * t ** -1.5, 1.0, w[0])[0]
        return w[1] + val

    assert abs(invariant(state) - invariant(v0)) <= 1e-8


@pytest.mark.parametrize("s", [1e-2, 1e-3])
def test_shock_speed_second_order(s):
    # sigma = (lambda_l + lambda_r)/2 + O(s^2) on GNL fields.
    for k in (0, 1):
        w = make_wave(PSYS, [1.0, 0.0], k, -s)
        lam_l = raw_eigenvalues(PSYS, w.left)[k]
        lam_r = raw_eigenvalues(PSYS, w.right)[k]
        err = abs(w.speed - 0.5 * (lam_l + lam_r))
        assert err <= 5.0 * s ** 2


def test_shock_speed_slope_fit():
    errs = []
    for s in (1e-2, 1e-3):
        w = make_wave(PSYS, [1.0, 0.0], 0, -s)
        lam_l = raw_eigenvalues(PSYS, w.left)[0]
        lam_r = raw_eigenvalues(PSYS, w.right)[0]
        errs.append(abs(w.speed - 0.5 * (lam_l + lam_r)))
    slope = np.log10(errs[0] / max(errs[1], 1e-300))
    assert slope >= 1.5


def test_lax_inequalities_strict_for_shocks():
    for s in (-0.05, -0.01):
        for k in (0, 1):
            w = make_wave(PSYS, [1.0, 0.0], k, s)
            lam_l = raw_eigenvalues(PSYS, w.left)[k]
            lam_r = raw_eigenvalues(PSYS, w.right)[k]
            assert lam_r < w.speed < lam_l


def test_contact_curve_satisfies_rankine_hugoniot():
    for s in (-0.05, 0.08):
        w = make_wave(EULER, EULER.ref_state, 1, s)
        assert w.kind == CONTACT
        assert abs(w.speed) <= 1e-10
        assert rankine_hugoniot_residual(EULER, w) <= 1e-9


def test_solve_riemann_equal_states_empty_fan():
    fan = solve_riemann(PSYS, [1.0, 0.0], [1.0, 0.0])
    assert fan.waves == ()
    assert_allclose(sample_fan(fan, 0.3), [1.0, 0.0])


def test_solve_riemann_burgers_single_shock():
    fan = solve_riemann(BURGERS, [1.0], [0.0], s_max=2.0)
    assert len(fan.waves) == 1
    w = fan.waves[0]
    assert w.kind == SHOCK
    assert_allclose(w.speed, 0.5, atol=1e-10)


def test_solve_riemann_p_system_symmetric_rarefactions():
    # Raising u from rest splits into two rarefactions; the polytropic
    # symmetry makes the strengths equal.  Verified against the Riemann
    # invariants: the middle state satisfies both invariant relations.
    fan = solve_riemann(PSYS, [1.0, 0.0], [1.0, 0.1])
    kinds = [w.kind for w in fan.waves]
    assert kinds == [RAREFACTION, RAREFACTION]
    s1, s2 = fan.waves[0].strength, fan.waves[1].strength
    assert_allclose(s1, s2, rtol=1e-7)
    mid = fan.states[1]

    def wfun(vol):
        return quad(lambda t: np.sqrt(2.0) * t ** -1.5, 1.0, vol)[0]

    # 1-curve: u - W(v) constant; 2-curve: u + W(v) constant,
    # where W(v) = int sqrt(-p'(t)) dt.
    assert abs((mid[1] - wfun(mid[0])) - (0.0 - wfun(1.0))) <= 1e-8
    assert abs((mid[1] + wfun(mid[0])) - (0.1 + wfun(1.0))) <= 1e-8
    assert fan_speeds_consistent(fan)


@pytest.mark.parametrize("sys,n", [(PSYS, 2), (EULER, 3)])
def test_round_trip_strength_recovery(sys, n):
    rng = np.random.default_rng(42)
    for _ in range(15):
        s = rng.uniform(-0.04, 0.04, size=n)
        v = sys.ref_state.copy()
        for k in range(n):
            v = wave_curve(sys, v, k, s[k])
        fan = solve_riemann(sys, sys.ref_state, v)
        assert np.abs(fan.strengths - s).max() <= 1e-8
        # composing the returned strengths reproduces the right state
        assert np.abs(fan.states[-1] - v).max() <= 1e-10 * (1 + np.abs(v).max())


def test_sample_fan_far_field_exact():
    fan = solve_riemann(PSYS, [1.0, 0.0], [1.02, 0.03])
    assert np.array_equal(sample_fan(fan, -1e9), fan.left)
    assert np.array_equal(sample_fan(fan, 1e9), fan.right)


def test_sample_fan_inside_burgers_rarefaction():
    fan = solve_riemann(BURGERS, [0.0], [1.0], s_max=2.0)
    for xi in (0.25, 0.5, 0.9):
        assert_allclose(sample_fan(fan, xi), [xi], atol=1e-9)
    assert_allclose(sample_fan(fan, -0.5), [0.0])
    assert_allclose(sample_fan(fan, 1.5), [1.0])


def test_discretize_rarefaction_counts_and_speeds():
    # single step when s <= delta
    w = make_wave(BURGERS, [0.0], 0, 0.05)
    pieces = discretize_rarefaction(BURGERS, w, 0.1)
    assert len(pieces) == 1
    assert_allclose(pieces[0].right, w.right)

    # Burgers 0 -> 1 with delta = 0.25: four fronts at the right-state speeds
    w = make_wave(BURGERS, [0.0], 0, 1.0, s_max=2.0)
    pieces = discretize_rarefaction(BURGERS, w, 0.25)
    assert len(pieces) == 4
    assert_allclose([p.speed for p in pieces], [0.25, 0.5, 0.75, 1.0],
                    atol=1e-9)
    # endpoints chain exactly and reproduce the wave endpoints
    assert np.array_equal(pieces[0].left, w.left)
    assert np.array_equal(pieces[-1].right, w.right)
    for a, b in zip(pieces, pieces[1:]):
        assert np.array_equal(a.right, b.left)


def test_discretize_zero_strength_empty():
    w = make_wave(BURGERS, [0.0], 0, 0.0)
    assert discretize_rarefaction(BURGERS, w, 0.25) == []


def test_small_data_guard():
    with pytest.raises(SmallDataError):
        wave_curve(PSYS, [1.0, 0.0], 0, 0.5)   # above the strength cap
    with pytest.raises(SmallDataError):
        wave_curve(BURGERS, [0.0], 0, -3.4, s_max=4.0)  # exits the ball


def test_zero_speed_companion_burgers():
    state, s = zero_speed_companion(BURGERS, [0.5], 0, s_max=2.0)
    assert_allclose(state, [-0.5], atol=1e-9)
    _, sigma = hugoniot_state(BURGERS, np.array([0.5]), 0, s)
    assert abs(sigma) <= 1e-10
