"""Lax wave curves, shock admissibility, and the exact interior Riemann solver.

Wave strengths follow the classical convention: on a genuinely nonlinear
family, s > 0 parameterizes the rarefaction branch (integral curve of r_k)
and s < 0 the Hugoniot branch; linearly degenerate families use the single
smooth contact curve.  Curves are parameterized so that d(state)/ds = r_k at
s = 0 with the normalization fixed by the eigenstructure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .systems import (GENUINELY_NONLINEAR, LINEARLY_DEGENERATE, SystemDef,
                      directional_eigenvalue_derivative, eigen_structure,
                      family_eigenvector, raw_eigenvalues)

#: Fallback cap on wave-curve parameters (small-data regime); systems
#: carry their own cap in SystemDef.s_max.
S_MAX = 0.2


def _cap(sys: SystemDef, s_max):
    return float(sys.s_max if s_max is None else s_max)

#: Fixed step count of the 4th-order integrator for curve integration.
CURVE_STEPS = 64

_GAUSS = np.polynomial.legendre.leggauss(12)

SHOCK = "shock"
CONTACT = "contact"
RAREFACTION = "rarefaction"
NON_PHYSICAL = "non-physical"


class RiemannSolverError(RuntimeError):
    """Newton iteration on the wave strengths failed to converge."""


class SmallDataError(RuntimeError):
    """A wave curve left the admissible neighborhood of the reference state."""


# ----------------------------------------------------------------------
# Curve integration
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePath:
    """Dense output of a wave-curve integration, with cubic Hermite access."""

    s_nodes: np.ndarray      # shape (m,), from 0 to s (monotone)
    states: np.ndarray       # shape (m, N)
    derivs: np.ndarray       # shape (m, N), d(state)/ds at the nodes

    def __call__(self, s: float) -> np.ndarray:
        nodes = self.s_nodes
        ascending = nodes[-1] >= nodes[0]
        t = np.clip(s, min(nodes[0], nodes[-1]), max(nodes[0], nodes[-1]))
        if ascending:
            i = int(np.searchsorted(nodes, t, side="right") - 1)
        else:
            i = int(np.searchsorted(-nodes, -t, side="right") - 1)
        i = max(0, min(i, len(nodes) - 2))
        h = nodes[i + 1] - nodes[i]
        if h == 0:
            return self.states[i].copy()
        x = (t - nodes[i]) / h
        h00 = (1 + 2 * x) * (1 - x) ** 2
        h10 = x * (1 - x) ** 2
        h01 = x * x * (3 - 2 * x)
        h11 = x * x * (x - 1)
        return (h00 * self.states[i] + h * h10 * self.derivs[i]
                + h01 * self.states[i + 1] + h * h11 * self.derivs[i + 1])

    @property
    def end(self) -> np.ndarray:
        return self.states[-1].copy()


def _curve_direction(sys: SystemDef, v, k: int, previous=None) -> np.ndarray:
    """Normalized k-th eigenvector field used for curve integration.

    For LD families the unit eigenvector is oriented continuously against
    ``previous``; GNL normalization (grad(lambda).r = 1) is
    orientation-invariant by itself.
    """
    lam, r = family_eigenvector(sys, v, k)
    if sys.field_kinds[k] == LINEARLY_DEGENERATE:
        if previous is not None and float(np.dot(r, previous)) < 0.0:
            r = -r
        return r
    d = directional_eigenvalue_derivative(sys, v, k, r)
    if abs(d) < 1e-10 * (1.0 + abs(lam)):
        raise RiemannSolverError(
            f"genuine nonlinearity degenerates along family {k} at {v}")
    return r / d


def integrate_curve(sys: SystemDef, v0, k: int, s: float,
                    n_steps: int = CURVE_STEPS) -> CurvePath:
    """Integrate d(state)/ds = r_k(state) from 0 to s with fixed-step RK4."""
    v0 = np.asarray(v0, dtype=float)
    h = s / n_steps
    nodes = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, v0.size))
    derivs = np.empty_like(states)
    v = v0.copy()
    nodes[0] = 0.0
    states[0] = v
    prev = _curve_direction(sys, v, k, None)
    derivs[0] = prev
    for i in range(n_steps):
        k1 = _curve_direction(sys, v, k, prev)
        k2 = _curve_direction(sys, v + 0.5 * h * k1, k, k1)
        k3 = _curve_direction(sys, v + 0.5 * h * k2, k, k1)
        k4 = _curve_direction(sys, v + h * k3, k, k1)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        prev = k1
        nodes[i + 1] = (i + 1) * h
        states[i + 1] = v
        derivs[i + 1] = _curve_direction(sys, v, k, prev)
    if not sys.in_ball(v, slack=1.2):
        raise SmallDataError(
            f"small-data regime violated: curve endpoint {v} left the "
            f"admissible ball around {sys.ref_state}")
    return CurvePath(s_nodes=nodes, states=states, derivs=derivs)


def _averaged_pencil(sys: SystemDef, va, vb):
    """Flux and conserved Jacobians averaged along the segment [va, vb]."""
    nodes, weights = _GAUSS
    t = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    A = np.zeros((sys.dimension, sys.dimension))
    G = np.zeros_like(A)
    identity_g = sys.has_identity_conserved()
    for ti, wi in zip(t, w):
        p = va + ti * (vb - va)
        A += wi * sys.df(p)
        if not identity_g:
            G += wi * sys.dg(p)
    if identity_g:
        G = np.eye(sys.dimension)
    return A, G


def hugoniot_state(sys: SystemDef, v0, k: int, s: float,
                   max_iter: int = 60, tol: float = 1e-14):
    """State and speed at parameter s on the k-th Hugoniot locus through v0.

    Uses the averaged-Jacobian characterization: v - v0 is the k-th
    eigenvector of the segment-averaged pencil, normalized against the left
    eigenvector at v0 so that the locus is tangent to r_k(v0) at s = 0.
    """
    v0 = np.asarray(v0, dtype=float)
    dec = eigen_structure(sys, v0)
    if abs(s) < 1e-15:
        return v0.copy(), dec.lam(k)
    ell = dec.l(k)
    v = v0 + s * dec.r(k)
    sigma = dec.lam(k)
    scale = 1.0 + np.linalg.norm(v0)
    for _ in range(max_iter):
        A, G = _averaged_pencil(sys, v0, v)
        if sys.has_identity_conserved():
            M = A
        else:
            M = np.linalg.solve(G, A)
        lam, R = np.linalg.eig(M)
        if np.abs(lam.imag).max() > 1e-8 * (1 + np.abs(lam).max()):
            raise RiemannSolverError(
                f"averaged pencil lost hyperbolicity between {v0} and {v}")
        order = np.argsort(lam.real)
        sigma = float(lam.real[order[k]])
        rho = R.real[:, order[k]]
        denom = float(ell @ rho)
        if abs(denom) < 1e-12:
            raise RiemannSolverError("Hugoniot eigenvector degenerated")
        rho = rho / denom
        v_new = v0 + s * rho
        delta = np.abs(v_new - v).max()
        v = v_new
        if delta <= tol * scale:
            break
    else:
        raise RiemannSolverError(
            f"Hugoniot fixed point failed to converge at s={s} from {v0}")
    if not sys.in_ball(v, slack=1.2):
        raise SmallDataError(
            f"small-data regime violated: Hugoniot state {v} left the "
            f"admissible ball")
    return v, sigma


def wave_curve(sys: SystemDef, v0, k: int, s: float,
               s_max=None) -> np.ndarray:
    """State at parameter s along the k-th Lax curve through v0."""
    s_max = _cap(sys, s_max)
    if abs(s) > s_max:
        raise SmallDataError(f"wave strength {s} exceeds cap {s_max}")
    v0 = np.asarray(v0, dtype=float)
    if abs(s) < 1e-15:
        return v0.copy()
    if sys.field_kinds[k] == LINEARLY_DEGENERATE:
        return integrate_curve(sys, v0, k, s).end
    if s > 0:
        return integrate_curve(sys, v0, k, s).end
    state, _ = hugoniot_state(sys, v0, k, s)
    return state


# ----------------------------------------------------------------------
# Waves and fans
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Wave:
    """A single wave: shock, contact, rarefaction, or non-physical front."""

    family: Optional[int]        # 0-based family index; None for non-physical
    kind: str
    left: np.ndarray
    right: np.ndarray
    strength: float
    speed: float                              # shock/contact/NP propagation speed
    speed_range: Optional[tuple[float, float]] = None   # rarefactions only
    path: Optional[CurvePath] = None

    @property
    def jump(self) -> float:
        return float(np.linalg.norm(self.right - self.left))

    @property
    def min_speed(self) -> float:
        return self.speed_range[0] if self.speed_range else self.speed

    @property
    def max_speed(self) -> float:
        return self.speed_range[1] if self.speed_range else self.speed


def make_wave(sys: SystemDef, left, k: int, s: float,
              s_max=None, steps: int = CURVE_STEPS) -> Wave:
    """Construct the k-wave of strength s with left state ``left``."""
    left = np.asarray(left, dtype=float)
    s_max = _cap(sys, s_max)
    if abs(s) > s_max:
        raise SmallDataError(f"wave strength {s} exceeds cap {s_max}")
    if sys.field_kinds[k] == LINEARLY_DEGENERATE:
        path = integrate_curve(sys, left, k, s, n_steps=steps)
        right = path.end
        sigma = 0.5 * (raw_eigenvalues(sys, left)[k]
                       + raw_eigenvalues(sys, right)[k])
        return Wave(family=k, kind=CONTACT, left=left, right=right,
                    strength=s, speed=float(sigma), path=path)
    if s >= 0:
        path = integrate_curve(sys, left, k, s, n_steps=steps)
        right = path.end
        lo = float(raw_eigenvalues(sys, left)[k])
        hi = float(raw_eigenvalues(sys, right)[k])
        return Wave(family=k, kind=RAREFACTION, left=left, right=right,
                    strength=s, speed=0.5 * (lo + hi),
                    speed_range=(lo, hi), path=path)
    right, sigma = hugoniot_state(sys, left, k, s)
    return Wave(family=k, kind=SHOCK, left=left, right=right,
                strength=s, speed=float(sigma))


def rankine_hugoniot_residual(sys: SystemDef, wave: Wave) -> float:
    """Max-norm defect of sigma*[g] = [f] across a discontinuity."""
    lhs = wave.speed * (sys.g(wave.right) - sys.g(wave.left))
    rhs = sys.f(wave.right) - sys.f(wave.left)
    return float(np.abs(lhs - rhs).max())


def lax_admissible(sys: SystemDef, wave: Wave, tol: float = 1e-9) -> bool:
    """Lax inequalities lambda_k(right) <= sigma <= lambda_k(left)."""
    if wave.kind not in (SHOCK, CONTACT):
        return True
    k = wave.family
    lam_l = raw_eigenvalues(sys, wave.left)[k]
    lam_r = raw_eigenvalues(sys, wave.right)[k]
    return (lam_r <= wave.speed + tol) and (wave.speed <= lam_l + tol)


@dataclass(frozen=True, eq=False)
class RiemannFan:
    """Self-similar solution of an interior Riemann problem."""

    system: SystemDef
    left: np.ndarray
    right: np.ndarray
    waves: tuple[Wave, ...]
    states: tuple[np.ndarray, ...]   # left, intermediate..., right
    strengths: np.ndarray            # all N strengths, including ~0 entries

    def __iter__(self):
        return iter(self.waves)


def build_wave_sequence(sys: SystemDef, v_start, strengths,
                        families=None, s_max=None,
                        floor: float = 1e-12, steps: int = CURVE_STEPS):
    """Chain wave curves left-to-right; returns (states, waves).

    ``strengths`` is one parameter per entry of ``families`` (all families in
    ascending order when omitted).  Entries below ``floor`` produce no wave.
    """
    if families is None:
        families = range(sys.dimension)
    states = [np.asarray(v_start, dtype=float)]
    waves = []
    level = floor * (1.0 + np.linalg.norm(v_start))
    for k, s in zip(families, strengths):
        if abs(s) <= level:
            continue
        wave = make_wave(sys, states[-1], k, float(s), s_max=s_max,
                         steps=steps)
        waves.append(wave)
        states.append(wave.right)
    return states, waves


def solve_riemann(sys: SystemDef, v_l, v_r, s_max=None,
                  max_iter: int = 50, tol: float = 1e-11) -> RiemannFan:
    """Solve the interior Riemann problem by Newton on the wave strengths.

    The iteration works in the left-eigenvector coordinates at v_l, which
    seeds the quasi-Newton matrix with the identity; the update is a Broyden
    rank-one correction with step halving on residual increase (the curves
    are only Lipschitz at s = 0, so derivative-based steps must be robust).
    """
    v_l = np.asarray(v_l, dtype=float)
    v_r = np.asarray(v_r, dtype=float)
    s_max = _cap(sys, s_max)
    n = sys.dimension
    scale = 1.0 + np.linalg.norm(v_r)

    if np.abs(v_l - v_r).max() <= 1e-14 * scale:
        return RiemannFan(system=sys, left=v_l, right=v_r.copy(), waves=(),
                          states=(v_l.copy(),), strengths=np.zeros(n))

    dec = eigen_structure(sys, v_l)
    L = dec.left

    def end_state(strengths):
        v = v_l
        for k in range(n):
            v = wave_curve(sys, v, k, float(strengths[k]), s_max=s_max)
        return v

    s = L @ (v_r - v_l)            # linearized seed: ds = L (v_r - v_l)
    np.clip(s, -0.9 * s_max, 0.9 * s_max, out=s)
    res = L @ (end_state(s) - v_r)
    J = np.eye(n)
    for _ in range(max_iter):
        if np.abs(res).max() <= tol * scale:
            break
        step = np.linalg.solve(J, -res)
        alpha = 1.0
        base = np.linalg.norm(res)
        while True:
            s_new = np.clip(s + alpha * step, -s_max, s_max)
            res_new = L @ (end_state(s_new) - v_r)
            if np.linalg.norm(res_new) < base or alpha < 1e-6:
                break
            alpha *= 0.5
        ds = s_new - s
        dres = res_new - res
        denom = float(ds @ ds)
        if denom > 0:
            J = J + np.outer(dres - J @ ds, ds) / denom
        s, res = s_new, res_new
    else:
        raise RiemannSolverError(
            f"Riemann solver failed between {v_l} and {v_r}: "
            f"last residual {np.abs(res).max():.3e}")

    states, waves = build_wave_sequence(sys, v_l, s, s_max=s_max)
    # Snap the right edge onto the datum; the mismatch is below tol*scale.
    if waves:
        states[-1] = v_r.copy()
        last = waves[-1]
        waves[-1] = Wave(family=last.family, kind=last.kind, left=last.left,
                         right=v_r.copy(), strength=last.strength,
                         speed=last.speed, speed_range=last.speed_range,
                         path=last.path)
    return RiemannFan(system=sys, left=v_l, right=v_r.copy(),
                      waves=tuple(waves), states=tuple(states), strengths=s)


def fan_speeds_consistent(fan: RiemannFan, tol: float = 1e-9) -> bool:
    """Weakly increasing speeds and strictly increasing families."""
    prev_max = -np.inf
    prev_family = -1
    for w in fan.waves:
        if w.family <= prev_family:
            return False
        if w.min_speed < prev_max - tol:
            return False
        prev_family = w.family
        prev_max = w.max_speed
    return True


def sample_fan(fan: RiemannFan, xi: float) -> np.ndarray:
    """Value of the self-similar solution at x/t = xi.

    Inside a rarefaction the parameter with lambda_k(state(s)) = xi is
    located by bisection to 1e-10 on the dense curve output.
    """
    sys = fan.system
    if not fan.waves:
        return fan.left.copy()
    if xi < fan.waves[0].min_speed:
        return fan.left.copy()
    if xi > fan.waves[-1].max_speed:
        return fan.right.copy()
    for i, w in enumerate(fan.waves):
        if w.kind in (SHOCK, CONTACT, NON_PHYSICAL):
            if xi < w.speed:
                return w.left.copy()
            continue
        lo, hi = w.speed_range
        if xi < lo:
            return w.left.copy()
        if xi <= hi:
            a, b = 0.0, w.strength
            for _ in range(200):
                mid = 0.5 * (a + b)
                lam = raw_eigenvalues(sys, w.path(mid))[w.family]
                if abs(lam - xi) <= 1e-10:
                    return w.path(mid)
                if lam < xi:
                    a = mid
                else:
                    b = mid
                if b - a < 1e-14:
                    break
            return w.path(0.5 * (a + b))
    return fan.right.copy()


def discretize_rarefaction(sys: SystemDef, wave: Wave, delta: float):
    """Split a rarefaction into jump fronts of equal strength <= delta.

    Each front travels at the characteristic speed of its right state; the
    concatenated endpoints reproduce the wave endpoints exactly.
    """
    if wave.kind != RAREFACTION:
        raise ValueError("can only discretize a rarefaction wave")
    if delta <= 0:
        raise ValueError("accuracy parameter must be positive")
    s = wave.strength
    if s <= 0:
        return []
    n = int(np.ceil(s / delta - 1e-12))
    n = max(n, 1)
    h = s / n
    pieces = []
    left = wave.left
    lam_left = wave.speed_range[0]
    for i in range(1, n + 1):
        right = wave.right if i == n else wave.path(i * h)
        lam_right = (wave.speed_range[1] if i == n
                     else float(raw_eigenvalues(sys, right)[wave.family]))
        pieces.append(Wave(family=wave.family, kind=RAREFACTION,
                           left=left, right=right, strength=h,
                           speed=lam_right,
                           speed_range=(lam_left, lam_right)))
        left = right
        lam_left = lam_right
    return pieces


def zero_speed_companion(sys: SystemDef, v, k: int, s_max=None,
                         max_iter: int = 40):
    """State on the k-Hugoniot locus through v whose shock speed vanishes.

    Returns (state, parameter) or None when the locus has no zero-speed
    point within the strength cap.  The state has the same flux as v.
    """
    v = np.asarray(v, dtype=float)
    s_max = _cap(sys, s_max)
    lam = raw_eigenvalues(sys, v)[k]
    s = -2.0 * lam       # sigma(s) ~ lambda_k + s/2
    if abs(s) > s_max:
        return None
    h = 1e-7
    for _ in range(max_iter):
        state, sigma = hugoniot_state(sys, v, k, s)
        if abs(sigma) <= 1e-12 * (1.0 + abs(lam)):
            return state, s
        _, sig_p = hugoniot_state(sys, v, k, s + h)
        dsig = (sig_p - sigma) / h
        if abs(dsig) < 1e-6:
            return None
        s = s - sigma / dsig
        if abs(s) > s_max:
            return None
    return None
