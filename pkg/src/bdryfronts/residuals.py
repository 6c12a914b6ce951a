"""Distributional residuals of front-tracking output against test functions.

The approximate solution is piecewise constant with fronts moving linearly
between events, so for a smooth compactly supported test function phi the
space integrals of f(v) phi_x are exact (telescoping over the pieces) and
only smooth one-dimensional quadratures remain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tracking import Trajectory

_GAUSS10 = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class BumpTestFunction:
    """Smooth bump phi(t, x) = B((t-tc)/rt) B((x-xc)/rx) supported on a box.

    B(z) = exp(-1/(1-z^2)) inside |z| < 1 and 0 outside; all derivatives
    vanish at the edge, so phi is smooth and compactly supported in the open
    quadrant whenever the box is.
    """

    t_center: float
    t_radius: float
    x_center: float
    x_radius: float

    @staticmethod
    def _bump(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        inside = np.abs(z) < 1.0
        zi = z[inside]
        out[inside] = np.exp(-1.0 / (1.0 - zi * zi))
        return out

    @staticmethod
    def _bump_prime(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        inside = np.abs(z) < 1.0
        zi = z[inside]
        d = 1.0 - zi * zi
        out[inside] = np.exp(-1.0 / d) * (-2.0 * zi / d ** 2)
        return out

    def phi(self, t, x):
        return (self._bump((t - self.t_center) / self.t_radius)
                * self._bump((x - self.x_center) / self.x_radius))

    def phi_t(self, t, x):
        return (self._bump_prime((t - self.t_center) / self.t_radius)
                / self.t_radius
                * self._bump((x - self.x_center) / self.x_radius))

    def phi_x(self, t, x):
        return (self._bump((t - self.t_center) / self.t_radius)
                * self._bump_prime((x - self.x_center) / self.x_radius)
                / self.x_radius)

    @property
    def t_span(self):
        return self.t_center - self.t_radius, self.t_center + self.t_radius

    @property
    def x_span(self):
        return self.x_center - self.x_radius, self.x_center + self.x_radius


def _gauss_panels(a: float, b: float, breaks, max_width: float):
    """Gauss-10 nodes and weights on [a, b] split at ``breaks`` and refined
    to panels no wider than max_width."""
    pts = [a, b]
    for c in breaks:
        if a < c < b:
            pts.append(float(c))
    pts = np.unique(pts)
    nodes = []
    weights = []
    gx, gw = _GAUSS10
    for lo, hi in zip(pts[:-1], pts[1:]):
        n_sub = max(1, int(np.ceil((hi - lo) / max_width)))
        edges = np.linspace(lo, hi, n_sub + 1)
        for p, q in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (p + q)
            half = 0.5 * (q - p)
            nodes.append(mid + half * gx)
            weights.append(half * gw)
    if not nodes:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(nodes), np.concatenate(weights)


def space_time_residual(traj: Trajectory, test: BumpTestFunction,
                        density, flux) -> float:
    """integral of density(v) phi_t + flux(v) phi_x over the quadrant.

    ``density`` and ``flux`` map a state to a scalar; for the weak form of a
    single conservation-law component pass the corresponding components of g
    and f, for the entropy inequality pass the entropy/flux pair.
    """
    t_lo, t_hi = test.t_span
    x_lo, x_hi = test.x_span
    t_lo = max(t_lo, 0.0)
    x_lo = max(x_lo, 0.0)
    if t_hi <= t_lo or x_hi <= x_lo:
        return 0.0

    seg_times = [seg.t0 for seg in traj.segments] + [traj.segments[-1].t1]
    t_nodes, t_weights = _gauss_panels(t_lo, min(t_hi, traj.t_end), seg_times,
                                       max_width=test.t_radius / 8.0)
    total = 0.0
    for tn, tw in zip(t_nodes, t_weights):
        xs, states = traj.profile(tn)
        # piece boundaries restricted to the support
        edges = [x_lo] + [float(x) for x in xs if x_lo < x < x_hi] + [x_hi]
        acc = 0.0
        for j in range(len(edges) - 1):
            a, b = edges[j], edges[j + 1]
            if b <= a:
                continue
            v = _state_at(xs, states, 0.5 * (a + b))
            # exact x-integral of flux(v) phi_x over the piece
            acc += flux(v) * (test.phi(tn, b) - test.phi(tn, a))
            xn, xw = _gauss_panels(a, b, [], max_width=test.x_radius / 8.0)
            acc += density(v) * float(test.phi_t(tn, xn) @ xw)
        total += tw * acc
    return float(total)


def _state_at(xs, states, x):
    i = int(np.searchsorted(xs, x, side="right"))
    return states[i]


def weak_solution_residual(traj: Trajectory, test: BumpTestFunction
                           ) -> float:
    """Max over components of the weak-form defect of g(v)_t + f(v)_x = 0."""
    sys = traj.sys
    worst = 0.0
    for comp in range(sys.dimension):
        r = space_time_residual(
            traj, test,
            density=lambda v, c=comp: float(sys.g(v)[c]),
            flux=lambda v, c=comp: float(sys.f(v)[c]))
        worst = max(worst, abs(r))
    return worst


def entropy_residual(traj: Trajectory, test: BumpTestFunction) -> float:
    """Signed entropy-form integral; admissible solutions make it >= -C delta
    for nonnegative test functions."""
    sys = traj.sys
    if sys.entropy is None:
        raise ValueError("system carries no entropy pair")
    return space_time_residual(traj, test, density=sys.eta,
                               flux=sys.entropy_flux)


def l1_profile_distance(traj: Trajectory, reference, t: float,
                        x_lo: float, x_hi: float, samples: int = 4000
                        ) -> float:
    """L1 distance between the tracked profile at time t and a reference
    callable of x over [x_lo, x_hi]."""
    xs = np.linspace(x_lo, x_hi, samples)
    dx = xs[1] - xs[0]
    acc = 0.0
    for x in xs:
        acc += float(np.abs(traj.eval(t, x)
                            - np.asarray(reference(x), dtype=float)).sum())
    return acc * dx
