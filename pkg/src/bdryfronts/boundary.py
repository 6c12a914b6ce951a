"""Viscous boundary machinery for the half-line x > 0.

This module implements the boundary condition of mixed hyperbolic-parabolic
type (full condition on the parabolic components, incoming-characteristic
conditions on the hyperbolic block), steady boundary-layer profiles solving

    D(w) w' = f(w) - f(v_under),   w(y) -> v_under as y -> +infinity,

the viscosity-consistent trace relation built from those layers (optionally
through a 0-speed compressive shock parked at the boundary), and the boundary
Riemann solver that produces the outgoing wave fan for given interior state
and boundary datum.  A Riemann-problem based trace relation that ignores the
viscosity ("star") is provided as a comparison baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .riemann import (CONTACT, CURVE_STEPS, RAREFACTION, SHOCK, RiemannFan,
                      Wave, build_wave_sequence, hugoniot_state,
                      integrate_curve, lax_admissible, make_wave, sample_fan,
                      solve_riemann, wave_curve, zero_speed_companion)
from .systems import (GENUINELY_NONLINEAR, LINEARLY_DEGENERATE, SystemDef,
                      _ball_samples, classify_boundary_field,
                      eigen_structure, eigenvalue_range, raw_eigenvalues)

RELATION_VISCOUS = "simD"
RELATION_STAR = "star"

#: Decay lengths: shooting anchor at 14 / (slowest stable rate), profile
#: tail out to 40 / (slowest nonzero rate).
SHOOT_LENGTH = 14.0
TAIL_LENGTH = 40.0

PROFILE_POINTS = 200
PROFILE_RATIO = 1.05


class MarginalSpectrumError(RuntimeError):
    """An eigenvalue sits within the margin of the imaginary axis."""


class DegenerateTraceError(RuntimeError):
    """The linear trace system is singular."""


class CharacteristicHyperbolicBlockError(RuntimeError):
    """The hyperbolic sub-block has a near-zero, non-structural eigenvalue."""


class DAEReductionError(RuntimeError):
    """The algebraic constraint of the layer system could not be solved."""


class BoundaryRiemannError(RuntimeError):
    """No admissible boundary fan was found."""


# ----------------------------------------------------------------------
# Linear theory
# ----------------------------------------------------------------------

def stable_subspace(M, margin: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the stable invariant subspace of M.

    Computed via an ordered real Schur decomposition; columns span the
    generalized eigenspace of eigenvalues with negative real part.

    Raises
    ------
    MarginalSpectrumError
        If an eigenvalue lies within ``margin`` of the imaginary axis.
    """
    M = np.asarray(M, dtype=float)
    eigs = np.linalg.eigvals(M)
    if np.abs(eigs.real).min() <= margin:
        raise MarginalSpectrumError(
            f"marginal spectrum: eigenvalue {eigs[np.abs(eigs.real).argmin()]} "
            f"within {margin} of the imaginary axis")
    _, Z, sdim = scipy.linalg.schur(
        M, output="real", sort=lambda re, im: re < -margin)
    return Z[:, :sdim]


@dataclass(frozen=True, eq=False)
class LinearBoundaryProblem:
    """Riemann-type data for the constant-coefficient half-line problem.

    ``matrix`` (symmetric, invertible) advects the state, ``diffusion``
    (positive definite) sets the viscous mechanism; ``initial`` and ``datum``
    are the constant initial and boundary states.
    """

    matrix: np.ndarray
    diffusion: np.ndarray
    initial: np.ndarray
    datum: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        D = np.asarray(self.diffusion, dtype=float)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "diffusion", D)
        object.__setattr__(self, "initial", np.asarray(self.initial, float))
        object.__setattr__(self, "datum", np.asarray(self.datum, float))
        if np.abs(A - A.T).max() > 1e-12 * (1 + np.abs(A).max()):
            raise ValueError("advection matrix must be symmetric")
        if abs(np.linalg.det(A)) < 1e-12:
            raise ValueError("advection matrix must be invertible")
        # positive definiteness in the quadratic-form sense (the symmetric
        # part must be positive definite); symmetry of D is not required.
        sym = 0.5 * (D + D.T)
        if np.linalg.eigvalsh(sym).min() <= 0:
            raise ValueError("diffusion matrix must be positive definite")

    @property
    def n_positive(self) -> int:
        return int((np.linalg.eigvalsh(self.matrix) > 0).sum())


def linear_boundary_trace(prob: LinearBoundaryProblem):
    """Boundary trace and outgoing fan of the linear half-line problem.

    Returns (trace, fan) where the trace vbar is the unique state with
    datum - vbar in the stable subspace of D^-1 A and vbar - initial in the
    span of the eigenvectors of A with positive eigenvalues; the fan holds
    the p outgoing contact discontinuities.
    """
    A, D = prob.matrix, prob.diffusion
    v0, vb = prob.initial, prob.datum
    n = A.shape[0]

    S = stable_subspace(np.linalg.solve(D, A))
    lam, U = np.linalg.eigh(A)
    pos = lam > 0
    U_pos = U[:, pos]
    lam_pos = lam[pos]

    cols = np.hstack([U_pos, S])
    if cols.shape[1] != n:
        raise DegenerateTraceError(
            f"degenerate trace system: {U_pos.shape[1]} outgoing directions "
            f"+ {S.shape[1]} stable directions != {n}")
    try:
        coef = np.linalg.solve(cols, vb - v0)
    except np.linalg.LinAlgError:
        raise DegenerateTraceError("degenerate trace system") from None
    c = coef[:U_pos.shape[1]]
    trace = v0 + U_pos @ c

    sys = _linear_system_for(prob)
    order = np.argsort(lam_pos)
    waves = []
    states = [trace.copy()]
    for idx in order:
        left = states[-1]
        right = left - c[idx] * U_pos[:, idx]
        family = int(np.searchsorted(np.sort(lam), lam_pos[idx]))
        jump = float(np.linalg.norm(right - left))
        if jump <= 1e-14 * (1 + np.linalg.norm(left)):
            continue
        waves.append(Wave(family=family, kind=CONTACT, left=left.copy(),
                          right=right, strength=-float(c[idx]),
                          speed=float(lam_pos[idx])))
        states.append(right)
    if waves:
        states[-1] = v0.copy()
    fan = RiemannFan(system=sys, left=trace.copy(), right=v0.copy(),
                     waves=tuple(waves), states=tuple(states),
                     strengths=np.zeros(n))
    return trace, fan


def _linear_system_for(prob: LinearBoundaryProblem) -> SystemDef:
    from .systems import linear_system
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return linear_system(prob.matrix, D=prob.diffusion)


# ----------------------------------------------------------------------
# Mixed boundary condition
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _hyperbolic_block_range(sys: SystemDef):
    """(min, max) of each sorted eigenvalue of the hyperbolic sub-block
    d f_1 / d w_1 over the admissible ball."""
    nh = sys.n_hyperbolic
    samples = _ball_samples(sys)
    lams = []
    for p in samples:
        block = sys.df(p)[:nh, :nh]
        lams.append(np.sort(np.linalg.eigvals(block).real))
    lams = np.array(lams)
    return lams.min(axis=0), lams.max(axis=0)


def mixed_boundary_residual(sys: SystemDef, state, datum) -> np.ndarray:
    """Residual of the mixed boundary condition at the wall.

    Concatenates (a) all parabolic components of ``state - datum`` and
    (b) the left-eigenvector projections of the hyperbolic components for
    every eigenvalue of the hyperbolic sub-block at the datum with positive
    sign.  A zero vector means the boundary condition holds.  When the
    viscosity matrix is invertible this is the full Dirichlet residual.

    Raises
    ------
    CharacteristicHyperbolicBlockError
        If the sub-block has a near-zero eigenvalue that is not structural
        (identically zero over the admissible ball), since the incoming
        count is then ill-defined.
    """
    state = np.asarray(state, dtype=float)
    datum = np.asarray(datum, dtype=float)
    nh = sys.n_hyperbolic
    diff = state - datum
    parts = [diff[nh:]]
    if nh:
        block = sys.df(datum)[:nh, :nh]
        lam, R = np.linalg.eig(block)
        scale = 1.0 + np.abs(lam).max()
        if np.abs(lam.imag).max() > 1e-8 * scale:
            raise CharacteristicHyperbolicBlockError(
                "hyperbolic sub-block has complex eigenvalues")
        order = np.argsort(lam.real)
        lam = lam.real[order]
        R = R.real[:, order]
        L = np.linalg.inv(R)
        lo, hi = _hyperbolic_block_range(sys)
        for i in range(nh):
            if lam[i] > sys.tol_char:
                parts.append(np.array([L[i] @ diff[:nh]]))
            elif abs(lam[i]) <= sys.tol_char:
                if max(abs(lo[i]), abs(hi[i])) <= sys.tol_char:
                    continue   # structurally zero transport: no condition
                raise CharacteristicHyperbolicBlockError(
                    f"characteristic hyperbolic block: eigenvalue {lam[i]} "
                    f"of the sub-block is near zero at {datum}")
    return np.concatenate(parts) if parts else np.zeros(0)


# ----------------------------------------------------------------------
# Boundary layers
# ----------------------------------------------------------------------

@dataclass(eq=False)
class LayerReduction:
    """Reduced phase space of the layer ODE at a fixed far-field state.

    For invertible D the reduction is the identity; for the singular block
    form the zero block yields the algebraic constraint f_1(w) = f_1(anchor)
    which is solved for the hyperbolic variables along the integration.  A
    structurally singular constraint block (transport coefficient vanishing
    identically) admits no nontrivial decaying profiles: dim = 0.
    """

    sys: SystemDef
    anchor: np.ndarray
    dim: int
    z_anchor: np.ndarray
    field: Callable[[np.ndarray], np.ndarray]
    to_full: Callable[[np.ndarray], np.ndarray]
    jacobian: np.ndarray


def layer_reduction(sys: SystemDef, anchor) -> LayerReduction:
    anchor = np.asarray(anchor, dtype=float)
    nh = sys.n_hyperbolic
    f_anchor = sys.f(anchor)

    if nh == 0:
        # constant viscosity matrices (the common case) are prefactored
        D0 = sys.D(anchor)
        probe = anchor + 0.01 * (1.0 + np.abs(anchor))
        if np.allclose(sys.D(probe), D0, rtol=1e-13, atol=1e-13):
            if np.allclose(D0, np.eye(sys.dimension), rtol=0, atol=1e-14):
                def field(z):
                    return sys.f(z) - f_anchor
            else:
                lu_piv = scipy.linalg.lu_factor(D0)

                def field(z):
                    return scipy.linalg.lu_solve(lu_piv, sys.f(z) - f_anchor)
        else:
            def field(z):
                return np.linalg.solve(sys.D(z), sys.f(z) - f_anchor)

        def to_full(z):
            return np.asarray(z, dtype=float)

        J = _fd_matrix(field, anchor)
        return LayerReduction(sys=sys, anchor=anchor, dim=sys.dimension,
                              z_anchor=anchor.copy(), field=field,
                              to_full=to_full, jacobian=J)

    block = sys.df(anchor)[:nh, :nh]
    scale = 1.0 + np.abs(sys.df(anchor)).max()
    if abs(np.linalg.det(block)) <= 1e-10 * scale ** nh:
        # Constraint cannot be solved for the hyperbolic variables; steady
        # profiles are constant (e.g. Lagrangian-type fluxes).
        return LayerReduction(sys=sys, anchor=anchor, dim=0,
                              z_anchor=anchor[nh:].copy(),
                              field=lambda z: np.zeros(0),
                              to_full=lambda z: anchor.copy(),
                              jacobian=np.zeros((0, 0)))

    guess = {"w1": anchor[:nh].copy()}

    def lift(z):
        w1 = guess["w1"].copy()
        target = f_anchor[:nh]
        for _ in range(30):
            w = np.concatenate([w1, z])
            res = sys.f(w)[:nh] - target
            if np.abs(res).max() <= 1e-13 * (1 + np.abs(target).max()):
                guess["w1"] = w1
                return w
            Jb = sys.df(w)[:nh, :nh]
            try:
                w1 = w1 - np.linalg.solve(Jb, res)
            except np.linalg.LinAlgError:
                raise DAEReductionError(
                    f"DAE reduction failed: singular constraint block at {w}")
        raise DAEReductionError(
            f"DAE reduction failed: constraint Newton stalled near {z}")

    def field(z):
        w = lift(np.asarray(z, dtype=float))
        b = sys.D(w)[nh:, nh:]
        return np.linalg.solve(b, sys.f(w)[nh:] - f_anchor[nh:])

    J = _fd_matrix(field, anchor[nh:])
    return LayerReduction(sys=sys, anchor=anchor, dim=sys.dimension - nh,
                          z_anchor=anchor[nh:].copy(), field=field,
                          to_full=lift, jacobian=J)


def _fd_matrix(func, z, step=1e-7):
    z = np.asarray(z, dtype=float)
    h = step * (1.0 + np.linalg.norm(z))
    cols = []
    for j in range(z.size):
        e = np.zeros(z.size)
        e[j] = h
        cols.append((np.asarray(func(z + e)) - np.asarray(func(z - e))) / (2 * h))
    return np.column_stack(cols) if cols else np.zeros((0, 0))


@dataclass(eq=False)
class _ModeSplit:
    """Real block decomposition of the layer linearization."""

    stable_basis: np.ndarray          # (n, m)
    stable_blocks: list               # [(slice, 2x2 or 1x1 block matrix)]
    stable_rates: np.ndarray          # Re(mu) per column
    center_vec: Optional[np.ndarray]
    center_left: Optional[np.ndarray]
    has_unstable: bool


def _split_modes(J, ctol, center: str = "auto") -> _ModeSplit:
    """Split the spectrum of J into stable / center / unstable parts.

    ``center`` selects the policy for the center direction: "auto" takes a
    single eigenvalue within ctol of zero, "force" designates the smallest
    |Re| eigenvalue as the center (used while a Newton iterate is still off
    the sonic manifold), "none" admits no center direction.
    """
    n = J.shape[0]
    mu, V = np.linalg.eig(J)
    scale = 1.0 + np.abs(mu).max() if n else 1.0
    tol = ctol * scale

    center_idx = None
    if center == "force":
        real_idx = [i for i in range(n) if abs(mu[i].imag) <= tol]
        if not real_idx:
            raise MarginalSpectrumError("no real candidate center direction")
        center_idx = min(real_idx, key=lambda i: abs(mu[i].real))
    elif center == "auto":
        hits = [i for i in range(n)
                if abs(mu[i].real) <= tol and abs(mu[i].imag) <= tol]
        if len(hits) > 1:
            raise MarginalSpectrumError(
                "multiple center directions in the layer linearization")
        if hits:
            center_idx = hits[0]

    center_vec = None
    center_left = None
    if center_idx is not None:
        v = V[:, center_idx].real
        v = v / np.linalg.norm(v)
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        center_vec = v
        muL, VL = np.linalg.eig(J.T)
        idx = int(np.argmin(np.abs(muL - mu[center_idx])))
        ell = VL[:, idx].real
        ell = ell / float(ell @ v)
        center_left = ell

    stable_cols = []
    blocks = []
    rates = []
    has_unstable = False
    used = {center_idx} if center_idx is not None else set()
    for i in range(n):
        if i in used:
            continue
        m = mu[i]
        if m.real >= -tol:
            has_unstable = has_unstable or (m.real > tol)
            used.add(i)
            continue
        if abs(m.imag) <= 1e-12 * scale:
            start = len(stable_cols)
            stable_cols.append(V[:, i].real / np.linalg.norm(V[:, i].real))
            blocks.append((slice(start, start + 1), np.array([[m.real]])))
            rates.append(m.real)
            used.add(i)
        else:
            # complex pair: real/imaginary parts span the invariant plane
            if m.imag < 0:
                continue   # handled with the positive-imag partner
            vr = V[:, i].real
            vi = V[:, i].imag
            nrm = max(np.linalg.norm(vr), np.linalg.norm(vi))
            start = len(stable_cols)
            stable_cols.extend([vr / nrm, vi / nrm])
            blocks.append((slice(start, start + 2),
                           np.array([[m.real, m.imag],
                                     [-m.imag, m.real]])))
            rates.extend([m.real, m.real])
            used.add(i)
            conj = int(np.argmin(np.abs(mu - m.conjugate())))
            used.add(conj)
    basis = (np.column_stack(stable_cols) if stable_cols
             else np.zeros((n, 0)))
    return _ModeSplit(stable_basis=basis, stable_blocks=blocks,
                      stable_rates=np.asarray(rates, dtype=float),
                      center_vec=center_vec, center_left=center_left,
                      has_unstable=has_unstable)


@dataclass(eq=False)
class BoundaryLayerProfile:
    """Sampled steady layer profile on a geometric grid in [0, Y_max]."""

    y: np.ndarray                  # (m,), y[0] = 0
    w: np.ndarray                  # (m, N)
    dw: np.ndarray                 # (m, N), profile derivative dw/dy
    subtrace: np.ndarray           # far-field state v_under
    center_size: float             # signed center coordinate (0 if absent)
    endpoint_residual: float       # |w(Y_max) - subtrace|
    bc_residual: float             # max-norm of the wall condition residual

    @property
    def wall_state(self) -> np.ndarray:
        return self.w[0]

    @property
    def is_constant(self) -> bool:
        return bool(np.allclose(self.w, self.subtrace, atol=1e-12))


def _constant_profile(sys, anchor, y_max=1.0):
    y = np.concatenate([[0.0], np.geomspace(y_max / PROFILE_RATIO ** (
        PROFILE_POINTS - 2), y_max, PROFILE_POINTS - 1)])
    w = np.tile(anchor, (y.size, 1))
    return BoundaryLayerProfile(y=y, w=w, dw=np.zeros_like(w),
                                subtrace=anchor.copy(),
                                center_size=0.0, endpoint_residual=0.0,
                                bc_residual=0.0)


class _LayerShoot:
    """Backward-shooting layer solver at a fixed far-field state.

    Unknowns are the scaled stable coordinates (and the center coordinate in
    the characteristic case) of the profile at the shooting anchor
    y = Y0; the residual is the mixed boundary condition at the wall.
    """

    def __init__(self, sys: SystemDef, anchor, center: str = "auto",
                 ctol=None):
        self.sys = sys
        self.anchor = np.asarray(anchor, dtype=float)
        self.red = layer_reduction(sys, self.anchor)
        ctol = ctol if ctol is not None else max(sys.tol_char, 1e-7)
        if self.red.dim == 0:
            self.split = None
            self.n_params = 0
            self.y0 = 0.0
            return
        self.split = _split_modes(self.red.jacobian, ctol, center=center)
        m = self.split.stable_basis.shape[1]
        self.n_params = m + (1 if self.split.center_vec is not None else 0)
        rates = np.abs(self.split.stable_rates)
        if rates.size:
            self.y0 = SHOOT_LENGTH / rates.min()
        else:
            # center-only dynamics: slow flow, moderate anchor distance
            self.y0 = 1.0

    @property
    def has_center(self) -> bool:
        return self.split is not None and self.split.center_vec is not None

    def seed(self, wall_target) -> np.ndarray:
        """Linearized parameter estimate for a desired wall state."""
        if self.n_params == 0:
            return np.zeros(0)
        d = np.asarray(wall_target, dtype=float) - self.anchor
        d_red = d[self.sys.n_hyperbolic:] if self.red.dim < self.sys.dimension else d
        cols = [self.split.stable_basis]
        if self.has_center:
            cols.append(self.split.center_vec[:, None])
        B = np.hstack(cols)
        coef, *_ = np.linalg.lstsq(B, d_red, rcond=None)
        return coef

    def _anchor_point(self, params):
        """Phase-space point at y = Y0 for scaled parameters."""
        z = self.red.z_anchor.copy()
        sp = self.split
        m = sp.stable_basis.shape[1]
        if m:
            coeff = np.zeros(m)
            for sl, block in sp.stable_blocks:
                E = scipy.linalg.expm(block * self.y0)
                coeff[sl] = E @ params[sl]
            z = z + sp.stable_basis @ coeff
        if self.has_center:
            z = z + params[m] * sp.center_vec
        return z

    def wall_state(self, params, rtol=1e-11):
        """Integrate the layer ODE backward from Y0 to the wall."""
        if self.n_params == 0:
            return self.red.to_full(self.red.z_anchor)
        z0 = self._anchor_point(np.asarray(params, dtype=float))
        if self.y0 == 0.0:
            return self.red.to_full(z0)
        field = self.red.field
        sol = solve_ivp(lambda _, z: field(z), (self.y0, 0.0), z0,
                        method="DOP853", rtol=rtol, atol=1e-14)
        if not sol.success:
            raise DAEReductionError(f"layer integration failed: {sol.message}")
        return self.red.to_full(sol.y[:, -1])

    def residual(self, params, datum):
        w0 = self.wall_state(params)
        return mixed_boundary_residual(self.sys, w0, datum)

    def solve(self, datum, seed=None, max_iter=40, tol=1e-8):
        """Gauss-Newton on the shooting parameters; None when no profile."""
        datum = np.asarray(datum, dtype=float)
        scale = 1.0 + np.linalg.norm(datum)
        if self.n_params == 0:
            res = mixed_boundary_residual(
                self.sys, self.red.to_full(self.red.z_anchor), datum)
            if res.size == 0 or np.abs(res).max() <= tol * scale:
                return np.zeros(0)
            return None
        params = self.seed(datum) if seed is None else np.asarray(seed, float)
        res = self.residual(params, datum)
        for _ in range(max_iter):
            if np.abs(res).max() <= tol * scale:
                break
            J = _fd_matrix_params(lambda p: self.residual(p, datum), params)
            step, *_ = np.linalg.lstsq(J, -res, rcond=None)
            if not np.all(np.isfinite(step)):
                return None
            alpha = 1.0
            base = np.linalg.norm(res)
            while True:
                cand = params + alpha * step
                try:
                    res_new = self.residual(cand, datum)
                except (DAEReductionError, RuntimeError):
                    res_new = None
                if res_new is not None and (np.linalg.norm(res_new) < base
                                            or alpha < 1e-4):
                    break
                alpha *= 0.5
                if alpha < 1e-6:
                    return None
            params, res = cand, res_new
        else:
            return None
        if np.abs(res).max() > tol * scale:
            return None
        if not self._tail_decays(params):
            return None
        return params

    def center_coordinate(self, params) -> float:
        if not self.has_center:
            return 0.0
        return float(params[self.split.stable_basis.shape[1]])

    def _center_flow(self, zeta: float) -> float:
        sp = self.split
        z = self.red.z_anchor + zeta * sp.center_vec
        return float(sp.center_left @ self.red.field(z))

    def _tail_decays(self, params) -> bool:
        """Check that the far-field continuation decays to the anchor."""
        if not self.has_center:
            return True
        zeta = self.center_coordinate(params)
        if abs(zeta) <= 1e-9:
            return True
        phi = self._center_flow(zeta)
        # monotone decay of the scalar center flow toward 0
        return phi * zeta < 0

    def center_tail(self, zeta0: float, target: float = 1e-6,
                    cap: float = 1e9):
        """Integrate the scalar center flow until |zeta| <= target."""
        if abs(zeta0) <= target:
            return None
        events = lambda y, z: abs(z[0]) - target
        events.terminal = True
        sol = solve_ivp(lambda _, z: [self._center_flow(z[0])],
                        (0.0, cap), [zeta0], method="RK45", rtol=1e-9,
                        atol=1e-12, events=events, dense_output=True)
        return sol

    def build_profile(self, params, datum) -> BoundaryLayerProfile:
        """Assemble the sampled profile for converged shooting parameters."""
        sys = self.sys
        anchor = self.anchor
        if self.n_params == 0:
            prof = _constant_profile(sys, anchor)
            prof.bc_residual = float(np.abs(mixed_boundary_residual(
                sys, anchor, datum)).max()) if prof.w.size else 0.0
            return prof

        sp = self.split
        m = sp.stable_basis.shape[1]
        zeta0 = self.center_coordinate(params)

        rates = np.abs(np.concatenate([sp.stable_rates, [np.inf]]))
        y_tail = TAIL_LENGTH / rates.min() if m else 0.0
        tail_sol = None
        if self.has_center and abs(zeta0) > 1e-9:
            tail_sol = self.center_tail(zeta0)
            if tail_sol is not None and tail_sol.t.size:
                y_tail = max(y_tail, self.y0 + float(tail_sol.t[-1]))
        y_max = max(y_tail, self.y0 * 1.5)
        if not np.isfinite(y_max):
            y_max = self.y0 * 1.5 if self.y0 > 0 else 1.0

        # backward pass with dense output for the head of the profile
        z0 = self._anchor_point(params)
        field = self.red.field
        sol = solve_ivp(lambda _, z: field(z), (self.y0, 0.0), z0,
                        method="DOP853", rtol=1e-11, atol=1e-14,
                        dense_output=True)
        if not sol.success:
            raise DAEReductionError(f"layer integration failed: {sol.message}")

        y1 = y_max / PROFILE_RATIO ** (PROFILE_POINTS - 2)
        y = np.concatenate([[0.0], np.geomspace(y1, y_max,
                                                PROFILE_POINTS - 1)])
        w = np.empty((y.size, sys.dimension))
        dw = np.empty_like(w)
        for i, yi in enumerate(y):
            if yi <= self.y0:
                z = sol.sol(yi)
            else:
                dy = yi - self.y0
                z = self.red.z_anchor.copy()
                for sl, block in sp.stable_blocks:
                    E = scipy.linalg.expm(block * (dy + self.y0))
                    z = z + sp.stable_basis[:, sl] @ (E @ params[sl])
                if self.has_center:
                    if tail_sol is not None:
                        t_end = float(tail_sol.t[-1])
                        zeta = float(tail_sol.sol(min(dy, t_end))[0])
                    else:
                        zeta = zeta0
                    z = z + zeta * sp.center_vec
            w[i] = self.red.to_full(z)
            dw[i] = self._full_derivative(w[i], self.red.field(z))
        bc = mixed_boundary_residual(sys, w[0], datum)
        # The reported center size is the coordinate at the wall, which does
        # not depend on the internal shooting anchor position.
        zeta_wall = 0.0
        if self.has_center:
            zeta_wall = float(sp.center_left @ (sol.sol(0.0)
                                                - self.red.z_anchor))
        return BoundaryLayerProfile(
            y=y, w=w, dw=dw, subtrace=anchor.copy(),
            center_size=zeta_wall,
            endpoint_residual=float(np.abs(w[-1] - anchor).max()),
            bc_residual=float(np.abs(bc).max()) if bc.size else 0.0)

    def _full_derivative(self, w_full, zdot):
        """Map a reduced-phase-space derivative to full coordinates."""
        nh = self.sys.n_hyperbolic
        if nh == 0:
            return np.asarray(zdot, dtype=float)
        dw = np.zeros(self.sys.dimension)
        dw[nh:] = zdot
        # differentiate the algebraic constraint f_1(w) = f_1(anchor)
        dfm = self.sys.df(w_full)
        try:
            dw[:nh] = -np.linalg.solve(dfm[:nh, :nh], dfm[:nh, nh:] @ zdot)
        except np.linalg.LinAlgError:
            dw[:nh] = 0.0
        return dw


def _fd_matrix_params(func, params, step=1e-7, base=None):
    """FD Jacobian; one-sided around ``base`` when it is supplied."""
    params = np.asarray(params, dtype=float)
    cols = []
    for j in range(params.size):
        h = step * (1.0 + abs(params[j]))
        e = np.zeros(params.size)
        e[j] = h
        if base is None:
            cols.append((func(params + e) - func(params - e)) / (2 * h))
        else:
            cols.append((func(params + e) - base) / h)
    if not cols:
        return np.zeros((0, 0))
    return np.column_stack(cols)


def _masquerades_as_parked_shock(sys: SystemDef, k: Optional[int],
                                 subtrace, wall_state) -> bool:
    """A layer whose wall state sits on the flux-matching partner of the far
    field is the tolerance-level shadow of a parked 0-speed shock with a
    trivial layer; such solutions are deferred to the parked ansatz."""
    if k is None or sys.field_kinds[k] != GENUINELY_NONLINEAR:
        return False
    comp = zero_speed_companion(sys, subtrace, k)
    if comp is None:
        return False
    partner, _ = comp
    scale = 1.0 + np.linalg.norm(partner)
    if np.linalg.norm(partner - np.asarray(subtrace)) <= 1e-6 * scale:
        return False
    return bool(np.abs(np.asarray(wall_state) - partner).max()
                <= 1e-6 * scale)


def solve_boundary_layer(sys: SystemDef, subtrace, datum
                         ) -> Optional[BoundaryLayerProfile]:
    """Decaying layer profile from the datum side to ``subtrace``, or None.

    A constant profile is returned when the wall condition already holds at
    the far-field state; otherwise the profile is found by shooting from the
    linearized stable (plus center, in the characteristic case) subspace at
    ``subtrace`` with Newton on the shooting parameters.
    """
    subtrace = np.asarray(subtrace, dtype=float)
    datum = np.asarray(datum, dtype=float)
    res0 = mixed_boundary_residual(sys, subtrace, datum)
    scale = 1.0 + np.linalg.norm(datum)
    if res0.size == 0 or np.abs(res0).max() <= 1e-11 * scale:
        return _constant_profile(sys, subtrace)
    shoot = _LayerShoot(sys, subtrace)
    params = shoot.solve(datum)
    if params is None:
        return None
    return shoot.build_profile(params, datum)


def layer_equation_residual(sys: SystemDef, profile: BoundaryLayerProfile
                            ) -> float:
    """Max-norm defect of D(w) w' = f(w) - f(subtrace) at interior nodes.

    Uses the profile's sampled derivative; for a singular viscosity matrix
    the zero rows reduce to the algebraic constraint f_1(w) = f_1(subtrace),
    so this also measures the quality of the DAE reduction.
    """
    y, w, dw = profile.y, profile.w, profile.dw
    f_ref = sys.f(profile.subtrace)
    worst = 0.0
    for i in range(1, y.size - 1):
        res = sys.D(w[i]) @ dw[i] - (sys.f(w[i]) - f_ref)
        worst = max(worst, float(np.abs(res).max()))
    return worst


def reintegrate_profile(sys: SystemDef, profile: BoundaryLayerProfile,
                        y_end: Optional[float] = None) -> np.ndarray:
    """Integrate the layer ODE forward from the wall state of a profile.

    Independent consistency check for shooting: the result should reproduce
    the far-field state.  Uses the reduced (DAE) form when D is singular.
    """
    red = layer_reduction(sys, profile.subtrace)
    if red.dim == 0:
        return profile.subtrace.copy()
    nh = sys.n_hyperbolic
    z0 = profile.wall_state[nh:] if nh else profile.wall_state
    if y_end is None:
        y_end = float(profile.y[-1])
    sol = solve_ivp(lambda _, z: red.field(z), (0.0, y_end), z0,
                    method="DOP853", rtol=1e-10, atol=1e-13)
    if not sol.success:
        raise DAEReductionError(f"re-integration failed: {sol.message}")
    return red.to_full(sol.y[:, -1])


# ----------------------------------------------------------------------
# Trace relations
# ----------------------------------------------------------------------

@dataclass(eq=False)
class TraceWitness:
    """Evidence that a trace matches a boundary datum: the far-field state
    of the layer, the profile, and the optional parked 0-speed shock."""

    subtrace: np.ndarray
    profile: BoundaryLayerProfile
    boundary_shock: Optional[Wave]


def check_viscous_trace(sys: SystemDef, trace, datum
                        ) -> Optional[TraceWitness]:
    """Does the viscosity-consistent trace relation hold for (trace, datum)?

    The relation holds when there is a state with the same flux as the trace
    (connected, in the characteristic case, by a Lax-admissible 0-speed
    shock parked at the wall with the trace on the domain side) that is the
    far field of a decaying boundary layer matching the datum.  In the
    non-characteristic case local invertibility forces that state to equal
    the trace.
    """
    trace = np.asarray(trace, dtype=float)
    datum = np.asarray(datum, dtype=float)
    k = classify_boundary_field(sys, trace)

    profile = solve_boundary_layer(sys, trace, datum)
    if profile is not None and not _masquerades_as_parked_shock(
            sys, k, trace, profile.wall_state):
        return TraceWitness(subtrace=trace.copy(), profile=profile,
                            boundary_shock=None)
    direct = (TraceWitness(subtrace=trace.copy(), profile=profile,
                           boundary_shock=None)
              if profile is not None else None)
    if k is None:
        return direct

    if sys.field_kinds[k] == GENUINELY_NONLINEAR:
        comp = zero_speed_companion(sys, trace, k)
        if comp is None:
            return direct
        sub, s = comp
        if np.linalg.norm(sub - trace) <= 1e-10 * (1 + np.linalg.norm(trace)):
            return direct
        shock = Wave(family=k, kind=SHOCK, left=sub, right=trace.copy(),
                     strength=float(s), speed=0.0)
        lam_l = raw_eigenvalues(sys, sub)[k]
        lam_r = raw_eigenvalues(sys, trace)[k]
        if not (lam_l >= -sys.tol_char and lam_r <= sys.tol_char):
            return direct
        sub_profile = solve_boundary_layer(sys, sub, datum)
        if sub_profile is None:
            return direct
        return TraceWitness(subtrace=sub, profile=sub_profile,
                            boundary_shock=shock)

    # Linearly degenerate boundary field: every state on the 0-speed contact
    # curve through the trace shares its flux, so search the contact
    # parameter jointly with the layer shooting parameters.
    n_params = _LayerShoot(sys, trace, center="none").n_params

    def joint_residual(theta):
        t = float(theta[0])
        sub = wave_curve(sys, trace, k, t) if abs(t) > 1e-14 else trace
        shoot = _LayerShoot(sys, sub, center="none")
        if shoot.n_params != n_params:
            raise MarginalSpectrumError("stable split changed along contact")
        return shoot.residual(theta[1:], datum)

    shoot0 = _LayerShoot(sys, trace, center="none")
    theta = np.concatenate([[0.0], shoot0.seed(datum)])
    scale = 1.0 + np.linalg.norm(datum)
    ok = False
    try:
        res = joint_residual(theta)
        for _ in range(40):
            if np.abs(res).max() <= 1e-9 * scale:
                ok = True
                break
            J = _fd_matrix_params(joint_residual, theta)
            step, *_ = np.linalg.lstsq(J, -res, rcond=None)
            alpha = 1.0
            base = np.linalg.norm(res)
            while True:
                cand = theta + alpha * step
                try:
                    res_new = joint_residual(cand)
                except (DAEReductionError, MarginalSpectrumError,
                        RuntimeError):
                    res_new = None
                if res_new is not None and (np.linalg.norm(res_new) < base
                                            or alpha <= 1e-3):
                    break
                alpha *= 0.5
                if alpha < 1e-6:
                    res_new = None
                    break
            if res_new is None:
                break
            theta, res = cand, res_new
    except (DAEReductionError, MarginalSpectrumError, RuntimeError):
        return None
    if not ok:
        return None
    t = float(theta[0])
    sub = wave_curve(sys, trace, k, t) if abs(t) > 1e-14 else trace.copy()
    shoot = _LayerShoot(sys, sub, center="none")
    profile = shoot.build_profile(theta[1:], datum)
    shock = None
    if abs(t) > 1e-12:
        shock = Wave(family=k, kind=CONTACT, left=sub.copy(),
                     right=trace.copy(), strength=float(-t), speed=0.0)
    return TraceWitness(subtrace=sub, profile=profile, boundary_shock=shock)


def check_inviscid_trace(sys: SystemDef, trace, datum,
                         tol: float = 1e-9) -> bool:
    """Riemann-problem trace relation (comparison baseline): the Riemann
    fan from the datum (left) to the trace (right) contains only waves with
    non-positive speed."""
    fan = solve_riemann(sys, datum, trace)
    return all(w.max_speed <= tol for w in fan.waves)


# ----------------------------------------------------------------------
# Boundary Riemann solver
# ----------------------------------------------------------------------

@dataclass(eq=False)
class BoundaryFan:
    """Solution structure of a boundary Riemann problem.

    From the wall outward: a layer profile from the datum side to the
    subtrace, an optional 0-speed shock or contact parked at the wall
    between subtrace (left) and trace (right), and the outgoing waves with
    strictly positive speeds connecting the trace to the interior state.
    """

    trace: np.ndarray
    subtrace: np.ndarray
    boundary_shock: Optional[Wave]
    layer: Optional[BoundaryLayerProfile]
    waves: tuple[Wave, ...]
    interior: np.ndarray
    datum: np.ndarray
    char_family: Optional[int]
    char_size: float                    # signed center size or parked strength
    relation: str = RELATION_VISCOUS
    template: str = ""
    _theta: Optional[np.ndarray] = None      # warm-start caches
    _jacobian: Optional[np.ndarray] = None

    @property
    def states(self):
        out = [self.trace]
        for w in self.waves:
            out.append(w.right)
        return out


class _TemplateMismatch(RuntimeError):
    pass


def _outgoing_families(sys: SystemDef, k: Optional[int]):
    lo, hi = eigenvalue_range(sys)
    return [j for j in range(sys.dimension)
            if j != k and lo[j] > sys.tol_char]


def _incoming_count(sys: SystemDef, k: Optional[int]):
    lo, hi = eigenvalue_range(sys)
    return sum(1 for j in range(sys.dimension)
               if j != k and hi[j] < -sys.tol_char)


class _BoundaryTemplate:
    """One structural ansatz for the boundary Riemann solution.

    ``name`` is one of:
      direct   -- trace equals the layer far field (non-characteristic, or a
                  characteristic wave fully absorbed into the layer)
      entering -- additionally a k-wave with positive speed enters
      center   -- layer with a center component at a sonic far field, plus an
                  entering k-rarefaction
      parked   -- 0-speed Lax shock at the wall (GNL characteristic family)
      contact  -- 0-speed contact at the wall (LD characteristic family)

    Unknowns: [subtrace | shooting params | s_parked? | s_k? | s_out];
    residuals: [wall condition | sonic or 0-speed constraint? | composed
    outgoing waves minus the interior state].
    """

    def __init__(self, sys, interior, datum, name, k,
                 expected_params=None, seed_sub=None):
        self.sys = sys
        self.interior = np.asarray(interior, dtype=float)
        self.datum = np.asarray(datum, dtype=float)
        self.name = name
        self.k = k
        self.out_fams = _outgoing_families(sys, k)
        self.n = sys.dimension
        self.has_kwave = name in ("entering", "center")
        self.has_parked = name in ("parked", "contact")
        self.center_mode = "force" if name == "center" else "none"
        self._seed_sub = seed_sub
        if expected_params is None:
            sub0 = self._seed_subtrace()
            expected_params = self._shoot_at(sub0).n_params
        self.expected_params = expected_params
        self.size = (self.n + expected_params + (1 if self.has_kwave else 0)
                     + (1 if self.has_parked else 0) + len(self.out_fams))

    def _shoot_at(self, sub) -> _LayerShoot:
        return _LayerShoot(self.sys, sub, center=self.center_mode)

    def _seed_subtrace(self):
        if self._seed_sub is not None:
            return np.asarray(self._seed_sub, dtype=float)
        sys = self.sys
        dec = eigen_structure(sys, sys.ref_state)
        coeff = dec.left @ (self.interior - self.datum)
        sub = self.interior.copy()
        fams = list(self.out_fams)
        if self.has_kwave or self.has_parked:
            fams = [self.k] + fams
        for j in fams:
            sub = sub - coeff[j] * dec.r(j)
        if self.name == "center":
            # move the far field onto the sonic manifold along r_k
            for _ in range(8):
                lam = raw_eigenvalues(sys, sub)[self.k]
                if abs(lam) < 1e-10:
                    break
                sub = sub - lam * dec.r(self.k)
        if not sys.in_ball(sub, slack=1.1):
            d = sub - sys.ref_state
            sub = sys.ref_state + d * (sys.radius / np.linalg.norm(d))
        self._seed_sub = sub
        return sub

    def unpack(self, theta):
        n, p = self.n, self.expected_params
        sub = theta[:n]
        params = theta[n:n + p]
        i = n + p
        s_park = None
        s_k = None
        if self.has_parked:
            s_park = float(theta[i]); i += 1
        if self.has_kwave:
            s_k = float(theta[i]); i += 1
        s_out = theta[i:]
        return sub, params, s_park, s_k, s_out

    def evaluate(self, theta, steps=CURVE_STEPS):
        """Residual vector and the assembled pieces at theta."""
        sub, params, s_park, s_k, s_out = self.unpack(theta)
        shoot = self._shoot_at(sub)
        if shoot.n_params != self.expected_params:
            raise _TemplateMismatch(
                f"{self.name}: stable/center split changed at {sub}")
        w0 = shoot.wall_state(params)
        r_beta = mixed_boundary_residual(self.sys, w0, self.datum)

        extra = []
        parked_wave = None
        if self.name == "parked":
            trace, sigma = hugoniot_state(self.sys, sub, self.k, s_park)
            extra.append(sigma)
            parked_wave = Wave(family=self.k, kind=SHOCK, left=sub.copy(),
                               right=trace, strength=s_park, speed=sigma)
        elif self.name == "contact":
            parked_wave = make_wave(self.sys, sub, self.k, s_park,
                                    steps=steps)
            trace = parked_wave.right
        else:
            trace = sub.copy()
            if self.name == "center":
                extra.append(raw_eigenvalues(self.sys, sub)[self.k])

        fams = ([self.k] + self.out_fams) if self.has_kwave else self.out_fams
        strengths = ([s_k] + list(s_out)) if self.has_kwave else list(s_out)
        states, waves = build_wave_sequence(self.sys, trace, strengths,
                                            families=fams, steps=steps)
        r_comp = states[-1] - self.interior
        res = np.concatenate([r_beta, np.asarray(extra, dtype=float), r_comp])
        return res, (shoot, params, trace, parked_wave, waves)

    def residual(self, theta):
        # coarse curve integration is accurate far beyond the Newton
        # tolerance and much cheaper inside the iteration
        return self.evaluate(theta, steps=16)[0]

    def admissible(self, theta, pieces) -> bool:
        sys = self.sys
        sub, params, s_park, s_k, s_out = self.unpack(theta)
        shoot, _, trace, parked_wave, waves = pieces
        tol = max(sys.tol_char, 1e-9)
        if not sys.in_ball(sub, slack=1.2) or not sys.in_ball(trace, slack=1.2):
            return False
        for w in waves:
            if w.min_speed < -1e-9:
                return False
        if not shoot._tail_decays(params):
            return False
        lam_sub = (raw_eigenvalues(sys, sub)[self.k]
                   if self.k is not None else None)
        if self.name == "entering":
            if lam_sub < -tol:
                return False
            if s_k < 0:   # entering shock must move strictly into the domain
                _, sigma = hugoniot_state(sys, sub, self.k, s_k)
                if sigma <= tol:
                    return False
        elif self.name == "direct" and self.k is not None:
            if lam_sub > tol:
                return False
            if _masquerades_as_parked_shock(sys, self.k, sub,
                                            shoot.wall_state(params)):
                return False
        elif self.name == "center":
            if s_k < -1e-10:
                return False
        elif self.name == "parked":
            if s_park >= -1e-12:
                return False
            if not lax_admissible(sys, parked_wave, tol=tol):
                return False
            lam_r = raw_eigenvalues(sys, parked_wave.right)[self.k]
            if not (lam_sub >= -tol and lam_r <= tol):
                return False
        return True

    def seed(self) -> np.ndarray:
        sys = self.sys
        dec = eigen_structure(sys, sys.ref_state)
        coeff = dec.left @ (self.interior - self.datum)
        sub = self._seed_subtrace()
        shoot = self._shoot_at(sub)
        if shoot.n_params != self.expected_params:
            raise _TemplateMismatch(f"{self.name}: seed split mismatch")
        parts = [sub, shoot.seed(self.datum)]
        if self.has_parked:
            if self.name == "contact":
                parts.append([float(coeff[self.k])])
            else:
                parts.append([-abs(float(coeff[self.k])) - 1e-3])
        if self.has_kwave:
            parts.append([float(coeff[self.k])])
        parts.append([float(coeff[j]) for j in self.out_fams])
        return np.concatenate([np.atleast_1d(np.asarray(p, dtype=float))
                               for p in parts])


def _newton_solve(template: _BoundaryTemplate, theta0, max_iter=40,
                  tol=1e-9, warm_jacobian=None):
    theta = np.asarray(theta0, dtype=float)
    scale = 1.0 + np.linalg.norm(template.interior)
    res = template.residual(theta)
    J = warm_jacobian
    since_fd = 0
    converged = np.abs(res).max() <= tol * scale
    for _ in range(max_iter):
        if converged:
            break
        if J is None or since_fd >= 10:
            J = _fd_matrix_params(template.residual, theta, base=res)
            since_fd = 0
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        alpha = 1.0
        base = np.linalg.norm(res)
        res_new = None
        while True:
            cand = theta + alpha * step
            try:
                res_new = template.residual(cand)
            except (_TemplateMismatch, DAEReductionError, RuntimeError,
                    np.linalg.LinAlgError):
                res_new = None
            if res_new is not None and (np.linalg.norm(res_new) < base
                                        or alpha <= 1e-3):
                break
            alpha *= 0.5
            if alpha < 1e-5:
                return None
        if res_new is None:
            return None
        ds = cand - theta
        denom = float(ds @ ds)
        if denom > 0:
            J = J + np.outer(res_new - res - J @ ds, ds) / denom
        since_fd += 1
        theta, res = cand, res_new
        converged = np.abs(res).max() <= tol * scale
    if not converged:
        return None
    # final full-resolution evaluation at the converged parameters
    res_full, pieces = template.evaluate(theta)
    if np.abs(res_full).max() > 10 * tol * scale:
        return None
    return theta, pieces, J


def solve_boundary_riemann(sys: SystemDef, interior, datum,
                           relation: str = RELATION_VISCOUS,
                           seed_fan: Optional[BoundaryFan] = None
                           ) -> BoundaryFan:
    """Solve the boundary Riemann problem for the given interior state and
    boundary datum, returning the trace, the parked structure, the layer,
    and the outgoing waves (all with positive speed).

    Structural ansatzes are tried in a fixed order; the first one whose
    Newton iteration converges and passes its admissibility inequalities is
    returned.  ``seed_fan`` warm-starts from a previously computed fan.
    """
    interior = np.asarray(interior, dtype=float)
    datum = np.asarray(datum, dtype=float)
    if relation == RELATION_STAR:
        return _solve_star(sys, interior, datum)
    if relation != RELATION_VISCOUS:
        raise ValueError(f"unknown trace relation {relation!r}")

    k = classify_boundary_field(sys, sys.ref_state)
    if k is None:
        names = ["direct"]
    elif sys.field_kinds[k] == LINEARLY_DEGENERATE:
        names = ["contact"]
    else:
        names = ["entering", "direct", "center", "parked"]

    attempts = [(name, None, None, None) for name in names]
    if (seed_fan is not None and seed_fan.template in names
            and seed_fan._theta is not None):
        # reuse the previous theta as a seed; a stale Jacobian misleads
        # the iteration, so it is always rebuilt
        attempts.insert(0, (seed_fan.template, seed_fan._theta,
                            seed_fan.subtrace, None))

    last_error = None
    for name, theta0, seed_sub, warm_j in attempts:
        try:
            if theta0 is not None:
                count = _count_from_theta(sys, name, k, theta0)
                if count is None:
                    continue
                tmpl = _BoundaryTemplate(sys, interior, datum, name, k,
                                         expected_params=count,
                                         seed_sub=seed_sub)
            else:
                tmpl = _BoundaryTemplate(sys, interior, datum, name, k)
                theta0 = tmpl.seed()
            if theta0.size != tmpl.size:
                continue
            solved = _newton_solve(tmpl, theta0, warm_jacobian=warm_j)
        except (_TemplateMismatch, DAEReductionError, MarginalSpectrumError,
                RuntimeError, np.linalg.LinAlgError) as exc:
            last_error = exc
            theta0 = None
            continue
        theta0 = None
        if solved is None:
            continue
        theta, pieces, jac = solved
        if not tmpl.admissible(theta, pieces):
            continue
        return _assemble_fan(sys, tmpl, theta, pieces, jac)

    raise BoundaryRiemannError(
        f"boundary Riemann solver failed for interior {interior}, "
        f"datum {datum}" + (f" (last error: {last_error})" if last_error
                            else ""))


def _count_from_theta(sys, name, k, theta):
    # recover the shoot-parameter count encoded in a cached theta
    n = sys.dimension
    extra = (1 if name in ("parked", "contact") else 0) + \
        (1 if name in ("entering", "center") else 0)
    count = theta.size - n - extra - len(_outgoing_families(sys, k))
    return count if count >= 0 else None


def _assemble_fan(sys, tmpl, theta, pieces, jacobian=None) -> BoundaryFan:
    shoot, params, trace, parked_wave, waves = pieces
    sub = shoot.anchor
    profile = shoot.build_profile(params, tmpl.datum)
    if parked_wave is not None and abs(parked_wave.strength) <= 1e-12:
        parked_wave = None
    char_size = profile.center_size
    if parked_wave is not None:
        char_size = float(parked_wave.strength)
    waves = tuple(w for w in waves if abs(w.strength) > 1e-12)
    return BoundaryFan(trace=np.asarray(trace, dtype=float),
                       subtrace=sub.copy(),
                       boundary_shock=parked_wave,
                       layer=profile,
                       waves=waves,
                       interior=tmpl.interior.copy(),
                       datum=tmpl.datum.copy(),
                       char_family=tmpl.k,
                       char_size=char_size,
                       relation=RELATION_VISCOUS,
                       template=tmpl.name,
                       _theta=theta.copy(), _jacobian=jacobian)


def _solve_star(sys: SystemDef, interior, datum) -> BoundaryFan:
    """Boundary fan under the Riemann-based trace relation: solve the full
    line Riemann problem (datum | interior) and keep the entering part."""
    fan = solve_riemann(sys, datum, interior)
    trace = sample_fan(fan, 0.0)
    waves = []
    for w in fan.waves:
        if w.max_speed <= 1e-12:
            continue
        if w.min_speed >= -1e-12:
            waves.append(w)
        elif w.kind == RAREFACTION:
            # straddling fan: keep the entering portion only
            state0 = sample_fan(fan, 0.0)
            lam0 = raw_eigenvalues(sys, state0)[w.family]
            # parameter of the sonic state measured from the wave's left edge
            s0 = float(np.clip(-w.min_speed, 0.0, w.strength))
            s_in = w.strength - s0
            if s_in > 1e-12:
                waves.append(make_wave(sys, state0, w.family, s_in))
    waves = tuple(waves)
    k = classify_boundary_field(sys, sys.ref_state)
    return BoundaryFan(trace=trace, subtrace=trace.copy(),
                       boundary_shock=None,
                       layer=_constant_profile(sys, trace),
                       waves=waves, interior=np.asarray(interior, float),
                       datum=np.asarray(datum, float), char_family=k,
                       char_size=0.0, relation=RELATION_STAR,
                       template="star")
