"""Conservation-law system definitions, eigenstructure, and built-in test systems.

A system is written in the conserved form  g(v)_t + f(v)_x = 0  with an
associated viscosity matrix D(v) used by the viscous reference solver and by
the boundary-layer machinery.  D must have the block normal form

    D(v) = [[0, 0],
            [0, b(v)]]

with b(v) positive definite after a suitable ordering of the unknowns; the
all-parabolic case (invertible D) corresponds to an empty first block.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

GENUINELY_NONLINEAR = "genuinely-nonlinear"
LINEARLY_DEGENERATE = "linearly-degenerate"

FIELD_KINDS = (GENUINELY_NONLINEAR, LINEARLY_DEGENERATE)

#: Step scale for finite-difference Jacobians of user-supplied maps.
FD_STEP = 1e-6


class HyperbolicityError(RuntimeError):
    """Raised when the eigenstructure is non-real or has coalescing speeds."""


class MultipleCharacteristicFieldsError(RuntimeError):
    """More than one characteristic family can vanish near the boundary."""


@dataclass(frozen=True, eq=False)
class SystemDef:
    """A one-dimensional system of conservation laws with viscosity.

    Parameters
    ----------
    dimension : int
        Number of unknowns N.
    flux : callable
        f(v) -> ndarray of shape (N,).
    viscosity : callable
        D(v) -> ndarray of shape (N, N) in block normal form.
    field_kinds : sequence of str
        One tag per characteristic family, each either
        ``genuinely-nonlinear`` or ``linearly-degenerate``.
    ref_state : ndarray
        Reference state v*; all solvers operate in a ball around it.
    conserved : callable, optional
        g(v) -> ndarray; identity when omitted.
    flux_jac, conserved_jac : callable, optional
        Exact Jacobians; finite differences are used when omitted.
    radius : float, optional
        Admissible-neighborhood radius r* (default 0.25*(1+|v*|)).
    tol_char : float
        Threshold below which an eigenvalue counts as vanishing.
    entropy : tuple of callables, optional
        Convex entropy/flux pair (eta, q), each mapping a state to a float.
    """

    dimension: int
    flux: Callable[[np.ndarray], np.ndarray]
    viscosity: Callable[[np.ndarray], np.ndarray]
    field_kinds: tuple[str, ...]
    ref_state: np.ndarray
    conserved: Optional[Callable[[np.ndarray], np.ndarray]] = None
    flux_jac: Optional[Callable[[np.ndarray], np.ndarray]] = None
    conserved_jac: Optional[Callable[[np.ndarray], np.ndarray]] = None
    radius: Optional[float] = None
    tol_char: float = 1e-8
    entropy: Optional[tuple[Callable, Callable]] = None
    s_max: Optional[float] = None
    flux_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    diffusion_flux_batch: Optional[Callable[[np.ndarray, np.ndarray],
                                            np.ndarray]] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "ref_state",
                           np.asarray(self.ref_state, dtype=float))
        if self.radius is None:
            r = 0.25 * (1.0 + np.linalg.norm(self.ref_state))
            object.__setattr__(self, "radius", r)
        if self.s_max is None:
            object.__setattr__(self, "s_max", 0.2)
        if len(self.field_kinds) != self.dimension:
            raise ValueError("need one field kind per family")
        for kind in self.field_kinds:
            if kind not in FIELD_KINDS:
                raise ValueError(f"unknown field kind {kind!r}")
        object.__setattr__(self, "field_kinds", tuple(self.field_kinds))

    # -- basic maps -------------------------------------------------------

    def f(self, v):
        return np.asarray(self.flux(np.asarray(v, dtype=float)), dtype=float)

    def g(self, v):
        if self.conserved is None:
            return np.asarray(v, dtype=float).copy()
        return np.asarray(self.conserved(np.asarray(v, dtype=float)), dtype=float)

    def has_identity_conserved(self) -> bool:
        return self.conserved is None

    def D(self, v):
        return np.asarray(self.viscosity(np.asarray(v, dtype=float)), dtype=float)

    def df(self, v):
        """Jacobian of the flux at v (exact if provided, else central FD)."""
        if self.flux_jac is not None:
            return np.asarray(self.flux_jac(np.asarray(v, dtype=float)), dtype=float)
        return _fd_jacobian(self.f, np.asarray(v, dtype=float))

    def dg(self, v):
        if self.conserved is None:
            return np.eye(self.dimension)
        if self.conserved_jac is not None:
            return np.asarray(self.conserved_jac(np.asarray(v, dtype=float)), dtype=float)
        return _fd_jacobian(self.g, np.asarray(v, dtype=float))

    def in_ball(self, v, slack: float = 1.0) -> bool:
        return np.linalg.norm(np.asarray(v) - self.ref_state) <= slack * self.radius

    # -- batched evaluation over state arrays of shape (M, N) --------------

    def f_batch(self, states: np.ndarray) -> np.ndarray:
        if self.flux_batch is not None:
            return self.flux_batch(states)
        return np.array([self.f(v) for v in states])

    def g_batch(self, states: np.ndarray) -> np.ndarray:
        if self.conserved is None:
            return states.copy()
        return np.array([self.g(v) for v in states])

    def diffusion_flux(self, mid_states: np.ndarray,
                       gradients: np.ndarray) -> np.ndarray:
        """D(v) v_x evaluated at face midpoints, row per face."""
        if self.diffusion_flux_batch is not None:
            return self.diffusion_flux_batch(mid_states, gradients)
        return np.array([self.D(v) @ g
                         for v, g in zip(mid_states, gradients)])

    # -- viscosity block structure ----------------------------------------

    @property
    def n_hyperbolic(self) -> int:
        """Size of the leading zero block of D (0 for invertible D)."""
        return _zero_block_size(self.D(self.ref_state))

    @property
    def n_parabolic(self) -> int:
        return self.dimension - self.n_hyperbolic

    def eta(self, v):
        return float(self.entropy[0](np.asarray(v, dtype=float)))

    def entropy_flux(self, v):
        return float(self.entropy[1](np.asarray(v, dtype=float)))


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Sorted eigenstructure of (dg)^-1 df at a state.

    Right eigenvectors are normalized so that grad(lambda_k) . r_k = 1 for
    genuinely nonlinear families and |r_k| = 1 for linearly degenerate
    families; left eigenvectors satisfy l_i . r_j = delta_ij.
    """

    state: np.ndarray
    eigenvalues: np.ndarray        # shape (N,), ascending
    right: np.ndarray              # shape (N, N), column k = r_k
    left: np.ndarray               # shape (N, N), row i = l_i

    def r(self, k: int) -> np.ndarray:
        return self.right[:, k]

    def l(self, k: int) -> np.ndarray:
        return self.left[k, :]

    def lam(self, k: int) -> float:
        return float(self.eigenvalues[k])


def _fd_jacobian(func, v, step=FD_STEP):
    v = np.asarray(v, dtype=float)
    h = step * (1.0 + np.linalg.norm(v))
    n = v.size
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((np.asarray(func(v + e)) - np.asarray(func(v - e))) / (2 * h))
    return np.column_stack(cols)


def _zero_block_size(Dm, tol=1e-12):
    n = Dm.shape[0]
    scale = max(np.abs(Dm).max(), 1.0)
    size = 0
    for i in range(n):
        if np.abs(Dm[i, :]).max() <= tol * scale and np.abs(Dm[:, i]).max() <= tol * scale:
            size += 1
        else:
            break
    return size


def system_matrix(sys: SystemDef, v) -> np.ndarray:
    """(dg)^-1 df at v."""
    A = sys.df(v)
    if sys.has_identity_conserved():
        return A
    return np.linalg.solve(sys.dg(v), A)


def _eigvals_sorted(M) -> np.ndarray:
    """Ascending real eigenvalues with closed forms for N <= 3."""
    n = M.shape[0]
    if n == 1:
        return np.array([M[0, 0]])
    if n == 2:
        tr = M[0, 0] + M[1, 1]
        disc = (M[0, 0] - M[1, 1]) ** 2 + 4.0 * M[0, 1] * M[1, 0]
        scale = 1.0 + abs(tr)
        if disc < -(2e-8 * scale) ** 2:
            raise HyperbolicityError(
                f"hyperbolicity violated: complex eigenvalues of {M}")
        sq = np.sqrt(max(disc, 0.0))
        return np.array([0.5 * (tr - sq), 0.5 * (tr + sq)])
    if n == 3:
        # Trigonometric solution of the characteristic cubic.
        a, b, c = M[0]
        d, e, f = M[1]
        g, h, i = M[2]
        c2 = a + e + i
        c1 = (a * e - b * d) + (a * i - c * g) + (e * i - f * h)
        c0 = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
        p = c1 - c2 * c2 / 3.0
        q = -c0 + c2 * c1 / 3.0 - 2.0 * c2 ** 3 / 27.0
        scale = 1.0 + abs(c2) + abs(c1) ** 0.5 + abs(c0) ** (1.0 / 3.0)
        disc = -4.0 * p ** 3 - 27.0 * q * q
        if disc < -(1e-7 * scale ** 3) ** 2:
            raise HyperbolicityError(
                f"hyperbolicity violated: complex eigenvalues of {M}")
        if p >= 0.0:
            # Triple/near-multiple root; fall through to LAPACK below.
            lam = np.linalg.eigvals(M)
            if np.abs(lam.imag).max() > 1e-8 * scale:
                raise HyperbolicityError(
                    f"hyperbolicity violated: complex eigenvalues {lam}")
            return np.sort(lam.real)
        m = 2.0 * np.sqrt(-p / 3.0)
        arg = np.clip(3.0 * q / (p * m), -1.0, 1.0)
        phi = np.arccos(arg) / 3.0
        roots = c2 / 3.0 + m * np.cos(phi - 2.0 * np.pi * np.arange(3) / 3.0)
        return np.sort(roots)
    lam = np.linalg.eigvals(M)
    scale = 1.0 + np.abs(lam).max()
    if np.abs(lam.imag).max() > 1e-8 * scale:
        raise HyperbolicityError(
            f"hyperbolicity violated: complex eigenvalues {lam}")
    return np.sort(lam.real)


def raw_eigenvalues(sys: SystemDef, v) -> np.ndarray:
    """Ascending generalized eigenvalues of (df, dg) at v, without vectors."""
    return _eigvals_sorted(system_matrix(sys, v))


def family_eigenvector(sys: SystemDef, v, k: int):
    """(lambda_k, unit right eigenvector) for a single family.

    The eigenvector is oriented so that its largest-magnitude entry is
    positive.  Cheaper than a full decomposition inside curve integrators.
    """
    M = system_matrix(sys, v)
    n = M.shape[0]
    if n == 1:
        return float(M[0, 0]), np.array([1.0])
    if n == 2:
        lam = _eigvals_sorted(M)[k]
        c1a, c1b = M[0, 1], lam - M[0, 0]
        c2a, c2b = lam - M[1, 1], M[1, 0]
        if c1a * c1a + c1b * c1b >= c2a * c2a + c2b * c2b:
            r = np.array([c1a, c1b])
        else:
            r = np.array([c2a, c2b])
    elif n == 3:
        lam = _eigvals_sorted(M)[k]
        # Null space of (M - lam I): cross product of the two most
        # independent rows of the rank-2 matrix.
        B = M - lam * np.eye(3)
        best = None
        best_norm2 = -1.0
        for i, j in ((0, 1), (0, 2), (1, 2)):
            u, w = B[i], B[j]
            c0 = u[1] * w[2] - u[2] * w[1]
            c1 = u[2] * w[0] - u[0] * w[2]
            c2 = u[0] * w[1] - u[1] * w[0]
            n2 = c0 * c0 + c1 * c1 + c2 * c2
            if n2 > best_norm2:
                best_norm2 = n2
                best = (c0, c1, c2)
        r = np.array(best)
    else:
        lam_all, R = np.linalg.eig(M)
        scale = 1.0 + np.abs(lam_all).max()
        if np.abs(lam_all.imag).max() > 1e-8 * scale:
            raise HyperbolicityError(
                f"hyperbolicity violated at state {np.asarray(v)}")
        order = np.argsort(lam_all.real)
        lam = lam_all.real[order[k]]
        r = R.real[:, order[k]]
    nrm = float(np.sqrt(r @ r))
    if nrm == 0:
        raise HyperbolicityError(f"degenerate eigenvector at {np.asarray(v)}")
    r = r / nrm
    j = int(np.argmax(np.abs(r)))
    if r[j] < 0:
        r = -r
    return float(lam), r


def eigen_structure(sys: SystemDef, v) -> EigenDecomposition:
    """Full sorted eigenstructure of the flux Jacobian pencil at v.

    Raises
    ------
    HyperbolicityError
        If eigenvalues are non-real or coalesce at v.
    """
    v = np.asarray(v, dtype=float)
    A = sys.df(v)
    if sys.has_identity_conserved():
        M = A
    else:
        M = np.linalg.solve(sys.dg(v), A)
    lam, R = np.linalg.eig(M)

    scale = 1.0 + np.abs(lam).max()
    if np.abs(lam.imag).max() > 1e-8 * scale:
        raise HyperbolicityError(f"hyperbolicity violated at state {v}: "
                                 f"complex eigenvalues {lam}")
    lam = lam.real
    R = R.real
    order = np.argsort(lam)
    lam = lam[order]
    R = R[:, order]
    gaps = np.diff(lam)
    if gaps.size and gaps.min() <= 1e-8 * scale:
        raise HyperbolicityError(f"hyperbolicity violated at state {v}: "
                                 f"coalescing eigenvalues {lam}")

    # Deterministic orientation before normalization: largest entry positive.
    for k in range(sys.dimension):
        j = int(np.argmax(np.abs(R[:, k])))
        if R[j, k] < 0:
            R[:, k] = -R[:, k]
        R[:, k] /= np.linalg.norm(R[:, k])

    Linv = np.linalg.inv(R)
    for k in range(sys.dimension):
        if sys.field_kinds[k] == GENUINELY_NONLINEAR:
            if sys.flux_jac is not None:
                # d lambda_k . r = l_k (d_r M) r_k with l_k r_k = 1; cheaper
                # and more accurate than differencing the eigenvalues when
                # exact Jacobians are available.
                h = FD_STEP * (1.0 + np.linalg.norm(v))
                r = R[:, k]
                Ap = sys.df(v + h * r)
                Am = sys.df(v - h * r)
                if sys.has_identity_conserved():
                    dM = (Ap - Am) / (2 * h)
                else:
                    Gp = sys.dg(v + h * r)
                    Gm = sys.dg(v - h * r)
                    dA = (Ap - Am) / (2 * h)
                    dG = (Gp - Gm) / (2 * h)
                    dM = np.linalg.solve(sys.dg(v), dA - dG @ M)
                d = float(Linv[k, :] @ dM @ r)
            else:
                d = directional_eigenvalue_derivative(sys, v, k, R[:, k])
            if abs(d) < 1e-10 * scale:
                raise HyperbolicityError(
                    f"family {k} tagged genuinely nonlinear but grad(lambda).r "
                    f"vanishes at {v}")
            R[:, k] /= d

    L = np.linalg.inv(R)
    return EigenDecomposition(state=v, eigenvalues=lam, right=R, left=L)


def directional_eigenvalue_derivative(sys: SystemDef, v, k: int, direction,
                                      step=FD_STEP) -> float:
    """Central-difference derivative of lambda_k along a direction."""
    v = np.asarray(v, dtype=float)
    direction = np.asarray(direction, dtype=float)
    h = step * (1.0 + np.linalg.norm(v))
    lp = raw_eigenvalues(sys, v + h * direction)[k]
    lm = raw_eigenvalues(sys, v - h * direction)[k]
    return float((lp - lm) / (2 * h))


@lru_cache(maxsize=None)
def _ball_samples(sys: SystemDef, count: int = 64, seed: int = 20481):
    """Deterministic sample states filling the admissible ball of a system."""
    rng = np.random.default_rng(seed)
    n = sys.dimension
    x = rng.normal(size=(count, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    radii = rng.uniform(size=(count, 1)) ** (1.0 / n)
    pts = sys.ref_state + sys.radius * x * radii
    # Axis extremes catch monotone eigenvalue sweeps that random points miss.
    for j in range(n):
        for sgn in (-1.0, 1.0):
            e = np.zeros(n)
            e[j] = sgn * 0.999 * sys.radius
            pts = np.vstack([pts, sys.ref_state + e])
    return pts


@lru_cache(maxsize=None)
def eigenvalue_range(sys: SystemDef) -> tuple[np.ndarray, np.ndarray]:
    """(min, max) of each sorted eigenvalue over the admissible ball."""
    samples = _ball_samples(sys)
    lams = np.array([raw_eigenvalues(sys, p) for p in samples])
    return lams.min(axis=0), lams.max(axis=0)


def classify_boundary_field(sys: SystemDef, v) -> Optional[int]:
    """Index of the family whose speed can vanish at the x=0 boundary.

    Returns the 0-based family index k when |lambda_k(v)| <= tol_char or when
    lambda_k changes sign somewhere in the admissible ball; None when every
    eigenvalue is bounded away from zero (non-characteristic boundary).
    """
    lam = raw_eigenvalues(sys, v)
    lo, hi = eigenvalue_range(sys)
    tol = sys.tol_char
    hits = [k for k in range(sys.dimension)
            if abs(lam[k]) <= tol or (lo[k] < -tol and hi[k] > tol)]
    if not hits:
        return None
    if len(hits) > 1:
        raise MultipleCharacteristicFieldsError(
            f"multiple characteristic fields unsupported (families {hits})")
    return hits[0]


def max_wave_speed(sys: SystemDef) -> float:
    """Fastest characteristic speed over the admissible ball."""
    lo, hi = eigenvalue_range(sys)
    return float(max(abs(lo).max(), abs(hi).max()))


def check_coupling_condition(sys: SystemDef) -> bool:
    """Numerical coupling check at v*: no eigenvector lies in ker D.

    A failure is reported as a warning (it conditions the well-posedness of
    boundary layers, not the inviscid machinery) and False is returned.
    """
    dec = eigen_structure(sys, sys.ref_state)
    Dm = sys.D(sys.ref_state)
    ok = True
    for k in range(sys.dimension):
        r = dec.r(k) / np.linalg.norm(dec.r(k))
        if np.linalg.norm(Dm @ r) <= 1e-10 * (1.0 + np.abs(Dm).max()):
            warnings.warn(
                f"coupling condition fails at v* for family {k}: "
                f"eigenvector in the kernel of D", stacklevel=2)
            ok = False
    return ok


def validate_system(sys: SystemDef) -> SystemDef:
    """Run the structural checks every built-in system must satisfy."""
    v = sys.ref_state
    G = sys.dg(v)
    if abs(np.linalg.det(G)) < 1e-12:
        raise ValueError("Jacobian of the conserved map is singular at v*")
    eigen_structure(sys, v)  # raises on hyperbolicity failure

    Dm = sys.D(v)
    nh = _zero_block_size(Dm)
    b = Dm[nh:, nh:]
    off1 = Dm[:nh, nh:]
    off2 = Dm[nh:, :nh]
    scale = max(np.abs(Dm).max(), 1.0)
    if off1.size and np.abs(off1).max() > 1e-12 * scale:
        raise ValueError("viscosity matrix is not in block normal form")
    if off2.size and np.abs(off2).max() > 1e-12 * scale:
        raise ValueError("viscosity matrix is not in block normal form")
    if b.size:
        sym_eigs = np.linalg.eigvalsh(0.5 * (b + b.T))
        if sym_eigs.min() <= 0:
            raise ValueError("parabolic block of D is not positive definite")
    elif sys.dimension > 0 and nh == sys.dimension:
        raise ValueError("viscosity matrix vanishes identically")
    check_coupling_condition(sys)
    return sys


# ----------------------------------------------------------------------
# Built-in catalogue
# ----------------------------------------------------------------------

def linear_system(A, D=None, v_star=None, radius=None) -> SystemDef:
    """Constant-coefficient system v_t + A v_x = 0 with constant viscosity.

    Linear wave curves are globally valid, so the admissible radius and the
    strength cap default to generous values.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    Dm = np.eye(n) if D is None else np.asarray(D, dtype=float)
    v_star = np.zeros(n) if v_star is None else np.asarray(v_star, dtype=float)
    if radius is None:
        radius = 10.0 * (1.0 + np.linalg.norm(v_star))
    sys = SystemDef(
        dimension=n,
        flux=lambda v: A @ v,
        flux_jac=lambda v: A,
        viscosity=lambda v: Dm,
        field_kinds=(LINEARLY_DEGENERATE,) * n,
        ref_state=v_star,
        radius=radius,
        s_max=2.0 * radius,
        flux_batch=lambda vs: vs @ A.T,
        diffusion_flux_batch=lambda mid, grad: grad @ Dm.T,
        name="linear",
        params={"A": A.tolist(), "D": Dm.tolist()},
    )
    return validate_system(sys)


def burgers(shift: float = 0.0, diffusion: float = 1.0,
            radius: float = 2.5) -> SystemDef:
    """Scalar convex flux f(u) = (u - shift)^2 / 2 with constant diffusion."""
    a = float(shift)
    d = float(diffusion)
    sys = SystemDef(
        dimension=1,
        flux=lambda v: np.array([0.5 * (v[0] - a) ** 2]),
        flux_jac=lambda v: np.array([[v[0] - a]]),
        viscosity=lambda v: np.array([[d]]),
        field_kinds=(GENUINELY_NONLINEAR,),
        ref_state=np.array([a]),
        radius=radius,
        s_max=2.0 * radius,
        flux_batch=lambda vs: 0.5 * (vs - a) ** 2,
        diffusion_flux_batch=lambda mid, grad: d * grad,
        entropy=(lambda v: 0.5 * (v[0] - a) ** 2,
                 lambda v: (v[0] - a) ** 3 / 3.0),
        name="burgers",
        params={"shift": a, "diffusion": d},
    )
    return validate_system(sys)


def _psystem_pressure(gamma):
    def p(vol):
        return vol ** (-gamma)

    def dp(vol):
        return -gamma * vol ** (-gamma - 1.0)

    return p, dp


def p_system(gamma: float = 2.0, viscosity: str = "identity",
             mu: float = 1.0, radius: float = 0.5) -> SystemDef:
    """Isentropic gas dynamics in Lagrangian coordinates.

    Unknowns (v, u) = (specific volume, velocity), flux (-u, p(v)) with the
    polytropic law p(v) = v^(-gamma).  ``viscosity`` selects the artificial
    matrix D = I or the physical form D = [[0, 0], [0, mu / v]].
    """
    gamma = float(gamma)
    p, dp = _psystem_pressure(gamma)

    def flux(w):
        return np.array([-w[1], p(w[0])])

    def flux_jac(w):
        return np.array([[0.0, -1.0], [dp(w[0]), 0.0]])

    if viscosity == "identity":
        visc = lambda w: np.eye(2)
        dflux = lambda mid, grad: grad.copy()
    elif viscosity == "navier-stokes":
        visc = lambda w: np.array([[0.0, 0.0], [0.0, mu / w[0]]])
        dflux = lambda mid, grad: np.column_stack(
            [np.zeros(len(grad)), mu / mid[:, 0] * grad[:, 1]])
    else:
        raise ValueError(f"unknown p-system viscosity {viscosity!r}")

    if abs(gamma - 1.0) < 1e-14:
        pot = lambda vol: -np.log(vol)
    else:
        pot = lambda vol: vol ** (1.0 - gamma) / (gamma - 1.0)

    sys = SystemDef(
        dimension=2,
        flux=flux,
        flux_jac=flux_jac,
        viscosity=visc,
        field_kinds=(GENUINELY_NONLINEAR, GENUINELY_NONLINEAR),
        ref_state=np.array([1.0, 0.0]),
        radius=radius,
        flux_batch=lambda ws: np.column_stack([-ws[:, 1], p(ws[:, 0])]),
        diffusion_flux_batch=dflux,
        entropy=(lambda w: 0.5 * w[1] ** 2 + pot(w[0]),
                 lambda w: w[1] * p(w[0])),
        name="p-system",
        params={"gamma": gamma, "viscosity": viscosity, "mu": mu},
    )
    return validate_system(sys)


def _euler_flux_batch(ws, gamma):
    pr = (gamma - 1.0) * (ws[:, 2] - 0.5 * ws[:, 1] ** 2) / ws[:, 0]
    return np.column_stack([-ws[:, 1], pr, pr * ws[:, 1]])


def lagrangian_euler(gamma: float = 1.4, viscosity: str = "identity",
                     mu: float = 1.0, radius: float = 0.5) -> SystemDef:
    """Full gas dynamics in Lagrangian coordinates, unknowns (v, u, E).

    The pressure law is p = (gamma - 1)(E - u^2/2)/v; the middle eigenvalue
    vanishes identically, so the x=0 boundary is always characteristic with
    a linearly degenerate boundary field.
    """
    gamma = float(gamma)

    def pressure(w):
        vol, u, E = w
        return (gamma - 1.0) * (E - 0.5 * u * u) / vol

    def flux(w):
        pr = pressure(w)
        return np.array([-w[1], pr, pr * w[1]])

    def flux_jac(w):
        vol, u, E = w
        pr = pressure(w)
        p_v = -pr / vol
        p_u = -(gamma - 1.0) * u / vol
        p_E = (gamma - 1.0) / vol
        return np.array([
            [0.0, -1.0, 0.0],
            [p_v, p_u, p_E],
            [u * p_v, pr + u * p_u, u * p_E],
        ])

    if viscosity == "identity":
        visc = lambda w: np.eye(3)
        dflux = lambda mid, grad: grad.copy()
    elif viscosity == "navier-stokes":
        visc = lambda w: np.diag([0.0, mu / w[0], mu / w[0]])
        dflux = lambda mid, grad: np.column_stack(
            [np.zeros(len(grad)), mu / mid[:, 0] * grad[:, 1],
             mu / mid[:, 0] * grad[:, 2]])
    else:
        raise ValueError(f"unknown euler viscosity {viscosity!r}")

    e_star = 1.0 / (gamma - 1.0)   # makes p(v*) = 1
    sys = SystemDef(
        dimension=3,
        flux=flux,
        flux_jac=flux_jac,
        viscosity=visc,
        field_kinds=(GENUINELY_NONLINEAR, LINEARLY_DEGENERATE,
                     GENUINELY_NONLINEAR),
        ref_state=np.array([1.0, 0.0, e_star]),
        radius=radius,
        flux_batch=lambda ws: _euler_flux_batch(ws, gamma),
        diffusion_flux_batch=dflux,
        name="lagrangian-euler",
        params={"gamma": gamma, "viscosity": viscosity, "mu": mu},
    )
    return validate_system(sys)


#: Factory table for scenario files; parameters are passed through as-is.
CATALOGUE = {
    "linear": linear_system,
    "burgers": burgers,
    "p-system": p_system,
    "lagrangian-euler": lagrangian_euler,
}


def make_system(name: str, **params) -> SystemDef:
    """Build a catalogue system by name with keyword parameters."""
    try:
        factory = CATALOGUE[name]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; "
                         f"choose from {sorted(CATALOGUE)}") from None
    return factory(**params)
