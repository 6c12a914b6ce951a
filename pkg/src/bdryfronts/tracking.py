"""Event-driven wave front tracking on the half-line x > 0.

Piecewise-constant approximate solutions are advanced from event to event:
front-front collisions are resolved by the accurate or simplified Riemann
solver (the latter emits a non-physical front travelling at an artificially
fast speed to keep the front count finite), fronts reaching x = 0 trigger a
boundary Riemann problem, and jumps of the quantized boundary datum re-solve
the boundary state.  A Glimm-type functional with boundary terms (including
the center-component size of the standing layer and the strength of a parked
0-speed discontinuity) is tracked across every interaction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .boundary import (RELATION_VISCOUS, BoundaryFan, BoundaryRiemannError,
                       solve_boundary_riemann)
from .riemann import (NON_PHYSICAL, RAREFACTION, Wave,
                      discretize_rarefaction, make_wave, solve_riemann)
from .systems import (GENUINELY_NONLINEAR, SystemDef, eigenvalue_range,
                      max_wave_speed, raw_eigenvalues)

FRONT_FRONT = "front-front"
BOUNDARY_HIT = "boundary-hit"
DATUM_JUMP = "datum-jump"

#: per-event slack allowed in the functional monotonicity check
def functional_slack(delta: float) -> float:
    return 10.0 * delta ** 2


class SmallDataGuardError(RuntimeError):
    """Total variation of the data exceeds the small-data guard."""


class VariationBlowupError(RuntimeError):
    """Diagnostic: the total variation cap was exceeded."""


class FrontExplosionError(RuntimeError):
    """Diagnostic: the event-count cap was exceeded."""


# ----------------------------------------------------------------------
# Piecewise-constant data
# ----------------------------------------------------------------------

@dataclass(eq=False)
class StepFunction:
    """Right-continuous step function with finitely many jumps."""

    breakpoints: np.ndarray       # ascending, shape (J,)
    values: np.ndarray            # shape (J + 1, N)

    def __post_init__(self):
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape[0] != self.breakpoints.size + 1:
            raise ValueError("need one more value than breakpoints")

    def __call__(self, x: float) -> np.ndarray:
        i = int(np.searchsorted(self.breakpoints, x, side="right"))
        return self.values[i]

    @property
    def initial_value(self) -> np.ndarray:
        return self.values[0]

    def total_variation(self) -> float:
        if self.values.shape[0] < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.values, axis=0),
                                    axis=1).sum())


def quantize_function(func: Callable[[float], np.ndarray], span: float,
                      delta: float, samples: int = 4000) -> StepFunction:
    """Greedy staircase approximation: hold the current level until the
    function drifts by delta in max norm, then jump onto the current value.

    Levels lie on the graph of the function, so the total variation of the
    staircase never exceeds that of the function; the sup-norm distance is
    at most delta.
    """
    xs = np.linspace(0.0, span, samples)
    level = np.asarray(func(0.0), dtype=float)
    breaks = []
    values = [level]
    half_cross = None          # first point drifting past delta/2
    for x in xs[1:]:
        v = np.asarray(func(x), dtype=float)
        dev = np.abs(v - level).max()
        if dev >= delta:
            level = v
            breaks.append(x)
            values.append(level)
            half_cross = None
        elif dev >= 0.5 * delta and half_cross is None:
            half_cross = x
    # snap onto the far-field value so the residual drift (< delta) does
    # not leave a spurious offset at infinity
    v_end = np.asarray(func(span), dtype=float)
    if np.abs(v_end - level).max() > 0.5 * delta:
        breaks.append(half_cross if half_cross is not None else span)
        values.append(v_end)
    return StepFunction(np.asarray(breaks), np.asarray(values))


def quantize_data(sys: SystemDef, initial, datum, delta: float,
                  span_x: float = 10.0, span_t: float = 10.0,
                  guard: float = 0.1, override_guard: bool = False
                  ) -> tuple[StepFunction, StepFunction]:
    """Piecewise-constant approximations of the initial and boundary data.

    ``initial`` and ``datum`` may already be StepFunctions (returned
    unchanged) or callables of x and t respectively.  The small-data guard
    TotVar v0 + TotVar vb + |v0(0+) - vb(0+)| <= guard is enforced unless
    overridden.
    """
    v0 = (initial if isinstance(initial, StepFunction)
          else quantize_function(initial, getattr(initial, "span", span_x),
                                 delta))
    vb = (datum if isinstance(datum, StepFunction)
          else quantize_function(datum, getattr(datum, "span", span_t),
                                 delta))
    size = (v0.total_variation() + vb.total_variation()
            + float(np.linalg.norm(v0.initial_value - vb.initial_value)))
    if size > guard and not override_guard:
        raise SmallDataGuardError(
            f"small-data guard: data size {size:.4f} exceeds {guard}")
    return v0, vb


# ----------------------------------------------------------------------
# Fronts and simulation state
# ----------------------------------------------------------------------

@dataclass(eq=False)
class Front:
    """A moving discontinuity of the piecewise-constant approximation."""

    position: float
    speed: float
    wave: Wave
    seq: int

    @property
    def family(self) -> Optional[int]:
        return self.wave.family

    @property
    def left(self) -> np.ndarray:
        return self.wave.left

    @property
    def right(self) -> np.ndarray:
        return self.wave.right

    @property
    def strength(self) -> float:
        if self.wave.kind == NON_PHYSICAL:
            return self.wave.jump
        return abs(self.wave.strength)

    @property
    def jump(self) -> float:
        return self.wave.jump

    def at(self, t_now: float, t_ref: float) -> float:
        return self.position + self.speed * (t_now - t_ref)


@dataclass(eq=False)
class InteractionRecord:
    """Per-event log entry with the quantities of the boundary estimate."""

    time: float
    kind: str
    incoming_strengths: tuple
    delta_tv: float
    hit_family: Optional[int] = None
    hit_strength: float = 0.0
    hit_speed: float = float("nan")        # shock speed or fan-left eigenvalue
    pre_char_size: float = 0.0
    bound: float = float("nan")            # |s|([speed]^- + |char size|)
    n_outgoing: int = 0


@dataclass(eq=False)
class GlimmSnapshot:
    """Functional decomposition at one instant."""

    time: float
    linear: float          # V: weighted strengths + boundary terms
    quadratic: float       # Q: approaching interior pairs
    boundary: float        # Q_b: fronts approaching the wall
    total: float           # V + C0 (Q + Q_b)


@dataclass(eq=False)
class Segment:
    """Fronts between two consecutive events (linear motion)."""

    t0: float
    t1: float
    trace: np.ndarray
    positions: np.ndarray      # at t0
    speeds: np.ndarray
    lefts: np.ndarray          # (n_fronts, N)
    rights: np.ndarray

    def profile(self, t: float):
        """Breakpoints and states of v(t, .) for t in [t0, t1]."""
        x = self.positions + self.speeds * (t - self.t0)
        if len(x) == 0:
            return np.zeros(0), self.trace[None, :]
        states = np.vstack([self.lefts[0], self.rights])
        return x, states

    def eval(self, t: float, x: float) -> np.ndarray:
        pos = self.positions + self.speeds * (t - self.t0)
        i = int(np.searchsorted(pos, x, side="right"))
        if i == 0:
            return self.lefts[0] if len(pos) else self.trace
        return self.rights[i - 1]


@dataclass(eq=False)
class Trajectory:
    """Complete output of one front-tracking run."""

    sys: SystemDef
    segments: list
    records: list
    functional: list
    delta: float
    c0: float
    exit_status: str = "ok"
    data_size: float = 0.0

    def eval(self, t: float, x: float) -> np.ndarray:
        seg = self._segment_at(t)
        return seg.eval(t, x)

    def profile(self, t: float):
        seg = self._segment_at(t)
        return seg.profile(t)

    def _segment_at(self, t: float) -> Segment:
        for seg in self.segments:
            if seg.t0 - 1e-14 <= t <= seg.t1 + 1e-14:
                return seg
        if t >= self.segments[-1].t1:
            return self.segments[-1]
        raise ValueError(f"time {t} outside the computed range")

    def total_variation(self, t: float) -> float:
        seg = self._segment_at(t)
        if len(seg.positions) == 0:
            return 0.0
        jumps = seg.rights - np.vstack([seg.lefts[0:1], seg.rights[:-1]])
        return float(np.linalg.norm(jumps, axis=1).sum())

    @property
    def t_end(self) -> float:
        return self.segments[-1].t1


@dataclass(eq=False)
class TrackerConfig:
    delta: float = 1e-2
    t_end: float = 1.0
    relation: str = RELATION_VISCOUS
    np_threshold: Optional[float] = None     # default delta**3
    boundary_weight: float = 2.0
    c0: Optional[float] = None               # calibrated when None
    tv_cap_factor: float = 10.0
    max_events: int = 100000
    guard: float = 0.1
    override_guard: bool = False

    def threshold(self) -> float:
        return (self.delta ** 3 if self.np_threshold is None
                else self.np_threshold)


class FrontTracker:
    """Sequential event loop owning the full simulation state."""

    def __init__(self, sys: SystemDef, initial: StepFunction,
                 datum: StepFunction, config: TrackerConfig):
        self.sys = sys
        self.config = config
        self.initial = initial
        self.datum = datum
        self.t = 0.0
        self.seq = 0
        self.fronts: list[Front] = []
        self.records: list[InteractionRecord] = []
        self.functional: list[GlimmSnapshot] = []
        self.segments: list[Segment] = []
        lo, hi = eigenvalue_range(sys)
        self.np_speed = float(hi[-1]) + 1.0
        self._approach_wall = lo < -sys.tol_char   # families that can hit
        self.data_size = (initial.total_variation() + datum.total_variation()
                          + float(np.linalg.norm(initial.initial_value
                                                 - datum.initial_value)))
        self.tv_cap = config.tv_cap_factor * max(self.data_size, 1e-6)
        self.c0 = config.c0 if config.c0 is not None else 1.0
        self.bfan: Optional[BoundaryFan] = None
        self.exit_status = "ok"
        self._datum_times = list(datum.breakpoints)
        self._datum_idx = 0

    # -- construction of fronts --------------------------------------

    def _new_front(self, x: float, wave: Wave) -> Front:
        speed = wave.speed
        self.seq += 1
        return Front(position=x, speed=float(speed), wave=wave, seq=self.seq)

    def _emit_waves(self, x: float, waves: Sequence[Wave]) -> list[Front]:
        out = []
        for w in waves:
            if w.kind == RAREFACTION and w.strength > self.config.delta:
                for piece in discretize_rarefaction(self.sys, w,
                                                    self.config.delta):
                    out.append(self._new_front(x, piece))
            else:
                if w.kind == RAREFACTION:
                    # single-piece fan travels at its right-state speed
                    w = replace(w, speed=w.speed_range[1])
                out.append(self._new_front(x, w))
        return out

    def initialize(self):
        """Boundary Riemann problem at the origin plus the interior fans."""
        datum0 = self.datum.initial_value
        interior0 = self.initial.initial_value
        self.bfan = solve_boundary_riemann(self.sys, interior0, datum0,
                                           relation=self.config.relation)
        fronts = self._emit_waves(0.0, self.bfan.waves)
        for xj, j in zip(self.initial.breakpoints,
                         range(len(self.initial.breakpoints))):
            fan = solve_riemann(self.sys, self.initial.values[j],
                                self.initial.values[j + 1])
            fronts.extend(self._emit_waves(float(xj), fan.waves))
        fronts.sort(key=lambda f: (f.position, f.speed, f.seq))
        self.fronts = fronts
        self._snapshot_functional()

    # -- events -------------------------------------------------------

    def next_event(self):
        """(time, kind, payload) of the earliest event, or None."""
        t_best = np.inf
        kind = None
        payload = None
        for i in range(len(self.fronts) - 1):
            a, b = self.fronts[i], self.fronts[i + 1]
            rel = a.speed - b.speed
            if rel <= 1e-14:
                continue
            dt = (b.position - a.position) / rel
            t_hit = self.t + max(dt, 0.0)
            if t_hit < t_best - 1e-14:
                t_best, kind, payload = t_hit, FRONT_FRONT, i
        for i, f in enumerate(self.fronts):
            if f.speed < -1e-14 and f.position > 0:
                t_hit = self.t + f.position / (-f.speed)
                if t_hit < t_best - 1e-14:
                    t_best, kind, payload = t_hit, BOUNDARY_HIT, i
        if self._datum_idx < len(self._datum_times):
            tj = max(self._datum_times[self._datum_idx], self.t)
            if tj < t_best - 1e-14:
                t_best, kind, payload = tj, DATUM_JUMP, tj
        if kind is None:
            return None
        return t_best, kind, payload

    def _advance_to(self, t_new: float):
        if t_new < self.t:
            return
        self._close_segment(t_new)
        for f in self.fronts:
            f.position = max(f.position + f.speed * (t_new - self.t), 0.0)
        self.t = t_new

    def _close_segment(self, t_new: float):
        trace = (self.bfan.trace if self.bfan is not None
                 else self.initial.initial_value)
        n = len(self.fronts)
        dim = self.sys.dimension
        seg = Segment(
            t0=self.t, t1=t_new, trace=np.asarray(trace, dtype=float),
            positions=np.array([f.position for f in self.fronts]),
            speeds=np.array([f.speed for f in self.fronts]),
            lefts=(np.array([f.left for f in self.fronts])
                   if n else np.zeros((0, dim))),
            rights=(np.array([f.right for f in self.fronts])
                    if n else np.zeros((0, dim))))
        self.segments.append(seg)

    def _interior_tv(self) -> float:
        return float(sum(f.jump for f in self.fronts))

    # -- interaction resolution ----------------------------------------

    def _collision_cluster(self, i: int) -> tuple[int, int]:
        """Indices [lo, hi] of fronts meeting at one point at the current
        time (simultaneous multi-front collisions are merged)."""
        lo = i
        hi = i + 1
        x = self.fronts[i].position
        while lo - 1 >= 0 and abs(self.fronts[lo - 1].position - x) <= 1e-12:
            lo -= 1
        while (hi + 1 < len(self.fronts)
               and abs(self.fronts[hi + 1].position - x) <= 1e-12):
            hi += 1
        return lo, hi

    def resolve_interior(self, i: int):
        lo, hi = self._collision_cluster(i)
        incoming = self.fronts[lo:hi + 1]
        x = incoming[0].position
        left = incoming[0].left
        right = incoming[-1].right
        tv_in = sum(f.jump for f in incoming)
        strengths = tuple(f.strength for f in incoming)

        physical = [f for f in incoming if f.wave.kind != NON_PHYSICAL]
        nps = [f for f in incoming if f.wave.kind == NON_PHYSICAL]
        prod = 1.0
        for f in incoming:
            prod *= f.strength
        use_accurate = (len(incoming) > 2
                        or (len(physical) == 2
                            and prod >= self.config.threshold()))

        if use_accurate and not nps:
            fan = solve_riemann(self.sys, left, right)
            new_fronts = self._emit_waves(x, fan.waves)
        else:
            new_fronts = self._simplified_fronts(x, incoming, left, right)

        self.fronts[lo:hi + 1] = new_fronts
        self.fronts.sort(key=lambda f: (f.position, f.speed, f.seq))
        tv_out = sum(f.jump for f in new_fronts)
        rec = InteractionRecord(
            time=self.t, kind=FRONT_FRONT, incoming_strengths=strengths,
            delta_tv=tv_out - tv_in, n_outgoing=len(new_fronts))
        self.records.append(rec)
        return rec

    def _simplified_fronts(self, x, incoming, left, right) -> list[Front]:
        """Transmit physical waves with unchanged strengths in family order
        and close the jump with one fast non-physical front."""
        physical = [f for f in incoming if f.wave.kind != NON_PHYSICAL]
        by_family: dict[int, float] = {}
        for f in physical:
            by_family[f.family] = by_family.get(f.family, 0.0) \
                + f.wave.strength
        state = left
        out = []
        for fam in sorted(by_family):
            s = by_family[fam]
            if abs(s) <= 1e-14:
                continue
            w = make_wave(self.sys, state, fam, s)
            if w.kind == RAREFACTION:
                w = replace(w, speed=w.speed_range[1])
            out.append(self._new_front(x, w))
            state = w.right
        if np.abs(state - right).max() > 1e-14 * (1 + np.abs(right).max()):
            np_wave = Wave(family=None, kind=NON_PHYSICAL, left=state,
                           right=right, strength=float(
                               np.linalg.norm(right - state)),
                           speed=self.np_speed)
            out.append(self._new_front(x, np_wave))
        return out

    def resolve_boundary_hit(self, i: int):
        # all fronts that reach the wall simultaneously are absorbed at once
        hitters = [i]
        j = i + 1
        while (j < len(self.fronts) and self.fronts[j].speed < -1e-14
               and self.fronts[j].position <= 1e-12):
            hitters.append(j)
            j += 1
        hit_fronts = [self.fronts[jj] for jj in hitters]
        main = hit_fronts[-1]
        interior = main.right
        datum_now = self.datum(self.t)
        pre_size = self.bfan.char_size if self.bfan is not None else 0.0
        tv_in = sum(f.jump for f in hit_fronts)

        fan = solve_boundary_riemann(self.sys, interior, datum_now,
                                     relation=self.config.relation,
                                     seed_fan=self.bfan)
        self.bfan = fan
        new_fronts = self._emit_waves(0.0, fan.waves)
        del self.fronts[hitters[0]:hitters[-1] + 1]
        self.fronts = new_fronts + self.fronts
        self.fronts.sort(key=lambda f: (f.position, f.speed, f.seq))

        if main.wave.kind == RAREFACTION:
            k = main.family
            hit_speed = float(raw_eigenvalues(self.sys, main.left)[k])
        else:
            hit_speed = main.speed
        s_hit = main.strength
        tv_out = sum(f.jump for f in new_fronts)
        bound = s_hit * (max(-hit_speed, 0.0) + abs(pre_size))
        rec = InteractionRecord(
            time=self.t, kind=BOUNDARY_HIT,
            incoming_strengths=tuple(f.strength for f in hit_fronts),
            delta_tv=tv_out - tv_in,
            hit_family=main.family, hit_strength=s_hit, hit_speed=hit_speed,
            pre_char_size=pre_size, bound=bound, n_outgoing=len(new_fronts))
        self.records.append(rec)
        return rec

    def resolve_datum_jump(self, t_jump: float):
        self._datum_idx += 1
        datum_new = self.datum(t_jump + 1e-13)
        trace = self.bfan.trace if self.bfan is not None \
            else self.initial.initial_value
        pre_size = self.bfan.char_size if self.bfan is not None else 0.0
        if np.abs(np.asarray(datum_new) - self.bfan.datum).max() <= 1e-14:
            rec = InteractionRecord(time=self.t, kind=DATUM_JUMP,
                                    incoming_strengths=(), delta_tv=0.0,
                                    pre_char_size=pre_size)
            self.records.append(rec)
            return rec
        fan = solve_boundary_riemann(self.sys, trace, datum_new,
                                     relation=self.config.relation,
                                     seed_fan=self.bfan)
        self.bfan = fan
        new_fronts = self._emit_waves(0.0, fan.waves)
        self.fronts = new_fronts + self.fronts
        self.fronts.sort(key=lambda f: (f.position, f.speed, f.seq))
        tv_out = sum(f.jump for f in new_fronts)
        rec = InteractionRecord(
            time=self.t, kind=DATUM_JUMP, incoming_strengths=(),
            delta_tv=tv_out, pre_char_size=pre_size,
            n_outgoing=len(new_fronts))
        self.records.append(rec)
        return rec

    # -- functional -----------------------------------------------------

    def glimm_functional(self) -> GlimmSnapshot:
        w_b = self.config.boundary_weight
        linear = 0.0
        for f in self.fronts:
            linear += f.strength
        if self.bfan is not None:
            linear += w_b * abs(self.bfan.char_size)
            if self.bfan.boundary_shock is not None:
                shock_s = abs(self.bfan.boundary_shock.strength)
                if abs(self.bfan.char_size) != shock_s:
                    linear += w_b * shock_s
        quad = 0.0
        n = len(self.fronts)
        for a in range(n):
            fa = self.fronts[a]
            for b in range(a + 1, n):
                fb = self.fronts[b]
                if self._approaching(fa, fb):
                    quad += fa.strength * fb.strength
        qb = 0.0
        for f in self.fronts:
            if f.speed < -1e-12:
                qb += f.strength
        qb *= w_b
        total = linear + self.c0 * (quad + qb)
        return GlimmSnapshot(time=self.t, linear=linear, quadratic=quad,
                             boundary=qb, total=total)

    def _approaching(self, fa: Front, fb: Front) -> bool:
        """fa is left of fb; do they approach?"""
        if fa.wave.kind == NON_PHYSICAL:
            return fb.wave.kind != NON_PHYSICAL
        if fb.wave.kind == NON_PHYSICAL:
            return False
        if fa.family > fb.family:
            return True
        if fa.family == fb.family:
            gnl = self.sys.field_kinds[fa.family] == GENUINELY_NONLINEAR
            return gnl and (fa.wave.strength < 0 or fb.wave.strength < 0)
        return False

    def _snapshot_functional(self):
        self.functional.append(self.glimm_functional())

    # -- main loop --------------------------------------------------------

    def run(self, t_end: Optional[float] = None) -> Trajectory:
        if not self.segments and self.bfan is None:
            self.initialize()
        t_end = self.config.t_end if t_end is None else t_end
        events = 0
        try:
            while True:
                ev = self.next_event()
                if ev is None or ev[0] >= t_end - 1e-14:
                    self._advance_to(t_end)
                    break
                t_ev, kind, payload = ev
                if events >= self.config.max_events:
                    self.exit_status = "front explosion"
                    raise FrontExplosionError(
                        f"front explosion: more than "
                        f"{self.config.max_events} events")
                self._advance_to(t_ev)
                if kind == FRONT_FRONT:
                    self.resolve_interior(payload)
                elif kind == BOUNDARY_HIT:
                    self.resolve_boundary_hit(payload)
                else:
                    self.resolve_datum_jump(payload)
                events += 1
                self._snapshot_functional()
                tv = self._interior_tv()
                if tv > self.tv_cap:
                    self.exit_status = "variation blow-up"
                    raise VariationBlowupError(
                        f"variation blow-up: TV {tv:.4f} exceeds cap "
                        f"{self.tv_cap:.4f} at t={self.t:.5f}")
        except (VariationBlowupError, FrontExplosionError):
            self._close_segment(self.t)
            raise
        return Trajectory(sys=self.sys, segments=self.segments,
                          records=self.records, functional=self.functional,
                          delta=self.config.delta, c0=self.c0,
                          exit_status=self.exit_status,
                          data_size=self.data_size)


def calibrate_c0(sys: SystemDef, delta: float,
                 relation: str = RELATION_VISCOUS) -> float:
    """Smallest power of two making the functional non-increasing (up to the
    per-event slack) on a canonical calibration scenario."""
    traj = _calibration_run(sys, delta, relation)
    slack = functional_slack(delta)
    required = 1.0
    snaps = traj.functional
    for before, after in zip(snaps, snaps[1:]):
        dv = after.linear - before.linear
        dq = (after.quadratic + after.boundary) - (before.quadratic
                                                   + before.boundary)
        if dv <= slack:
            continue
        if dq >= 0:
            continue          # no quadratic decrease available to pay
        required = max(required, (dv - slack) / (-dq))
    return float(2.0 ** np.ceil(np.log2(max(required, 1.0))))


def _calibration_run(sys: SystemDef, delta: float, relation: str):
    lam = max_wave_speed(sys)
    dec_scale = 0.02 * sys.radius / 0.25
    vstar = sys.ref_state
    rng = np.random.default_rng(1234)
    n = sys.dimension
    breaks = np.array([0.4, 0.8, 1.2])
    values = [vstar]
    for _ in breaks:
        values.append(vstar + dec_scale * rng.uniform(-1, 1, size=n))
    initial = StepFunction(breaks, np.asarray(values))
    datum = StepFunction(np.array([0.5 / lam]),
                         np.asarray([vstar,
                                     vstar + dec_scale
                                     * rng.uniform(-1, 1, size=n)]))
    cfg = TrackerConfig(delta=delta, t_end=2.0 / lam, relation=relation,
                        c0=1.0, override_guard=True)
    tracker = FrontTracker(sys, initial, datum, cfg)
    tracker.initialize()
    return tracker.run()


def run_front_tracking(sys: SystemDef, initial, datum,
                       config: TrackerConfig) -> Trajectory:
    """Quantize the data, calibrate the functional weight if needed, and run
    the tracker to the configured end time."""
    v0, vb = quantize_data(sys, initial, datum, config.delta,
                           guard=config.guard,
                           override_guard=config.override_guard)
    if config.c0 is None:
        c0 = calibrate_c0(sys, config.delta, config.relation)
    else:
        c0 = config.c0
    tracker = FrontTracker(sys, v0, vb, config)
    tracker.c0 = c0
    tracker.initialize()
    return tracker.run()
