"""Event-driven wave-front tracking for 2x2 systems.

Fronts are straight lines in the (x, t) plane carrying a jump between two
constant states.  Neighbouring fronts that approach each other are
scheduled in a priority queue; when two fronts meet the outgoing Riemann
problem is approximated by the interaction solvers of :mod:`riemann` and the
new fronts are inserted in place of the old ones.

Every front records its parents, so the lineage graph (one merge forest per
family) can be followed forward in time.  A front line is the forward path
of a front through its successive children.
"""
from __future__ import annotations

import hashlib
import heapq
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    FrontrackError,
    InvalidInputError,
    PreconditionError,
    ResourceError,
    StructureError,
)
from .model import (
    EntropyPair,
    ModelSystem,
    model_from_spec,
    model_spec,
    modified_speed,
    rarefaction_curve,
)
from .pvar import StepFunction, max_p_sum_power, vector_p_variation
from .riemann import (
    RW,
    SW,
    TRIVIAL,
    CalibrationSpec,
    calibrate_c_star,
    interact_opposite,
    interact_same,
    nature_of,
    solve_riemann,
)

SCHEMA_NAME = "frontrack.trace"
SCHEMA_VERSION = 1
DEFAULT_NU = 0.05
DEFAULT_P = 1.25
DEFAULT_MAX_EVENTS = 20000
TIE_TOL = 1e-12
PERTURB_CAP = 1e-6
NEW_WAVE_DROP = 1e-12
TRIVIAL_TOL = 1e-14
TINY_JUMP = 1e-10
INITIAL_DROP = 1e-12  # initial Riemann waves below this are solver round-off


@dataclass
class Front:
    """A single moving discontinuity, ``x(t) = x0 + speed (t - t0)``."""

    id: int
    family: int
    nature: str
    left_state: np.ndarray
    right_state: np.ndarray
    sigma: float
    speed: float
    base_speed: float
    t0: float
    x0: float
    cause: int = -1  # -1 for initial fronts, otherwise the creating event id
    lineage_id: int = -1
    parents: tuple = ()
    child: int | None = None
    t_end: float | None = None
    new_wave: bool = False

    def position(self, t: float) -> float:
        return self.x0 + self.speed * (t - self.t0)

    def alive_at(self, t: float, side: str = "+") -> bool:
        """Whether the front exists at ``t`` (after events at ``t`` for
        ``side="+"``, before them for ``side="-"``)."""
        if side == "+":
            return self.t0 <= t and (self.t_end is None or t < self.t_end)
        return self.t0 < t and (self.t_end is None or t <= self.t_end)

    def to_dict(self) -> dict:
        return {
            "id": self.id, "family": self.family, "nature": self.nature,
            "left_state": [float(x) for x in self.left_state],
            "right_state": [float(x) for x in self.right_state],
            "sigma": float(self.sigma), "speed": float(self.speed),
            "base_speed": float(self.base_speed), "t0": float(self.t0), "x0": float(self.x0),
            "cause": self.cause, "lineage_id": self.lineage_id, "parents": list(self.parents),
            "child": self.child, "t_end": None if self.t_end is None else float(self.t_end),
            "new_wave": self.new_wave,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Front":
        d = dict(d)
        d["left_state"] = np.asarray(d["left_state"], dtype=float)
        d["right_state"] = np.asarray(d["right_state"], dtype=float)
        d["parents"] = tuple(d["parents"])
        return cls(**d)


@dataclass
class InteractionEvent:
    id: int
    time: float
    position: float
    incoming: tuple
    outgoing: tuple
    kind: str  # "same" or "opposite"
    family: int  # family for same-family events, 0 otherwise
    outcome: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "time": float(self.time), "position": float(self.position),
                "incoming": list(self.incoming), "outgoing": list(self.outgoing),
                "kind": self.kind, "family": self.family, "outcome": _jsonable(self.outcome)}

    @classmethod
    def from_dict(cls, d: dict) -> "InteractionEvent":
        d = dict(d)
        d["incoming"] = tuple(d["incoming"])
        d["outgoing"] = tuple(d["outgoing"])
        out = dict(d["outcome"])
        for key in ("u_l", "u_m", "u_r", "u_mid"):
            if key in out:
                out[key] = np.asarray(out[key], dtype=float)
        for key in ("natures_in", "natures_out", "variant", "sigma_in", "sigma_out"):
            if key in out:
                out[key] = tuple(out[key])
        d["outcome"] = out
        return cls(**d)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [float(x) for x in obj.reshape(-1)]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


@dataclass
class SimulationTrace:
    """Complete record of one front-tracking run.

    ``snapshots[k]`` lists the fronts alive, left to right, after the first
    ``k`` events; ``snapshots[0]`` is the initial configuration.
    """

    model: ModelSystem
    nu: float
    initial: StepFunction
    fronts: list
    events: list
    snapshots: list
    final_time: float
    config: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def event_times(self) -> np.ndarray:
        return np.array([e.time for e in self.events])

    def snapshot_index(self, t: float, side: str = "+") -> int:
        times = self.event_times
        return int(np.searchsorted(times, t, side="right" if side == "+" else "left"))

    def alive(self, t: float, side: str = "+") -> list:
        """Fronts alive at ``t``, ordered left to right."""
        return [self.fronts[k] for k in self.snapshots[self.snapshot_index(t, side)]]

    def lineage(self) -> list:
        return [{"front": f.id, "family": f.family, "parents": list(f.parents), "child": f.child,
                 "lineage_id": f.lineage_id} for f in self.fronts]

    def front_line(self, front_id: int) -> list:
        """Forward path of a front: the front followed by its successive children."""
        path = [front_id]
        while self.fronts[path[-1]].child is not None:
            path.append(self.fronts[path[-1]].child)
        return path

    def death_event(self, front_id: int) -> InteractionEvent | None:
        f = self.fronts[front_id]
        if f.t_end is None:
            return None
        return self.events[self.fronts[f.child].cause] if f.child is not None else None

    def new_wave_total(self) -> float:
        return float(sum(abs(f.sigma) for f in self.fronts if f.new_wave))


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------

def approximate_initial(u0, model: ModelSystem, nu: float, support=None, cell_factor: float = 1.0) -> StepFunction:
    """Piecewise constant approximation of the initial data.

    ``u0`` may be a :class:`StepFunction` (returned unchanged), a pair
    ``(breakpoints, values)`` describing one, or a callable profile which is
    constant outside ``support = (a, b)``.  Callables are sampled at the
    nodes of a uniform grid of spacing ``cell_factor * nu * (b - a)``;
    sampling never increases the p-variation nor the distance to the base
    state.
    """
    if nu <= 0:
        raise InvalidInputError("nu must be positive")
    if isinstance(u0, StepFunction):
        f = u0
    elif isinstance(u0, tuple) and len(u0) == 2 and not callable(u0[0]):
        f = StepFunction(u0[0], u0[1])
    elif callable(u0):
        if support is None:
            raise InvalidInputError("a callable profile needs its support (a, b)")
        a, b = map(float, support)
        if not b > a:
            raise InvalidInputError("support must satisfy a < b")
        n = max(1, int(math.ceil(1.0 / (cell_factor * nu))))
        xs = np.linspace(a, b, n + 1)
        vals = np.array([np.asarray(u0(x), dtype=float) for x in xs])
        f = StepFunction(xs[1:], vals).simplified()
    else:
        raise InvalidInputError("unsupported initial data")
    for v in np.atleast_2d(f.values):
        if not model.in_ball(v):
            raise DomainError(f"initial state {v} outside the admissible ball")
    return f


def _front_speed(model: ModelSystem, i: int, ul, ur, nu: float) -> float:
    """Modified shock speed; tiny jumps use the characteristic speed at the
    midpoint so the Rankine-Hugoniot quotient is never ill-conditioned."""
    if np.linalg.norm(ur - ul) < TINY_JUMP:
        return model.lam(i, 0.5 * (ul + ur)) + nu * (model.w(ur)[i - 1] - model.w_base[i - 1])
    return modified_speed(model, i, ul, ur, nu)


def fan_states(model: ModelSystem, i: int, sigma: float, w_minus, w_plus, nu: float) -> list:
    """States ``omega^0 .. omega^{m+1}`` of a rarefaction fan.

    Interior states sit at parameters ``k nu`` for ``k = 1..floor(sigma/nu)``
    along the rarefaction curve; a last interior state that coincides with
    ``omega_+`` is dropped.
    """
    states = [np.asarray(w_minus, dtype=float)]
    if sigma > nu:
        m = int(math.floor(sigma / nu))
        for k in range(1, m + 1):
            if k * nu < sigma - 1e-12:
                states.append(rarefaction_curve(model, i, k * nu, w_minus, check=False))
    states.append(np.asarray(w_plus, dtype=float))
    return states


class _Builder:
    """Mutable state of a run; produces a :class:`SimulationTrace`."""

    def __init__(self, model, nu):
        self.model = model
        self.nu = nu
        self.fronts: list[Front] = []

    def new_front(self, i, ul, ur, t0, x0, cause, nature=None, parents=(), lineage=None, new_wave=False):
        ul = np.asarray(ul, dtype=float)
        ur = np.asarray(ur, dtype=float)
        sigma = float(self.model.w(ur)[i - 1] - self.model.w(ul)[i - 1])
        if nature is None or abs(sigma) <= TRIVIAL_TOL:
            nature = TRIVIAL if abs(sigma) <= TRIVIAL_TOL else nature
        if nature == TRIVIAL:
            sigma = 0.0
        speed = _front_speed(self.model, i, ul, ur, self.nu)
        fid = len(self.fronts)
        f = Front(fid, i, nature, ul, ur, sigma, speed, speed, float(t0), float(x0), cause,
                  fid if lineage is None else lineage, tuple(parents), new_wave=new_wave)
        self.fronts.append(f)
        return f

    def wave_fronts(self, i, sigma, variant, ul, ur, t0, x0, cause, new_wave=False):
        """Fronts for one outgoing wave: a fan for rarefactions, else a single front."""
        nature = nature_of(sigma, variant)
        if nature == RW and sigma > self.nu:
            states = fan_states(self.model, i, sigma, ul, ur, self.nu)
            return [self.new_front(i, a, b, t0, x0, cause, RW, new_wave=new_wave)
                    for a, b in zip(states[:-1], states[1:])]
        return [self.new_front(i, ul, ur, t0, x0, cause, nature, new_wave=new_wave)]


def build_initial_fronts(f: StepFunction, model: ModelSystem, nu: float, _builder=None) -> list:
    """Solve every jump of ``f`` with Lax curves and emit the initial fronts,
    ordered left to right (family 1 before family 2 at each jump).

    Waves weaker than ``INITIAL_DROP`` are solver round-off and are dropped.
    """
    b = _builder or _Builder(model, nu)
    out = []
    vals = np.atleast_2d(f.values)
    for k, x in enumerate(f.breakpoints):
        ul, ur = vals[k], vals[k + 1]
        sol = solve_riemann(model, ul, ur, ("T", "T"))
        keep1, keep2 = abs(sol.sigma1) > INITIAL_DROP, abs(sol.sigma2) > INITIAL_DROP
        # a dropped round-off wave hands its end state to the surviving one
        mid = sol.u_mid if keep1 and keep2 else (ur if keep1 else ul)
        if keep1:
            out += b.wave_fronts(1, sol.sigma1, "T", ul, mid, 0.0, x, -1)
        if keep2:
            out += b.wave_fronts(2, sol.sigma2, "T", mid, ur, 0.0, x, -1)
    return out


# ---------------------------------------------------------------------------
# Scheduling
# ---------------------------------------------------------------------------

def _collision_time(a: Front, b: Front, t_now: float):
    if a.speed <= b.speed:
        return None
    gap = max(b.position(t_now) - a.position(t_now), 0.0)
    return t_now + gap / (a.speed - b.speed)


def _rho(key: int, attempt: int) -> float:
    """Deterministic factor in (1/4, 3/4) derived from a hash."""
    h = hashlib.sha256(f"{key}:{attempt}".encode()).digest()
    return 0.25 + 0.5 * int.from_bytes(h[:8], "big") / 2.0**64


class _Schedule:
    def __init__(self):
        self.heap = []
        self.pending: dict = {}
        self.seq = 0

    def push(self, a: Front, b: Front, t_now: float):
        t = _collision_time(a, b, t_now)
        if t is None:
            return None
        self.pending[(a.id, b.id)] = t
        heapq.heappush(self.heap, (t, self.seq, a.id, b.id))
        self.seq += 1
        return t

    def clash(self, t: float, t_now: float, ignore=()) -> bool:
        if t - t_now <= TIE_TOL:
            return True
        return any(abs(t - s) <= TIE_TOL for key, s in self.pending.items() if key not in ignore)


def _try_accelerate(front: Front, right: Front | None, nu: float, key: int, attempt: int) -> bool:
    """Accelerate ``front`` within the admissible slack without creating a
    meeting with ``right`` that the unperturbed speeds would not produce."""
    jump = float(np.linalg.norm(front.right_state - front.left_state))
    delta = min(nu * jump, PERTURB_CAP) * _rho(key, attempt)
    if delta <= 0:
        return False
    if right is not None and front.base_speed <= right.base_speed:
        room = right.speed - front.speed
        if delta >= room:
            delta = 0.5 * room
        if delta <= 0:
            return False
    front.speed = front.base_speed + delta
    return True


def _settle(new: list, left: Front | None, right: Front | None, sched: _Schedule, t_now: float,
            nu: float, key: int, warnings: list):
    """Schedule collisions of freshly created fronts with their neighbours,
    accelerating a fresh front whenever a coincidence would arise.

    ``new`` is ordered left to right and flanked by ``left`` and ``right``.
    """
    chain = ([left] if left is not None else []) + new + ([right] if right is not None else [])
    fresh = {f.id for f in new}
    for j in range(len(chain) - 1):
        a, b = chain[j], chain[j + 1]
        t = _collision_time(a, b, t_now)
        attempt = 0
        while t is not None and sched.clash(t, t_now):
            # only a freshly created front may still have its speed adjusted
            k = j + 1 if b.id in fresh else j
            target = chain[k]
            nxt = chain[k + 1] if k + 1 < len(chain) else None
            if target.nature == TRIVIAL or attempt > 8 or not _try_accelerate(target, nxt, nu, key, attempt):
                warnings.append({"time": t_now, "pair": [a.id, b.id], "issue": "unresolved coincidence"})
                break
            attempt += 1
            t = _collision_time(a, b, t_now)
        sched.push(a, b, t_now)


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _cached_c_star(spec_json: str) -> float:
    return calibrate_c_star(model_from_spec(json.loads(spec_json)), CalibrationSpec())


def default_c_star(model: ModelSystem) -> float:
    """Calibrated ``C_*`` for a built-in model (cached per model description)."""
    return _cached_c_star(json.dumps(model_spec(model), sort_keys=True))


def run(model: ModelSystem, initial: StepFunction, nu: float = DEFAULT_NU, c_star: float | None = None,
        horizon: float | None = None, max_events: int = DEFAULT_MAX_EVENTS, p: float = DEFAULT_P,
        meta: dict | None = None) -> SimulationTrace:
    """Track fronts from ``initial`` until ``horizon`` or until no fronts approach.

    Raises :class:`ResourceError` (carrying the partial trace) when more than
    ``max_events`` interactions would be needed.
    """
    if not nu > 0:
        raise InvalidInputError("nu must be positive")
    if horizon is not None and horizon < 0:
        raise InvalidInputError("horizon must be non-negative")
    if c_star is None:
        c_star = default_c_star(model)
    b = _Builder(model, nu)
    fronts = build_initial_fronts(initial, model, nu, b)
    alive = [f.id for f in fronts]
    sched = _Schedule()
    warnings: list = []
    _settle(fronts, None, None, sched, 0.0, nu, -1, warnings)
    events: list[InteractionEvent] = []
    snapshots = [tuple(alive)]
    config = {"model": model_spec(model), "nu": float(nu), "c_star": float(c_star),
              "horizon": None if horizon is None else float(horizon), "max_events": int(max_events),
              "p": float(p)}
    if meta:
        config.update(meta)

    def make_trace(final):
        return SimulationTrace(model, nu, initial, b.fronts, events, snapshots, final, config, warnings)

    while sched.heap:
        t, _, ia, ib = heapq.heappop(sched.heap)
        fa, fb = b.fronts[ia], b.fronts[ib]
        if fa.t_end is not None or fb.t_end is not None:
            continue
        sched.pending.pop((ia, ib), None)
        if horizon is not None and t > horizon:
            break
        if len(events) >= max_events:
            raise ResourceError(f"event cap {max_events} exceeded at t = {t:.6g}",
                                make_trace(events[-1].time if events else 0.0))
        idx = alive.index(ia)
        if idx + 1 >= len(alive) or alive[idx + 1] != ib:
            raise StructureError(f"fronts {ia} and {ib} are not neighbours at t = {t}")
        eid = len(events)
        x = 0.5 * (fa.position(t) + fb.position(t))
        try:
            new, outcome, kind, fam = _resolve(b, fa, fb, t, x, eid, c_star)
        except FrontrackError as exc:
            raise type(exc)(f"interaction {eid} at t = {t:.6g}, x = {x:.6g} "
                            f"between fronts {ia} and {ib}: {exc}") from exc
        for f in (fa, fb):
            f.t_end = t
        for f in list(sched.pending):
            if ia in f or ib in f:
                sched.pending.pop(f)
        alive[idx:idx + 2] = [f.id for f in new]
        left = b.fronts[alive[idx - 1]] if idx > 0 else None
        j = idx + len(new)
        right = b.fronts[alive[j]] if j < len(alive) else None
        if left is not None:
            sched.pending.pop((left.id, ia), None)
        if right is not None:
            sched.pending.pop((ib, right.id), None)
        speeds_before = [f.speed for f in new]
        _settle(new, left, right, sched, t, nu, eid, warnings)
        outcome["perturbed"] = [f.id for f, s in zip(new, speeds_before) if f.speed != s]
        events.append(InteractionEvent(eid, t, x, (ia, ib), tuple(f.id for f in new), kind, fam, outcome))
        snapshots.append(tuple(alive))
    final = horizon if horizon is not None else (events[-1].time if events else 0.0)
    return make_trace(final)


def _resolve(b: _Builder, fa: Front, fb: Front, t: float, x: float, eid: int, c_star: float):
    model, nu = b.model, b.nu
    ul, um, ur = fa.left_state, fa.right_state, fb.right_state
    record = {"u_l": ul, "u_m": um, "u_r": ur, "natures_in": (fa.nature, fb.nature),
              "sigma_in": (fa.sigma, fb.sigma)}
    if fa.family != fb.family:
        if fa.family != 2:
            raise StructureError("a 1-front cannot catch a 2-front on its right")
        out = interact_opposite(model, ul, um, ur, (fa.nature, fb.nature), coefficients=False)
        n1 = nature_of(out.sigma1, out.variant[0])
        n2 = nature_of(out.sigma2, out.variant[1])
        f1 = b.new_front(1, ul, out.u_mid, t, x, eid, n1, (fb.id,), fb.lineage_id)
        f2 = b.new_front(2, out.u_mid, ur, t, x, eid, n2, (fa.id,), fa.lineage_id)
        fb.child, fa.child = f1.id, f2.id
        record.update(sigma_out=(f1.sigma, f2.sigma), natures_out=(f1.nature, f2.nature),
                      variant=out.variant, u_mid=out.u_mid)
        return [f1, f2], record, "opposite", 0
    i = fa.family
    out = interact_same(model, i, ul, um, ur, (fa.nature, fb.nature), nu, c_star)
    sig = (out.sigma1, out.sigma2)
    new_sigma = sig[2 - i]
    parents = (fa.id, fb.id)
    if abs(new_sigma) < NEW_WAVE_DROP:
        fi = b.new_front(i, ul, ur, t, x, eid, nature_of(sig[i - 1], out.variant[i - 1]), parents, fa.lineage_id)
        new = [fi]
        new_wave = []
    elif i == 1:
        fi = b.new_front(1, ul, out.u_mid, t, x, eid, nature_of(sig[0], out.variant[0]), parents, fa.lineage_id)
        new_wave = b.wave_fronts(2, new_sigma, out.variant[1], out.u_mid, ur, t, x, eid, new_wave=True)
        new = [fi] + new_wave
    else:
        new_wave = b.wave_fronts(1, new_sigma, out.variant[0], ul, out.u_mid, t, x, eid, new_wave=True)
        fi = b.new_front(2, out.u_mid, ur, t, x, eid, nature_of(sig[1], out.variant[1]), parents, fa.lineage_id)
        new = new_wave + [fi]
    fa.child = fb.child = fi.id
    record.update(sigma_out=tuple(float(s) for s in sig), natures_out=tuple(f.nature for f in new),
                  variant=out.variant, u_mid=out.u_mid, new_wave=float(sum(f.sigma for f in new_wave)))
    return new, record, "same", i


# ---------------------------------------------------------------------------
# Queries on a finished trace
# ---------------------------------------------------------------------------

def _check_time(trace: SimulationTrace, t: float):
    if not (0.0 <= t <= trace.final_time * (1 + 1e-12) + 1e-15):
        raise InvalidInputError(f"t = {t} outside [0, {trace.final_time}]")


def solution_at(trace: SimulationTrace, t: float, side: str = "+") -> StepFunction:
    """``u^nu(t, .)``; fronts meeting at ``t`` collapse into one breakpoint."""
    _check_time(trace, t)
    fronts = trace.alive(t, side)
    vals0 = np.atleast_2d(trace.initial.values)
    if not fronts:
        return StepFunction.constant(vals0[0])
    xs = [fronts[0].position(t)]
    vals = [fronts[0].left_state, fronts[0].right_state]
    for f in fronts[1:]:
        x = f.position(t)
        if x <= xs[-1]:
            vals[-1] = f.right_state
        else:
            xs.append(x)
            vals.append(f.right_state)
    return StepFunction(np.array(xs), np.array(vals))


def time_regularity(trace: SimulationTrace, s: float, t: float, p: float) -> float:
    """``int |u(t, x) - u(s, x)|^p dx``, exact for piecewise constant profiles."""
    if s > t:
        raise InvalidInputError("need s <= t")
    _check_time(trace, s)
    _check_time(trace, t)
    if s == t:
        return 0.0
    us, ut = solution_at(trace, s), solution_at(trace, t)
    xs = np.union1d(us.breakpoints, ut.breakpoints)
    if xs.size < 2:
        return 0.0
    mids = 0.5 * (xs[:-1] + xs[1:])
    diff = np.atleast_2d(ut(mids) - us(mids))
    return float(np.sum(np.linalg.norm(diff, axis=1) ** p * np.diff(xs)))


def modified_vp_fronts(fronts, p: float) -> float:
    """``(s_p^p(1-strengths) + s_p^p(2-strengths))^(1/p)`` over given fronts."""
    total = 0.0
    for i in (1, 2):
        total += max_p_sum_power([f.sigma for f in fronts if f.family == i], p)
    return total ** (1.0 / p)


def linear_entropy_pair(model: ModelSystem, sign: float = 1.0, family: int = 1) -> EntropyPair:
    """``eta = +-l(u_bar).u``, ``q = +-l(u_bar).f(u)``: the weak-formulation pair."""
    ell = sign * model.l(family, model.base)
    return EntropyPair(lambda u: float(ell @ u), lambda u: float(ell @ model.flux(u)), lambda u: ell)


def check_entropy_pair(model: ModelSystem, pair: EntropyPair, n: int = 50, tol: float = 1e-8, h: float = 1e-5):
    """Raise :class:`PreconditionError` unless ``D eta Df = Dq`` on samples."""
    worst = 0.0
    for u in model.sample_ball(n, seed=3, factor=0.9):
        lhs = np.asarray(pair.deta(u)) @ model.jacobian(u)
        grad = np.array([(pair.q(u + h * e) - pair.q(u - h * e)) / (2 * h) for e in np.eye(2)])
        worst = max(worst, float(np.max(np.abs(lhs - grad)) / (1 + np.max(np.abs(grad)))))
    if worst > tol:
        raise PreconditionError(f"not an entropy pair: compatibility defect {worst:.3e}")
    return worst


def _residual_density(trace, pair, phi, t, side="+"):
    total = 0.0
    for f in trace.alive(t, side):
        if f.nature == TRIVIAL:
            continue
        x = f.position(t)
        jq = pair.q(f.right_state) - pair.q(f.left_state)
        je = pair.eta(f.right_state) - pair.eta(f.left_state)
        total += phi(t, x) * (f.speed * je - jq)
    return total


def entropy_density(trace: SimulationTrace, pair: EntropyPair, phi, t: float) -> float:
    """``H(t) = sum over fronts of phi(t, x) (speed [eta] - [q])``.

    With jumps taken right minus left, ``int H dt`` equals
    ``int int eta phi_t + q phi_x``, so entropic shocks contribute ``>= 0``.
    """
    return _residual_density(trace, pair, phi, t)


def entropy_residual(trace: SimulationTrace, pair: EntropyPair, phi, t_grid, order: int = 6,
                     check: bool = True) -> float:
    """``int H(t) dt`` over ``[t_grid[0], t_grid[-1]]``.

    The integrand is smooth between events, so Gauss-Legendre quadrature is
    applied on every piece of the partition by ``t_grid`` and event times.
    """
    if check:
        check_entropy_pair(trace.model, pair)
    grid = np.asarray(t_grid, dtype=float)
    if grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise InvalidInputError("t_grid must be increasing with at least two points")
    _check_time(trace, grid[-1])
    ev = trace.event_times
    cuts = np.union1d(grid, ev[(ev > grid[0]) & (ev < grid[-1])])
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for a, c in zip(cuts[:-1], cuts[1:]):
        half, mid = 0.5 * (c - a), 0.5 * (c + a)
        for z, wt in zip(nodes, weights):
            total += half * wt * _residual_density(trace, pair, phi, mid + half * z)
    return float(total)


def bump(t0: float, t1: float, x0: float, x1: float):
    """Smooth non-negative test function supported in ``(t0, t1) x (x0, x1)``."""
    def b(z):
        return np.exp(-1.0 / (1.0 - z * z)) if abs(z) < 1 else 0.0

    def phi(t, x):
        return b((2 * t - t0 - t1) / (t1 - t0)) * b((2 * x - x0 - x1) / (x1 - x0))
    return phi


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------

def check_trace(trace: SimulationTrace, tol: float = 1e-9) -> list:
    """Return a list of invariant violations (empty when the trace is sound)."""
    model = trace.model
    issues = []
    lam1max, lam2min = model.speed_bounds
    for f in trace.fronts:
        jump = model.w(f.right_state) - model.w(f.left_state)
        if abs(jump[f.family - 1] - f.sigma) > tol:
            issues.append(("sigma", f.id))
        if abs(f.speed - f.base_speed) > trace.nu * np.linalg.norm(f.right_state - f.left_state) + 1e-15:
            issues.append(("speed", f.id))
        if (f.family == 1 and f.speed > lam1max + 1e-9) or (f.family == 2 and f.speed < lam2min - 1e-9):
            issues.append(("band", f.id))
        if f.nature == TRIVIAL:
            ok = f.cause >= 0 and (trace.events[f.cause].kind == "same"
                                   or any(trace.fronts[q].nature == TRIVIAL for q in f.parents))
            if not ok:
                issues.append(("trivial", f.id))
    times = trace.event_times
    if times.size and np.any(np.diff(times) <= 0):
        issues.append(("event-order", int(np.argmin(np.diff(times)))))
    for k, snap in enumerate(trace.snapshots):
        fr = [trace.fronts[j] for j in snap]
        for a, c in zip(fr[:-1], fr[1:]):
            if not np.array_equal(a.right_state, c.left_state):
                issues.append(("chain", k))
                break
        if fr and not (np.array_equal(fr[0].left_state, np.atleast_2d(trace.initial.values)[0])
                       and np.array_equal(fr[-1].right_state, np.atleast_2d(trace.initial.values)[-1])):
            issues.append(("boundary", k))
        # ordering between consecutive events, checked at the midpoint
        t_lo = times[k - 1] if k > 0 else 0.0
        t_hi = times[k] if k < times.size else trace.final_time
        tm = 0.5 * (t_lo + t_hi)
        pos = [f.position(tm) for f in fr]
        if any(q < pq - 1e-12 for pq, q in zip(pos[:-1], pos[1:])):
            issues.append(("crossing", k))
    return issues


def max_rarefaction_strength(trace: SimulationTrace) -> float:
    vals = [abs(f.sigma) for f in trace.fronts if f.nature in (RW, "CW")]
    return max(vals, default=0.0)


def shock_count_series(trace: SimulationTrace) -> np.ndarray:
    return np.array([sum(trace.fronts[j].nature == SW for j in snap) for snap in trace.snapshots])


def front_line_crossings(trace: SimulationTrace) -> dict:
    """Number of events at which each (1-line root, 2-line root) pair crosses.

    Front lines are identified by the front they start from; a pair of
    opposite-family lines crossing more than once signals a broken trace.
    """
    counts: dict = {}
    for e in trace.events:
        if e.kind != "opposite":
            continue
        a, c = e.incoming
        # every line through a and c: roots of the backward merge trees
        for r2 in _roots(trace, a):
            for r1 in _roots(trace, c):
                counts[(r1, r2)] = counts.get((r1, r2), 0) + 1
    return counts


def _roots(trace, fid):
    stack, roots = [fid], set()
    while stack:
        f = trace.fronts[stack.pop()]
        if f.parents:
            stack.extend(f.parents)
        else:
            roots.add(f.id)
    return roots


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def trace_to_dict(trace: SimulationTrace) -> dict:
    return {
        "schema": SCHEMA_NAME, "version": SCHEMA_VERSION,
        "config": _jsonable(trace.config),
        "nu": float(trace.nu), "final_time": float(trace.final_time),
        "initial": {"breakpoints": _jsonable(trace.initial.breakpoints),
                    "values": [[float(x) for x in row] for row in np.atleast_2d(trace.initial.values)]},
        "fronts": [f.to_dict() for f in trace.fronts],
        "events": [e.to_dict() for e in trace.events],
        "lineage": trace.lineage(),
        "snapshots": [list(s) for s in trace.snapshots],
        "warnings": _jsonable(trace.warnings),
    }


def dumps_trace(trace: SimulationTrace) -> str:
    return json.dumps(trace_to_dict(trace), sort_keys=True, indent=1)


def save_trace(trace: SimulationTrace, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_trace(trace))


def trace_from_dict(d: dict) -> SimulationTrace:
    if d.get("schema") != SCHEMA_NAME:
        raise ConfigError(f"not a trace document (schema {d.get('schema')!r})")
    if d.get("version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported trace schema version {d.get('version')!r}")
    config = d["config"]
    model = model_from_spec(config["model"])
    init = StepFunction(d["initial"]["breakpoints"], d["initial"]["values"])
    fronts = [Front.from_dict(f) for f in d["fronts"]]
    events = [InteractionEvent.from_dict(e) for e in d["events"]]
    snaps = [tuple(s) for s in d["snapshots"]]
    return SimulationTrace(model, float(d["nu"]), init, fronts, events, snaps, float(d["final_time"]),
                           config, list(d.get("warnings", [])))


def load_trace(path) -> SimulationTrace:
    with open(path) as fh:
        return trace_from_dict(json.load(fh))


def snapshot_rows(trace: SimulationTrace, p: float | None = None) -> list:
    """Per-snapshot rows ``(time, front count, V_p, modified V_p)``."""
    p = trace.config.get("p", DEFAULT_P) if p is None else p
    rows = []
    times = [0.0] + [e.time for e in trace.events]
    for k, t in enumerate(times):
        fr = [trace.fronts[j] for j in trace.snapshots[k]]
        u = solution_at(trace, t)
        rows.append((t, len(fr), vector_p_variation(u, p, trace.model), modified_vp_fronts(fr, p)))
    return rows


def write_snapshot_csv(trace: SimulationTrace, path, p: float | None = None) -> None:
    with open(path, "w") as fh:
        fh.write("time,front_count,Vp,Vp_tilde\n")
        for t, n, vp, vpt in snapshot_rows(trace, p):
            fh.write(f"{t!r},{n},{vp!r},{vpt!r}\n")


# ---------------------------------------------------------------------------
# Shipped scenarios
# ---------------------------------------------------------------------------

# jumps of w_1 and w_2 (before scaling) at the twelve points k/12 of [0, 1)
_PROFILE_W1 = np.array([1.0, -1.6, 0.8, -0.5, 1.3, -1.1, 0.4, -0.9, 1.2, -0.7, 0.9, -1.3])
_PROFILE_W2 = np.array([-0.8, 1.1, -1.4, 0.6, -0.9, 1.5, -0.6, 1.0, -1.2, 0.7, -0.5, 0.9])


def profile_step_function(model: ModelSystem, vp: float, p: float = DEFAULT_P) -> StepFunction:
    """The shipped twelve-jump profile scaled so its p-variation is ``vp``.

    The profile is prescribed in Riemann coordinates, where the p-variation
    is linear in the amplitude, so the scaling is exact.
    """
    xs = np.arange(12) / 12.0
    dw = np.column_stack([_PROFILE_W1, _PROFILE_W2])
    unit = sum(max_p_sum_power(dw[:, k], p) for k in range(2)) ** (1.0 / p)
    w = model.w_base + np.vstack([np.zeros(2), np.cumsum(dw, axis=0)]) * (vp / unit)
    vals = np.array([model.u_of_w(x) for x in w])
    return StepFunction(xs, vals)


SCENARIOS = {
    "psystem-small": {"vp": 0.05, "nu": 0.02, "p": 1.25},
    "psystem-sweep-0.02": {"vp": 0.02, "nu": 0.02, "p": 1.25},
    "psystem-sweep-0.04": {"vp": 0.04, "nu": 0.02, "p": 1.25},
    "psystem-sweep-0.08": {"vp": 0.08, "nu": 0.02, "p": 1.25},
    "degenerate-small": {"vp": 0.05, "nu": 0.02, "p": 1.25, "model": "degenerate"},
}


def scenario_config(name: str, **overrides) -> dict:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; known: {sorted(SCENARIOS)}")
    cfg = {"model": {"name": "p-system", "gamma": 2.0}, **SCENARIOS[name], "scenario": name}
    if cfg.get("model") == "degenerate":
        cfg["model"] = {"name": "degenerate"}
    cfg.update(overrides)
    return cfg


def run_config(cfg: dict) -> SimulationTrace:
    """Build the model and initial data described by ``cfg`` and run."""
    cfg = dict(cfg)
    nu = cfg.get("nu", DEFAULT_NU)
    if not isinstance(nu, (int, float)) or not nu > 0:
        raise ConfigError(f"nu must be a positive number, got {nu!r}")
    p = cfg.get("p", DEFAULT_P)
    if not (1.0 <= p <= 1.5):
        raise ConfigError(f"p must lie in [1, 1.5] for simulation runs, got {p}")
    model = model_from_spec(cfg.get("model", {"name": "p-system"}))
    if "initial" in cfg:
        init = cfg["initial"]
        f = StepFunction(init["breakpoints"], init["values"])
    else:
        f = profile_step_function(model, cfg.get("vp", 0.05), p)
    f = approximate_initial(f, model, nu)
    meta = {k: cfg[k] for k in ("scenario", "vp") if k in cfg}
    return run(model, f, nu, cfg.get("c_star"), cfg.get("horizon"), cfg.get("max_events", DEFAULT_MAX_EVENTS),
               p, meta)


def run_scenario(name: str, **overrides) -> SimulationTrace:
    return run_config(scenario_config(name, **overrides))
