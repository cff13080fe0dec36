"""Glimm-type functionals evaluated on a finished front-tracking trace.

All quantities depend on a time horizon ``T``: two fronts of opposite
families get the interaction coefficients of the event where their front
lines meet, provided it happens before ``T``; otherwise their coefficient is
zero.  Because the trace is complete, these "future" coefficients are read
directly from the recorded events.

Evaluation times carry a side tag: ``(t, "-")`` means just before the events
at time ``t``, ``(t, "+")`` just after them.  Every functional is constant
between consecutive events, so checking decay at event times is exhaustive.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .pvar import max_p_sum_power, prefix_p_sums, suffix_p_sums, vector_p_variation
from .riemann import CW, SW, TRIVIAL, coefficient_c1, coefficient_c2, star
from .tracking import DEFAULT_P, SimulationTrace, modified_vp_fronts, solution_at

DECAY_RTOL = 1e-10
DEFAULT_C1 = 8.0
DEFAULT_C2 = 8.0
LOWER, UPPER = "lower", "upper"


@dataclass(frozen=True)
class FunctionalState:
    V1: float
    V2: float
    Q1: float
    Q2: float
    Q3: float
    Vp_tilde: float

    @property
    def V(self) -> float:
        return self.V1 + self.V2

    def potential(self, C1: float, C2: float) -> float:
        """``C2 (C1 Q1 + Q2 + Q3)``."""
        return C2 * (C1 * self.Q1 + self.Q2 + self.Q3)

    def upsilon(self, C1: float, C2: float) -> float:
        return self.V + self.potential(C1, C2)


class HorizonView:
    """A trace seen from horizon ``T``, with cached coefficients and strengths."""

    def __init__(self, trace: SimulationTrace, T: float, p: float | None = None):
        if not (0 < T <= trace.final_time * (1 + 1e-12)) and not (T == 0 == trace.final_time):
            raise InvalidInputError(f"horizon {T} outside (0, {trace.final_time}]")
        self.trace = trace
        self.T = float(T)
        self.p = float(trace.config.get("p", DEFAULT_P) if p is None else p)
        if not 1.0 <= self.p <= 1.5:
            raise InvalidInputError("functional analysis needs p in [1, 1.5]")
        self.events = [e for e in trace.events if e.time <= self.T]
        self.opposite = [e for e in self.events if e.kind == "opposite"]
        self._coef: dict = {}
        self._paths: dict = {}
        self._pre: dict = {}
        self._state: dict = {}

    # -- coefficients ------------------------------------------------------
    def coefficients(self, eid: int) -> tuple:
        """``(C^1(u_m; 0, sigma_2), C^2(u_m; sigma_1, 0))`` at an opposite event."""
        if eid not in self._coef:
            e = self.trace.events[eid]
            o = e.outcome
            nat2, nat1 = o["natures_in"]
            s2, s1 = o["sigma_in"]
            model = self.trace.model
            c1 = coefficient_c1(model, o["u_m"], s2, nat2, o["u_l"])
            c2 = coefficient_c2(model, o["u_m"], s1, nat1, o["u_r"])
            self._coef[eid] = (c1, c2)
        return self._coef[eid]

    def coefficient_table(self) -> dict:
        return {e.id: self.coefficients(e.id) for e in self.opposite}

    def path(self, fid: int) -> list:
        if fid not in self._paths:
            self._paths[fid] = self.trace.front_line(fid)
        return self._paths[fid]

    def future_pairs(self, t: float, side: str = "+", t_cap: float | None = None, accept=None):
        """Alive fronts at ``(t, side)`` and, for every (1-front, 2-front)
        pair whose lines meet at an opposite event in the future and before
        ``min(T, t_cap)``, that event id."""
        fronts = self.trace.alive(t, side)
        limit = self.T if t_cap is None else min(self.T, t_cap)
        owner = defaultdict(list)
        for f in fronts:
            for fid in self.path(f.id):
                if self.trace.fronts[fid].t0 > limit:
                    break
                owner[fid].append(f.id)
        pairs = {}
        for e in self.opposite:
            if e.time > limit:
                break
            if e.time < t or (e.time == t and side == "+"):
                continue
            if accept is not None and not accept(e):
                continue
            a2, b1 = e.incoming
            for al in owner.get(b1, ()):
                for be in owner.get(a2, ()):
                    pairs[(al, be)] = e.id
        return fronts, pairs

    def amplification(self, t: float, side: str = "+", t_cap=None, accept=None) -> dict:
        """Preamplification factor of every alive front."""
        fronts, pairs = self.future_pairs(t, side, t_cap, accept)
        byid = {f.id: f for f in fronts}
        M = {f.id: 1.0 for f in fronts}
        for (al, be), eid in pairs.items():
            c1, c2 = self.coefficients(eid)
            fa, fb = byid[al], byid[be]
            M[al] *= 1.0 + c1 * star(fb.sigma, fb.nature) ** 3
            M[be] *= 1.0 + c2 * star(fa.sigma, fa.nature) ** 3
        return M

    def preamplified(self, t: float, side: str = "+") -> dict:
        """``front id -> (sigma_hat, M)`` at ``(t, side)``."""
        key = (float(t), side)
        if key not in self._pre:
            M = self.amplification(t, side)
            self._pre[key] = {fid: (self.trace.fronts[fid].sigma * m, m) for fid, m in M.items()}
        return self._pre[key]

    # -- strengths and potentials -------------------------------------------
    def nonlocal_strengths(self, t: float, side: str = "+") -> dict:
        """Per family: ordered front ids, preamplified strengths and the left
        and right nonlocal strengths."""
        pre = self.preamplified(t, side)
        out = {}
        for k in (1, 2):
            ids = [f.id for f in self.trace.alive(t, side) if f.family == k and f.nature != TRIVIAL]
            x = np.array([pre[i][0] for i in ids])
            pref = prefix_p_sums(x, self.p)
            suff = suffix_p_sums(x, self.p)
            out[k] = {"ids": ids, "sigma_hat": x, "left": np.diff(pref),
                      "right": suff[:-1] - suff[1:], "total": float(pref[-1])}
        return out

    def state(self, t: float, side: str = "+") -> FunctionalState:
        key = (float(t), side)
        if key in self._state:
            return self._state[key]
        ns = self.nonlocal_strengths(t, side)
        q1 = 0.0
        for k in (1, 2):
            r = ns[k]["right"]
            left = ns[k]["left"]
            if r.size:
                q1 += float(np.dot(left[1:], np.cumsum(r)[:-1]))
        right2 = dict(zip(ns[2]["ids"], ns[2]["right"]))
        left1 = dict(zip(ns[1]["ids"], ns[1]["left"]))
        q2 = 0.0
        acc = 0.0
        fronts = self.trace.alive(t, side)
        for f in fronts:
            if f.id in right2:
                acc += right2[f.id]
            elif f.id in left1:
                q2 += acc * left1[f.id]
        q3 = sum(abs(f.sigma) ** 3 * (2.0 if f.nature == CW else 1.0) for f in fronts)
        st = FunctionalState(ns[1]["total"], ns[2]["total"], q1, q2, q3, modified_vp_fronts(fronts, self.p))
        self._state[key] = st
        return st


def build_horizon(trace: SimulationTrace, T: float | None = None, p: float | None = None) -> HorizonView:
    return HorizonView(trace, trace.final_time if T is None else T, p)


def preamplified_strengths(view: HorizonView, t: float, side: str = "+") -> dict:
    return view.preamplified(t, side)


def total_strengths(view: HorizonView, t: float, side: str = "+") -> tuple:
    st = view.state(t, side)
    return st.V1, st.V2


def potentials(view: HorizonView, t: float, side: str = "+") -> tuple:
    st = view.state(t, side)
    return st.Q1, st.Q2, st.Q3


def upsilon(view: HorizonView, t: float, C1: float = DEFAULT_C1, C2: float = DEFAULT_C2, side: str = "+") -> float:
    if C1 < 1 or C2 < 1:
        raise InvalidInputError("C1 and C2 must be at least 1")
    return view.state(t, side).upsilon(C1, C2)


def modified_vp(view: HorizonView, t: float, side: str = "+") -> float:
    return view.state(t, side).Vp_tilde


def new_wave_production(trace: SimulationTrace) -> float:
    """Total ``|sigma^0|`` of the fronts created in the opposite family at
    same-family interactions."""
    return trace.new_wave_total()


# ---------------------------------------------------------------------------
# Measure curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveSpec:
    kind: str  # "lower" or "upper"
    family: int
    front_id: int
    t_min: float
    t_max: float

    @property
    def name(self) -> str:
        return f"{self.family}-{self.kind}@{self.front_id}[{self.t_min:.6g},{self.t_max:.6g}]"


class MeasureCurve:
    """A lower or upper measure curve following a front line between
    ``t_min`` and ``t_max`` (slightly on the side given by ``kind``).

    ``crossings(t, side)`` lists, in the curve's left-to-right order, the
    fronts crossing the intermediate curve together with the tagged time at
    which their strength is frozen.
    """

    def __init__(self, view: HorizonView, spec: CurveSpec):
        tr = view.trace
        if spec.kind not in (LOWER, UPPER) or spec.family not in (1, 2):
            raise InvalidInputError(f"invalid curve spec {spec}")
        if not 0 <= spec.t_min <= spec.t_max <= view.T:
            raise InvalidInputError("need 0 <= t_min <= t_max <= T")
        if not 0 <= spec.front_id < len(tr.fronts):
            raise InvalidInputError(f"unknown front {spec.front_id}")
        f0 = tr.fronts[spec.front_id]
        if f0.family != spec.family or not f0.alive_at(spec.t_min, "+"):
            raise InvalidInputError("the followed front must be of the curve's family and alive at t_min")
        self.view = view
        self.spec = spec
        self.path = [fid for fid in view.path(spec.front_id) if tr.fronts[fid].t0 <= spec.t_max]
        self.path_set = set(self.path)
        if tr.fronts[self.path[-1]].t_end is not None and tr.fronts[self.path[-1]].t_end < spec.t_max:
            raise InvalidInputError("the followed front line ends before t_max")
        self._tilde: dict = {}
        chain = []
        for e in view.events:
            if e.time <= spec.t_min or e.time > spec.t_max:
                continue
            a, b = e.incoming
            if a in self.path_set:
                chain.append((e, b, "right"))
            elif b in self.path_set:
                chain.append((e, a, "left"))
        self.chain = chain

    @property
    def measured_families(self) -> tuple:
        return (1, 2) if self.spec.kind == LOWER else (self.spec.family,)

    def line_front(self, t: float, side: str = "+"):
        for fid in self.path:
            if self.view.trace.fronts[fid].alive_at(t, side):
                return self.view.trace.fronts[fid]
        raise InvalidInputError(f"front line not alive at t = {t}")

    def crossings(self, t: float, side: str = "+") -> list:
        s = self.spec
        tr = self.view.trace
        if t > s.t_max:
            raise InvalidInputError("t beyond t_max")
        if t <= s.t_min:
            seq = [(f, t, side) for f in tr.alive(t, side)]
        else:
            now = tr.alive(t, side)
            idx = now.index(self.line_front(t, side))
            base = tr.alive(s.t_min, "+")
            im = base.index(self.line_front(s.t_min, "+"))
            tm = (s.t_min, "+")
            past = [c for c in self.chain if c[0].time < t or (side == "+" and c[0].time == t)]
            on_left = [(tr.fronts[o], e.time, "-") for e, o, where in past if where == "left"]
            on_right = [(tr.fronts[o], e.time, "-") for e, o, where in past if where == "right"]
            left_now = [(f, t, side) for f in now[:idx]]
            right_now = [(f, t, side) for f in now[idx + 1:]]
            left_base = [(f, *tm) for f in base[:im]]
            corner = [(base[im], *tm)]
            right_base = [(f, *tm) for f in base[im + 1:]]
            if s.kind == LOWER and s.family == 1:
                seq = left_now + on_left[::-1] + corner + right_base
            elif s.kind == UPPER and s.family == 1:
                seq = left_base + corner + on_right + right_now
            elif s.kind == LOWER:
                seq = left_base + corner + on_right + right_now
            else:
                seq = left_now + on_left[::-1] + corner + right_base
        fam = self.measured_families
        return [(f, tt, sd) for f, tt, sd in seq if f.family in fam and f.nature != TRIVIAL]

    def _unlimited(self, e) -> bool:
        """Whether event ``e`` lies in the unbounded-in-time component of the
        complement of the curve (and before ``t_max``)."""
        s = self.spec
        if not (s.t_min < e.time <= s.t_max):
            return False
        if e.incoming[0] in self.path_set or e.incoming[1] in self.path_set:
            return True
        x_line = self.line_front(e.time, "-").position(e.time)
        right_side = (s.family == 1) == (s.kind == LOWER)
        return e.position >= x_line if right_side else e.position <= x_line

    def tilde_factors(self, t: float, side: str) -> dict:
        key = (float(t), side)
        if key not in self._tilde:
            self._tilde[key] = self.view.amplification(t, side, self.spec.t_max, self._unlimited)
        return self._tilde[key]

    def values(self, t: float, side: str = "+") -> tuple:
        """``(V_Gamma, M_Gamma, unamplified p-variation on the curve)``."""
        cr = self.crossings(t, side)
        v = m = vt = 0.0
        p = self.view.p
        for k in self.measured_families:
            fam = [(f, tt, sd) for f, tt, sd in cr if f.family == k]
            hats = [self.view.preamplified(tt, sd)[f.id][0] for f, tt, sd in fam]
            mt = [self.tilde_factors(tt, sd)[f.id] for f, tt, sd in fam]
            v += max_p_sum_power(hats, p)
            if len(mt) > 1:
                m += max_p_sum_power(np.diff(mt), p)
            vt += max_p_sum_power([f.sigma for f, _, _ in fam], p)
        return v, m, vt ** (1.0 / p)


def measure_curve(view: HorizonView, spec: CurveSpec) -> MeasureCurve:
    return MeasureCurve(view, spec)


def default_curves(view: HorizonView, exhaustive: bool = False) -> list:
    """One lower and one upper curve along every shock front line, plus the
    longest-lived rarefaction line of each family.  ``exhaustive`` uses
    every front line instead."""
    tr = view.trace
    roots = [f for f in tr.fronts if not f.parents and f.t0 < view.T]
    chosen = []
    for k in (1, 2):
        fam = [f for f in roots if f.family == k]
        if exhaustive:
            chosen += fam
            continue
        chosen += [f for f in fam if f.nature == SW]
        rw = [f for f in fam if f.nature != SW]
        if rw:
            chosen.append(max(rw, key=lambda f: (_line_end(view, f) - f.t0, -f.id)))
    specs = []
    for f in chosen:
        t_max = _line_end(view, f)
        if t_max <= f.t0:
            continue
        for kind in (LOWER, UPPER):
            specs.append(CurveSpec(kind, f.family, f.id, f.t0, t_max))
    return specs


def _line_end(view: HorizonView, f) -> float:
    last = view.trace.fronts[view.path(f.id)[-1]]
    return view.T if last.t_end is None else min(view.T, last.t_end)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class FunctionalReport:
    times: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # V1, V2, Q1, Q2, Q3, Upsilon, Vp, Vp_tilde
    curves: dict = field(default_factory=dict)  # name -> list of (t, side, V_Gamma, M_Gamma)
    violations: list = field(default_factory=list)  # (time, functional, jump)
    constants: dict = field(default_factory=dict)

    COLUMNS = ("V1", "V2", "Q1", "Q2", "Q3", "Upsilon", "Vp", "Vp_tilde")

    def column(self, name: str) -> np.ndarray:
        return np.array([r[self.COLUMNS.index(name)] for r in self.rows])

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("time," + ",".join(self.COLUMNS) + "\n")
            for t, row in zip(self.times, self.rows):
                fh.write(f"{t!r}," + ",".join(repr(float(x)) for x in row) + "\n")

    def to_json(self) -> str:
        return json.dumps({"violations": [list(v) for v in self.violations], "constants": self.constants,
                           "curves": sorted(self.curves)}, sort_keys=True, indent=1)


def _increase(before: float, after: float) -> float:
    jump = after - before
    return jump if jump > DECAY_RTOL * (1.0 + abs(before)) else 0.0


def monitor_decay(view: HorizonView, C1: float = DEFAULT_C1, C2: float = DEFAULT_C2, curves=None) -> FunctionalReport:
    """Evaluate the functionals before and after every event up to ``T`` and
    record every increase beyond ``1e-10 (1 + value before)``.

    ``curves`` is a list of :class:`CurveSpec` (default: :func:`default_curves`).
    """
    if C1 < 1 or C2 < 1:
        raise InvalidInputError("C1 and C2 must be at least 1")
    tr = view.trace
    rep = FunctionalReport()
    vp0 = vector_p_variation(tr.initial, view.p, tr.model)

    def row(t, side):
        st = view.state(t, side)
        vp = vector_p_variation(solution_at(tr, t, side) if t > 0 or side == "+" else tr.initial, view.p, tr.model)
        return (st.V1, st.V2, st.Q1, st.Q2, st.Q3, st.upsilon(C1, C2), vp, st.Vp_tilde)

    rep.times.append(0.0)
    rep.rows.append(row(0.0, "+"))
    for e in view.events:
        before, after = view.state(e.time, "-"), view.state(e.time, "+")
        jump = _increase(before.upsilon(C1, C2), after.upsilon(C1, C2))
        if jump:
            rep.violations.append((e.time, "Upsilon", jump))
        rep.times.append(e.time)
        rep.rows.append(row(e.time, "+"))
    specs = default_curves(view) if curves is None else curves
    for spec in specs:
        curve = MeasureCurve(view, spec)
        series = [(0.0, "+", *curve.values(0.0, "+")[:2])]
        for e in view.events:
            if e.time > spec.t_max:
                break
            q_b = view.state(e.time, "-").potential(C1, C2)
            q_a = view.state(e.time, "+").potential(C1, C2)
            vb, mb, _ = curve.values(e.time, "-")
            va, ma, _ = curve.values(e.time, "+")
            for name, b, a in (("V_Gamma+Q", vb + q_b, va + q_a), ("M_Gamma+Q", mb + q_b, ma + q_a)):
                jump = _increase(b, a)
                if jump:
                    rep.violations.append((e.time, f"{name} {spec.name}", jump))
            series.append((e.time, "+", va, ma))
        rep.curves[spec.name] = series
    rep.constants = _constants(view, rep, vp0)
    return rep


def _constants(view: HorizonView, rep: FunctionalReport, vp0: float) -> dict:
    V = rep.column("V1") + rep.column("V2")
    vt = rep.column("Vp_tilde")
    vp = rep.column("Vp")
    Q = rep.column("Q1") + rep.column("Q2") + rep.column("Q3")
    out = {"Vp0": vp0}
    mask = vt > 0
    if np.any(mask) and vp0 > 0:
        ratio = V[mask] / vt[mask] ** view.p
        out["sandwich_low"] = float(max(0.0, np.max(1 - ratio)) / vp0**3)
        out["sandwich_high"] = float(max(0.0, np.max(ratio - 1)) / vp0**3)
    if np.any(V > 0):
        out["Q_over_V2"] = float(np.max(Q[V > 0] / V[V > 0] ** 2))
    both = (vp > 0) & (vt > 0)
    if np.any(both):
        out["lemma_vv_tilde"] = float(np.max(np.abs(vt[both] - vp[both]) / np.minimum(vp[both], vt[both]) ** 3))
    ms = [m for t in [0.0] + [e.time for e in view.events] for _, m in view.preamplified(t, "+").values()]
    if ms:
        out["M_min"], out["M_max"] = float(min(ms)), float(max(ms))
    m0 = [series[0][3] for series in rep.curves.values()]
    if m0 and vp0 > 0:
        out["M_Gamma0_over_Vp0_cubed"] = float(max(m0) / vp0**3)
    out["vp_growth"] = float(np.max(vp) ** view.p - vp0**view.p) if vp.size else 0.0
    return out


@dataclass
class HReport:
    holds: bool
    bound: float
    max_vp_tilde: float
    max_curve_vp: float
    violations: list


def check_H(view: HorizonView, tau: float | None = None, curves=None) -> HReport:
    """Check ``Vtilde_p(t) <= 4 V_p(u0)`` at event times up to ``tau`` and the
    same bound for the p-variation measured on the curve family."""
    tr = view.trace
    tau = view.T if tau is None else tau
    if tau > view.T:
        raise InvalidInputError("tau beyond the horizon")
    bound = 4.0 * vector_p_variation(tr.initial, view.p, tr.model)
    viol = []
    times = [0.0] + [e.time for e in view.events if e.time <= tau]
    worst = 0.0
    for t in times:
        v = view.state(t, "+").Vp_tilde
        worst = max(worst, v)
        if v > bound * (1 + 1e-12):
            viol.append((t, "Vp_tilde", v))
    specs = default_curves(view) if curves is None else curves
    worst_c = 0.0
    for spec in specs:
        curve = MeasureCurve(view, spec)
        for t in [0.0] + [e.time for e in view.events if e.time <= min(tau, spec.t_max)]:
            v = curve.values(t, "+")[2]
            worst_c = max(worst_c, v)
            if v > bound * (1 + 1e-12):
                viol.append((t, spec.name, v))
    return HReport(not viol, bound, worst, worst_c, viol)
