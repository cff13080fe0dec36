"""The acceptance suite: fourteen end-to-end checks with stated tolerances.

Every check returns a :class:`CriterionResult`; the CLI ``check`` command and
the test suite both drive :func:`run_all`.
"""
from __future__ import annotations

import functools
import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .functionals import build_horizon, monitor_decay
from .model import (builtin_degenerate_system, builtin_p_system, convex_lemma_check, hugoniot_curve,
                    lax_curve, liu_condition_check, monotonicity_check)
from .pvar import (brute_force_p_sum, love_young_check, max_p_sum, max_p_sum_power, p_variation_seq,
                   vector_p_variation)
from .riemann import RW, SW, calibrate_c_star, interact_opposite, interact_same
from .tracking import (SCENARIOS, bump, dumps_trace, entropy_density, entropy_residual, linear_entropy_pair,
                       max_rarefaction_strength, modified_vp_fronts, run_scenario, snapshot_rows, time_regularity)
from .young import YoungPattern, evolve_period, growth_factor, vp_growth_report

RTOL = 1e-12
ATOL = 1e-14
SWEEP = (0.02, 0.04, 0.08)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        brief = ", ".join(f"{k}={_fmt(v)}" for k, v in self.detail.items())
        return f"[{verdict}] {self.number:2d}. {self.title} ({self.seconds:.1f} s) {brief}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _le(a, b, scale=None) -> bool:
    """``a <= b`` up to the suite's relative tolerance and absolute floor."""
    s = max(abs(a), abs(b)) if scale is None else scale
    return a <= b + RTOL * s + ATOL


@functools.lru_cache(maxsize=None)
def scenario_trace(name: str, nu: float | None = None):
    return run_scenario(name) if nu is None else run_scenario(name, nu=nu)


def slope(xs, ys) -> float:
    """Least-squares slope of ``log ys`` against ``log xs``."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


# ---------------------------------------------------------------------------
# 1-3: p-variation
# ---------------------------------------------------------------------------

def criterion_1(n: int = 500, seed: int = 1) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        x = rng.uniform(-1, 1, rng.integers(1, 13))
        p = float(rng.choice([1.0, 1.2, 1.5, 2.0]))
        brute = brute_force_p_sum(x, p)
        worst = max(worst, abs(max_p_sum(x, p) - brute) / (1 + brute))
    return CriterionResult(1, "p-sum oracle equivalence", worst <= 1e-12, {"max_rel_err": worst})


def _interleave(rng, a, b):
    mask = np.zeros(a.size + b.size, dtype=bool)
    mask[rng.choice(mask.size, a.size, replace=False)] = True
    c = np.empty(mask.size)
    c[mask], c[~mask] = a, b
    return c


def property_checks() -> dict:
    """The twelve elementary properties as ``name -> check(rng) -> bool``."""
    ps = (1.0, 1.2, 1.5, 2.0)

    def seq(rng, lo=1, hi=9):
        return rng.normal(size=rng.integers(lo, hi + 1))

    def p_of(rng):
        return float(rng.choice(ps))

    def monotone_in_p(rng):
        a = seq(rng)
        p, q = sorted(rng.choice(ps, 2))
        return _le(max_p_sum(a, q), max_p_sum(a, p)) and _le(p_variation_seq(a, q), p_variation_seq(a, p))

    def triangle(rng):
        a = seq(rng)
        b = rng.normal(size=a.size)
        p = p_of(rng)
        return (_le(max_p_sum(a + b, p), max_p_sum(a, p) + max_p_sum(b, p))
                and _le(p_variation_seq(a + b, p), p_variation_seq(a, p) + p_variation_seq(b, p)))

    def fusion(rng):
        a = seq(rng, 2)
        p = p_of(rng)
        j = int(rng.integers(0, a.size - 1))
        b = np.concatenate([a[:j], [a[j] + a[j + 1]], a[j + 2:]])
        sa, sb = max_p_sum(a, p), max_p_sum(b, p)
        if a[j] * a[j + 1] >= 0:
            return abs(sa - sb) <= RTOL * sa + ATOL
        return _le(sb, sa)

    def concatenation(rng):
        a, b = seq(rng), seq(rng)
        p = p_of(rng)
        return _le(max_p_sum_power(a, p) + max_p_sum_power(b, p), max_p_sum_power(np.concatenate([a, b]), p))

    def interleave(rng):
        a, b = seq(rng), seq(rng)
        p = p_of(rng)
        c = _interleave(rng, a, b)
        sa, sb, sc = max_p_sum(a, p), max_p_sum(b, p), max_p_sum(c, p)
        return _le(p_variation_seq(a, p), p_variation_seq(c, p)) and _le(abs(sa - sb), sc) and _le(sc, sa + sb)

    def repetition(rng):
        a = seq(rng)
        p = p_of(rng)
        b = np.repeat(a, rng.integers(1, 4, a.size))
        return _le(p_variation_seq(b, p), p_variation_seq(a, p))

    def add_zero(rng):
        a = seq(rng)
        p = p_of(rng)
        v = p_variation_seq(a, p)
        return (_le(p_variation_seq(np.concatenate([[0.0], a]), p), abs(a[0]) + v)
                and _le(p_variation_seq(np.concatenate([a, [0.0]]), p), abs(a[-1]) + v))

    def lipschitz(rng):
        a = rng.uniform(0.5, 2.0, rng.integers(1, 10))
        p = p_of(rng)
        v = p_variation_seq(a, p)
        return _le(p_variation_seq(a**2, p), 4.0 * v) and _le(p_variation_seq(1.0 / a, p), 4.0 * v)

    def product(rng):
        k = int(rng.integers(1, 10))
        seqs = rng.normal(size=(int(rng.integers(1, 4)), k))
        p = p_of(rng)
        sup = np.max(np.abs(seqs), axis=1)
        bound = sum(p_variation_seq(seqs[j], p) * np.prod(np.delete(sup, j)) for j in range(len(seqs)))
        return _le(p_variation_seq(np.prod(seqs, axis=0), p), bound)

    def endpoint_convex(rng):
        a = seq(rng)
        p = p_of(rng)
        grid = np.linspace(-3, 3, 25)
        vals = np.array([max_p_sum_power(np.append(a, t), p) for t in grid])
        scale = np.max(vals)
        convex = np.all(vals[1:-1] <= 0.5 * (vals[:-2] + vals[2:]) + RTOL * scale + ATOL)
        neg, pos = grid <= 0, grid >= 0
        dec = np.all(np.diff(vals[neg]) <= RTOL * scale + ATOL)
        inc = np.all(np.diff(vals[pos]) >= -RTOL * scale - ATOL)
        return bool(convex and dec and inc)

    def _end_gain(a, x_new, x_end, p, grow):
        gain = grow - max_p_sum_power(a, p)
        ok = _le(abs(x_new) ** p, gain, scale=grow)
        if x_new * x_end >= 0:
            ok = ok and _le(p * abs(x_end) ** (p - 1) * abs(x_new), gain, scale=grow)
        return ok

    def right_end(rng):
        a = seq(rng)
        p = p_of(rng)
        x = float(rng.normal())
        return _end_gain(a, x, a[-1], p, max_p_sum_power(np.append(a, x), p))

    def left_end(rng):
        a = seq(rng)
        p = p_of(rng)
        x = float(rng.normal())
        return _end_gain(a, x, a[0], p, max_p_sum_power(np.concatenate([[x], a]), p))

    return {"monotone_in_p": monotone_in_p, "triangle": triangle, "fusion": fusion,
            "concatenation": concatenation, "interleave": interleave, "repetition": repetition,
            "add_zero": add_zero, "lipschitz": lipschitz, "product": product,
            "endpoint_convex": endpoint_convex, "right_end": right_end, "left_end": left_end}


def criterion_2(n: int = 1000, seed: int = 2) -> CriterionResult:
    rng = np.random.default_rng(seed)
    fails = {}
    for name, check in property_checks().items():
        bad = sum(not check(rng) for _ in range(n))
        if bad:
            fails[name] = bad
    pair = (max_p_sum([5, -2, 5], 2), max_p_sum([5, -1, 5], 2))
    ok = not fails and pair == (8.0, 9.0)
    return CriterionResult(2, "elementary p-variation properties", ok, {"failures": fails, "pair": list(pair)})


def criterion_3(n: int = 1000, seed: int = 3) -> CriterionResult:
    rng = np.random.default_rng(seed)
    viol = 0
    worst = 0.0
    for _ in range(n):
        k = int(rng.integers(1, 40))
        x, y = rng.normal(size=k), rng.normal(size=k)
        rep = love_young_check(x, y, 1.4, 1.4)
        viol += not rep.holds
        if rep.rhs > 0:
            worst = max(worst, rep.lhs / rep.rhs)
    return CriterionResult(3, "Love-Young inequality", viol == 0, {"violations": viol, "max_ratio": worst})


# ---------------------------------------------------------------------------
# 4: interaction orders
# ---------------------------------------------------------------------------

def opposite_perturbations(model, sigma1: float = 0.05, levels=(0.1, 0.05, 0.025)) -> list:
    """``|sigma_1' - sigma_1|`` for a 2-shock of each strength meeting a 1-rarefaction."""
    out = []
    for s2 in levels:
        u_m = model.base
        u_l = hugoniot_curve(model, 2, s2, u_m, check=False).state
        u_r = lax_curve(model, 1, sigma1, u_m)
        o = interact_opposite(model, u_l, u_m, u_r, (SW, RW), coefficients=False)
        out.append(abs(o.sigma1 - sigma1))
    return out


def same_family_outputs(model, levels=(0.1, 0.05, 0.025), ratio: float = 0.7) -> list:
    """``(|sigma_2 out|, |s s'|(|s| + |s'|))`` for two 1-shocks ``-h`` and ``-ratio h``."""
    out = []
    for h in levels:
        s, sp = -h, -ratio * h
        u_l = model.base
        u_m = hugoniot_curve(model, 1, s, u_l).state
        u_r = hugoniot_curve(model, 1, sp, u_m).state
        o = interact_same(model, 1, u_l, u_m, u_r, (SW, SW), 0.02, calibrate_c_star(model))
        out.append((abs(o.sigma2), abs(s * sp) * (abs(s) + abs(sp))))
    return out


def criterion_4() -> CriterionResult:
    model = builtin_p_system()
    levels = (0.1, 0.05, 0.025)
    opp = opposite_perturbations(model, levels=levels)
    e_opp = slope(levels, opp)
    same = same_family_outputs(model, levels)
    e_same = slope(levels, [a for a, _ in same])
    e_ref = slope(levels, [b for _, b in same])
    ok = e_opp >= 2.7 and abs(e_same - e_ref) <= 0.3
    return CriterionResult(4, "interaction-order fits", ok,
                           {"opposite_exponent": e_opp, "same_exponent": e_same, "reference": e_ref})


# ---------------------------------------------------------------------------
# 5, 13: functionals on psystem-small
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def small_report():
    tr = scenario_trace("psystem-small")
    view = build_horizon(tr)
    return tr, monitor_decay(view, 8.0, 8.0)


def criterion_5() -> CriterionResult:
    t0 = time.perf_counter()
    tr, rep = small_report()
    secs = time.perf_counter() - t0
    kinds = sorted({name.split()[0] for _, name, _ in rep.violations})
    worst = max((j for _, _, j in rep.violations), default=0.0)
    ok = len(tr.events) >= 50 and not rep.violations and secs < 60
    return CriterionResult(5, "Glimm functional decay", ok,
                           {"events": len(tr.events), "violations": len(rep.violations), "kinds": kinds,
                            "max_jump": worst, "curves": len(rep.curves), "analysis_s": secs})


def criterion_13() -> CriterionResult:
    _, rep = small_report()
    c = rep.constants.get("lemma_vv_tilde", 0.0)
    return CriterionResult(13, "cubic closeness of modified and true p-variation", c < 1e3, {"C": c})


# ---------------------------------------------------------------------------
# 6-8: sweeps
# ---------------------------------------------------------------------------

def sweep_traces():
    return [scenario_trace(f"psystem-sweep-{v}") for v in SWEEP]


def criterion_6(p: float = 1.25) -> CriterionResult:
    excess = []
    for tr in sweep_traces():
        v0 = vector_p_variation(tr.initial, p, tr.model)
        vmax = max(row[2] for row in snapshot_rows(tr, p))
        excess.append(max(0.0, vmax**p - v0**p))
    consts = [e / v ** (2 * p) for e, v in zip(excess, SWEEP)]
    s = slope(SWEEP, excess) if min(excess) > 0 else math.nan
    ok = bool(min(excess) > 0 and s >= 2 * p - 0.3)
    return CriterionResult(6, "uniform p-variation bound", ok, {"C": max(consts), "slope": s, "excess": excess})


def criterion_7(p: float = 1.25) -> CriterionResult:
    totals = [tr.new_wave_total() for tr in sweep_traces()]
    s = slope(SWEEP, totals) if min(totals) > 0 else math.nan
    return CriterionResult(7, "new-wave production", bool(s >= 2 * p - 0.3), {"slope": s, "totals": totals})


def criterion_8(pairs: int = 20, p: float = 1.25, seed: int = 8) -> CriterionResult:
    rng = np.random.default_rng(seed)
    consts = []
    for tr in sweep_traces():
        horizon = tr.events[-1].time
        v0 = vector_p_variation(tr.initial, p, tr.model)
        worst = 0.0
        for _ in range(pairs):
            s, t = sorted(rng.uniform(0, horizon, 2))
            if t > s:
                worst = max(worst, time_regularity(tr, s, t, p) / (t - s))
        consts.append(worst / v0**p)
    ok = bool(all(np.isfinite(consts)) and max(consts) <= 2.0 * min(consts))
    return CriterionResult(8, "time regularity", ok, {"C_per_run": consts})


# ---------------------------------------------------------------------------
# 9-10: entropy and rarefaction size
# ---------------------------------------------------------------------------

ENTROPY_NUS = (1e-2, 5e-3, 2.5e-3)
TEST_FUNCTIONS = ((0.0, 1.0, -1.0, 2.0), (0.2, 1.5, -0.5, 1.5), (0.0, 2.0, -2.0, 3.0))
C_FLOOR = 1e-6


def entropy_constants(nu: float, p: float = 1.25, samples: int = 300) -> tuple:
    """``(C, integrated residuals, linear defect)`` for one run.

    ``C`` is the largest ``-H(t) / (nu Vtilde_p(t)^2)`` over sampled times for
    the energy pair; the linear defect is the largest ``|int H dt|`` over
    the pairs ``+-l_i(u_bar) u``.
    """
    tr = scenario_trace("psystem-small", nu)
    pair = tr.model.energy_entropy()
    c = 0.0
    integrals = []
    defect = 0.0
    for t0, t1, x0, x1 in TEST_FUNCTIONS:
        phi = bump(t0, t1, x0, x1)
        grid = np.linspace(t0, t1, 9)
        integrals.append(entropy_residual(tr, pair, phi, grid))
        for t in np.linspace(t0, t1, samples)[1:-1]:
            vt = modified_vp_fronts(tr.alive(t), p)
            if vt > 0:
                c = max(c, -entropy_density(tr, pair, phi, t) / (nu * vt**2))
        for sign, fam in itertools.product((1.0, -1.0), (1, 2)):
            lin = linear_entropy_pair(tr.model, sign, fam)
            defect = max(defect, abs(entropy_residual(tr, lin, phi, grid)))
    return c, integrals, defect


def criterion_9() -> CriterionResult:
    rows = [entropy_constants(nu) for nu in ENTROPY_NUS]
    cs = [r[0] for r in rows]
    defects = [r[2] for r in rows]
    stable = max(cs) <= 2.0 * cs[0] + C_FLOOR
    decreasing = all(b < a for a, b in zip(defects, defects[1:]))
    return CriterionResult(9, "entropy residual", bool(stable and decreasing), {"C": cs, "linear_defect": defects})


RAREFACTION_NUS = (5e-3, 2.5e-3, 1.25e-3)


def criterion_10() -> CriterionResult:
    ks = [max_rarefaction_strength(scenario_trace("psystem-small", nu)) / nu for nu in RAREFACTION_NUS]
    stable = all(1 / 1.5 <= b / a <= 1.5 for a, b in zip(ks, ks[1:]))
    return CriterionResult(10, "rarefaction and compression size", bool(stable), {"K": ks})


# ---------------------------------------------------------------------------
# 11-12, 14
# ---------------------------------------------------------------------------

def criterion_11(k: int = 20, beta: float = 0.2, alpha: float = 1e-5) -> CriterionResult:
    t0 = time.perf_counter()
    ab = evolve_period(YoungPattern.build(alpha=alpha, beta=beta), k)
    g = growth_factor(beta)
    ratio_err = float(np.max(np.abs(ab[1:, 0] / ab[:-1, 0] / g - 1)))
    beta_err = float(np.max(np.abs(ab[:, 1] - beta)))
    rep = vp_growth_report(0.1, 16, 1.25)
    secs = time.perf_counter() - t0
    ok = ratio_err <= 1e-8 and beta_err <= 1e-8 * beta and rep.exceeds_bound and secs < 30
    return CriterionResult(11, "Young counterexample growth", ok,
                           {"ratio_err": ratio_err, "beta_err": beta_err, "vp_unit": rep.vp_final_unit,
                            "bound": rep.lower_bound, "initial_constant": rep.initial_constant})


def criterion_12() -> CriterionResult:
    fails = []
    for model in (builtin_p_system(), builtin_degenerate_system()):
        if not monotonicity_check(model, n=20).ok:
            fails.append(f"{model.name}: monotonicity")
        grid = np.linspace(-model.s0, 0.0, 20)
        for i in (1, 2):
            if not liu_condition_check(model, i, model.base, grid).ok:
                fails.append(f"{model.name}: Liu family {i}")
    funcs = {"t^2": (lambda t: t * t, lambda t: 2 * t), "exp": (math.exp, math.exp),
             "|t|^3": (lambda t: abs(t) ** 3, lambda t: 3 * t * abs(t))}
    for name, (h, dh) in funcs.items():
        for s in (-1.0, -0.5, 0.5, 1.0):
            if not convex_lemma_check(h, s, dh).ok:
                fails.append(f"convex lemma {name} s={s}")
    return CriterionResult(12, "Liu condition and wave-curve lemmas", not fails, {"failures": fails})


def criterion_14() -> CriterionResult:
    differ = [name for name in SCENARIOS if dumps_trace(run_scenario(name)) != dumps_trace(run_scenario(name))]
    return CriterionResult(14, "determinism", not differ, {"scenarios": len(SCENARIOS), "differing": differ})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 15)}


def run_criterion(i: int) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[i]()
    res.seconds = time.perf_counter() - t0
    return res


def run_all(select=None, echo=print) -> list:
    out = []
    for i in sorted(CRITERIA if select is None else select):
        res = run_criterion(i)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
