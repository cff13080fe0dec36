"""Glimm-type functionals, preamplification and the measure curves."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frontrack.acceptance import small_report
from frontrack.errors import InvalidInputError
from frontrack.functionals import (LOWER, UPPER, CurveSpec, build_horizon, check_H, default_curves, measure_curve,
                                   modified_vp, monitor_decay, new_wave_production, potentials,
                                   preamplified_strengths, total_strengths, upsilon)
from frontrack.model import builtin_p_system, lax_curve
from frontrack.pvar import StepFunction, max_p_sum_power
from frontrack.riemann import calibrate_c_star, coefficient_c1, coefficient_c2
from frontrack.tracking import load_trace, run, run_scenario, save_trace

P_SYS = builtin_p_system()
C_STAR = 1.0


def data(*waves, gap=0.5):
    """Step function built from ``(family, strength)`` jumps spaced by ``gap``."""
    vals = [P_SYS.base]
    for fam, s in waves:
        vals.append(lax_curve(P_SYS, fam, s, vals[-1]))
    return StepFunction(gap * np.arange(len(waves)), vals)


@pytest.fixture(scope="module")
def crossing():
    """A 2-shock meeting a 1-shock once, tracked a little past the meeting."""
    return run(P_SYS, data((2, -0.03), (1, -0.02)), 0.01, C_STAR, horizon=1.0)


@pytest.fixture(scope="module")
def small():
    return run_scenario("psystem-small")


@pytest.fixture(scope="module")
def small_view(small):
    return build_horizon(small)


# --- oracles --------------------------------------------------------------------

def direct_q1(ns):
    total = 0.0
    for k in (1, 2):
        right, left = ns[k]["right"], ns[k]["left"]
        for a in range(len(right)):
            for b in range(a + 1, len(left)):
                total += right[a] * left[b]
    return total


def direct_q2(view, t, side):
    ns = view.nonlocal_strengths(t, side)
    right2 = dict(zip(ns[2]["ids"], ns[2]["right"]))
    left1 = dict(zip(ns[1]["ids"], ns[1]["left"]))
    order = [f.id for f in view.trace.alive(t, side)]
    total = 0.0
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            if a in right2 and b in left1:
                total += right2[a] * left1[b]
    return total


# --- coefficients and preamplification ------------------------------------------

def test_horizon_before_first_event(crossing):
    t1 = crossing.events[0].time
    view = build_horizon(crossing, 0.5 * t1)
    assert view.coefficient_table() == {}
    assert all(m == 1.0 for _, m in preamplified_strengths(view, 0.0).values())


def test_horizon_range_checked(crossing):
    with pytest.raises(InvalidInputError):
        build_horizon(crossing, 0.0)
    with pytest.raises(InvalidInputError):
        build_horizon(crossing, 2.0)
    with pytest.raises(InvalidInputError):
        build_horizon(crossing, 1.0, p=2.0)


def test_single_crossing_pair(crossing):
    view = build_horizon(crossing)
    fronts, pairs = view.future_pairs(0.0)
    assert len(pairs) == 1
    (al, be), eid = next(iter(pairs.items()))
    e = crossing.events[eid]
    o = e.outcome
    c1 = coefficient_c1(P_SYS, o["u_m"], o["sigma_in"][0], o["natures_in"][0], o["u_l"])
    c2 = coefficient_c2(P_SYS, o["u_m"], o["sigma_in"][1], o["natures_in"][1], o["u_r"])
    assert view.coefficients(eid) == (c1, c2)
    fa, fb = crossing.fronts[al], crossing.fronts[be]
    pre = preamplified_strengths(view, 0.0)
    assert pre[al][1] == 1.0 + c1 * fb.sigma ** 3
    assert pre[be][1] == 1.0 + c2 * fa.sigma ** 3
    assert pre[al][0] == fa.sigma * pre[al][1]
    # after the meeting nothing is ahead
    assert all(m == 1.0 for _, m in preamplified_strengths(view, e.time, "+").values())


def test_single_crossing_decays(crossing):
    view = build_horizon(crossing)
    e = crossing.events[0]
    assert upsilon(view, e.time, side="+") <= upsilon(view, e.time, side="-")
    rep = monitor_decay(view)
    assert rep.violations == []
    # the potential Q2 is what pays for the crossing
    assert potentials(view, e.time, "-")[1] > 0
    assert potentials(view, e.time, "+")[1] == 0


def test_coefficients_within_calibration(small_view):
    bound = calibrate_c_star(P_SYS)
    for c1, c2 in small_view.coefficient_table().values():
        assert abs(c1) <= bound and abs(c2) <= bound


def test_horizon_coherence(small):
    full = build_horizon(small)
    half = build_horizon(small, 0.5 * small.final_time)
    assert len(half.events) < len(full.events)
    assert all(e.time <= half.T for e in half.events)
    for eid, coef in half.coefficient_table().items():
        assert full.coefficients(eid) == coef


def test_amplification_factors_near_one():
    const = small_report()[1].constants
    assert 0.5 <= const["M_min"] <= const["M_max"] <= 2.0


# --- strengths and potentials ---------------------------------------------------

def test_empty_trace_functionals():
    tr = run(P_SYS, StepFunction.constant(P_SYS.base), 0.02, C_STAR)
    view = build_horizon(tr)
    assert total_strengths(view, 0.0) == (0.0, 0.0)
    assert potentials(view, 0.0) == (0.0, 0.0, 0.0)
    assert upsilon(view, 0.0) == 0.0
    assert modified_vp(view, 0.0) == 0.0
    rep = monitor_decay(view)
    assert rep.violations == []
    assert check_H(view).holds


def test_single_front_potentials():
    tr = run(P_SYS, data((1, -0.04)), 0.02, C_STAR)
    view = build_horizon(tr)
    sigma = tr.fronts[0].sigma
    q1, q2, q3 = potentials(view, 0.0)
    assert (q1, q2) == (0.0, 0.0)
    assert q3 == pytest.approx(abs(sigma) ** 3, rel=1e-15)
    assert modified_vp(view, 0.0) == pytest.approx(abs(sigma), rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0), st.sampled_from(["+", "-"]))
def test_potentials_against_direct_sums(frac, side):
    view = _VIEW[0]
    t = frac * view.T
    if side == "-" and t == 0.0:
        side = "+"
    ns = view.nonlocal_strengths(t, side)
    for k in (1, 2):
        # telescoping: the nonlocal strengths add up to the total
        assert np.sum(ns[k]["left"]) == pytest.approx(ns[k]["total"], rel=1e-12, abs=1e-15)
        assert np.sum(ns[k]["right"]) == pytest.approx(ns[k]["total"], rel=1e-12, abs=1e-15)
        assert ns[k]["total"] == pytest.approx(max_p_sum_power(ns[k]["sigma_hat"], view.p), rel=1e-12)
    q1, q2, q3 = potentials(view, t, side)
    assert q1 == pytest.approx(direct_q1(ns), rel=1e-12, abs=1e-18)
    assert q2 == pytest.approx(direct_q2(view, t, side), rel=1e-12, abs=1e-18)
    fronts = view.trace.alive(t, side)
    assert q3 == pytest.approx(sum(abs(f.sigma) ** 3 * (2 if f.nature == "CW" else 1) for f in fronts), rel=1e-12)


_VIEW = []


@pytest.fixture(autouse=True, scope="module")
def _share_view(small_view):
    _VIEW[:] = [small_view]


def test_recorded_constants_are_finite():
    const = small_report()[1].constants
    for key in ("sandwich_low", "sandwich_high", "Q_over_V2", "lemma_vv_tilde", "M_Gamma0_over_Vp0_cubed"):
        assert np.isfinite(const[key])


def test_upsilon_rejects_small_constants(small_view):
    with pytest.raises(InvalidInputError):
        upsilon(small_view, 0.0, 0.5, 8.0)
    with pytest.raises(InvalidInputError):
        monitor_decay(small_view, 8.0, 0.9)


# --- measure curves -------------------------------------------------------------

def test_curve_before_t_min_sees_everything(small_view):
    for spec in default_curves(small_view)[:6]:
        curve = measure_curve(small_view, spec)
        v, m, _ = curve.values(spec.t_min, "+")
        V1, V2 = total_strengths(small_view, spec.t_min)
        expected = V1 + V2 if spec.kind == LOWER else (V1, V2)[spec.family - 1]
        assert v == pytest.approx(expected, rel=1e-12)


def test_curve_without_crossings_has_no_modification():
    # two 1-shocks merging: no opposite-family crossing anywhere
    tr = run(P_SYS, data((1, -0.03), (1, -0.02)), 0.01, C_STAR, horizon=20.0)
    view = build_horizon(tr)
    assert len(view.events) == 1 and view.opposite == []
    for kind in (LOWER, UPPER):
        curve = measure_curve(view, CurveSpec(kind, 1, 0, 0.0, 20.0))
        for t in (0.0, tr.events[0].time, 20.0):
            assert curve.values(t, "+")[1] == 0.0


def test_invalid_curve_specs(small_view):
    with pytest.raises(InvalidInputError):
        measure_curve(small_view, CurveSpec("middle", 1, 0, 0.0, 1.0))
    with pytest.raises(InvalidInputError):
        measure_curve(small_view, CurveSpec(LOWER, 1, 0, 1.0, 0.5))
    with pytest.raises(InvalidInputError):
        measure_curve(small_view, CurveSpec(LOWER, 1, 10 ** 6, 0.0, 1.0))
    two = next(f for f in small_view.trace.fronts if f.family == 2)
    with pytest.raises(InvalidInputError):
        measure_curve(small_view, CurveSpec(LOWER, 1, two.id, 0.0, 1.0))


def test_default_curves_follow_shock_lines(small_view):
    specs = default_curves(small_view)
    assert specs
    assert {s.kind for s in specs} == {LOWER, UPPER}
    for s in specs:
        f = small_view.trace.fronts[s.front_id]
        assert not f.parents and s.t_min == f.t0 and s.t_max <= small_view.T


def test_small_data_decay():
    rep = small_report()[1]
    assert rep.violations == [], f"{len(rep.violations)} violations, first {rep.violations[:3]}"


def test_curve_bound_at_start():
    const = small_report()[1].constants
    assert const["M_Gamma0_over_Vp0_cubed"] < 1e3


# --- H and new waves --------------------------------------------------------------

def test_h_holds_on_small_data(small_view):
    rep = check_H(small_view)
    assert rep.holds and rep.violations == []
    assert rep.max_vp_tilde <= rep.bound


def test_h_report_for_large_data():
    tr = run_scenario("psystem-small", vp=0.8, nu=0.05)
    view = build_horizon(tr, tr.events[40].time)
    rep = check_H(view)
    assert isinstance(rep.holds, bool)
    assert rep.bound > 0 and np.isfinite(rep.max_vp_tilde)
    assert all(len(v) == 3 for v in rep.violations)
    with pytest.raises(InvalidInputError):
        check_H(view, 2 * view.T)


def test_new_waves(crossing):
    assert new_wave_production(crossing) == 0.0
    tr = run(P_SYS, data((1, -0.03), (1, -0.02)), 0.01, C_STAR)
    e = tr.events[0]
    created = [tr.fronts[k] for k in e.outgoing if tr.fronts[k].family == 2]
    assert new_wave_production(tr) == pytest.approx(sum(abs(f.sigma) for f in created), rel=1e-14)
    assert new_wave_production(tr) > 0


def test_analysis_survives_round_trip(crossing, tmp_path):
    path = tmp_path / "t.json"
    save_trace(crossing, path)
    a = monitor_decay(build_horizon(crossing))
    b = monitor_decay(build_horizon(load_trace(path)))
    assert a.times == b.times
    assert np.allclose(a.rows, b.rows, rtol=1e-12, atol=0)
    assert a.curves.keys() == b.curves.keys()
