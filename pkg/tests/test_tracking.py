"""Front tracking: initial data, the event loop, reconstruction and I/O."""
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frontrack.errors import ConfigError, DomainError, InvalidInputError, PreconditionError, ResourceError
from frontrack.model import builtin_p_system, hugoniot_curve, lax_curve, rarefaction_curve
from frontrack.pvar import StepFunction, vector_p_variation
from frontrack.riemann import RW, SW, TRIVIAL, interact_same, wave_curve
from frontrack.tracking import (EntropyPair, approximate_initial, build_initial_fronts, bump, check_entropy_pair,
                                check_trace, dumps_trace, entropy_residual, front_line_crossings,
                                linear_entropy_pair, load_trace, run, run_config, run_scenario, save_trace,
                                scenario_config, solution_at, time_regularity, trace_from_dict, trace_to_dict)

P_SYS = builtin_p_system()
C_STAR = 1.0


@pytest.fixture(scope="module")
def small():
    return run_scenario("psystem-small")


def two_jump_data(model, s_left, s_right, fam_left, fam_right, gap=0.5):
    u0 = model.base
    u1 = lax_curve(model, fam_left, s_left, u0)
    u2 = lax_curve(model, fam_right, s_right, u1)
    return StepFunction([0.0, gap], [u0, u1, u2])


# --- initial data -----------------------------------------------------------------

def test_step_function_returned_unchanged():
    f = two_jump_data(P_SYS, -0.02, 0.03, 1, 2)
    assert approximate_initial(f, P_SYS, 0.01) is f


def test_constant_profile():
    f = approximate_initial(lambda x: P_SYS.base, P_SYS, 0.1, support=(0.0, 1.0))
    assert f.n_jumps == 0
    assert vector_p_variation(f, 1.25, P_SYS) == 0.0


def test_initial_data_outside_ball():
    with pytest.raises(DomainError):
        approximate_initial(StepFunction([0.0], [P_SYS.base, P_SYS.base + 0.5]), P_SYS, 0.1)
    with pytest.raises(InvalidInputError):
        approximate_initial(lambda x: P_SYS.base, P_SYS, 0.1)


def test_sampling_a_smooth_bump_converges():
    def u0(x):
        return P_SYS.base + 0.03 * np.exp(-40 * (x - 0.5) ** 2) * np.array([1.0, -0.5])

    xs = np.linspace(0, 1, 20001)
    fine = np.array([u0(x) for x in xs])
    w = np.array([P_SYS.w(v) for v in fine])
    from frontrack.pvar import max_p_sum_power
    vp_exact = sum(max_p_sum_power(np.diff(w[:, k]), 1.25) for k in range(2)) ** 0.8
    errors = []
    for nu in (0.04, 0.02, 0.01):
        f = approximate_initial(u0, P_SYS, nu, support=(0.0, 1.0))
        assert vector_p_variation(f, 1.25, P_SYS) <= vp_exact * (1 + 1e-12)
        errors.append(np.sum(np.abs(f(xs) - fine).sum(axis=1)) * (xs[1] - xs[0]))
    assert errors[0] > errors[1] > errors[2]


def test_single_shock_front():
    u1 = hugoniot_curve(P_SYS, 1, -0.05, P_SYS.base).state
    fronts = build_initial_fronts(StepFunction([0.0], [P_SYS.base, u1]), P_SYS, 0.01)
    assert len(fronts) == 1
    assert fronts[0].nature == SW and fronts[0].family == 1


def test_rarefaction_becomes_a_fan():
    u1 = rarefaction_curve(P_SYS, 1, 0.035, P_SYS.base)
    fronts = build_initial_fronts(StepFunction([0.0], [P_SYS.base, u1]), P_SYS, 0.01)
    # floor(0.035 / 0.01) = 3 interior states
    assert len(fronts) == 4
    assert all(f.nature == RW for f in fronts)
    assert max(f.sigma for f in fronts) <= 0.01 + 1e-12
    speeds = [f.speed for f in fronts]
    assert np.all(np.diff(speeds) > 0)
    assert fronts[-1].right_state == pytest.approx(u1, abs=1e-14)


def test_generic_jump_recomposes():
    rng = np.random.default_rng(5)
    for _ in range(10):
        ul, ur = P_SYS.sample_ball(2, seed=int(rng.integers(1000)), factor=0.1)
        fronts = build_initial_fronts(StepFunction([0.0], [ul, ur]), P_SYS, 0.01)
        assert len({f.family for f in fronts}) <= 2
        u = ul
        for f in fronts:
            u = wave_curve(P_SYS, f.family, f.sigma, u, "R" if f.nature == RW else "T")
        assert np.linalg.norm(u - ur) <= 1e-9


# --- runs -------------------------------------------------------------------------

def test_constant_data_has_no_events():
    tr = run(P_SYS, StepFunction.constant(P_SYS.base), 0.02, C_STAR)
    assert tr.events == [] and tr.fronts == []
    assert solution_at(tr, 0.0).n_jumps == 0


def test_crossing_pair_gives_one_event():
    # a 2-shock on the left approaches a 1-shock on the right
    f = two_jump_data(P_SYS, -0.03, -0.02, 2, 1)
    tr = run(P_SYS, f, 0.01, C_STAR)
    assert len(tr.events) == 1
    e = tr.events[0]
    assert e.kind == "opposite"
    outs = [tr.fronts[k] for k in e.outgoing]
    assert sorted(o.nature for o in outs) == [SW, SW]
    assert check_trace(tr) == []


def test_same_family_shocks_merge():
    f = two_jump_data(P_SYS, -0.03, -0.02, 1, 1)
    nu = 0.01
    tr = run(P_SYS, f, nu, C_STAR)
    assert len(tr.events) == 1
    e = tr.events[0]
    assert e.kind == "same" and e.family == 1
    ul, um, ur = (np.asarray(x) for x in (f.values[0], f.values[1], f.values[2]))
    o = interact_same(P_SYS, 1, ul, um, ur, (SW, SW), nu, C_STAR)
    outs = [tr.fronts[k] for k in e.outgoing]
    ones = [x for x in outs if x.family == 1]
    assert len(ones) == 1 and ones[0].nature == SW
    assert ones[0].sigma == pytest.approx(o.sigma1, abs=1e-12)
    assert sum(x.sigma for x in outs if x.family == 2) == pytest.approx(o.sigma2, abs=1e-12)


def test_event_cap_raises_with_partial_trace():
    f = two_jump_data(P_SYS, -0.03, -0.02, 2, 1)
    with pytest.raises(ResourceError) as info:
        run(P_SYS, f, 0.01, C_STAR, max_events=0)
    assert info.value.args


def test_scenario_trace_is_sound(small):
    assert small.events
    assert check_trace(small) == []
    assert all(v == 1 for v in front_line_crossings(small).values())


def test_run_is_deterministic(small):
    again = run_scenario("psystem-small")
    assert dumps_trace(again) == dumps_trace(small)


def test_config_validation():
    with pytest.raises(ConfigError):
        run_config(scenario_config("psystem-small", nu=0))
    with pytest.raises(ConfigError):
        run_config(scenario_config("psystem-small", p=2.0))
    with pytest.raises(ConfigError):
        scenario_config("nope")


def test_speed_bands(small):
    lam1max, lam2min = small.model.speed_bounds
    for f in small.fronts:
        if f.family == 1:
            assert f.speed <= lam1max + 1e-9
        else:
            assert f.speed >= lam2min - 1e-9


# --- reconstruction ---------------------------------------------------------------

def test_solution_at_start_is_initial_data(small):
    u = solution_at(small, 0.0)
    ref = small.initial
    assert np.allclose(u.values, ref.values, atol=1e-14)


def test_solution_before_first_event_is_translated(small):
    t1 = 0.999 * small.events[0].time
    before, after = small.alive(0.0), small.alive(t1)
    assert [f.id for f in before] == [f.id for f in after]
    u = solution_at(small, t1)
    xs = np.array([f.x0 + f.speed * t1 for f in after])
    assert u.breakpoints == pytest.approx(xs, abs=1e-12)
    assert np.array_equal(u.values[1:], np.array([f.right_state for f in after]))


def test_solution_range_checked(small):
    with pytest.raises(InvalidInputError):
        solution_at(small, -1.0)
    with pytest.raises(InvalidInputError):
        solution_at(small, 2 * small.final_time + 1)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0))
def test_chain_consistency_at_random_times(frac):
    tr = _SMALL[0]
    t = frac * tr.final_time
    fronts = tr.alive(t)
    for a, b in zip(fronts[:-1], fronts[1:]):
        assert np.array_equal(a.right_state, b.left_state)
    u = solution_at(tr, t)
    assert np.array_equal(u.values[0], tr.initial.values[0])
    assert np.array_equal(u.values[-1], tr.initial.values[-1])


_SMALL = []


@pytest.fixture(autouse=True, scope="module")
def _share_small(small):
    _SMALL[:] = [small]


def test_time_regularity(small):
    assert time_regularity(small, 1.0, 1.0, 1.25) == 0.0
    with pytest.raises(InvalidInputError):
        time_regularity(small, 2.0, 1.0, 1.25)
    T = small.events[-1].time
    ratios = [time_regularity(small, T * a, T * b, 1.25) / (T * (b - a))
              for a, b in ((0, 0.5), (0.5, 1.0), (0.25, 0.5), (0.5, 0.75), (0.125, 0.25))]
    assert max(ratios) <= 10 * small.config["vp"] ** 1.25
    const = run(P_SYS, StepFunction.constant(P_SYS.base), 0.02, C_STAR, horizon=1.0)
    assert time_regularity(const, 0.0, 1.0, 1.25) == 0.0


# --- entropy ----------------------------------------------------------------------

def test_entropy_pairs_checked():
    check_entropy_pair(P_SYS, P_SYS.energy_entropy())
    check_entropy_pair(P_SYS, linear_entropy_pair(P_SYS))
    bad = EntropyPair(lambda u: u[0] ** 2, lambda u: 0.0, lambda u: np.array([2 * u[0], 0.0]))
    with pytest.raises(PreconditionError):
        check_entropy_pair(P_SYS, bad)


def test_constant_data_has_zero_residual():
    tr = run(P_SYS, StepFunction.constant(P_SYS.base), 0.02, C_STAR, horizon=1.0)
    phi = bump(0.0, 1.0, -1.0, 1.0)
    assert entropy_residual(tr, P_SYS.energy_entropy(), phi, [0.0, 1.0]) == 0.0


def test_single_shock_linear_defect_vanishes_with_nu():
    u1 = hugoniot_curve(P_SYS, 1, -0.05, P_SYS.base).state
    f = StepFunction([0.0], [P_SYS.base, u1])
    phi = bump(0.0, 1.0, -3.0, 2.0)
    defects = []
    for nu in (0.02, 0.01, 0.005):
        tr = run(P_SYS, f, nu, C_STAR, horizon=1.0)
        fr = tr.fronts[0]
        pair = linear_entropy_pair(P_SYS)
        total = abs(entropy_residual(tr, pair, phi, [0.0, 1.0])) + abs(
            entropy_residual(tr, linear_entropy_pair(P_SYS, family=2), phi, [0.0, 1.0]))
        # the only defect comes from the speed modification
        assert abs(fr.speed - fr.base_speed) <= nu * np.linalg.norm(u1 - P_SYS.base)
        defects.append(total)
    assert defects[0] > defects[1] > defects[2]


def test_energy_dissipated_at_a_shock():
    u1 = hugoniot_curve(P_SYS, 1, -0.05, P_SYS.base).state
    tr = run(P_SYS, StepFunction([0.0], [P_SYS.base, u1]), 0.01, C_STAR, horizon=1.0)
    assert entropy_residual(tr, P_SYS.energy_entropy(), bump(0.0, 1.0, -3.0, 2.0), [0.0, 1.0]) > 0


# --- serialization ----------------------------------------------------------------

def test_trace_round_trip(small, tmp_path):
    path = tmp_path / "trace.json"
    save_trace(small, path)
    back = load_trace(path)
    assert dumps_trace(back) == dumps_trace(small)
    assert back.final_time == small.final_time
    assert len(back.events) == len(small.events)


def test_unknown_schema_rejected(small):
    d = trace_to_dict(small)
    d["version"] = 99
    with pytest.raises(ConfigError):
        trace_from_dict(d)
    d = json.loads(dumps_trace(small))
    d["schema"] = "other"
    with pytest.raises(ConfigError):
        trace_from_dict(d)


def test_trivial_fronts_are_tracked(small):
    for f in small.fronts:
        if f.nature == TRIVIAL:
            assert f.sigma == 0.0 and f.cause >= 0
