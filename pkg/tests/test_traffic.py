import random

import pytest

from signalmc.ctl import check
from signalmc.traffic import (CI_PARAMS, DEFAULT_PARAMS, ControllerState, TrafficParams, Variant,
                              atom_catalog, build_traffic, comparison_atom, green_ticks,
                              initial_states, paper_spec_suite, plan_green, successors)

FIXED, BUGGY = Variant.FIXED, Variant.BUGGY
P18 = TrafficParams(t_thr_ticks=18, q_max=20)


@pytest.mark.parametrize("n,variant,ticks", [
    (10, FIXED, 10),
    (25, BUGGY, 19),
    (25, FIXED, 18),
    (0, FIXED, 1),
    (0, BUGGY, 1),
    (18, FIXED, 18),
    (18, BUGGY, 19),
    (1, BUGGY, 2),
])
def test_green_ticks(n, variant, ticks):
    assert green_ticks(n, P18, variant) == ticks


def test_green_ticks_rejects_negative():
    with pytest.raises(ValueError):
        green_ticks(-1, P18, FIXED)


def test_plan_green():
    plan = plan_green(25, P18, FIXED)
    assert (plan.n, plan.t_cal, plan.duration_ticks) == (25, 25, 18)


def test_params_validation_and_defaults():
    assert P18.wait_cap == 60
    assert TrafficParams(t_thr_ticks=5).wait_cap == 21
    assert (DEFAULT_PARAMS.t_thr_ticks, DEFAULT_PARAMS.q_max, DEFAULT_PARAMS.wait_cap) == (18, 20, 60)
    assert (CI_PARAMS.t_thr_ticks, CI_PARAMS.q_max, CI_PARAMS.wait_cap) == (5, 7, 21)
    with pytest.raises(ValueError):
        TrafficParams(t_thr_ticks=0)
    with pytest.raises(ValueError):
        TrafficParams(t_thr_ticks=5, wait_cap=18)
    with pytest.raises(ValueError):
        TrafficParams(t_v=2)


def test_initial_states():
    p3 = TrafficParams(t_thr_ticks=18, q_max=3)
    assert {s.counter for s in initial_states(p3, FIXED)} == {0, 1, 2}
    assert len(initial_states(TrafficParams(t_thr_ticks=18, q_max=0), FIXED)) == 1
    counters = sorted(s.counter for s in initial_states(P18, BUGGY))
    assert counters == list(range(19))
    for s in initial_states(P18, FIXED):
        assert s.turn == 0 and s.wait == (0, 0, 0, 0)


def test_countdown_tick():
    s = ControllerState(0, 2, (0, 5, 3, 1))
    assert successors(s, P18, FIXED) == {ControllerState(0, 1, (0, 6, 4, 2))}


def test_handover():
    s = ControllerState(0, 0, (0, 5, 3, 1))
    succ = successors(s, TrafficParams(t_thr_ticks=18, q_max=2), FIXED)
    assert succ == {ControllerState(1, 0, (1, 0, 4, 2)), ControllerState(1, 1, (1, 0, 4, 2))}


def test_wait_saturates():
    params = TrafficParams(t_thr_ticks=2, q_max=3)
    cap = params.wait_cap
    s = ControllerState(0, 1, (0, cap, cap, cap - 1))
    (nxt,) = successors(s, params, FIXED)
    assert nxt.wait == (0, cap, cap, cap)


def test_atoms_on_states():
    atoms = {a.name: a for a in atom_catalog(P18)}
    s = ControllerState(2, 3, (0, 54, 12, 7))
    assert atoms["light2.colour=green"].predicate(s)
    assert atoms["light0.colour=red"].predicate(s)
    assert not atoms["light2.colour=red"].predicate(s)
    assert atoms["light1.wait<=54"].predicate(ControllerState(0, 0, (0, 54, 12, 7)))
    assert atoms["light1.wait=57"].predicate(ControllerState(0, 0, (0, 57, 12, 7)))
    assert not atoms["light2.counter=0"].predicate(s)
    assert atoms["light2.counter=0"].predicate(ControllerState(2, 0, (0, 1, 0, 1)))
    # a red light's counter is undefined, so no comparison holds
    assert not atoms["light0.counter=0"].predicate(ControllerState(2, 0, (0, 1, 0, 1)))


@pytest.mark.parametrize("name,state,value", [
    ("turn=2", ControllerState(2, 0, (1, 1, 0, 1)), True),
    ("counter>3", ControllerState(2, 4, (1, 1, 0, 1)), True),
    ("light3.wait>=1", ControllerState(2, 4, (1, 1, 0, 1)), True),
    ("light3.wait<1", ControllerState(2, 4, (1, 1, 0, 1)), False),
    ("light1.colour!=green", ControllerState(2, 4, (1, 1, 0, 1)), True),
    ("light2.counter<5", ControllerState(2, 4, (1, 1, 0, 1)), True),
])
def test_comparison_atoms(name, state, value):
    assert comparison_atom(name).predicate(state) is value


@pytest.mark.parametrize("name", ["light4.wait=1", "light0.colour<green", "light0.colour=blue",
                                  "speed=3", "light0.wait=x"])
def test_unresolvable_atoms(name):
    assert comparison_atom(name) is None


def test_suite_shape():
    suite = paper_spec_suite(P18)
    assert len(suite) == 20
    assert len({e.name for e in suite}) == 20
    assert sum(e.probe for e in suite) == 4
    assert "light0.wait<=54" in suite[8].source_text
    assert "light3.wait=57" in suite[19].source_text
    assert "light0.wait<=15" in paper_spec_suite(TrafficParams(t_thr_ticks=5))[8].source_text
    assert suite[0].source_text == "AF (light0.counter=0 -> AX light1.colour=green)"
    assert suite[12].source_text == "AG (light0.counter=0 -> AX light1.colour=green)"


@pytest.fixture(scope="module", params=[FIXED, BUGGY], ids=["fixed", "buggy"])
def ci_structure(request):
    return request.param, build_traffic(CI_PARAMS, request.param)


def test_reachable_state_invariants(ci_structure):
    variant, ks = ci_structure
    limit = CI_PARAMS.t_thr_ticks - (variant is FIXED)
    for i, s in enumerate(ks.states):
        greens = [ks.labels[f"light{j}.colour=green"].bits[i] for j in range(4)]
        assert sum(greens) == 1 and greens[s.turn]
        assert s.wait[s.turn] == 0
        assert s.counter <= limit
        succ = [ks.states[j] for j in ks.successors(i)]
        if s.counter > 0:
            assert len(succ) == 1 and succ[0].turn == s.turn
        else:
            assert all(t.turn == (s.turn + 1) % 4 for t in succ)


def test_max_wait_scan(ci_structure):
    variant, ks = ci_structure
    top = max(max(s.wait) for s in ks.states)
    assert top == (CI_PARAMS.overshoot if variant is BUGGY else CI_PARAMS.wait_bound)


def test_green_duration_along_sampled_paths(ci_structure):
    variant, ks = ci_structure
    longest = CI_PARAMS.t_thr_ticks + (variant is BUGGY)
    rng = random.Random(7)
    for _ in range(50):
        i = rng.choice(list(ks.initial))
        run, prev, seen_max = 0, None, 0
        for _ in range(400):
            turn = ks.states[i].turn
            run = run + 1 if turn == prev else 1
            prev = turn
            seen_max = max(seen_max, run)
            assert run <= longest
            i = int(rng.choice(ks.successors(i)))
    assert seen_max == longest


@pytest.mark.parametrize("variant", [FIXED, BUGGY])
def test_full_scale_max_wait(variant):
    ks = build_traffic(DEFAULT_PARAMS, variant)
    top = max(max(s.wait) for s in ks.states)
    assert top == (57 if variant is BUGGY else 54)
    liveness = [e for e in paper_spec_suite(DEFAULT_PARAMS) if e.name.startswith("liveness")]
    assert all(check(ks, e).holds for e in liveness)
