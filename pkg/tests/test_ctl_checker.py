import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signalmc.ctl import (AF, AG, EF, EG, EU, TRUE, Atom, CheckResult, Not, SpecEntry, check,
                          counterexample, format_trace, parse_formula, sat_set, to_enf,
                          violates_at_end, witness)
from signalmc.errors import ResultMismatch, UnknownAtom
from signalmc.kripke import Trace, TraceStep, explicit_structure, is_path, pre_exists
from signalmc.traffic import TrafficParams, Variant, build_traffic, paper_spec_suite

from oracles import Semantics, random_formula, random_graph


def spec(text, name=None):
    return SpecEntry(name, text, parse_formula(text))


def structure_of(g):
    return explicit_structure(g.succ, g.initial, g.labels)


def agrees_with_oracle(g, f) -> bool:
    ks = structure_of(g)
    sem = Semantics(g)
    got = sat_set(ks, f)
    return all((i in got) == sem.holds(f, ks.states[i]) for i in range(ks.state_count))


@pytest.fixture(scope="module")
def ci_models():
    params = TrafficParams(t_thr_ticks=5, q_max=7)
    return params, {v: build_traffic(params, v) for v in Variant}


def test_true_is_everything():
    ks = explicit_structure({0: [1], 1: [0]}, [0])
    assert sat_set(ks, TRUE) == ks.all_states()


def test_single_state_fixpoints():
    ks = explicit_structure({0: [0]}, [0], {"p": [0]})
    p = Atom("p")
    assert list(sat_set(ks, EG(p))) == [0]
    assert sat_set(ks, EU(TRUE, Not(p))).is_empty()


def test_unknown_atom():
    ks = explicit_structure({0: [0]}, [0])
    with pytest.raises(UnknownAtom):
        sat_set(ks, Atom("nope"))


def test_oracle_agreement_200_structures():
    rng = random.Random(20240601)
    for _ in range(200):
        g = random_graph(rng)
        for _ in range(5):
            f = random_formula(rng, depth=4)
            assert agrees_with_oracle(g, f), (g.succ, g.initial, g.labels, f)


def test_af_on_six_state_structures():
    rng = random.Random(66)
    p = Atom("p")
    for _ in range(50):
        g = random_graph(rng, max_states=6)
        ks = structure_of(g)
        sem = Semantics(g)
        got = sat_set(ks, to_enf(AF(p)))
        assert all((i in got) == sem.holds(AF(p), ks.states[i]) for i in range(ks.state_count))


graphs = st.integers(0, 2**32 - 1).map(lambda s: random_graph(random.Random(s)))


@given(graphs, st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_oracle_agreement_property(g, seed):
    assert agrees_with_oracle(g, random_formula(random.Random(seed), depth=4))


@given(graphs)
@settings(max_examples=80, deadline=None)
def test_fixpoint_laws(g):
    ks = structure_of(g)
    for name in ("p", "q"):
        p = Atom(name)
        sp = sat_set(ks, p)
        ef, eg = sat_set(ks, EF(p)), sat_set(ks, EG(p))
        assert sat_set(ks, AG(p)) == ~sat_set(ks, EU(TRUE, Not(p)))
        assert sp <= ef
        assert ef == sp | pre_exists(ks, ef)
        assert eg <= sp
        assert eg == sp & pre_exists(ks, eg)


def test_check_verdict_tracks_initial_states():
    ks = explicit_structure({0: [1], 1: [1]}, [0], {"p": [1]})
    assert check(ks, spec("AX p")).holds
    assert not check(ks, spec("p")).holds
    assert check(ks, spec("true")).holds


def test_holding_spec_has_no_counterexample():
    ks = explicit_structure({0: [0]}, [0], {"p": [0]})
    s = spec("AG p")
    assert counterexample(ks, s, check(ks, s)) is None


def test_af_counterexample_is_self_loop_lasso():
    ks = explicit_structure({0: [0]}, [0], {"p": []})
    s = spec("AF p")
    trace = counterexample(ks, s, check(ks, s))
    assert trace.indices == [0] and trace.loop_back == 0


def test_ag_counterexample_runs_through_violation():
    # 0 -> 1 -> 2 -> 3 -> 0 with p failing at 1 and 2
    ks = explicit_structure({0: [1], 1: [2], 2: [3], 3: [0]}, [0], {"p": [0, 3]})
    s = spec("AG p")
    trace = counterexample(ks, s, check(ks, s))
    assert trace.indices == [0, 1, 2]
    assert violates_at_end(ks, s, trace)


def test_propositional_and_other_shapes():
    ks = explicit_structure({0: [1], 1: [1]}, [0], {"p": [1]})
    s = spec("p & true")
    trace = counterexample(ks, s, check(ks, s))
    assert trace.indices == [0] and trace.note is None
    s = spec("EX !p")
    trace = counterexample(ks, s, check(ks, s))
    assert trace.indices == [0] and "no path-style" in trace.note


def test_result_mismatch():
    ks = explicit_structure({0: [0]}, [0], {"p": [0]})
    other = explicit_structure({0: [1], 1: [1]}, [0], {"p": [0]})
    s = spec("AG p")
    with pytest.raises(ResultMismatch):
        counterexample(ks, spec("AG !p"), check(ks, s))
    with pytest.raises(ResultMismatch):
        counterexample(other, s, check(ks, s))
    forged = CheckResult(False, ks.all_states(), s.formula)
    with pytest.raises(ResultMismatch):
        counterexample(ks, s, forged)


@given(graphs)
@settings(max_examples=100, deadline=None)
def test_counterexamples_are_valid(g):
    ks = structure_of(g)
    for text in ("AG p", "AG (p | q)", "AF p", "AF !q"):
        s = spec(text)
        result = check(ks, s)
        trace = counterexample(ks, s, result)
        if result.holds:
            assert trace is None
            continue
        assert trace.indices[0] in ks.initial
        assert is_path(ks, trace)
        body = sat_set(ks, s.formula.arg)
        if isinstance(s.formula, AG):
            assert violates_at_end(ks, s, trace)
            inside = [i in body for i in trace.indices]
            first_bad = inside.index(False)
            assert all(inside[:first_bad]) and not any(inside[first_bad:])
        else:
            assert trace.loop_back is not None
            assert not any(i in body for i in trace.indices)


def test_witness_for_ef():
    ks = explicit_structure({0: [1], 1: [2], 2: [2]}, [0], {"p": [2]})
    s = spec("EF p")
    assert witness(ks, s, check(ks, s)).indices == [0, 1, 2]
    s = spec("EG !p")
    assert witness(ks, s, check(ks, s)) is None


# -- traffic model, CI scale --------------------------------------------------

def test_ci_scale_verdict_pattern(ci_models):
    params, models = ci_models
    for variant, ks in models.items():
        for entry in paper_spec_suite(params):
            holds = check(ks, entry).holds
            if entry.name.startswith("max_wait"):
                assert holds is (variant is Variant.FIXED)
            elif entry.probe:
                assert holds is (variant is Variant.BUGGY)
            else:
                assert holds, entry.name


def test_buggy_counterexample_reaches_overshoot(ci_models):
    params, models = ci_models
    ks = models[Variant.BUGGY]
    s = spec(f"AG (light0.wait <= {params.wait_bound})")
    trace = counterexample(ks, s, check(ks, s))
    waits = [int(step.value("light0.wait")) for step in trace.steps]
    assert waits[-1] == params.overshoot == 18
    assert waits[-3:] == [16, 17, 18]
    assert is_path(ks, trace) and violates_at_end(ks, s, trace)


# -- formatting ---------------------------------------------------------------

def _toy_trace():
    snaps = [(("turn", "0"), ("light0.wait", str(w))) for w in (3, 4, 5)]
    return Trace(tuple(TraceStep(i, s) for i, s in enumerate(snaps)))


def test_format_full_single_step():
    t = Trace((TraceStep(0, (("a", "1"), ("b", "2"))),))
    assert format_trace(t, "full") == "-> State: 1 (s0) <-\n    a = 1\n    b = 2\n"


def test_format_delta_prints_changes_only():
    text = format_trace(_toy_trace(), "delta")
    assert text.count("turn = 0") == 1
    assert text.count("light0.wait") == 3
    assert format_trace(_toy_trace(), "full").count("turn = 0") == 3


def test_format_loop_marker():
    t = _toy_trace()
    looped = Trace(t.steps, loop_back=1)
    text = format_trace(looped, "delta")
    assert "-- loop starts at step 2 --\n-> State: 2 (s1) <-" in text


def test_buggy_trace_renders_55_before_57():
    params = TrafficParams(t_thr_ticks=18, q_max=20)
    ks = build_traffic(params, Variant.BUGGY)
    s = spec("AG (light0.wait <= 54)")
    text = format_trace(counterexample(ks, s, check(ks, s)), "delta")
    assert text.index("light0.wait = 55") < text.index("light0.wait = 56") < text.index("light0.wait = 57")
