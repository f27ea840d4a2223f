"""Fixpoint labelling of CTL formulas over explicit Kripke structures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import ResultMismatch
from ..kripke import (KripkeStructure, StateSet, Trace, _bfs, find_lasso,
                      pre_exists, shortest_path)
from .formula import (AF, AG, EF, EG, EU, EX, And, Atom, Formula, Not, TrueF,
                      is_propositional, to_enf)
from .parser import SpecEntry


def sat_set(ks: KripkeStructure, f: Formula) -> StateSet:
    """States of ``ks`` satisfying ``f``."""
    return _sat(ks, to_enf(f), {})


def _sat(ks: KripkeStructure, f: Formula, memo: dict) -> StateSet:
    cached = memo.get(f)
    if cached is not None:
        return cached
    if isinstance(f, TrueF):
        out = ks.all_states()
    elif isinstance(f, Atom):
        out = ks.label(f.name)
    elif isinstance(f, Not):
        out = ~_sat(ks, f.arg, memo)
    elif isinstance(f, And):
        out = _sat(ks, f.left, memo) & _sat(ks, f.right, memo)
    elif isinstance(f, EX):
        out = pre_exists(ks, _sat(ks, f.arg, memo))
    elif isinstance(f, EU):
        out = _least_eu(ks, _sat(ks, f.left, memo), _sat(ks, f.right, memo))
    elif isinstance(f, EG):
        out = _greatest_eg(ks, _sat(ks, f.arg, memo))
    else:
        raise TypeError(f"not in normal form: {f!r}")
    memo[f] = out
    return out


def _least_eu(ks: KripkeStructure, hold: StateSet, goal: StateSet) -> StateSet:
    z = goal
    while True:
        nxt = goal | (hold & pre_exists(ks, z))
        if nxt == z:
            return z
        z = nxt


def _greatest_eg(ks: KripkeStructure, hold: StateSet) -> StateSet:
    z = hold
    while True:
        nxt = hold & pre_exists(ks, z)
        if nxt == z:
            return z
        z = nxt


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    sat: StateSet
    formula: Formula


def check(ks: KripkeStructure, spec: SpecEntry) -> CheckResult:
    sat = sat_set(ks, spec.formula)
    return CheckResult(ks.initial <= sat, sat, spec.formula)


def _validate(ks: KripkeStructure, spec: SpecEntry, result: CheckResult):
    if result.formula != spec.formula or result.sat.size != ks.state_count:
        raise ResultMismatch("check result was computed for a different structure or spec")
    if result.holds != (ks.initial <= result.sat):
        raise ResultMismatch("check result verdict is inconsistent with its SAT set")


def _extend_inside(ks: KripkeStructure, path: list[int], region: StateSet) -> list[int]:
    """Follow lowest-index unvisited successors while they stay in ``region``."""
    seen = set(path)
    bits = region.bits
    while True:
        nxt = next((int(j) for j in ks.successors(path[-1]) if bits[j] and j not in seen), None)
        if nxt is None:
            return path
        path.append(nxt)
        seen.add(nxt)


def counterexample(ks: KripkeStructure, spec: SpecEntry, result: CheckResult) -> Optional[Trace]:
    """A run from an initial state demonstrating that ``spec`` fails, or None.

    * ``AG p``: shortest path to a state violating ``p``, continued through
      the whole contiguous stretch of violating states that follows it.
    * ``AF p``: a lasso staying inside ``!p`` (a witness of ``EG !p``).
    * propositional: the violating initial state.
    * anything else: the violating initial state, annotated.
    """
    _validate(ks, spec, result)
    if result.holds:
        return None
    f = spec.formula
    if isinstance(f, AG):
        bad = ~sat_set(ks, f.arg)
        path = _bfs(ks, ks.initial.bits, bad.bits)
        return ks.trace(_extend_inside(ks, path, bad))
    if isinstance(f, AF):
        return find_lasso(ks, ks.initial, ~sat_set(ks, f.arg))
    violating = (ks.initial - result.sat).first()
    if is_propositional(f):
        return ks.trace([violating])
    return ks.trace([violating], note="no path-style counterexample for this formula shape")


def witness(ks: KripkeStructure, spec: SpecEntry, result: CheckResult) -> Optional[Trace]:
    """A run showing why a holding ``EF p`` / ``EG p`` spec holds, else None."""
    _validate(ks, spec, result)
    if not result.holds:
        return None
    f = spec.formula
    if isinstance(f, EF):
        return shortest_path(ks, ks.initial, sat_set(ks, f.arg))
    if isinstance(f, EG):
        return find_lasso(ks, ks.initial, sat_set(ks, f.arg))
    return None


def violates_at_end(ks: KripkeStructure, spec: SpecEntry, trace: Trace) -> bool:
    """Machine check of an AG counterexample: its last state falsifies the body."""
    f = spec.formula
    body = f.arg if isinstance(f, AG) else f
    return trace.steps[-1].index not in sat_set(ks, body)


def format_trace(trace: Trace, style: str = "full") -> str:
    """NuSMV-like listing; ``delta`` prints only variables that changed."""
    if style not in ("full", "delta"):
        raise ValueError(f"unknown trace style {style!r}")
    out = []
    if trace.note:
        out.append(f"-- {trace.note}")
    prev: dict = {}
    for n, step in enumerate(trace.steps, start=1):
        if trace.loop_back is not None and n - 1 == trace.loop_back:
            out.append(f"-- loop starts at step {n} --")
        out.append(f"-> State: {n} (s{step.index}) <-")
        for name, value in step.snapshot:
            if style == "full" or prev.get(name) != value:
                out.append(f"    {name} = {value}")
        prev = dict(step.snapshot)
    return "\n".join(out) + "\n"
