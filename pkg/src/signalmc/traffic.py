"""Adaptive four-signal traffic controller as a finite transition system.

Signals rotate NORTH(0) -> WEST(1) -> SOUTH(2) -> EAST(3).  At each handover
the queue length of the next lane is drawn nondeterministically from
``0..q_max`` and turned into a green duration capped at ``t_thr_ticks``.
One transition is one clock tick.

Counter convention: a counter value ``k`` means ``k`` more green ticks after
the current one, so a green lasts ``counter + 1`` states.  The ``BUGGY``
variant loads the counter with the capped weight itself (counting "0 to
t_thr", one tick too many); ``FIXED`` loads ``weight - 1``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .ctl.formula import AF, AG, AX, EF, Atom, Implies
from .ctl.parser import SpecEntry
from .kripke import AtomSpec, BuildLimits, KripkeStructure, ModelProgram, build_structure

SIGNALS = ("NORTH", "WEST", "SOUTH", "EAST")


class Variant(enum.Enum):
    BUGGY = "buggy"
    FIXED = "fixed"


@dataclass(frozen=True)
class TrafficParams:
    t_thr_ticks: int = 18
    q_max: int = 20
    wait_cap: Optional[int] = None
    t_v: int = 1

    def __post_init__(self):
        if self.t_thr_ticks < 1:
            raise ValueError("t_thr_ticks must be >= 1")
        if self.q_max < 0:
            raise ValueError("q_max must be >= 0")
        if self.t_v != 1:
            raise ValueError("t_v is fixed at 1 tick per vehicle")
        if self.wait_cap is None:
            object.__setattr__(self, "wait_cap", 3 * (self.t_thr_ticks + 1) + 3)
        if self.wait_cap < 3 * (self.t_thr_ticks + 1) + 1:
            raise ValueError("wait_cap must exceed the buggy maximum wait 3*(t_thr_ticks+1)")

    @property
    def wait_bound(self) -> int:
        """Intended maximum wait: three other signals at full duration."""
        return 3 * self.t_thr_ticks

    @property
    def overshoot(self) -> int:
        """Maximum wait reached under the off-by-one counter."""
        return 3 * (self.t_thr_ticks + 1)


DEFAULT_PARAMS = TrafficParams(t_thr_ticks=18, q_max=20, wait_cap=60)
CI_PARAMS = TrafficParams(t_thr_ticks=5, q_max=7, wait_cap=21)


class ControllerState(NamedTuple):
    turn: int
    counter: int
    wait: tuple[int, int, int, int]


@dataclass(frozen=True)
class GreenPlan:
    n: int
    t_cal: int
    duration_ticks: int


def green_ticks(n: int, params: TrafficParams, variant: Variant) -> int:
    """Green duration granted to a lane holding ``n`` vehicles."""
    if n < 0:
        raise ValueError("vehicle count must be >= 0")
    cv = min(n * params.t_v, params.t_thr_ticks)
    if variant is Variant.BUGGY:
        return cv + 1
    return max(1, cv)


def plan_green(n: int, params: TrafficParams, variant: Variant) -> GreenPlan:
    return GreenPlan(n, n * params.t_v, green_ticks(n, params, variant))


def _counters(params: TrafficParams, variant: Variant) -> list[int]:
    """Distinct initial counter values over all queue draws, ascending."""
    return sorted({green_ticks(n, params, variant) - 1 for n in range(params.q_max + 1)})


def initial_states(params: TrafficParams, variant: Variant) -> set[ControllerState]:
    return {ControllerState(0, c, (0, 0, 0, 0)) for c in _counters(params, variant)}


def successors(s: ControllerState, params: TrafficParams, variant: Variant) -> set[ControllerState]:
    cap = params.wait_cap
    if s.counter > 0:
        wait = tuple(0 if i == s.turn else min(w + 1, cap) for i, w in enumerate(s.wait))
        return {ControllerState(s.turn, s.counter - 1, wait)}
    nxt = (s.turn + 1) % 4
    wait = []
    for i, w in enumerate(s.wait):
        if i == nxt:
            wait.append(0)
        elif i == s.turn:
            wait.append(1)
        else:
            wait.append(min(w + 1, cap))
    wait = tuple(wait)
    return {ControllerState(nxt, c, wait) for c in _counters(params, variant)}


def snapshot(s: ControllerState):
    pairs = [("turn", str(s.turn)), ("counter", str(s.counter))]
    for i in range(4):
        pairs.append((f"light{i}.colour", "green" if s.turn == i else "red"))
    for i in range(4):
        pairs.append((f"light{i}.wait", str(s.wait[i])))
    return tuple(pairs)


def encode(s: ControllerState) -> tuple:
    # longer greens sort first, so at a handover the heaviest weight gets the lowest index
    return (s.turn, -s.counter) + s.wait


def model_program(params: TrafficParams, variant: Variant) -> ModelProgram:
    return ModelProgram(
        initial=lambda: initial_states(params, variant),
        successors=lambda s: successors(s, params, variant),
        encode=encode,
        snapshot=snapshot,
    )


_OPS = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}
_ATOM = re.compile(r"^(?:(turn|counter)|light([0-3])\.(colour|counter|wait))(=|!=|<=|<|>=|>)(-?\w+)$")


def comparison_atom(name: str) -> Optional[AtomSpec]:
    """Resolve a canonical comparison atom name over controller variables.

    ``lightI.counter`` is the running counter while light I is green and is
    undefined (every comparison false) while it is red.  Returns None for
    names outside the vocabulary.
    """
    m = _ATOM.match(name)
    if m is None:
        return None
    var, light, field, op, raw = m.groups()
    cmp = _OPS[op]
    if field == "colour":
        if op not in ("=", "!=") or raw not in ("green", "red"):
            return None
        i = int(light)
        want_green = (raw == "green") == (op == "=")
        return AtomSpec(name, lambda s: (s.turn == i) == want_green)
    try:
        value = int(raw)
    except ValueError:
        return None
    if var == "turn":
        return AtomSpec(name, lambda s: cmp(s.turn, value))
    if var == "counter":
        return AtomSpec(name, lambda s: cmp(s.counter, value))
    i = int(light)
    if field == "wait":
        return AtomSpec(name, lambda s: cmp(s.wait[i], value))
    return AtomSpec(name, lambda s: s.turn == i and cmp(s.counter, value))


def atom_catalog(params: TrafficParams, extra: tuple[str, ...] = ()) -> list[AtomSpec]:
    """Atoms used by the built-in suite plus any resolvable ``extra`` names."""
    names = []
    for i in range(4):
        names += [f"light{i}.colour=green", f"light{i}.colour=red", f"light{i}.counter=0",
                  f"light{i}.wait<={params.wait_bound}", f"light{i}.wait={params.wait_bound}",
                  f"light{i}.wait={params.overshoot}"]
    for name in extra:
        if name not in names:
            names.append(name)
    out = []
    for name in names:
        atom = comparison_atom(name)
        if atom is not None:
            out.append(atom)
    return out


def paper_spec_suite(params: TrafficParams) -> list[SpecEntry]:
    """The twelve published properties, four AG readings of the first group and
    four overshoot probes, in that order."""
    bound, over = params.wait_bound, params.overshoot

    def green(i):
        return Atom(f"light{i}.colour=green")

    suite = []
    for i in range(4):
        handover = Implies(Atom(f"light{i}.counter=0"), AX(green((i + 1) % 4)))
        suite.append(SpecEntry.from_formula(f"round_robin_{i}", AF(handover)))
    for i in range(4):
        suite.append(SpecEntry.from_formula(
            f"liveness_{i}", AG(Implies(Atom(f"light{i}.colour=red"), AF(green(i))))))
    for i in range(4):
        suite.append(SpecEntry.from_formula(f"max_wait_{i}", AG(Atom(f"light{i}.wait<={bound}"))))
    for i in range(4):
        handover = Implies(Atom(f"light{i}.counter=0"), AX(green((i + 1) % 4)))
        suite.append(SpecEntry.from_formula(f"round_robin_ag_{i}", AG(handover)))
    for i in range(4):
        suite.append(SpecEntry.from_formula(
            f"overshoot_probe_{i}", EF(Atom(f"light{i}.wait={over}")), probe=True))
    return suite


def build_traffic(params: TrafficParams, variant: Variant, extra_atoms: tuple[str, ...] = (),
                  limits: BuildLimits = BuildLimits()) -> KripkeStructure:
    return build_structure(model_program(params, variant), atom_catalog(params, extra_atoms), limits)
