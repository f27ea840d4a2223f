"""Finite Kripke structures built by explicit-state breadth-first exploration.

A structure is materialized from a :class:`ModelProgram` (initial states, a
successor function and a canonical encoding used for deduplication).  States
receive indices in BFS discovery order, successors being enumerated in sorted
encoding order, so two builds of the same program are identical.

Adjacency is stored in CSR form (numpy offset/index arrays) in both
directions, and sets of states are dense boolean vectors wrapped in
:class:`StateSet`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapExceeded, DuplicateAtom, NonTotal, UnknownAtom

Snapshot = tuple[tuple[str, str], ...]


def _default_snapshot(state) -> Snapshot:
    return (("state", repr(state)),)


@dataclass(frozen=True)
class AtomSpec:
    name: str
    predicate: Callable[[Any], bool]


@dataclass(frozen=True)
class ModelProgram:
    """Programmatic model description.

    ``encode`` must be injective on reachable states and return mutually
    comparable keys; it fixes both deduplication and index order.
    ``snapshot`` renders a state as ordered ``(name, value)`` pairs for traces.
    """

    initial: Callable[[], Iterable[Any]]
    successors: Callable[[Any], Iterable[Any]]
    encode: Callable[[Any], Hashable]
    snapshot: Callable[[Any], Snapshot] = _default_snapshot


@dataclass(frozen=True)
class BuildLimits:
    max_states: int = 10_000_000
    max_transitions: int = 100_000_000

    def __post_init__(self):
        if self.max_states < 1 or self.max_transitions < 1:
            raise ValueError("build limits must be >= 1")


class StateSet:
    """Immutable set of state indices backed by a dense boolean vector."""

    __slots__ = ("_bits",)

    def __init__(self, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        self._bits = bits

    @classmethod
    def empty(cls, size: int) -> StateSet:
        return cls(np.zeros(size, dtype=bool))

    @classmethod
    def full(cls, size: int) -> StateSet:
        return cls(np.ones(size, dtype=bool))

    @classmethod
    def of(cls, size: int, indices: Iterable[int]) -> StateSet:
        bits = np.zeros(size, dtype=bool)
        idx = np.fromiter(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= size):
            raise IndexError("state index out of range")
        bits[idx] = True
        return cls(bits)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def size(self) -> int:
        """Number of states in the owning structure (universe size)."""
        return self._bits.shape[0]

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self._bits)

    def first(self) -> Optional[int]:
        idx = np.flatnonzero(self._bits)
        return int(idx[0]) if idx.size else None

    def is_empty(self) -> bool:
        return not self._bits.any()

    def _check(self, other: StateSet):
        if not isinstance(other, StateSet):
            return NotImplemented
        if other.size != self.size:
            raise ValueError("state sets belong to different structures")
        return None

    def __or__(self, other: StateSet) -> StateSet:
        self._check(other)
        return StateSet(self._bits | other._bits)

    def __and__(self, other: StateSet) -> StateSet:
        self._check(other)
        return StateSet(self._bits & other._bits)

    def __sub__(self, other: StateSet) -> StateSet:
        self._check(other)
        return StateSet(self._bits & ~other._bits)

    def __invert__(self) -> StateSet:
        return StateSet(~self._bits)

    def __le__(self, other: StateSet) -> bool:
        self._check(other)
        return not (self._bits & ~other._bits).any()

    def __ge__(self, other: StateSet) -> bool:
        return other <= self

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateSet):
            return NotImplemented
        return self.size == other.size and bool(np.array_equal(self._bits, other._bits))

    __hash__ = None

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.size and bool(self._bits[index])

    def __len__(self) -> int:
        return int(np.count_nonzero(self._bits))

    def __iter__(self) -> Iterator[int]:
        return (int(i) for i in np.flatnonzero(self._bits))

    def __repr__(self) -> str:
        shown = list(self)[:10]
        more = ", ..." if len(self) > 10 else ""
        return f"StateSet({shown}{more} of {self.size})"


@dataclass(frozen=True)
class TraceStep:
    index: int
    snapshot: Snapshot

    def value(self, name: str) -> Optional[str]:
        for key, val in self.snapshot:
            if key == name:
                return val
        return None


@dataclass(frozen=True)
class Trace:
    """A finite path; with ``loop_back`` set the last step returns to that step."""

    steps: tuple[TraceStep, ...]
    loop_back: Optional[int] = None
    note: Optional[str] = None

    @property
    def indices(self) -> list[int]:
        return [s.index for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


class KripkeStructure:
    """Reachable fragment of a model: states, total transition relation, labels."""

    def __init__(self, states, initial, fwd_ptr, fwd_idx, labels, snapshot_fn):
        self.states = states
        self.state_count = len(states)
        self.initial = initial
        self._fwd_ptr = fwd_ptr
        self._fwd_idx = fwd_idx
        self._src = np.repeat(np.arange(self.state_count, dtype=np.int64), np.diff(fwd_ptr))
        order = np.argsort(fwd_idx, kind="stable")
        self._bwd_idx = self._src[order]
        counts = np.bincount(fwd_idx, minlength=self.state_count)
        self._bwd_ptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self.labels = labels
        self.atom_names = tuple(labels)
        self._snapshot_fn = snapshot_fn
        for arr in (self._fwd_ptr, self._fwd_idx, self._src, self._bwd_idx, self._bwd_ptr):
            arr.flags.writeable = False

    @property
    def transition_count(self) -> int:
        return int(self._fwd_idx.shape[0])

    def successors(self, i: int) -> np.ndarray:
        return self._fwd_idx[self._fwd_ptr[i]:self._fwd_ptr[i + 1]]

    def predecessors(self, i: int) -> np.ndarray:
        return self._bwd_idx[self._bwd_ptr[i]:self._bwd_ptr[i + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Source and destination arrays of every transition, in CSR order."""
        return self._src, self._fwd_idx

    def snapshot(self, i: int) -> Snapshot:
        return self._snapshot_fn(self.states[i])

    def label(self, name: str) -> StateSet:
        try:
            return self.labels[name]
        except KeyError:
            raise UnknownAtom(name) from None

    def all_states(self) -> StateSet:
        return StateSet.full(self.state_count)

    def no_states(self) -> StateSet:
        return StateSet.empty(self.state_count)

    def subset(self, indices: Iterable[int]) -> StateSet:
        return StateSet.of(self.state_count, indices)

    def trace(self, indices: Sequence[int], loop_back=None, note=None) -> Trace:
        steps = tuple(TraceStep(int(i), self.snapshot(int(i))) for i in indices)
        return Trace(steps, loop_back, note)


def build_structure(program: ModelProgram, atoms: Sequence[AtomSpec] = (),
                    limits: BuildLimits = BuildLimits()) -> KripkeStructure:
    """Explore the reachable states of ``program`` and label them with ``atoms``."""
    names = set()
    for atom in atoms:
        if atom.name in names:
            raise DuplicateAtom(atom.name)
        names.add(atom.name)

    encode = program.encode
    initial = {}
    for s in program.initial():
        initial.setdefault(encode(s), s)
    if not initial:
        raise ValueError("model has no initial states")
    if len(initial) > limits.max_states:
        raise CapExceeded(len(initial), 0, "max_states")

    index: dict = {}
    states: list = []
    for key in sorted(initial):
        index[key] = len(states)
        states.append(initial[key])
    n_initial = len(states)

    ptr = [0]
    dst: list[int] = []
    head = 0
    while head < len(states):
        s = states[head]
        head += 1
        succ = {}
        for t in program.successors(s):
            succ.setdefault(encode(t), t)
        if not succ:
            raise NonTotal(program.snapshot(s))
        for key in sorted(succ):
            j = index.get(key)
            if j is None:
                if len(states) >= limits.max_states:
                    raise CapExceeded(len(states), len(dst), "max_states")
                j = len(states)
                index[key] = j
                states.append(succ[key])
            dst.append(j)
        if len(dst) > limits.max_transitions:
            raise CapExceeded(len(states), len(dst), "max_transitions")
        ptr.append(len(dst))

    n = len(states)
    labels = {}
    for atom in atoms:
        pred = atom.predicate
        labels[atom.name] = StateSet(np.fromiter((bool(pred(s)) for s in states), dtype=bool, count=n))
    init_bits = np.zeros(n, dtype=bool)
    init_bits[:n_initial] = True
    return KripkeStructure(
        states,
        StateSet(init_bits),
        np.asarray(ptr, dtype=np.int64),
        np.asarray(dst, dtype=np.int64),
        labels,
        program.snapshot,
    )


def pre_exists(ks: KripkeStructure, target: StateSet) -> StateSet:
    """States with at least one successor in ``target``."""
    hit = target.bits[ks._fwd_idx]
    # every CSR segment is nonempty because the relation is total
    return StateSet(np.logical_or.reduceat(hit, ks._fwd_ptr[:-1]))


def _bfs(ks: KripkeStructure, sources: np.ndarray, targets: np.ndarray,
         allowed: Optional[np.ndarray] = None) -> Optional[list[int]]:
    """Layered BFS returning the index path to the nearest target.

    Within a layer the lowest-index target wins, and each newly reached
    state's parent is its lowest-index predecessor in the previous layer.
    """
    if allowed is not None:
        sources = sources & allowed
    start_hits = np.flatnonzero(sources & targets)
    if start_hits.size:
        return [int(start_hits[0])]
    ptr, idx = ks._fwd_ptr, ks._fwd_idx
    parent = np.full(ks.state_count, -1, dtype=np.int64)
    visited = sources.copy()
    frontier = np.flatnonzero(sources)
    while frontier.size:
        starts = ptr[frontier]
        counts = ptr[frontier + 1] - starts
        total = int(counts.sum())
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        edge_src = np.repeat(frontier, counts)
        edge_dst = idx[np.repeat(starts, counts) + offsets]
        keep = ~visited[edge_dst]
        if allowed is not None:
            keep &= allowed[edge_dst]
        edge_src, edge_dst = edge_src[keep], edge_dst[keep]
        # frontier is ascending, so the first occurrence carries the minimal parent
        reached, first = np.unique(edge_dst, return_index=True)
        parent[reached] = edge_src[first]
        visited[reached] = True
        hits = reached[targets[reached]]
        if hits.size:
            path = [int(hits[0])]
            while parent[path[-1]] >= 0:
                path.append(int(parent[path[-1]]))
            path.reverse()
            return path
        frontier = reached
    return None


def shortest_path(ks: KripkeStructure, from_: StateSet, to: StateSet) -> Optional[Trace]:
    path = _bfs(ks, from_.bits, to.bits)
    return None if path is None else ks.trace(path)


def _eg_states(ks: KripkeStructure, within: StateSet) -> StateSet:
    z = within
    while True:
        nxt = within & pre_exists(ks, z)
        if nxt == z:
            return z
        z = nxt


def _on_cycle(ks: KripkeStructure, allowed: np.ndarray) -> np.ndarray:
    """States lying on a cycle that stays inside ``allowed``."""
    src, dst = ks.edges()
    keep = allowed[src] & allowed[dst]
    s, d = src[keep], dst[keep]
    n = ks.state_count
    graph = csr_matrix((np.ones(s.shape[0], dtype=np.int8), (s, d)), shape=(n, n))
    _, comp = connected_components(graph, directed=True, connection="strong")
    sizes = np.bincount(comp, minlength=n)
    cyclic = allowed & (sizes[comp] > 1)
    cyclic[s[s == d]] = True
    return cyclic


def find_lasso(ks: KripkeStructure, from_: StateSet, within: StateSet) -> Optional[Trace]:
    """Path from ``from_`` inside ``within`` that closes a cycle inside ``within``."""
    good = _eg_states(ks, within)
    starts = from_ & good
    if starts.is_empty():
        return None
    allowed = good.bits
    prefix = _bfs(ks, starts.bits, _on_cycle(ks, allowed), allowed)
    knot = prefix[-1]
    back = np.zeros(ks.state_count, dtype=bool)
    back[knot] = True
    nxt = np.zeros(ks.state_count, dtype=bool)
    nxt[ks.successors(knot)] = True
    loop = _bfs(ks, nxt, back, allowed)
    return ks.trace(prefix + loop[:-1], loop_back=len(prefix) - 1)


def is_path(ks: KripkeStructure, trace: Trace) -> bool:
    """True when consecutive steps (and the loop-back edge, if any) are transitions."""
    idx = trace.indices
    if not idx:
        return False
    for a, b in zip(idx, idx[1:]):
        if b not in ks.successors(a):
            return False
    if trace.loop_back is not None:
        if not 0 <= trace.loop_back < len(idx):
            return False
        if idx[trace.loop_back] not in ks.successors(idx[-1]):
            return False
    return True


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(ks: KripkeStructure, annotate: Sequence[str] = ()) -> str:
    """Render the structure as a Graphviz digraph; initial states are drawn doubled."""
    for name in annotate:
        if name not in ks.labels:
            raise UnknownAtom(name)
    lines = ["digraph kripke {", '  node [shape=box, fontname="monospace"];']
    init = ks.initial.bits
    for i in range(ks.state_count):
        parts = [f"s{i}"] + [f"{k}={v}" for k, v in ks.snapshot(i)]
        parts += [name for name in annotate if ks.labels[name].bits[i]]
        label = "\\n".join(_dot_escape(p) for p in parts)
        extra = ", peripheries=2" if init[i] else ""
        lines.append(f'  s{i} [label="{label}"{extra}];')
    src, dst = ks.edges()
    for a, b in zip(src.tolist(), dst.tolist()):
        lines.append(f"  s{a} -> s{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def explicit_structure(successors: Mapping[Hashable, Iterable[Hashable]],
                       initial: Iterable[Hashable],
                       labels: Mapping[str, Iterable[Hashable]] = {},
                       limits: BuildLimits = BuildLimits()) -> KripkeStructure:
    """Build from an explicit adjacency map over comparable state names.

    Only the fragment reachable from ``initial`` is kept, so indices need not
    match the names; ``ks.states[i]`` recovers the name of index ``i``.
    """
    program = ModelProgram(
        initial=lambda: list(initial),
        successors=lambda s: successors.get(s, ()),
        encode=lambda s: s,
        snapshot=lambda s: (("state", str(s)),),
    )
    atoms = []
    for name, members in labels.items():
        members = frozenset(members)
        atoms.append(AtomSpec(name, members.__contains__))
    return build_structure(program, atoms, limits)
