"""Discrete-time simulation of one four-lane intersection.

Every lane has an entry agent placed ``detection_distance_ticks`` upstream and
an exit agent at the stop line.  The controller only ever sees the two
cumulative counters; their difference is the queue it schedules on.

Per tick ``t``:

1. one uniform draw per lane (lanes 0..3, always consumed); a vehicle
   arrives when the draw is below the lane's arrival probability.  Arrivals
   join the detection zone while it has room, otherwise wait upstream and
   are admitted (and counted by the entry agent) in FIFO order later;
2. the green lane discharges at most one vehicle, whose wait is
   ``t - arrival_tick``;
3. when the current green has used its granted ticks the controller plans
   the next lane in rotation, which turns green at ``t + 1``.

The very first green (lane 0 at tick 0) is granted ``t_thr_ticks`` in
adaptive mode since no counts exist yet, and the fixed period otherwise.
"""

from __future__ import annotations

import enum
import io
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import InvalidConfig
from .rng import MASK64, SplitMix64
from .traffic import GreenPlan, TrafficParams, Variant, green_ticks

log = logging.getLogger(__name__)


class Mode(enum.Enum):
    ADAPTIVE = "adaptive"
    FIXED_PERIOD = "fixed"


@dataclass(frozen=True)
class SimConfig:
    mode: Mode = Mode.ADAPTIVE
    t_thr_ticks: int = 180
    fixed_period_ticks: Optional[int] = None
    arrival_prob: Union[float, Sequence[float]] = 0.1
    horizon_ticks: int = 10_000
    seed: int = 1
    detection_distance_ticks: Optional[int] = None

    def __post_init__(self):
        probs = self.arrival_prob
        if isinstance(probs, (int, float)):
            probs = (float(probs),) * 4
        probs = tuple(float(p) for p in probs)
        if len(probs) != 4:
            raise InvalidConfig("arrival_prob needs one probability per lane (4)")
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise InvalidConfig(f"arrival probabilities must lie in [0, 1]: {probs}")
        object.__setattr__(self, "arrival_prob", probs)
        if not isinstance(self.mode, Mode):
            try:
                object.__setattr__(self, "mode", Mode(self.mode))
            except ValueError:
                raise InvalidConfig(f"unknown mode {self.mode!r}") from None
        if self.t_thr_ticks < 1:
            raise InvalidConfig("t_thr_ticks must be >= 1")
        if self.fixed_period_ticks is None:
            object.__setattr__(self, "fixed_period_ticks", self.t_thr_ticks)
        if self.fixed_period_ticks < 1:
            raise InvalidConfig("fixed_period_ticks must be >= 1")
        if self.detection_distance_ticks is None:
            object.__setattr__(self, "detection_distance_ticks", self.t_thr_ticks)
        if self.detection_distance_ticks < self.t_thr_ticks:
            raise InvalidConfig("entry agent must sit at least t_thr_ticks upstream")
        if self.horizon_ticks < 1:
            raise InvalidConfig("horizon_ticks must be >= 1")
        if not 0 <= self.seed <= MASK64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")

    @property
    def params(self) -> TrafficParams:
        return TrafficParams(t_thr_ticks=self.t_thr_ticks, q_max=0)


@dataclass
class LaneState:
    entry_count: int = 0
    exit_count: int = 0
    queue: deque = field(default_factory=deque)
    upstream: deque = field(default_factory=deque)
    arrived: int = 0

    @property
    def upstream_overflow(self) -> int:
        return len(self.upstream)

    def arrive(self, tick: int, zone: int):
        self.arrived += 1
        self.upstream.append(tick)
        self.admit(zone)

    def admit(self, zone: int):
        while self.upstream and len(self.queue) < zone:
            self.queue.append(self.upstream.popleft())
            self.entry_count += 1

    def discharge(self) -> int:
        self.exit_count += 1
        return self.queue.popleft()


def controller_decide(lanes: Sequence[LaneState], next_lane: int, config: SimConfig) -> GreenPlan:
    """Green plan for ``next_lane``, from the entry/exit counter difference."""
    n = lanes[next_lane].entry_count - lanes[next_lane].exit_count
    if config.mode is Mode.FIXED_PERIOD:
        return GreenPlan(n, n, config.fixed_period_ticks)
    return GreenPlan(n, n, green_ticks(n, config.params, Variant.FIXED))


@dataclass(frozen=True)
class Decision:
    tick: int          # first tick of the planned green
    lane: int
    estimate: int      # entry_count - exit_count
    true_queue: int
    duration: int


@dataclass(frozen=True)
class LaneStats:
    vehicles_arrived: int
    vehicles_served: int
    avg_wait_ticks: float
    max_wait_ticks: int
    still_queued: int
    upstream_overflow: int
    green_ticks: int
    green_utilization: float


@dataclass(frozen=True)
class SimStats:
    config: SimConfig
    lanes: tuple[LaneStats, ...]
    total: LaneStats
    decisions: tuple[Decision, ...]

    @property
    def switch_schedule(self) -> list[tuple[int, int, int]]:
        return [(d.tick, d.lane, d.duration) for d in self.decisions]


class Intersection:
    """Mutable simulation state, advanced one tick per :meth:`step`."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.rng = SplitMix64(config.seed)
        self.lanes = [LaneState() for _ in range(4)]
        self.tick = 0
        self.green = 0
        boot = (config.t_thr_ticks if config.mode is Mode.ADAPTIVE
                else config.fixed_period_ticks)
        self.remaining = boot
        self.decisions = [Decision(0, 0, 0, 0, boot)]
        self.wait_sum = [0] * 4
        self.wait_max = [0] * 4
        self.served = [0] * 4
        self.green_ticks = [0] * 4
        self.busy_ticks = [0] * 4

    def step(self):
        t = self.tick
        zone = self.config.detection_distance_ticks
        for lane, p in zip(self.lanes, self.config.arrival_prob):
            if self.rng.next_float() < p:
                lane.arrive(t, zone)

        g = self.green
        lane = self.lanes[g]
        self.green_ticks[g] += 1
        if lane.queue:
            wait = t - lane.discharge()
            lane.admit(zone)
            self.served[g] += 1
            self.busy_ticks[g] += 1
            self.wait_sum[g] += wait
            self.wait_max[g] = max(self.wait_max[g], wait)

        self.remaining -= 1
        if self.remaining == 0:
            nxt = (g + 1) % 4
            plan = controller_decide(self.lanes, nxt, self.config)
            self.decisions.append(
                Decision(t + 1, nxt, plan.n, len(self.lanes[nxt].queue), plan.duration_ticks))
            self.green = nxt
            self.remaining = plan.duration_ticks
        self.tick += 1

    def stats(self) -> SimStats:
        per_lane = []
        for i, lane in enumerate(self.lanes):
            per_lane.append(LaneStats(
                vehicles_arrived=lane.arrived,
                vehicles_served=self.served[i],
                avg_wait_ticks=self.wait_sum[i] / self.served[i] if self.served[i] else 0.0,
                max_wait_ticks=self.wait_max[i],
                still_queued=len(lane.queue),
                upstream_overflow=lane.upstream_overflow,
                green_ticks=self.green_ticks[i],
                green_utilization=self.busy_ticks[i] / self.green_ticks[i] if self.green_ticks[i] else 0.0,
            ))
        served = sum(self.served)
        greens = sum(self.green_ticks)
        total = LaneStats(
            vehicles_arrived=sum(s.vehicles_arrived for s in per_lane),
            vehicles_served=served,
            avg_wait_ticks=sum(self.wait_sum) / served if served else 0.0,
            max_wait_ticks=max(self.wait_max),
            still_queued=sum(s.still_queued for s in per_lane),
            upstream_overflow=sum(s.upstream_overflow for s in per_lane),
            green_ticks=greens,
            green_utilization=sum(self.busy_ticks) / greens if greens else 0.0,
        )
        # the last decision may start beyond the horizon
        decisions = tuple(d for d in self.decisions if d.tick < self.config.horizon_ticks)
        return SimStats(self.config, tuple(per_lane), total, decisions)


def run_simulation(config: SimConfig) -> SimStats:
    sim = Intersection(config)
    for _ in range(config.horizon_ticks):
        sim.step()
    return sim.stats()


@dataclass(frozen=True)
class CompareRow:
    rate: float
    adaptive_avg_wait: float
    fixed_avg_wait: float
    adaptive_max_wait: int
    fixed_max_wait: int


def compare_modes(base: SimConfig, rates: Sequence[float]) -> list[CompareRow]:
    """Run both controllers at each uniform arrival rate with the same seed."""
    if not rates:
        raise InvalidConfig("at least one arrival rate is required")
    rows = []
    for r in rates:
        runs = {}
        for mode in Mode:
            cfg = SimConfig(mode=mode, t_thr_ticks=base.t_thr_ticks,
                            fixed_period_ticks=base.fixed_period_ticks, arrival_prob=r,
                            horizon_ticks=base.horizon_ticks, seed=base.seed,
                            detection_distance_ticks=base.detection_distance_ticks)
            runs[mode] = run_simulation(cfg).total
        a, f = runs[Mode.ADAPTIVE], runs[Mode.FIXED_PERIOD]
        rows.append(CompareRow(float(r), a.avg_wait_ticks, f.avg_wait_ticks,
                               a.max_wait_ticks, f.max_wait_ticks))
    for mode, attr in (("adaptive", "adaptive_avg_wait"), ("fixed", "fixed_avg_wait")):
        ordered = sorted(rows, key=lambda row: row.rate)
        for lo, hi in zip(ordered, ordered[1:]):
            if getattr(hi, attr) < getattr(lo, attr):
                log.warning("%s avg wait drops from %.4f to %.4f between rates %s and %s",
                            mode, getattr(lo, attr), getattr(hi, attr), lo.rate, hi.rate)
    return rows


COMPARE_HEADER = "rate,adaptive_avg_wait,fixed_avg_wait,adaptive_max_wait,fixed_max_wait"
STATS_HEADER = ("lane,vehicles_arrived,vehicles_served,avg_wait_ticks,max_wait_ticks,"
                "still_queued,upstream_overflow,green_ticks,green_utilization")


def compare_csv(rows: Sequence[CompareRow]) -> str:
    out = io.StringIO()
    out.write(COMPARE_HEADER + "\n")
    for r in rows:
        out.write(f"{r.rate:.4f},{r.adaptive_avg_wait:.4f},{r.fixed_avg_wait:.4f},"
                  f"{r.adaptive_max_wait:.4f},{r.fixed_max_wait:.4f}\n")
    return out.getvalue()


def stats_csv(stats: SimStats) -> str:
    out = io.StringIO()
    out.write(STATS_HEADER + "\n")
    named = [(str(i), s) for i, s in enumerate(stats.lanes)] + [("all", stats.total)]
    for name, s in named:
        out.write(f"{name},{s.vehicles_arrived},{s.vehicles_served},{s.avg_wait_ticks:.4f},"
                  f"{s.max_wait_ticks},{s.still_queued},{s.upstream_overflow},"
                  f"{s.green_ticks},{s.green_utilization:.4f}\n")
    return out.getvalue()
