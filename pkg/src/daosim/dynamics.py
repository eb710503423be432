"""Binary standard-adoption dynamics on a weighted network.

Each agent holds standard A or B. Given the weighted share of its
neighbourhood on each standard, an A-agent moves to B when the A-share drops
strictly below ``1 - q - c_A`` and a B-agent moves to A when the B-share drops
strictly below ``q - c_B``. Agents without neighbours never switch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from daosim.errors import ValidationError
from daosim.graph import Network, weighted_degree

MAX_SEED = 2**64


class Standard(str, enum.Enum):
    A = "A"
    B = "B"

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Standard):
            return NotImplemented
        return self.value < other.value

    @property
    def other(self) -> Standard:
        return Standard.B if self is Standard.A else Standard.A


A = Standard.A
B = Standard.B


@dataclass(frozen=True)
class StateVector:
    states: tuple[Standard, ...]
    t: int = 0

    def __post_init__(self) -> None:
        states = tuple(self.states)
        if not all(type(s) is Standard for s in states):
            states = tuple(Standard(s) for s in states)
        object.__setattr__(self, "states", states)
        if self.t < 0:
            raise ValidationError(f"time step must be non-negative, got {self.t}")

    def __len__(self) -> int:
        return len(self.states)

    def __str__(self) -> str:
        return "".join(s.value for s in self.states)

    def count(self, s: Standard) -> int:
        return self.states.count(s)

    def swapped(self) -> StateVector:
        return StateVector(tuple(s.other for s in self.states), self.t)


def parse_states(text: str, t: int = 0) -> StateVector:
    """Parse a compact ``"ABBA"`` string or one-state-per-line text."""
    tokens = "".join(text.split())
    if not tokens:
        raise ValidationError("empty state description")
    bad = sorted(set(tokens) - {"A", "B"})
    if bad:
        raise ValidationError(f"invalid state symbol(s) {bad}; expected 'A' or 'B'")
    return StateVector(tuple(Standard(c) for c in tokens), t)


class Schedule(str, enum.Enum):
    SYNCHRONOUS = "synchronous"
    ASYNCHRONOUS = "asynchronous_random_sequential"


@dataclass(frozen=True)
class DynamicsParams:
    q: float
    c_A: float = 0.0
    c_B: float = 0.0
    schedule: Schedule = Schedule.SYNCHRONOUS
    max_steps: int = 1000
    isolated_policy: str = "hold"

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedule", Schedule(self.schedule))
        if not (0.0 <= self.q <= 1.0):
            raise ValidationError(f"q must lie in [0, 1], got {self.q!r}")
        if not (self.c_A >= 0.0 and math.isfinite(self.c_A)):
            raise ValidationError(f"c_A must be a finite value >= 0, got {self.c_A!r}")
        if not (self.c_B >= 0.0 and math.isfinite(self.c_B)):
            raise ValidationError(f"c_B must be a finite value >= 0, got {self.c_B!r}")
        if not isinstance(self.max_steps, int) or self.max_steps < 1:
            raise ValidationError(f"max_steps must be a positive integer, got {self.max_steps!r}")
        if self.isolated_policy != "hold":
            raise ValidationError(f"isolated_policy must be 'hold', got {self.isolated_policy!r}")

    @property
    def threshold_A(self) -> float:
        """A-agents switch when their A-share falls strictly below this."""
        return 1 - self.q - self.c_A

    @property
    def threshold_B(self) -> float:
        """B-agents switch when their B-share falls strictly below this."""
        return self.q - self.c_B


class PerformanceMeasure(str, enum.Enum):
    INDICATOR_A = "indicator_A"
    INDICATOR_B = "indicator_B"

    def g(self, s: Standard) -> int:
        target = Standard.A if self is PerformanceMeasure.INDICATOR_A else Standard.B
        return 1 if s is target else 0


class Termination(str, enum.Enum):
    FIXED_POINT = "fixed_point"
    CYCLE = "cycle"
    MAX_STEPS = "max_steps_reached"


@dataclass
class Trajectory:
    history: list[StateVector]
    termination: Termination
    period: int | None = None
    performance_series: list[float] = field(default_factory=list)

    @property
    def final(self) -> StateVector:
        return self.history[-1]

    @property
    def steps(self) -> int:
        return len(self.history) - 1

    def summary(self) -> dict:
        return {
            "termination": self.termination.value,
            "period": self.period,
            "steps": self.steps,
            "final_C": self.performance_series[-1],
            "final_state": str(self.final),
        }

    def to_csv(self) -> str:
        lines = ["t,agent_id,state"]
        for sv in self.history:
            lines.extend(f"{sv.t},{i},{s.value}" for i, s in enumerate(sv.states))
        return "\n".join(lines) + "\n"


def _share(network: Network, states: Sequence[Standard], i: int, s: Standard) -> float:
    adj = network._adj[i]
    return math.fsum(w for j, w in adj if states[j] is s) / network._degree[i]


def neighborhood_share(network: Network, states: StateVector, i: int, s: Standard) -> float:
    """Weighted fraction of agent ``i``'s neighbourhood currently on standard ``s``."""
    _check_length(network, states)
    if weighted_degree(network, i) == 0:
        raise ValidationError(f"undefined share for isolated agent {i}")
    return _share(network, states.states, i, Standard(s))


def _new_state(network: Network, states: Sequence[Standard], i: int, thr_a: float, thr_b: float) -> Standard:
    cur = states[i]
    if not network._adj[i]:
        return cur
    if cur is A:
        return B if _share(network, states, i, A) < thr_a else cur
    return A if _share(network, states, i, B) < thr_b else cur


def step_sync(network: Network, states: StateVector, params: DynamicsParams) -> StateVector:
    """Update every agent simultaneously from the previous state vector."""
    _check_length(network, states)
    old = states.states
    thr_a, thr_b = params.threshold_A, params.threshold_B
    new = tuple(_new_state(network, old, i, thr_a, thr_b) for i in range(network.n))
    return StateVector(new, states.t + 1)


def step_sequential(
    network: Network, states: StateVector, params: DynamicsParams, order: Sequence[int]
) -> StateVector:
    """Update agents one at a time in ``order``; later agents see earlier updates."""
    _check_length(network, states)
    if sorted(order) != list(range(network.n)):
        raise ValidationError("order must be a permutation of the agent ids")
    cur = list(states.states)
    thr_a, thr_b = params.threshold_A, params.threshold_B
    for i in order:
        cur[i] = _new_state(network, cur, int(i), thr_a, thr_b)
    return StateVector(tuple(cur), states.t + 1)


def step_async(
    network: Network, states: StateVector, params: DynamicsParams, rng: np.random.Generator
) -> StateVector:
    """Random-sequential sweep: one uniformly random permutation drawn from ``rng``."""
    _check_length(network, states)
    order = rng.permutation(network.n).tolist()
    return step_sequential(network, states, params, order)


def global_performance(
    states: StateVector, measure: PerformanceMeasure = PerformanceMeasure.INDICATOR_A
) -> float:
    if len(states) == 0:
        raise ValidationError("global performance of an empty state vector is undefined")
    measure = PerformanceMeasure(measure)
    return sum(measure.g(s) for s in states.states) / len(states)


def run(
    network: Network,
    init: StateVector,
    params: DynamicsParams,
    seed: int = 0,
    measure: PerformanceMeasure = PerformanceMeasure.INDICATOR_A,
) -> Trajectory:
    """Iterate the scheduled step until a fixed point, a revisited state, or ``max_steps``.

    A revisited state ends the run as ``cycle`` with the gap as its period;
    under the asynchronous schedule the revisit is reported the same way even
    though the next permutation may leave the loop.
    """
    _check_length(network, init)
    check_seed(seed)
    rng = np.random.default_rng(seed)
    current = StateVector(init.states, 0)
    history = [current]
    perf = [global_performance(current, measure)]
    seen = {current.states: 0}
    for t in range(1, params.max_steps + 1):
        if params.schedule is Schedule.SYNCHRONOUS:
            nxt = step_sync(network, current, params)
        else:
            nxt = step_async(network, current, params, rng)
        history.append(nxt)
        perf.append(global_performance(nxt, measure))
        if nxt.states == current.states:
            return Trajectory(history, Termination.FIXED_POINT, None, perf)
        if nxt.states in seen:
            return Trajectory(history, Termination.CYCLE, t - seen[nxt.states], perf)
        seen[nxt.states] = t
        current = nxt
    return Trajectory(history, Termination.MAX_STEPS, None, perf)


def check_seed(seed: int) -> None:
    if not isinstance(seed, (int, np.integer)) or not (0 <= seed < MAX_SEED):
        raise ValidationError(f"seed must be an integer in [0, 2**64), got {seed!r}")


def _check_length(network: Network, states: StateVector) -> None:
    if len(states) != network.n:
        raise ValidationError(f"state vector has length {len(states)} but network has {network.n} agents")
