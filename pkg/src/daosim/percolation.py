"""Same-state clusters, consensus/fork classification and parameter sweeps."""

from __future__ import annotations

import enum
import html
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from daosim.dynamics import (
    DynamicsParams,
    Schedule,
    Standard,
    StateVector,
    Termination,
    Trajectory,
    check_seed,
    run,
)
from daosim.errors import ValidationError
from daosim.graph import Network, NetworkSpec, generate_network

MASK64 = (1 << 64) - 1
DOMINANCE_THRESHOLD = 0.5

SWEEP_COLUMNS = ("q", "c_A", "c_B", "replica", "outcome", "final_C", "steps", "largest_A_frac", "largest_B_frac")


@dataclass(frozen=True)
class Cluster:
    standard: Standard
    members: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClusterReport:
    clusters: tuple[Cluster, ...]
    largest_A_fraction: float
    largest_B_fraction: float

    def percolating(self, threshold: float = DOMINANCE_THRESHOLD) -> list[Standard]:
        """Standards whose largest cluster covers at least ``threshold`` of the agents."""
        out = []
        if self.largest_A_fraction >= threshold:
            out.append(Standard.A)
        if self.largest_B_fraction >= threshold:
            out.append(Standard.B)
        return out


def same_state_clusters(network: Network, states: StateVector) -> ClusterReport:
    """Connected components of the subgraphs induced by each standard."""
    n = network.n
    if len(states) != n:
        raise ValidationError(f"state vector has length {len(states)} but network has {n} agents")
    s = states.states
    kept = [(i, j) for i, j, _ in network.edges if s[i] is s[j]]
    rows = np.fromiter((e[0] for e in kept), dtype=np.int64, count=len(kept))
    cols = np.fromiter((e[1] for e in kept), dtype=np.int64, count=len(kept))
    graph = coo_matrix((np.ones(len(kept)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    groups: dict[int, list[int]] = {}
    for agent, label in enumerate(labels.tolist()):
        groups.setdefault(label, []).append(agent)
    clusters = sorted(
        (Cluster(s[members[0]], frozenset(members)) for members in groups.values()),
        key=lambda c: (c.standard.value, min(c.members)),
    )
    largest = {Standard.A: 0, Standard.B: 0}
    for c in clusters:
        largest[c.standard] = max(largest[c.standard], c.size)
    return ClusterReport(tuple(clusters), largest[Standard.A] / n, largest[Standard.B] / n)


class OutcomeClass(str, enum.Enum):
    CONSENSUS_A = "consensus_A"
    CONSENSUS_B = "consensus_B"
    FORK = "fork"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Outcome:
    outcome: OutcomeClass
    cluster_report: ClusterReport
    termination: Termination


def classify_outcome(network: Network, trajectory: Trajectory) -> Outcome:
    final = trajectory.final
    report = same_state_clusters(network, final)
    if trajectory.termination is Termination.MAX_STEPS:
        cls = OutcomeClass.UNDECIDED
    else:
        if trajectory.termination is Termination.CYCLE:
            window = trajectory.history[-(trajectory.period + 1):]
        else:
            window = [final]
        present = {s for sv in window for s in sv.states}
        if present == {Standard.A}:
            cls = OutcomeClass.CONSENSUS_A
        elif present == {Standard.B}:
            cls = OutcomeClass.CONSENSUS_B
        else:
            cls = OutcomeClass.FORK
    return Outcome(cls, report, trajectory.termination)


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *parts: int) -> int:
    """Fold ``parts`` into ``base_seed`` with splitmix64; order-sensitive and 64-bit."""
    h = splitmix64(base_seed & MASK64)
    for p in parts:
        h = splitmix64(h ^ (p & MASK64))
    return h


# stream tags keep network, initial-state and scheduler draws independent
_NETWORK_STREAM = 1
_INIT_STREAM = 2
_RUN_STREAM = 3


@dataclass(frozen=True)
class SweepSpec:
    network: NetworkSpec | Network
    q_grid: tuple[float, ...]
    c_A_grid: tuple[float, ...] = (0.0,)
    c_B_grid: tuple[float, ...] = (0.0,)
    rho: float = 0.5
    replicas: int = 1
    base_seed: int = 0
    schedule: Schedule = Schedule.SYNCHRONOUS
    max_steps: int = 1000

    def __post_init__(self) -> None:
        for name in ("q_grid", "c_A_grid", "c_B_grid"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    def validate(self) -> None:
        for name in ("q_grid", "c_A_grid", "c_B_grid"):
            if not getattr(self, name):
                raise ValidationError(f"{name}: must contain at least one value")
        for q, ca, cb in self.cells():
            DynamicsParams(q, ca, cb, self.schedule, self.max_steps)
        if not (0.0 <= self.rho <= 1.0):
            raise ValidationError(f"rho: must lie in [0, 1], got {self.rho!r}")
        if not isinstance(self.replicas, int) or self.replicas < 1:
            raise ValidationError(f"replicas: must be a positive integer, got {self.replicas!r}")
        check_seed(self.base_seed)
        if isinstance(self.network, NetworkSpec):
            self.network.validate()

    def cells(self) -> list[tuple[float, float, float]]:
        return list(itertools.product(self.q_grid, self.c_A_grid, self.c_B_grid))


@dataclass(frozen=True)
class SweepRow:
    q: float
    c_A: float
    c_B: float
    replica: int
    outcome: OutcomeClass
    final_C: float
    steps: int
    largest_A_frac: float
    largest_B_frac: float


@dataclass
class SweepTable:
    rows: list[SweepRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(SWEEP_COLUMNS) + "\n")
        for r in self.rows:
            buf.write(
                f"{r.q!r},{r.c_A!r},{r.c_B!r},{r.replica},{r.outcome.value},"
                f"{r.final_C!r},{r.steps},{r.largest_A_frac!r},{r.largest_B_frac!r}\n"
            )
        return buf.getvalue()

    def fork_frequency(self) -> dict[tuple[float, float, float], float]:
        counts: dict[tuple[float, float, float], list[int]] = {}
        for r in self.rows:
            c = counts.setdefault((r.q, r.c_A, r.c_B), [0, 0])
            c[0] += r.outcome is OutcomeClass.FORK
            c[1] += 1
        return {k: forks / total for k, (forks, total) in counts.items()}

    def to_svg(self, cell_size: int = 40) -> str:
        """Heatmap of fork frequency: columns are q values, rows are (c_A, c_B) pairs."""
        freq = self.fork_frequency()
        qs = sorted({k[0] for k in freq})
        costs = sorted({(k[1], k[2]) for k in freq})
        left, top = 110, 30
        width = left + cell_size * len(qs) + 10
        height = top + cell_size * len(costs) + 30
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'font-family="sans-serif" font-size="10">',
            f'<text x="{left}" y="15">fork frequency (white = 0, red = 1)</text>',
        ]
        for col, q in enumerate(qs):
            x = left + col * cell_size
            out.append(f'<text x="{x + cell_size // 2}" y="{height - 10}" text-anchor="middle">q={q:g}</text>')
        for row, (ca, cb) in enumerate(costs):
            y = top + row * cell_size
            out.append(f'<text x="{left - 5}" y="{y + cell_size // 2}" text-anchor="end">cA={ca:g} cB={cb:g}</text>')
            for col, q in enumerate(qs):
                x = left + col * cell_size
                f = freq.get((q, ca, cb))
                if f is None:
                    continue
                shade = round(255 * (1 - f))
                title = html.escape(f"q={q!r} c_A={ca!r} c_B={cb!r} fork_frequency={f!r}")
                out.append(
                    f'<rect x="{x}" y="{y}" width="{cell_size}" height="{cell_size}" '
                    f'fill="rgb(255,{shade},{shade})" stroke="#888"><title>{title}</title></rect>'
                )
        out.append("</svg>")
        return "\n".join(out) + "\n"


@lru_cache(maxsize=64)
def _generated(net_spec: NetworkSpec, seed: int) -> Network:
    return generate_network(net_spec, seed)


def _network_for(spec: SweepSpec, replica: int) -> Network:
    if isinstance(spec.network, Network):
        return spec.network
    return _generated(spec.network, derive_seed(spec.base_seed, _NETWORK_STREAM, replica))


def _run_task(args: tuple[SweepSpec, int, int]) -> SweepRow:
    spec, cell_index, replica = args
    q, ca, cb = spec.cells()[cell_index]
    network = _network_for(spec, replica)
    init_rng = np.random.default_rng(derive_seed(spec.base_seed, _INIT_STREAM, cell_index, replica))
    draws = init_rng.random(network.n) < spec.rho
    init = StateVector(tuple(Standard.A if d else Standard.B for d in draws.tolist()))
    params = DynamicsParams(q, ca, cb, spec.schedule, spec.max_steps)
    traj = run(network, init, params, derive_seed(spec.base_seed, _RUN_STREAM, cell_index, replica))
    outcome = classify_outcome(network, traj)
    return SweepRow(
        q, ca, cb, replica, outcome.outcome,
        traj.performance_series[-1], traj.steps,
        outcome.cluster_report.largest_A_fraction, outcome.cluster_report.largest_B_fraction,
    )


def sweep(spec: SweepSpec, jobs: int = 1) -> SweepTable:
    """Run every (cell, replica) pair; rows come back ordered by cell index, then replica.

    Replica ``r`` uses the same generated network in every cell. ``jobs > 1``
    fans tasks out over a process pool without changing the output.
    """
    spec.validate()
    tasks = [(spec, c, r) for c in range(len(spec.cells())) for r in range(spec.replicas)]
    jobs = max(1, min(jobs, len(tasks)))
    if jobs == 1:
        rows = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return SweepTable(rows)
