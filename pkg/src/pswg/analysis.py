"""Experiment orchestration and statistical verification.

Everything here is deterministic given its configuration: graph seeds and
source/destination draws are derived from (base_seed, n, seed index) via
numpy SeedSequence, so rerunning a sweep reproduces it byte for byte.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .genmodel import Graph, ModelParams, build_cell_grid, generate
from .geometry import in_annulus, in_disc, torus_distance
from .routing import route_approx_greedy, route_pure_greedy

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "FitReport",
    "CSV_HEADER",
    "run_sweep",
    "records_to_csv",
    "fit_scaling",
    "estimate_annulus_count",
    "estimate_hit_probability",
    "estimate_cdelta_shortcut_probability",
    "shortcut_length_survival",
    "tessellation_occupancy",
    "local_connectivity",
    "graph_seed",
    "lower_bound_threshold",
]

log = logging.getLogger(__name__)

CSV_HEADER = ("n,seed,trial,alpha,c,dbar,s,t,initial_distance,"
              "hops_total,hops_local,hops_shortcut,phases,status")

_ALGORITHMS = {
    "approx_greedy": route_approx_greedy,
    "pure_greedy": route_pure_greedy,
}


@dataclass(frozen=True)
class SweepConfig:
    n_grid: tuple[int, ...]
    alpha: float
    c: float = 4.0
    dbar: float = 1.0
    seeds_per_n: int = 10
    pairs_per_graph: int = 20
    algorithm: str = "approx_greedy"
    hop_budget_factor: float = 10.0
    base_seed: int = 0
    gamma: float | None = None
    delta: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(v) for v in self.n_grid))
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.seeds_per_n < 1 or self.pairs_per_graph < 1:
            raise ValueError("seeds_per_n and pairs_per_graph must be >= 1")
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.delta is not None and not (0 < self.delta < 0.5):
            raise ValueError("delta must lie in (0, 1/2)")


@dataclass
class SweepRecord:
    n: int
    seed: int
    trial: int
    alpha: float
    c: float
    dbar: float
    s: int
    t: int
    initial_distance: float
    hops_total: int
    hops_local: int
    hops_shortcut: int
    phases: int
    status: str


def graph_seed(base_seed: int, n: int, seed_index: int) -> int:
    """Graph RNG seed for one sweep cell, decorrelated across n."""
    ss = np.random.SeedSequence([base_seed, n, seed_index])
    # keep within int64 so the hash kernels accept it directly
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _draw_pair(rng, graph: Graph, max_tries: int = 1000):
    """Uniform (s, t) with torus distance > r_n; short pairs are resampled."""
    n = graph.n_nodes
    rejected = 0
    for _ in range(max_tries):
        s = int(rng.integers(n))
        t = int(rng.integers(n))
        if s != t and torus_distance(graph.L, graph.pos[s], graph.pos[t]) > graph.r_n:
            return s, t, rejected
        rejected += 1
    return None, None, rejected


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """One routing record per (n, seed, trial); deterministic given config."""
    route = _ALGORITHMS[config.algorithm]
    records: list[SweepRecord] = []
    for n in config.n_grid:
        for k in range(config.seeds_per_n):
            gseed = graph_seed(config.base_seed, n, k)
            try:
                params = ModelParams(n=n, c=config.c, alpha=config.alpha,
                                     dbar=config.dbar, seed=gseed)
                graph = generate(params)
            except ValueError as exc:
                log.warning("generation failed for n=%d seed=%d: %s", n, k, exc)
                records.append(SweepRecord(n, k, -1, config.alpha, config.c,
                                           config.dbar, -1, -1, 0.0, 0, 0, 0, 0,
                                           "error"))
                continue
            budget = max(1, int(config.hop_budget_factor * graph.n_nodes))
            rng = np.random.default_rng([config.base_seed, n, k, 1])
            for trial in range(config.pairs_per_graph):
                s, t, rejected = _draw_pair(rng, graph)
                if rejected:
                    log.debug("n=%d seed=%d trial=%d: resampled %d short pairs",
                              n, k, trial, rejected)
                if s is None:
                    records.append(SweepRecord(n, k, trial, config.alpha,
                                               config.c, config.dbar, -1, -1,
                                               0.0, 0, 0, 0, 0, "error"))
                    continue
                res = route(graph, s, t, hop_budget=budget)
                records.append(SweepRecord(
                    n, k, trial, config.alpha, config.c, config.dbar, s, t,
                    res.initial_distance, res.hops_total, res.hops_local,
                    res.hops_shortcut, res.phases, res.status))
    return records


def records_to_csv(records: list[SweepRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(f"{r.n},{r.seed},{r.trial},{r.alpha!r},{r.c!r},{r.dbar!r},"
                     f"{r.s},{r.t},{r.initial_distance!r},{r.hops_total},"
                     f"{r.hops_local},{r.hops_shortcut},{r.phases},{r.status}")
    return "\n".join(lines) + "\n"


@dataclass
class FitReport:
    model: str          # "powerlaw": hops ~ A n^b; "polylog": hops ~ A (ln n)^b
    A: float
    b: float
    residual: float     # RMS residual on the log scale
    ci_b: float         # 1.96 * standard error of b
    n_grid: list[int]

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def mean_hops_by_n(records: list[SweepRecord]) -> dict[int, float]:
    """Mean delivered hop count per n."""
    sums: dict[int, list[float]] = {}
    for r in records:
        if r.status == "delivered":
            sums.setdefault(r.n, []).append(r.hops_total)
    return {n: float(np.mean(v)) for n, v in sorted(sums.items())}


def fit_scaling(records: list[SweepRecord], model: str) -> FitReport:
    """Least squares of log mean-hops against log n or log ln n."""
    if model not in ("powerlaw", "polylog"):
        raise ValueError(f"unknown fit model {model!r}")
    means = mean_hops_by_n(records)
    if len(means) < 4:
        raise ValueError(f"need >= 4 n values with delivered routes, got {len(means)}")
    ns = np.array(sorted(means))
    y = np.log([means[n] for n in ns])
    x = np.log(ns) if model == "powerlaw" else np.log(np.log(ns))
    b, loga = np.polyfit(x, y, 1)
    resid = y - (b * x + loga)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    dof = len(x) - 2
    if dof > 0:
        s2 = float(np.sum(resid ** 2) / dof)
        se_b = math.sqrt(s2 / float(np.sum((x - x.mean()) ** 2)))
    else:
        se_b = 0.0
    return FitReport(model=model, A=float(np.exp(loga)), b=float(b),
                     residual=rms, ci_b=1.96 * se_b, n_grid=[int(v) for v in ns])


def lower_bound_threshold(alpha: float) -> float | None:
    """Theoretical hop-exponent threshold reported next to fits.

    (2 - alpha)/6 below the critical exponent, (alpha - 2)/(2 (alpha - 1))
    above it; None at alpha = 2 where routing is polylogarithmic.
    """
    if alpha < 2:
        return (2 - alpha) / 6
    if alpha > 2:
        return (alpha - 2) / (2 * (alpha - 1))
    return None


# ---------------------------------------------------------------------------
# estimators for the quantitative objects in the scaling arguments
# ---------------------------------------------------------------------------

def estimate_annulus_count(graph: Graph, t, r: float) -> int:
    """Number of nodes in the annulus around point t at scale r."""
    if r <= 0:
        raise ValueError("r must be > 0")
    if graph.n_nodes == 0:
        return 0
    return int(np.count_nonzero(in_annulus(graph.L, np.asarray(t, float), r, graph.pos)))


def _has_shortcut_into(graph: Graph, x: int, member: np.ndarray) -> bool:
    nb = graph.shortcut_neighbors(x)
    return bool(np.any(member[nb])) if nb.size else False


@dataclass
class HitProbabilityEstimate:
    empirical: float      # fraction of sampled nodes with a shortcut into A(t, r)
    lower_bound: float    # 1 - (1 - 4 a_n / (9 r^2))^{N_A} at the realised N_A
    n_samples: int
    annulus_count: int


def estimate_hit_probability(graph: Graph, t, r: float, sample_nodes) -> HitProbabilityEstimate:
    """Empirical shortcut-hit probability for nodes in the bracket (r/2, r]."""
    sample_nodes = np.asarray(sample_nodes, dtype=np.int64)
    if sample_nodes.size == 0:
        raise ValueError("no sample nodes given")
    tpos = np.asarray(t, dtype=np.float64)
    d = torus_distance(graph.L, graph.pos[sample_nodes], tpos)
    if np.any((d <= r / 2) | (d > r)):
        raise ValueError("sample nodes must satisfy r/2 < dist(x, t) <= r")
    member = np.zeros(graph.n_nodes, dtype=bool)
    member[in_annulus(graph.L, tpos, r, graph.pos)] = True
    hits = sum(_has_shortcut_into(graph, int(x), member) for x in sample_nodes)
    n_a = int(np.count_nonzero(member))
    base = 1.0 - 4.0 * graph.params.a_n / (9.0 * r * r)
    bound = 1.0 - base ** n_a
    return HitProbabilityEstimate(empirical=hits / sample_nodes.size,
                                  lower_bound=bound,
                                  n_samples=int(sample_nodes.size),
                                  annulus_count=n_a)


@dataclass
class CdeltaEstimate:
    empirical: float     # fraction of sampled nodes with a shortcut into C_delta
    upper_bound: float   # 16 dbar n^{(4 delta + alpha - 2)/2}
    n_samples: int
    disc_count: int
    disc_radius: float


def estimate_cdelta_shortcut_probability(graph: Graph, t, delta: float,
                                         sample_nodes) -> CdeltaEstimate:
    """Probability of a shortcut into the disc of radius n^delta around t."""
    if not (0 < delta < 0.5):
        raise ValueError("delta must lie in (0, 1/2)")
    sample_nodes = np.asarray(sample_nodes, dtype=np.int64)
    if sample_nodes.size == 0:
        raise ValueError("no sample nodes given")
    p = graph.params
    radius = p.n ** delta
    tpos = np.asarray(t, dtype=np.float64)
    d = torus_distance(graph.L, graph.pos[sample_nodes], tpos)
    if np.any(d <= radius):
        raise ValueError("sample nodes must lie outside C_delta")
    member = np.zeros(graph.n_nodes, dtype=bool)
    if graph.n_nodes:
        member[in_disc(graph.L, tpos, radius, graph.pos)] = True
    hits = sum(_has_shortcut_into(graph, int(x), member) for x in sample_nodes)
    bound = 16.0 * p.dbar * p.n ** ((4 * delta + p.alpha - 2) / 2)
    return CdeltaEstimate(empirical=hits / sample_nodes.size, upper_bound=bound,
                          n_samples=int(sample_nodes.size),
                          disc_count=int(np.count_nonzero(member)),
                          disc_radius=radius)


def shortcut_lengths(graph: Graph) -> np.ndarray:
    e = graph.shortcut_edges
    if e.shape[0] == 0:
        return np.empty(0, dtype=np.float64)
    return np.asarray(torus_distance(graph.L, graph.pos[e[:, 0]], graph.pos[e[:, 1]]))


def shortcut_length_survival(graph: Graph, n_points: int = 32) -> list[tuple[float, float]]:
    """(r, P(length > r)) on a log-spaced grid in (r_n, R]."""
    lengths = shortcut_lengths(graph)
    if lengths.size == 0:
        raise ValueError("graph has no shortcuts")
    grid = np.geomspace(graph.r_n, graph.params.R, n_points + 1)[1:]
    return [(float(r), float(np.mean(lengths > r))) for r in grid]


def tessellation_occupancy(graph: Graph, beta: float) -> tuple[int, int]:
    """(total_cells, empty_cells) for a tessellation of side ~ beta * r_n."""
    if not (0 < beta <= 1):
        raise ValueError("beta must lie in (0, 1]")
    grid = build_cell_grid(graph.pos, graph.L, beta * graph.r_n)
    counts = np.diff(grid.start)
    return int(grid.n_cells), int(np.count_nonzero(counts == 0))


def local_connectivity(graph: Graph) -> tuple[bool, float]:
    """Connectivity of the local-edge graph and its largest component share."""
    n = graph.n_nodes
    if n <= 1:
        return True, 1.0
    e = graph.local_edges
    adj = scipy.sparse.coo_matrix(
        (np.ones(e.shape[0], dtype=np.int8), (e[:, 0], e[:, 1])), shape=(n, n))
    ncomp, labels = scipy.sparse.csgraph.connected_components(adj, directed=False)
    largest = int(np.bincount(labels).max())
    return ncomp == 1, largest / n
