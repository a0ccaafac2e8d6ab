"""Decentralised routing on a sampled graph.

`route_approx_greedy` implements the annulus-seeking algorithm: the message
carries a radius r (initially the source-destination distance); a node
forwards along a shortcut into the annulus C(t, r/2) \\ C(t, r/4) when it
has one, and otherwise to its local contact closest to the destination.
On arrival the radius is halved while the new distance is <= r/2, which
keeps the bracket r/2 < dist(x, t) <= r true at every visited node.

`route_pure_greedy` is the contrast baseline: always move to the neighbour
(local or shortcut) strictly closest to the destination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .genmodel import Graph
from .geometry import torus_distance

__all__ = [
    "RouteResult",
    "RoutingInvariantError",
    "route_approx_greedy",
    "route_pure_greedy",
    "has_closer_local_contact",
    "replay_path",
]

DELIVERED = "delivered"
DEAD_END = "dead_end"
BUDGET_EXHAUSTED = "budget_exhausted"


class RoutingInvariantError(RuntimeError):
    """An internal routing invariant failed; indicates a bug, not a dead end."""


@dataclass
class RouteResult:
    path: list[int]
    hops_total: int
    hops_local: int
    hops_shortcut: int
    phases: int
    per_phase_local_hops: list[int]
    status: str
    initial_distance: float
    trace: list[str] | None = field(default=None, repr=False)


def _searchsorted_contains(sorted_ids: np.ndarray, t: int) -> bool:
    k = np.searchsorted(sorted_ids, t)
    return k < sorted_ids.size and sorted_ids[k] == t


def _pick_closest(ids: np.ndarray, dists: np.ndarray) -> int:
    """Index of the minimum distance; ties go to the smallest node id."""
    k = int(np.argmin(dists))
    best = dists[k]
    ties = np.flatnonzero(dists == best)
    if ties.size > 1:
        k = ties[int(np.argmin(ids[ties]))]
    return int(k)


def _route(graph: Graph, s: int, t: int, hop_budget: int | None,
           greedy: bool, check_invariants: bool, collect_trace: bool) -> RouteResult:
    n = graph.n_nodes
    if not (0 <= s < n and 0 <= t < n):
        raise ValueError(f"invalid node ids s={s}, t={t} for graph with {n} nodes")
    if hop_budget is None:
        hop_budget = max(1, 10 * n)
    if hop_budget < 1:
        raise ValueError("hop_budget must be >= 1")

    L = graph.L
    r_n = graph.r_n
    tpos = graph.pos[t]
    trace: list[str] | None = [] if collect_trace else None

    if s == t:
        return RouteResult([s], 0, 0, 0, 0, [0], DELIVERED, 0.0, trace)

    r0 = float(torus_distance(L, graph.pos[s], tpos))
    r = r0
    x = s
    d_x = r0
    path = [s]
    hops = hops_local = hops_shortcut = 0
    phases = 0
    per_phase = [0]
    status = BUDGET_EXHAUSTED

    while hops < hop_budget:
        if check_invariants and r > r_n and not (r / 2 < d_x <= r):
            raise RoutingInvariantError(
                f"radius bracket broken at node {x}: d={d_x!r}, r={r!r}")

        local = graph.local_neighbors(x)
        shortcuts = graph.shortcut_neighbors(x)

        # direct delivery over any link takes precedence
        if _searchsorted_contains(local, t):
            y, kind = t, "local"
        elif _searchsorted_contains(shortcuts, t):
            y, kind = t, "shortcut"
        else:
            y = -1
            if not greedy and shortcuts.size:
                sd = torus_distance(L, graph.pos[shortcuts], tpos)
                mask = (sd > r / 4) & (sd <= r / 2)
                if np.any(mask):
                    ids = shortcuts[mask]
                    y = int(ids[_pick_closest(ids, sd[mask])])
                    kind = "shortcut"
            if greedy:
                cand = np.concatenate([local, shortcuts])
                if cand.size:
                    cd = torus_distance(L, graph.pos[cand], tpos)
                    mask = cd < d_x
                    if np.any(mask):
                        ids = cand[mask]
                        y = int(ids[_pick_closest(ids, cd[mask])])
                        kind = "local" if graph.has_local(x, y) else "shortcut"
            elif y < 0 and local.size:
                ld = torus_distance(L, graph.pos[local], tpos)
                mask = ld < d_x
                if np.any(mask):
                    ids = local[mask]
                    y = int(ids[_pick_closest(ids, ld[mask])])
                    kind = "local"
            if y < 0:
                status = DEAD_END
                break

        d_y = float(torus_distance(L, graph.pos[y], tpos))
        if check_invariants:
            if kind == "local" and not (d_y < d_x):
                raise RoutingInvariantError(
                    f"local hop {x}->{y} did not decrease distance to t")
            if not greedy and kind == "shortcut" and y != t and not (r / 4 < d_y <= r / 2):
                raise RoutingInvariantError(
                    f"shortcut hop {x}->{y} landed outside the annulus")

        hops += 1
        if kind == "local":
            hops_local += 1
            per_phase[-1] += 1
        else:
            hops_shortcut += 1
        path.append(y)
        r_before = r

        if y == t:
            status = DELIVERED
            if trace is not None:
                trace.append(f"{hops - 1} {x} {y} {kind} {r_before!r} {r!r} {d_y!r}")
            break

        # halve while the arrival lies inside the inner half-disc; stop once
        # r drops to the local scale (delivery is then one hop away)
        while d_y <= r / 2 and r > r_n:
            r /= 2
            phases += 1
            per_phase.append(0)
        if trace is not None:
            trace.append(f"{hops - 1} {x} {y} {kind} {r_before!r} {r!r} {d_y!r}")
        x = y
        d_x = d_y

    if check_invariants and status == DELIVERED:
        if hops != len(path) - 1 or hops != hops_local + hops_shortcut:
            raise RoutingInvariantError("hop accounting inconsistent")
        if hops > n:
            raise RoutingInvariantError("delivered route longer than node count")
        if r0 > r_n and phases > math.log2(r0 / r_n) + 1:
            raise RoutingInvariantError(
                f"too many phases: {phases} > log2(r0/r_n) + 1")

    return RouteResult(path, hops, hops_local, hops_shortcut, phases,
                       per_phase, status, r0, trace)


def route_approx_greedy(graph: Graph, s: int, t: int, hop_budget: int | None = None,
                        check_invariants: bool = True, collect_trace: bool = False) -> RouteResult:
    """Annulus-seeking routing; see module docstring for the hop rule."""
    return _route(graph, s, t, hop_budget, greedy=False,
                  check_invariants=check_invariants, collect_trace=collect_trace)


def route_pure_greedy(graph: Graph, s: int, t: int, hop_budget: int | None = None,
                      check_invariants: bool = True, collect_trace: bool = False) -> RouteResult:
    """Move to the strictly closest neighbour at every step (baseline).

    The carried radius is still halved on the same rule purely for phase
    instrumentation; it never influences the next-hop choice.
    """
    return _route(graph, s, t, hop_budget, greedy=True,
                  check_invariants=check_invariants, collect_trace=collect_trace)


def has_closer_local_contact(graph: Graph, x: int, t, radius_inclusive: bool = True) -> bool:
    """Does node x have a contact within r_n that is strictly closer to t?

    `t` is an arbitrary torus point (not necessarily a node).  The contact
    ball is closed (<= r_n) by default, matching the property's definition;
    pass radius_inclusive=False to use the open ball that defines local
    edges (the two differ only on a measure-zero boundary).
    """
    tpos = np.asarray(t, dtype=np.float64)
    d_xt = float(torus_distance(graph.L, graph.pos[x], tpos))
    if d_xt < graph.r_n:
        raise ValueError(f"node {x} is within r_n of t (d={d_xt:.6g}); "
                         "property only defined for distant nodes")
    cand = graph.grid().nodes_near(graph.pos[x, 0], graph.pos[x, 1], graph.r_n)
    cand = cand[cand != x]
    if cand.size == 0:
        return False
    d_cx = torus_distance(graph.L, graph.pos[cand], graph.pos[x])
    near = d_cx <= graph.r_n if radius_inclusive else d_cx < graph.r_n
    cand = cand[near]
    if cand.size == 0:
        return False
    d_ct = torus_distance(graph.L, graph.pos[cand], tpos)
    return bool(np.any(d_ct < d_xt))


def replay_path(graph: Graph, path: list[int]) -> bool:
    """True iff consecutive path nodes are adjacent (local or shortcut)."""
    for u, v in zip(path, path[1:]):
        if not (graph.has_local(u, v) or graph.has_shortcut(u, v)):
            return False
    return True
