"""Random graph model: Poisson points on a torus, dense local edges within
radius r_n = sqrt(c ln n), and power-law shortcuts with kernel
min(a_n * d^-alpha, 1) between nodes farther than r_n apart.

The normalisation constant a_n is calibrated so the expected number of
shortcuts incident to a node equals `dbar`, by equating the continuum
integral of the kernel over the eligible range [r_n, R], R = sqrt(n)/2.

Shortcut randomness is a deterministic hash of (seed, node pair), so the
reference O(N^2) sampler and the cell-accelerated sampler return the same
edge set exactly, not just in distribution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import pair_uniform, pair_uniform_array

__all__ = [
    "ModelParams",
    "PairRandomness",
    "CellGrid",
    "Graph",
    "GraphFormatError",
    "compute_a_n",
    "sample_points",
    "build_cell_grid",
    "build_local_edges",
    "sample_shortcuts_exact",
    "sample_shortcuts_fast",
    "generate",
    "save_graph",
    "load_graph",
    "dumps_graph",
    "loads_graph",
]

_CONNECTIVITY_C = 1.0 / math.pi


def _torus_kernel_mass(n: float, r_n: float, alpha: float) -> float:
    """Integral of d^-alpha over the torus at distances in (r_n, L/sqrt(2)].

    Up to L/2 the circle of radius x has full perimeter 2 pi x; beyond it
    four arcs of half-angle arccos(L/(2x)) leave the fundamental square, so
    the perimeter drops to 2 pi x - 8 x arccos(L/(2x)) and vanishes at the
    torus diameter L/sqrt(2).
    """
    import scipy.integrate

    L = math.sqrt(n)
    if alpha == 2.0:
        inner = 2.0 * math.pi * math.log(L / (2.0 * r_n))
    else:
        inner = 2.0 * math.pi * ((L / 2.0) ** (2.0 - alpha) - r_n ** (2.0 - alpha)) / (2.0 - alpha)

    def corner(x):
        return x ** (1.0 - alpha) * (2.0 * math.pi - 8.0 * math.acos(L / (2.0 * x)))

    outer, _ = scipy.integrate.quad(corner, L / 2.0, L / math.sqrt(2.0))
    return inner + outer


def compute_a_n(n: float, c: float, alpha: float, dbar: float,
                degree_convention: str = "incident",
                upper: float | None = None,
                geometry: str = "planar") -> float:
    """Normalisation constant making the expected incident shortcut degree dbar.

    geometry="planar" solves the reference calibration
    dbar = integral_{r_n}^{R} a x^-alpha 2 pi x dx with R = sqrt(n)/2 (or
    `upper`), which treats every distance circle as complete.  On the torus
    node pairs exist out to L/sqrt(2) > R, so the planar constant overshoots
    the realised degree by several percent at alpha <= 2; geometry="torus"
    integrates the exact torus distance profile instead and is what graph
    generation uses by default.

    With degree_convention="generated" the constant is doubled, so that the
    expected number of shortcuts *generated* per node (half the incident
    count) equals dbar instead.
    """
    R = upper if upper is not None else math.sqrt(n) / 2.0
    r_n = math.sqrt(c * math.log(n))
    if r_n >= R:
        raise ValueError(
            f"shortcut range empty: r_n={r_n:.6g} >= R={R:.6g} (n too small for c)")
    if geometry == "planar":
        if alpha == 2.0:
            a = dbar / (2.0 * math.pi * math.log(R / r_n))
        else:
            a = dbar * (2.0 - alpha) / (2.0 * math.pi * (R ** (2.0 - alpha) - r_n ** (2.0 - alpha)))
    elif geometry == "torus":
        a = dbar / _torus_kernel_mass(n, r_n, alpha)
    else:
        raise ValueError(f"unknown calibration geometry: {geometry!r}")
    if degree_convention == "generated":
        a *= 2.0
    elif degree_convention != "incident":
        raise ValueError(f"unknown degree convention: {degree_convention!r}")
    return a


@dataclass(frozen=True)
class ModelParams:
    """All model constants; derived quantities are exposed as properties.

    n      expected node count (Poisson intensity 1 on [0, sqrt(n)]^2)
    c      local radius constant, r_n = sqrt(c ln n)
    alpha  shortcut kernel exponent (>= 0)
    dbar   target expected incident shortcut degree
    seed   64-bit seed driving both point and shortcut randomness
    """

    n: float
    c: float
    alpha: float
    dbar: float
    seed: int
    degree_convention: str = "incident"
    calibration: str = "torus"
    calibration_upper: float | None = None

    def __post_init__(self):
        if self.n < 16:
            raise ValueError("n must be >= 16")
        if self.c <= 0 or self.dbar <= 0 or self.alpha < 0:
            raise ValueError("require c > 0, dbar > 0, alpha >= 0")
        # raises "shortcut range empty" when r_n >= R
        a_n = compute_a_n(self.n, self.c, self.alpha, self.dbar,
                          self.degree_convention, self.calibration_upper,
                          self.calibration)
        object.__setattr__(self, "_a_n", a_n)
        if self.c <= _CONNECTIVITY_C:
            warnings.warn(
                f"c={self.c:.4g} <= 1/pi: the local graph may be disconnected",
                stacklevel=2)

    @property
    def L(self) -> float:
        return math.sqrt(self.n)

    @property
    def r_n(self) -> float:
        return math.sqrt(self.c * math.log(self.n))

    @property
    def R(self) -> float:
        return self.calibration_upper if self.calibration_upper is not None else math.sqrt(self.n) / 2.0

    @property
    def a_n(self) -> float:
        return self._a_n


@dataclass(frozen=True)
class PairRandomness:
    """Deterministic map (seed, i, j) -> uniform in [0, 1), i-j symmetric."""

    seed: int

    def u(self, i: int, j: int) -> float:
        return pair_uniform(self.seed, i, j)

    def u_array(self, i, j) -> np.ndarray:
        return pair_uniform_array(self.seed, i, j)


def sample_points(params: ModelParams, rng=None) -> np.ndarray:
    """Poisson(n) many positions, iid uniform on [0, L)^2; (N, 2) float64."""
    if rng is None:
        rng = np.random.default_rng(params.seed)
    count = rng.poisson(params.n)
    pos = rng.uniform(0.0, params.L, size=(count, 2))
    # numpy documents the upper bound as exclusive; guard against rounding
    pos[pos >= params.L] = 0.0
    return pos


@dataclass
class CellGrid:
    """Spatial index over [0, L)^2 with square cells of side >= the target."""

    L: float
    cell_side: float
    cells_per_axis: int
    cell_of: np.ndarray   # cell index per node, iy * cpa + ix
    order: np.ndarray     # node ids grouped by cell, ascending id inside a cell
    start: np.ndarray     # bucket offsets into `order`, len ncells + 1

    @property
    def n_cells(self) -> int:
        return self.cells_per_axis ** 2

    def cell_index(self, x: float, y: float) -> int:
        cpa = self.cells_per_axis
        ix = min(int(x / self.cell_side), cpa - 1)
        iy = min(int(y / self.cell_side), cpa - 1)
        return iy * cpa + ix

    def bucket(self, cell: int) -> np.ndarray:
        return self.order[self.start[cell]:self.start[cell + 1]]

    def nodes_near(self, x: float, y: float, radius: float) -> np.ndarray:
        """Ids of all nodes possibly within `radius` of (x, y) (superset)."""
        cpa = self.cells_per_axis
        reach = int(math.ceil(radius / self.cell_side))
        ix = min(int(x / self.cell_side), cpa - 1)
        iy = min(int(y / self.cell_side), cpa - 1)
        xs = np.unique((ix + np.arange(-reach, reach + 1)) % cpa)
        ys = np.unique((iy + np.arange(-reach, reach + 1)) % cpa)
        cells = (ys[:, None] * cpa + xs[None, :]).ravel()
        return np.concatenate([self.bucket(c) for c in cells]) if cells.size else np.empty(0, np.int64)


def build_cell_grid(pos: np.ndarray, L: float, cell_side_target: float) -> CellGrid:
    """Bucket nodes into floor(L / target)^2 cells of side L / floor(L / target)."""
    if cell_side_target <= 0:
        raise ValueError("cell_side_target must be > 0")
    cpa = max(1, int(math.floor(L / cell_side_target)))
    cell_side = L / cpa
    if pos.shape[0]:
        ix = np.minimum((pos[:, 0] / cell_side).astype(np.int64), cpa - 1)
        iy = np.minimum((pos[:, 1] / cell_side).astype(np.int64), cpa - 1)
        cell_of = iy * cpa + ix
    else:
        cell_of = np.empty(0, dtype=np.int64)
    # stable sort keeps ids ascending within each bucket
    order = np.argsort(cell_of, kind="stable").astype(np.int64)
    counts = np.bincount(cell_of, minlength=cpa * cpa)
    start = np.zeros(cpa * cpa + 1, dtype=np.int64)
    np.cumsum(counts, out=start[1:])
    return CellGrid(L=L, cell_side=cell_side, cells_per_axis=cpa,
                    cell_of=cell_of, order=order, start=start)


def _canonical_edges(eu: np.ndarray, ev: np.ndarray) -> np.ndarray:
    edges = np.stack([eu, ev], axis=1)
    if edges.shape[0]:
        key = np.lexsort((ev, eu))
        edges = edges[key]
    return edges


def build_local_edges(pos: np.ndarray, grid: CellGrid, r_n: float) -> np.ndarray:
    """All pairs with 0 < torus distance < r_n, as an (M, 2) array, u < v."""
    if grid.cell_side < r_n:
        raise ValueError("grid cell side must be >= r_n for a 3x3 scan")
    n = pos.shape[0]
    expected = n * math.pi * r_n * r_n / 2.0
    cap = int(1.3 * expected) + 1024
    while True:
        eu = np.empty(cap, dtype=np.int32)
        ev = np.empty(cap, dtype=np.int32)
        cnt = _kernels.local_edges_kernel(
            np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]),
            grid.cell_of, grid.order, grid.start, grid.cells_per_axis,
            grid.L, r_n, eu, ev)
        if cnt <= cap:
            return _canonical_edges(eu[:cnt], ev[:cnt])
        cap = cnt


def sample_shortcuts_exact(pos: np.ndarray, params: ModelParams) -> np.ndarray:
    """Reference sampler: test every unordered pair directly (O(N^2))."""
    n = pos.shape[0]
    cap = int(4 * params.dbar * max(n, 1)) + 1024
    while True:
        eu = np.empty(cap, dtype=np.int32)
        ev = np.empty(cap, dtype=np.int32)
        cnt = _kernels.shortcuts_exact_kernel(
            np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]),
            params.L, params.r_n, params.a_n, params.alpha, params.seed, eu, ev)
        if cnt <= cap:
            return _canonical_edges(eu[:cnt], ev[:cnt])
        cap = cnt


def sample_shortcuts_fast(pos: np.ndarray, grid: CellGrid, params: ModelParams) -> np.ndarray:
    """Cell-accelerated sampler; identical edge set to the exact sampler."""
    n = pos.shape[0]
    cap = int(4 * params.dbar * max(n, 1)) + 1024
    while True:
        eu = np.empty(cap, dtype=np.int32)
        ev = np.empty(cap, dtype=np.int32)
        cnt = _kernels.shortcuts_fast_kernel(
            np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]),
            grid.order, grid.start, grid.cells_per_axis, grid.cell_side,
            params.L, params.r_n, params.a_n, params.alpha, params.seed, eu, ev)
        if cnt <= cap:
            return _canonical_edges(eu[:cnt], ev[:cnt])
        cap = cnt


@dataclass
class Graph:
    """Immutable sampled graph: positions plus two symmetric adjacencies."""

    params: ModelParams
    pos: np.ndarray
    local_edges: np.ndarray      # (M1, 2) int32, u < v, lexicographic
    shortcut_edges: np.ndarray   # (M2, 2) int32, u < v, lexicographic
    local_indptr: np.ndarray = field(repr=False, default=None)
    local_indices: np.ndarray = field(repr=False, default=None)
    shortcut_indptr: np.ndarray = field(repr=False, default=None)
    shortcut_indices: np.ndarray = field(repr=False, default=None)
    _grid: CellGrid | None = field(repr=False, default=None, compare=False)

    @classmethod
    def build(cls, params: ModelParams, pos: np.ndarray,
              local_edges: np.ndarray, shortcut_edges: np.ndarray) -> "Graph":
        n = pos.shape[0]
        local_edges = np.asarray(local_edges, dtype=np.int32).reshape(-1, 2)
        shortcut_edges = np.asarray(shortcut_edges, dtype=np.int32).reshape(-1, 2)
        local_edges = _canonical_edges(local_edges[:, 0], local_edges[:, 1])
        shortcut_edges = _canonical_edges(shortcut_edges[:, 0], shortcut_edges[:, 1])
        lp, li = _kernels.csr_from_edges(n, local_edges[:, 0], local_edges[:, 1])
        sp, si = _kernels.csr_from_edges(n, shortcut_edges[:, 0], shortcut_edges[:, 1])
        return cls(params=params, pos=pos,
                   local_edges=local_edges, shortcut_edges=shortcut_edges,
                   local_indptr=lp, local_indices=li,
                   shortcut_indptr=sp, shortcut_indices=si)

    @property
    def n_nodes(self) -> int:
        return self.pos.shape[0]

    @property
    def L(self) -> float:
        return self.params.L

    @property
    def r_n(self) -> float:
        return self.params.r_n

    @property
    def mean_shortcut_degree(self) -> float:
        if self.n_nodes == 0:
            return 0.0
        return 2.0 * self.shortcut_edges.shape[0] / self.n_nodes

    def local_neighbors(self, i: int) -> np.ndarray:
        return self.local_indices[self.local_indptr[i]:self.local_indptr[i + 1]]

    def shortcut_neighbors(self, i: int) -> np.ndarray:
        return self.shortcut_indices[self.shortcut_indptr[i]:self.shortcut_indptr[i + 1]]

    def has_local(self, u: int, v: int) -> bool:
        nb = self.local_neighbors(u)
        k = np.searchsorted(nb, v)
        return k < nb.size and nb[k] == v

    def has_shortcut(self, u: int, v: int) -> bool:
        nb = self.shortcut_neighbors(u)
        k = np.searchsorted(nb, v)
        return k < nb.size and nb[k] == v

    def grid(self, cell_side_target: float | None = None) -> CellGrid:
        """Spatial index with cell side >= r_n (cached for the default target)."""
        if cell_side_target is not None:
            return build_cell_grid(self.pos, self.L, cell_side_target)
        if self._grid is None:
            self._grid = build_cell_grid(self.pos, self.L, self.r_n)
        return self._grid

    def validate(self) -> None:
        """Raise if any structural graph invariant is broken."""
        from .geometry import torus_distance
        for name, edges in (("local", self.local_edges), ("shortcut", self.shortcut_edges)):
            if edges.shape[0] == 0:
                continue
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError(f"{name} edges must satisfy u < v (no self-loops)")
            key = edges[:, 0].astype(np.int64) * max(self.n_nodes, 1) + edges[:, 1]
            if np.unique(key).size != key.size:
                raise ValueError(f"duplicate {name} edges")
            d = torus_distance(self.L, self.pos[edges[:, 0]], self.pos[edges[:, 1]])
            if name == "local" and np.any(d >= self.r_n):
                raise ValueError("local edge at distance >= r_n")
            if name == "shortcut" and np.any(d <= self.r_n):
                raise ValueError("shortcut at distance <= r_n")


def generate(params: ModelParams) -> Graph:
    """Sample a full graph: points, local edges, shortcuts. Seed-deterministic."""
    pos = sample_points(params)
    grid = build_cell_grid(pos, params.L, params.r_n)
    local = build_local_edges(pos, grid, params.r_n)
    shortcuts = sample_shortcuts_fast(pos, grid, params)
    g = Graph.build(params, pos, local, shortcuts)
    g._grid = grid
    return g


# ---------------------------------------------------------------------------
# versioned text serialisation
# ---------------------------------------------------------------------------

class GraphFormatError(ValueError):
    pass


def _g17(x: float) -> str:
    return f"{x:.17g}"


def dumps_graph(graph: Graph) -> str:
    p = graph.params
    lines = [f"pswg 1 {_g17(p.L)} {graph.n_nodes} {_g17(p.n)} {_g17(p.c)} "
             f"{_g17(p.alpha)} {_g17(p.dbar)} {p.seed}"]
    for i in range(graph.n_nodes):
        lines.append(f"{i} {_g17(graph.pos[i, 0])} {_g17(graph.pos[i, 1])}")
    for name, edges in (("local", graph.local_edges), ("shortcut", graph.shortcut_edges)):
        lines.append(f"{name} {edges.shape[0]}")
        for u, v in edges:
            lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> Graph:
    lines = text.splitlines()

    def fail(lineno, msg):
        raise GraphFormatError(f"line {lineno + 1}: {msg}")

    if not lines:
        fail(0, "empty graph file")
    head = lines[0].split()
    if len(head) != 9 or head[0] != "pswg":
        fail(0, "expected header 'pswg 1 <L> <N> <n> <c> <alpha> <dbar> <seed>'")
    if head[1] != "1":
        fail(0, f"unsupported format version {head[1]}")
    try:
        L = float(head[2])
        n_nodes = int(head[3])
        n, c, alpha, dbar = map(float, head[4:8])
        seed = int(head[8])
    except ValueError:
        fail(0, "malformed header field")
    params = ModelParams(n=n, c=c, alpha=alpha, dbar=dbar, seed=seed)
    if abs(params.L - L) > 1e-9 * max(1.0, L):
        fail(0, f"header L={L} inconsistent with sqrt(n)={params.L}")

    pos = np.empty((n_nodes, 2), dtype=np.float64)
    ln = 1
    for i in range(n_nodes):
        if ln >= len(lines):
            fail(ln, "unexpected end of file in node section")
        parts = lines[ln].split()
        if len(parts) != 3 or parts[0] != str(i):
            fail(ln, f"expected node line 'id x y' with id={i}")
        try:
            pos[i, 0] = float(parts[1])
            pos[i, 1] = float(parts[2])
        except ValueError:
            fail(ln, "malformed node coordinate")
        ln += 1

    sections = {}
    for name in ("local", "shortcut"):
        if ln >= len(lines):
            fail(ln, f"missing '{name}' section")
        parts = lines[ln].split()
        if len(parts) != 2 or parts[0] != name:
            fail(ln, f"expected section header '{name} <count>'")
        try:
            m = int(parts[1])
        except ValueError:
            fail(ln, "malformed edge count")
        ln += 1
        edges = np.empty((m, 2), dtype=np.int32)
        for k in range(m):
            if ln >= len(lines):
                fail(ln, f"unexpected end of file in {name} section")
            parts = lines[ln].split()
            if len(parts) != 2:
                fail(ln, "expected edge line 'u v'")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                fail(ln, "malformed edge line")
            if not (0 <= u < v < n_nodes):
                fail(ln, f"edge ({u}, {v}) violates 0 <= u < v < N")
            edges[k, 0] = u
            edges[k, 1] = v
            ln += 1
        sections[name] = edges
    return Graph.build(params, pos, sections["local"], sections["shortcut"])


def save_graph(graph: Graph, path) -> None:
    with open(path, "w") as f:
        f.write(dumps_graph(graph))


def load_graph(path) -> Graph:
    with open(path) as f:
        return loads_graph(f.read())
