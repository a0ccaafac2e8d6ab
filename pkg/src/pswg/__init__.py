"""Poisson small-world graphs on a torus.

Generates spatial random graphs (dense local edges within r_n = sqrt(c ln n)
plus power-law shortcuts), routes messages with decentralised algorithms,
and runs the Monte Carlo experiments that probe how hop counts scale with n
around the critical shortcut exponent alpha = 2.
"""

from .geometry import Torus, in_annulus, in_disc, torus_distance, wrap_coords
from .genmodel import (
    CellGrid,
    Graph,
    GraphFormatError,
    ModelParams,
    PairRandomness,
    build_cell_grid,
    build_local_edges,
    compute_a_n,
    generate,
    load_graph,
    loads_graph,
    dumps_graph,
    sample_points,
    sample_shortcuts_exact,
    sample_shortcuts_fast,
    save_graph,
)
from .routing import (
    RouteResult,
    RoutingInvariantError,
    has_closer_local_contact,
    replay_path,
    route_approx_greedy,
    route_pure_greedy,
)
from .analysis import (
    FitReport,
    SweepConfig,
    SweepRecord,
    estimate_annulus_count,
    estimate_cdelta_shortcut_probability,
    estimate_hit_probability,
    fit_scaling,
    local_connectivity,
    lower_bound_threshold,
    records_to_csv,
    run_sweep,
    shortcut_length_survival,
    tessellation_occupancy,
)

__version__ = "0.1.0"
