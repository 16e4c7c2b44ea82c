"""Gauge transformations leave spectra, plaquette curvature and face
holonomy classes unchanged."""

from __future__ import annotations

from typing import Any

import networkx as nx  # type: ignore
import numpy as np

from kkspectra.core.bundle import (
    DiscreteConnection,
    conjugacy_class,
    connection_from_flux,
    face_holonomies,
    gauge_transform,
    graph_base,
    plaquette_curvature,
    random_connection,
    random_gauge,
    torus_grid,
)
from kkspectra.core.group_rep import (
    RepresentationModel,
    dihedral_group,
    dihedral_irreps,
    su2_adjoint_rep,
    su2_group,
    u1_group,
    u1_rep,
)
from kkspectra.core.spectral import connection_laplacian, eigs
from kkspectra.scenarios.result import COUNT, INTEGER, POSITIVE, ScenarioResult, params_schema

NAME = "gauge-invariance"
TAGS = ("gauge", "random")
DOC = "random gauge transforms: flux-k, S3 graph and SU(2) spectra and holonomies unchanged"
DEFAULTS: dict[str, Any] = {
    "transforms": 50,
    "flux": 2,
    "grid": 16,
    "count": 24,
    "su2_grid": 6,
    "graph_vertices": 10,
    "tol": 1e-10,
}
PARAMS_SCHEMA = params_schema(
    {
        "transforms": COUNT,
        "flux": INTEGER,
        "grid": {"type": "integer", "minimum": 4},
        "count": COUNT,
        "su2_grid": {"type": "integer", "minimum": 3},
        "graph_vertices": {"type": "integer", "minimum": 5},
        "tol": POSITIVE,
    }
)


def spectrum_drift(
    conn: DiscreteConnection,
    rep: RepresentationModel,
    seeds: list[int],
    count: int | None = None,
) -> float:
    """Largest eigenvalue change over one gauge transform per seed."""
    ref = eigs(connection_laplacian(conn, rep), count).values
    worst = 0.0
    for s in seeds:
        moved = gauge_transform(conn, random_gauge(conn.base, conn.group, s))
        vals = eigs(connection_laplacian(moved, rep), count).values
        worst = max(worst, float(np.max(np.abs(vals - ref))))
    return worst


def plaquette_norms(conn: DiscreteConnection) -> Any:
    return np.linalg.norm(plaquette_curvature(conn).plaquette, axis=-1)


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    tol = params["tol"]
    rng = np.random.default_rng(seed)
    seeds = [int(s) for s in rng.integers(0, 2**31, params["transforms"])]
    result = ScenarioResult()
    rows = []

    m = params["grid"]
    flux = connection_from_flux(torus_grid([m, m]), u1_group(), params["flux"])
    drift = spectrum_drift(flux, u1_rep(1), seeds, min(params["count"], 2 * m * m))
    result.check("flux_spectrum", drift, tol)
    rows.append(["flux", "U1", "rho1", len(seeds), drift])
    ref = plaquette_curvature(flux).plaquette
    worst = 0.0
    for s in seeds[:5]:
        moved = gauge_transform(flux, random_gauge(flux.base, flux.group, s))
        worst = max(worst, float(np.max(np.abs(plaquette_curvature(moved).plaquette - ref))))
    result.check("flux_plaquettes", worst, tol)
    rows.append(["flux", "U1", "plaquette", 5, worst])

    s3 = dihedral_group(3)
    graph = nx.connected_watts_strogatz_graph(params["graph_vertices"], 4, 0.3, seed=seed)
    finite = random_connection(graph_base(graph), s3, seed)
    classes = [conjugacy_class(s3, h) for _, h in face_holonomies(finite)]
    mismatched = 0
    for s in seeds[:10]:
        moved = gauge_transform(finite, random_gauge(finite.base, s3, s))
        moved_classes = [conjugacy_class(s3, h) for _, h in face_holonomies(moved)]
        mismatched += sum(a != b for a, b in zip(classes, moved_classes))
    result.check("face_classes", mismatched, 0)
    rows.append(["graph", "S3", "face_classes", 10, mismatched])
    for rep in dihedral_irreps(s3):
        drift = spectrum_drift(finite, rep, seeds[:10])
        result.check(f"graph_spectrum[{rep.name}]", drift, tol)
        rows.append(["graph", "S3", rep.name, 10, drift])

    k = params["su2_grid"]
    su2 = su2_group()
    nonabelian = random_connection(torus_grid([k, k]), su2, seed, scale=0.3)
    drift = spectrum_drift(nonabelian, su2_adjoint_rep(), seeds[:10])
    result.check("su2_spectrum", drift, tol)
    rows.append(["grid", "SU2", "adjoint", 10, drift])
    ref_norms = plaquette_norms(nonabelian)
    worst = 0.0
    for s in seeds[:5]:
        moved = gauge_transform(nonabelian, random_gauge(nonabelian.base, su2, s))
        worst = max(worst, float(np.max(np.abs(plaquette_norms(moved) - ref_norms))))
    result.check("su2_plaquette_norms", worst, tol)
    rows.append(["grid", "SU2", "plaquette_norm", 5, worst])

    result.tables["invariance"] = (["base", "group", "quantity", "transforms", "drift"], rows)
    return result
