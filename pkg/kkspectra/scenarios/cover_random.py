"""Randomised voltage covers over small finite groups."""

from __future__ import annotations

from typing import Any

import networkx as nx  # type: ignore
import numpy as np

from kkspectra.core.bundle import graph_base, random_connection
from kkspectra.core.group_rep import CompactGroupModel, cyclic_group, dihedral_group
from kkspectra.core.spectral import (
    commutation_defect,
    cover_decomposition,
    total_laplacian,
    voltage_cover,
)
from kkspectra.scenarios.result import COUNT, POSITIVE, TOLERANCE, ScenarioResult, params_schema

NAME = "cover-random"
TAGS = ("cover", "decomposition", "random")
DOC = "random graphs and voltages over Z2..Z6 and S3: cover spectrum = shifted sectors"
DEFAULTS: dict[str, Any] = {
    "instances": 24,
    "min_vertices": 4,
    "max_vertices": 30,
    "fiber_weight": 1.0,
    "tol": 1e-10,
}
PARAMS_SCHEMA = params_schema(
    {
        "instances": COUNT,
        "min_vertices": {"type": "integer", "minimum": 3},
        "max_vertices": {"type": "integer", "minimum": 3, "maximum": 60},
        "fiber_weight": POSITIVE,
        "tol": TOLERANCE,
    }
)


def groups() -> list[CompactGroupModel]:
    return [cyclic_group(m) for m in range(2, 7)] + [dihedral_group(3)]


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    rng = np.random.default_rng(seed)
    catalog = groups()
    result = ScenarioResult()
    rows = []
    worst_union = worst_shift = worst_deck = 0.0
    lo, hi = params["min_vertices"], max(params["min_vertices"], params["max_vertices"])
    for i in range(params["instances"]):
        group = catalog[i % len(catalog)]
        n = int(rng.integers(lo, hi + 1))
        graph = nx.connected_watts_strogatz_graph(
            n, 4 if n > 4 else 2, 0.3, seed=int(rng.integers(2**31))
        )
        base = graph_base(graph)
        conn = random_connection(base, group, int(rng.integers(2**31)))
        decomp = cover_decomposition(conn, fiber_weight=params["fiber_weight"])
        shift = max(r["gap"] for r in decomp.rows)
        cover, act, _ = voltage_cover(conn)
        deck = commutation_defect(
            total_laplacian(cover, group, params["fiber_weight"]), act
        )
        worst_union = max(worst_union, decomp.union_gap)
        worst_shift = max(worst_shift, shift)
        worst_deck = max(worst_deck, deck)
        rows.append([i, group.name, n, base.n_edges, decomp.union_gap, shift, deck])

    result.check("union_gap", worst_union, params["tol"])
    result.check("shift_gap", worst_shift, params["tol"])
    result.check("deck_commutation", worst_deck, 1e-12)
    result.tables["instances"] = (
        ["instance", "group", "vertices", "edges", "union_gap", "shift_gap", "deck_defect"],
        rows,
    )
    return result
