"""The triangle with one Z2 voltage: its cover is the hexagon."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.bundle import connection_from_links, connection_to_json, cycle_base
from kkspectra.core.group_rep import cyclic_group
from kkspectra.core.spectral import (
    add_fiber_edges,
    commutation_defect,
    cover_decomposition,
    eigs,
    operator_triplets,
    total_laplacian,
    voltage_cover,
)
from kkspectra.scenarios.result import (
    POSITIVE,
    TOLERANCE,
    Plot,
    ScenarioResult,
    params_schema,
)

NAME = "voltage-c6"
TAGS = ("cover", "decomposition")
DOC = "C3 with one Z2 voltage: cover is C6, spectrum splits into trivial and sign sectors"
DEFAULTS: dict[str, Any] = {"fiber_weight": 1.0, "tol": 1e-10}
PARAMS_SCHEMA = params_schema({"fiber_weight": POSITIVE, "tol": TOLERANCE})


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    tol = params["tol"]
    w = params["fiber_weight"]
    group = cyclic_group(2)
    base = cycle_base(3)
    conn = connection_from_links(base, group, [1, 0, 0])
    result = ScenarioResult()

    cover, act, _ = voltage_cover(conn)
    result.check("cover_connected", cover.components(), 1)
    hexagon = eigs(total_laplacian(cover, group, 0.0))
    expected = np.sort(2 - 2 * np.cos(2 * np.pi * np.arange(6) / 6))
    result.check("hexagon_spectrum", np.max(np.abs(hexagon.values - expected)), tol)

    decomp = cover_decomposition(conn, fiber_weight=w)
    result.check("union_gap", decomp.union_gap, tol)
    for row in decomp.rows:
        result.check(f"shift_gap[{row['irrep']}]", row["gap"], tol)

    total = total_laplacian(cover, group, w)
    result.check("deck_commutation", commutation_defect(total, act), 1e-12)

    result.tables["decomposition"] = (
        ["irrep", "dim", "multiplicity", "chi", "gap"],
        [[r["irrep"], r["dim"], r["multiplicity"], r["chi"], r["gap"]] for r in decomp.rows],
    )
    result.tables["spectrum"] = (
        ["scenario", "i", "j", "lambda", "residual"],
        decomp.total.rows(NAME),
    )
    result.plots["spectrum"] = Plot(
        {"total": (list(range(decomp.total.values.size)), decomp.total.values.tolist())},
        "C6 cover spectrum",
    )
    add_fiber_edges(cover, group, weight=w)
    result.covers["cover"] = cover
    result.operators["total"] = operator_triplets(total)
    result.documents["connection"] = connection_to_json(conn)
    result.documents["spectrum"] = decomp.total.to_json()
    return result
