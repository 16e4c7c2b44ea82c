"""Shrinking the fiber: the invariant sector keeps the base spectrum, every
other sector is pushed up past its Casimir value."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.bundle import cycle_base, random_connection
from kkspectra.core.group_rep import (
    cyclic_group,
    cyclic_irreps,
    discrete_casimir,
    u1_fiber_weight,
)
from kkspectra.core.spectral import (
    base_laplacian,
    eigs,
    isotypic_restriction,
    total_laplacian,
    voltage_cover,
)
from kkspectra.scenarios.result import POSITIVE, Plot, ScenarioResult, params_schema

NAME = "collapse-sequence"
TAGS = ("convergence", "collapse")
DOC = "Z_m fiber of circumference 2pi sqrt(sigma), sigma -> 0 over a cycle base"
DEFAULTS: dict[str, Any] = {
    "base_vertices": 8,
    "fiber_order": 6,
    "sigmas": [1.0, 0.5, 0.25, 0.1, 0.01],
    "tol": 1e-10,
}
PARAMS_SCHEMA = params_schema(
    {
        "base_vertices": {"type": "integer", "minimum": 3},
        "fiber_order": {"type": "integer", "minimum": 2},
        "sigmas": {"type": "array", "items": POSITIVE, "minItems": 1},
        "tol": POSITIVE,
    }
)


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    m = params["fiber_order"]
    tol = params["tol"]
    group = cyclic_group(m)
    base = cycle_base(params["base_vertices"])
    conn = random_connection(base, group, seed)
    cover, act, _ = voltage_cover(conn)
    base_spec = eigs(base_laplacian(base))
    reps = cyclic_irreps(group)
    result = ScenarioResult()
    rows = []
    series: dict[str, tuple[list[float], list[float]]] = {}
    worst_trivial = 0.0
    worst_margin = np.inf
    for sigma in params["sigmas"]:
        w = u1_fiber_weight(m, sigma)
        total = total_laplacian(cover, group, w)
        for rep in reps:
            iso = eigs(isotypic_restriction(total, act, rep))
            chi = discrete_casimir(group, rep, weight=w)
            low = float(iso.values[0])
            rows.append([sigma, rep.name, chi, low])
            xs, ys = series.setdefault(rep.name, ([], []))
            xs.append(1 / sigma)
            ys.append(low)
            if rep.is_trivial():
                worst_trivial = max(
                    worst_trivial, float(np.max(np.abs(iso.values - base_spec.values)))
                )
            else:
                worst_margin = min(worst_margin, low - chi)

    result.check("trivial_sector_is_base", worst_trivial, tol)
    result.check("nontrivial_above_casimir", worst_margin, -tol, at_least=True)
    result.tables["collapse"] = (["sigma", "irrep", "chi", "lowest"], rows)
    result.plots["collapse"] = Plot(series, "lowest sector eigenvalue", "1/sigma", "lambda")
    return result
