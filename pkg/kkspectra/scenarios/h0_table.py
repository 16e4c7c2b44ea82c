"""Dimension of holomorphic sections against degree, area and twist."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.holomorphic import EllipticCurveBundle, h0_bound_table
from kkspectra.scenarios.result import COUNT, POSITIVE, Plot, ScenarioResult, params_schema

NAME = "h0-table"
TAGS = ("holomorphic", "landau")
DOC = "dim H0 = k for k=1..K, area scaling at fixed mu, zero for k<0 and flat twists"
DEFAULTS: dict[str, Any] = {
    "max_degree": 5,
    "points_per_degree": 16,
    "min_grid": 32,
    "area_scales": [1, 2, 4],
    "rel_tol": 0.05,
}
PARAMS_SCHEMA = params_schema(
    {
        "max_degree": COUNT,
        "points_per_degree": COUNT,
        "min_grid": {"type": "integer", "minimum": 4},
        "area_scales": {"type": "array", "items": COUNT, "minItems": 1},
        "rel_tol": POSITIVE,
    }
)

HEADER = ["family", "k", "area", "diameter", "sup_F", "mu", "dim", "expected"]


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    def grid(bundle: EllipticCurveBundle) -> int:
        return max(params["min_grid"], params["points_per_degree"] * abs(bundle.k))

    two_pi = 2 * np.pi
    families: list[tuple[str, EllipticCurveBundle, int]] = []
    for k in range(1, params["max_degree"] + 1):
        families.append(("degree", EllipticCurveBundle(k=k), k))
    for s in params["area_scales"]:
        families.append(("area", EllipticCurveBundle(periods=(two_pi, two_pi * s), k=s), s))
    families.append(("negative", EllipticCurveBundle(k=-1), 0))
    families.append(("flat", EllipticCurveBundle(k=0), 1))
    families.append(("twisted", EllipticCurveBundle(k=0, holonomy=(np.pi / 2, 0.0)), 0))

    table = h0_bound_table([b for _, b, _ in families], grid, params["rel_tol"], seed)
    result = ScenarioResult()
    rows = []
    for (family, _, expected), row in zip(families, table):
        rows.append([family, *(row[h] for h in HEADER[1:-1]), expected])
        label = f"h0[{family},k={row['k']},area={row['area']:.4g}]"
        result.check(label, abs(row["dim"] - expected), 0)
    result.tables["h0"] = (HEADER, rows)
    degree = [r for r in rows if r[0] == "degree"]
    result.plots["h0"] = Plot(
        {"dim H0": ([r[1] for r in degree], [r[6] for r in degree])},
        "holomorphic sections against degree",
        xlabel="k",
        ylabel="dim",
    )
    return result
