"""Mosco probes for the Dirichlet forms of refining circle grids."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.bundle import BaseLattice, torus_grid
from kkspectra.core.mm_space import FiniteMMSpace, PointMap
from kkspectra.core.spectral import (
    TransferMap,
    base_laplacian,
    mosco_probe,
    strong_convergence_defect,
)
from kkspectra.scenarios.result import POSITIVE, Plot, ScenarioResult, params_schema
from kkspectra.utils.errors import ModelError

NAME = "mosco-circle"
TAGS = ("convergence", "mosco")
DOC = "circle grids m = 8..128 against m = 512: recovery defects fall like 1/m^2"
DEFAULTS: dict[str, Any] = {
    "sizes": [8, 16, 32, 64, 128],
    "limit": 512,
    "ratio_low": 3.5,
    "ratio_high": 4.5,
    "liminf_margin": 0.02,
    "tol": 1e-12,
}
PARAMS_SCHEMA = params_schema(
    {
        "sizes": {
            "type": "array",
            "items": {"type": "integer", "minimum": 4},
            "minItems": 2,
        },
        "limit": {"type": "integer", "minimum": 8},
        "ratio_low": POSITIVE,
        "ratio_high": POSITIVE,
        "liminf_margin": POSITIVE,
        "tol": POSITIVE,
    }
)


def grid_space(base: BaseLattice) -> FiniteMMSpace:
    """Path metric of the grid with cell-volume point masses."""
    return FiniteMMSpace(
        dist=base.metric_space().dist, measure=np.full(base.n_vertices, base.cell_volume())
    )


def sampling_transfer(
    coarse: BaseLattice, fine: BaseLattice, fine_space: FiniteMMSpace
) -> TransferMap:
    """Φ(f) = f restricted to the coarse vertices, which sit on the fine grid."""
    stride = fine.n_vertices // coarse.n_vertices
    mapping = np.arange(coarse.n_vertices, dtype=np.int64) * stride
    return TransferMap.from_point_map(PointMap(grid_space(coarse), fine_space, mapping))


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    sizes, n_lim = params["sizes"], params["limit"]
    if any(n_lim % m for m in sizes):
        raise ModelError("every grid size must divide the limit size")
    fine = torus_grid([n_lim])
    fine_space = grid_space(fine)
    grids = [torus_grid([m]) for m in sizes]
    forms = [base_laplacian(b) for b in grids]
    limit = base_laplacian(fine)
    transfers = [sampling_transfer(b, fine, fine_space) for b in grids]
    x = fine.coordinates()[:, 0]
    tests = {"cos x": np.cos(x), "sin 2x": np.sin(2 * x)}
    result = ScenarioResult()

    nyquist = [np.where(np.arange(m) % 2 == 0, 1.0, -1.0) for m in sizes]
    sampled_cos = [np.cos(b.coordinates()[:, 0]) for b in grids]
    report = mosco_probe(
        forms,
        limit,
        transfers,
        list(tests.values()),
        weak_families=[(tests["cos x"], sampled_cos), (np.zeros(n_lim), nyquist)],
    )

    rows = []
    worst_low, worst_high = np.inf, 0.0
    for name, defects in zip(tests, report.recovery_defects):
        for k, m in enumerate(sizes):
            ratio = defects[k - 1] / defects[k] if k else float("nan")
            rows.append([name, m, defects[k], ratio])
            if k:
                worst_low = min(worst_low, ratio)
                worst_high = max(worst_high, ratio)
    result.check("recovery_ratio_low", worst_low, params["ratio_low"], at_least=True)
    result.check("recovery_ratio_high", worst_high, params["ratio_high"])
    result.check("liminf_smooth", report.liminf_margins[0], params["liminf_margin"])
    result.check("liminf_nyquist", report.liminf_margins[1], 0.0)

    smooth = strong_convergence_defect(sampled_cos, tests["cos x"], transfers, [tests["cos x"]])
    result.check("strong_smooth", smooth.defects[0], params["tol"])
    # Nyquist modes tend weakly to zero but stay away from every sampled probe
    rough = strong_convergence_defect(
        nyquist, np.zeros(n_lim), transfers, [np.zeros(n_lim), np.cos(n_lim * x / 2)]
    )
    result.check("strong_nyquist_separated", min(rough.defects), 1.0, at_least=True)

    result.tables["recovery"] = (["test", "m", "defect", "ratio"], rows)
    result.tables["liminf"] = (
        ["family", "margin"],
        [["cos x", report.liminf_margins[0]], ["nyquist", report.liminf_margins[1]]],
    )
    result.plots["recovery"] = Plot(
        {name: (list(sizes), d) for name, d in zip(tests, report.recovery_defects)},
        "energy recovery defect",
        xlabel="m",
        ylabel="|E_m - E|",
        logy=True,
    )
    return result
