"""Lowest Landau levels of the degree-k line bundle on the square torus."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.holomorphic import (
    EllipticCurveBundle,
    WeitzenbockReport,
    h0_dimension,
    landau_levels,
    landau_spectrum,
    weitzenbock_check,
)
from kkspectra.scenarios.result import (
    COUNT,
    INTEGER,
    POSITIVE,
    Plot,
    ScenarioResult,
    params_schema,
)

NAME = "landau-k3"
TAGS = ("holomorphic", "landau")
DOC = "flux k=3 on the (2pi)^2 torus: lowest cluster at mu with multiplicity 3, gap 2mu"
DEFAULTS: dict[str, Any] = {
    "k": 3,
    "grid": 64,
    "levels": 3,
    "level_tol": 0.05,
    "lowest_tol": 0.02,
    "gap_tol": 0.05,
    "operator_tol": 1e-8,
    "conjugate_tol": 1e-8,
}
PARAMS_SCHEMA = params_schema(
    {
        "k": INTEGER,
        "grid": {"type": "integer", "minimum": 4},
        "levels": COUNT,
        "level_tol": POSITIVE,
        "lowest_tol": POSITIVE,
        "gap_tol": POSITIVE,
        "operator_tol": POSITIVE,
        "conjugate_tol": POSITIVE,
    }
)


def weitzenbock_table(
    weitz: WeitzenbockReport, operator_tol: float, spectral_tol: float
) -> tuple[list[str], list[list[Any]]]:
    """The operator identity is asserted entrywise in absolute terms; the
    spectral comparison is relative to mu."""
    return (
        ["comparison", "value", "bound", "mode"],
        [
            ["operator", weitz.operator_defect, operator_tol, "exact"],
            ["spectral", weitz.spectral_gap, spectral_tol, "relative to mu"],
        ],
    )


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    k, m = params["k"], params["grid"]
    bundle = EllipticCurveBundle(k=k)
    mu = abs(bundle.mu)
    count = 2 * abs(k) * params["levels"] + 2
    spec = landau_spectrum(bundle, m, count, seed)
    levels = landau_levels(spec, params["level_tol"] * mu)
    result = ScenarioResult()

    result.check("lowest_relative", abs(spec.values[0] - mu) / mu, params["lowest_tol"])
    result.check("lowest_multiplicity", abs(levels[0][1] - 2 * abs(k)), 0)
    if len(levels) > 1:
        gap = levels[1][0] - levels[0][0]
        result.check("first_gap_relative", abs(gap - 2 * mu) / (2 * mu), params["gap_tol"])
    if k > 0:
        dim = h0_dimension(spec, bundle.mu, params["level_tol"] * mu)
        result.check("h0_dimension", abs(dim - k), 0)

    conj = landau_spectrum(EllipticCurveBundle(k=-k), m, count, seed)
    conj_gap = float(np.max(np.abs(conj.values - spec.values)))
    result.check("conjugate_spectrum", conj_gap, params["conjugate_tol"])
    weitz = weitzenbock_check(bundle, m, count, seed)
    result.check("weitzenbock_operator", weitz.operator_defect, params["operator_tol"])
    result.check("weitzenbock_spectral", weitz.spectral_gap, params["lowest_tol"])

    result.tables["spectrum"] = (["scenario", "i", "j", "lambda", "residual"], spec.rows(NAME))
    result.tables["levels"] = (
        ["level", "center", "multiplicity", "expected"],
        [[j, c, n, mu * (2 * j + 1)] for j, (c, n) in enumerate(levels)],
    )
    result.tables["weitzenbock"] = (
        ["j", "rough", "dbar_shifted"],
        [[j, a, b] for j, (a, b) in enumerate(zip(weitz.rough, weitz.shifted))],
    )
    result.tables["weitzenbock_checks"] = weitzenbock_table(
        weitz, params["operator_tol"], params["lowest_tol"]
    )
    result.documents["spectrum"] = spec.to_json()
    xs = list(range(spec.values.size))
    result.plots["levels"] = Plot(
        {
            "rough": (xs, spec.values.tolist()),
            "2 dbar + mu": (xs, weitz.shifted),
        },
        f"Landau levels, k={k}, m={m}",
    )
    return result
