"""Casimir invariants of U(1) and SU(2), their scaling in σ, and the
discrete Casimir of Z_m converging to the continuum value."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.group_rep import (
    casimir,
    check_ad_invariance,
    cyclic_group,
    cyclic_irreps,
    discrete_casimir,
    representation_defects,
    su2_adjoint_rep,
    su2_group,
    su2_quaternion_rep,
    u1_fiber_weight,
    u1_group,
    u1_rep,
    with_sigma,
)
from kkspectra.scenarios.result import COUNT, POSITIVE, Plot, ScenarioResult, params_schema

NAME = "casimir-table"
TAGS = ("casimir", "group")
DOC = "chi(U1, rho_n) = n^2, chi(SU2) = 2 and 3/4, chi(c sigma) = chi/c, Z_m -> U(1)"
DEFAULTS: dict[str, Any] = {
    "max_charge": 6,
    "scales": [2.0, 0.5],
    "fiber_orders": [8, 16, 32, 64],
    "discrete_charges": 3,
    "ratio": 3.0,
    "tol": 1e-12,
}
PARAMS_SCHEMA = params_schema(
    {
        "max_charge": COUNT,
        "scales": {"type": "array", "items": POSITIVE, "minItems": 1},
        "fiber_orders": {
            "type": "array",
            "items": {"type": "integer", "minimum": 3},
            "minItems": 2,
        },
        "discrete_charges": COUNT,
        "ratio": POSITIVE,
        "tol": POSITIVE,
    }
)


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    tol = params["tol"]
    result = ScenarioResult()
    rows: list[list[Any]] = []

    u1 = u1_group()
    for n in range(1, params["max_charge"] + 1):
        chi = casimir(u1_rep(n), u1).chi
        rows.append(["U1", f"rho{n}", 1.0, chi, float(n * n)])
        result.check(f"u1[rho{n}]", abs(chi - n * n), tol)

    su2 = su2_group()
    for rep, expected in ((su2_adjoint_rep(), 2.0), (su2_quaternion_rep(), 0.75)):
        chi = casimir(rep, su2).chi
        rows.append(["SU2", rep.name, 1.0, chi, expected])
        result.check(f"su2[{rep.name}]", abs(chi - expected), tol)
        defects = representation_defects(su2, rep)
        result.check(f"su2_structure[{rep.name}]", max(defects.values()), 1e-10)
        for c in params["scales"]:
            scaled = casimir(rep, with_sigma(su2, c * np.eye(3))).chi
            rows.append(["SU2", rep.name, c, scaled, expected / c])
            result.check(f"scaling[{rep.name},{c}]", abs(scaled - expected / c), tol)
    for c in params["scales"]:
        scaled = casimir(u1_rep(1), with_sigma(u1, [[c]])).chi
        rows.append(["U1", "rho1", c, scaled, 1.0 / c])
        result.check(f"scaling[rho1,{c}]", abs(scaled - 1.0 / c), tol)

    result.check("ad_invariance", check_ad_invariance(su2), tol)
    anisotropic = check_ad_invariance(with_sigma(su2, np.diag([1.0, 2.0, 3.0])))
    result.check("ad_invariance_detects_anisotropic", anisotropic, 1.0, at_least=True)

    orders = params["fiber_orders"]
    disc_rows = []
    series: dict[str, tuple[list[float], list[float]]] = {}
    worst_ratio = np.inf
    for n in range(1, params["discrete_charges"] + 1):
        errors = []
        for m in orders:
            group = cyclic_group(m)
            rep = next(r for r in cyclic_irreps(group) if r.name == f"rot{n}")
            chi = discrete_casimir(group, rep, weight=u1_fiber_weight(m))
            errors.append(abs(chi - n * n))
            disc_rows.append([n, m, chi, errors[-1]])
        for a, b in zip(errors, errors[1:]):
            worst_ratio = min(worst_ratio, a / b)
        series[f"n={n}"] = ([float(m) for m in orders], errors)
    result.check("discrete_ratio", worst_ratio, params["ratio"], at_least=True)

    result.tables["casimir"] = (["group", "rep", "scale", "chi", "expected"], rows)
    result.tables["discrete"] = (["charge", "m", "chi", "error"], disc_rows)
    result.plots["discrete"] = Plot(
        series, "discrete Casimir error", xlabel="m", ylabel="|chi_m - n^2|", logy=True
    )
    return result
