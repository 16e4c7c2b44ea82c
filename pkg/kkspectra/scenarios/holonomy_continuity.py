"""Eigenvalue and eigenspace continuity along a holonomy schedule on a
flat circle bundle over a cycle."""

from __future__ import annotations

from collections import defaultdict
from typing import Any

import numpy as np
import scipy.sparse as sp  # type: ignore

from kkspectra.core.bundle import DiscreteConnection, connection_from_links, cycle_base
from kkspectra.core.group_rep import u1_group, u1_rep
from kkspectra.core.spectral import (
    TransferMap,
    connection_laplacian,
    eigen_continuity,
    eigs,
    lower_bound_probe,
    partial_heat_trace,
)
from kkspectra.scenarios.result import COUNT, POSITIVE, Plot, ScenarioResult, params_schema

NAME = "holonomy-continuity"
TAGS = ("convergence", "continuity")
DOC = "alpha_i = alpha + 2^-i on a cycle: eigenvalue gaps halve, eigenspace angles shrink"
DEFAULTS: dict[str, Any] = {
    "cycle": 8,
    "alpha": 0.3,
    "first": 4,
    "last": 12,
    "j_max": 8,
    "ratio": 1.8,
    "tol": 1e-12,
    "times": [0.1, 0.5, 1.0, 2.0],
}
PARAMS_SCHEMA = params_schema(
    {
        "cycle": {"type": "integer", "minimum": 3},
        "alpha": {"type": "number"},
        "first": COUNT,
        "last": COUNT,
        "j_max": COUNT,
        "ratio": POSITIVE,
        "tol": POSITIVE,
        "times": {"type": "array", "items": POSITIVE, "minItems": 1},
    }
)


def wrap_connection(m: int, alpha: float) -> DiscreteConnection:
    """All holonomy on the edge m−1 → 0, so eigenvectors move with alpha."""
    base = cycle_base(m)
    links = np.zeros(base.n_edges)
    e, forward = base.lookup[(m - 1, 0)]
    links[e] = alpha if forward else -alpha
    return connection_from_links(base, u1_group(), np.mod(links, 2 * np.pi))


def closed_form(m: int, alpha: float) -> Any:
    """2 − 2cos((2πj + α)/m), each value twice in the real form of ρ_1."""
    vals = 2 - 2 * np.cos((2 * np.pi * np.arange(m) + alpha) / m)
    return np.sort(np.repeat(vals, 2))


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    m, alpha, j_max = params["cycle"], params["alpha"], params["j_max"]
    schedule = list(range(params["first"], params["last"] + 1))
    rep = u1_rep(1)
    limit = connection_laplacian(wrap_connection(m, alpha), rep)
    ops = [connection_laplacian(wrap_connection(m, alpha + 2.0**-i), rep) for i in schedule]
    ident = sp.identity(limit.dimension, format="csr")
    transfers = [TransferMap(ident, op.mass, limit.mass) for op in ops]
    result = ScenarioResult()

    lim = eigs(limit)
    expected = closed_form(m, alpha)
    result.check("closed_form", float(np.max(np.abs(lim.values - expected))), params["tol"])

    rows = eigen_continuity(ops, limit, transfers, j_max, seed=seed)
    gaps: dict[int, dict[int, float]] = defaultdict(dict)
    angles: dict[int, dict[int, float]] = defaultdict(dict)
    for r in rows:
        gaps[r.j][r.i] = r.gap
        angles[r.j][r.i] = r.angle

    worst_ratio = np.inf
    worst_rise = 0.0
    for j in sorted(gaps):
        g = [gaps[j][i] for i in range(len(schedule))]
        a = [angles[j][i] for i in range(len(schedule))]
        for k in range(len(schedule) - 1):
            worst_ratio = min(worst_ratio, g[k] / max(g[k + 1], 1e-300))
            worst_rise = max(worst_rise, a[k + 1] - a[k])
    result.check("gap_ratio", worst_ratio, params["ratio"], at_least=True)
    result.check("angle_monotone", worst_rise, 0.0)

    times = params["times"]
    heat = partial_heat_trace(lim, times)
    heat_exact = np.exp(-np.outer(times, expected)).sum(axis=1)
    result.check("heat_trace", float(np.max(np.abs(heat - heat_exact))), 1e-10)

    family = [(wrap_connection(m, alpha + 2.0**-i), rep) for i in schedule]
    bound_rows = []
    lower = []
    for j in range(j_max):
        report = lower_bound_probe(family, j)
        lower.append(report.value)
        bound_rows.append([j, report.value, report.kappa, report.diameter, report.n])
    result.check("lower_bound_monotone", float(np.max(-np.diff(lower), initial=0.0)), 1e-12)

    result.tables["continuity"] = (
        ["i", "j", "lambda", "gap", "angle"],
        [[schedule[r.i], r.j, r.value, r.gap, r.angle] for r in rows],
    )
    result.tables["lower_bound"] = (["j", "min_lambda", "kappa", "D", "N"], bound_rows)
    result.tables["heat_trace"] = (
        ["t", "computed", "closed_form"],
        [[t, float(h), float(e)] for t, h, e in zip(times, heat, heat_exact)],
    )
    result.plots["gaps"] = Plot(
        {f"j={j}": (schedule, [gaps[j][i] for i in range(len(schedule))]) for j in sorted(gaps)},
        "eigenvalue gap against schedule index",
        xlabel="i",
        ylabel="gap",
        logy=True,
    )
    return result
