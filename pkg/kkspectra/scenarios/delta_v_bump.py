"""Orbit sweeps δ_V and equivariant bump sections on free cyclic actions."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.group_rep import cyclic_group, cyclic_irreps
from kkspectra.core.mm_space import (
    FiniteMMSpace,
    IsometricAction,
    SeparationError,
    bump_dimension_bound,
    delta_V,
    subgroups,
)
from kkspectra.scenarios.result import POSITIVE, ScenarioResult, params_schema

NAME = "delta-v-bump"
TAGS = ("metric", "bump")
DOC = "free Z_k on q separated orbits: Gram rank q per irrep, delta_V = 1 off the trivial rep"
DEFAULTS: dict[str, Any] = {
    "order": 4,
    "orbits": 6,
    "spacing": 10.0,
    "delta": 0.4,
    "coarse_delta": 3.0,
}
PARAMS_SCHEMA = params_schema(
    {
        "order": {"type": "integer", "minimum": 2},
        "orbits": {"type": "integer", "minimum": 1, "maximum": 6},
        "spacing": POSITIVE,
        "delta": POSITIVE,
        "coarse_delta": POSITIVE,
    }
)


def orbit_space(k: int, q: int, spacing: float) -> tuple[FiniteMMSpace, IsometricAction]:
    """Points (o, g) at index o·k + g with d = spacing·|o − o'| + [g ≠ g'];
    Z_k acts by (o, g)·h = (o, g + h)."""
    o, g = np.divmod(np.arange(k * q), k)
    dist = spacing * np.abs(o[:, None] - o[None, :]) + (g[:, None] != g[None, :])
    space = FiniteMMSpace(dist=dist.astype(float), measure=np.ones(k * q))
    perms = np.array([o * k + (g + h) % k for h in range(k)], dtype=np.int64)
    return space, IsometricAction(cyclic_group(k), perms)


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    k, q = params["order"], params["orbits"]
    space, act = orbit_space(k, q, params["spacing"])
    space.validate()
    act.validate(space)
    reps_of_orbits = [o * k for o in range(q)]
    candidates = subgroups(act.group)
    result = ScenarioResult()
    rows = []

    for rep in cyclic_irreps(act.group):
        bump = bump_dimension_bound(space, act, rep, reps_of_orbits, params["delta"])
        result.check(f"gram_rank[{rep.name}]", abs(bump.count - q), 0)
        sweep = delta_V(space, act, rep, candidates)
        if rep.is_trivial():
            unbounded = float(np.all(np.isinf(sweep.values)))
            result.check(f"delta_V_infinite[{rep.name}]", unbounded, 1, at_least=True)
        else:
            off = float(np.max(np.abs(sweep.values - 1.0)))
            result.check(f"delta_V[{rep.name}]", off, 0)
        rows.append(
            [
                rep.name,
                rep.dim,
                bump.count,
                float(np.min(sweep.values)),
                ";".join(h.name for h in sweep.admissible),
            ]
        )

    try:
        bump_dimension_bound(
            space, act, cyclic_irreps(act.group)[0], reps_of_orbits, params["coarse_delta"]
        )
        separated = 0.0
    except SeparationError:
        separated = 1.0
    if q > 1:
        result.check("coarse_delta_rejected", separated, 1, at_least=True)

    result.tables["bump"] = (["irrep", "dim", "gram_rank", "delta_V", "admissible"], rows)
    return result
