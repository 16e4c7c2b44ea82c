"""Randomised free G-spaces: the orbit projection is a submetry and
approximate maps descend to the quotients with at most twice their defect."""

from __future__ import annotations

from typing import Any

import networkx as nx  # type: ignore
import numpy as np

from kkspectra.core.group_rep import (
    CompactGroupModel,
    cyclic_group,
    default_generators,
    dihedral_group,
)
from kkspectra.core.mm_space import (
    FiniteMMSpace,
    IsometricAction,
    PointMap,
    check_submetry,
    equivariance_defect,
    graph_metric_space,
    induced_quotient_map,
)
from kkspectra.core.spectral import TransferMap, averaged_transfer
from kkspectra.scenarios.result import COUNT, ScenarioResult, params_schema

NAME = "quotient-submetry"
TAGS = ("metric", "quotient", "random")
DOC = "100 random free G-spaces: submetry, induced map within 2 eps, exact averaging"
DEFAULTS: dict[str, Any] = {"instances": 100, "max_points": 12, "corruption": 0.2}
PARAMS_SCHEMA = params_schema(
    {
        "instances": COUNT,
        "max_points": {"type": "integer", "minimum": 2},
        "corruption": {"type": "number", "minimum": 0, "maximum": 1},
    }
)


def word_lengths(group: CompactGroupModel) -> Any:
    """ℓ(g) with respect to the default generators and their inverses."""
    cayley = nx.Graph()
    cayley.add_nodes_from(range(group.order))
    for s in default_generators(group):
        for g in range(group.order):
            cayley.add_edge(g, group.multiply(g, s))
    lengths = nx.single_source_shortest_path_length(cayley, group.identity())
    return np.array([lengths[g] for g in range(group.order)], dtype=float)


def orbit_metric(rng: np.random.Generator, k: int) -> Any:
    """Integer path metric on k orbit labels from random complete-graph weights."""
    g = nx.complete_graph(k)
    for u, v in g.edges:
        g.edges[u, v]["weight"] = int(rng.integers(1, 6))
    return graph_metric_space(g, weight="weight").dist


def free_space(
    group: CompactGroupModel, base_dist: Any, orbit_mass: Any
) -> tuple[FiniteMMSpace, IsometricAction]:
    """Points (o, x) at o·|G| + x with d = D[o, o'] + ℓ(x y⁻¹) and the right
    action (o, x)·h = (o, xh)."""
    n_g = group.order
    assert group.table is not None
    ell = word_lengths(group)
    inv = np.array([group.inverse(g) for g in range(n_g)], dtype=np.int64)
    o, x = np.divmod(np.arange(base_dist.shape[0] * n_g), n_g)
    dist = base_dist[o[:, None], o[None, :]] + ell[group.table[x[:, None], inv[x][None, :]]]
    space = FiniteMMSpace(dist=dist, measure=np.asarray(orbit_mass, dtype=float)[o])
    perms = np.array([o * n_g + group.table[x, h] for h in range(n_g)], dtype=np.int64)
    return space, IsometricAction(group, perms)


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    rng = np.random.default_rng(seed)
    catalog = [cyclic_group(2), cyclic_group(3), cyclic_group(4), dihedral_group(3)]
    result = ScenarioResult()
    rows = []
    failures = 0
    worst_excess = -np.inf
    worst_measure = -np.inf
    worst_average = -np.inf
    worst_residual = 0.0
    for i in range(params["instances"]):
        group = catalog[i % len(catalog)]
        k = int(rng.integers(1, max(1, params["max_points"] // group.order) + 1))
        dist = orbit_metric(rng, k)
        mass = rng.integers(1, 4, k)
        source, act_s = free_space(group, dist, mass)
        target, act_t = free_space(group, orbit_metric(rng, k), mass)
        source.validate()
        act_s.validate(source)

        mapping = np.arange(source.n_points)
        corrupt = rng.random(source.n_points) < params["corruption"]
        shifts = rng.integers(0, group.order, source.n_points)
        mapping[corrupt] = act_t.perms[shifts[corrupt], mapping[corrupt]]
        phi = PointMap(source, target, mapping)

        sub = check_submetry(source, act_s)
        failures += 0 if sub.ok else 1
        tests = [rng.uniform(-1, 1, k) for _ in range(3)]
        induced = induced_quotient_map(phi, act_s, act_t, test_functions=tests)
        worst_excess = max(worst_excess, induced.defect - induced.bound)
        for lhs, rhs in induced.measure_rows:
            worst_measure = max(worst_measure, lhs - rhs)

        avg = averaged_transfer(TransferMap.from_point_map(phi), act_s, act_t)
        eps1 = equivariance_defect(phi, act_s, act_t)
        worst_average = max(worst_average, avg.defect - 2 * eps1)
        worst_residual = max(worst_residual, avg.equivariance_residual)
        rows.append(
            [
                i,
                group.name,
                source.n_points,
                sub.ok,
                induced.eps_isometry,
                induced.eps_equivariance,
                induced.defect,
                induced.bound,
                avg.defect,
            ]
        )

    result.check("submetry_failures", failures, 0)
    result.check("induced_defect_excess", worst_excess, 0.0)
    result.check("measure_inequality", worst_measure, 1e-12)
    result.check("averaged_defect_excess", worst_average, 0.0)
    result.check("averaged_equivariance", worst_residual, 1e-12)
    result.tables["instances"] = (
        [
            "instance",
            "group",
            "points",
            "submetry",
            "eps_isometry",
            "eps_equivariance",
            "induced_defect",
            "bound",
            "averaged_defect",
        ],
        rows,
    )
    return result
