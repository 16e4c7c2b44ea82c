from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import networkx as nx  # type: ignore
import numpy as np
from numpy.typing import ArrayLike, NDArray

from kkspectra.core.group_rep import (
    CompactGroupModel,
    RepresentationModel,
    action_matrix,
    cyclic_group,
    fixed_space,
)
from kkspectra.utils.errors import ModelError
from kkspectra.utils.logger import Logger

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


def _gap(a: FloatArray, b: FloatArray) -> FloatArray:
    """|a − b| with inf − inf read as 0."""
    both = np.isinf(a) & np.isinf(b) & (np.sign(a) == np.sign(b))
    with np.errstate(invalid="ignore"):
        out = np.abs(a - b)
    out[both] = 0.0
    return out  # type: ignore


##########
# SPACES #
##########


@dataclass(frozen=True, eq=False)
class FiniteMMSpace:
    dist: FloatArray
    measure: FloatArray
    labels: tuple[str, ...] | None = None

    @property
    def n_points(self) -> int:
        return int(self.dist.shape[0])

    def total_mass(self) -> float:
        return float(self.measure.sum())

    def diameter(self) -> float:
        return float(np.max(self.dist)) if self.n_points else 0.0

    def validate(self, atol: float = 0.0) -> None:
        d = self.dist
        n = self.n_points
        if d.shape != (n, n) or self.measure.shape != (n,):
            raise ModelError("inconsistent dimensions")
        if not np.array_equal(d, d.T):
            raise ModelError("distance matrix not symmetric")
        if np.any(np.diag(d) != 0):
            raise ModelError("distance matrix has nonzero diagonal")
        off = d[~np.eye(n, dtype=bool)]
        if np.any(off <= 0):
            raise ModelError("points are not distinct")
        if np.any(self.measure < 0):
            raise ModelError("negative measure")
        with np.errstate(invalid="ignore"):
            viol = d[:, None, :] - (d[:, :, None] + d[None, :, :])
        if np.any(np.nan_to_num(viol, nan=0.0, neginf=0.0) > atol):
            raise ModelError("triangle inequality violated")


def graph_metric_space(
    graph: nx.Graph, weight: str | None = None, measure: ArrayLike | None = None
) -> FiniteMMSpace:
    """Shortest-path metric on a graph with nodes 0..n−1; disconnected pairs
    are at distance inf."""
    n = graph.number_of_nodes()
    dist = np.full((n, n), np.inf)
    lengths = dict(nx.all_pairs_dijkstra_path_length(graph, weight=weight))
    for u, row in lengths.items():
        for v, d in row.items():
            dist[u, v] = d
    mass = np.ones(n) if measure is None else np.asarray(measure, dtype=float)
    return FiniteMMSpace(dist=dist, measure=mass)


def cayley_circle(m: int, mass: float = 1.0) -> FiniteMMSpace:
    return graph_metric_space(nx.cycle_graph(m), measure=np.full(m, mass))


def ball_truncation(
    space: FiniteMMSpace, center: int, radius: float
) -> tuple[FiniteMMSpace, PointMap]:
    """Closed ball B̄(center, radius) with the induced metric and measure, and
    its inclusion map."""
    keep = np.flatnonzero(space.dist[center] <= radius)
    sub = FiniteMMSpace(
        dist=space.dist[np.ix_(keep, keep)], measure=space.measure[keep].copy()
    )
    return sub, PointMap(sub, space, keep.astype(np.int64))


def space_to_json(space: FiniteMMSpace, act: IsometricAction | None = None) -> str:
    doc: dict[str, Any] = {
        "dist": [[None if np.isinf(x) else float(x) for x in row] for row in space.dist],
        "measure": [float(x) for x in space.measure],
    }
    if act is not None:
        doc["action"] = {
            "group": act.group.name,
            "perms": {str(g): [int(u) for u in row] for g, row in enumerate(act.perms)},
        }
    return json.dumps(doc, indent=2, sort_keys=True)


def space_from_json(
    doc: dict[str, Any], group: CompactGroupModel | None = None
) -> tuple[FiniteMMSpace, IsometricAction | None]:
    dist = np.array(
        [[np.inf if x is None else float(x) for x in row] for row in doc["dist"]]
    )
    measure = np.asarray(doc.get("measure", np.ones(dist.shape[0])), dtype=float)
    space = FiniteMMSpace(dist=dist, measure=measure)
    act = None
    if "action" in doc:
        perms_doc = doc["action"]["perms"]
        perms = np.array([perms_doc[str(g)] for g in range(len(perms_doc))], dtype=np.int64)
        if group is None:
            group = cyclic_group(len(perms_doc))
        act = IsometricAction(group, perms)
        act.validate(space)
    return space, act


def load_distance_csv(path: str, measure: ArrayLike | None = None) -> FiniteMMSpace:
    dist = np.loadtxt(path, delimiter=",", ndmin=2)
    mass = np.ones(dist.shape[0]) if measure is None else np.asarray(measure, dtype=float)
    return FiniteMMSpace(dist=dist, measure=mass)


###########
# ACTIONS #
###########


@dataclass(frozen=True, eq=False)
class IsometricAction:
    """
    Right action by permutations: perms[g, u] is the index of u·γ_g, γ_g the
    g-th node of the group. Quadrature groups act through a finite node set
    closed under products (Z_m ⊂ U(1)).
    """

    group: CompactGroupModel
    perms: IntArray

    def act(self, u: int, g: int) -> int:
        return int(self.perms[g, u])

    def matrix(self, g: int) -> FloatArray:
        return action_matrix(self.perms[g])

    def matrices(self) -> list[FloatArray]:
        return [self.matrix(g) for g in range(self.group.order)]

    def orbits(self) -> IntArray:
        """Orbit label per point, labels ordered by smallest member."""
        n = self.perms.shape[1]
        label = np.full(n, -1, dtype=np.int64)
        count = 0
        for u in range(n):
            if label[u] < 0:
                label[self.perms[:, u]] = count
                count += 1
        return label

    def stabilizer(self, u: int) -> list[int]:
        return [int(g) for g in np.flatnonzero(self.perms[:, u] == u)]

    def validate(self, space: FiniteMMSpace) -> None:
        n = space.n_points
        group = self.group
        if self.perms.shape != (group.order, n):
            raise ModelError("inconsistent dimensions")
        for g, p in enumerate(self.perms):
            if sorted(p.tolist()) != list(range(n)):
                raise ModelError(f"group element {g} does not act as a permutation")
            if not np.array_equal(space.dist[np.ix_(p, p)], space.dist):
                raise ModelError(f"group element {g} is not an isometry")
            if not np.array_equal(space.measure[p], space.measure):
                raise ModelError(f"measure not invariant under group element {g}")
        e = _identity_index(group)
        if not np.array_equal(self.perms[e], np.arange(n)):
            raise ModelError("identity does not act trivially")
        # right action: u·(gh) = (u·g)·h
        for g in range(group.order):
            for h in range(group.order):
                gh = group.node_product(g, h)
                if not np.array_equal(self.perms[gh], self.perms[h][self.perms[g]]):
                    raise ModelError("composition law violated")


def _identity_index(group: CompactGroupModel) -> int:
    if group.kind == "finite":
        return int(group.identity())
    return 0


def regular_action(group: CompactGroupModel) -> IsometricAction:
    """G acting on itself by right multiplication."""
    perms = np.array(
        [[group.node_product(u, g) for u in range(group.order)] for g in range(group.order)],
        dtype=np.int64,
    )
    return IsometricAction(group, perms)


@dataclass(frozen=True, eq=False)
class PointMap:
    source: FiniteMMSpace
    target: FiniteMMSpace
    mapping: IntArray

    def __post_init__(self) -> None:
        if self.mapping.shape != (self.source.n_points,):
            raise ModelError("point map must be defined on every source point")
        if np.any((self.mapping < 0) | (self.mapping >= self.target.n_points)):
            raise ModelError("point map leaves the target")

    def pushforward(self) -> FloatArray:
        return np.bincount(
            self.mapping, weights=self.source.measure, minlength=self.target.n_points
        )


##############
# OPERATIONS #
##############


def quotient(
    space: FiniteMMSpace, act: IsometricAction
) -> tuple[FiniteMMSpace, PointMap]:
    """Orbit space with d̄(ū, v̄) = min_g d(u, v·g) and the pushforward
    measure."""
    labels = act.orbits()
    k = int(labels.max()) + 1 if labels.size else 0
    dist = np.zeros((k, k))
    members = [np.flatnonzero(labels == a) for a in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            d = float(np.min(space.dist[np.ix_(members[a], members[b])]))
            dist[a, b] = dist[b, a] = d
    measure = np.bincount(labels, weights=space.measure, minlength=k)
    qspace = FiniteMMSpace(dist=dist, measure=measure)
    return qspace, PointMap(space, qspace, labels)


@dataclass(frozen=True)
class SubmetryReport:
    ok: bool
    witness: tuple[int, float, int] | None = None


def check_submetry(
    space: FiniteMMSpace,
    act: IsometricAction,
    quotient_space: FiniteMMSpace | None = None,
    projection: PointMap | None = None,
) -> SubmetryReport:
    """
    π(B̄(u, r)) = B̄(π(u), r) for every centre u and every realised radius r.
    A failure reports the witness (u, r, ȳ) with ȳ in the symmetric
    difference.
    """
    if quotient_space is None or projection is None:
        quotient_space, projection = quotient(space, act)
    pi = projection.mapping
    qd = quotient_space.dist
    k = quotient_space.n_points
    for u in range(space.n_points):
        radii = np.unique(np.concatenate([space.dist[u], qd[pi[u]]]))
        for r in radii[np.isfinite(radii)]:
            image = np.zeros(k, dtype=bool)
            image[pi[space.dist[u] <= r]] = True
            ball = qd[pi[u]] <= r
            diff = np.flatnonzero(image != ball)
            if diff.size:
                return SubmetryReport(False, (u, float(r), int(diff[0])))
    return SubmetryReport(True)


def isometry_defect(phi: PointMap) -> float:
    """max(distortion, covering defect); φ is an ε-isometry for every ε
    strictly above the result."""
    f = phi.mapping
    src = phi.source.dist
    tgt = phi.target.dist
    distortion = float(np.max(_gap(src, tgt[np.ix_(f, f)]))) if f.size else 0.0
    covering = float(np.max(np.min(tgt[:, f], axis=1))) if f.size else np.inf
    return max(distortion, covering)


def equivariance_defect(
    phi: PointMap, act_source: IsometricAction, act_target: IsometricAction
) -> float:
    """sup over (u, γ) of d(φ(uγ), φ(u)γ)."""
    if act_source.perms.shape[0] != act_target.perms.shape[0]:
        raise ModelError("actions of different groups")
    f = phi.mapping
    lhs = f[act_source.perms]
    rhs = np.take_along_axis(act_target.perms, f[None, :].repeat(lhs.shape[0], 0), axis=1)
    return float(np.max(phi.target.dist[lhs, rhs]))


@dataclass(frozen=True, eq=False)
class InducedMapReport:
    phibar: PointMap
    defect: float
    eps_isometry: float
    eps_equivariance: float
    # (lhs, rhs) of the measure inequality, one row per test function
    measure_rows: list[tuple[float, float]] = field(default_factory=list)

    @property
    def bound(self) -> float:
        return 2 * max(self.eps_isometry, self.eps_equivariance)


def induced_quotient_map(
    phi: PointMap,
    act_source: IsometricAction,
    act_target: IsometricAction,
    section: Sequence[int] | None = None,
    test_functions: Sequence[ArrayLike] = (),
) -> InducedMapReport:
    """
    φ̄(x) = π(φ(s'(x))) between the quotients. With ε₀ the isometry defect
    and ε₁ the equivariance defect of φ, φ̄ is a 2·max(ε₀, ε₁)-isometry.
    Test functions are value vectors on the target quotient.
    """
    qsrc, pi_src = quotient(phi.source, act_source)
    qtgt, pi_tgt = quotient(phi.target, act_target)
    if section is None:
        sec = np.array(
            [int(np.flatnonzero(pi_src.mapping == x)[0]) for x in range(qsrc.n_points)],
            dtype=np.int64,
        )
    else:
        sec = np.asarray(section, dtype=np.int64)
        if sec.shape != (qsrc.n_points,) or not np.array_equal(
            pi_src.mapping[sec], np.arange(qsrc.n_points)
        ):
            raise ModelError("invalid section")
    phibar = PointMap(qsrc, qtgt, pi_tgt.mapping[phi.mapping[sec]])
    eps0 = isometry_defect(phi)
    eps1 = equivariance_defect(phi, act_source, act_target)
    defect = isometry_defect(phibar)

    rows = []
    mass_src = phi.source.measure
    for f in test_functions:
        fv = np.asarray(f, dtype=float)
        lhs = abs(float(fv @ phibar.pushforward() - fv @ qtgt.measure))
        via_bar = fv[phibar.mapping[pi_src.mapping]]
        via_phi = fv[pi_tgt.mapping[phi.mapping]]
        sup = float(np.max(np.abs(via_bar - via_phi))) if via_bar.size else 0.0
        lifted = fv[pi_tgt.mapping]
        rhs = sup * float(mass_src.sum()) + abs(
            float(lifted @ phi.pushforward() - lifted @ phi.target.measure)
        )
        rows.append((lhs, rhs))

    report = InducedMapReport(phibar, defect, eps0, eps1, rows)
    Logger.debug(
        f"induced quotient map: defect {defect} bound {report.bound} (eps0 {eps0}, eps1 {eps1})"
    )
    return report


def vague_gap(phi: PointMap, test_functions: Sequence[ArrayLike]) -> float:
    """max over tests of |∫f d(φ_*ν') − ∫f dν|."""
    push = phi.pushforward()
    gap = 0.0
    for f in test_functions:
        fv = np.asarray(f, dtype=float)
        gap = max(gap, abs(float(fv @ push - fv @ phi.target.measure)))
    return gap


#################
# SUBGROUPS, δ_V #
#################


@dataclass(frozen=True)
class Subgroup:
    name: str
    elements: tuple[int, ...]


def subgroups(group: CompactGroupModel, m_max: int = 24) -> list[Subgroup]:
    """
    Candidate closed subgroups as node-index sets. Finite groups: every
    subgroup generated by at most two elements. U(1) on m nodes: the Z_d
    with d | m and d ≤ m_max (Z_m itself stands for U(1)).
    """
    if group.kind == "u1":
        m = group.order
        return [
            Subgroup(f"Z{d}", tuple(range(0, m, m // d)))
            for d in range(1, m + 1)
            if m % d == 0 and (d <= m_max or d == m)
        ]
    if group.kind != "finite":
        raise ModelError("subgroup enumeration needs a finite node set")
    seen: dict[frozenset[int], Subgroup] = {}
    gens = list(itertools.combinations_with_replacement(range(group.order), 2))
    for a, b in gens:
        closure = {int(group.identity()), a, b}
        frontier = list(closure)
        while frontier:
            x = frontier.pop()
            for y in list(closure):
                for z in (group.multiply(x, y), group.multiply(y, x)):
                    if z not in closure:
                        closure.add(z)
                        frontier.append(z)
        key = frozenset(closure)
        if key not in seen:
            seen[key] = Subgroup(f"<{a},{b}>", tuple(sorted(closure)))
    return sorted(seen.values(), key=lambda h: (len(h.elements), h.elements))


@dataclass(frozen=True)
class DeltaVReport:
    values: FloatArray
    admissible: list[Subgroup]
    truncation: str


def delta_V(
    space: FiniteMMSpace,
    act: IsometricAction,
    rep: RepresentationModel,
    subgroup_list: Sequence[Subgroup],
    truncation: str = "exhaustive",
) -> DeltaVReport:
    """δ_V(u) = min over H with V^H = 0 of max_{h∈H} d(u, uh); inf when no
    candidate subgroup is admissible."""
    group = act.group
    admissible = [
        h for h in subgroup_list if fixed_space(group, rep, h.elements).shape[1] == 0
    ]
    n = space.n_points
    values = np.full(n, np.inf)
    for h in admissible:
        idx = np.asarray(h.elements, dtype=np.int64)
        sweep = np.max(space.dist[np.arange(n)[None, :], act.perms[idx]], axis=0)
        values = np.minimum(values, sweep)
    return DeltaVReport(values, admissible, truncation)


##################
# BUMP SECTIONS #
##################


class SeparationError(ModelError):
    pass


class StabilizerError(ModelError):
    pass


@dataclass(frozen=True, eq=False)
class BumpReport:
    count: int
    sections: list[FloatArray]
    gram: FloatArray
    cutoffs: list[FloatArray]


def _set_distance(dist_rows: FloatArray, mask: FloatArray) -> FloatArray:
    if not np.any(mask):
        return np.full(dist_rows.shape[0], np.inf)
    return np.min(dist_rows[:, mask], axis=1)  # type: ignore


def bump_dimension_bound(
    space: FiniteMMSpace,
    act: IsometricAction,
    rep: RepresentationModel,
    orbit_reps: Sequence[int],
    delta: float,
    vectors: Sequence[ArrayLike] | None = None,
) -> BumpReport:
    """
    Cut-offs f_i(u) = d(u, B(u_i,2δ)^c) / (d(u, B̄(u_i,δ)) + d(u, B(u_i,2δ)^c))
    averaged into equivariant sections f̂_i(u) = avg_γ f_i(uγ) ρ(γ) v_i.
    Returns the Gram rank of the sections, which must equal the number of
    orbits.
    """
    group = act.group
    qspace, pi = quotient(space, act)
    orbits = pi.mapping[np.asarray(orbit_reps, dtype=np.int64)]
    for a, b in itertools.combinations(range(len(orbit_reps)), 2):
        if qspace.dist[orbits[a], orbits[b]] < 4 * delta:
            raise SeparationError("orbits not 4δ-separated")

    d = space.dist
    n = space.n_points
    sections = []
    cutoffs = []
    for i, u in enumerate(orbit_reps):
        stab = act.stabilizer(u)
        if vectors is None:
            basis = fixed_space(group, rep, stab)
            if basis.shape[1] == 0:
                raise StabilizerError(f"no stabilizer-fixed vector at point {u}")
            v = basis[:, 0]
        else:
            v = np.asarray(vectors[i], dtype=float)
            v = v / np.linalg.norm(v)
            for h in stab:
                if not np.allclose(rep.rho(group.nodes[h]) @ v, v, atol=1e-10):
                    raise StabilizerError(f"vector {i} not fixed by the stabilizer of {u}")
        outside = d[u] >= 2 * delta
        inner = d[u] <= delta
        num = _set_distance(d, outside)
        den = _set_distance(d, inner) + num
        f = np.where(np.isinf(num), 1.0, num / np.where(den == 0, 1.0, den))
        cutoffs.append(f)
        sec = np.zeros((n, rep.dim))
        for w, g_idx in zip(group.haar_weights, range(group.order)):
            sec += w * np.outer(f[act.perms[g_idx]], rep.rho(group.nodes[g_idx]) @ v)
        sections.append(sec / group.total_mass())

    gram = np.array(
        [
            [float(np.sum(space.measure[:, None] * a * b)) for b in sections]
            for a in sections
        ]
    )
    count = int(np.linalg.matrix_rank(gram, tol=1e-10)) if sections else 0
    return BumpReport(count, sections, gram, cutoffs)
