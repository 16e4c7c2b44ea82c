from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg
from numpy.typing import ArrayLike, NDArray

from kkspectra.core.bundle import (
    BaseLattice,
    DiscreteConnection,
    codifferential_F,
    plaquette_curvature,
    ricci_h,
)
from kkspectra.core.group_rep import (
    CompactGroupModel,
    RepresentationModel,
    commutant_dimension,
    default_generators,
    discrete_casimir,
    irreps,
    isotypic_projector,
)
from kkspectra.core.mm_space import (
    FiniteMMSpace,
    IsometricAction,
    PointMap,
    graph_metric_space,
)
from kkspectra.utils.cover_graph import CoverGraph
from kkspectra.utils.errors import ConvergenceError, ModelError
from kkspectra.utils.logger import Logger

FloatArray = NDArray[np.float64]


#############
# OPERATORS #
#############


@dataclass(frozen=True, eq=False)
class SymmetricOperator:
    """
    A = M⁻¹K for a symmetric stiffness matrix K and a diagonal mass M, so A
    is self-adjoint for the measure-weighted inner product ⟨u, v⟩ = uᵀMv.
    """

    stiffness: sp.csr_matrix
    mass: FloatArray
    domain: str

    @property
    def dimension(self) -> int:
        return int(self.mass.shape[0])

    def scaled(self) -> sp.csr_matrix:
        """D^{-1/2} K D^{-1/2}: symmetric with the eigenvalues of A."""
        d = sp.diags(1.0 / np.sqrt(self.mass))
        return (d @ self.stiffness @ d).tocsr()

    def dense(self) -> FloatArray:
        return self.stiffness.toarray() / self.mass[:, None]  # type: ignore

    def symmetry_defect(self) -> float:
        diff = self.stiffness - self.stiffness.T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def quadratic_form(self, u: ArrayLike) -> float:
        v = np.asarray(u, dtype=float)
        return float(v @ (self.stiffness @ v))

    def norm(self, u: ArrayLike) -> float:
        v = np.asarray(u, dtype=float)
        return float(np.sqrt(v @ (self.mass * v)))


def _assemble(
    rows: list[int], cols: list[int], vals: list[float], n: int
) -> sp.csr_matrix:
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def base_laplacian(base: BaseLattice) -> SymmetricOperator:
    """Weighted graph Laplacian; on a torus grid the (2n+1)-point stencil
    with weights 1/h²."""
    cell = base.cell_volume()
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for (u, v), w in zip(base.edges, base.weights):
        u, v = int(u), int(v)
        rows += [u, v, u, v]
        cols += [u, v, v, u]
        vals += [cell * w, cell * w, -cell * w, -cell * w]
    k = _assemble(rows, cols, vals, base.n_vertices)
    return SymmetricOperator(k, np.full(base.n_vertices, cell), f"base[{base.kind}]")


def connection_laplacian(
    conn: DiscreteConnection, rep: RepresentationModel
) -> SymmetricOperator:
    """(Δ^A s)_x = Σ_y w_xy (s_x − ρ(U_xy) s_y) on V-valued vertex functions,
    index x·dim V + component."""
    base = conn.base
    d = rep.dim
    eye = np.eye(d)
    cell = base.cell_volume()
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for e, ((u, v), w) in enumerate(zip(base.edges, base.weights)):
        r = np.asarray(rep.rho(conn.link(e)), dtype=float)
        if r.shape != (d, d):
            raise ModelError("inconsistent dimensions")
        if not np.allclose(r @ r.T, eye, atol=1e-10):
            raise ModelError(f"representation {rep.name} is not orthogonal")
        u, v = int(u), int(v)
        for a in range(d):
            rows += [u * d + a, v * d + a]
            cols += [u * d + a, v * d + a]
            vals += [cell * w, cell * w]
            for b in range(d):
                if r[a, b] != 0.0:
                    rows += [u * d + a, v * d + b]
                    cols += [v * d + b, u * d + a]
                    vals += [-cell * w * r[a, b], -cell * w * r[a, b]]
    k = _assemble(rows, cols, vals, base.n_vertices * d)
    return SymmetricOperator(
        k, np.full(base.n_vertices * d, cell), f"connection[{rep.name}]"
    )


##########
# COVERS #
##########


def voltage_cover(
    conn: DiscreteConnection,
) -> tuple[CoverGraph, IsometricAction, PointMap]:
    """
    Voltage cover of a finite-group connection: vertices (x, γ) at index
    x·|G| + γ, an edge (x, γ)–(y, U_xy⁻¹γ) per base edge, deck action by
    right translation. The projection maps to the base shortest-path space.
    """
    group = conn.group
    if group.kind != "finite":
        raise ModelError("voltage covers need a finite group")
    base = conn.base
    order = group.order
    cover = CoverGraph(base.n_vertices, order)
    for e, ((x, y), w) in enumerate(zip(base.edges, base.weights)):
        u_inv = group.inverse(conn.link(e))
        for g in range(order):
            cover.add_horizontal(
                cover.index(int(x), g),
                cover.index(int(y), int(group.multiply(u_inv, g))),
                e,
                float(w),
            )

    n = base.n_vertices * order
    perms = np.array(
        [
            [
                x * order + group.node_product(g, h)
                for x in range(base.n_vertices)
                for g in range(order)
            ]
            for h in range(order)
        ],
        dtype=np.int64,
    )
    act = IsometricAction(group, perms)

    lengths = {e: float(ln) for e, ln in enumerate(base.lengths_of_edges)}
    horizontal = cover.horizontal_subgraph()
    for u, v, d in cover.graph.edges(data=True):
        if d["kind"] == "horizontal" and horizontal.has_edge(u, v):
            horizontal.edges[u, v]["length"] = lengths[d["edge"]]
    cell = base.cell_volume()
    space = graph_metric_space(horizontal, weight="length", measure=np.full(n, cell))
    target = base.metric_space()
    target = FiniteMMSpace(target.dist, np.full(base.n_vertices, cell * order))
    projection = PointMap(space, target, np.repeat(np.arange(base.n_vertices), order))
    Logger.debug(
        f"voltage cover over {group.name}: {n} vertices, {cover.components()} components"
    )
    return cover, act, projection


def add_fiber_edges(
    cover: CoverGraph,
    group: CompactGroupModel,
    generators: Sequence[int] | None = None,
    weight: float = 1.0,
) -> None:
    """Record the vertical Cayley edges (x, γ)–(x, sγ) on the cover graph."""
    gens = default_generators(group) if generators is None else list(generators)
    for x in range(cover.n_base):
        for g in range(cover.order):
            for s in gens:
                t = int(group.multiply(s, g))
                if g <= t:
                    cover.add_vertical(cover.index(x, g), cover.index(x, t), s, weight)


def total_laplacian(
    cover: CoverGraph,
    group: CompactGroupModel,
    fiber_weight: float,
    generators: Sequence[int] | None = None,
    cell_volume: float = 1.0,
) -> SymmetricOperator:
    """Horizontal cover edges plus vertical Cayley edges (x, γ)–(x, sγ) with
    weight fiber_weight for every s in a symmetric generating set."""
    gens = default_generators(group) if generators is None else list(generators)
    n = cover.number_of_nodes()
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for u, v, w in cover.horizontal_edges():
        rows += [u, v, u, v]
        cols += [u, v, v, u]
        vals += [cell_volume * w, cell_volume * w, -cell_volume * w, -cell_volume * w]
    cw = cell_volume * fiber_weight
    for x in range(cover.n_base):
        for g in range(cover.order):
            u = cover.index(x, g)
            for s in gens:
                rows += [u, u]
                cols += [u, cover.index(x, int(group.multiply(s, g)))]
                vals += [cw, -cw]
    k = _assemble(rows, cols, vals, n)
    return SymmetricOperator(k, np.full(n, cell_volume), f"total[{group.name}]")


def commutation_defect(op: SymmetricOperator, act: IsometricAction) -> float:
    """max_g ‖R(g) K R(g)ᵀ − K‖_max."""
    worst = 0.0
    for g in range(act.group.order):
        r = sp.csr_matrix(act.matrix(g))
        diff = r @ op.stiffness @ r.T - op.stiffness
        if diff.nnz:
            worst = max(worst, float(abs(diff).max()))
    return worst


#########
# EIGEN #
#########


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: FloatArray
    vectors: FloatArray | None
    method: str
    residuals: FloatArray

    def clusters(self, rel_tol: float = 1e-6) -> list[list[int]]:
        """Index groups of numerically equal eigenvalues."""
        groups: list[list[int]] = []
        for i, lam in enumerate(self.values):
            if groups and abs(lam - self.values[groups[-1][-1]]) <= rel_tol * max(
                1.0, abs(lam)
            ):
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups

    def smallest(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0

    def rows(self, scenario: str, i: int = 0) -> list[list[Any]]:
        return [
            [scenario, i, j, float(lam), float(res)]
            for j, (lam, res) in enumerate(zip(self.values, self.residuals))
        ]

    def to_json(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "values": [float(x) for x in self.values],
            "residuals": [float(x) for x in self.residuals],
        }


def eigs(
    op: SymmetricOperator,
    count: int | None = None,
    seed: int = 0,
    dense_limit: int = 2000,
    maxiter: int | None = None,
) -> Spectrum:
    """
    Lowest eigenpairs of A = M⁻¹K, eigenvectors M-orthonormal. Dense
    LAPACK below dense_limit, ARPACK shift-invert Lanczos above, with a
    start vector drawn from the seed.
    """
    n = op.dimension
    count = n if count is None else count
    if count > n or count < 0:
        raise ModelError(f"count {count} exceeds dimension {n}")
    if count == 0:
        return Spectrum(np.zeros(0), np.zeros((n, 0)), "empty", np.zeros(0))
    s = op.scaled()
    if n <= dense_limit or count >= n - 1:
        vals, vecs = scipy.linalg.eigh(s.toarray(), subset_by_index=[0, count - 1])
        method = "dense"
    else:
        shift = -1e-3 * max(float(np.mean(s.diagonal())), 1e-12)
        rng = np.random.default_rng(seed)
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(
                s,
                k=count,
                sigma=shift,
                which="LM",
                v0=rng.uniform(-1, 1, n),
                maxiter=maxiter or 50 * n,
            )
        except scipy.sparse.linalg.ArpackNoConvergence as e:
            raise ConvergenceError(
                f"eigensolver did not converge for {op.domain}: "
                f"{len(e.eigenvalues)} of {count} pairs"
            ) from e
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        method = "arpack"
    residuals = np.linalg.norm(s @ vecs - vecs * vals[None, :], axis=0)
    scale = max(1.0, float(abs(s).max()) if s.nnz else 1.0)
    if np.any(residuals > 1e-9 * scale * max(1.0, np.sqrt(n))):
        Logger.warn(f"eigs({op.domain}): residual {float(residuals.max())} above tolerance")
    if vals[0] < -1e-10 * scale:
        Logger.warn(f"eigs({op.domain}): operator not positive semidefinite ({vals[0]})")
    Logger.debug(f"eigs({op.domain}): {count} of {n} via {method}")
    return Spectrum(
        np.asarray(vals, dtype=float), vecs / np.sqrt(op.mass)[:, None], method, residuals
    )


def partial_heat_trace(spec: Spectrum, times: Sequence[float]) -> FloatArray:
    """Σ_j e^{−tλ_j} over the computed eigenvalues."""
    t = np.asarray(times, dtype=float)
    return np.exp(-np.outer(t, spec.values)).sum(axis=1)  # type: ignore


#############
# ISOTYPIC #
#############


def isotypic_restriction(
    op: SymmetricOperator, act: IsometricAction, rep: RepresentationModel
) -> SymmetricOperator:
    """Restriction of A ⊗ id_V to (L²(P) ⊗ V)^G on an orthonormal basis of
    the range of the isotypic projector."""
    defect = commutation_defect(op, act)
    if defect > 1e-9:
        raise ModelError(f"operator does not commute with the action (defect {defect})")
    proj = isotypic_projector(act.group, rep, act.matrices(), op.dimension)
    basis = scipy.linalg.orth(proj, rcond=1e-8)
    big = np.kron(op.scaled().toarray(), np.eye(rep.dim))
    reduced = basis.T @ big @ basis
    reduced = (reduced + reduced.T) / 2
    return SymmetricOperator(
        sp.csr_matrix(reduced), np.ones(basis.shape[1]), f"isotypic[{rep.name}]"
    )


def verify_shift(iso: Spectrum, conn: Spectrum, chi: float) -> float:
    """max_j |λ_j^iso − (λ_j^conn + χ)|."""
    if iso.values.shape != conn.values.shape:
        raise ModelError("count mismatch")
    if not iso.values.size:
        return 0.0
    return float(np.max(np.abs(iso.values - (conn.values + chi))))


@dataclass(frozen=True, eq=False)
class CoverDecomposition:
    rows: list[dict[str, Any]]
    total: Spectrum
    union_gap: float
    dimension_count: int


def cover_decomposition(
    conn: DiscreteConnection,
    fiber_weight: float = 1.0,
    generators: Sequence[int] | None = None,
    reps: Sequence[RepresentationModel] | None = None,
) -> CoverDecomposition:
    """
    Finite-group check of the isomorphism between isotypic parts of the
    total Laplacian and shifted connection Laplacians:
    spec(Δ_P) = ⊎_ρ mult(ρ)·(spec(Δ^{A_ρ}) + χ_ρ), mult(ρ) = dim ρ / dim End_G(ρ).
    """
    group = conn.group
    gens = default_generators(group) if generators is None else list(generators)
    cover, act, _ = voltage_cover(conn)
    total = total_laplacian(cover, group, fiber_weight, gens, conn.base.cell_volume())
    total_spec = eigs(total)
    union: list[float] = []
    rows = []
    counted = 0
    for rep in irreps(group) if reps is None else reps:
        chi = discrete_casimir(group, rep, gens, fiber_weight)
        conn_spec = eigs(connection_laplacian(conn, rep))
        iso_spec = eigs(isotypic_restriction(total, act, rep))
        gap = verify_shift(iso_spec, conn_spec, chi)
        mult = rep.dim // commutant_dimension(group, rep)
        union.extend(list(conn_spec.values + chi) * mult)
        counted += mult * iso_spec.values.size
        rows.append(
            {"irrep": rep.name, "dim": rep.dim, "multiplicity": mult, "chi": chi, "gap": gap}
        )
    if counted != total.dimension:
        raise ModelError(
            f"irreps do not exhaust L²(P): {counted} of {total.dimension} dimensions"
        )
    union_gap = float(np.max(np.abs(np.sort(union) - total_spec.values)))
    Logger.debug(f"cover decomposition over {group.name}: union gap {union_gap}")
    return CoverDecomposition(rows, total_spec, union_gap, counted)


############
# TRANSFER #
############


@dataclass(frozen=True, eq=False)
class TransferMap:
    """Φ: functions on the target → functions on the source."""

    matrix: sp.csr_matrix
    source_mass: FloatArray
    target_mass: FloatArray
    point_map: PointMap | None = None

    @staticmethod
    def from_point_map(phi: PointMap, domain: ArrayLike | None = None) -> TransferMap:
        """Φ(f) = f∘φ, zero outside the boolean source mask `domain`."""
        n = phi.source.n_points
        keep = np.ones(n, dtype=bool) if domain is None else np.asarray(domain, dtype=bool)
        rows = np.flatnonzero(keep)
        mat = sp.csr_matrix(
            (np.ones(rows.size), (rows, phi.mapping[rows])),
            shape=(n, phi.target.n_points),
        )
        return TransferMap(mat, phi.source.measure, phi.target.measure, phi)

    def apply(self, f: ArrayLike) -> FloatArray:
        return self.matrix @ np.asarray(f, dtype=float)  # type: ignore

    def tensor(self, dim: int) -> TransferMap:
        """Φ ⊗ id_V on V-valued functions."""
        mat = sp.kron(self.matrix, sp.identity(dim)).tocsr()
        return TransferMap(
            mat, np.repeat(self.source_mass, dim), np.repeat(self.target_mass, dim)
        )

    def source_norm(self, u: ArrayLike) -> float:
        v = np.asarray(u, dtype=float)
        return float(np.sqrt(v @ (self.source_mass * v)))


@dataclass(frozen=True, eq=False)
class AveragedTransfer:
    transfer: TransferMap
    defect: float
    equivariance_residual: float


def _equivariance_residual(
    mat: sp.csr_matrix, act_source: IsometricAction, act_target: IsometricAction
) -> float:
    worst = 0.0
    for g in range(act_source.group.order):
        rs = sp.csr_matrix(act_source.matrix(g))
        rt = sp.csr_matrix(act_target.matrix(g))
        diff = mat @ rt - rs @ mat
        if diff.nnz:
            worst = max(worst, float(abs(diff).max()))
    return worst


def averaged_transfer(
    phi: TransferMap,
    act_source: IsometricAction,
    act_target: IsometricAction,
    rep: RepresentationModel | None = None,
    test_functions: Sequence[ArrayLike] | None = None,
) -> AveragedTransfer:
    """
    Φ̂ = (1/μ(G)) Σ_γ w_γ R_s(γ⁻¹) Φ R_t(γ), exactly equivariant. The defect
    is max over test functions of ‖Φf − Φ̂f‖_∞; the default tests are the
    distance functions of the target, for which it is at most the
    equivariance defect of the underlying point map.
    """
    group = act_source.group
    if act_target.group.order != group.order:
        raise ModelError("actions of different groups")
    acc = sp.csr_matrix(phi.matrix.shape)
    for g, w in enumerate(group.haar_weights):
        rs = sp.csr_matrix(act_source.matrix(g))
        rt = sp.csr_matrix(act_target.matrix(g))
        acc = acc + w * (rs.T @ phi.matrix @ rt)
    mat = (acc / group.total_mass()).tocsr()
    residual = _equivariance_residual(mat, act_source, act_target)

    if test_functions is None:
        if phi.point_map is None:
            tests: list[FloatArray] = []
        else:
            dist = phi.point_map.target.dist
            tests = [np.where(np.isinf(row), 0.0, row) for row in dist]
    else:
        tests = [np.asarray(f, dtype=float) for f in test_functions]
    defect = 0.0
    for f in tests:
        diff = phi.matrix @ f - mat @ f
        if diff.size:
            defect = max(defect, float(np.max(np.abs(diff))))

    out = TransferMap(mat, phi.source_mass, phi.target_mass, phi.point_map)
    if rep is not None:
        out = out.tensor(rep.dim)
    return AveragedTransfer(out, defect, residual)


###############
# CONVERGENCE #
###############


@dataclass(frozen=True)
class StrongConvergenceReport:
    defects: list[float]
    probe_gaps: list[float]


def strong_convergence_defect(
    u_sequence: Sequence[ArrayLike],
    u_limit: ArrayLike,
    transfers: Sequence[TransferMap],
    probes: Sequence[ArrayLike],
) -> StrongConvergenceReport:
    """
    For each probe ũ_k the tail-sup over the second half of the sequence of
    ‖Φ_i(ũ_k) − u_i‖, and the distance ‖ũ_k − u_∞‖ in the limit space.
    """
    if len(u_sequence) != len(transfers):
        raise ModelError("one transfer map per sequence member required")
    limit = np.asarray(u_limit, dtype=float)
    tail = range(len(u_sequence) // 2, len(u_sequence))
    defects = []
    gaps = []
    for probe in probes:
        p = np.asarray(probe, dtype=float)
        worst = 0.0
        for i in tail:
            t = transfers[i]
            worst = max(worst, t.source_norm(t.apply(p) - np.asarray(u_sequence[i])))
        defects.append(worst)
        mass = transfers[0].target_mass if transfers else np.ones_like(p)
        gaps.append(float(np.sqrt((p - limit) @ (mass * (p - limit)))))
    return StrongConvergenceReport(defects, gaps)


@dataclass(frozen=True)
class MoscoReport:
    recovery_defects: list[list[float]]
    liminf_margins: list[float]


def mosco_probe(
    forms: Sequence[SymmetricOperator],
    limit: SymmetricOperator,
    transfers: Sequence[TransferMap],
    tests: Sequence[ArrayLike],
    weak_families: Sequence[tuple[ArrayLike, Sequence[ArrayLike]]] = (),
    recovery: Callable[[int, FloatArray], FloatArray] | None = None,
) -> MoscoReport:
    """
    Recovery defects |E_i(u_i) − E_∞(u_∞)| with u_i = Φ_i(u_∞) by default,
    and for each weakly convergent family (u_∞, [u_i]) the margin
    E_∞(u_∞) − min over the tail of E_i(u_i); a nonpositive margin is
    consistent with the liminf inequality.
    """
    if len(forms) != len(transfers):
        raise ModelError("one transfer map per form required")
    build = recovery or (lambda i, u: transfers[i].apply(u))
    defects = []
    for u in tests:
        uv = np.asarray(u, dtype=float)
        e_lim = limit.quadratic_form(uv)
        defects.append(
            [abs(f.quadratic_form(build(i, uv)) - e_lim) for i, f in enumerate(forms)]
        )
    margins = []
    for u_lim, family in weak_families:
        tail = range(len(family) // 2, len(family))
        low = min(forms[i].quadratic_form(family[i]) for i in tail)
        margins.append(limit.quadratic_form(u_lim) - low)
    return MoscoReport(defects, margins)


@dataclass(frozen=True)
class ContinuityRow:
    i: int
    j: int
    value: float
    gap: float
    angle: float


def eigen_continuity(
    ops: Sequence[SymmetricOperator],
    limit: SymmetricOperator,
    transfers: Sequence[TransferMap],
    j_max: int,
    cluster_tol: float = 1e-6,
    seed: int = 0,
) -> list[ContinuityRow]:
    """
    λ_{i,j} against λ_{∞,j} for j < j_max, and per limit eigenvalue cluster
    the largest principal angle between the transferred limit eigenspace
    and the matching eigenspace of A_i (both in the measure inner product).
    """
    count = min(limit.dimension, j_max + 4)
    lim = eigs(limit, count, seed)
    clusters = [c for c in lim.clusters(cluster_tol) if c[0] < j_max]
    if clusters and clusters[-1][-1] >= count - 1 and count < limit.dimension:
        Logger.warn("eigen_continuity: last cluster may be truncated")
    rows = []
    for i, (op, t) in enumerate(zip(ops, transfers)):
        spec = eigs(op, min(op.dimension, count), seed)
        assert spec.vectors is not None and lim.vectors is not None
        sqrt_m = np.sqrt(op.mass)[:, None]
        angle_of: dict[int, float] = {}
        for c in clusters:
            if c[-1] >= spec.values.size:
                continue
            moved = sqrt_m * (t.matrix @ lim.vectors[:, c])
            own = sqrt_m * spec.vectors[:, c]
            ang = float(np.max(scipy.linalg.subspace_angles(moved, own)))
            for j in c:
                angle_of[j] = ang
        for j in range(min(j_max, spec.values.size)):
            rows.append(
                ContinuityRow(
                    i,
                    j,
                    float(spec.values[j]),
                    float(abs(spec.values[j] - lim.values[j])),
                    angle_of.get(j, float("nan")),
                )
            )
    return rows


@dataclass(frozen=True)
class FamilyBounds:
    """Declared Ric ≥ κ, diam ≤ D and sup|F|, sup|(d^∇)*F| ≤ N."""

    kappa: float = -np.inf
    diameter: float = np.inf
    n: float = np.inf


@dataclass(frozen=True)
class LowerBoundReport:
    value: float
    kappa: float
    diameter: float
    n: float
    rows: list[dict[str, Any]] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)


def _bound_violations(row: dict[str, Any], bounds: FamilyBounds) -> list[str]:
    out = []
    if row["kappa"] < bounds.kappa:
        out.append(f"member {row['member']}: Ric bound {row['kappa']} < {bounds.kappa}")
    if row["diameter"] > bounds.diameter:
        out.append(f"member {row['member']}: diameter {row['diameter']} > {bounds.diameter}")
    if row["N"] > bounds.n:
        out.append(f"member {row['member']}: curvature {row['N']} > {bounds.n}")
    return out


def lower_bound_probe(
    family: Sequence[tuple[DiscreteConnection, RepresentationModel]],
    j: int,
    bounds: FamilyBounds | None = None,
) -> LowerBoundReport:
    """
    Empirical min of λ_j over a family together with its bound parameters:
    κ the base Ricci bound (0 on flat grids, unknown on graphs), D the largest
    diameter and N the largest of sup|F| and sup|(d^∇)*F|. kappa_total is the
    Kaluza–Klein Ricci bound where ricci_h applies. Members outside the
    declared bounds are listed in violations, not rejected.
    """
    rows: list[dict[str, Any]] = []
    violations: list[str] = []
    for idx, (conn, rep) in enumerate(family):
        base, group = conn.base, conn.group
        lam = float(eigs(connection_laplacian(conn, rep), j + 1).values[j])
        sup_f = sup_d = kappa_total = float("nan")
        if base.is_grid and group.is_lie and base.dims >= 2:
            curv = plaquette_curvature(conn)
            sup_f = curv.sup_norm()
            if group.is_abelian:
                sup_d = float(np.max(np.abs(codifferential_F(base, curv))))
                kappa_total = ricci_h(base, curv, group.sigma, group).kappa
        row = {
            "member": idx,
            "lambda": lam,
            "sup_F": sup_f,
            "sup_dstarF": sup_d,
            "kappa": 0.0 if base.is_grid else float("nan"),
            "kappa_total": kappa_total,
            "diameter": base.diameter(),
            "N": float(np.nanmax([sup_f, sup_d, 0.0])),
        }
        if bounds is not None:
            violations += _bound_violations(row, bounds)
        rows.append(row)
    for v in violations:
        Logger.warn(f"lower_bound_probe: {v}")
    if not rows:
        nan = float("nan")
        return LowerBoundReport(float("inf"), nan, nan, nan)
    kappas = [r["kappa"] for r in rows if not np.isnan(r["kappa"])]
    return LowerBoundReport(
        min(r["lambda"] for r in rows),
        min(kappas) if kappas else float("nan"),
        max(r["diameter"] for r in rows),
        max(r["N"] for r in rows),
        rows,
        violations,
    )


def operator_triplets(op: SymmetricOperator) -> tuple[int, int, list[tuple[int, int, float]]]:
    """(rows, cols, [(i, j, A_ij)]) of A = M⁻¹K in coordinate-list form."""
    a = sp.diags(1.0 / op.mass) @ op.stiffness
    coo = sp.coo_matrix(a)
    entries = sorted(
        (int(i), int(j), float(v)) for i, j, v in zip(coo.row, coo.col, coo.data) if v != 0
    )
    return op.dimension, op.dimension, entries
