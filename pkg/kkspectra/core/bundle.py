from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Sequence

import networkx as nx  # type: ignore
import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from kkspectra.core.group_rep import CompactGroupModel
from kkspectra.core.mm_space import FiniteMMSpace, graph_metric_space
from kkspectra.utils.errors import ModelError
from kkspectra.utils.logger import Logger

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


########
# BASE #
########


@dataclass(frozen=True, eq=False)
class BaseLattice:
    """
    Base space of a discretised bundle. A torus grid has vertices in
    row-major multi-index order and canonical edges x → x + e_a stored at
    index a·N + x with weight 1/h_a². A graph base has edges (u, v), u < v,
    in sorted order.
    """

    kind: str
    n_vertices: int
    edges: IntArray
    weights: FloatArray
    lengths_of_edges: FloatArray
    sizes: tuple[int, ...] = ()
    lengths: tuple[float, ...] = ()
    graph: nx.Graph | None = None

    @property
    def dims(self) -> int:
        return len(self.sizes)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def is_grid(self) -> bool:
        return self.kind == "torus_grid"

    def spacing(self) -> FloatArray:
        return np.asarray(self.lengths) / np.asarray(self.sizes)

    def cell_volume(self) -> float:
        return float(np.prod(self.spacing())) if self.is_grid else 1.0

    def volume(self) -> float:
        return self.cell_volume() * self.n_vertices

    def multi_index(self) -> IntArray:
        return np.stack(np.unravel_index(np.arange(self.n_vertices), self.sizes), axis=1)

    def coordinates(self) -> FloatArray:
        return self.multi_index() * self.spacing()[None, :]  # type: ignore

    def shift(self, axis: int, step: int = 1) -> IntArray:
        """Vertex index of x + step·e_axis for every vertex x."""
        idx = self.multi_index()
        idx[:, axis] = (idx[:, axis] + step) % self.sizes[axis]
        return np.ravel_multi_index(tuple(idx.T), self.sizes).astype(np.int64)  # type: ignore

    def edge_index(self, axis: int, x: int | IntArray) -> Any:
        return axis * self.n_vertices + x

    @cached_property
    def lookup(self) -> dict[tuple[int, int], tuple[int, bool]]:
        """(x, y) → (edge index, forward?) for every oriented edge; parallel
        edges keep the first index."""
        table: dict[tuple[int, int], tuple[int, bool]] = {}
        for e, (u, v) in enumerate(self.edges):
            table.setdefault((int(u), int(v)), (e, True))
            table.setdefault((int(v), int(u)), (e, False))
        return table

    def to_networkx(self) -> nx.Graph:
        if self.graph is not None:
            return self.graph
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        for (u, v), ln in zip(self.edges, self.lengths_of_edges):
            g.add_edge(int(u), int(v), length=float(ln))
        return g

    def metric_space(self) -> FiniteMMSpace:
        return graph_metric_space(self.to_networkx(), weight="length")

    def diameter(self) -> float:
        if self.is_grid:
            return float(np.linalg.norm(np.asarray(self.lengths) / 2))
        return float(nx.diameter(self.to_networkx(), weight="length"))


def torus_grid(sizes: Sequence[int], lengths: Sequence[float] | None = None) -> BaseLattice:
    sizes = tuple(int(m) for m in sizes)
    if any(m < 2 for m in sizes):
        raise ModelError("torus grid sizes must be at least 2")
    lens = tuple(float(x) for x in (lengths or [2 * np.pi] * len(sizes)))
    if len(lens) != len(sizes) or any(x <= 0 for x in lens):
        raise ModelError("torus grid lengths must be positive, one per axis")
    n = int(np.prod(sizes))
    base = BaseLattice(
        kind="torus_grid",
        n_vertices=n,
        edges=np.zeros((0, 2), dtype=np.int64),
        weights=np.zeros(0),
        lengths_of_edges=np.zeros(0),
        sizes=sizes,
        lengths=lens,
    )
    h = base.spacing()
    edges = np.concatenate(
        [np.stack([np.arange(n), base.shift(a)], axis=1) for a in range(len(sizes))]
    )
    object.__setattr__(base, "edges", edges.astype(np.int64))
    object.__setattr__(base, "weights", np.repeat(1 / h**2, n))
    object.__setattr__(base, "lengths_of_edges", np.repeat(h, n))
    return base


def graph_base(graph: nx.Graph, weight: str = "weight") -> BaseLattice:
    if graph.number_of_nodes() == 0:
        raise ModelError("empty base graph")
    if not nx.is_connected(graph):
        raise ModelError("base graph must be connected")
    g = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    pairs = sorted((min(u, v), max(u, v), d) for u, v, d in g.edges(data=True))
    edges = np.array([[u, v] for u, v, _ in pairs], dtype=np.int64).reshape(-1, 2)
    weights = np.array([float(d.get(weight, 1.0)) for _, _, d in pairs])
    lengths = np.array([float(d.get("length", 1.0)) for _, _, d in pairs])
    for u, v, d in g.edges(data=True):
        d.setdefault("length", 1.0)
    return BaseLattice(
        kind="graph",
        n_vertices=g.number_of_nodes(),
        edges=edges,
        weights=weights,
        lengths_of_edges=lengths,
        graph=g,
    )


def cycle_base(m: int) -> BaseLattice:
    if m == 1:
        g = nx.Graph()
        g.add_node(0)
        return graph_base(g)
    return graph_base(nx.cycle_graph(m))


##############
# CONNECTION #
##############


@dataclass(frozen=True, eq=False)
class DiscreteConnection:
    """Link variables U_e ∈ G on the canonical edges; the reversed edge
    carries U_e⁻¹."""

    base: BaseLattice
    group: CompactGroupModel
    links: NDArray[Any]
    smooth_gauge: FloatArray | None = None

    def link(self, e: int, forward: bool = True) -> Any:
        g = self.links[e]
        if self.group.kind == "finite":
            g = int(g)
        elif self.group.kind == "u1":
            g = float(g)
        return g if forward else self.group.inverse(g)

    def transport(self, x: int, y: int) -> Any:
        """U_xy for adjacent vertices x, y."""
        if (x, y) not in self.base.lookup:
            raise ModelError(f"vertices {x} and {y} are not adjacent")
        e, forward = self.base.lookup[(x, y)]
        return self.link(e, forward)

    def axis_links(self, axis: int) -> NDArray[Any]:
        assert self.base.is_grid, "axis links need a torus grid"
        n = self.base.n_vertices
        return self.links[axis * n : (axis + 1) * n]


def _identity_links(base: BaseLattice, group: CompactGroupModel) -> NDArray[Any]:
    e = base.n_edges
    if group.kind == "finite":
        return np.full(e, group.identity(), dtype=np.int64)
    if group.kind == "u1":
        return np.zeros(e)
    return np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (e, 1))


def trivial_connection(base: BaseLattice, group: CompactGroupModel) -> DiscreteConnection:
    return DiscreteConnection(base, group, _identity_links(base, group))


def connection_from_links(
    base: BaseLattice, group: CompactGroupModel, links: Sequence[Any]
) -> DiscreteConnection:
    arr = np.asarray(links)
    if arr.shape[0] != base.n_edges:
        raise ModelError("one link per base edge required")
    if group.kind == "finite":
        arr = arr.astype(np.int64)
        if np.any((arr < 0) | (arr >= group.order)):
            raise ModelError("link is not a group element")
    return DiscreteConnection(base, group, arr)


def connection_from_flux(
    base: BaseLattice, group: CompactGroupModel, k: int
) -> DiscreteConnection:
    """
    Landau gauge on a 2D torus grid with m_0 × m_1 vertices: the axis-1 link
    at column a carries 2πk·a/(m_0m_1), the axis-0 links of the wrap column
    a = m_0 − 1 carry −2πk·b/m_1. Every plaquette phase is 2πk/(m_0m_1)
    mod 2π, so the total flux is 2πk.
    """
    if not base.is_grid or base.dims != 2:
        raise ModelError("flux connections need a 2D torus grid")
    if group.kind != "u1":
        raise ModelError("flux connections need U(1)")
    m0, m1 = base.sizes
    idx = base.multi_index()
    a, b = idx[:, 0], idx[:, 1]
    theta0 = np.where(a == m0 - 1, -2 * np.pi * k * b / m1, 0.0)
    theta1 = 2 * np.pi * k * a / (m0 * m1)
    links = np.mod(np.concatenate([theta0, theta1]), 2 * np.pi)
    return DiscreteConnection(base, group, links)


def connection_from_gauge_field(
    base: BaseLattice,
    group: CompactGroupModel,
    field: Callable[[FloatArray], FloatArray],
) -> DiscreteConnection:
    """U_e = exp(h_a A_a(midpoint)) for A given as a callable returning
    A_i^α at an (N, n) array of points, shape (N, n, k). Second order in h."""
    if not base.is_grid:
        raise ModelError("gauge fields need a torus grid")
    if not group.is_lie:
        raise ModelError("gauge fields need a Lie group")
    x = base.coordinates()
    h = base.spacing()
    links = []
    for a in range(base.dims):
        mid = x.copy()
        mid[:, a] += h[a] / 2
        vals = np.asarray(field(mid))[:, a, :] * h[a]
        links.extend(group.exp(v) for v in vals)
    if group.kind == "u1":
        arr = np.asarray(links, dtype=float)
    else:
        arr = np.stack(links)
    return DiscreteConnection(base, group, arr, smooth_gauge=np.asarray(field(x)))


def connection_from_holonomy(
    base: BaseLattice, group: CompactGroupModel, holonomy: Sequence[float]
) -> DiscreteConnection:
    """
    Flat U(1) connection. Torus grid: total holonomy θ_a around each axis,
    spread uniformly. Cycle graph: total holonomy θ around the cycle
    0 → 1 → … → m−1 → 0.
    """
    if group.kind != "u1":
        raise ModelError("holonomy connections need U(1)")
    if base.is_grid:
        if len(holonomy) != base.dims:
            raise ModelError("one holonomy per axis required")
        links = np.concatenate(
            [np.full(base.n_vertices, th / m) for th, m in zip(holonomy, base.sizes)]
        )
        return DiscreteConnection(base, group, np.mod(links, 2 * np.pi))
    m = base.n_vertices
    step = float(holonomy[0]) / m
    links = np.array(
        [step if (v - u) % m == 1 else -step for u, v in base.edges], dtype=float
    )
    return DiscreteConnection(base, group, np.mod(links, 2 * np.pi))


def random_connection(
    base: BaseLattice, group: CompactGroupModel, seed: int, scale: float = 1.0
) -> DiscreteConnection:
    rng = np.random.default_rng(seed)
    e = base.n_edges
    if group.kind == "finite":
        return DiscreteConnection(base, group, rng.integers(0, group.order, e))
    if group.kind == "u1":
        return DiscreteConnection(
            base, group, np.mod(rng.uniform(-np.pi, np.pi, e) * scale, 2 * np.pi)
        )
    return DiscreteConnection(
        base, group, np.stack([group.exp(v) for v in rng.normal(0, scale, (e, 3))])
    )


def random_gauge(
    base: BaseLattice, group: CompactGroupModel, seed: int
) -> list[Any]:
    rng = np.random.default_rng(seed)
    n = base.n_vertices
    if group.kind == "finite":
        return [int(g) for g in rng.integers(0, group.order, n)]
    if group.kind == "u1":
        return [float(t) for t in rng.uniform(0, 2 * np.pi, n)]
    return [group.exp(v) for v in rng.normal(0, 1.0, (n, 3))]


def gauge_transform(conn: DiscreteConnection, gamma: Sequence[Any]) -> DiscreteConnection:
    """U'_xy = γ(x)⁻¹ U_xy γ(y)."""
    group = conn.group
    if len(gamma) != conn.base.n_vertices:
        raise ModelError("one gauge element per vertex required")
    new = []
    for e, (x, y) in enumerate(conn.base.edges):
        g = group.multiply(
            group.multiply(group.inverse(gamma[int(x)]), conn.link(e)), gamma[int(y)]
        )
        new.append(g)
    arr = np.stack(new) if group.kind == "su2" else np.asarray(new)
    return DiscreteConnection(conn.base, group, arr, conn.smooth_gauge)


def connection_to_json(conn: DiscreteConnection) -> dict[str, Any]:
    """Links as group-element encodings: index, angle or quaternion."""
    base = conn.base
    doc: dict[str, Any] = {
        "group": {"kind": conn.group.kind, "name": conn.group.name},
        "base": {"kind": base.kind},
        "links": conn.links.tolist(),
    }
    if base.is_grid:
        doc["base"].update(sizes=list(base.sizes), lengths=list(base.lengths))
    else:
        doc["base"]["edges"] = base.edges.tolist()
    return doc


def connection_from_json(doc: dict[str, Any], group: CompactGroupModel) -> DiscreteConnection:
    b = doc["base"]
    if b["kind"] == "torus_grid":
        base = torus_grid(b["sizes"], b["lengths"])
    else:
        base = graph_base(nx.Graph([tuple(e) for e in b["edges"]]))
    if doc["group"]["kind"] != group.kind:
        raise ModelError("connection document is for another group")
    return connection_from_links(base, group, doc["links"])


#############
# CURVATURE #
#############


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """F_{ij}^α per vertex (average of the four plaquettes touching the
    vertex) and per plaquette (based at its lower corner), both of shape
    (N, n, n, k)."""

    base: BaseLattice
    values: FloatArray
    plaquette: FloatArray
    sigma: FloatArray

    @staticmethod
    def constant(base: BaseLattice, F: ArrayLike, sigma: ArrayLike) -> CurvatureField:
        f = np.asarray(F, dtype=float)
        s = np.atleast_2d(np.asarray(sigma, dtype=float))
        if f.ndim == 2:
            f = f[:, :, None]
        if f.shape != (base.dims, base.dims, s.shape[0]):
            raise ModelError("inconsistent dimensions")
        if not np.allclose(f, -f.transpose(1, 0, 2)):
            raise ModelError("curvature must be antisymmetric")
        vals = np.broadcast_to(f, (base.n_vertices, *f.shape)).copy()
        return CurvatureField(base, vals, vals.copy(), s)

    def norms(self) -> FloatArray:
        """|F|² = ½ Σ_ij σ(F_ij, F_ij) pointwise."""
        sq = 0.5 * np.einsum("xija,ab,xijb->x", self.values, self.sigma, self.values)
        return np.sqrt(np.maximum(sq, 0.0))  # type: ignore

    def sup_norm(self) -> float:
        return float(np.max(self.norms())) if self.values.size else 0.0

    def is_constant(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values - self.values[:1])) <= tol)

    def rows(self) -> tuple[list[str], list[list[Any]]]:
        """CSV rows keyed by vertex multi-index."""
        idx = self.base.multi_index()
        n = self.base.dims
        header = [f"x{a}" for a in range(n)] + ["i", "j", "alpha", "F"]
        out = []
        for x in range(self.base.n_vertices):
            for i in range(n):
                for j in range(i + 1, n):
                    for a in range(self.values.shape[3]):
                        out.append([*idx[x].tolist(), i, j, a, float(self.values[x, i, j, a])])
        return header, out


def plaquette_holonomies(conn: DiscreteConnection) -> dict[tuple[int, int], list[Any]]:
    """U_{x,i} U_{x+e_i,j} U_{x+e_j,i}⁻¹ U_{x,j}⁻¹ for every vertex x and
    plane i < j of a torus grid."""
    base = conn.base
    if not base.is_grid:
        raise ModelError("plaquettes need a torus grid; use face_holonomies on graphs")
    group = conn.group
    n = base.n_vertices
    out: dict[tuple[int, int], list[Any]] = {}
    for i in range(base.dims):
        for j in range(i + 1, base.dims):
            si = base.shift(i)
            sj = base.shift(j)
            if group.kind == "u1":
                th = (
                    conn.axis_links(i)
                    + conn.axis_links(j)[si]
                    - conn.axis_links(i)[sj]
                    - conn.axis_links(j)
                )
                out[(i, j)] = [float(t) for t in np.mod(th, 2 * np.pi)]
                continue
            hols = []
            for x in range(n):
                a = conn.link(base.edge_index(i, x))
                b = conn.link(base.edge_index(j, int(si[x])))
                c = group.inverse(conn.link(base.edge_index(i, int(sj[x]))))
                d = group.inverse(conn.link(base.edge_index(j, x)))
                hols.append(group.multiply(group.multiply(group.multiply(a, b), c), d))
            out[(i, j)] = hols
    return out


def plaquette_curvature(conn: DiscreteConnection) -> CurvatureField:
    """Principal logarithm of each plaquette holonomy over the plaquette
    area; vertex values average the four plaquettes at the vertex."""
    base = conn.base
    group = conn.group
    if not group.is_lie:
        raise ModelError("curvature needs a Lie group; compare plaquette classes instead")
    h = base.spacing()
    n, k = base.n_vertices, group.lie_dim
    dims = base.dims
    plaq = np.zeros((n, dims, dims, k))
    for (i, j), hols in plaquette_holonomies(conn).items():
        for x, g in enumerate(hols):
            if group.log_norm(g) >= np.pi - 1e-12:
                raise ModelError(f"plaquette too coarse at vertex {x} in plane ({i},{j})")
            v = group.log(g) / (h[i] * h[j])
            plaq[x, i, j] = v
            plaq[x, j, i] = -v
    vals = np.zeros_like(plaq)
    for i in range(dims):
        for j in range(i + 1, dims):
            mi = base.shift(i, -1)
            mj = base.shift(j, -1)
            p = plaq[:, i, j]
            avg = (p + p[mi] + p[mj] + p[mi][mj]) / 4
            vals[:, i, j] = avg
            vals[:, j, i] = -avg
    return CurvatureField(base, vals, plaq, group.sigma)


def conjugacy_class(group: CompactGroupModel, g: int) -> frozenset[int]:
    return frozenset(
        group.multiply(group.multiply(h, g), group.inverse(h)) for h in range(group.order)
    )


def face_holonomies(conn: DiscreteConnection) -> list[tuple[list[int], Any]]:
    """Holonomy around every cycle of a minimum cycle basis of the base
    graph, walked from its smallest vertex."""
    graph = conn.base.to_networkx()
    group = conn.group
    out = []
    for cycle in sorted(nx.minimum_cycle_basis(graph), key=lambda c: sorted(c)):
        sub = graph.subgraph(cycle)
        start = min(cycle)
        walk = [start]
        prev = None
        cur = start
        while True:
            nxt = sorted(v for v in sub.neighbors(cur) if v != prev)
            if not nxt or nxt[0] == start and len(walk) == len(cycle):
                break
            candidates = [v for v in nxt if v not in walk]
            if not candidates:
                break
            prev, cur = cur, candidates[0]
            walk.append(cur)
        hol = group.identity()
        for x, y in zip(walk, walk[1:] + walk[:1]):
            hol = group.multiply(hol, conn.transport(x, y))
        out.append((walk, hol))
    return out


def covariant_derivative_F(
    curvature: CurvatureField, conn: DiscreteConnection | None = None
) -> FloatArray:
    """(∇_k F_ij)(x) by centred differences, neighbours transported to x by
    Ad(U) when a nonabelian connection is supplied. Shape (N, n, n, n, k),
    index order [x, k, i, j, α]."""
    base = curvature.base
    if not base.is_grid:
        raise ModelError("∇F needs a torus grid")
    h = base.spacing()
    F = curvature.values
    out = np.zeros((base.n_vertices, base.dims, *F.shape[1:]))
    nonabelian = conn is not None and conn.group.kind == "su2"
    for k in range(base.dims):
        fwd = base.shift(k, 1)
        bwd = base.shift(k, -1)
        Ff = F[fwd]
        Fb = F[bwd]
        if nonabelian:
            assert conn is not None
            group = conn.group
            Ff = Ff.copy()
            Fb = Fb.copy()
            for x in range(base.n_vertices):
                up = group.adjoint(conn.link(base.edge_index(k, x)))
                down = group.adjoint(group.inverse(conn.link(base.edge_index(k, int(bwd[x])))))
                Ff[x] = np.einsum("ab,ijb->ija", up, Ff[x])
                Fb[x] = np.einsum("ab,ijb->ija", down, Fb[x])
        out[:, k] = (Ff - Fb) / (2 * h[k])
    return out


def codifferential_F(
    base: BaseLattice,
    curvature: CurvatureField,
    nablaF: FloatArray | None = None,
) -> FloatArray:
    """{(d^∇)*F}_j = −Σ_i (∇_i F)_{ij}, shape (N, n, k)."""
    if not base.is_grid:
        raise ModelError("codifferential needs a torus grid")
    nf = covariant_derivative_F(curvature) if nablaF is None else nablaF
    return -np.einsum("xiija->xja", nf)  # type: ignore


def bianchi_defect(nablaF: FloatArray) -> float:
    """max |∇_iF_jk + ∇_jF_ki + ∇_kF_ij|."""
    cyc = (
        nablaF
        + np.einsum("xjkia->xijka", nablaF)
        + np.einsum("xkija->xijka", nablaF)
    )
    return float(np.max(np.abs(cyc))) if cyc.size else 0.0


#############
# KK METRIC #
#############


@dataclass(frozen=True, eq=False)
class KKMetricField:
    """Block metric in the frame (∂̂_1..∂̂_n, e_1^♯..e_k^♯); the mixed block
    vanishes."""

    horizontal: FloatArray
    vertical: FloatArray
    cell_volume: float

    @property
    def blocks(self) -> FloatArray:
        n_v, n, _ = self.horizontal.shape
        k = self.vertical.shape[0]
        out = np.zeros((n_v, n + k, n + k))
        out[:, :n, :n] = self.horizontal
        out[:, n:, n:] = self.vertical
        return out

    def determinant(self) -> FloatArray:
        return np.linalg.det(self.blocks)  # type: ignore

    def total_space_volume(self, group: CompactGroupModel) -> float:
        """Σ_x √det h_x · cell volume, with the fiber measured in Haar units
        per √det σ."""
        unit = group.total_mass() / float(np.sqrt(np.linalg.det(self.vertical)))
        return float(np.sum(np.sqrt(self.determinant())) * self.cell_volume * unit)


def kk_metric(
    base: BaseLattice, conn: DiscreteConnection | None, sigma: ArrayLike
) -> KKMetricField:
    s = np.atleast_2d(np.asarray(sigma, dtype=float))
    if np.any(np.linalg.eigvalsh(s) <= 0):
        raise ModelError("σ must be positive definite")
    if conn is not None and conn.group.lie_dim != s.shape[0]:
        raise ModelError("inconsistent dimensions")
    g = np.broadcast_to(np.eye(base.dims), (base.n_vertices, base.dims, base.dims)).copy()
    return KKMetricField(g, s, base.cell_volume())


#########
# RICCI #
#########


@dataclass(frozen=True, eq=False)
class RicciBlocks:
    hh: FloatArray
    hv: FloatArray
    vv: FloatArray
    kappa: float

    @property
    def full(self) -> FloatArray:
        n_v, n, _ = self.hh.shape
        k = self.vv.shape[1]
        out = np.zeros((n_v, n + k, n + k))
        out[:, :n, :n] = self.hh
        out[:, :n, n:] = self.hv
        out[:, n:, :n] = self.hv.transpose(0, 2, 1)
        out[:, n:, n:] = self.vv
        return out

    def rows(self) -> tuple[list[str], list[list[Any]]]:
        full = self.full
        header = ["vertex", "a", "b", "ricci"]
        rows = []
        for x in range(full.shape[0]):
            for a in range(full.shape[1]):
                for b in range(a, full.shape[2]):
                    rows.append([x, a, b, float(full[x, a, b])])
        return header, rows


def ricci_blocks_at(
    F: FloatArray,
    dstar: FloatArray,
    sigma: FloatArray,
    structure_constants: FloatArray,
    base_ricci: FloatArray | None = None,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """
    Ricci blocks of h(g, A, σ) at one point of a flat base, in the frame
    (∂̂_j, e_β^♯):

      HH_jk = Ric_jk − ½ σ_αβ (F*F)_jk^{αβ},  (F*F)_jk^{αβ} = g^{ih} F_ki^α F_jh^β
      HV_jβ = ½ {(d^∇)*F}_j^μ σ_βμ
      VV_βμ = ¼ g^{jk}(F*F)_jk^{αδ} σ_αβ σ_δμ + ¼ σ^{αδ} σ([e_α,e_β],[e_δ,e_μ])

    F has shape (n, n, k), dstar (n, k).
    """
    n = F.shape[0]
    FF = np.einsum("kia,jib->jkab", F, F)
    ric = np.zeros((n, n)) if base_ricci is None else base_ricci
    hh = ric - 0.5 * np.einsum("jkab,ab->jk", FF, sigma)
    hv = 0.5 * np.einsum("jm,bm->jb", dstar, sigma)
    vv = 0.25 * np.einsum("jjad,ab,dm->bm", FF, sigma, sigma)
    c = structure_constants
    if c.size and np.any(c != 0):
        inv = np.linalg.inv(sigma)
        vv = vv + 0.25 * np.einsum("ad,abp,pq,dmq->bm", inv, c, sigma, c)
    return hh, hv, vv


def ricci_h(
    base: BaseLattice,
    curvature: CurvatureField,
    sigma: ArrayLike,
    group: CompactGroupModel,
    nablaF: FloatArray | None = None,
    base_ricci: FloatArray | None = None,
) -> RicciBlocks:
    """
    Ricci curvature of the Kaluza–Klein metric at every vertex of a flat
    torus grid. κ̂ is the smallest generalised eigenvalue of Ric relative to
    h over all vertices. Nonabelian groups are supported only for constant
    curvature fields (the trivial connection in particular).
    """
    if not base.is_grid:
        raise ModelError("missing ∇F: Ricci blocks need a torus grid")
    s = np.atleast_2d(np.asarray(sigma, dtype=float))
    if not group.is_abelian and not curvature.is_constant():
        raise ModelError(
            "unsupported: nonabelian Ricci needs a constant curvature field"
        )
    if nablaF is None:
        if group.is_abelian:
            nablaF = covariant_derivative_F(curvature)
        else:
            nablaF = np.zeros((base.n_vertices, base.dims, *curvature.values.shape[1:]))
    dstar = codifferential_F(base, curvature, nablaF)

    n_v, n, k = base.n_vertices, base.dims, s.shape[0]
    hh = np.zeros((n_v, n, n))
    hv = np.zeros((n_v, n, k))
    vv = np.zeros((n_v, k, k))
    metric = scipy.linalg.block_diag(np.eye(n), s)
    kappa = np.inf
    for x in range(n_v):
        hh[x], hv[x], vv[x] = ricci_blocks_at(
            curvature.values[x], dstar[x], s, group.structure_constants, base_ricci
        )
        full = np.block([[hh[x], hv[x]], [hv[x].T, vv[x]]])
        kappa = min(kappa, float(scipy.linalg.eigh(full, metric, eigvals_only=True)[0]))
    Logger.debug(f"ricci_h: kappa {kappa} over {n_v} vertices")
    return RicciBlocks(hh, hv, vv, float(kappa))


##########
# CHARTS #
##########


@dataclass(frozen=True, eq=False)
class Chart:
    """A closed-form metric on a coordinate box with a frame (columns are
    frame vectors in coordinates) and a reference point."""

    name: str
    metric: Callable[[FloatArray], FloatArray]
    frame: Callable[[FloatArray], FloatArray]
    point: FloatArray


def euclidean_chart(n: int = 3) -> Chart:
    return Chart(
        "euclidean",
        lambda p: np.eye(n),
        lambda p: np.eye(n),
        np.full(n, 0.3),
    )


def sphere_chart(r: float = 1.0) -> Chart:
    def metric(p: FloatArray) -> FloatArray:
        return np.diag([r**2, (r * np.sin(p[0])) ** 2])

    def frame(p: FloatArray) -> FloatArray:
        return np.diag([1 / r, 1 / (r * np.sin(p[0]))])

    return Chart("sphere", metric, frame, np.array([1.0, 0.4]))


def warped_chart(a: Callable[[float], float], name: str = "warped") -> Chart:
    """dx² + dy² + (dθ − a(x) dy)² in coordinates (x, y, θ): a circle bundle
    over the flat plane with connection form dθ − a(x)dy."""

    def metric(p: FloatArray) -> FloatArray:
        ax = a(p[0])
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0 + ax * ax, -ax], [0.0, -ax, 1.0]])

    def frame(p: FloatArray) -> FloatArray:
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, a(p[0]), 1.0]])

    return Chart(name, metric, frame, np.array([0.7, 0.2, 0.1]))


def heisenberg_chart(b: float) -> Chart:
    """dx² + dy² + (dθ − b·x dy)²; curvature F_12 = −b."""
    return warped_chart(lambda x: b * x, name=f"heisenberg[{b}]")


def sine_chart(b: float) -> Chart:
    """Warping a(x) = b sin x; F_12 = −b cos x and (d^∇)*F_2 = −b sin x."""
    return warped_chart(lambda x: b * np.sin(x), name=f"sine[{b}]")


def _su2_euler_jacobian(p: FloatArray) -> FloatArray:
    # q⁻¹∂q in the basis e_a, columns (α, β, γ)
    _, b, c = p
    return np.array(
        [
            [-np.sin(b) * np.cos(c), np.sin(c), 0.0],
            [np.sin(b) * np.sin(c), np.cos(c), 0.0],
            [np.cos(b), 0.0, 1.0],
        ]
    )


def su2_fiber_chart(sigma: ArrayLike | None = None) -> Chart:
    """Left-invariant metric σ on SU(2) in Euler ZYZ coordinates."""
    s = np.eye(3) if sigma is None else np.asarray(sigma, dtype=float)

    def metric(p: FloatArray) -> FloatArray:
        jac = _su2_euler_jacobian(p)
        return jac.T @ s @ jac  # type: ignore

    def frame(p: FloatArray) -> FloatArray:
        return np.linalg.inv(_su2_euler_jacobian(p))  # type: ignore

    return Chart("su2", metric, frame, np.array([0.3, 1.1, 0.7]))


#############
# FD ORACLE #
#############


def _christoffel(
    metric: Callable[[FloatArray], FloatArray], p: FloatArray, step: float
) -> FloatArray:
    g = metric(p)
    if abs(np.linalg.det(g)) < 1e-14:
        raise ModelError("singular metric")
    n = p.shape[0]
    dg = np.zeros((n, n, n))
    for l in range(n):
        e = np.zeros(n)
        e[l] = step
        dg[l] = (metric(p + e) - metric(p - e)) / (2 * step)
    # term[l, i, j] = ∂_i g_jl + ∂_j g_il − ∂_l g_ij
    term = np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    return 0.5 * np.einsum("kl,lij->kij", np.linalg.inv(g), term)  # type: ignore


def ricci_fd_oracle(
    metric: Callable[[FloatArray], FloatArray], point: ArrayLike, step: float = 1e-3
) -> FloatArray:
    """
    Ricci tensor in coordinates from centred differences of the
    Christoffel symbols, themselves centred differences of the metric.
    O(step²).
    """
    p = np.asarray(point, dtype=float)
    n = p.shape[0]
    gam = _christoffel(metric, p, step)
    dgam = np.zeros((n, n, n, n))
    for m in range(n):
        e = np.zeros(n)
        e[m] = step
        dgam[m] = (_christoffel(metric, p + e, step) - _christoffel(metric, p - e, step)) / (
            2 * step
        )
    return (  # type: ignore
        np.einsum("kkij->ij", dgam)
        - np.einsum("jkik->ij", dgam)
        + np.einsum("kkl,lij->ij", gam, gam)
        - np.einsum("kjl,lik->ij", gam, gam)
    )


def chart_ricci_frame(chart: Chart, step: float = 1e-3) -> FloatArray:
    """FD Ricci evaluated on the chart frame at its reference point."""
    ric = ricci_fd_oracle(chart.metric, chart.point, step)
    e = chart.frame(chart.point)
    return e.T @ ric @ e  # type: ignore
