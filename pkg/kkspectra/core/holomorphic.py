from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
import scipy.sparse as sp

from kkspectra.core.bundle import (
    DiscreteConnection,
    connection_from_flux,
    plaquette_curvature,
    torus_grid,
)
from kkspectra.core.group_rep import J2, u1_group, u1_rep
from kkspectra.core.spectral import (
    Spectrum,
    SymmetricOperator,
    connection_laplacian,
    eigs,
)
from kkspectra.utils.errors import ModelError
from kkspectra.utils.logger import Logger


@dataclass(frozen=True)
class EllipticCurveBundle:
    """Degree-k line bundle on the flat torus R²/(L₁Z × L₂Z) with its
    constant-curvature connection and an optional flat twist (θ₁, θ₂)."""

    periods: tuple[float, float] = (2 * np.pi, 2 * np.pi)
    k: int = 1
    holonomy: tuple[float, float] = (0.0, 0.0)

    @property
    def area(self) -> float:
        return float(self.periods[0] * self.periods[1])

    @property
    def mu(self) -> float:
        return 2 * np.pi * self.k / self.area

    @property
    def diameter(self) -> float:
        return float(np.hypot(*self.periods) / 2)


def bundle_connection(bundle: EllipticCurveBundle, m: int) -> DiscreteConnection:
    if m < 2:
        raise ModelError("grid needs at least 2 points per axis")
    base = torus_grid([m, m], bundle.periods)
    conn = connection_from_flux(base, u1_group(), bundle.k)
    twist = np.concatenate([np.full(base.n_vertices, th / m) for th in bundle.holonomy])
    links = np.mod(conn.links + twist, 2 * np.pi)
    return DiscreteConnection(base, conn.group, links)


def landau_operator(bundle: EllipticCurveBundle, m: int) -> SymmetricOperator:
    """∇*∇ on sections of the line bundle, complex scalars as R² fibers."""
    return connection_laplacian(bundle_connection(bundle, m), u1_rep(1))


def _forward_difference(conn: DiscreteConnection, axis: int) -> sp.csr_matrix:
    # (∇_i s)_x = (ρ(U_{x,x+e_i}) s_{x+e_i} − s_x) / h_i
    base = conn.base
    h = base.spacing()[axis]
    rep = u1_rep(1)
    nxt = base.shift(axis)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for x in range(base.n_vertices):
        r = rep.rho(conn.link(base.edge_index(axis, x)))
        y = int(nxt[x])
        for a in range(2):
            rows.append(2 * x + a)
            cols.append(2 * x + a)
            vals.append(-1 / h)
            for b in range(2):
                rows.append(2 * x + a)
                cols.append(2 * y + b)
                vals.append(r[a, b] / h)
    n = 2 * base.n_vertices
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _dbar_parts(
    conn: DiscreteConnection,
) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    n1 = _forward_difference(conn, 0)
    n2 = _forward_difference(conn, 1)
    j = sp.kron(sp.identity(conn.base.n_vertices), sp.csr_matrix(J2)).tocsr()
    dbar = ((n1 - j @ n2) / np.sqrt(2)).tocsr()
    return n1, n2, dbar


def dbar_laplacian(bundle: EllipticCurveBundle, m: int) -> SymmetricOperator:
    """Δ_∂̄ = D̄*D̄ with D̄ = (∇₁ − J∇₂)/√2 from forward covariant differences
    of the same link data as landau_operator."""
    conn = bundle_connection(bundle, m)
    _, _, dbar = _dbar_parts(conn)
    cell = conn.base.cell_volume()
    k = (cell * (dbar.T @ dbar)).tocsr()
    return SymmetricOperator(k, np.full(k.shape[0], cell), "dbar")


@dataclass(frozen=True)
class WeitzenbockReport:
    operator_defect: float
    spectral_gap: float
    rough: list[float]
    shifted: list[float]


def weitzenbock_check(
    bundle: EllipticCurveBundle, m: int, count: int = 8, seed: int = 0
) -> WeitzenbockReport:
    """
    ∇*∇ = 2Δ_∂̄ + K with K = J(N₁ᵀN₂ − N₂ᵀN₁) holds exactly on the lattice;
    K tends to μ, so the lowest eigenvalues of ∇*∇ match 2λ(Δ_∂̄) + μ up to
    discretisation. The spectral gap is relative to μ (absolute for μ = 0).
    """
    conn = bundle_connection(bundle, m)
    n1, n2, dbar = _dbar_parts(conn)
    j = sp.kron(sp.identity(conn.base.n_vertices), sp.csr_matrix(J2)).tocsr()
    curv = j @ (n1.T @ n2 - n2.T @ n1)
    rough = connection_laplacian(conn, u1_rep(1))
    lhs = rough.stiffness / conn.base.cell_volume()
    diff = lhs - 2 * (dbar.T @ dbar) - curv
    defect = float(abs(diff).max()) if diff.nnz else 0.0

    count = min(count, rough.dimension)
    a = eigs(rough, count, seed).values
    b = 2 * eigs(dbar_laplacian(bundle, m), count, seed).values + bundle.mu
    scale = abs(bundle.mu) if bundle.mu != 0 else 1.0
    gap = float(np.max(np.abs(a - b))) / scale
    Logger.debug(f"weitzenbock k={bundle.k} m={m}: operator {defect}, spectral {gap}")
    return WeitzenbockReport(defect, gap, a.tolist(), b.tolist())


def h0_dimension(spec: Spectrum, mu: float, cluster_tol: float) -> int:
    """
    Half the multiplicity of the lowest eigenvalue cluster when it sits at
    μ, otherwise 0. The spectrum must reach past the first gap.
    """
    vals = np.sort(spec.values)
    if not vals.size:
        raise ModelError("unresolved cluster: empty spectrum")
    in_cluster = vals - vals[0] <= cluster_tol
    size = int(np.count_nonzero(in_cluster))
    if size == vals.size or vals[size] - vals[size - 1] < 10 * cluster_tol:
        raise ModelError("unresolved cluster")
    center = float(np.mean(vals[:size]))
    if abs(center - mu) > cluster_tol:
        Logger.warn(f"lowest cluster at {center}, not at mu={mu}")
        return 0
    return size // 2


def landau_spectrum(
    bundle: EllipticCurveBundle, m: int, count: int | None = None, seed: int = 0
) -> Spectrum:
    """Enough of spec(∇*∇) to pass the first Landau gap."""
    n = 2 * abs(bundle.k) + 6 if count is None else count
    return eigs(landau_operator(bundle, m), min(n, 2 * m * m), seed)


def h0_bound_table(
    bundles: Sequence[EllipticCurveBundle],
    grid: int | Callable[[EllipticCurveBundle], int],
    rel_tol: float = 0.05,
    seed: int = 0,
) -> list[dict[str, Any]]:
    """(k, area, diameter, sup|F|, μ, dim H⁰) per family member."""
    rows = []
    for bundle in bundles:
        m = grid(bundle) if callable(grid) else grid
        spec = landau_spectrum(bundle, m, seed=seed)
        tol = rel_tol * max(abs(bundle.mu), 1e-3)
        sup_f = plaquette_curvature(bundle_connection(bundle, m)).sup_norm()
        rows.append(
            {
                "k": bundle.k,
                "area": bundle.area,
                "diameter": bundle.diameter,
                "sup_F": sup_f,
                "mu": bundle.mu,
                "dim": h0_dimension(spec, bundle.mu, tol),
            }
        )
    return rows


def landau_levels(spec: Spectrum, tol: float) -> list[tuple[float, int]]:
    """(center, multiplicity) of eigenvalue groups, a group collecting the
    values within tol of its first member."""
    levels: list[list[float]] = []
    for lam in np.sort(spec.values):
        if levels and lam - levels[-1][0] <= tol:
            levels[-1].append(float(lam))
        else:
            levels.append([float(lam)])
    return [(float(np.mean(v)), len(v)) for v in levels]
