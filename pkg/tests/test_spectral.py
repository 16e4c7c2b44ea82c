from __future__ import annotations

import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp

from kkspectra.core.bundle import (
    DiscreteConnection,
    connection_from_flux,
    connection_from_holonomy,
    connection_from_links,
    cycle_base,
    graph_base,
    random_connection,
    torus_grid,
)
from kkspectra.core.group_rep import (
    cyclic_group,
    cyclic_irreps,
    dihedral_group,
    discrete_casimir,
    matrix_rep,
    u1_group,
    u1_rep,
)
from kkspectra.core.mm_space import PointMap, equivariance_defect
from kkspectra.core.spectral import (
    FamilyBounds,
    SymmetricOperator,
    TransferMap,
    add_fiber_edges,
    averaged_transfer,
    base_laplacian,
    commutation_defect,
    connection_laplacian,
    cover_decomposition,
    eigen_continuity,
    eigs,
    isotypic_restriction,
    lower_bound_probe,
    mosco_probe,
    operator_triplets,
    partial_heat_trace,
    strong_convergence_defect,
    total_laplacian,
    verify_shift,
    voltage_cover,
)
from kkspectra.scenarios.holonomy_continuity import closed_form, wrap_connection
from kkspectra.scenarios.mosco_circle import grid_space
from kkspectra.utils.cover_graph import CoverGraph
from kkspectra.utils.errors import ModelError


def c3_with_sign() -> DiscreteConnection:
    return connection_from_links(cycle_base(3), cyclic_group(2), [1, 0, 0])


class TestOperators:
    def test_cycle_spectrum(self):
        spec = eigs(base_laplacian(cycle_base(6)))
        expected = np.sort(2 - 2 * np.cos(2 * np.pi * np.arange(6) / 6))
        assert np.allclose(spec.values, expected, atol=1e-12)
        assert spec.method == "dense"

    def test_torus_mass_weighting(self):
        op = base_laplacian(torus_grid([8]))
        assert op.symmetry_defect() == 0
        h = 2 * np.pi / 8
        assert eigs(op, 2).values[1] == pytest.approx((2 - 2 * np.cos(h)) / h**2)

    def test_eigs_sparse_path(self):
        op = base_laplacian(torus_grid([40, 40]))
        dense = eigs(op, 6)
        sparse = eigs(op, 6, dense_limit=100)
        assert sparse.method == "arpack"
        assert np.allclose(dense.values, sparse.values, atol=1e-8)

    def test_count_beyond_dimension(self):
        with pytest.raises(ModelError, match="exceeds dimension"):
            eigs(base_laplacian(cycle_base(4)), 5)

    @pytest.mark.parametrize("alpha", [0.0, 0.3, np.pi])
    def test_flat_circle_bundle(self, alpha):
        conn = connection_from_holonomy(cycle_base(8), u1_group(), [alpha])
        spec = eigs(connection_laplacian(conn, u1_rep(1)))
        assert np.allclose(spec.values, closed_form(8, alpha), atol=1e-12)

    def test_rep_must_be_orthogonal(self):
        bad = matrix_rep("bad", [[[1.0]], [[2.0]]])
        with pytest.raises(ModelError, match="not orthogonal"):
            connection_laplacian(c3_with_sign(), bad)

    def test_heat_trace(self):
        spec = eigs(base_laplacian(cycle_base(5)))
        trace = partial_heat_trace(spec, [0.0, 1.0])
        assert trace[0] == pytest.approx(5)
        assert trace[1] == pytest.approx(np.sum(np.exp(-spec.values)))

    def test_triplets(self):
        rows, cols, entries = operator_triplets(base_laplacian(cycle_base(3)))
        assert (rows, cols) == (3, 3)
        assert (0, 0, 2.0) in entries
        assert (0, 1, -1.0) in entries


class TestCovers:
    def test_hexagon(self):
        cover, act, proj = voltage_cover(c3_with_sign())
        assert cover.components() == 1
        spec = eigs(total_laplacian(cover, cyclic_group(2), 0.0))
        expected = np.sort(2 - 2 * np.cos(2 * np.pi * np.arange(6) / 6))
        assert np.allclose(spec.values, expected, atol=1e-12)
        assert proj.mapping.tolist() == [0, 0, 1, 1, 2, 2]

    def test_trivial_voltage_disconnects(self):
        conn = connection_from_links(cycle_base(3), cyclic_group(2), [0, 0, 0])
        cover, _, _ = voltage_cover(conn)
        assert cover.components() == 2

    def test_deck_commutation(self):
        conn = random_connection(graph_base(nx.petersen_graph()), dihedral_group(3), seed=5)
        cover, act, _ = voltage_cover(conn)
        total = total_laplacian(cover, conn.group, 1.0)
        assert commutation_defect(total, act) < 1e-12

    def test_needs_finite_group(self):
        conn = random_connection(cycle_base(4), u1_group(), seed=0)
        with pytest.raises(ModelError, match="finite group"):
            voltage_cover(conn)

    @pytest.mark.parametrize("order", [2, 3, 4, 5, 6])
    def test_cyclic_decomposition(self, order):
        base = graph_base(nx.connected_watts_strogatz_graph(12, 4, 0.3, seed=order))
        conn = random_connection(base, cyclic_group(order), seed=order)
        decomp = cover_decomposition(conn, fiber_weight=0.7)
        assert decomp.union_gap < 1e-10
        assert all(r["gap"] < 1e-10 for r in decomp.rows)
        assert decomp.dimension_count == 12 * order

    def test_s3_decomposition(self):
        conn = random_connection(graph_base(nx.cycle_graph(7)), dihedral_group(3), seed=2)
        decomp = cover_decomposition(conn)
        mult = {r["irrep"]: r["multiplicity"] for r in decomp.rows}
        assert mult == {"trivial": 1, "det": 1, "std1": 2}
        assert decomp.union_gap < 1e-10

    def test_shift_by_casimir(self):
        group = cyclic_group(4)
        conn = random_connection(cycle_base(6), group, seed=9)
        cover, act, _ = voltage_cover(conn)
        total = total_laplacian(cover, group, 2.0)
        for rep in cyclic_irreps(group):
            iso = eigs(isotypic_restriction(total, act, rep))
            base = eigs(connection_laplacian(conn, rep))
            chi = discrete_casimir(group, rep, weight=2.0)
            assert verify_shift(iso, base, chi) < 1e-10

    def test_shift_count_mismatch(self):
        a = eigs(base_laplacian(cycle_base(3)))
        b = eigs(base_laplacian(cycle_base(4)))
        with pytest.raises(ModelError, match="count mismatch"):
            verify_shift(a, b, 0.0)

    def test_noncommuting_operator_rejected(self):
        cover, act, _ = voltage_cover(c3_with_sign())
        k = sp.diags(np.arange(6.0)).tocsr()
        op = SymmetricOperator(k, np.ones(6), "diag")
        with pytest.raises(ModelError, match="does not commute"):
            isotypic_restriction(op, act, cyclic_irreps(cyclic_group(2))[0])

    def test_fiber_edges_recorded(self):
        cover, _, _ = voltage_cover(c3_with_sign())
        add_fiber_edges(cover, cyclic_group(2))
        dot = cover.to_dot_str()
        back = CoverGraph.from_dot_str(dot)
        assert back.graph.number_of_edges() == cover.graph.number_of_edges()
        assert back.components() == 1


class TestTransfer:
    def test_averaging_is_equivariant(self):
        conn = connection_from_links(cycle_base(5), cyclic_group(3), [1, 0, 0, 0, 0])
        _, act, proj = voltage_cover(conn)
        space = proj.source
        mapping = np.arange(space.n_points)
        mapping[[0, 1]] = mapping[[1, 0]]
        phi = PointMap(space, space, mapping)
        avg = averaged_transfer(TransferMap.from_point_map(phi), act, act)
        assert avg.equivariance_residual < 1e-12
        assert avg.defect <= equivariance_defect(phi, act, act)

    def test_identity_transfer_needs_no_averaging(self):
        conn = random_connection(cycle_base(4), cyclic_group(2), seed=3)
        _, act, proj = voltage_cover(conn)
        phi = PointMap(proj.source, proj.source, np.arange(proj.source.n_points))
        avg = averaged_transfer(TransferMap.from_point_map(phi), act, act)
        assert avg.defect == 0

    def test_tensor(self):
        t = TransferMap(sp.identity(3, format="csr"), np.ones(3), np.ones(3))
        assert t.tensor(2).matrix.shape == (6, 6)


class TestConvergence:
    def test_continuity_rates(self):
        rep = u1_rep(1)
        limit = connection_laplacian(wrap_connection(8, 0.3), rep)
        ops = [connection_laplacian(wrap_connection(8, 0.3 + 2.0**-i), rep) for i in (6, 7)]
        ident = sp.identity(limit.dimension, format="csr")
        transfers = [TransferMap(ident, op.mass, limit.mass) for op in ops]
        rows = eigen_continuity(ops, limit, transfers, 4)
        gap = {(r.i, r.j): r.gap for r in rows}
        angle = {(r.i, r.j): r.angle for r in rows}
        for j in range(4):
            assert gap[(0, j)] / gap[(1, j)] > 1.8
            assert angle[(1, j)] < angle[(0, j)]

    def test_mosco_recovery(self):
        fine = torus_grid([64])
        coarse = torus_grid([16])
        mapping = np.arange(16) * 4
        phi = PointMap(grid_space(coarse), grid_space(fine), mapping)
        t = TransferMap.from_point_map(phi)
        x = fine.coordinates()[:, 0]
        report = mosco_probe([base_laplacian(coarse)], base_laplacian(fine), [t], [np.cos(x)])
        assert report.recovery_defects[0][0] < 0.05
        with pytest.raises(ModelError, match="one transfer map per form"):
            mosco_probe([base_laplacian(coarse)], base_laplacian(fine), [], [np.cos(x)])

    def test_strong_convergence(self):
        t = TransferMap(sp.identity(4, format="csr"), np.ones(4), np.ones(4))
        u = np.array([1.0, 0.0, 0.0, 0.0])
        report = strong_convergence_defect([u, u], u, [t, t], [u, np.zeros(4)])
        assert report.defects == [0.0, 1.0]
        assert report.probe_gaps == [0.0, 1.0]


class TestLowerBound:
    def test_single_member(self):
        conn = wrap_connection(6, 0.5)
        report = lower_bound_probe([(conn, u1_rep(1))], 2)
        assert report.value == pytest.approx(closed_form(6, 0.5)[2], abs=1e-12)
        assert np.isnan(report.rows[0]["kappa"])

    def test_flux_family_lowest_level(self):
        base = torus_grid([16, 16])
        family = [(connection_from_flux(base, u1_group(), k), u1_rep(1)) for k in range(1, 6)]
        report = lower_bound_probe(family, 1)
        area = base.volume()
        assert report.value == pytest.approx(2 * np.pi / area, rel=0.01)
        assert report.kappa == 0.0
        assert report.diameter == pytest.approx(np.pi * np.sqrt(2))
        # constant flux: |F| = 2πk/Area and (d^∇)*F = 0
        assert report.n == pytest.approx(2 * np.pi * 5 / area, rel=1e-9)
        assert [r["sup_dstarF"] for r in report.rows] == pytest.approx([0.0] * 5, abs=1e-9)
        assert set(report.rows[0]) >= {"kappa", "kappa_total", "diameter", "N"}
        assert report.violations == []

    def test_declared_bounds(self):
        base = torus_grid([8, 8])
        family = [(connection_from_flux(base, u1_group(), k), u1_rep(1)) for k in (1, 3)]
        mu1 = 2 * np.pi / base.volume()
        report = lower_bound_probe(family, 0, FamilyBounds(kappa=0.0, diameter=5.0, n=2 * mu1))
        assert len(report.violations) == 1
        assert report.violations[0].startswith("member 1: curvature")
        tight = lower_bound_probe(family, 0, FamilyBounds(diameter=1.0))
        assert len(tight.violations) == 2

    def test_monotone_in_j(self):
        alphas = (0.3, 0.7, 1.9)
        family = [(wrap_connection(12, a), u1_rep(1)) for a in alphas]
        values = [lower_bound_probe(family, j).value for j in range(10)]
        expected = [min(closed_form(12, a)[j] for a in alphas) for j in range(10)]
        assert np.allclose(values, expected, atol=1e-10)
        assert np.all(np.diff(values) >= -1e-12)
        assert values[-1] > 5 * values[0]
